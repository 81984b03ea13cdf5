"""Energy levels of the harmonic well with a delta barrier.

Energies are in units of hbar*omega.  Two dimensionless control
parameters appear:

* ``g = alpha * sqrt(m / (hbar^3 omega))``, strength of a barrier at the
  centre of the well;
* ``x0 = q0 * sqrt(2 m omega / hbar)``, position of an impenetrable barrier
  (the particle lives on ``x > x0``).

Slopes are stored per unit ``x0``; :data:`DX0_DQ0` converts to per unit
``q0`` in natural units (hbar = m = omega = 1).
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from . import specfun
from .errors import BracketError, DomainError

DX0_DQ0 = math.sqrt(2.0)
X0_MIN = -12.0
# internal solver reaches a little past [X0_MIN, 0] so that central
# difference stencils at the ends stay well defined
_X0_STENCIL = 0.5
_SCAN_STEP = 0.2
_XTOL = 1e-14


@dataclass(frozen=True)
class ScaledEnergy:
    """An energy in units of hbar*omega together with its cylinder index."""

    e: float

    @property
    def a(self):
        return self.e - 0.5

    @classmethod
    def from_index(cls, a):
        return cls(float(a) + 0.5)


@dataclass(frozen=True)
class Family:
    """Bookkeeping for one labelled ladder of levels.

    ``max(floor_offset + floor_step * j, floor_start)`` is a lower bound for
    level ``j >= count`` of the family, used to bound the Boltzmann weight
    beyond the truncation.  ``floor_start`` is normally the highest level
    kept, valid whenever levels are sorted within the family.
    """

    name: str
    count: int
    floor_offset: float
    floor_step: float
    floor_start: float = -math.inf

    def tail_weight(self, theta):
        """Upper bound on sum_{j >= count} exp(-theta * e_j)."""
        j = max(self.count, math.ceil((self.floor_start - self.floor_offset) / self.floor_step))
        flat = (j - self.count) * math.exp(-theta * self.floor_start) if j > self.count else 0.0
        first = self.floor_offset + self.floor_step * j
        return flat + math.exp(-theta * first) / -math.expm1(-theta * self.floor_step)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted energy levels with labels such as ``even_0`` or ``right_3``."""

    energies: np.ndarray
    labels: tuple
    families: tuple = field(default_factory=tuple)

    def __post_init__(self):
        order = np.argsort(self.energies, kind="stable")
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float)[order])
        object.__setattr__(self, "labels", tuple(self.labels[i] for i in order))

    def __len__(self):
        return len(self.energies)

    @property
    def n(self):
        """Truncation depth (levels per family)."""
        return max((f.count for f in self.families), default=len(self))

    @property
    def levels(self):
        return [(ScaledEnergy(float(e)), lab) for e, lab in zip(self.energies, self.labels)]

    def family(self, name):
        """Energies of one label family, in order of the family index."""
        picked = [(int(lab.rsplit("_", 1)[1]), e)
                  for e, lab in zip(self.energies, self.labels) if lab.rsplit("_", 1)[0] == name]
        return np.array([e for _, e in sorted(picked)])

    def tail_weight(self, theta):
        return sum(f.tail_weight(theta) for f in self.families)

    def __add__(self, other):
        return Spectrum(np.concatenate([self.energies, other.energies]),
                        self.labels + other.labels, self.families + other.families)


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"number of levels must be a positive integer, got {n}")
    return int(n)


def _ladder(name, energies, floor_offset, floor_step):
    energies = np.asarray(energies, dtype=float)
    labels = tuple(f"{name}_{k}" for k in range(len(energies)))
    fam = Family(name, len(energies), floor_offset, floor_step, float(energies[-1]))
    return Spectrum(energies, labels, (fam,))


def harmonic_levels(n):
    """Unperturbed oscillator, e_k = k + 1/2."""
    n = _check_n(n)
    return _ladder("harmonic", np.arange(n) + 0.5, 0.5, 1.0)


def odd_levels(n):
    """Odd states, blind to a central barrier: e_k = 2k + 3/2."""
    n = _check_n(n)
    return _ladder("odd", 2.0 * np.arange(n) + 1.5, 1.5, 2.0)


# -- central barrier -------------------------------------------------------

def quantization_rhs(e):
    """Right-hand side -2 Gamma(3/4 - e/2) / Gamma(1/4 - e/2) of the even-level condition.

    Zeros sit at e = 2k + 1/2 and vertical asymptotes at e = 2k + 3/2.
    """
    e = np.asarray(e, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -2.0 * special.gamma(0.75 - 0.5 * e) * special.rgamma(0.25 - 0.5 * e)


def _even_objective(e, g):
    # g / Gamma(3/4 - e/2) + 2 / Gamma(1/4 - e/2), times the positive factor
    # pi / Gamma(1/4 + e/2) so that it stays finite for large e; by reflection
    # this is g sin(pi(3/4 - e/2)) + 2 sin(pi(1/4 - e/2)) R(e) with
    # R(e) = Gamma(3/4 + e/2) / Gamma(1/4 + e/2)
    r = special.poch(0.25 + 0.5 * e, 0.5)
    return g * specfun._sinpi(0.75 - 0.5 * e) + 2.0 * specfun._sinpi(0.25 - 0.5 * e) * r


def _even_objective_prime(e, g):
    r = special.poch(0.25 + 0.5 * e, 0.5)
    dr = 0.5 * r * (special.psi(0.75 + 0.5 * e) - special.psi(0.25 + 0.5 * e))
    return (-0.5 * math.pi * g * specfun._cospi(0.75 - 0.5 * e)
            - math.pi * specfun._cospi(0.25 - 0.5 * e) * r
            + 2.0 * specfun._sinpi(0.25 - 0.5 * e) * dr)


def _polished_root(f, lo, hi, fprime=None):
    root = optimize.brentq(f, lo, hi, xtol=_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
    if fprime is not None:
        d = fprime(root)
        if d != 0.0 and np.isfinite(d):
            cand = root - f(root) / d
            if lo <= cand <= hi and abs(f(cand)) < abs(f(root)):
                root = cand
    return root


def even_level_at_g(g, k):
    """Level ``even_k`` for central barrier strength ``g``; lies in [2k+1/2, 2k+3/2]."""
    if g < 0:
        raise DomainError("barrier strength must be non-negative")
    lo, hi = 2.0 * k + 0.5, 2.0 * k + 1.5
    if g == 0:
        return lo
    if math.isinf(g):
        return hi
    f_lo = _even_objective(lo, g)
    f_hi = _even_objective(hi, g)
    if f_lo * f_hi > 0:
        raise BracketError(f"no sign change for even_{k} at g={g}")
    return _polished_root(lambda e: _even_objective(e, g), lo, hi,
                          lambda e: _even_objective_prime(e, g))


def even_levels_at_g(g, n):
    """Even-parity levels e_k(g), k < n, of the well with a central barrier."""
    n = _check_n(n)
    g = float(g)
    energies = [even_level_at_g(g, k) for k in range(n)]
    return _ladder("even", energies, 0.5, 2.0)


def barrier_levels(g, n):
    """Full spectrum (even and odd families) with a central barrier."""
    return even_levels_at_g(g, n) + odd_levels(n)


# -- moving impenetrable barrier ----------------------------------------------

def _dirichlet_f(e, x0):
    return specfun.pcf_d_value(e - 0.5, x0)


def _scan_roots(x0, n):
    """First ``n`` roots in e of D_{e-1/2}(x0) = 0, by sign-change scan.

    Far from the barrier a level sits within rounding of k + 1/2, where the
    sampled function would not change sign, so samples are offset from the
    half-integers and roots are clipped to the floor k + 1/2.
    """
    lo = 0.4
    hi = 2.0 * n + 2.5 + 40.0 * max(x0, 0.0) * n
    roots = []
    while True:
        grid = np.arange(lo, hi + _SCAN_STEP, _SCAN_STEP)
        vals = np.array([_dirichlet_f(e, x0) for e in grid])
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                roots.append(grid[i])
            elif np.sign(vals[i]) != np.sign(vals[i + 1]):
                roots.append(_polished_root(lambda e: _dirichlet_f(e, x0), grid[i], grid[i + 1]))
            if len(roots) == n:
                return np.maximum(np.array(roots), np.arange(n) + 0.5)
        lo = grid[-1]
        hi = lo + 2.0 * (n - len(roots)) + 2.0
        if hi > 2 * specfun.A_MAX:
            raise BracketError(f"found only {len(roots)} of {n} levels at x0={x0}")


def _continued_roots(x0, n, previous):
    """Roots at ``x0`` seeded from roots at a slightly larger ``x0``.

    Branches only move down as the barrier moves left, and branch ``k``
    cannot drop below branch ``k-1``'s previous value, so
    ``(previous[k-1], previous[k]]`` brackets branch ``k``.
    """
    roots = np.empty(n)
    for k in range(n):
        hi = previous[k] + 1e-12
        lo = max(k + 0.4, previous[k - 1] + 1e-12 if k else 0.4)
        f_lo, f_hi = _dirichlet_f(lo, x0), _dirichlet_f(hi, x0)
        if f_hi == 0.0:
            roots[k] = hi
            continue
        if np.sign(f_lo) == np.sign(f_hi) or f_lo == 0.0:
            return None
        roots[k] = max(_polished_root(lambda e: _dirichlet_f(e, x0), lo, hi), k + 0.5)
    return roots


def _dirichlet_energies(x0, n):
    if x0 < X0_MIN - _X0_STENCIL or x0 > _X0_STENCIL:
        raise DomainError(f"x0={x0} outside [{X0_MIN}, 0]")
    return _scan_roots(float(x0), n)


def dirichlet_levels_at_x0(x0, n, side="right"):
    """Levels of the well cut by an impenetrable barrier at ``x0 <= 0``.

    The particle is on the right of the barrier (``D_a(x0) = 0``).  The
    mirror problem (particle on the left, barrier at ``-x0``) has the same
    energies; pass ``side="left"`` to get those labels.
    """
    n = _check_n(n)
    if x0 > 0:
        raise DomainError("the barrier only moves leftwards from the centre (x0 <= 0)")
    if x0 < X0_MIN - 1e-9:
        raise DomainError(f"x0={x0} below x0_min={X0_MIN}")
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    return _ladder(side, _dirichlet_energies(x0, n), 0.5, 1.0)


def dirichlet_branches(x0_grid, n):
    """Levels along a grid of barrier positions, tracking branches.

    For a non-increasing grid each point is seeded from the previous one;
    a full scan is used for the first point and whenever seeding fails.

    Returns
    -------
    ndarray, shape (len(x0_grid), n)
    """
    n = _check_n(n)
    x0_grid = np.asarray(x0_grid, dtype=float)
    out = np.empty((len(x0_grid), n))
    previous = None
    prev_x0 = None
    for i, x0 in enumerate(x0_grid):
        roots = None
        if previous is not None and x0 <= prev_x0:
            roots = _continued_roots(x0, n, previous)
        if roots is None:
            roots = _dirichlet_energies(x0, n)
        out[i] = roots
        previous, prev_x0 = roots, x0
    return out


def dirichlet_slopes(x0, energies, h=1e-3):
    """de/dx0 along each branch by implicit differentiation of D_a(x0) = 0.

    de/dx0 = -(dD/dx) / (dD/da) at the root; dD/da by a five-point
    difference in the index.
    """
    slopes = []
    for e in np.atleast_1d(energies):
        a = e - 0.5
        dx = specfun.pcf_d(a, x0).derivative
        f = [specfun.pcf_d_value(a + s * h, x0) for s in (-2, -1, 1, 2)]
        da = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        slopes.append(-dx / da)
    return np.array(slopes)


# -- slopes at the centre -------------------------------------------------------

def slope_factor(n):
    """(2n+2)! / (4^n n! (n+1)!), evaluated in log space."""
    if n < 0 or n > 60 or int(n) != n:
        raise DomainError("slope factor defined here for integer 0 <= n <= 60")
    n = int(n)
    log_c = (math.lgamma(2 * n + 3) - n * math.log(4.0)
             - math.lgamma(n + 1) - math.lgamma(n + 2))
    return math.exp(log_c)


def dE_dx0_at_zero(n):
    """Slope of right-branch n at x0 = 0, in hbar*omega per unit x0."""
    return slope_factor(n) / math.sqrt(math.pi) / DX0_DQ0


def general_dE_dq0(e):
    """dE/dq0 = -sqrt(2) D'_a(0) / (d/da D_a(0)) in natural units.

    At a branch point e = 2n + 3/2 this is the exact slope of the Dirichlet
    level; elsewhere it is the slope of the level set D_a(x) = D_a(0)
    through (x = 0, a).
    """
    e = e.e if isinstance(e, ScaledEnergy) else float(e)
    a = e - 0.5
    return -DX0_DQ0 * specfun.pcf_dprime0(a) / specfun.pcf_da_at0(a)


def series_identity_check(x, terms):
    """|sum_{n<terms} c_n x^n - 2/(1-x)^{3/2}| with c_n = slope_factor(n)."""
    if not 0 <= x < 1:
        raise DomainError("series converges only for 0 <= x < 1")
    c = 2.0
    power = 1.0
    total = 0.0
    for k in range(int(terms)):
        total += c * power
        c *= (2 * k + 3) / (2.0 * (k + 1))
        power *= x
    return abs(total - 2.0 / (1.0 - x) ** 1.5)
