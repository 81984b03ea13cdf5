"""One full engine cycle: insertion, measurement, expansion, reset.

Sign convention for work: ``w_insert`` is work done on the particle by
whoever inserts the barrier; ``w_extract`` is work done by the particle on
the barrier during expansion.  Heats are absorbed by the particle from the
bath.  Energies in hbar*omega, entropies in k_B.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import demon
from . import spectrum as sp
from . import thermo
from .errors import DomainError, TruncationError
from .thermo import Stage

DEFAULT_POINTS = 400
DEFAULT_X0_NEAR = -1e-3
# sweeps restart from a fresh scan every CHUNK points, whatever the worker
# count, so the output does not depend on --jobs
CHUNK = 50
# finite barrier strength standing in for full insertion in the spectral route
G_INSERTED = 1e10


def default_x0_grid(x0_near=DEFAULT_X0_NEAR, x0_far=sp.X0_MIN, points=DEFAULT_POINTS):
    """Log-spaced barrier positions from ``x0_near`` to ``x0_far``, led by x0 = 0.

    The force is largest and varies fastest at the centre, so the segment
    from 0 to the first log point is kept in the quadrature.
    """
    if not x0_far < x0_near < 0:
        raise DomainError("need x0_far < x0_near < 0")
    tail = -np.logspace(math.log10(-x0_near), math.log10(-x0_far), points)
    tail[-1] = x0_far
    return np.concatenate([[0.0], tail])


@dataclass
class WorkCurve:
    """Free energy and force along a barrier sweep, plus the work integral."""

    theta: float
    x0: np.ndarray
    a_free: np.ndarray
    force: np.ndarray
    branches: np.ndarray
    work: float
    work_coarse: float
    work_richardson: float
    delta_a: float
    fd_check: list = field(default_factory=list)

    @property
    def quadrature_error_estimate(self):
        return abs(self.work - self.work_coarse) / 3.0

    @property
    def work_gap(self):
        """Trapezoid work minus the free-energy drop between the grid ends."""
        return self.work - self.delta_a


def _trapezoid_q0(x0, force):
    # work done by the particle as the barrier moves along the grid
    q0 = np.asarray(x0) / sp.DX0_DQ0
    return float(np.sum(0.5 * (force[1:] + force[:-1]) * np.diff(q0)))


def _sweep_chunk(args):
    x0_chunk, theta, n_levels = args
    branches = sp.dirichlet_branches(x0_chunk, n_levels)
    a_free = np.empty(len(x0_chunk))
    force = np.empty(len(x0_chunk))
    for i, x0 in enumerate(x0_chunk):
        spec = sp._ladder("right", branches[i], 0.5, 1.0)
        a_free[i] = thermo.from_spectrum(spec, theta, Stage.EXPANDING, x0=x0).a_free
        slopes = sp.dirichlet_slopes(x0, branches[i])
        force[i] = -sp.DX0_DQ0 * thermo._mean_slope(branches[i], slopes, theta)
    return branches, a_free, force


def expansion_work_curve(theta, x0_grid=None, n_levels=64, jobs=1, fd_check_points=3):
    """Free energy A(x0), force F(x0) and the work extracted along the grid.

    Parameters
    ----------
    theta : float
    x0_grid : array_like, optional
        Non-increasing barrier positions starting at 0; defaults to
        :func:`default_x0_grid`.
    n_levels : int
    jobs : int
        Worker processes; the grid is cut into fixed chunks that are
        reassembled in order, so results do not depend on ``jobs``.
    fd_check_points : int
        Number of grid points at which the level-slope force is compared
        against the finite-difference force.
    """
    thermo._check_theta(theta)
    x0 = default_x0_grid() if x0_grid is None else np.asarray(x0_grid, dtype=float)
    if x0.size < 3 or np.any(np.diff(x0) > 0) or x0[0] > 0:
        raise DomainError("x0 grid must be non-increasing, start at or below 0, and have >= 3 points")
    tasks = [(x0[i:i + CHUNK], theta, n_levels) for i in range(0, x0.size, CHUNK)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_sweep_chunk, tasks))
    else:
        parts = [_sweep_chunk(t) for t in tasks]
    branches = np.vstack([p[0] for p in parts])
    a_free = np.concatenate([p[1] for p in parts])
    force = np.concatenate([p[2] for p in parts])
    work = _trapezoid_q0(x0, force)
    idx = np.arange(0, x0.size, 2)
    if idx[-1] != x0.size - 1:
        idx = np.r_[idx, x0.size - 1]
    work_coarse = _trapezoid_q0(x0[idx], force[idx])
    fd_check = []
    if fd_check_points:
        picks = np.unique(np.linspace(0, x0.size - 1, fd_check_points + 2).astype(int)[1:-1])
        for i in picks:
            f_fd = thermo.force_on_barrier(x0[i], theta, n_levels, method="fd")
            fd_check.append((float(x0[i]), float(force[i]), float(f_fd)))
    return WorkCurve(theta=float(theta), x0=x0, a_free=a_free, force=force, branches=branches,
                     work=work, work_coarse=work_coarse,
                     work_richardson=work + (work - work_coarse) / 3.0,
                     delta_a=float(a_free[0] - a_free[-1]), fd_check=fd_check)


@dataclass
class CycleLedger:
    """Work, heat and entropy bookkeeping for one cycle.

    Closed-form fields always present; ``*_spectral`` fields come from
    Boltzmann sums over computed spectra and are None when the truncation
    needed at this temperature is out of reach; ``*_quadrature`` fields come
    from integrating the barrier force and are None unless requested.
    """

    theta: float
    w_insert: float
    dS_measure: float
    w_extract: float
    w_reset_min: float
    net_gain_naive: float
    net_gain_full: float
    q_insert: float
    q_expand: float
    dS_particle_cycle: float
    dS_pointer_cycle: float
    w_insert_spectral: Optional[float] = None
    w_extract_spectral: Optional[float] = None
    net_gain_full_spectral: Optional[float] = None
    spectral_levels: Optional[int] = None
    spectral_note: str = ""
    w_extract_quadrature: Optional[float] = None
    net_gain_full_quadrature: Optional[float] = None
    quadrature_error_estimate: Optional[float] = None
    endpoint_relaxation_gap: Optional[float] = None

    def as_dict(self):
        return asdict(self)


def _dirichlet_state(theta, n_start, side="right"):
    """Free energy with the barrier at the centre, deepening the truncation as needed."""
    # levels at the centre reach index a = 2n + 1, capped by the evaluator
    n_cap = int((sp.specfun.A_MAX - 1) // 2)
    n = min(n_start, n_cap)
    while True:
        spec = sp.dirichlet_levels_at_x0(0.0, n, side)
        try:
            return thermo.from_spectrum(spec, theta, Stage.EXPANDING, x0=0.0), spec, n
        except TruncationError:
            if n >= n_cap:
                raise
            n = min(n + max(8, n // 4), n_cap)


def spectral_crosscheck(theta, n_levels=64, g=G_INSERTED):
    """(w_insert, w_extract, levels used) from computed spectra alone.

    Three independent spectra: the bare oscillator ladder, the central
    barrier of strength ``g`` (even levels from the Gamma-ratio condition
    plus the odd ladder), and the right-side levels of a hard barrier at
    the centre from the zeros of D_a(0).
    """
    n_h = max(n_levels, thermo.levels_needed(theta))
    initial = thermo.from_spectrum(sp.harmonic_levels(n_h), theta, Stage.INITIAL)
    n_b = max(n_levels, thermo.levels_needed(theta, 0.5, 2.0))
    barrier = thermo.from_spectrum(sp.barrier_levels(g, n_b), theta, Stage.BARRIER_IN)
    right, _, n_r = _dirichlet_state(theta, n_levels)
    return barrier.a_free - initial.a_free, right.a_free - initial.a_free, max(n_h, n_b, n_r)


def run_cycle(theta, n_levels=64, quadrature=False, x0_grid=None, jobs=1):
    """Assemble the cycle ledger at inverse temperature ``theta``."""
    theta = float(theta)
    thermo._check_theta(theta)
    init = thermo.closed_form(Stage.INITIAL, theta)
    perp = thermo.closed_form(Stage.BARRIER_IN, theta)
    right = thermo.closed_form(Stage.POST_MEASURE_R, theta)
    w_insert = perp.a_free - init.a_free
    w_extract = right.a_free - init.a_free
    # the pointer's reduced state does not depend on the particle truncation
    end = demon.end_of_cycle_state(theta, 1, tail_tol=math.inf)
    s_pointer = demon.vn_entropy(demon.trace_out_particle(end.rho))
    w_reset = s_pointer / theta
    ledger = CycleLedger(
        theta=theta,
        w_insert=w_insert,
        dS_measure=right.s - perp.s,
        w_extract=w_extract,
        w_reset_min=w_reset,
        net_gain_naive=w_extract - w_insert,
        net_gain_full=w_extract - w_insert - w_reset,
        q_insert=(perp.e_avg - init.e_avg) - w_insert,
        q_expand=(init.e_avg - right.e_avg) + w_extract,
        dS_particle_cycle=0.0,
        dS_pointer_cycle=s_pointer,
    )
    try:
        wi, we, n_used = spectral_crosscheck(theta, n_levels)
        ledger.w_insert_spectral = wi
        ledger.w_extract_spectral = we
        ledger.net_gain_full_spectral = we - wi - w_reset
        ledger.spectral_levels = n_used
    except TruncationError as exc:
        ledger.spectral_note = f"spectral cross-check skipped: {exc}"
    if quadrature:
        try:
            curve = expansion_work_curve(theta, x0_grid, n_levels, jobs=jobs, fd_check_points=0)
        except TruncationError as exc:
            ledger.spectral_note += f"; quadrature skipped: {exc}"
            return ledger
        ledger.w_extract_quadrature = curve.work_richardson
        ledger.net_gain_full_quadrature = curve.work_richardson - w_insert - w_reset
        ledger.quadrature_error_estimate = curve.quadrature_error_estimate
        # nonzero when the far end of the grid has not relaxed to the bare well
        ledger.endpoint_relaxation_gap = float(curve.a_free[-1] - init.a_free)
    return ledger
