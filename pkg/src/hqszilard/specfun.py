"""Special functions for the harmonic well with a delta barrier.

Gamma and digamma come from :mod:`scipy.special` behind pole-checking
wrappers.  The parabolic cylinder function ``D_a(x)`` is evaluated here:

* ``|x| <= 1``: Kummer decomposition about the origin (for ``0 < x`` only
  when its error estimate is good, see below);
* ``x < -1`` and the oscillatory region ``x^2 < 4a + 2``: stepwise Taylor
  continuation of the Weber equation starting from the exact values
  ``D_a(0)``, ``D'_a(0)``, except left of the turning point for
  ``a >= -1/2``, where the reflection formula splits off the decaying part;
* the decaying region beyond the turning point: Kummer up to ``X_SWITCH``
  and the large-x asymptotic series beyond it, each only when its own
  error estimate is below 1e-13 relative; otherwise the Weber equation is
  integrated backwards from a point where the asymptotic series is exact
  to rounding.

The Kummer series alone cancels catastrophically for large ``a`` once
``|x|`` exceeds a few units; continuation never subtracts large terms.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _kernels
from .errors import DomainError, PoleError

A_MAX = 200.0
X_SWITCH = 6.0
SERIES_TOL = 1e-15
SERIES_NMAX = 500
_TAYLOR_TOL = 1e-17
_TAYLOR_KMAX = 120
_RECESSIVE_RTOL = 1e-13

_SQRT_PI = math.sqrt(math.pi)
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class PcfValue:
    """Value of D_a(x) with a rounding/truncation error estimate."""

    value: float
    abs_err_estimate: float
    derivative: float = math.nan

    def __float__(self):
        return self.value


def _is_nonpositive_integer(x):
    return x <= 0 and float(x).is_integer()


def gamma(x):
    """Gamma function; raises :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x}")
    return float(special.gamma(x))


def rgamma(x):
    """1/Gamma(x), entire; exactly zero at the Gamma poles."""
    return float(special.rgamma(float(x)))


def digamma(x):
    """Digamma psi(x) = Gamma'(x)/Gamma(x)."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma has a pole at {x}")
    return float(special.psi(x))


def _rgamma_times_digamma(b):
    """psi(b)/Gamma(b), continued through the poles b = -k."""
    if _is_nonpositive_integer(b):
        k = int(-b)
        return (-1.0) ** (k + 1) * math.factorial(k)
    return rgamma(b) * digamma(b)


def _check_index(a):
    if not abs(a) <= A_MAX:
        raise DomainError(f"|a| = {abs(a)} exceeds a_max = {A_MAX}")


def pcf_d0(a):
    """D_a(0) = 2^{a/2} sqrt(pi) / Gamma((1-a)/2).

    At the odd integers ``a = 2k+1`` the Gamma pole gives the limit 0,
    which is returned rather than raised: these are exactly the odd
    oscillator levels, and root finders must be able to land on them.
    """
    a = float(a)
    _check_index(a)
    return 2.0 ** (0.5 * a) * _SQRT_PI * rgamma(0.5 * (1.0 - a))


def pcf_dprime0(a):
    """x-derivative of D_a at the origin, -2^{(1+a)/2} sqrt(pi) / Gamma(-a/2).

    Vanishes (as a limit, not an error) at a = 0, 2, 4, ...
    """
    a = float(a)
    _check_index(a)
    return -(2.0 ** (0.5 * (1.0 + a))) * _SQRT_PI * rgamma(-0.5 * a)


def pcf_da_at0(a):
    """Index derivative d/da D_a(0).

    Uses 2^{a/2-1} sqrt(pi) [ln 2 + psi(b)] / Gamma(b) with b = (1-a)/2,
    taking the finite limit of psi(b)/Gamma(b) at b = 0, -1, -2, ...
    """
    a = float(a)
    _check_index(a)
    b = 0.5 * (1.0 - a)
    bracket = _LN2 * rgamma(b) + _rgamma_times_digamma(b)
    return 2.0 ** (0.5 * a - 1.0) * _SQRT_PI * bracket


def _coefficient_rel_err(a):
    # scipy's Gamma at large argument carries about eps * |ln Gamma| relative error
    return _kernels.EPS * (4.0 + abs(a))


def _continued(a, x, c_even, c_odd):
    val, dval, err = _kernels.taylor_continue(c_even, c_odd, a, x, _TAYLOR_TOL, _TAYLOR_KMAX)
    # coefficient errors ride along with the solution amplitude
    k = math.sqrt(abs(a + 0.5 - 0.25 * x * x) + 1.0)
    return val, dval, err + _coefficient_rel_err(a) * math.hypot(val, dval / k)


def _sinpi(a):
    # exact argument reduction: a - round(a) has no rounding error
    n = round(a)
    return (-1.0) ** (n % 2) * math.sin(math.pi * (a - n))


def _cospi(a):
    n = round(a)
    return (-1.0) ** (n % 2) * math.cos(math.pi * (a - n))


def _reflected(a, x, c_even, c_odd):
    """D_a(x) for x < 0 beyond the turning point, a >= -1/2.

    Uses D_a(-y) = cos(pi a) D_a(y) + (pi / Gamma(-a)) V(-a-1/2, y) with
    y = -x > 0: the decaying part comes from the stable x > 0 evaluation and
    the growing part V is continued forward from its exact values at 0.
    Continuing D_a itself leftwards would lose the decaying part entirely
    when a is close to a non-negative integer.
    """
    y = -x
    d_val, d_der, d_err = _eval_one(a, y, c_even, c_odd)
    # (pi / Gamma(-a)) V(0) and (pi / Gamma(-a)) V'(0), with the Gamma ratios
    # folded in log space (1 + a > 0 here)
    s = _sinpi(a)
    v0 = (2.0 ** (-0.5 * a) * s * _sinpi(0.5 * a)
          * math.exp(math.lgamma(1.0 + a) - math.lgamma(1.0 + 0.5 * a)))
    v1 = (-(2.0 ** (0.5 * (1.0 - a))) * s * _cospi(0.5 * a)
          * math.exp(math.lgamma(1.0 + a) - math.lgamma(0.5 * (1.0 + a))))
    v_val, v_der, v_err = _kernels.taylor_continue(v0, v1, a, y, _TAYLOR_TOL, _TAYLOR_KMAX)
    c = _cospi(a)
    val = c * d_val + v_val
    der = -(c * d_der + v_der)
    c_rel = _coefficient_rel_err(a)
    err = abs(c) * d_err + v_err + (4.0 * _kernels.EPS + c_rel) * (abs(c * d_val) + abs(v_val))
    return val, der, err


def _eval_one(a, x, c_even, c_odd):
    """Route a single (a, x) pair to a method.  Returns (val, dval, err)."""
    oscillatory = x * x < 4.0 * a + 2.0
    if x < -1.0 and not oscillatory and a >= -0.5:
        return _reflected(a, x, c_even, c_odd)
    c_rel = _coefficient_rel_err(a)
    if abs(x) <= 1.0:
        best = _kernels.pcf_kummer(a, x, c_even, c_odd, SERIES_TOL, SERIES_NMAX, c_rel)
        if x <= 0.0 or best[2] <= _RECESSIVE_RTOL * abs(best[0]):
            return best
    elif x < 0.0 or oscillatory:
        return _continued(a, x, c_even, c_odd)
    elif x <= X_SWITCH:
        best = _kernels.pcf_kummer(a, x, c_even, c_odd, SERIES_TOL, SERIES_NMAX, c_rel)
    else:
        best = _kernels.pcf_asymptotic(a, x, 200)
    if best[2] <= _RECESSIVE_RTOL * abs(best[0]):
        return best
    if oscillatory:
        return _continued(a, x, c_even, c_odd)
    return _kernels.pcf_recessive(a, x, _TAYLOR_TOL, _TAYLOR_KMAX)


def pcf_d(a, x):
    """Parabolic cylinder function D_a(x) for real a and x.

    Parameters
    ----------
    a : float
        Index, ``|a| <= A_MAX``.
    x : float
        Argument.

    Returns
    -------
    PcfValue
        ``value``, ``abs_err_estimate`` and the x-derivative in
        ``derivative``.
    """
    a = float(a)
    x = float(x)
    _check_index(a)
    c_even = pcf_d0(a)
    c_odd = pcf_dprime0(a)
    val, dval, err = _eval_one(a, x, c_even, c_odd)
    return PcfValue(float(val), float(abs(err)), float(dval))


def pcf_d_array(a, x):
    """Vectorised D_a(x) over an array of indices at one argument.

    Returns
    -------
    values, derivatives, errors : ndarray
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    x = float(x)
    if np.any(np.abs(a) > A_MAX):
        raise DomainError(f"index outside |a| <= {A_MAX}")
    c_even = 2.0 ** (0.5 * a) * _SQRT_PI * special.rgamma(0.5 * (1.0 - a))
    c_odd = -(2.0 ** (0.5 * (1.0 + a))) * _SQRT_PI * special.rgamma(-0.5 * a)
    out = np.empty((3, a.size))
    for i in range(a.size):
        out[:, i] = _eval_one(a[i], x, c_even[i], c_odd[i])
    return out[0], out[1], out[2]


def pcf_d_value(a, x):
    """Plain-float D_a(x); the hot path used by the root finders."""
    a = float(a)
    c_even = 2.0 ** (0.5 * a) * _SQRT_PI * special.rgamma(0.5 * (1.0 - a))
    c_odd = -(2.0 ** (0.5 * (1.0 + a))) * _SQRT_PI * special.rgamma(-0.5 * a)
    return _eval_one(a, float(x), c_even, c_odd)[0]


def hermite_closed_form(n, x):
    """D_n(x) = 2^{-n/2} exp(-x^2/4) H_n(x/sqrt 2) for integer n >= 0."""
    x = np.asarray(x, dtype=float)
    return 2.0 ** (-0.5 * n) * np.exp(-0.25 * x * x) * special.eval_hermite(n, x / math.sqrt(2.0))


def normalization(a):
    """Even-state normalisation constant of N D_a(q sqrt 2) on the full line.

    Natural units (hbar = m = omega = 1)::

        N = [ sqrt(pi)/2 * (psi((1-a)/2) - psi(-a/2)) / Gamma(-a) ]^{-1/2}

    Only defined for non-integer ``a``; at integer indices the digamma and
    Gamma poles coincide and the oscillator normalisation applies instead.
    """
    a = float(a)
    if float(a).is_integer():
        raise PoleError("normalisation formula is singular at integer index")
    inner = 0.5 * _SQRT_PI * (digamma(0.5 * (1.0 - a)) - digamma(-0.5 * a)) * rgamma(-a)
    if inner <= 0:
        raise DomainError(f"normalisation integral non-positive at a={a}")
    return inner ** -0.5
