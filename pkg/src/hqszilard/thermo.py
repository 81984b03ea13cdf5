"""Thermodynamics of the particle at each stage of the engine cycle.

All quantities are in natural units: energies and free energies in
hbar*omega, entropies in k_B, ``theta = hbar*omega / (k_B T)``.  Closed
forms are written with ``expm1``/``log1p`` so they stay accurate from
``theta ~ 1e-3`` up to ``theta ~ 1e2``.
"""
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import spectrum as sp
from .errors import DomainError, TruncationError

LN2 = math.log(2.0)
SQRT_PI = math.sqrt(math.pi)
TAIL_TOL = 1e-13
FD_STEP = 1e-3


class Stage(enum.Enum):
    INITIAL = "initial"
    BARRIER_IN = "barrier_in"
    POST_MEASURE_L = "post_measure_left"
    POST_MEASURE_R = "post_measure_right"
    EXPANDING = "expanding"


class ForcePrefactor(enum.Enum):
    """The two competing prefactors for the force at the start of expansion."""

    SINGLE = 1.0
    DOUBLE = 2.0


@dataclass(frozen=True)
class ThermoState:
    """Partition function, free energy, mean energy and entropy at one stage.

    ``log_z`` is kept alongside ``z`` because ``z`` itself under- or
    overflows long before the other fields lose accuracy.
    """

    z: float
    a_free: float
    e_avg: float
    s: float
    theta: float
    stage: Stage
    log_z: float
    x0: Optional[float] = None

    def as_dict(self):
        return {"stage": self.stage.value, "theta": self.theta, "z": self.z,
                "a_free": self.a_free, "e_avg": self.e_avg, "s": self.s, "x0": self.x0}


def _check_theta(theta):
    if not theta > 0 or not math.isfinite(theta):
        raise DomainError(f"theta must be positive and finite, got {theta}")


def _state(log_z, e_avg, s, theta, stage, x0=None):
    return ThermoState(z=math.exp(log_z), a_free=-log_z / theta, e_avg=e_avg, s=s,
                       theta=theta, stage=stage, log_z=log_z, x0=x0)


def closed_form(stage, theta):
    """Exact (Z, A, E, S) of a cycle stage.

    Initial is the bare oscillator; BarrierIn has the infinite central
    barrier (all levels 2k + 3/2, doubly degenerate); PostMeasure keeps one
    side of that spectrum.
    """
    theta = float(theta)
    _check_theta(theta)
    stage = Stage(stage)
    if stage is Stage.INITIAL:
        bose = 1.0 / math.expm1(theta)
        log_z = -0.5 * theta - math.log1p(-math.exp(-theta))
        return _state(log_z, 0.5 + bose, theta * bose - math.log1p(-math.exp(-theta)), theta, stage)
    if stage is Stage.EXPANDING:
        raise DomainError("expanding stage has no closed form; use free_energy_of_expansion")
    bose = 1.0 / math.expm1(2.0 * theta)
    log_z = LN2 - 1.5 * theta - math.log1p(-math.exp(-2.0 * theta))
    e_avg = 1.5 + 2.0 * bose
    s = LN2 + 2.0 * theta * bose - math.log1p(-math.exp(-2.0 * theta))
    if stage is Stage.BARRIER_IN:
        return _state(log_z, e_avg, s, theta, stage)
    return _state(log_z - LN2, e_avg, s - LN2, theta, stage)


def hyperbolic_forms(stage, theta):
    """The same closed forms written with csch/coth, as a textbook cross-check.

    Returns ``(z, a_free, e_avg, s)``; loses accuracy for very small or very
    large ``theta``.
    """
    t = float(theta)
    _check_theta(t)
    stage = Stage(stage)
    if stage is Stage.INITIAL:
        z = 0.5 / math.sinh(0.5 * t)
        e = 0.5 / math.tanh(0.5 * t)
        a = math.log(2.0 * math.sinh(0.5 * t)) / t
        s = 0.5 * t / math.tanh(0.5 * t) - math.log(2.0 * math.sinh(0.5 * t))
        return z, a, e, s
    z = math.exp(-0.5 * t) / math.sinh(t)
    a = 0.5 + math.log(math.sinh(t)) / t
    e = 0.5 + 1.0 / math.tanh(t)
    s = t / math.tanh(t) - math.log(math.sinh(t))
    if stage is Stage.BARRIER_IN:
        return z, a, e, s
    return z / 2.0, a + LN2 / t, e, s - LN2


def from_spectrum(spec, theta, stage=Stage.EXPANDING, x0=None, tail_tol=TAIL_TOL):
    """Boltzmann sums over a computed spectrum.

    Energies are shifted by the ground level before exponentiating so the
    sums neither overflow nor lose the entropy to cancellation.

    Raises
    ------
    TruncationError
        If the bound on the weight of the omitted levels exceeds
        ``tail_tol`` relative to the retained weight.
    """
    theta = float(theta)
    _check_theta(theta)
    e = np.asarray(spec.energies, dtype=float)
    if e.size == 0:
        raise DomainError("empty spectrum")
    e_min = e.min()
    shifted = e - e_min
    w = np.exp(-theta * shifted)
    z_shift = w.sum()
    tail = spec.tail_weight(theta) * math.exp(theta * e_min) / z_shift
    if tail > tail_tol:
        raise TruncationError(tail, tail_tol)
    e_excess = float(np.dot(w, shifted) / z_shift)
    # ln(z_shift) = log1p(weight above the ground level), exact as theta grows
    log_z_shift = math.log1p(float(np.delete(w, int(np.argmin(shifted))).sum()))
    log_z = log_z_shift - theta * e_min
    s = theta * e_excess + log_z_shift
    return _state(log_z, e_min + e_excess, s, theta, Stage(stage), x0)


def levels_needed(theta, floor_offset=0.5, floor_step=1.0, tol=TAIL_TOL):
    """Smallest ladder depth whose geometric tail bound is below ``tol``."""
    _check_theta(theta)
    # relative to the ground weight; the retained weight is never smaller
    n = (-math.log(tol) + math.log(-1.0 / math.expm1(-theta * floor_step))) / (theta * floor_step)
    return max(4, int(math.ceil(n)) + 1)


def free_energy_of_expansion(x0, theta, n_levels=64):
    """Free energy of the particle confined to x > x0 (barrier at ``x0 <= 0``)."""
    spec = sp.dirichlet_levels_at_x0(x0, n_levels)
    return from_spectrum(spec, theta, Stage.EXPANDING, x0=x0).a_free


def _free_energy_internal(x0, theta, n_levels):
    spec = sp._ladder("right", sp._dirichlet_energies(x0, n_levels), 0.5, 1.0)
    return from_spectrum(spec, theta, Stage.EXPANDING, x0=x0).a_free


def _five_point(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def force_on_barrier(x0, theta, n_levels=64, method="fd", h=FD_STEP):
    """Force on the barrier, F = -dA/dq0, in natural units.

    Parameters
    ----------
    method : {"fd", "levels"}
        ``"fd"`` differentiates the spectral free energy with a five-point
        stencil in x0 and one Richardson step (h and 2h).  ``"levels"`` sums
        the thermal average of the branch slopes, each from implicit
        differentiation of the boundary condition.
    """
    x0 = float(x0)
    if x0 > 0:
        raise DomainError("barrier position must satisfy x0 <= 0")
    _check_theta(theta)
    if method == "fd":
        f = lambda x: _free_energy_internal(x, theta, n_levels)  # noqa: E731
        d1 = _five_point(f, x0, h)
        d2 = _five_point(f, x0, 2 * h)
        da_dx0 = (16.0 * d1 - d2) / 15.0
    elif method == "levels":
        e = sp._dirichlet_energies(x0, n_levels)
        da_dx0 = _mean_slope(e, sp.dirichlet_slopes(x0, e), theta)
    else:
        raise DomainError(f"unknown force method {method!r}")
    return -sp.DX0_DQ0 * da_dx0


def _mean_slope(energies, slopes, theta):
    w = np.exp(-theta * (energies - energies.min()))
    return float(np.dot(w, slopes) / w.sum())


def initial_force_closed_form(theta, which=ForcePrefactor.DOUBLE):
    """Force at the start of expansion, -c/sqrt(pi) (1 - e^{-2 theta})^{-1/2}.

    ``which`` picks the prefactor c: 1 (``SINGLE``) or 2 (``DOUBLE``).
    The finite-difference force decides between them; c = 2 is the one it
    reproduces (ground-state slope 2/sqrt(pi) per unit q0).
    """
    _check_theta(theta)
    if isinstance(which, str):
        which = ForcePrefactor[which.upper()]
    return -which.value / SQRT_PI / math.sqrt(-math.expm1(-2.0 * theta))
