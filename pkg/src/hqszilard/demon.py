"""Density-matrix model of the particle and a two-state pointer.

Particle basis ordering is ``[L_0, ..., L_{n-1}, R_0, ..., R_{n-1}]``;
pointer basis is ``(D_L, D_R)``.  Joint states use the Kronecker order
particle (x) pointer, so a joint index is ``2 * particle + pointer``.

The measurement is the rotation

    U(phi) = cos(phi) 1 + sin(phi) Pi (x) J,   J = |D_L><D_R| - |D_R><D_L|,

which is exp(-i H_int dt) for H_int = i lambda Pi (x) J and phi = lambda dt
(hbar = 1).  ``phi = pi/4`` is the projective point.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import DomainError, TruncationError

PSD_TOL = 1e-10
EIG_FLOOR = 1e-14
PROJECTIVE_ANGLE = math.pi / 4
POINTER_LEFT = np.array([1.0, 0.0])
POINTER_RIGHT = np.array([0.0, 1.0])
POINTER_NEUTRAL = (POINTER_LEFT + POINTER_RIGHT) / math.sqrt(2.0)


@dataclass(frozen=True)
class Basis:
    """Labels and energies (hbar*omega) of a truncated particle basis."""

    kind: str
    labels: tuple
    energies: np.ndarray

    @property
    def dim(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class JointState:
    """Particle (x) pointer density matrix with its particle basis."""

    rho: np.ndarray
    basis: Basis
    theta: float

    @property
    def particle_dim(self):
        return self.basis.dim

    def check(self, tol=1e-12):
        """Raise if ``rho`` is not a unit-trace Hermitian PSD matrix."""
        check_density(self.rho, tol)
        return self


def check_density(rho, tol=1e-12):
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise DomainError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise DomainError("density matrix has a negative eigenvalue")


def left_right_basis(n_pair):
    """Left/right states paired from the degenerate levels 2n + 3/2."""
    if int(n_pair) != n_pair or n_pair < 1:
        raise DomainError("n_pair must be a positive integer")
    n = int(n_pair)
    labels = tuple(f"left_{k}" for k in range(n)) + tuple(f"right_{k}" for k in range(n))
    energies = np.tile(2.0 * np.arange(n) + 1.5, 2)
    return Basis("left_right", labels, energies)


def parity_to_left_right(n_pair):
    """Orthogonal map from the parity basis to the left/right basis.

    Parity basis order is ``[even_0, odd_0, even_1, odd_1, ...]``;
    |L_n> = (|even_n> - |odd_n>)/sqrt(2), |R_n> = (|even_n> + |odd_n>)/sqrt(2).
    Row i of the result holds the parity components of left/right state i.
    """
    n = int(n_pair)
    t = np.zeros((2 * n, 2 * n))
    r = 1.0 / math.sqrt(2.0)
    for k in range(n):
        t[k, 2 * k], t[k, 2 * k + 1] = r, -r
        t[n + k, 2 * k], t[n + k, 2 * k + 1] = r, r
    return t


def _pair_weights(theta, n_pair, tail_tol):
    thermo._check_theta(theta)
    shifted = 2.0 * np.arange(n_pair)
    w = np.exp(-theta * shifted)
    tail = math.exp(-2.0 * theta * n_pair) / -math.expm1(-2.0 * theta) / w.sum()
    if tail > tail_tol:
        raise TruncationError(tail, tail_tol)
    return w / w.sum()


def rho_perp(theta, n_pair, tail_tol=1e-12):
    """Thermal state after full barrier insertion, in the left/right basis.

    Built in the parity basis (each degenerate pair equally weighted) and
    rotated; it comes out diagonal because each pair is degenerate.
    """
    p = _pair_weights(theta, n_pair, tail_tol)
    parity = np.diag(np.repeat(p / 2.0, 2))
    t = parity_to_left_right(n_pair)
    return t @ parity @ t.T


def rho_initial(theta, n_levels, tail_tol=1e-12):
    """Thermal state of the bare oscillator in its eigenbasis (``n_levels`` states)."""
    thermo._check_theta(theta)
    w = np.exp(-theta * np.arange(n_levels))
    tail = math.exp(-theta * n_levels) / -math.expm1(-theta) / w.sum()
    if tail > tail_tol:
        raise TruncationError(tail, tail_tol)
    return np.diag(w / w.sum())


def projectors(n_pair):
    """(P_L, P_R) on the particle space."""
    n = int(n_pair)
    p_left = np.diag(np.r_[np.ones(n), np.zeros(n)])
    return p_left, np.eye(2 * n) - p_left


def observable(n_pair):
    """Pi = P_L - P_R, with eigenvalue +1 on the left and -1 on the right."""
    p_left, p_right = projectors(n_pair)
    return p_left - p_right


def project(rho, projector):
    """Conditional state P rho P / tr(P rho P)."""
    out = projector @ rho @ projector
    return out / np.trace(out).real


def pointer_swap():
    """J = |D_L><D_R| - |D_R><D_L|."""
    return np.outer(POINTER_LEFT, POINTER_RIGHT) - np.outer(POINTER_RIGHT, POINTER_LEFT)


def u_int(n_pair, angle=PROJECTIVE_ANGLE):
    """Measurement unitary cos(angle) 1 + sin(angle) Pi (x) J."""
    pi_j = np.kron(observable(n_pair), pointer_swap())
    return math.cos(angle) * np.eye(pi_j.shape[0]) + math.sin(angle) * pi_j


def pre_measurement_state(theta, n_pair):
    """rho_perp (x) |D_0><D_0|."""
    rho = np.kron(rho_perp(theta, n_pair), np.outer(POINTER_NEUTRAL, POINTER_NEUTRAL))
    return JointState(rho, left_right_basis(n_pair), float(theta))


def measure(joint, angle=PROJECTIVE_ANGLE):
    """Apply the pointer coupling for rotation angle ``angle``."""
    n_pair = joint.particle_dim // 2
    if joint.rho.shape != (4 * n_pair, 4 * n_pair) or joint.basis.kind != "left_right":
        raise DomainError("measure expects a left/right particle basis times a two-state pointer")
    u = u_int(n_pair, angle)
    return JointState(u @ joint.rho @ u.conj().T, joint.basis, joint.theta)


def _blocks(rho, dim_a, dim_b):
    return rho.reshape(dim_a, dim_b, dim_a, dim_b)


def trace_out_pointer(rho, dim_pointer=2):
    dim_p = rho.shape[0] // dim_pointer
    return np.einsum("ijkj->ik", _blocks(rho, dim_p, dim_pointer))


def trace_out_particle(rho, dim_pointer=2):
    dim_p = rho.shape[0] // dim_pointer
    return np.einsum("ijil->jl", _blocks(rho, dim_p, dim_pointer))


def vn_entropy(rho):
    """-tr(rho ln rho) in units of k_B.

    Eigenvalues in [-PSD_TOL, 0) are rounding and treated as zero; anything
    more negative means the input is not a density matrix.
    """
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -PSD_TOL:
        raise DomainError(f"eigenvalue {lam.min():.3e} below -{PSD_TOL}")
    lam = lam[lam > EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def mutual_information(joint):
    """S(particle) + S(pointer) - S(joint)."""
    rho = joint.rho if isinstance(joint, JointState) else joint
    return (vn_entropy(trace_out_pointer(rho)) + vn_entropy(trace_out_particle(rho))
            - vn_entropy(rho))


def end_of_cycle_state(theta, n_pair, tail_tol=1e-12):
    """(1/2) rho_in (x) (|D_L><D_L| + |D_R><D_R|).

    The expansion is represented only by its endpoint: each conditional
    state rho_L, rho_R relaxes to rho_in.  The particle space is the first
    ``2 * n_pair`` oscillator levels.
    """
    dim = 2 * int(n_pair)
    rho_in = rho_initial(theta, dim, tail_tol)
    pointer = 0.5 * (np.outer(POINTER_LEFT, POINTER_LEFT) + np.outer(POINTER_RIGHT, POINTER_RIGHT))
    basis = Basis("harmonic", tuple(f"harmonic_{k}" for k in range(dim)), np.arange(dim) + 0.5)
    return JointState(np.kron(rho_in, pointer), basis, float(theta))


def reset_cost(joint):
    """Minimum work (hbar*omega) to return the pointer to a pure state: T * S_pointer."""
    return vn_entropy(trace_out_particle(joint.rho)) / joint.theta


def measurement_report(theta=1.0, n_pair=20, angle=PROJECTIVE_ANGLE):
    """Entropies and consistency figures for one measurement.

    Returns a flat dict of floats: unitarity and block-diagonality
    residuals, particle/pointer/joint entropies before and after, and the
    mutual information after.
    """
    before = pre_measurement_state(theta, n_pair)
    after = measure(before, angle)
    u = u_int(n_pair, angle)
    dim = u.shape[0]
    # particle-pointer coherences: entries with different pointer index
    blocks = _blocks(after.rho, dim // 2, 2)
    off = max(np.abs(blocks[:, 0, :, 1]).max(), np.abs(blocks[:, 1, :, 0]).max())
    p_left, p_right = projectors(n_pair)
    rp = rho_perp(theta, n_pair)
    target = 0.5 * (np.kron(project(rp, p_left), np.outer(POINTER_LEFT, POINTER_LEFT))
                    + np.kron(project(rp, p_right), np.outer(POINTER_RIGHT, POINTER_RIGHT)))
    end = end_of_cycle_state(theta, n_pair)
    return {
        "theta": float(theta),
        "n_pair": int(n_pair),
        "angle": float(angle),
        "unitarity_residual": float(np.abs(u @ u.conj().T - np.eye(dim)).max()),
        "pointer_coherence_max": float(off),
        "target_state_residual": float(np.abs(after.rho - target).max()),
        "s_particle_before": vn_entropy(trace_out_pointer(before.rho)),
        "s_particle_after": vn_entropy(trace_out_pointer(after.rho)),
        "s_pointer_before": vn_entropy(trace_out_particle(before.rho)),
        "s_pointer_after": vn_entropy(trace_out_particle(after.rho)),
        "s_joint_before": vn_entropy(before.rho),
        "s_joint_after": vn_entropy(after.rho),
        "mutual_information_before": mutual_information(before),
        "mutual_information_after": mutual_information(after),
        "s_particle_end": vn_entropy(trace_out_pointer(end.rho)),
        "s_pointer_end": vn_entropy(trace_out_particle(end.rho)),
        "mutual_information_end": mutual_information(end),
        "reset_work_min": reset_cost(end),
    }
