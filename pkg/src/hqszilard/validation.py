"""Acceptance checks shared by the ``validate`` subcommand and the test suite.

Each check returns a :class:`CheckResult`; tolerances are the targets the
library is held to and are never relaxed here.  A check that cannot be met
reports the measured figures and fails.
"""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import cycle, demon
from . import spectrum as sp
from . import thermo
from .thermo import ForcePrefactor, Stage

THETAS = (0.05, 0.2, 1.0, 5.0, 50.0)
N_LEVELS = 64


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d}. {self.title} ({self.seconds:.2f} s)"


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_closed_vs_spectral(n_levels=N_LEVELS, thetas=THETAS):
    """Closed forms against plain truncated Boltzmann sums (no tail guard)."""
    spectra = {
        Stage.INITIAL: sp.harmonic_levels(n_levels),
        Stage.BARRIER_IN: sp.barrier_levels(math.inf, n_levels),
        Stage.POST_MEASURE_R: sp.dirichlet_levels_at_x0(0.0, n_levels, "right"),
        Stage.POST_MEASURE_L: sp.dirichlet_levels_at_x0(0.0, n_levels, "left"),
    }
    ok = True
    details = []
    for theta in thetas:
        for stage, spec in spectra.items():
            c = thermo.closed_form(stage, theta)
            f = thermo.from_spectrum(spec, theta, stage, tail_tol=math.inf)
            gaps = (_rel(f.z, c.z), _rel(f.a_free, c.a_free), _rel(f.e_avg, c.e_avg), abs(f.s - c.s))
            good = gaps[0] <= 1e-9 and gaps[1] <= 1e-9 and gaps[2] <= 1e-9 and gaps[3] <= 1e-8
            ok &= good
            details.append(f"theta={theta:<5g} {stage.value:<19s} dZ/Z={gaps[0]:.1e} dA/A={gaps[1]:.1e} "
                           f"dE/E={gaps[2]:.1e} dS={gaps[3]:.1e} {'ok' if good else 'FAIL'}")
    return ok, details


def check_insertion_limit(g=1e8, k_max=5):
    e = sp.even_levels_at_g(g, k_max + 1).energies
    gap = np.abs(e - (2.0 * np.arange(k_max + 1) + 1.5)).max()
    return gap < 1e-7, [f"max |e_2k - (2k+3/2)| at g={g:g}, k<={k_max}: {gap:.2e} (tol 1e-7)"]


def check_entropy_drop(thetas=THETAS):
    worst = 0.0
    for theta in thetas:
        perp = thermo.closed_form(Stage.BARRIER_IN, theta)
        for stage in (Stage.POST_MEASURE_L, Stage.POST_MEASURE_R):
            worst = max(worst, abs(thermo.closed_form(stage, theta).s - perp.s + thermo.LN2))
    # the same drop from computed spectra, where the sums are converged
    barrier = sp.barrier_levels(math.inf, N_LEVELS)
    right = sp.dirichlet_levels_at_x0(0.0, N_LEVELS)
    worst_spec = 0.0
    for theta in (1.0, 5.0, 50.0):
        drop = thermo.from_spectrum(right, theta).s - thermo.from_spectrum(barrier, theta).s
        worst_spec = max(worst_spec, abs(drop + thermo.LN2))
    return max(worst, worst_spec) <= 1e-12, [
        f"closed forms: max |dS + ln 2| = {worst:.1e} (tol 1e-12)",
        f"spectral sums (theta in 1, 5, 50): max |dS + ln 2| = {worst_spec:.1e}"]


def check_expansion_endpoint(theta=1.0, x0=-10.0):
    a_end = thermo.free_energy_of_expansion(x0, theta, N_LEVELS)
    a_in = thermo.closed_form(Stage.INITIAL, theta).a_free
    f_end = thermo.force_on_barrier(x0, theta, N_LEVELS)
    ok = a_end - a_in < 1e-6 and abs(f_end) < 1e-6
    return ok, [f"A(x0={x0:g}) - A_in = {a_end - a_in:.2e} (tol 1e-6)",
                f"F(x0={x0:g}) = {f_end:.2e} (tol 1e-6)"]


def check_force_prefactor(theta=50.0, pinned=ForcePrefactor.DOUBLE):
    """Finite-difference force at the centre picks one of the two prefactors.

    ``pinned`` is the prefactor the regression expects to win.
    """
    f_fd = thermo.force_on_barrier(0.0, theta, N_LEVELS, method="fd")
    f_lv = thermo.force_on_barrier(0.0, theta, N_LEVELS, method="levels")
    gaps = {w: _rel(f_fd, thermo.initial_force_closed_form(theta, w)) for w in ForcePrefactor}
    winners = [w for w, gap in gaps.items() if gap <= 1e-4]
    verdict = winners[0].name if len(winners) == 1 else "none" if not winners else "ambiguous"
    ok = winners == [pinned] and _rel(f_lv, f_fd) <= 1e-6
    return ok, [f"F_fd(0, theta={theta:g}) = {f_fd:.10f}, F_levels = {f_lv:.10f}",
                *(f"  prefactor {w.name:<9s} ({w.value:g}/sqrt(pi)): rel gap {gaps[w]:.1e}"
                  for w in ForcePrefactor),
                f"verdict: {verdict} (expected {pinned.name})"]


def check_factorial_slope(n_max=10, h=1e-3):
    worst_closed = worst_fd = 0.0
    for n in range(n_max + 1):
        target = sp.slope_factor(n) / math.sqrt(math.pi)
        worst_closed = max(worst_closed, _rel(sp.general_dE_dq0(2 * n + 1.5), target))
        e = [sp._dirichlet_energies(s * h, n + 1)[n] for s in (-2, -1, 1, 2)]
        slope_q0 = (e[0] - 8 * e[1] + 8 * e[2] - e[3]) / (12 * h) * sp.DX0_DQ0
        worst_fd = max(worst_fd, _rel(slope_q0, target))
    ok = worst_closed <= 1e-9 and worst_fd <= 1e-6
    return ok, [f"boundary-condition slope vs factorial form, n<={n_max}: max rel {worst_closed:.1e} (tol 1e-9)",
                f"finite-difference branch slope vs factorial form: max rel {worst_fd:.1e} (tol 1e-6)"]


SERIES_CASES = ((0.0, 1), (0.0, 200), (0.5, 200), (0.9, 500))


def check_series_identity():
    details, ok = [], True
    for x, terms in SERIES_CASES:
        err = sp.series_identity_check(x, terms)
        ok &= err < 1e-10
        details.append(f"x={x:g}, {terms} terms: |partial - closed| = {err:.1e} (tol 1e-10)")
    return ok, details


def check_demon(theta=1.0, n_pair=20):
    r = demon.measurement_report(theta, n_pair)
    ln2 = thermo.LN2
    tests = [
        ("U unitarity residual", r["unitarity_residual"], 1e-12),
        ("particle-pointer coherence", r["pointer_coherence_max"], 1e-12),
        ("pointer entropy before", abs(r["s_pointer_before"]), 1e-8),
        ("pointer entropy after - ln 2", abs(r["s_pointer_after"] - ln2), 1e-8),
        ("particle entropy change", abs(r["s_particle_after"] - r["s_particle_before"]), 1e-8),
        ("mutual information - ln 2", abs(r["mutual_information_after"] - ln2), 1e-8),
    ]
    return all(v <= tol for _, v, tol in tests), [f"{name}: {v:.1e} (tol {tol:g})" for name, v, tol in tests]


def check_ledger(thetas=(0.2, 1.0, 5.0), quadrature=True):
    details, ok = [], True
    for theta in thetas:
        led = cycle.run_cycle(theta)
        naive = abs(led.net_gain_naive - thermo.LN2 / theta)
        good = naive <= 1e-10 and abs(led.net_gain_full) <= 1e-10
        line = f"theta={theta:g}: |naive - ln2/theta| = {naive:.1e}"
        if led.net_gain_full_spectral is None:
            good = False
            line += f", spectral path unavailable ({led.spectral_note})"
        else:
            good &= abs(led.net_gain_full_spectral) <= 1e-6
            line += f", spectral net gain = {led.net_gain_full_spectral:.1e}"
        ok &= good
        details.append(line + (" ok" if good else " FAIL"))
    if quadrature:
        # the force integral needs the far end of the grid to have relaxed
        for theta in (1.0, 5.0):
            led = cycle.run_cycle(theta, quadrature=True)
            good = abs(led.net_gain_full_quadrature) <= 1e-6
            ok &= good
            details.append(f"theta={theta:g}: quadrature net gain = {led.net_gain_full_quadrature:.1e} "
                           f"(trapezoid error est. {led.quadrature_error_estimate:.1e}) {'ok' if good else 'FAIL'}")
    return ok, details


def check_work_integral(theta=1.0, jobs=1):
    t0 = time.perf_counter()
    curve = cycle.expansion_work_curve(theta, jobs=jobs)
    elapsed = time.perf_counter() - t0
    rel = abs(curve.work - curve.delta_a) / abs(curve.delta_a)
    exact = thermo.closed_form(Stage.POST_MEASURE_R, theta).a_free - thermo.closed_form(Stage.INITIAL, theta).a_free
    fd_gap = max(_rel(lv, fd) for _, lv, fd in curve.fd_check)
    ok = rel <= 1e-4 and elapsed < 30.0 and fd_gap <= 1e-6
    return ok, [f"trapezoid work {curve.work:.8f} vs endpoint dA {curve.delta_a:.8f}: rel {rel:.1e} (tol 1e-4)",
                f"Richardson-corrected work rel gap {abs(curve.work_richardson - curve.delta_a) / abs(curve.delta_a):.1e}",
                f"endpoint dA vs A_R - A_in = {exact:.8f}: gap {abs(curve.delta_a - exact):.1e}",
                f"level-slope vs finite-difference force at {len(curve.fd_check)} points: max rel {fd_gap:.1e} (tol 1e-6)",
                f"sweep time {elapsed:.1f} s (limit 30 s)"]


def check_limits():
    e50 = thermo.closed_form(Stage.INITIAL, 50.0).e_avg
    e001 = thermo.closed_form(Stage.INITIAL, 0.01).e_avg
    s50 = thermo.closed_form(Stage.INITIAL, 50.0).s
    ok = abs(e50 - 0.5) <= 1e-10 and abs(e001 * 0.01 - 1.0) <= 0.01 and s50 < 1e-15
    return ok, [f"E_in(theta=50) - 1/2 = {e50 - 0.5:.1e} (tol 1e-10)",
                f"E_in(theta=0.01) * theta = {e001 * 0.01:.6f} (within 1%)",
                f"S_in(theta=50) = {s50:.1e} (< 1e-15)"]


CHECKS = (
    (1, "closed forms vs 64-level Boltzmann sums", check_closed_vs_spectral, True),
    (2, "insertion limit: even levels meet odd levels", check_insertion_limit, True),
    (3, "entropy drop of exactly ln 2 on measurement", check_entropy_drop, True),
    (4, "expansion returns to the initial free energy", check_expansion_endpoint, True),
    (5, "initial force prefactor from finite differences", check_force_prefactor, True),
    (6, "factorial slope of the hard-barrier levels", check_factorial_slope, True),
    (7, "generating-function series identity", check_series_identity, True),
    (8, "pointer measurement entropies", check_demon, True),
    (9, "cycle ledger closure", check_ledger, True),
    (10, "work integral matches free-energy drop", check_work_integral, False),
    (11, "low- and high-temperature limits", check_limits, True),
)


def run_checks(quick=False, inject_wrong_prefactor=False, only=None):
    """Run the acceptance checks in order; returns a list of CheckResult.

    ``quick`` drops the slow sweeps (the work integral and the quadrature
    part of the ledger).  ``inject_wrong_prefactor`` pins the 1/sqrt(pi)
    prefactor as the expected winner, a negative control for check 5.
    """
    results = []
    for number, title, fn, in_quick in CHECKS:
        if only is not None and number not in only:
            continue
        if quick and not in_quick:
            continue
        kwargs = {}
        if number == 5 and inject_wrong_prefactor:
            kwargs["pinned"] = ForcePrefactor.SINGLE
        if number == 9 and quick:
            kwargs["quadrature"] = False
        t0 = time.perf_counter()
        try:
            passed, details = fn(**kwargs)
        except Exception as exc:  # a crash is a failed check, reported like one
            passed, details = False, [f"error: {type(exc).__name__}: {exc}"]
        results.append(CheckResult(number, title, bool(passed), details, time.perf_counter() - t0))
    return results
