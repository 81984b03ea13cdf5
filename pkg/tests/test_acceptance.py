"""Acceptance criteria, one group of tests per criterion.

Every test records its criterion number; ``conftest.py`` prints one
pass/fail line per criterion at the end of the run.
"""
import math
import time

import numpy as np
import pytest

from hqszilard import cycle, demon, thermo
from hqszilard import spectrum as sp
from hqszilard.thermo import ForcePrefactor, Stage

LN2 = math.log(2.0)
THETAS = (0.05, 0.2, 1.0, 5.0, 50.0)
STAGES = (Stage.INITIAL, Stage.BARRIER_IN, Stage.POST_MEASURE_L, Stage.POST_MEASURE_R)
N = 64

# 64 levels leave a Boltzmann tail of e^{-64 theta} relative weight: 4e-2 at
# theta = 0.05 and 2.8e-6 at theta = 0.2 for the bare ladder, far above 1e-9
UNREACHABLE = {(0.05, s) for s in STAGES} | {(0.2, Stage.INITIAL)}


@pytest.fixture
def criterion(record_property):
    def mark(number):
        record_property("criterion", number)
    return mark


def spectrum_64(stage):
    if stage is Stage.INITIAL:
        return sp.harmonic_levels(N)
    if stage is Stage.BARRIER_IN:
        return sp.barrier_levels(math.inf, N)
    side = "left" if stage is Stage.POST_MEASURE_L else "right"
    return sp.dirichlet_levels_at_x0(0.0, N, side)


def _c1_cases():
    for theta in THETAS:
        for stage in STAGES:
            marks = []
            if (theta, stage) in UNREACHABLE:
                marks = [pytest.mark.xfail(strict=True, reason="64-level truncation tail exceeds 1e-9")]
            yield pytest.param(theta, stage, marks=marks, id=f"{theta:g}-{stage.value}")


# 1 -----------------------------------------------------------------------------

@pytest.mark.parametrize("theta, stage", list(_c1_cases()))
def test_c1_closed_form_vs_64_level_sum(theta, stage, criterion):
    criterion(1)
    c = thermo.closed_form(stage, theta)
    f = thermo.from_spectrum(spectrum_64(stage), theta, stage, tail_tol=math.inf)
    assert abs(f.z - c.z) <= 1e-9 * abs(c.z)
    assert abs(f.a_free - c.a_free) <= 1e-9 * abs(c.a_free)
    assert abs(f.e_avg - c.e_avg) <= 1e-9 * abs(c.e_avg)
    assert abs(f.s - c.s) <= 1e-8


def test_c1_runtime(criterion):
    criterion(1)
    t0 = time.perf_counter()
    spectra = {s: spectrum_64(s) for s in STAGES}
    for theta in THETAS:
        for stage in STAGES:
            thermo.closed_form(stage, theta)
            thermo.from_spectrum(spectra[stage], theta, stage, tail_tol=math.inf)
    assert time.perf_counter() - t0 < 1.0


# 2 -----------------------------------------------------------------------------

def test_c2_insertion_limit(criterion):
    criterion(2)
    t0 = time.perf_counter()
    e = sp.even_levels_at_g(1e8, 6).energies
    assert np.abs(e - (2 * np.arange(6) + 1.5)).max() < 1e-7
    assert time.perf_counter() - t0 < 1.0


# 3 -----------------------------------------------------------------------------

@pytest.mark.parametrize("theta", THETAS)
def test_c3_entropy_drop(theta, criterion):
    criterion(3)
    perp = thermo.closed_form(Stage.BARRIER_IN, theta).s
    for stage in (Stage.POST_MEASURE_L, Stage.POST_MEASURE_R):
        assert abs(thermo.closed_form(stage, theta).s - perp + LN2) <= 1e-12


# 4 -----------------------------------------------------------------------------

def test_c4_expansion_endpoint(criterion):
    criterion(4)
    a_end = thermo.free_energy_of_expansion(-10.0, 1.0, N)
    a_in = thermo.closed_form(Stage.INITIAL, 1.0).a_free
    assert a_end - a_in < 1e-6
    assert abs(thermo.force_on_barrier(-10.0, 1.0, N)) < 1e-6


# 5 -----------------------------------------------------------------------------

def test_c5_force_prefactor(criterion):
    criterion(5)
    f = thermo.force_on_barrier(0.0, 50.0, N, method="fd")
    matches = [w for w in ForcePrefactor
               if abs(f / thermo.initial_force_closed_form(50.0, w) - 1) <= 1e-4]
    assert matches == [ForcePrefactor.DOUBLE]


# 6 -----------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(11))
def test_c6_factorial_slope(n, criterion):
    criterion(6)
    closed = math.factorial(2 * n + 2) / (4**n * math.factorial(n) * math.factorial(n + 1)) / math.sqrt(math.pi)
    assert abs(sp.general_dE_dq0(2 * n + 1.5) / closed - 1) <= 1e-9
    h = 1e-3
    e = [sp._dirichlet_energies(s * h, n + 1)[n] for s in (-2, -1, 1, 2)]
    slope_q0 = (e[0] - 8 * e[1] + 8 * e[2] - e[3]) / (12 * h) * sp.DX0_DQ0
    assert abs(slope_q0 / closed - 1) <= 1e-6


# 7 -----------------------------------------------------------------------------

@pytest.mark.parametrize("x, terms", [(0.0, 200), (0.5, 200), (0.9, 500)])
def test_c7_series_identity(x, terms, criterion):
    # at x = 0.9 the omitted tail after 200 terms is still ~2e-7, so the
    # 500-term case is the one that can meet 1e-10
    criterion(7)
    assert sp.series_identity_check(x, terms) < 1e-10


# 8 -----------------------------------------------------------------------------

def test_c8_demon_measurement(criterion):
    criterion(8)
    before = demon.pre_measurement_state(1.0, 20)
    after = demon.measure(before)
    u = demon.u_int(20)
    assert np.abs(u @ u.conj().T - np.eye(80)).max() < 1e-12
    blocks = after.rho.reshape(40, 2, 40, 2)
    assert np.abs(blocks[:, 0, :, 1]).max() < 1e-12 and np.abs(blocks[:, 1, :, 0]).max() < 1e-12
    s_d0 = demon.vn_entropy(demon.trace_out_particle(before.rho))
    s_d1 = demon.vn_entropy(demon.trace_out_particle(after.rho))
    assert abs(s_d0) <= 1e-8 and abs(s_d1 - LN2) <= 1e-8
    s_p0 = demon.vn_entropy(demon.trace_out_pointer(before.rho))
    s_p1 = demon.vn_entropy(demon.trace_out_pointer(after.rho))
    assert abs(s_p1 - s_p0) <= 1e-8
    assert abs(demon.mutual_information(after) - LN2) <= 1e-8


# 9 -----------------------------------------------------------------------------

@pytest.mark.parametrize("theta", [0.2, 1.0, 5.0])
def test_c9_ledger_closure(theta, criterion):
    criterion(9)
    led = cycle.run_cycle(theta, N)
    assert abs(led.net_gain_naive - LN2 / theta) <= 1e-10
    assert led.net_gain_full_spectral is not None, led.spectral_note
    assert abs(led.net_gain_full_spectral) <= 1e-6


@pytest.mark.parametrize("theta", [1.0, 5.0])
def test_c9_ledger_closure_by_quadrature(theta, criterion):
    criterion(9)
    led = cycle.run_cycle(theta, N, quadrature=True)
    assert abs(led.net_gain_full_quadrature) <= 1e-6


# 10 ----------------------------------------------------------------------------

def test_c10_work_integral(criterion):
    criterion(10)
    t0 = time.perf_counter()
    curve = cycle.expansion_work_curve(1.0, n_levels=N)
    elapsed = time.perf_counter() - t0
    assert abs(curve.work - curve.delta_a) <= 1e-4 * abs(curve.delta_a)
    assert elapsed < 30.0


# 11 ----------------------------------------------------------------------------

def test_c11_limits(criterion):
    criterion(11)
    assert abs(thermo.closed_form(Stage.INITIAL, 50.0).e_avg - 0.5) <= 1e-10
    assert abs(thermo.closed_form(Stage.INITIAL, 0.01).e_avg * 0.01 - 1.0) <= 0.01
    assert thermo.closed_form(Stage.INITIAL, 50.0).s < 1e-15
