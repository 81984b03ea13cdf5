import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hqszilard import spectrum as sp
from hqszilard.errors import DomainError

mp.mp.dps = 30

# regression anchors, each reproduced independently by mpmath below
EVEN_ROOT_G1 = 0.8927440453089526
DIRICHLET_ROOT_XM1 = 0.8882382947067854


def mp_even_root(g, k):
    f = lambda e: g + 2 * mp.gamma(0.75 - e / 2) / mp.gamma(0.25 - e / 2)  # noqa: E731
    return float(mp.findroot(f, (2 * k + 0.5 + 1e-9, 2 * k + 1.5 - 1e-9), solver="anderson"))


def mp_dirichlet_root(x0, lo, hi):
    return float(mp.findroot(lambda e: mp.pcfd(e - 0.5, x0), (lo, hi), solver="anderson"))


# -- ScaledEnergy and the simple ladders ----------------------------------------

def test_scaled_energy_index():
    assert sp.ScaledEnergy(1.5).a == 1.0
    assert sp.ScaledEnergy.from_index(2.25).e == 2.75


@pytest.mark.parametrize("n, expected", [(1, [1.5]), (3, [1.5, 3.5, 5.5])])
def test_odd_levels(n, expected):
    spec = sp.odd_levels(n)
    assert spec.energies.tolist() == expected
    assert spec.labels == tuple(f"odd_{k}" for k in range(n))


@pytest.mark.parametrize("n", [0, -2, 1.5])
def test_level_count_must_be_positive(n):
    with pytest.raises(DomainError):
        sp.odd_levels(n)


def test_spectrum_sorted_and_family_lookup():
    spec = sp.barrier_levels(1.0, 4)
    assert np.all(np.diff(spec.energies) >= 0)
    assert len(spec) == 8 and spec.n == 4
    assert np.all(np.diff(spec.family("even")) > 0)
    assert spec.family("odd").tolist() == [1.5, 3.5, 5.5, 7.5]
    e, lab = spec.levels[0]
    assert lab == "even_0" and e.e == spec.energies[0]


def test_tail_weight_bounds_omitted_levels():
    theta = 0.3
    spec = sp.harmonic_levels(20)
    omitted = sum(math.exp(-theta * (k + 0.5)) for k in range(20, 2000))
    assert omitted <= spec.tail_weight(theta) <= omitted * (1 + 1e-12)


# -- central barrier -------------------------------------------------------------

def test_quantization_rhs_zeros():
    for k in range(4):
        assert abs(sp.quantization_rhs(2 * k + 0.5)) < 1e-14


def test_even_levels_at_zero_strength():
    assert sp.even_levels_at_g(0.0, 2).energies == pytest.approx([0.5, 2.5], abs=1e-14)


def test_even_levels_strong_barrier():
    e = sp.even_levels_at_g(1e6, 2).energies
    delta = np.array([1.5, 3.5]) - e
    assert np.all(delta > 0) and np.all(delta < 1e-5)


def test_even_level_anchor_g1():
    e = sp.even_levels_at_g(1.0, 1).energies[0]
    assert 0.5 < e < 1.5
    assert e == pytest.approx(EVEN_ROOT_G1, abs=1e-12)
    assert e == pytest.approx(mp_even_root(1.0, 0), abs=1e-12)


@pytest.mark.parametrize("g", [0.05, 0.7, 3.0, 40.0, 2e3])
def test_even_levels_against_mpmath(g):
    e = sp.even_levels_at_g(g, 6).energies
    for k in range(6):
        assert e[k] == pytest.approx(mp_even_root(g, k), abs=1e-12)


def test_even_levels_monotone_in_g():
    rows = [sp.even_levels_at_g(g, 8).energies for g in (0.1, 1.0, 10.0, 100.0)]
    assert np.all(np.diff(rows, axis=0) > 0)


def test_insertion_limit_degeneracy():
    e = sp.even_levels_at_g(1e8, 6).energies
    assert np.abs(e - (2 * np.arange(6) + 1.5)).max() < 1e-7


def test_infinite_barrier_is_the_odd_ladder():
    assert sp.even_levels_at_g(math.inf, 5).energies.tolist() == [1.5, 3.5, 5.5, 7.5, 9.5]


def test_negative_strength_rejected():
    with pytest.raises(DomainError):
        sp.even_levels_at_g(-1.0, 2)


@settings(max_examples=40, deadline=None)
@given(g=st.floats(1e-3, 1e5), k=st.integers(0, 20))
def test_even_root_stays_in_bracket_and_solves(g, k):
    e = sp.even_level_at_g(g, k)
    assert 2 * k + 0.5 < e < 2 * k + 1.5
    # residual of the condition relative to its local slope
    slope = abs(sp._even_objective_prime(e, g))
    assert abs(sp._even_objective(e, g)) <= 1e-12 * max(slope, 1.0)


# -- hard barrier at x0 -------------------------------------------------------------

def test_dirichlet_at_centre():
    assert sp.dirichlet_levels_at_x0(0.0, 3).energies == pytest.approx([1.5, 3.5, 5.5], abs=1e-12)


def test_dirichlet_far_left_relaxes_to_oscillator():
    assert sp.dirichlet_levels_at_x0(-12.0, 3).energies == pytest.approx([0.5, 1.5, 2.5], abs=1e-12)


def test_dirichlet_anchor_xm1():
    e = sp.dirichlet_levels_at_x0(-1.0, 1).energies[0]
    assert 0.5 < e < 1.5
    assert e == pytest.approx(DIRICHLET_ROOT_XM1, abs=1e-10)
    assert e == pytest.approx(mp_dirichlet_root(-1.0, 0.6, 1.4), abs=1e-10)


@pytest.mark.parametrize("x0", [-0.3, -2.0, -4.5, -7.0])
def test_dirichlet_against_mpmath(x0):
    e = sp.dirichlet_levels_at_x0(x0, 5).energies
    for n in range(5):
        ref = mp_dirichlet_root(x0, e[n] - 1e-6, e[n] + 1e-6)
        assert e[n] == pytest.approx(ref, abs=1e-10)
    assert np.all(e >= np.arange(5) + 0.5) and np.all(e <= 2 * np.arange(5) + 1.5)


def test_left_side_shares_the_spectrum():
    spec = sp.dirichlet_levels_at_x0(0.0, 4, side="left")
    assert spec.labels[0] == "left_0"
    assert spec.energies.tolist() == sp.dirichlet_levels_at_x0(0.0, 4).energies.tolist()


@pytest.mark.parametrize("x0", [0.1, -12.5])
def test_dirichlet_domain(x0):
    with pytest.raises(DomainError):
        sp.dirichlet_levels_at_x0(x0, 2)


def test_branches_monotone_and_match_scans():
    grid = np.linspace(0.0, -8.0, 81)
    br = sp.dirichlet_branches(grid, 12)
    assert np.all(np.diff(br, axis=0) <= 1e-13)
    for i in (0, 17, 40, 80):
        assert br[i] == pytest.approx(sp.dirichlet_levels_at_x0(grid[i], 12).energies, abs=1e-12)


def test_branch_zero_endpoints():
    br = sp.dirichlet_branches(np.linspace(0.0, -12.0, 61), 4)
    assert br[0, 0] == pytest.approx(1.5, abs=1e-12)
    assert br[-1, 0] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("x0", [0.0, -0.7, -3.0])
def test_implicit_slopes_match_finite_difference(x0):
    e = sp._dirichlet_energies(x0, 6)
    slopes = sp.dirichlet_slopes(x0, e)
    h = 1e-3
    e_at = lambda s: sp._dirichlet_energies(x0 + s * h, 6)  # noqa: E731
    fd = (e_at(-2) - 8 * e_at(-1) + 8 * e_at(1) - e_at(2)) / (12 * h)
    assert slopes == pytest.approx(fd, rel=1e-7, abs=1e-12)
    assert np.all(slopes >= 0)


# -- slopes at the centre and the generating function -------------------------------

@pytest.mark.parametrize("n, factor", [(0, 2.0), (1, 3.0), (2, 3.75)])
def test_slope_factor_examples(n, factor):
    assert sp.slope_factor(n) == pytest.approx(factor, rel=1e-14)


def test_slope_at_zero_n0():
    assert sp.dE_dx0_at_zero(0) == pytest.approx(2 / math.sqrt(math.pi) / math.sqrt(2), rel=1e-14)


def test_slope_at_zero_increasing():
    s = [sp.dE_dx0_at_zero(n) for n in range(61)]
    assert all(v > 0 for v in s) and np.all(np.diff(s) > 0)
    with pytest.raises(DomainError):
        sp.dE_dx0_at_zero(61)


@pytest.mark.parametrize("n", range(11))
def test_boundary_slope_matches_factorial_form(n):
    expected = sp.dE_dx0_at_zero(n) * sp.DX0_DQ0
    assert sp.general_dE_dq0(2 * n + 1.5) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("n", range(6))
def test_factorial_form_matches_branch_slope(n):
    h = 1e-3
    e = [sp._dirichlet_energies(s * h, n + 1)[n] for s in (-2, -1, 1, 2)]
    fd = (e[0] - 8 * e[1] + 8 * e[2] - e[3]) / (12 * h)
    assert fd == pytest.approx(sp.dE_dx0_at_zero(n), rel=1e-6)


def test_off_level_slope_matches_finite_difference():
    # away from a level, the formula is the slope of the level set
    # D_{e-1/2}(x0) = D_{0.7}(0), which passes through e = 1.2 at x0 = 0
    c = mp.pcfd(0.7, 0)
    h = 1e-4

    def e_of(q0):
        f = lambda e: mp.pcfd(e - 0.5, q0 * sp.DX0_DQ0) - c  # noqa: E731
        return float(mp.findroot(f, 1.2))

    fd = (e_of(-2 * h) - 8 * e_of(-h) + 8 * e_of(h) - e_of(2 * h)) / (12 * h)
    assert sp.general_dE_dq0(1.2) == pytest.approx(fd, rel=1e-9)


@pytest.mark.parametrize("x, terms", [(0.0, 1), (0.0, 200), (0.5, 200), (0.9, 500)])
def test_series_identity(x, terms):
    assert sp.series_identity_check(x, terms) < 1e-10


def test_series_identity_slow_at_0p9():
    # the terms decay like n^{1/2} 0.9^n, so 200 of them are not enough
    assert sp.series_identity_check(0.9, 200) > 1e-10


def test_series_domain():
    with pytest.raises(DomainError):
        sp.series_identity_check(1.0, 10)
