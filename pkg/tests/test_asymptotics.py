import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from landau_weyl.asymptotics import (C0, D0, CoeffReport, D0_terms, alpha0, angular_moment, b0, c0_curve,
                                     integrate, level_roots, level_set_density, marching_squares_density)
from landau_weyl.errors import ConfigError, SupportOutsideGap, WindowOutsideGap
from landau_weyl.model import (BandRange, SpectralWindow, algebraic_well, gaussian_well, indicator_approximation,
                               make_test_function, power_tail)

WIN = SpectralWindow(-0.5, 0.5)
B0 = BandRange(0, 0)
LN3_2 = math.log(3) / 2


@pytest.fixture(scope="module")
def well():
    return gaussian_well()


@pytest.fixture(scope="module")
def tail():
    return power_tail(1.0, 2.0, 8.0)


def test_integrate_polynomial():
    val, err = integrate(lambda x: x**5 - 3 * x, [0.0, 2.0])
    assert val == pytest.approx(64 / 6 - 6, abs=1e-13)
    assert err < 1e-10


def test_C0_closed_form(well, frozen):
    assert C0(WIN, well, B0) == pytest.approx(frozen["C0_gaussian_closed"], abs=1e-12)
    # the brute-force Riemann sum confirms the closed form
    assert abs(frozen["C0_gaussian_riemann"] - LN3_2) < 1e-4


def test_C0_empty_preimage():
    assert C0(SpectralWindow(-0.5, 0.5), algebraic_well(1.0), B0) == 0.0


@given(m=st.floats(-0.45, 0.45))
def test_C0_additive(well, m):
    left = C0(SpectralWindow(-0.5, m), well, B0)
    right = C0(SpectralWindow(m, 0.5), well, B0)
    assert left + right == pytest.approx(LN3_2, abs=1e-9)


def test_c0_at_zero(well, frozen):
    f = make_test_function((-1, 1))
    (_, v), = c0_curve(f, well, B0, [0.0])
    assert v == pytest.approx(frozen["c0_gaussian_t0"], abs=1e-10)


def test_c0_zero_where_f_vanishes(well):
    f = make_test_function((-0.2, 0.2))
    vals = c0_curve(f, well, B0, [-0.3, 0.25])
    assert all(v == 0.0 for _, v in vals)


@given(t=st.floats(-3.0, 3.0))
def test_c0_nonnegative_and_supported(well, t):
    if abs(t - 1.0) < 1e-3 or abs(t + 1.0) < 1e-3:
        return
    dens = level_set_density(well, B0, t)
    assert dens >= 0
    if not (-1.0 < t < 1.0):
        assert dens == 0.0


def test_coarea_identity(well):
    val, _ = integrate(lambda t: np.array([level_set_density(well, B0, x) for x in t]), [-0.5, 0.5], rtol=1e-9)
    assert val == pytest.approx(LN3_2, abs=1e-4)


def test_marching_squares_vs_closed_form(well):
    val, err = marching_squares_density(well, -1.0)
    assert abs(val - 0.5) / 0.5 < 1e-4


def test_level_roots(well):
    roots = level_roots(well, -1.0)
    assert roots == pytest.approx([math.sqrt(math.log(2))], abs=1e-10)


def test_alpha0_empty_support(well):
    assert alpha0(make_test_function((1.2, 1.8)), well, B0) == 0.0


def test_alpha0_bump(well, frozen):
    assert alpha0(make_test_function((-0.4, 0.4)), well, B0, rtol=1e-10) == pytest.approx(
        frozen["alpha0_bump_m04_04"], abs=1e-9)


def test_alpha0_linear(well):
    f1 = make_test_function((-0.4, 0.4))
    f2 = make_test_function((-0.3, 0.1), (-0.2, 0.0))

    class Sum:
        support = (-0.4, 0.4)

        def __call__(self, t):
            return f1(t) + f2(t)

        def breakpoints(self):
            return sorted(set(f1.breakpoints()) | set(f2.breakpoints()))

    a = alpha0(Sum(), well, B0, rtol=1e-11)
    assert a == pytest.approx(alpha0(f1, well, B0, rtol=1e-11) + alpha0(f2, well, B0, rtol=1e-11), abs=1e-9)


@pytest.mark.parametrize("eps", [1e-3, 1e-5])
def test_alpha0_indicator_limit(well, eps):
    c0_edge = max(level_set_density(well, B0, -0.5), level_set_density(well, B0, 0.5))
    diff = alpha0(indicator_approximation(-0.5, 0.5, eps), well, B0, rtol=1e-10) - LN3_2
    assert abs(diff) <= 10 * eps * c0_edge


# large coupling


def test_D0_benchmark(tail, frozen):
    assert D0(SpectralWindow(1.5, 2.5), tail) == pytest.approx(2 / 3, abs=1e-12)
    assert frozen["D0_benchmark"] == pytest.approx(2 / 3, abs=1e-15)


def test_D0_point_window(tail):
    assert D0((2.0, 2.0), tail) == 0.0


def test_D0_two_bands(tail, frozen):
    w = SpectralWindow(3.5, 4.5)
    terms = D0_terms(w, tail, 1)
    assert terms == pytest.approx(frozen["D0_two_band_terms"], abs=1e-12)
    assert all(t > 0 for t in terms)
    assert D0(w, tail) == pytest.approx(sum(terms), abs=1e-14)


def test_D0_outside_gap(tail):
    with pytest.raises(WindowOutsideGap):
        D0((0.5, 0.8), tail)


@given(a1=st.floats(1.05, 2.4), da=st.floats(0.01, 0.5))
def test_D0_decreasing_in_a(tail, a1, da):
    a2 = min(a1 + da, 2.45)
    if a2 <= a1:
        return
    assert D0((a2, 2.5), tail) <= D0((a1, 2.5), tail)


def test_b0_prefactor(tail, frozen):
    assert b0(make_test_function((1.5, 2.5)), tail) == pytest.approx(frozen["b0_bump_15_25"], abs=1e-10)


@pytest.mark.parametrize("eps", [1e-3, 1e-5])
def test_b0_indicator_limit(tail, eps):
    diff = b0(indicator_approximation(1.5, 2.5, eps), tail) - 2 / 3
    # c0 near the endpoints is at most (u-1)^-2 / 2 <= 2
    assert abs(diff) <= 10 * eps * 2.0


@given(s=st.floats(0.3, 4.0))
def test_b0_homogeneity(s):
    f = make_test_function((1.5, 2.5))
    base = b0(f, power_tail(1.0, 2.0, 40.0))
    assert b0(f, power_tail(s, 2.0, 40.0)) == pytest.approx(base * s, rel=1e-10)


def test_b0_support_outside_gap(tail):
    with pytest.raises(SupportOutsideGap):
        b0(make_test_function((0.5, 1.5)), tail)


def test_b0_needs_power_tail(well):
    with pytest.raises(ConfigError):
        b0(make_test_function((1.5, 2.5)), well)


def test_angular_moment_constant():
    assert angular_moment(power_tail(2.0, 2.0, 8.0), 1.0) == pytest.approx(4 * math.pi, rel=1e-12)


def test_nonradial_C0_equals_D0():
    # away from the cutoff, the semiclassical volume of phi0 is D0
    p = power_tail([1.0, 0.3, 0.2], 2.0, 8.0)
    w = SpectralWindow(1.5, 2.5)
    assert C0(w, p, B0) == pytest.approx(D0(w, p), rel=1e-6)


def test_marching_squares_nonradial():
    p = power_tail([1.0, 0.3], 2.0, 8.0)
    val, err = marching_squares_density(p, 0.5)
    # coarea: d/dt of C0 over the window [t, t + dt] for 1 + phi0
    dt = 1e-4
    ref = (C0(SpectralWindow(1.5 - dt, 1.5 + dt), p, B0)) / (2 * dt)
    assert val == pytest.approx(ref, rel=1e-3)


def test_report_dict():
    rep = CoeffReport(C0=0.5, c0_samples=[(0.0, 0.5)])
    d = rep.to_dict()
    assert d["C0"] == 0.5 and d["c0_samples"] == [[0.0, 0.5]]
