import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from landau_weyl.errors import BadInterval, ConfigError, EmptyBandSet, InvalidWindow
from landau_weyl.model import (BandRange, PotentialKind, Regime, SpectralWindow, algebraic_well, contributing_bands,
                               default_cutoff_M, fourier_omega, gaussian_well, indicator_approximation,
                               load_sampled_radial, make_mollifier, make_test_function, power_tail, sampled_radial)


@pytest.fixture(scope="module")
def mol():
    return make_mollifier(1.0)


def test_window_rejects_landau_level():
    with pytest.raises(InvalidWindow, match="window contains Landau level 3"):
        SpectralWindow(2.9, 3.1)


def test_window_rejects_reversed():
    with pytest.raises(ConfigError):
        SpectralWindow(0.5, -0.5)


def test_bands_gaussian_well():
    assert contributing_bands(SpectralWindow(-0.5, 0.5), gaussian_well()) == BandRange(0, 0)


def test_bands_shifted_window():
    assert contributing_bands(SpectralWindow(3.5, 4.5), gaussian_well()) == BandRange(2, 2)


def test_bands_power_tail_q0():
    assert contributing_bands(SpectralWindow(1.5, 2.5), power_tail(1.0, 2.0, 8.0)) == BandRange(0, 0)


def test_empty_band_set():
    # V >= 0 cannot reach a window below the lowest Landau level
    with pytest.raises(EmptyBandSet):
        contributing_bands(SpectralWindow(-0.5, 0.5), algebraic_well(1.0))


def test_band_range_str():
    assert str(BandRange(0, 2)) == "0..2"
    assert list(BandRange(1, 3).indices) == [1, 2, 3]


def test_gaussian_sampled_range():
    g = gaussian_well()
    assert g.inf_value == pytest.approx(-2.0)
    assert -1e-6 < g.sup_value <= 0.0


@given(a=st.floats(-1.8, 0.8), da=st.floats(0.01, 0.1), db=st.floats(0.01, 0.1))
def test_bands_monotone(a, da, db):
    g = gaussian_well()
    b = min(a + 0.1, 0.99)
    small = SpectralWindow(a, b)
    big = SpectralWindow(max(a - da, -5.0), min(b + db, 0.999))
    try:
        s = contributing_bands(small, g)
    except EmptyBandSet:
        return
    bgr = contributing_bands(big, g)
    assert set(s.indices) <= set(bgr.indices)


@given(q=st.integers(0, 3), u=st.floats(0.05, 0.45), w=st.floats(0.05, 0.45))
def test_power_tail_bands_are_0_to_q(q, u, w):
    a = 2 * q + 1 + u
    b = min(a + w, 2 * q + 2.95)
    pot = power_tail(1.0, 2.0, default_cutoff_M(SpectralWindow(a, b)))
    assert contributing_bands(SpectralWindow(a, b), pot) == BandRange(0, q)


def test_power_tail_cutoff_geometry():
    p = power_tail(1.0, 2.0, 8.0)
    assert p.kind is PotentialKind.POWER_TAIL
    rc = p.cutoff_radius
    assert rc == pytest.approx(0.9 * (1.0 / 8.0) ** 0.5)
    assert p.radial(0.5 * rc) == pytest.approx(8.0)
    assert p.radial(2.0) == pytest.approx(0.25)


def test_default_cutoff_M():
    assert default_cutoff_M(SpectralWindow(1.5, 2.5)) == 8.0


def test_fourier_omega_constant():
    om = fourier_omega([2.0])
    assert np.allclose(om(np.linspace(0, 6, 7)), 2.0)
    assert power_tail([1.0, 0.0, 0.0]).is_radial


def test_fourier_omega_nonradial():
    p = power_tail([1.0, 0.3], 2.0, 8.0)
    assert not p.is_radial
    assert p.omega_min() == pytest.approx(0.7, abs=1e-3)


def test_sampled_radial_roundtrip(tmp_path):
    r = np.linspace(0, 8, 801)
    v = -2 * np.exp(-r * r)
    path = tmp_path / "prof.csv"
    np.savetxt(path, np.column_stack([r, v]), delimiter=",")
    p = load_sampled_radial(path)
    g = gaussian_well()
    rr = np.linspace(0, 3, 31)
    assert np.max(np.abs(p.radial(rr) - g.radial(rr))) < 1e-5


def test_sampled_radial_must_decay():
    r = np.linspace(0, 2, 21)
    with pytest.raises(ConfigError):
        sampled_radial(r, -np.ones_like(r))


# test functions


def test_bump_normalised():
    f = make_test_function((-1, 1))
    assert f(0.0) == 1.0
    assert f(1.0) == 0.0 and f(-1.0) == 0.0


def test_bump_value(frozen):
    assert make_test_function((-1, 1))(0.5) == pytest.approx(frozen["bump_at_half"], abs=1e-14)


def test_plateau():
    f = make_test_function((1.4, 2.6), (1.5, 2.5))
    assert f(2.0) == 1.0
    assert f(1.5) == 1.0 and f(2.5) == 1.0
    assert 0 < f(1.45) < 1


def test_bad_plateau():
    with pytest.raises(BadInterval):
        make_test_function((0, 1), (0.5, 1.5))


@given(a=st.floats(-3, 3), w=st.floats(0.05, 2), frac=st.just(0.0) | st.floats(0.01, 0.45))
def test_test_function_vanishes_outside(a, w, frac):
    b = a + w
    plateau = (a + frac * w, b - frac * w) if frac > 0 else None
    f = make_test_function((a, b), plateau)
    t = np.linspace(a - 5, b + 5, 1000)
    out = (t <= a) | (t >= b)
    assert np.all(f(t[out]) == 0.0)
    assert np.all(f(t) >= 0) and np.all(f(t) <= 1)


def test_indicator_approximation():
    f = indicator_approximation(-0.5, 0.5, 1e-3)
    assert f(-0.499) == 1.0 and f(0.499) == 1.0
    assert f(-0.5) == 0.0 and f(0.5) == 0.0


# mollifier


def test_mollifier_theta0(mol):
    assert mol.theta(0.0) == pytest.approx(1.0, abs=1e-12)


def test_mollifier_mass(mol):
    assert abs(mol.mass - 1.0) < 1e-8


def test_mollifier_support_C2():
    m2 = make_mollifier(2.0)
    t = np.linspace(-3, 3, 6001)
    vals = m2.theta(t)
    assert np.all(vals[np.abs(t) >= 0.5] == 0.0)
    assert np.any(vals[np.abs(t) < 0.4] > 0)


def test_theta_breve_nonnegative(mol):
    tau = np.linspace(-200, 200, 20001)
    assert np.min(mol.theta_breve(tau)) > -1e-10


@given(eps=st.floats(1e-3, 10.0))
def test_mollifier_scaled_mass(mol, eps):
    # (1/eps) theta_breve(t/eps) integrates to the same mass for every eps
    t = np.linspace(-200 * eps, 200 * eps, 400001)
    mass = np.trapezoid(mol.theta_breve_eps(t, eps), t)
    assert abs(mass - 1.0) < 1e-8


# regime


def test_regime_coupling_h_eff():
    r = Regime.coupling(100.0, 2.0)
    assert r.h_eff == pytest.approx(0.1)
    assert r.planck == pytest.approx(0.01)


def test_regime_rejects_bad_h():
    with pytest.raises(ConfigError):
        Regime.semiclassical(1.5)
    with pytest.raises(ConfigError):
        Regime.coupling(100.0, -1.0)


def test_regime_pairing():
    with pytest.raises(ConfigError):
        Regime.coupling(100.0, 3.0).check_pairing(power_tail(1.0, 2.0, 8.0))


def test_gaussian_decay_radius():
    g = gaussian_well()
    r = g.radial_extent(1e-8)
    assert abs(g.radial(r)) <= 1e-8 * 1.01
    assert r == pytest.approx(math.sqrt(math.log(2e8)), rel=1e-3)
