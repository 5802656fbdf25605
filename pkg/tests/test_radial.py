import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import erf, erfc

from vplab.radial import (RadialGrid, check_admissibility, cumulative_Q, derived_functions,
                          fornberg_weights, make_exponential, make_gaussian, profile_from_name,
                          RadialProfile)


def test_grid_gaussian_moment(gaussian):
    grid = gaussian.grid
    assert np.all(np.diff(grid.nodes) > 0)
    assert np.all(grid.weights > 0)
    val = grid.integrate(np.exp(-grid.nodes**2 / 4))
    assert val == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_grid_moments(gaussian, k):
    grid = gaussian.grid
    r = grid.nodes
    exact = 2 ** (2 * k + 1) * math.factorial(k)      # int r^(2k+1) e^{-r^2/4} dr
    assert grid.integrate(r ** (2 * k) * np.exp(-r**2 / 4)) == pytest.approx(exact, rel=1e-10)


def test_derivatives_of_smooth_table(gaussian):
    grid = gaussian.grid
    r = grid.nodes
    f = np.exp(-r**2 / 4) * r**2
    df = (2 * r - r**3 / 2) * np.exp(-r**2 / 4)
    d2f = (2 - 2.5 * r**2 + r**4 / 4) * np.exp(-r**2 / 4)
    assert np.max(np.abs(grid.derivative(f) - df)) < 1e-9
    assert np.max(np.abs(grid.second_derivative(f) - d2f)) < 1e-7


def test_cumulative_matches_closed_form(gaussian):
    grid = gaussian.grid
    r = grid.nodes
    # cumulative integrals are plain int f dr
    cum = grid.cumulative(np.exp(-r**2 / 4), left_power=1)
    assert np.max(np.abs(cum - np.sqrt(np.pi) * erf(r / 2))) < 1e-10
    right = grid.cumulative_from_right(np.exp(-r**2 / 4))
    assert np.max(np.abs(right - np.sqrt(np.pi) * erfc(r / 2))) < 1e-10


def test_fornberg_weights_exact_on_polynomials():
    x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    w = fornberg_weights(0.3, x, 2)
    for deg in range(5):
        vals = x**deg
        exact = [0.3**deg, deg * 0.3 ** (deg - 1) if deg else 0.0,
                 deg * (deg - 1) * 0.3 ** (deg - 2) if deg > 1 else 0.0]
        assert np.allclose(w @ vals, exact, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e-3, max_value=19.5))
def test_interpolation_of_smooth_function(r0):
    grid = make_gaussian().grid
    r = grid.nodes
    table = np.exp(-r**2 / 8) * np.cos(r)
    got = grid.interpolate(table, np.array([r0]))[0]
    assert got == pytest.approx(np.exp(-r0**2 / 8) * np.cos(r0), abs=1e-9)


def test_interpolation_power_extension(gaussian):
    grid = gaussian.grid
    r = grid.nodes
    table = 1.0 / r**3
    out = grid.interpolate(table, np.array([30.0, 40.0]), "power:3")
    assert np.allclose(out, [30.0**-3, 40.0**-3], rtol=1e-10)
    assert np.all(grid.interpolate(table, np.array([30.0])) == 0.0)


def test_grid_rejects_bad_arguments():
    with pytest.raises(ValueError):
        RadialGrid(size=10)
    with pytest.raises(ValueError):
        RadialGrid(r_max=1.0, r_min=2.0)


# -- profile values ---------------------------------------------------------------------

def test_gaussian_center_value(gaussian):
    assert gaussian.w_star(0.0, 0.0) == pytest.approx(1 / (4 * np.pi), rel=1e-15)
    assert gaussian.w_star(0.0, 0.0) == pytest.approx(0.0795775, abs=1e-7)


def test_cumulative_Q_examples(gaussian):
    assert cumulative_Q(gaussian, 0.0) == 0.0
    assert cumulative_Q(gaussian, 4.0) == pytest.approx(1 - np.exp(-1), rel=1e-14)
    assert cumulative_Q(gaussian, 4.0) == pytest.approx(0.6321206, abs=1e-7)
    quad = integrate.quad(gaussian.q, 0, 4.0, epsabs=1e-14)[0]
    assert cumulative_Q(gaussian, 4.0) == pytest.approx(quad, rel=1e-12)
    assert cumulative_Q(gaussian, gaussian.r_max**2) <= 1 + 1e-10
    with pytest.raises(ValueError):
        cumulative_Q(gaussian, -1.0)


def test_cumulative_Q_quadrature_path_matches_closed_form():
    g = make_gaussian()
    bare = RadialProfile(g.q, g.dq, g.d2q, None, name="bare")
    s = np.array([0.5, 4.0, 30.0])
    assert np.allclose(bare.cumulative_Q(s), g.cumulative_Q(s), rtol=1e-12)


def test_derived_functions(gaussian):
    phi, g, p = derived_functions(gaussian, np.array([10.0, 2.0]))
    assert phi[0] * 2 * np.pi * 100 == pytest.approx(1.0, abs=1e-10)
    assert g[1] == pytest.approx(np.exp(-1) / (8 * np.pi), rel=1e-14)
    s = np.linspace(0, 50, 11)
    assert np.allclose(gaussian.p(s) * gaussian.dq(s), -1.0, rtol=1e-14)


def test_phi_small_radius_series(gaussian):
    r = np.array([1e-5, 2e-3])
    exact = -np.expm1(-r**2 / 4) / (2 * np.pi * r**2)
    assert np.allclose(gaussian.phi(r), exact, rtol=1e-12)


def test_dphi_matches_numerical_derivative(gaussian):
    r = np.array([0.5, 1.0, 3.0, 7.0])
    h = 1e-5
    num = (gaussian.phi(r + h) - gaussian.phi(r - h)) / (2 * h)
    assert np.allclose(gaussian.dphi(r), num, rtol=1e-7)


def test_azimuthal_speed_against_grid_biot_savart(gaussian, rng):
    from vplab.biot_savart import GridField, GridSpec, biot_savart_grid

    spec = GridSpec(256, 20.0)
    X1, X2 = spec.mesh()
    u1, u2 = biot_savart_grid(GridField(gaussian.w_star(X1, X2), spec.L))
    i = rng.integers(128 + 4, 128 + 60, 20)
    x = spec.axes()[0][i]
    ut = u2.values[i, 128]                    # on the positive x1 axis
    exact = gaussian.Q_over_s(x**2) * x / (2 * np.pi)
    assert np.allclose(ut, exact, rtol=1e-3)


# -- admissibility -------------------------------------------------------------------------

def test_gaussian_admissible(gaussian):
    rep = check_admissibility(gaussian)
    assert rep.passed
    assert 0.25 < rep.sup_ratio < 1.0
    assert "passed=True" in rep.to_text()


def test_gaussian_sup_ratio_dense_scan(gaussian):
    rep = check_admissibility(gaussian)
    s = np.linspace(1e-4, 100.0, 200001)
    ratio = -s**2 * gaussian.dq(s) / gaussian.cumulative_Q(s)
    assert rep.sup_ratio == pytest.approx(ratio.max(), rel=1e-4)


def test_exponential_gamma_one_stability():
    rep = check_admissibility(make_exponential(1.0))
    assert rep.stability_ok


def test_slow_decay_profile_fails_qdecay():
    def q(s):
        return (1 + np.asarray(s, dtype=float)) ** -2 / np.pi

    def dq(s):
        return -2 * (1 + np.asarray(s, dtype=float)) ** -3 / np.pi

    def d2q(s):
        return 6 * (1 + np.asarray(s, dtype=float)) ** -4 / np.pi

    slow = RadialProfile(q, dq, d2q, None, name="slow", r_max=20.0)
    rep = check_admissibility(slow)
    assert not rep.qdecay_ok
    assert not rep.passed


def test_profile_from_name():
    assert profile_from_name("gaussian").name == "gaussian"
    assert profile_from_name("exponential:0.5").params["gamma"] == 0.5
    with pytest.raises(ValueError):
        profile_from_name("lorentzian")
    with pytest.raises(ValueError):
        make_exponential(-1.0)
