import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vplab.biot_savart import GridField, GridSpec, oseen_profile
from vplab.fokker_planck import (DivergentTailError, fokker_planck_matrix,
                                 fokker_planck_matrix_scaled, solve_F_nu, w_app, z_beta_norm,
                                 z_beta_norm_radial)
from vplab.linear_operator import SectorFunction, norm_X
from vplab.radial import make_exponential, make_gaussian
from vplab.steady_state import build_orders_2_3

PROFILE = make_gaussian()


@pytest.fixture(scope="module")
def F0():
    return solve_F_nu(0.0, 1.0, PROFILE).F_nu


def test_inviscid_limit_is_second_order_correction(F0):
    omega2 = build_orders_2_3(PROFILE)[0]
    assert norm_X(F0 - omega2, PROFILE) <= 1e-6 * norm_X(omega2, PROFILE)


def test_zero_source_gives_zero():
    out = solve_F_nu(1e-2, 1.0, PROFILE, source_scale=0.0)
    assert np.all(out.F_nu.cos_coeff == 0) and np.all(out.F_nu.sin_coeff == 0)


def test_linear_in_source():
    a = solve_F_nu(1e-2, 1.0, PROFILE).F_nu
    b = solve_F_nu(1e-2, 1.0, PROFILE, source_scale=3.0).F_nu
    assert norm_X(b - 3.0 * a, PROFILE) <= 1e-10 * norm_X(b, PROFILE)


def test_depends_only_on_ratio():
    a = solve_F_nu(2e-3, 2.0, PROFILE)
    b = solve_F_nu(1e-3, 1.0, PROFILE)
    assert a.ratio == b.ratio
    assert np.array_equal(a.F_nu.cos_coeff, b.F_nu.cos_coeff)


def test_discrete_system_well_posed():
    out = solve_F_nu(1e-2, 1.0, PROFILE)
    assert out.residual < 1e-10
    assert out.rcond > 1e-12


@pytest.mark.parametrize("eps", [1e-5, 1e-6])
def test_local_exponent_at_small_ratio(F0, eps):
    y1 = norm_X(solve_F_nu(eps, 1.0, PROFILE).F_nu - F0, PROFILE)
    y2 = norm_X(solve_F_nu(eps / 10, 1.0, PROFILE).F_nu - F0, PROFILE)
    assert np.log10(y1 / y2) == pytest.approx(1.0, abs=1e-2)


def test_viscous_part_is_out_of_phase(F0):
    # to first order the viscous change is Lam^-1 applied to eps K F0 and
    # therefore lives in the sine parity only
    out = solve_F_nu(1e-6, 1.0, PROFILE).F_nu - F0
    sin_part = SectorFunction.sin(2, out.sin_coeff, PROFILE.grid)
    assert norm_X(sin_part, PROFILE) > 0.99 * norm_X(out, PROFILE)


def test_validation():
    with pytest.raises(ValueError):
        solve_F_nu(-1.0)
    with pytest.raises(ValueError):
        solve_F_nu(1e-3, 0.0)
    with pytest.raises(ValueError):
        solve_F_nu(1e-3, 1.0, make_exponential(0.5))


# -- Fokker-Planck operator --------------------------------------------------------------

def test_scaled_matrix_conjugates_unscaled():
    grid = PROFILE.grid
    r = grid.nodes
    H = r**2 / (1 + r**2)
    gauss = np.exp(-r**2 / 4)
    lhs = fokker_planck_matrix(grid) @ (gauss * H)
    rhs = gauss * (fokker_planck_matrix_scaled(grid) @ H)
    sel = (r > 0.1) & (r < 12)
    assert np.max(np.abs(lhs - rhs)[sel]) < 1e-7


def test_one_minus_L_positive_on_mode2(rng):
    """Rayleigh quotients of 1 - L against the Gaussian-weighted inner product."""
    grid = PROFILE.grid
    r = grid.nodes
    K = fokker_planck_matrix_scaled(grid)
    wt = grid.weights * np.exp(-r**2 / 4)
    for _ in range(5):
        c = rng.normal(size=4)
        H = r**2 * np.exp(-r**2 / 16) * np.polyval(c, r**2 / 16)
        quot = np.sum(wt * H * (K @ H)) / np.sum(wt * H * H)
        assert quot > 1.0


# -- w_app ---------------------------------------------------------------------------------

def test_w_app_reduces_to_oseen_at_tau_zero(F0):
    spec = GridSpec(64, 8.0)
    wa = w_app(0.0, 1.0, 1.0, 1.0, F0)
    assert wa.tau == 0.0
    X1, X2 = spec.mesh()
    assert np.array_equal(wa.on_grid(spec).values, oseen_profile(X1, X2))


def test_w_app_is_even(F0, rng):
    wa = w_app(1e-3, 1.0, 1.0, 5.0, F0)
    x1, x2 = rng.uniform(-6, 6, (2, 100))
    assert np.allclose(wa(x1, x2), wa(-x1, -x2), atol=1e-15)
    assert wa.tau == pytest.approx(5e-3)


def test_w_app_validation(F0):
    with pytest.raises(ValueError):
        w_app(1e-3, 1.0, 1.0, 0.0, F0)
    with pytest.raises(ValueError):
        w_app(1e-3, 1.0, -1.0, 1.0, F0)


# -- weighted norm ----------------------------------------------------------------------

def test_z_beta_norm_of_oseen_against_radial_quadrature():
    spec = GridSpec(512, 30.0)
    X1, X2 = spec.mesh()
    f = GridField(oseen_profile(X1, X2), spec.L)
    r = PROFILE.grid.nodes
    radial = z_beta_norm_radial(np.exp(-r**2 / 4) / (4 * np.pi), 0, PROFILE.grid)
    assert z_beta_norm(f) == pytest.approx(radial, rel=1e-4)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 10.0))
def test_z_beta_norm_homogeneous(c):
    spec = GridSpec(128, 20.0)
    X1, X2 = spec.mesh()
    f = GridField(oseen_profile(X1, X2), spec.L)
    assert z_beta_norm(f.with_values(c * f.values)) == pytest.approx(c * z_beta_norm(f), rel=1e-12)


def test_z_beta_norm_monotone_in_beta():
    spec = GridSpec(128, 20.0)
    X1, X2 = spec.mesh()
    f = GridField(oseen_profile(X1, X2), spec.L)
    vals = [z_beta_norm(f, b) for b in (0.25, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert z_beta_norm(f.with_values(0 * f.values)) == 0.0
    with pytest.raises(ValueError):
        z_beta_norm(f, 0.0)


def test_z_beta_norm_rejects_slow_tails():
    spec = GridSpec(128, 20.0)
    X1, X2 = spec.mesh()
    f = GridField(1.0 / (1.0 + X1**2 + X2**2), spec.L)
    with pytest.raises(DivergentTailError):
        z_beta_norm(f)
