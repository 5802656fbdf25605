import numpy as np
import pytest

from vplab.biot_savart import (FrameTruncationError, GridField, GridSpec, ResolutionError,
                               oseen_field)
from vplab.fokker_planck import solve_F_nu
from vplab.radial import make_gaussian
from vplab.steady_state import build_expansion
from vplab.viscous import (NumericalFailure, SeparationError, SolverConfig, app1_error,
                           app3_below_thm1, decompose, error_metrics, initial_pair,
                           rotate_quarter, run, thm1_error)


@pytest.fixture(scope="module")
def short_pair_run():
    cfg = SolverConfig(nu=4e-3, Omega=1 / np.pi, n=256, L=2.0, t_start=1.0, t_end=1.5,
                       snapshot_times=(1.25,))
    w0 = initial_pair(1.0, 1.0, 4e-3, 1.0, cfg.spec)
    return cfg, w0, run(cfg, w0)


@pytest.mark.parametrize("kwargs", [dict(nu=0.0), dict(nu=1.0, t_start=0.0),
                                    dict(nu=1.0, t_end=0.5), dict(nu=1.0, n=100),
                                    dict(nu=1.0, L=-1.0), dict(nu=1.0, dt_cfl_factor=2.0),
                                    dict(nu=1.0, snapshot_times=(3.0,)),
                                    dict(nu=1.0, snapshot_times=(1.8, 1.2))])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_oseen_vortex_spreads_exactly():
    spec = GridSpec(128, 30.0)
    cfg = SolverConfig(nu=1.0, n=128, L=30.0, t_start=1.0, t_end=1.5)
    res = run(cfg, oseen_field(1.0, 1.0, 1.0, (0.0, 0.0), spec))
    exact = oseen_field(1.0, 1.0, 1.5, (0.0, 0.0), spec)
    assert np.sum(np.abs(res.final().values - exact.values)) * spec.h**2 < 1e-8


def test_oseen_in_rotating_frame_is_unchanged():
    # a centered radial vortex does not feel the frame rotation
    spec = GridSpec(128, 30.0)
    a = run(SolverConfig(nu=1.0, n=128, L=30.0, t_end=1.5),
            oseen_field(1.0, 1.0, 1.0, (0.0, 0.0), spec))
    b = run(SolverConfig(nu=1.0, Omega=0.7, n=128, L=30.0, t_end=1.5),
            oseen_field(1.0, 1.0, 1.0, (0.0, 0.0), spec))
    assert np.max(np.abs(a.final().values - b.final().values)) < 1e-10


def test_run_rejects_mismatched_or_truncated_initial_data():
    cfg = SolverConfig(nu=1.0, n=64, L=10.0)
    with pytest.raises(ValueError):
        run(cfg, GridField(np.zeros((32, 32)), 10.0))
    with pytest.raises(ValueError):
        run(cfg, GridField(np.zeros((64, 64)), 10.0, (1.0, 0.0)))
    with pytest.raises(FrameTruncationError):
        run(cfg, oseen_field(1.0, 1.0, 6.0, (0.0, 0.0), cfg.spec))


def test_vorticity_reaching_frame_is_a_numerical_failure():
    spec = GridSpec(64, 6.0)
    w0 = oseen_field(1.0, 1.0, 0.3, (0.0, 0.0), spec)
    with pytest.raises(NumericalFailure):
        run(SolverConfig(nu=1.0, n=64, L=6.0, t_start=0.3, t_end=5.0, frame_check_every=1), w0)


def test_pair_run_conserves_circulation(short_pair_run):
    _, _, res = short_pair_run
    assert res.times == [1.25, 1.5]
    assert np.allclose(res.circulation, 2.0, rtol=1e-12)
    assert res.dt_min <= res.dt_max


def test_pair_run_keeps_point_symmetry(short_pair_run):
    _, _, res = short_pair_run
    for f in res.snapshots:
        assert np.max(np.abs(f.values - f.reflect_origin())) <= 1e-10 * np.max(np.abs(f.values))


def test_pair_stays_close_to_oseen_superposition(short_pair_run):
    _, _, res = short_pair_run
    errs = [thm1_error(f, 1.0, 4e-3, t, 1.0) for t, f in zip(res.times, res.snapshots)]
    assert errs[0] < errs[1]
    # first order in nu t/d^2 with a moderate constant
    assert errs[1] / (4e-3 * 1.5) < 20


# -- initial data and decomposition ------------------------------------------------------

def test_initial_pair_properties():
    spec = GridSpec(512, 2.0)
    w = initial_pair(1.0, 1.0, 1e-3, 1.0, spec)
    assert w.integral() == pytest.approx(2.0, rel=1e-10)
    assert np.max(w.values) == pytest.approx(1 / (4 * np.pi * 1e-3), rel=1e-2)
    assert thm1_error(w, 1.0, 1e-3, 1.0, 1.0) < 1e-12
    with pytest.raises(ResolutionError):
        initial_pair(1.0, 1.0, 1e-5, 1.0, spec)
    with pytest.raises(SeparationError):
        initial_pair(1.0, 1.0, 0.1, 1.0, spec)


def test_decompose_oseen_pair_gives_gaussian_profiles():
    spec = GridSpec(512, 2.0)
    nu, t = 1e-3, 2.0
    w = initial_pair(1.0, 1.0, nu, t, spec)
    pair = decompose(w, 1.0, nu, t, 1.0)
    X1, X2 = pair.mesh()
    G = np.exp(-(X1**2 + X2**2) / 4) / (4 * np.pi)
    inside = np.hypot(X1, X2) < 8
    assert np.max(np.abs(pair.w1 - G)[inside]) < 1e-12
    assert np.array_equal(pair.w1, pair.w2)
    m1, m2 = pair.masses()
    assert m1 == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(SeparationError):
        decompose(w, 1.0, 0.1, 1.0, 1.0)


def test_error_metrics_at_start():
    spec = GridSpec(512, 2.0)
    nu = 1e-3
    w = initial_pair(1.0, 1.0, nu, 2.0, spec)
    P = make_gaussian()
    rec = error_metrics(w, 1.0, nu, 2.0, 1.0, build_expansion(P), solve_F_nu(nu, 1.0, P))
    assert rec.nut_over_d2 == pytest.approx(2e-3)
    assert rec.err_thm1 < 1e-12
    # the Oseen pair differs from w_app and w_eps at first order in nu t/d^2
    assert 0 < rec.err_app1 < 0.05
    assert 0 < rec.err_app3 < 0.05
    with pytest.raises(ValueError):
        error_metrics(w, 1.0, nu, 2.0, 1.0, build_expansion(P), solve_F_nu(2 * nu, 1.0, P))


def test_app1_error_zero_for_matching_profile():
    spec = GridSpec(512, 2.0)
    w = initial_pair(1.0, 1.0, 1e-3, 2.0, spec)
    pair = decompose(w, 1.0, 1e-3, 2.0, 1.0)

    def gauss(x, y):
        return np.exp(-(x**2 + y**2) / 4) / (4 * np.pi)

    assert app1_error(pair, gauss) < 1e-10


def test_app3_comparison_uses_raw_distances():
    # thm1 is divided by 2 alpha and app3 by alpha
    assert app3_below_thm1(0.5, 0.9)
    assert not app3_below_thm1(0.5, 1.0)


def test_rotate_quarter():
    spec = GridSpec(64, 4.0)
    X1, X2 = spec.mesh()
    f = GridField(X1 + 3 * X2**2, 4.0)
    r = rotate_quarter(f)
    # f(R^-1 x) with R^-1 (x, y) = (y, -x)
    assert np.allclose(r.values, X2 + 3 * X1**2)
    assert np.array_equal(rotate_quarter(f, 4).values, f.values)
    assert np.allclose(rotate_quarter(f, 2).values, f.reflect_origin())
