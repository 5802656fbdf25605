import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import exp1

from vplab.biot_savart import (FrameTruncationError, FrameTruncationWarning, GridField, GridSpec,
                               ResolutionError, biot_savart_grid, check_frame, oseen_field,
                               oseen_velocity, oseen_vorticity, spectral_gradient, stream_function,
                               truncated_green_hat)


@pytest.fixture(scope="module")
def oseen256():
    spec = GridSpec(256, 40.0)
    return spec, oseen_field(1.0, 1.0, 1.0, (0.0, 0.0), spec)


def test_oseen_velocity_at_radius_two(oseen256):
    spec, w = oseen256
    u1, u2 = biot_savart_grid(w)
    X1, X2 = spec.mesh()
    e1, e2 = oseen_velocity(1.0, 1.0, 1.0, X1, X2)
    assert np.max(np.hypot(u1.values - e1, u2.values - e2)) < 1e-10
    # the reference magnitude at |x| = 2
    mag = np.hypot(*oseen_velocity(1.0, 1.0, 1.0, 2.0, 0.0))
    assert mag == pytest.approx((1 - np.exp(-1)) / (4 * np.pi), rel=1e-14)
    assert mag == pytest.approx(0.050302, abs=1e-6)


def test_zero_vorticity_gives_zero_velocity():
    w = GridField(np.zeros((32, 32)), 1.0)
    u1, u2 = biot_savart_grid(w)
    assert np.all(u1.values == 0) and np.all(u2.values == 0)


def test_superposition_of_displaced_gaussians():
    spec = GridSpec(128, 20.0)
    a = oseen_field(1.0, 1.0, 1.0, (2.0, -1.0), spec)
    b = oseen_field(-0.5, 1.0, 2.0, (-3.0, 2.5), spec)
    ua = biot_savart_grid(a)
    ub = biot_savart_grid(b)
    uab = biot_savart_grid(a.with_values(a.values + b.values))
    for k in range(2):
        assert np.max(np.abs(uab[k].values - ua[k].values - ub[k].values)) < 1e-10


def test_stream_function_matches_closed_form(oseen256):
    spec, w = oseen256
    psi = stream_function(w)
    X1, X2 = spec.mesh()
    r2 = X1**2 + X2**2
    exact = -(np.log(r2) + exp1(r2 / 4)) / (4 * np.pi)
    assert np.max(np.abs(psi.values - exact)) < 1e-10


def test_far_field_circulation():
    spec = GridSpec(256, 40.0)
    w = oseen_field(1.0, 0.5, 1.0, (0.0, 0.0), spec)
    u1, u2 = biot_savart_grid(w)
    x = spec.axes()[0]
    i = int(np.argmin(np.abs(x - 0.4 * spec.L)))
    j = spec.n // 2
    speed = np.hypot(u1.values[i, j], u2.values[i, j])
    r = np.hypot(x[i], spec.axes()[1][j])
    assert speed * 2 * np.pi * r == pytest.approx(1.0, rel=1e-2)


def test_shifted_box_matches_centered():
    c = GridSpec(128, 10.0)
    s = GridSpec(128, 10.0, (3.0, -2.0))
    wc = oseen_field(1.0, 1.0, 1.0, (0.0, 0.0), c)
    ws = oseen_field(1.0, 1.0, 1.0, (3.0, -2.0), s)
    assert np.allclose(biot_savart_grid(wc)[0].values, biot_savart_grid(ws)[0].values, atol=1e-13)


def test_green_hat_small_k_continuity():
    R = 7.0
    k = np.array([0.0, 1e-7, 0.999e-3 / R, 1.001e-3 / R])
    v = truncated_green_hat(k, R)
    assert v[0] == pytest.approx(v[1], rel=1e-12)
    # both branches agree across the switch
    assert v[2] == pytest.approx(v[3], rel=1e-9)


def test_spectral_gradient_of_gaussian():
    spec = GridSpec(128, 20.0)
    w = oseen_field(1.0, 1.0, 1.0, (0.5, -0.3), spec)
    g1, g2 = spectral_gradient(w)
    X1, X2 = spec.mesh()
    assert np.max(np.abs(g1.values + (X1 - 0.5) / 2 * w.values)) < 1e-12
    assert np.max(np.abs(g2.values + (X2 + 0.3) / 2 * w.values)) < 1e-12


# -- Oseen vortex ----------------------------------------------------------------------

def test_oseen_center_value_and_mass():
    spec = GridSpec(128, 20.0)
    w = oseen_field(1.0, 1.0, 1.0, (0.0, 0.0), spec)
    assert oseen_vorticity(1.0, 1.0, 1.0, 0.0, 0.0) == pytest.approx(1 / (4 * np.pi))
    assert w.integral() == pytest.approx(1.0, rel=1e-12)
    w2 = oseen_field(3.0, 0.5, 2.0, (1.0, 1.0), spec)
    assert w2.integral() == pytest.approx(3.0, rel=1e-12)


def test_oseen_peak_halves_when_time_doubles():
    p1 = oseen_vorticity(2.0, 0.3, 1.0, 0.0, 0.0)
    p2 = oseen_vorticity(2.0, 0.3, 2.0, 0.0, 0.0)
    assert p1 / p2 == pytest.approx(2.0, rel=1e-15)


def test_oseen_field_resolution_guard():
    with pytest.raises(ResolutionError):
        oseen_field(1.0, 1e-4, 1.0, (0.0, 0.0), GridSpec(64, 10.0))


# -- frame handling --------------------------------------------------------------------

def test_frame_checks():
    spec = GridSpec(64, 5.0)
    wide = oseen_field(1.0, 1.0, 4.0, (0.0, 0.0), spec)
    with pytest.raises(FrameTruncationError):
        biot_savart_grid(wide)
    mid = oseen_field(1.0, 1.0, 0.5, (0.0, 0.0), spec)
    with pytest.warns(FrameTruncationWarning):
        check_frame(mid)
    narrow = oseen_field(1.0, 1.0, 0.2, (0.0, 0.0), GridSpec(128, 5.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_frame(narrow)


# -- GridField --------------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(8, 40).map(lambda k: 2 * k), st.floats(0.1, 100.0),
       st.floats(-5, 5), st.floats(-5, 5))
def test_offsets_antisymmetric_and_roundtrip(n, L, cx, cy):
    spec = GridSpec(n, L, (cx, cy))
    o = spec.offsets()
    assert np.array_equal(o, -o[::-1])
    vals = np.random.default_rng(n).normal(size=(n, n))
    f = GridField(vals, L, (cx, cy))
    g = GridField.from_bytes(f.to_bytes())
    assert np.array_equal(g.values, f.values)
    assert (g.L, g.center) == (f.L, f.center)
    assert len(f.to_bytes()) == 32 + 8 * n * n


def test_dump_and_load(tmp_path):
    f = GridField(np.arange(256.0).reshape(16, 16), 2.0, (1.0, -1.0))
    path = tmp_path / "f.vpf"
    f.dump(path)
    g = GridField.load(path)
    assert np.array_equal(g.values, f.values)
    with pytest.raises(ValueError):
        GridField.from_bytes(b"XXXX" + path.read_bytes()[4:])
    with pytest.raises(ValueError):
        GridField.from_bytes(path.read_bytes()[:-8])


def test_gridfield_validation_and_reflections():
    with pytest.raises(ValueError):
        GridField(np.zeros((16, 18)), 1.0)
    with pytest.raises(ValueError):
        GridField(np.zeros((15, 15)), 1.0)
    with pytest.raises(ValueError):
        GridField(np.full((16, 16), np.nan), 1.0)
    spec = GridSpec(16, 1.0)
    X1, X2 = spec.mesh()
    f = GridField(X1 + 2 * X2**3, 1.0)
    assert np.allclose(f.reflect_x2(), X1 - 2 * X2**3)
    assert np.allclose(f.reflect_origin(), -X1 - 2 * X2**3)
    assert not f.values.flags.writeable


def test_slice_csv():
    f = GridField(np.ones((16, 16)), 1.0)
    lines = f.slice_csv().splitlines()
    assert lines[0] == "x1,value" and len(lines) == 17
    assert f.slice_csv(axis=1).splitlines()[0] == "x2,value"
