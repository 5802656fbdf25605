import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vplab.point_vortex import (CollisionError, PointVortexState, SingularConfigurationError,
                                equal_pair, first_integrals, integrate, min_distance_and_turnover,
                                pair_angular_speed, pair_translation_speed, read_vortices, rhs)


def test_single_vortex_is_at_rest():
    st_ = PointVortexState([[0.3, -1.2]], [2.5])
    assert np.array_equal(rhs(st_), np.zeros((1, 2)))


@pytest.mark.parametrize("alpha,d", [(1.0, 1.0), (2.0, 0.5), (-0.7, 3.0)])
def test_equal_pair_speeds(alpha, d):
    vel = rhs(equal_pair(alpha, d))
    speed = abs(alpha) / (2 * np.pi * d)
    assert np.allclose(np.abs(vel[:, 1]), speed, rtol=1e-14)
    assert np.allclose(vel[:, 0], 0.0, atol=1e-15)
    assert vel[0, 1] == pytest.approx(-vel[1, 1])


def test_opposite_pair_velocities_equal():
    vel = rhs(PointVortexState([[0.5, 0.0], [-0.5, 0.0]], [1.0, -1.0]))
    assert np.allclose(vel[0], vel[1])
    assert np.linalg.norm(vel[0]) == pytest.approx(pair_translation_speed(1.0, 1.0))


def test_state_validation():
    with pytest.raises(SingularConfigurationError):
        PointVortexState([[0, 0], [0, 0]], [1, 1])
    with pytest.raises(ValueError):
        PointVortexState([[0, 0]], [0.0])
    with pytest.raises(ValueError):
        PointVortexState(np.zeros((0, 2)), [])


def test_equal_pair_returns_after_one_period():
    alpha, d = 1.0, 1.0
    period = 2 * np.pi**2 * d * d / alpha
    assert period == pytest.approx(2 * np.pi / pair_angular_speed(alpha, alpha, d))
    state = equal_pair(alpha, d)
    traj = integrate(state, period, tol=1e-10)
    assert np.max(np.abs(traj.final.positions - state.positions)) < 1e-6


def test_opposite_pair_translates():
    state = PointVortexState([[0.5, 0.0], [-0.5, 0.0]], [1.0, -1.0])
    traj = integrate(state, 1.0, tol=1e-12)
    shift = traj.final.positions - state.positions
    assert np.allclose(shift[0], shift[1], atol=1e-12)
    assert np.linalg.norm(shift[0]) == pytest.approx(1.0 / (2 * np.pi), rel=1e-10)
    dmin, _ = min_distance_and_turnover(traj)
    assert dmin == pytest.approx(1.0, rel=1e-10)


def test_equilateral_triangle_rotates_rigidly():
    ang = 2 * np.pi * np.arange(3) / 3
    state = PointVortexState(np.c_[np.cos(ang), np.sin(ang)], [1.0, 1.0, 1.0])
    traj = integrate(state, 8.0, tol=1e-10)
    side = np.sqrt(3.0)
    for pos in traj.positions:
        d = [np.linalg.norm(pos[i] - pos[j]) for i, j in ((0, 1), (1, 2), (0, 2))]
        assert np.allclose(d, side, rtol=1e-6)


def test_equilateral_against_short_step_rk4():
    """Brute-force fixed-step RK4 with a tiny step reproduces the adaptive result."""
    ang = 2 * np.pi * np.arange(3) / 3
    state = PointVortexState(np.c_[np.cos(ang), np.sin(ang)], [1.0, 1.0, 1.0])
    t_end, m = 2.0, 4000
    y = state.positions.copy()
    h = t_end / m

    def f(p):
        return rhs(PointVortexState(p, state.circulations))

    for _ in range(m):
        k1 = f(y)
        k2 = f(y + h / 2 * k1)
        k3 = f(y + h / 2 * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    traj = integrate(state, t_end, tol=1e-12)
    assert np.max(np.abs(traj.final.positions - y)) < 1e-9


def test_first_integral_examples():
    H, P1, P2, I = first_integrals(equal_pair(1.0, 1.0))
    assert (P1, P2) == (0.0, 0.0)
    H, P1, P2, I = first_integrals(equal_pair(1.0, 2.0))
    assert I == pytest.approx(2.0)
    assert H == pytest.approx(-np.log(4.0) / (4 * np.pi))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.floats(0.3, 2.0), st.floats(-2, 2), st.floats(-2, 2)),
                min_size=2, max_size=4))
def test_first_integrals_conserved(rows):
    pos = np.array([[x, y] for _, x, y in rows])
    if len(pos) > 1:
        diff = pos[:, None] - pos[None]
        dist = np.sqrt(np.sum(diff**2, -1)) + np.eye(len(pos)) * 10
        if dist.min() < 0.5:
            return
    alpha = np.array([a for a, _, _ in rows])
    state = PointVortexState(pos, alpha)
    traj = integrate(state, 2.0, tol=1e-10)
    ints = traj.integrals()
    H0 = ints[0, 0]
    if abs(H0) > 1e-3:
        assert np.max(np.abs(ints[:, 0] - H0)) / abs(H0) <= 1e-8
    scale = np.sum(np.abs(alpha)) * (1 + np.max(np.abs(pos)))
    assert np.max(np.abs(ints[:, 1:3] - ints[0, 1:3])) <= 1e-8 * scale
    assert np.max(np.abs(ints[:, 3] - ints[0, 3])) <= 1e-8 * scale**2


def test_rhs_relabeling_invariance(rng):
    pos = rng.normal(size=(4, 2))
    alpha = np.array([1.0, 1.0, -0.5, 2.0])
    v = rhs(PointVortexState(pos, alpha))
    perm = [1, 0, 2, 3]
    vp = rhs(PointVortexState(pos[perm], alpha[perm]))
    assert np.allclose(vp, v[perm], rtol=1e-14)


def test_min_distance_and_turnover():
    traj = integrate(equal_pair(1.0, 2.0), 5.0, tol=1e-13)
    d, T0 = min_distance_and_turnover(traj)
    assert d == pytest.approx(2.0, rel=1e-9)
    assert T0 == pytest.approx(2.0, rel=1e-8)
    with pytest.raises(ValueError):
        min_distance_and_turnover(integrate(PointVortexState([[0, 0]], [1.0]), 1.0))


def test_collision_detected():
    # three vortices with zero angular impulse collapse self-similarly
    a = np.array([2.0, 2.0, -1.0])
    pos = np.array([[-1.0, 0.0], [1.0, 0.0], [1.0, np.sqrt(2.0)]])
    state = PointVortexState(pos, a)
    H, P1, P2, I = first_integrals(state)
    L2 = I - (P1**2 + P2**2) / a.sum()
    assert abs(L2) < 1e-12
    with pytest.raises(CollisionError):
        integrate(state, 1e3, tol=1e-10)


def test_integrate_preconditions():
    with pytest.raises(ValueError):
        integrate(equal_pair(), 0.0)
    with pytest.raises(ValueError):
        integrate(equal_pair(), 1.0, tol=0.0)


def test_read_vortices_and_csv():
    st_ = read_vortices("# alpha x y\n1 0.5 0\n1, -0.5, 0\n\n")
    assert st_.n == 2
    traj = integrate(st_, 1.0, t_eval=np.linspace(0, 1, 5))
    lines = traj.to_csv().splitlines()
    assert lines[0] == "t,x1,y1,x2,y2,H,P1,P2,I"
    assert len(lines) == 6
    with pytest.raises(ValueError):
        read_vortices("1 2\n")
    with pytest.raises(ValueError):
        read_vortices("# nothing\n")
