"""Helmholtz-Kirchhoff point-vortex dynamics.

    dz_i/dt = (1/2pi) sum_{j != i} alpha_j (z_i - z_j)^perp / |z_i - z_j|^2

with the standard first integrals (Hamiltonian, linear impulse, angular
impulse) used as conservation monitors.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .rk import RKSolution, StepSizeError, dopri54


class SingularConfigurationError(ValueError):
    """Two vortices coincide."""


class CollisionError(RuntimeError):
    """Vortices approached closer than the collision floor during integration."""


@dataclass(frozen=True)
class PointVortexState:
    positions: np.ndarray      # (N, 2)
    circulations: np.ndarray   # (N,)
    time: float = 0.0

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        circ = np.array(self.circulations, dtype=float).ravel()
        if len(pos) < 1:
            raise ValueError("need at least one vortex")
        if len(circ) != len(pos):
            raise ValueError("positions and circulations differ in length")
        if np.any(circ == 0):
            raise ValueError("circulations must be nonzero")
        if len(pos) > 1 and min_pairwise_distance(pos) <= 0:
            raise SingularConfigurationError("coincident vortex positions")
        pos.flags.writeable = False
        circ.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "circulations", circ)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self) -> int:
        return len(self.circulations)


def min_pairwise_distance(pos: np.ndarray) -> float:
    pos = np.asarray(pos, dtype=float).reshape(-1, 2)
    if len(pos) < 2:
        return np.inf
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    iu = np.triu_indices(len(pos), 1)
    return float(np.min(dist[iu]))


def _velocities(pos: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    r2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
    np.fill_diagonal(r2, np.inf)
    if np.any(r2 == 0):
        raise SingularConfigurationError("coincident vortex positions")
    w = alpha[None, :] / r2
    u = -np.sum(w * diff[..., 1], axis=1)
    v = np.sum(w * diff[..., 0], axis=1)
    return np.stack([u, v], axis=1) / (2 * np.pi)


def rhs(state: PointVortexState) -> np.ndarray:
    """Velocities of all vortices, shape (N, 2)."""
    return _velocities(state.positions, state.circulations)


def first_integrals(state: PointVortexState):
    """Return (H, P1, P2, I).

    H = -(1/4pi) sum_{i<j} a_i a_j log|z_i - z_j|^2,  P = sum a_i z_i,
    I = sum a_i |z_i|^2.
    """
    pos, a = state.positions, state.circulations
    P = a @ pos
    I = float(np.sum(a * np.sum(pos**2, axis=1)))
    H = 0.0
    if state.n > 1:
        diff = pos[:, None, :] - pos[None, :, :]
        r2 = np.sum(diff**2, axis=-1)
        iu = np.triu_indices(state.n, 1)
        H = float(-np.sum(np.outer(a, a)[iu] * np.log(r2[iu])) / (4 * np.pi))
    return H, float(P[0]), float(P[1]), I


@dataclass
class Trajectory:
    times: np.ndarray
    positions: np.ndarray      # (T, N, 2)
    circulations: np.ndarray
    velocities: np.ndarray     # (T, N, 2), for dense output
    steps: int
    rejected: int

    def state(self, k: int) -> PointVortexState:
        return PointVortexState(self.positions[k], self.circulations, self.times[k])

    @property
    def final(self) -> PointVortexState:
        return self.state(len(self.times) - 1)

    def integrals(self) -> np.ndarray:
        """First integrals at every sample, shape (T, 4)."""
        return np.array([first_integrals(self.state(k)) for k in range(len(self.times))])

    def dense(self, t) -> np.ndarray:
        """Cubic Hermite positions at arbitrary times inside the run."""
        sol = RKSolution(self.times, self.positions.reshape(len(self.times), -1),
                         self.velocities.reshape(len(self.times), -1))
        return sol.hermite(t).reshape(-1, len(self.circulations), 2)

    def to_csv(self) -> str:
        n = len(self.circulations)
        head = ["t"] + [f"{c}{i + 1}" for i in range(n) for c in ("x", "y")] + ["H", "P1", "P2", "I"]
        buf = io.StringIO()
        buf.write(",".join(head) + "\n")
        ints = self.integrals()
        for k, t in enumerate(self.times):
            row = [t, *self.positions[k].ravel(), *ints[k]]
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()


def integrate(state: PointVortexState, t_end: float, tol: float = 1e-10,
              t_eval=None) -> Trajectory:
    """Adaptive Dormand-Prince integration of the point-vortex system."""
    if not t_end > state.time:
        raise ValueError("t_end must exceed the state time")
    if tol <= 0:
        raise ValueError("tol must be positive")
    alpha = state.circulations.copy()
    n = state.n
    floor = 1e-8 * min_pairwise_distance(state.positions) if n > 1 else 0.0

    def fun(t, y):
        return _velocities(y.reshape(n, 2), alpha).ravel()

    def check(t, y):
        if n > 1 and min_pairwise_distance(y.reshape(n, 2)) < floor:
            raise CollisionError(f"vortex collision near t={t:.6g}")

    try:
        sol = dopri54(fun, state.time, state.positions.ravel(), t_end, tol=tol,
                      t_eval=t_eval, check=check, store_all=t_eval is None)
    except StepSizeError as exc:
        # a step collapse next to a near-collision is the collision itself
        if n > 1 and exc.y is not None and \
                min_pairwise_distance(exc.y.reshape(n, 2)) < 1e-3 * min_pairwise_distance(state.positions):
            raise CollisionError(f"vortex collision near t={exc.t:.6g}") from exc
        raise
    T = len(sol.t)
    return Trajectory(sol.t, sol.y.reshape(T, n, 2), alpha, sol.dy.reshape(T, n, 2),
                      sol.steps, sol.rejected)


def min_distance_and_turnover(traj: Trajectory, resample: int = 8):
    """Minimal pairwise distance over the run and the turnover time d^2/sum|alpha|.

    Between accepted steps the positions are resampled ``resample`` times by
    the Hermite interpolant.
    """
    n = len(traj.circulations)
    if n < 2:
        raise ValueError("minimal distance is undefined for a single vortex")
    t = traj.times
    if len(t) > 1:
        frac = np.linspace(0.0, 1.0, resample + 1)[:-1]
        tq = np.concatenate([(t[:-1, None] + frac[None, :] * np.diff(t)[:, None]).ravel(), t[-1:]])
        pos = traj.dense(tq)
    else:
        pos = traj.positions
    d = min(min_pairwise_distance(p) for p in pos)
    return d, d * d / float(np.sum(np.abs(traj.circulations)))


def equal_pair(alpha: float = 1.0, d: float = 1.0) -> PointVortexState:
    """Two vortices of circulation alpha at (+-d/2, 0)."""
    return PointVortexState([[d / 2, 0.0], [-d / 2, 0.0]], [alpha, alpha])


def pair_angular_speed(alpha1: float, alpha2: float, d: float) -> float:
    """Rotation rate (alpha1 + alpha2)/(2 pi d^2) of a co-rotating pair."""
    return (alpha1 + alpha2) / (2 * np.pi * d * d)


def pair_translation_speed(alpha: float, d: float) -> float:
    """Speed |alpha|/(2 pi d) of an opposite-signed pair."""
    return abs(alpha) / (2 * np.pi * d)


def read_vortices(text: str) -> PointVortexState:
    """Parse ``alpha x y`` lines (blank lines and '#' comments ignored)."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"expected 'alpha x y', got {line!r}")
        rows.append([float(v) for v in parts])
    if not rows:
        raise ValueError("no vortices given")
    arr = np.array(rows)
    return PointVortexState(arr[:, 1:], arr[:, 0])
