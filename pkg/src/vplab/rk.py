"""Embedded Runge-Kutta 5(4) pair (Dormand-Prince) with adaptive steps.

Used for the point-vortex system and for the radial homogeneous solutions of
the stream equation.  Steps are clipped so that every requested output time
is hit exactly; between accepted steps a cubic Hermite interpolant is
available from the stored derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Dormand-Prince coefficients
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_E = _B5 - _B4


class StepSizeError(RuntimeError):
    """Raised when the adaptive step collapses below the floating-point floor."""

    def __init__(self, message: str, t: float | None = None, y=None):
        super().__init__(message)
        self.t = t
        self.y = y


@dataclass
class RKSolution:
    t: np.ndarray
    y: np.ndarray          # shape (len(t), dim)
    dy: np.ndarray         # derivatives at the stored times
    steps: int = 0
    rejected: int = 0
    events: list = field(default_factory=list)

    def hermite(self, t_query: np.ndarray) -> np.ndarray:
        """Cubic Hermite interpolation between stored samples."""
        tq = np.atleast_1d(np.asarray(t_query, dtype=float))
        i = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[i], self.t[i + 1]
        h = (t1 - t0)[:, None]
        s = ((tq - t0) / (t1 - t0))[:, None]
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return (h00 * self.y[i] + h10 * h * self.dy[i]
                + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1])


def dopri54(fun: Callable[[float, np.ndarray], np.ndarray], t0: float, y0,
            t_end: float, tol: float = 1e-10, t_eval: Sequence[float] | None = None,
            h0: float | None = None, max_step: float = np.inf,
            check: Callable[[float, np.ndarray], None] | None = None,
            store_all: bool = True) -> RKSolution:
    """Integrate ``y' = fun(t, y)`` from ``t0`` to ``t_end`` (either direction).

    The local error estimate of each accepted step satisfies
    ``|err_i| <= tol * max(1, |y_i|)``.  If ``t_eval`` is given, only those
    times (plus ``t0``) are stored and the integrator lands on each exactly;
    otherwise every accepted step is stored.  ``check(t, y)`` runs after each
    accepted step and may raise to abort.
    """
    y = np.array(y0, dtype=float)
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)
    if t_eval is not None:
        targets = np.asarray(t_eval, dtype=float)
        if np.any(np.diff(targets) * direction <= 0):
            raise ValueError("t_eval must be strictly monotone in the integration direction")
    else:
        targets = np.array([t_end])
    t = float(t0)
    f = np.asarray(fun(t, y), dtype=float)
    ts, ys, dys = [t], [y.copy()], [f.copy()]
    if h0 is None:
        scale = np.maximum(1.0, np.abs(y))
        d0 = np.linalg.norm(y / scale) / np.sqrt(y.size)
        d1 = np.linalg.norm(f / scale) / np.sqrt(y.size)
        h0 = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h0 = min(h0, span) if span > 0 else 1e-6
    h = min(abs(h0), max_step)
    steps = rejected = 0
    k = np.empty((7, y.size))
    ti = 0
    # skip targets equal to t0
    while ti < len(targets) and abs(targets[ti] - t) == 0.0:
        ti += 1
    while ti < len(targets):
        target = targets[ti]
        remaining = abs(target - t)
        hit = h >= remaining
        hs = remaining if hit else h
        if hs < 1e-14 * max(1.0, abs(t)):
            if hit:
                t = float(target)
                ts.append(t); ys.append(y.copy()); dys.append(f.copy())
                ti += 1
                continue
            raise StepSizeError(f"step size underflow at t={t}", t, y.copy())
        hd = hs * direction
        k[0] = f
        for s in range(1, 7):
            yi = y + hd * np.dot(_A[s], k[:s])
            k[s] = fun(t + _C[s] * hd, yi)
        y_new = y + hd * np.dot(_B5, k)
        err = hd * np.dot(_E, k)
        sc = tol * np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
        en = float(np.max(np.abs(err) / sc)) if y.size else 0.0
        if en <= 1.0:
            steps += 1
            t = float(target) if hit else t + hd
            y = y_new
            f = k[6].copy()
            if check is not None:
                check(t, y)
            if hit:
                ti += 1
            if store_all or hit:
                ts.append(t); ys.append(y.copy()); dys.append(f.copy())
            fac = 5.0 if en == 0 else min(5.0, 0.9 * en ** -0.2)
            if not hit:
                h = min(hs * fac, max_step)
            else:
                # a clipped step says little about the natural step size
                h = min(max(h, hs * fac), max_step)
        else:
            rejected += 1
            h = hs * max(0.2, 0.9 * en ** -0.2)
    return RKSolution(np.array(ts), np.array(ys), np.array(dys), steps, rejected)
