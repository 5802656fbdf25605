"""First viscous correction of a co-rotating pair profile.

In self-similar variables xi = x/sqrt(nu t) around one vortex, the mode-2
correction F_nu solves

    (nu/alpha) (1 - L) F + Lam F + A = 0,   A = r^2 g(r) sin(2 theta)/(2 pi),

with L = Lap + xi.grad/2 + 1 the Fokker-Planck operator and Lam the
operator linearized at the Gaussian.  Writing F = c cos(2 theta) + s sin(2 theta)
and K = 1 - L restricted to mode 2 gives the coupled radial system

    eps K c + 2 L_2 s = 0,
    eps K s - 2 L_2 c = -r^2 g/(2 pi),          eps = nu/alpha.

At eps = 0 this is the inviscid second-order correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .biot_savart import GridField, GridSpec, oseen_profile
from .linear_operator import SectorFunction, sector_L_matrix_scaled, solve_sector
from .radial import RadialProfile, make_gaussian

MODE = 2


class SingularSystemError(RuntimeError):
    """The discrete system is numerically singular."""


class DivergentTailError(ValueError):
    """A weighted norm does not converge on the sampled domain."""


@dataclass
class ViscousCorrection:
    nu: float
    alpha: float
    F_nu: SectorFunction
    residual: float          # relative, of the discrete system
    rcond: float             # reciprocal 1-norm condition estimate

    @property
    def ratio(self) -> float:
        return self.nu / self.alpha


def fokker_planck_matrix(grid, n: int = MODE) -> np.ndarray:
    """Dense K = 1 - L on mode n: -a'' - a'/r + n^2 a/r^2 - (r/2) a'."""
    d1, d2 = grid.derivative_operators()
    r = grid.nodes
    d1 = d1.toarray()
    d2 = d2.toarray()
    return -d2 - (1.0 / r + r / 2.0)[:, None] * d1 + np.diag(n * n / r**2)


def fokker_planck_matrix_scaled(grid, n: int = MODE) -> np.ndarray:
    """K conjugated by exp(-r^2/4): for a = exp(-r^2/4) H,
    K a = exp(-r^2/4) (-H'' - H'/r + (r/2) H' + H + n^2 H/r^2)."""
    d1, d2 = grid.derivative_operators()
    r = grid.nodes
    d1 = d1.toarray()
    d2 = d2.toarray()
    return -d2 + (r / 2.0 - 1.0 / r)[:, None] * d1 + np.diag(1.0 + n * n / r**2)


def mode2_source(profile: RadialProfile) -> np.ndarray:
    r = profile.grid.nodes
    return r**2 * profile.g(r) / (2 * np.pi)


def solve_F_nu(nu: float, alpha: float = 1.0, profile: RadialProfile | None = None,
               source_scale: float = 1.0) -> ViscousCorrection:
    """Mode-2 correction F_nu for viscosity ``nu`` and circulation ``alpha``."""
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if profile is None:
        profile = make_gaussian()
    if profile.name != "gaussian":
        raise ValueError("the viscous correction is defined for the Gaussian profile only")
    grid = profile.grid
    m = grid.size
    S = source_scale * mode2_source(profile)
    eps = nu / alpha
    if eps == 0.0:
        c = solve_sector(MODE, S, profile).a if np.any(S) else np.zeros(m)
        F = SectorFunction(MODE, c, np.zeros(m), grid)
        return ViscousCorrection(nu, alpha, F, 0.0, np.nan)
    # unknowns H = F/g; for the Gaussian g = exp(-r^2/4)/(8 pi)
    g = profile.g(grid.nodes)
    Lm = 2.0 * sector_L_matrix_scaled(MODE, profile)
    K = eps * fokker_planck_matrix_scaled(grid)
    big = np.block([[K, Lm], [-Lm, K]])
    rhs = np.concatenate([np.zeros(m), -S / g])
    # Dirichlet rows at both ends for each parity
    for row in (0, m - 1, m, 2 * m - 1):
        big[row, :] = 0.0
        big[row, row] = 1.0
        rhs[row] = 0.0
    # equilibrate rows: near the origin K is of size 1/(h r)^2
    scale = 1.0 / np.max(np.abs(big), axis=1)
    big *= scale[:, None]
    rhs = rhs * scale
    anorm = np.linalg.norm(big, 1)
    lu, piv = linalg.lu_factor(big, check_finite=False)
    rcond, info = linalg.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond > 1e-15:
        raise SingularSystemError(f"discrete viscous system is singular (rcond={rcond:.3g})")
    x = linalg.lu_solve((lu, piv), rhs, check_finite=False)
    res = np.linalg.norm(big @ x - rhs) / max(np.linalg.norm(rhs), 1e-300)
    F = SectorFunction(MODE, g * x[:m], g * x[m:], grid)
    return ViscousCorrection(nu, alpha, F, float(res), float(rcond))


# -- approximate pair profile --------------------------------------------------------

@dataclass
class WApp:
    """w_app(xi) = G(xi) + (nu t/d^2) F_nu(xi)."""

    F: SectorFunction
    tau: float                      # nu t / d^2

    def __call__(self, xi1, xi2) -> np.ndarray:
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        base = oseen_profile(xi1, xi2)
        if self.tau == 0.0:
            return base
        r = np.hypot(xi1, xi2)
        th = np.arctan2(xi2, xi1)
        return base + self.tau * self.F.evaluate(r, th)

    def on_grid(self, spec: GridSpec) -> GridField:
        X1, X2 = spec.mesh()
        return GridField(self(X1, X2), spec.L, spec.center)


def w_app(nu: float, alpha: float, d: float, t: float, F_nu) -> WApp:
    if not t > 0:
        raise ValueError("t must be positive")
    if not (d > 0 and nu >= 0 and alpha > 0):
        raise ValueError("need d > 0, nu >= 0 and alpha > 0")
    F = F_nu.F_nu if isinstance(F_nu, ViscousCorrection) else F_nu
    return WApp(F, nu * t / d**2)


# -- exponentially weighted norm ------------------------------------------------------

def z_beta_norm(f: GridField, beta: float = 1.0) -> float:
    """(int |f|^2 exp(beta |xi|) dxi)^(1/2) by grid quadrature."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    X1, X2 = f.spec.mesh()
    rho = np.hypot(X1 - f.center[0], X2 - f.center[1])
    integrand = f.values**2 * np.exp(beta * rho)
    peak = float(np.max(integrand))
    if peak == 0.0:
        return 0.0
    o = np.abs(f.spec.offsets()) >= 0.9 * f.L
    frame = o[:, None] | o[None, :]
    if float(np.max(integrand[frame])) > 1e-6 * peak:
        raise DivergentTailError("weighted integrand does not decay on the box frame")
    return float(np.sqrt(np.sum(integrand) * f.h**2))


def z_beta_norm_radial(table, n: int, grid, beta: float = 1.0) -> float:
    """Same norm for a(r) cos(n theta) (or sin) given by a radial table."""
    r = grid.nodes
    ang = 2 * np.pi if n == 0 else np.pi
    return float(np.sqrt(ang * grid.integrate(np.asarray(table) ** 2 * np.exp(beta * r))))
