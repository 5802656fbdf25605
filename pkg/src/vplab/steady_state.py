"""Approximate co-rotating pair of identical vortices at large separation.

One vortex carries the profile

    w = w* + d^-2 w2 + d^-3 w3 + d^-4 w4,

centered at x_d = (d/2, 0); its partner is the point reflection
w(-x - x_d).  In the frame rotating at the rate Om[w] the profile satisfies

    N_d[w](x) = (v(x) - v(-x - 2 x_d) - Om[w] (x + x_d)^perp) . grad w(x) = 0

up to O(d^-5).  Each correction has cosine parity in the angle and solves
a sector problem of the linearized operator:

    Lam w_n + (g/2pi) (-1)^n r^n sin(n theta) = 0,              n = 2, 3,
    Lam w_4 + B(r) sin(4 theta) + C(r) sin(2 theta) = 0.

Rotation rates are dimensionless (alpha = 1, unit core); the laboratory
rate of a pair with circulation alpha and core size eps is alpha Om/eps^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .biot_savart import GridField, GridSpec, biot_savart_grid, spectral_gradient
from .linear_operator import SectorFunction, apply_lambda, inner_product_X, norm_X, solve_sector
from .radial import RadialProfile

N_ANGLES = 256


class CoreOverlapError(ValueError):
    """The two cores of a rescaled pair are not separated."""


class UnresolvedCoreError(ValueError):
    """The radial quadrature does not capture the vortex core."""


def _perp(a1, a2):
    return -a2, a1


def interaction_velocity_V(x, y):
    """V(x, y) = (x + y)^perp/|x + y|^2 - y^perp/|y|^2 (vectorized in x)."""
    x1, x2 = (np.asarray(c, dtype=float) for c in x)
    y1, y2 = float(y[0]), float(y[1])
    s1, s2 = x1 + y1, x2 + y2
    ss = s1**2 + s2**2
    yy = y1**2 + y2**2
    if yy == 0.0:
        raise ValueError("V(x, y) is singular at y = 0")
    if np.any(ss == 0.0):
        raise ValueError("V(x, y) is singular at x = -y")
    p1, p2 = _perp(s1, s2)
    q1, q2 = _perp(y1, y2)
    return p1 / ss - q1 / yy, p2 / ss - q2 / yy


def interaction_velocity_series(x, d: float, terms: int = 12):
    """Power series of V(x, (d, 0)) in r/d, valid for |x| < d."""
    x1, x2 = (np.asarray(c, dtype=float) for c in x)
    r = np.hypot(x1, x2)
    th = np.arctan2(x2, x1)
    v1 = np.zeros_like(r)
    v2 = np.zeros_like(r)
    for n in range(1, terms + 1):
        c = (-r / d) ** n / d
        v1 += c * np.sin(n * th)
        v2 += c * np.cos(n * th)
    return v1, v2


# -- the expansion --------------------------------------------------------------

@dataclass
class CosMode:
    """One correction term a(r) cos(n theta) with stream A(r) cos(n theta)."""

    order: int
    n: int
    a: np.ndarray
    da: np.ndarray
    A: np.ndarray
    dA: np.ndarray


@dataclass
class SteadyPairExpansion:
    profile: RadialProfile
    omega2: SectorFunction
    omega3: SectorFunction
    omega4: tuple                 # (mode-4 part, mode-2 part)
    d: float = 16.0
    alpha: float = 1.0
    modes: list = field(default_factory=list, repr=False)
    orders: tuple = (2, 3, 4)

    def with_d(self, d: float) -> "SteadyPairExpansion":
        if not d > 0:
            raise ValueError("separation must be positive")
        return replace(self, d=float(d))

    def truncated(self, orders) -> "SteadyPairExpansion":
        """Same tables with only the listed correction orders switched on."""
        return replace(self, orders=tuple(orders))

    def active_modes(self):
        return [m for m in self.modes if m.order in self.orders]

    # -- point evaluation --------------------------------------------------------
    def fields(self, x1, x2, need_grad: bool = True):
        """(w, (dw1, dw2), (v1, v2)) of the single-vortex profile at points x."""
        prof = self.profile
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        r = np.hypot(x1, x2)
        th = np.arctan2(x2, x1)
        cos_t, sin_t = np.cos(th), np.sin(th)
        w = prof.w_star(x1, x2)
        v1, v2 = prof.v_star(x1, x2)
        g1 = g2 = None
        if need_grad:
            g1, g2 = prof.grad_w_star(x1, x2)
        modes = self.active_modes()
        if modes:
            it = prof.grid.interpolator(r)
            rs = np.maximum(r, prof.grid.r_min)
            for m in modes:
                scale = self.d ** (-m.order)
                cn, sn = np.cos(m.n * th), np.sin(m.n * th)
                a = it(m.a)
                w = w + scale * a * cn
                A = it(m.A, f"power:{m.n}")
                dA = it(m.dA, f"power:{m.n + 1}")
                ur = -(m.n / rs) * A * sn
                ut = -dA * cn
                v1 = v1 + scale * (ur * cos_t - ut * sin_t)
                v2 = v2 + scale * (ur * sin_t + ut * cos_t)
                if need_grad:
                    gr = it(m.da) * cn
                    gt = -(m.n / rs) * a * sn
                    g1 = g1 + scale * (gr * cos_t - gt * sin_t)
                    g2 = g2 + scale * (gr * sin_t + gt * cos_t)
        return w, (g1, g2), (v1, v2)

    def sector_tables(self):
        """All correction sectors as (order, SectorFunction) pairs."""
        return [(2, self.omega2), (3, self.omega3), (4, self.omega4[0]), (4, self.omega4[1])]


def _cos_mode(profile: RadialProfile, order: int, n: int, source) -> CosMode:
    """Solve Lam(a cos) + source sin = 0 for a."""
    sol = solve_sector(n, source, profile)
    grid = profile.grid
    return CosMode(order, n, sol.a, grid.derivative(sol.a), sol.A, sol.dA)


def build_orders_2_3(profile: RadialProfile, return_modes: bool = False):
    """Corrections w2 = a2 cos(2 theta), w3 = a3 cos(3 theta)."""
    grid = profile.grid
    r = grid.nodes
    g = profile.g(r)
    out = []
    for n in (2, 3):
        source = (-1.0) ** n * r**n * g / (2 * np.pi)
        out.append(_cos_mode(profile, n, n, source))
    sectors = tuple(SectorFunction.cos(m.n, m.a, grid) for m in out)
    if return_modes:
        return sectors, out
    return sectors


def order4_sources(profile: RadialProfile, mode2: CosMode):
    """(B, C) driving the fourth-order correction."""
    r = profile.grid.nodes
    a2, da2, A2, dA2 = mode2.a, mode2.da, mode2.A, mode2.dA
    B1 = (dA2 * a2 - A2 * da2) / r
    B2 = (2 * a2 - r * da2) / (4 * np.pi)
    B = B1 + B2 + r**4 * profile.g(r) / (2 * np.pi)
    C = 2 * a2 / np.pi
    return B, C


def build_order_4(profile: RadialProfile, omega2, return_modes: bool = False):
    """Fourth-order correction a4 cos(4 theta) + a2~ cos(2 theta).

    ``omega2`` is either the :class:`CosMode` of the second order or its
    :class:`SectorFunction` (the stream is then recomputed).
    """
    grid = profile.grid
    if isinstance(omega2, SectorFunction):
        from .linear_operator import poisson_sector

        a2 = omega2.cos_coeff
        if np.any(a2):
            st = poisson_sector(2, a2, grid)
            mode2 = CosMode(2, 2, a2, grid.derivative(a2), st.A, st.dA)
        else:
            z = np.zeros(grid.size)
            mode2 = CosMode(2, 2, z, z, z, z)
    else:
        mode2 = omega2
    B, C = order4_sources(profile, mode2)
    m4 = _cos_mode(profile, 4, 4, B)
    if np.any(C):
        m2 = _cos_mode(profile, 4, 2, C)
    else:
        z = np.zeros(grid.size)
        m2 = CosMode(4, 2, z, z, z, z)
    sectors = (SectorFunction.cos(4, m4.a, grid), SectorFunction.cos(2, m2.a, grid))
    if return_modes:
        return sectors, [m4, m2]
    return sectors


def build_expansion(profile: RadialProfile, d: float = 16.0, alpha: float = 1.0) -> SteadyPairExpansion:
    (w2, w3), modes23 = build_orders_2_3(profile, return_modes=True)
    w4, modes4 = build_order_4(profile, modes23[0], return_modes=True)
    return SteadyPairExpansion(profile, w2, w3, w4, float(d), float(alpha), modes23 + modes4)


def leading_order(profile: RadialProfile, d: float = 16.0) -> SteadyPairExpansion:
    """The expansion with every correction switched off (w = w*)."""
    grid = profile.grid
    z2 = SectorFunction.zeros(2, grid)
    return SteadyPairExpansion(profile, z2, SectorFunction.zeros(3, grid),
                               (SectorFunction.zeros(4, grid), z2), float(d), 1.0, [], ())


def sector_residuals(expansion: SteadyPairExpansion):
    """Relative X-norm residual of each sector equation, keyed by (order, n)."""
    prof = expansion.profile
    grid = prof.grid
    r = grid.nodes
    g = prof.g(r)
    by_key = {(m.order, m.n): m for m in expansion.modes}
    sources = {(n, n): (-1.0) ** n * r**n * g / (2 * np.pi) for n in (2, 3)}
    B, C = order4_sources(prof, by_key[(2, 2)])
    sources[(4, 4)] = B
    sources[(4, 2)] = C
    out = {}
    for key, src in sources.items():
        m = by_key[key]
        src_f = SectorFunction.sin(m.n, src, grid)
        lam = apply_lambda(SectorFunction.cos(m.n, m.a, grid), prof)
        out[key] = norm_X(lam + src_f, prof) / max(norm_X(src_f, prof), 1e-300)
    return out


# -- polar quadrature -----------------------------------------------------------------

@dataclass
class PolarGrid:
    r: np.ndarray
    weights: np.ndarray     # radial weights of f(r) r dr
    theta: np.ndarray

    @property
    def mesh(self):
        R, T = np.meshgrid(self.r, self.theta, indexing="ij")
        return R * np.cos(T), R * np.sin(T)

    def integrate(self, values) -> float:
        """int f dx for values on the (r, theta) mesh."""
        dth = 2 * np.pi / len(self.theta)
        return float(self.weights @ values.sum(axis=1)) * dth


def polar_grid(profile: RadialProfile, n_angles: int = N_ANGLES) -> PolarGrid:
    grid = profile.grid
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    return PolarGrid(grid.nodes, grid.weights, theta)


def _rotation_rate(expansion: SteadyPairExpansion, pg: PolarGrid) -> float:
    d = expansion.d
    X1, X2 = pg.mesh
    w, _, _ = expansion.fields(X1, X2, need_grad=False)
    _, _, (_, v2) = expansion.fields(-X1 - d, -X2, need_grad=False)
    mass = pg.integrate(w)
    if abs(mass - 1.0) > 1e-8:
        raise UnresolvedCoreError(f"radial quadrature captures mass {mass!r}, not 1")
    return -2.0 / d * pg.integrate(v2 * w)


def rotation_rate(obj, d: float | None = None, n_angles: int = N_ANGLES):
    """Dimensionless rotation rate Om[w] and the defect |Om pi d^2 - 1|.

    ``obj`` is a radial profile (w = w*) or a steady pair expansion.
    """
    if isinstance(obj, RadialProfile):
        exp = leading_order(obj, d if d is not None else 16.0)
    else:
        exp = obj if d is None else obj.with_d(d)
    if not exp.d > 0:
        raise ValueError("separation must be positive")
    om = _rotation_rate(exp, polar_grid(exp.profile, n_angles))
    return om, abs(om * np.pi * exp.d**2 - 1.0)


@dataclass
class ResidualReport:
    d: float
    rotation_rate: float
    values: np.ndarray       # on the polar mesh
    polar: PolarGrid
    norm_X: float

    def sector_sin(self, n: int) -> np.ndarray:
        """Radial coefficient of sin(n theta) in the residual."""
        th = self.polar.theta
        return 2.0 / len(th) * self.values @ np.sin(n * th)

    def sector_cos(self, n: int) -> np.ndarray:
        th = self.polar.theta
        return 2.0 / len(th) * self.values @ np.cos(n * th)


def residual_at(expansion: SteadyPairExpansion, x1, x2, omega: float | None = None) -> np.ndarray:
    """Pointwise N_d[w] using the true velocity at the reflected points."""
    d = expansion.d
    if omega is None:
        omega, _ = rotation_rate(expansion)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    _, (g1, g2), (v1, v2) = expansion.fields(x1, x2)
    _, _, (r1, r2) = expansion.fields(-x1 - d, -x2, need_grad=False)
    f1, f2 = _perp(x1 + d / 2, x2)
    return (v1 - r1 - omega * f1) * g1 + (v2 - r2 - omega * f2) * g2


def residual(expansion: SteadyPairExpansion, n_angles: int = N_ANGLES) -> ResidualReport:
    """N_d[w] on the polar mesh and its X-norm."""
    pg = polar_grid(expansion.profile, n_angles)
    omega = _rotation_rate(expansion, pg)
    X1, X2 = pg.mesh
    vals = residual_at(expansion, X1, X2, omega)
    p = expansion.profile.p(pg.r**2)
    norm = np.sqrt(pg.integrate(vals**2 * p[:, None]))
    return ResidualReport(expansion.d, omega, vals, pg, float(norm))


def source_sign_check(profile: RadialProfile, d: float = 16.0) -> float:
    """Ratio of the sin(2 theta) part of d^2 N_d[w*] to +r^2 g/(2 pi).

    A value near +1 confirms the sign used for the second-order source.
    """
    rep = residual(leading_order(profile, d))
    r = rep.polar.r
    target = r**2 * profile.g(r) / (2 * np.pi)
    got = d**2 * rep.sector_sin(2)
    wts = rep.polar.weights * profile.p(r**2)
    return float(np.sum(wts * got * target) / np.sum(wts * target * target))


def kernel_overlaps(expansion: SteadyPairExpansion):
    """<w_n, k>/(|w_n| |k|) against the mode-1 kernel (zero by sector orthogonality)."""
    from .linear_operator import kernel_basis

    out = []
    for _, sec in expansion.sector_tables():
        for k in kernel_basis(expansion.profile):
            if sec.n != k.n:
                out.append(0.0)
            else:   # pragma: no cover - corrections never live in mode 1
                out.append(inner_product_X(sec, k, expansion.profile))
    return out


def moments(expansion: SteadyPairExpansion, n_angles: int = N_ANGLES):
    """(mass, first moments) of each correction by polar quadrature."""
    pg = polar_grid(expansion.profile, n_angles)
    X1, X2 = pg.mesh
    T = np.arctan2(X2, X1)
    out = []
    for _, sec in expansion.sector_tables():
        vals = sec.cos_coeff[:, None] * np.cos(sec.n * T)
        out.append((pg.integrate(vals), pg.integrate(X1 * vals), pg.integrate(X2 * vals)))
    return out


# -- rescaled pair on a grid --------------------------------------------------------------

def rescaled_pair_field(expansion: SteadyPairExpansion, alpha: float, d: float,
                        epsilon: float, spec: GridSpec) -> GridField:
    """(alpha/eps^2) [w_eps((x - x_d)/eps) + w_eps((-x - x_d)/eps)], x_d = (d/2, 0)."""
    if not (epsilon > 0 and d > 0):
        raise ValueError("epsilon and d must be positive")
    if not epsilon < d / 4:
        raise CoreOverlapError("need epsilon < d/4 for separated cores")
    exp = expansion.with_d(d / epsilon)
    X1, X2 = spec.mesh()
    a, _, _ = exp.fields((X1 - d / 2) / epsilon, X2 / epsilon, need_grad=False)
    b, _, _ = exp.fields((-X1 - d / 2) / epsilon, -X2 / epsilon, need_grad=False)
    return GridField(alpha / epsilon**2 * (a + b), spec.L, spec.center)


@dataclass
class PairDefect:
    epsilon: float
    omega_lab: float
    max_defect: float
    max_vorticity: float
    integral: float


def pair_defect(expansion: SteadyPairExpansion, alpha: float, d: float, epsilon: float,
                spec: GridSpec) -> PairDefect:
    """max |(u - Om x^perp) . grad w_eps| with u from the grid Biot-Savart solve."""
    field_ = rescaled_pair_field(expansion, alpha, d, epsilon, spec)
    om, _ = rotation_rate(expansion, d / epsilon)
    om_lab = alpha * om / epsilon**2
    u1, u2 = biot_savart_grid(field_)
    g1, g2 = spectral_gradient(field_)
    X1, X2 = spec.mesh()
    f1, f2 = _perp(X1, X2)
    defect = (u1.values - om_lab * f1) * g1.values + (u2.values - om_lab * f2) * g2.values
    return PairDefect(epsilon, om_lab, float(np.max(np.abs(defect))),
                      float(np.max(np.abs(field_.values))), field_.integral())
