"""Radially symmetric vorticity profiles and the radial discretization.

A profile is described by a function ``q`` of ``s = |x|^2`` with

    w*(x) = q(|x|^2) / pi,     v*(x) = x^perp Q(|x|^2) / (2 pi |x|^2),

where ``Q(s) = int_0^s q``.  Derived radial functions take the *radius*
``r = |x|`` as argument:

    phi(r) = Q(r^2) / (2 pi r^2),    g(r) = -2 q'(r^2) / pi,

while the weight ``p(s) = -1/q'(s)`` takes ``s``.

Radial tables live on a :class:`RadialGrid`, a uniform grid in an auxiliary
variable ``u`` mapped by ``r = c * log(1 + e^u)``.  The map is geometric near
the origin and uniform for large radii, so the trapezoid rule in ``u`` is
spectrally accurate for integrands that vanish like a power of ``r`` at the
origin and decay at ``r_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import expit

Array = np.ndarray

# stencil widths for the high-order table operations
_DERIV_WIDTH = 9
_CUM_WIDTH = 8
_INTERP_WIDTH = 8


def fornberg_weights(z: float, x: Array, m: int) -> Array:
    """Finite-difference weights for derivatives 0..m at ``z`` on nodes ``x``.

    Returns an array of shape ``(m + 1, len(x))`` (Fornberg 1988).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def _interval_weights(offsets: Array) -> Array:
    """Weights w with sum_j w_j f(o_j) = int_0^1 P(s) ds for the interpolant P."""
    offsets = np.asarray(offsets, dtype=float)
    k = len(offsets)
    vander = np.vander(offsets, k, increasing=True).T
    moments = 1.0 / np.arange(1, k + 1)
    return np.linalg.solve(vander, moments)


class RadialGrid:
    """Mapped radial grid with high-order quadrature, cumulative integration,
    differentiation and interpolation of tables.

    ``weights`` integrate ``f(r) r dr`` over ``(0, r_max)``.
    """

    def __init__(self, r_max: float = 20.0, size: int = 2048,
                 r_min: float = 1e-6, scale: float | None = None):
        if size < 64:
            raise ValueError("radial grid needs at least 64 nodes")
        if not 0.0 < r_min < r_max:
            raise ValueError("need 0 < r_min < r_max")
        self.r_max = float(r_max)
        self.r_min = float(r_min)
        self.size = int(size)
        self.scale = float(scale if scale is not None else r_max / 20.0)
        c = self.scale
        u0 = math.log(math.expm1(r_min / c))
        u1 = math.log(math.expm1(r_max / c))
        self.u = np.linspace(u0, u1, size)
        self.h = self.u[1] - self.u[0]
        self.nodes = c * np.logaddexp(0.0, self.u)
        sig = expit(self.u)
        self.jac = c * sig                      # dr/du
        self.jac2 = c * sig * (1.0 - sig)       # d2r/du2
        self.weights = self.h * self.nodes * self.jac
        for arr in (self.u, self.nodes, self.jac, self.jac2, self.weights):
            arr.flags.writeable = False

    def __repr__(self) -> str:
        return (f"RadialGrid(r_max={self.r_max}, size={self.size}, "
                f"r_min={self.r_min}, scale={self.scale})")

    # -- quadrature ---------------------------------------------------------
    def integrate(self, f: Array) -> float:
        """int_0^inf f(r) r dr for a table ``f`` decaying at both ends."""
        return float(np.dot(self.weights, f))

    @cached_property
    def _cum_matrix(self):
        from scipy import sparse

        m, k = self.size, _CUM_WIDTH
        rows, cols, vals = [], [], []
        cache: dict[int, Array] = {}
        for i in range(m - 1):
            start = min(max(i - k // 2 + 1, 0), m - k)
            shift = i - start
            if shift not in cache:
                cache[shift] = _interval_weights(np.arange(k) - shift)
            rows.extend([i] * k)
            cols.extend(range(start, start + k))
            vals.extend(cache[shift] * self.h)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(m - 1, m))

    def cumulative(self, f: Array, left_power: float = 0.0) -> Array:
        """Running integral ``I(r_k) = int_0^{r_k} f(s) ds`` of a table ``f``.

        ``left_power`` is the exponent ``p`` of the leading behavior
        ``f(s) ds ~ s^(p-1) ds`` near the origin; it fixes the contribution of
        ``(0, r_min)``.  Zero means that piece is dropped.
        """
        f = np.asarray(f, dtype=float)
        integrand = f * self.jac
        out = np.empty_like(integrand)
        out[0] = f[0] * self.r_min / left_power if left_power > 0 else 0.0
        out[1:] = out[0] + np.cumsum(self._cum_matrix @ integrand)
        return out

    def cumulative_from_right(self, f: Array) -> Array:
        """Running integral ``int_{r_k}^{r_max} f(s) ds``."""
        f = np.asarray(f, dtype=float)
        inc = self._cum_matrix @ (f * self.jac)
        out = np.zeros_like(f)
        out[:-1] = np.cumsum(inc[::-1])[::-1]
        return out

    def cumulative_operator(self, left_power: float = 0.0) -> Array:
        """Dense matrix form of :meth:`cumulative` (lower triangular)."""
        m = self.size
        inc = (self._cum_matrix @ np.diag(self.jac))
        mat = np.zeros((m, m))
        mat[1:] = np.cumsum(np.asarray(inc), axis=0)
        if left_power > 0:
            mat[:, 0] += self.r_min / left_power
        return mat

    def cumulative_from_right_operator(self) -> Array:
        m = self.size
        inc = np.asarray(self._cum_matrix @ np.diag(self.jac))
        mat = np.zeros((m, m))
        mat[:-1] = np.cumsum(inc[::-1], axis=0)[::-1]
        return mat

    # -- differentiation ----------------------------------------------------
    @cached_property
    def _du_matrices(self):
        from scipy import sparse

        m, k = self.size, _DERIV_WIDTH
        rows, cols, v1, v2 = [], [], [], []
        cache: dict[int, Array] = {}
        for i in range(m):
            start = min(max(i - k // 2, 0), m - k)
            shift = i - start
            if shift not in cache:
                cache[shift] = fornberg_weights(0.0, np.arange(k) - shift, 2)
            w = cache[shift]
            rows.extend([i] * k)
            cols.extend(range(start, start + k))
            v1.extend(w[1] / self.h)
            v2.extend(w[2] / self.h**2)
        d1 = sparse.csr_matrix((v1, (rows, cols)), shape=(m, m))
        d2 = sparse.csr_matrix((v2, (rows, cols)), shape=(m, m))
        return d1, d2

    def derivative(self, f: Array) -> Array:
        """d f / d r by eighth-order differences in the mapped variable."""
        d1, _ = self._du_matrices
        return (d1 @ np.asarray(f, dtype=float)) / self.jac

    def second_derivative(self, f: Array) -> Array:
        d1, d2 = self._du_matrices
        f = np.asarray(f, dtype=float)
        fu = d1 @ f
        return (d2 @ f - self.jac2 / self.jac * fu) / self.jac**2

    def derivative_operators(self):
        """Sparse (d/dr, d^2/dr^2) matrices."""
        from scipy import sparse

        d1, d2 = self._du_matrices
        inv = sparse.diags(1.0 / self.jac)
        dr1 = inv @ d1
        dr2 = sparse.diags(1.0 / self.jac**2) @ (d2 - sparse.diags(self.jac2 / self.jac) @ d1)
        return dr1.tocsr(), dr2.tocsr()

    # -- interpolation ------------------------------------------------------
    def to_u(self, r: Array) -> Array:
        r = np.asarray(r, dtype=float)
        x = r / self.scale
        # log(expm1(x)) without overflow for large x
        big = x > 30.0
        out = np.empty_like(x)
        out[big] = x[big] + np.log1p(-np.exp(-x[big]))
        out[~big] = np.log(np.expm1(np.maximum(x[~big], 1e-300)))
        return out

    def interpolate(self, table: Array, r: Array, outside: str | float = 0.0) -> Array:
        """Evaluate a table at arbitrary radii by 8-point Lagrange interpolation
        in the mapped variable.

        ``outside`` controls radii beyond ``r_max``: a number is used as a
        constant, ``"power:n"`` continues the table as ``r^-n``.  Radii below
        ``r_min`` take the first table value.
        """
        return self.interpolator(r)(table, outside)

    def interpolator(self, r: Array) -> "TableInterpolator":
        """Precomputed interpolation weights for evaluating many tables at ``r``."""
        return TableInterpolator(self, r)


class TableInterpolator:
    """Lagrange weights of a fixed set of radii, reusable across tables."""

    def __init__(self, grid: RadialGrid, r: Array):
        r = np.asarray(r, dtype=float)
        self.shape = r.shape
        self.r = r.ravel()
        self.r_max = grid.r_max
        self.inside = self.r <= grid.r_max
        ri = np.clip(self.r[self.inside], grid.r_min, grid.r_max)
        s = (grid.to_u(ri) - grid.u[0]) / grid.h
        k = _INTERP_WIDTH
        start = np.clip(np.floor(s).astype(int) - (k // 2 - 1), 0, grid.size - k)
        t = s - start
        lag = np.ones((len(t), k))
        for j in range(k):
            for mm in range(k):
                if mm != j:
                    lag[:, j] *= (t - mm) / (j - mm)
        self.lag = lag
        self.idx = start[:, None] + np.arange(k)[None, :]

    def __call__(self, table: Array, outside: str | float = 0.0) -> Array:
        table = np.asarray(table, dtype=float)
        out = np.empty_like(self.r)
        out[self.inside] = np.einsum("ij,ij->i", self.lag, table[self.idx])
        outer = ~self.inside
        if np.any(outer):
            if isinstance(outside, str) and outside.startswith("power:"):
                n = float(outside.split(":", 1)[1])
                out[outer] = table[-1] * (self.r_max / self.r[outer]) ** n
            else:
                out[outer] = float(outside)
        return out.reshape(self.shape)


@dataclass(frozen=True)
class RadialProfile:
    """Radially symmetric vorticity profile ``w*(x) = q(|x|^2)/pi``.

    ``q``, ``dq``, ``d2q`` are vectorized callables of ``s = |x|^2``.  The
    derivatives are supplied analytically; ``p = -1/q'`` amplifies any
    differentiation noise in Gaussian-like tails.
    """

    q: Callable[[Array], Array]
    dq: Callable[[Array], Array]
    d2q: Callable[[Array], Array]
    Q: Callable[[Array], Array] | None = None
    name: str = "custom"
    r_max: float = 20.0
    n_quad: int = 2048
    params: dict = field(default_factory=dict, compare=False)

    @cached_property
    def grid(self) -> RadialGrid:
        return RadialGrid(r_max=self.r_max, size=self.n_quad)

    def with_grid(self, n_quad: int | None = None, r_max: float | None = None) -> "RadialProfile":
        """Same profile on a different radial discretization."""
        return RadialProfile(self.q, self.dq, self.d2q, self.Q, self.name,
                             r_max if r_max is not None else self.r_max,
                             n_quad if n_quad is not None else self.n_quad,
                             dict(self.params))

    # -- scalar functions of s = |x|^2 ------------------------------------
    def cumulative_Q(self, s) -> Array:
        """Q(s) = int_0^s q."""
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0):
            raise ValueError("cumulative_Q requires s >= 0")
        if self.Q is not None:
            return np.asarray(self.Q(s_arr), dtype=float)
        flat = np.array([integrate.quad(self.q, 0.0, v, epsabs=1e-14, epsrel=1e-13)[0]
                         for v in s_arr.ravel()])
        return flat.reshape(s_arr.shape)

    def Q_over_s(self, s) -> Array:
        """Q(s)/s with the series q(0) + q'(0) s/2 + q''(0) s^2/6 near s = 0."""
        s = np.asarray(s, dtype=float)
        small = s < 1e-6
        out = np.empty_like(s)
        if np.any(small):
            ss = s[small]
            out[small] = (self.q(0.0) + self.dq(0.0) * ss / 2.0
                          + self.d2q(0.0) * ss**2 / 6.0)
        if np.any(~small):
            sl = s[~small]
            out[~small] = self.cumulative_Q(sl) / sl
        return out

    def p(self, s) -> Array:
        """Weight of the space X: p(s) = -1/q'(s)."""
        return -1.0 / np.asarray(self.dq(np.asarray(s, dtype=float)), dtype=float)

    # -- functions of the radius r ------------------------------------------
    def phi(self, r) -> Array:
        r = np.asarray(r, dtype=float)
        return self.Q_over_s(r * r) / (2.0 * np.pi)

    def g(self, r) -> Array:
        r = np.asarray(r, dtype=float)
        return -2.0 * np.asarray(self.dq(r * r), dtype=float) / np.pi

    def dg(self, r) -> Array:
        r = np.asarray(r, dtype=float)
        return -4.0 * r * np.asarray(self.d2q(r * r), dtype=float) / np.pi

    def dphi(self, r) -> Array:
        """phi'(r) = (q(r^2) - Q(r^2)/r^2) / (pi r)."""
        r = np.asarray(r, dtype=float)
        s = r * r
        small = s < 1e-6
        out = np.empty_like(r)
        if np.any(small):
            rs = r[small]
            # q(s) - Q(s)/s = q'(0) s/2 + q''(0) s^2/3 + ...
            out[small] = (self.dq(0.0) * rs / 2.0 + self.d2q(0.0) * rs**3 / 3.0) / np.pi
        if np.any(~small):
            rl, sl = r[~small], s[~small]
            out[~small] = (self.q(sl) - self.Q_over_s(sl)) / (np.pi * rl)
        return out

    def potential(self, r) -> Array:
        """g(r)/phi(r), the term competing with n^2/r^2 in the stream equation."""
        return self.g(r) / self.phi(r)

    def w_star(self, x1, x2) -> Array:
        s = np.asarray(x1) ** 2 + np.asarray(x2) ** 2
        return np.asarray(self.q(s), dtype=float) / np.pi

    def v_star(self, x1, x2):
        """Biot-Savart velocity of w*: x^perp Q(|x|^2)/(2 pi |x|^2)."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        fac = self.Q_over_s(x1**2 + x2**2) / (2.0 * np.pi)
        return -x2 * fac, x1 * fac

    def grad_w_star(self, x1, x2):
        """grad w* = -x g(|x|)."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        gg = self.g(np.hypot(x1, x2))
        return -x1 * gg, -x2 * gg


def make_exponential(gamma: float, n_quad: int = 2048) -> RadialProfile:
    """Profile q(s) = gamma exp(-gamma s); gamma = 1/4 is the Oseen vortex."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    g_ = float(gamma)

    def q(s):
        return g_ * np.exp(-g_ * np.asarray(s, dtype=float))

    def dq(s):
        return -g_ * g_ * np.exp(-g_ * np.asarray(s, dtype=float))

    def d2q(s):
        return g_**3 * np.exp(-g_ * np.asarray(s, dtype=float))

    def Q(s):
        return -np.expm1(-g_ * np.asarray(s, dtype=float))

    # p = exp(gamma s)/gamma^2 must stay finite: gamma r_max^2 = 100
    r_max = math.sqrt(100.0 / g_)
    name = "gaussian" if g_ == 0.25 else f"exponential:{g_:g}"
    return RadialProfile(q, dq, d2q, Q, name=name, r_max=r_max, n_quad=n_quad,
                         params={"gamma": g_})


def make_gaussian(n_quad: int = 2048) -> RadialProfile:
    """The Oseen vortex profile G(x) = exp(-|x|^2/4)/(4 pi)."""
    return make_exponential(0.25, n_quad=n_quad)


def profile_from_name(spec: str, n_quad: int = 2048) -> RadialProfile:
    """Parse ``"gaussian"`` or ``"exponential:<gamma>"``."""
    spec = spec.strip().lower()
    if spec in ("gaussian", "oseen"):
        return make_gaussian(n_quad)
    if spec.startswith("exponential:"):
        return make_exponential(float(spec.split(":", 1)[1]), n_quad)
    raise ValueError(f"unknown profile {spec!r}")


def derived_functions(profile: RadialProfile, r):
    """Return (phi(r), g(r), p(r)); note p takes its argument as s = |x|^2."""
    return profile.phi(r), profile.g(r), profile.p(r)


def cumulative_Q(profile: RadialProfile, r) -> Array:
    return profile.cumulative_Q(r)


@dataclass
class AdmissibilityReport:
    profile: str
    positive: bool
    decreasing: bool
    normalization: float
    sup_ratio: float
    sup_ratio_at: float
    qdecay_max: dict[int, float]
    q2decay_max: dict[int, float]
    qdecay_ok: bool
    q2decay_ok: bool

    @property
    def stability_ok(self) -> bool:
        return self.sup_ratio < 1.0

    @property
    def passed(self) -> bool:
        return (self.positive and self.decreasing and self.stability_ok
                and self.qdecay_ok and self.q2decay_ok
                and abs(self.normalization - 1.0) < 1e-8)

    def to_text(self) -> str:
        lines = [
            f"profile={self.profile}",
            f"positive={self.positive}",
            f"decreasing={self.decreasing}",
            f"normalization={self.normalization:.15g}",
            f"sup_ratio={self.sup_ratio:.15g}",
            f"sup_ratio_at={self.sup_ratio_at:.15g}",
            f"stability_ok={self.stability_ok}",
            f"qdecay_ok={self.qdecay_ok}",
            f"q2decay_ok={self.q2decay_ok}",
        ]
        lines += [f"qdecay_max_k{k}={v:.6g}" for k, v in self.qdecay_max.items()]
        lines += [f"q2decay_max_k{k}={v:.6g}" for k, v in self.q2decay_max.items()]
        lines.append(f"passed={self.passed}")
        return "\n".join(lines) + "\n"


def _decays(vals: Array) -> bool:
    if not np.all(np.isfinite(vals)):
        return False
    peak = np.max(vals)
    return bool(peak == 0.0 or vals[-1] <= 1e-6 * peak)


def check_admissibility(profile: RadialProfile, k_max: int = 12) -> AdmissibilityReport:
    """Evaluate the stability and decay conditions on the sampled range
    ``s = r^2, r in [r_min, r_max]``.

    Decay conditions are judged "bounded" when the weighted ratio at the end of
    the sampled range has fallen to 1e-6 of its maximum; only k <= k_max is
    checked.
    """
    grid = profile.grid
    s = grid.nodes**2
    q = np.asarray(profile.q(s), dtype=float)
    dq = np.asarray(profile.dq(s), dtype=float)
    d2q = np.asarray(profile.d2q(s), dtype=float)
    Q = profile.Q_over_s(s) * s
    ratio = -s**2 * dq / Q
    i = int(np.argmax(ratio))
    mass = 2.0 * grid.integrate(np.asarray(profile.q(s), dtype=float))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        base1 = q**2 / np.abs(dq)
        base2 = d2q**2 / np.abs(dq)
        qd, q2d = {}, {}
        ok1 = ok2 = True
        for k in range(k_max + 1):
            v1 = s**k * base1
            v2 = s**k * base2
            qd[k] = float(np.max(v1))
            q2d[k] = float(np.max(v2))
            ok1 &= _decays(v1)
            ok2 &= _decays(v2)
    return AdmissibilityReport(
        profile=profile.name,
        positive=bool(np.all(q > 0)),
        decreasing=bool(np.all(dq < 0)),
        normalization=mass,
        sup_ratio=float(ratio[i]),
        sup_ratio_at=float(s[i]),
        qdecay_max=qd,
        q2decay_max=q2d,
        qdecay_ok=bool(ok1),
        q2decay_ok=bool(ok2),
    )
