"""The linearized operator around a radial profile, sector by sector.

For a profile ``w*`` the operator is ``Lam w = v* . grad w + K[w] . grad w*``.
It commutes with rotations, so it acts on each angular sector

    w = c(r) cos(n theta) + s(r) sin(n theta)

separately.  With ``A = P_n[a]`` the regular solution of
``-A'' - A'/r + n^2 A/r^2 = a`` and ``L_n a = phi a - g A``,

    Lam (s sin)  =  n L_n[s] cos,        Lam (c cos) = -n L_n[c] sin.

The inverse on sectors n >= 2 goes through the Green's function of the
stream equation with the extra potential ``-g/phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .radial import RadialGrid, RadialProfile
from .rk import dopri54


class KernelObstructionError(ValueError):
    """Inversion requested on a sector where the operator has a kernel."""


class TailConditionError(ValueError):
    """Right-hand side fails the |x|^2 f in X tail condition."""


@dataclass
class SectorFunction:
    """``cos_coeff(r) cos(n theta) + sin_coeff(r) sin(n theta)`` on a radial grid."""

    n: int
    cos_coeff: np.ndarray
    sin_coeff: np.ndarray
    grid: RadialGrid

    def __post_init__(self):
        self.cos_coeff = np.asarray(self.cos_coeff, dtype=float)
        self.sin_coeff = np.asarray(self.sin_coeff, dtype=float)
        if self.n < 0:
            raise ValueError("mode must be nonnegative")
        if self.cos_coeff.shape != (self.grid.size,) or self.sin_coeff.shape != (self.grid.size,):
            raise ValueError("coefficient tables must match the grid")
        if not (np.all(np.isfinite(self.cos_coeff)) and np.all(np.isfinite(self.sin_coeff))):
            raise ValueError("coefficient tables must be finite")
        if self.n == 0 and np.any(self.sin_coeff != 0):
            raise ValueError("mode-0 sector has no sine part")

    @classmethod
    def cos(cls, n, table, grid):
        return cls(n, table, np.zeros(grid.size), grid)

    @classmethod
    def sin(cls, n, table, grid):
        return cls(n, np.zeros(grid.size), table, grid)

    @classmethod
    def zeros(cls, n, grid):
        return cls(n, np.zeros(grid.size), np.zeros(grid.size), grid)

    def __add__(self, other: "SectorFunction") -> "SectorFunction":
        _same_sector(self, other)
        return SectorFunction(self.n, self.cos_coeff + other.cos_coeff,
                              self.sin_coeff + other.sin_coeff, self.grid)

    def __sub__(self, other: "SectorFunction") -> "SectorFunction":
        return self + (-1.0) * other

    def __mul__(self, k: float) -> "SectorFunction":
        return SectorFunction(self.n, k * self.cos_coeff, k * self.sin_coeff, self.grid)

    __rmul__ = __mul__

    def evaluate(self, r, theta) -> np.ndarray:
        """Point values at polar coordinates (tables interpolated in r)."""
        c = self.grid.interpolate(self.cos_coeff, r)
        s = self.grid.interpolate(self.sin_coeff, r)
        return c * np.cos(self.n * theta) + s * np.sin(self.n * theta)

    def to_csv(self) -> str:
        lines = ["r,cos_coeff,sin_coeff"]
        for r, c, s in zip(self.grid.nodes, self.cos_coeff, self.sin_coeff):
            lines.append(f"{r:.17g},{c:.17g},{s:.17g}")
        return "\n".join(lines) + "\n"


def _same_sector(f: SectorFunction, g: SectorFunction):
    if f.n != g.n:
        raise ValueError(f"mode mismatch: {f.n} vs {g.n}")
    if f.grid is not g.grid and f.grid.size != g.grid.size:
        raise ValueError("sector tables live on different grids")


@dataclass
class StreamSector:
    """Radial stream coefficient A_n (and A_n') of one sector."""

    n: int
    A: np.ndarray
    dA: np.ndarray
    grid: RadialGrid

    def regularity(self):
        """Return (max |A/r^n| near 0, max |A r^n| near r_max)."""
        r = self.grid.nodes
        k = max(4, self.grid.size // 50)
        return (float(np.max(np.abs(self.A[:k] / r[:k] ** self.n))),
                float(np.max(np.abs(self.A[-k:] * r[-k:] ** self.n))))


# -- inner product ------------------------------------------------------------

def _weight(profile: RadialProfile) -> np.ndarray:
    r = profile.grid.nodes
    return profile.p(r * r)


def inner_product_X(f: SectorFunction, g: SectorFunction, profile: RadialProfile) -> float:
    """<f, g> = int f g p(|x|^2) dx restricted to one sector."""
    _same_sector(f, g)
    grid = profile.grid
    w = _weight(profile)
    integrand = (f.cos_coeff * g.cos_coeff + f.sin_coeff * g.sin_coeff) * w
    factor = 2 * np.pi if f.n == 0 else np.pi
    return factor * grid.integrate(integrand)


def norm_X(f: SectorFunction, profile: RadialProfile) -> float:
    return float(np.sqrt(max(inner_product_X(f, f, profile), 0.0)))


# -- Poisson problem in one sector --------------------------------------------

def poisson_sector(n: int, a, grid: RadialGrid) -> StreamSector:
    """Regular solution of -A'' - A'/r + n^2 A/r^2 = a by the explicit Green's
    function
        A(r) = (1/2n) [ int_0^r (s/r)^n s a ds + int_r^inf (r/s)^n s a ds ].
    The table ``a`` is assumed to vanish like r^n at the origin.
    """
    if n < 1:
        raise ValueError("poisson_sector needs n >= 1 (mode-0 stream is defined up to a constant)")
    a = np.asarray(a, dtype=float)
    r = grid.nodes
    inner = grid.cumulative(r ** (n + 1) * a, left_power=2 * n + 2)
    outer = grid.cumulative_from_right(r ** (1 - n) * a)
    A = (r ** (-n) * inner + r**n * outer) / (2 * n)
    dA = 0.5 * (-(r ** (-n - 1)) * inner + r ** (n - 1) * outer)
    return StreamSector(n, A, dA, grid)


@lru_cache(maxsize=32)
def _poisson_matrix(n: int, grid: RadialGrid) -> np.ndarray:
    r = grid.nodes
    left = grid.cumulative_operator(left_power=2 * n + 2) * (r ** (n + 1))[None, :]
    right = grid.cumulative_from_right_operator() * (r ** (1 - n))[None, :]
    return ((r ** (-n))[:, None] * left + (r**n)[:, None] * right) / (2 * n)


def poisson_matrix(n: int, grid: RadialGrid) -> np.ndarray:
    """Dense matrix of a -> A_n (same quadrature as :func:`poisson_sector`)."""
    return _poisson_matrix(n, grid)


def sector_L(n: int, a, profile: RadialProfile) -> np.ndarray:
    """L_n a = phi a - g A_n[a]."""
    r = profile.grid.nodes
    A = poisson_sector(n, a, profile.grid).A
    return profile.phi(r) * a - profile.g(r) * A


def sector_L_matrix(n: int, profile: RadialProfile) -> np.ndarray:
    r = profile.grid.nodes
    return np.diag(profile.phi(r)) - profile.g(r)[:, None] * poisson_matrix(n, profile.grid)


def sector_L_matrix_scaled(n: int, profile: RadialProfile) -> np.ndarray:
    """diag(1/g) L_n diag(g): L_n acting on a = g H, expressed in H.

    Dense solves in the variable H keep round-off relative to the Gaussian
    tail, which the weight p of X would otherwise amplify.
    """
    r = profile.grid.nodes
    return np.diag(profile.phi(r)) - poisson_matrix(n, profile.grid) * profile.g(r)[None, :]


def apply_lambda(f: SectorFunction, profile: RadialProfile) -> SectorFunction:
    """Action of the linearized operator on one sector."""
    n = f.n
    if n == 0:
        return SectorFunction.zeros(0, f.grid)
    new_cos = n * sector_L(n, f.sin_coeff, profile)
    new_sin = -n * sector_L(n, f.cos_coeff, profile)
    return SectorFunction(n, new_cos, new_sin, f.grid)


# -- homogeneous solutions and the Green's function ---------------------------

@dataclass
class HomogeneousPair:
    """psi_- = r^n chi_-, psi_+ = r^-n chi_+ solving the homogeneous equation.

    ``scaled_wronskian`` is r W(r)/(2n), constant (= kappa) for exact solutions.
    """

    n: int
    grid: RadialGrid
    chi_minus: np.ndarray
    dchi_minus: np.ndarray
    chi_plus: np.ndarray
    dchi_plus: np.ndarray
    scaled_wronskian: np.ndarray

    @property
    def kappa(self) -> float:
        return float(np.mean(self.scaled_wronskian))

    @property
    def wronskian_spread(self) -> float:
        w = self.scaled_wronskian
        return float((np.max(w) - np.min(w)) / abs(np.mean(w)))

    @property
    def psi_minus(self) -> np.ndarray:
        return self.grid.nodes**self.n * self.chi_minus

    @property
    def psi_plus(self) -> np.ndarray:
        return self.grid.nodes ** (-self.n) * self.chi_plus


def _homogeneous(n: int, grid: RadialGrid, potential, tol: float = 1e-12) -> HomogeneousPair:
    r = grid.nodes
    V0 = float(potential(0.0))

    def fun_minus(t, y):
        return np.array([y[1], -(2 * n + 1) / t * y[1] - potential(t) * y[0]])

    def fun_plus(t, y):
        return np.array([y[1], -(1 - 2 * n) / t * y[1] - potential(t) * y[0]])

    r0 = r[0]
    y0 = [1.0 - V0 * r0**2 / (4 * (n + 1)), -V0 * r0 / (2 * (n + 1))]
    sol_m = dopri54(fun_minus, r0, y0, r[-1], tol=tol, t_eval=r[1:], store_all=False,
                    h0=r0 * 1e-2)
    sol_p = dopri54(fun_plus, r[-1], [1.0, 0.0], r0, tol=tol, t_eval=r[-2::-1],
                    store_all=False, h0=1e-3)
    cm, dcm = sol_m.y[:, 0], sol_m.y[:, 1]
    cp, dcp = sol_p.y[::-1, 0], sol_p.y[::-1, 1]
    scaled = cp * cm + r * (cp * dcm - cm * dcp) / (2 * n)
    return HomogeneousPair(n, grid, cm, dcm, cp, dcp, scaled)


_HOMOG_CACHE: dict = {}


def homogeneous_solutions(n: int, profile: RadialProfile, potential=None) -> HomogeneousPair:
    """Solutions of -A'' - A'/r + (n^2/r^2 - g/phi) A = 0 with
    psi_- ~ r^n at 0 and psi_+ ~ r^-n at infinity (n >= 2).

    ``potential`` overrides g/phi (a callable of the radius).
    """
    if n <= 1:
        raise KernelObstructionError("homogeneous_solutions needs n >= 2")
    if potential is not None:
        return _homogeneous(n, profile.grid, potential)
    key = (id(profile), n)
    hit = _HOMOG_CACHE.get(key)
    if hit is not None and hit[0] is profile:
        return hit[1]

    def pot(t):
        return float(profile.potential(np.array(t)))

    pair = _homogeneous(n, profile.grid, pot)
    _HOMOG_CACHE[key] = (profile, pair)
    return pair


def check_potential_positive(n: int, profile: RadialProfile) -> bool:
    r = profile.grid.nodes
    return bool(np.all(n * n / r**2 - profile.potential(r) > 0))


def check_tail(b, profile: RadialProfile, rel: float = 1e-10) -> None:
    """Raise unless int r^4 b^2 p(r^2) r dr is finite with negligible tail."""
    grid = profile.grid
    r = grid.nodes
    with np.errstate(over="ignore", invalid="ignore"):
        integrand = r**4 * np.asarray(b) ** 2 * profile.p(r * r) * grid.weights
    if not np.all(np.isfinite(integrand)):
        raise TailConditionError("|x|^2 f is not in X (non-finite weighted integrand)")
    total = float(np.sum(integrand))
    tail = float(np.sum(integrand[-grid.size // 10:]))
    if total > 0 and tail > rel * total:
        raise TailConditionError(f"|x|^2 f fails the X tail test (tail fraction {tail / total:.3g})")


@dataclass
class SectorSolution:
    """Solution of n L_n a = b: the vorticity table a and its stream A, A'."""

    a: np.ndarray
    A: np.ndarray
    dA: np.ndarray


def solve_sector(n: int, b, profile: RadialProfile) -> SectorSolution:
    """Solve n (phi a - g A_n[a]) = b for n >= 2 through

        A = psi_+ int_0^r psi_- h / W + psi_- int_r^inf psi_+ h / W,
        a = (g/phi) A + h,        h = b / (n phi).
    """
    if n <= 1:
        raise KernelObstructionError("sector inversion needs n >= 2")
    b = np.asarray(b, dtype=float)
    grid = profile.grid
    r = grid.nodes
    pair = homogeneous_solutions(n, profile)
    kappa = pair.kappa
    h = b / (n * profile.phi(r))
    inner = grid.cumulative(r ** (n + 1) * pair.chi_minus * h, left_power=2 * n + 2)
    outer = grid.cumulative_from_right(r ** (1 - n) * pair.chi_plus * h)
    psi_p = r ** (-n) * pair.chi_plus
    psi_m = r**n * pair.chi_minus
    dpsi_p = -n * r ** (-n - 1) * pair.chi_plus + r ** (-n) * pair.dchi_plus
    dpsi_m = n * r ** (n - 1) * pair.chi_minus + r**n * pair.dchi_minus
    A = (psi_p * inner + psi_m * outer) / (2 * n * kappa)
    dA = (dpsi_p * inner + dpsi_m * outer) / (2 * n * kappa)
    a = profile.potential(r) * A + h
    return SectorSolution(a, A, dA)


def invert_lambda(f: SectorFunction, profile: RadialProfile) -> SectorFunction:
    """Unique w in the sector with Lam w = f (modes n >= 2).

    f = b cos(n theta) gives w = a sin(n theta); f = b sin(n theta) gives
    w = -a cos(n theta), where n L_n a = b.
    """
    n = f.n
    if n <= 1:
        raise KernelObstructionError(
            f"mode {n} intersects the kernel; use invert_lambda_mode1 for n = 1")
    check_tail(f.cos_coeff, profile)
    check_tail(f.sin_coeff, profile)
    grid = f.grid
    sin_part = solve_sector(n, f.cos_coeff, profile).a if np.any(f.cos_coeff) else np.zeros(grid.size)
    cos_part = -solve_sector(n, f.sin_coeff, profile).a if np.any(f.sin_coeff) else np.zeros(grid.size)
    return SectorFunction(n, cos_part, sin_part, grid)


# -- kernel ---------------------------------------------------------------------

def kernel_basis(profile: RadialProfile):
    """d1 w* = -r g cos(theta), d2 w* = -r g sin(theta)."""
    grid = profile.grid
    r = grid.nodes
    k = -r * profile.g(r)
    return [SectorFunction.cos(1, k, grid), SectorFunction.sin(1, k, grid)]


_MODE1_CACHE: dict = {}


def _mode1_system(profile: RadialProfile):
    hit = _MODE1_CACHE.get(id(profile))
    if hit is not None and hit[0] is profile:
        return hit[1]
    from scipy.linalg import lu_factor

    grid = profile.grid
    r = grid.nodes
    m = grid.size
    # unknown H with a = g H; the kernel direction r g becomes H = r
    kw = np.pi * r * profile.g(r) ** 2 * _weight(profile) * grid.weights
    big = np.zeros((m + 1, m + 1))
    big[:m, :m] = sector_L_matrix_scaled(1, profile)
    big[:m, m] = r / r[-1]
    big[m, :m] = kw / np.max(np.abs(kw))
    lu = lu_factor(big)
    _MODE1_CACHE[id(profile)] = (profile, lu)
    return lu


def invert_lambda_mode1(f: SectorFunction, profile: RadialProfile, rel: float = 1e-8) -> SectorFunction:
    """Solution orthogonal to the kernel for a mode-1 right-hand side that is
    itself orthogonal to the kernel.  Solved as a bordered system: the
    discrete L_1 plus one Lagrange multiplier per parity enforcing
    orthogonality to r g(r).  Unknowns are scaled by g (see
    :func:`sector_L_matrix_scaled`).
    """
    from scipy.linalg import lu_solve

    if f.n != 1:
        raise ValueError("invert_lambda_mode1 needs a mode-1 sector")
    nf = norm_X(f, profile)
    for kb in kernel_basis(profile):
        if abs(inner_product_X(f, kb, profile)) > rel * nf * norm_X(kb, profile):
            raise KernelObstructionError("right-hand side is not orthogonal to the kernel")
    check_tail(f.cos_coeff, profile)
    check_tail(f.sin_coeff, profile)
    lu = _mode1_system(profile)
    m = f.grid.size

    g = profile.g(f.grid.nodes)

    def solve(b):
        if not np.any(b):
            return np.zeros(m)
        return g * lu_solve(lu, np.concatenate([b / g, [0.0]]))[:m]

    sin_part = solve(f.cos_coeff)
    cos_part = -solve(f.sin_coeff)
    return SectorFunction(1, cos_part, sin_part, f.grid)
