"""Free-space Biot-Savart velocities for vorticity sampled on a square grid.

The stream function solves -Lap psi = w on the whole plane, psi = G * w with
G(x) = -log|x|/(2 pi).  The convolution is evaluated on a doubled grid with
the spectrally truncated kernel of Vico, Greengard and Ferrando: G cut off at
a radius R larger than the box diagonal has the smooth transform

    G_R^(k) = (1 - J0(kR))/k^2 - R log(R) J1(kR)/k,

so a box-sized FFT gives the aperiodic convolution to spectral accuracy.
Velocity u = (d2 psi, -d1 psi), i.e. u = K[w] with the (x - y)^perp kernel.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy import special

MAGIC = b"VPF1"
_HEADER = struct.Struct("<4siddd")   # 32 bytes


class FrameTruncationWarning(UserWarning):
    """Vorticity on the outer frame is not negligible."""


class FrameTruncationError(ValueError):
    """Vorticity on the outer frame is too large for a free-space solve."""


class ResolutionError(ValueError):
    """Grid too coarse for the requested field."""


@dataclass(frozen=True)
class GridSpec:
    """Square box [c - L, c + L)^2 sampled at n x n cell centers."""

    n: int
    L: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.n < 16 or self.n % 2:
            raise ValueError("grid size n must be even and >= 16")
        if not self.L > 0:
            raise ValueError("box half-width L must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    def offsets(self) -> np.ndarray:
        """Cell-center offsets from the box center, exactly antisymmetric."""
        half = (np.arange(self.n // 2) + 0.5) * self.h
        return np.concatenate([-half[::-1], half])

    def axes(self):
        o = self.offsets()
        return self.center[0] + o, self.center[1] + o

    def mesh(self):
        """(X1, X2) with X1[i, j] = x_i, X2[i, j] = y_j."""
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")


@dataclass(frozen=True)
class GridField:
    """Scalar samples ``values[i, j] = f(x_i, y_j)`` on a :class:`GridSpec` box."""

    values: np.ndarray
    L: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("values must be a square array")
        GridSpec(v.shape[0], self.L, self.center)   # validates n and L
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.n, self.L, self.center)

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.h**2

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values))) * self.h**2

    def with_values(self, values) -> "GridField":
        return GridField(values, self.L, self.center)

    def reflect_x2(self) -> np.ndarray:
        """Samples of f(x1, -x2) (exact for a centered box)."""
        return self.values[:, ::-1]

    def reflect_origin(self) -> np.ndarray:
        """Samples of f(-x) (exact for a centered box)."""
        return self.values[::-1, ::-1]

    # -- I/O -------------------------------------------------------------------
    def to_bytes(self) -> bytes:
        head = _HEADER.pack(MAGIC, self.n, self.L, self.center[0], self.center[1])
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "GridField":
        if len(data) < _HEADER.size:
            raise ValueError("truncated grid field header")
        magic, n, L, cx, cy = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError("not a grid field dump")
        body = data[_HEADER.size:]
        if len(body) != 8 * n * n:
            raise ValueError("grid field body has the wrong length")
        values = np.frombuffer(body, dtype="<f8").reshape(n, n)
        return cls(values.copy(), L, (cx, cy))

    def dump(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "GridField":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def slice_csv(self, axis: int = 0, index: int | None = None) -> str:
        """1-D slice: ``axis=0`` varies x1 at fixed column ``index``."""
        x, y = self.spec.axes()
        if index is None:
            index = self.n // 2
        if axis == 0:
            coord, vals, name = x, self.values[:, index], "x1"
        else:
            coord, vals, name = y, self.values[index, :], "x2"
        lines = [f"{name},value"] + [f"{c:.17g},{v:.17g}" for c, v in zip(coord, vals)]
        return "\n".join(lines) + "\n"


# -- kernels ---------------------------------------------------------------------

def truncated_green_hat(k: np.ndarray, R: float) -> np.ndarray:
    """Fourier transform of -log|x|/(2 pi) restricted to |x| < R."""
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    small = k * R < 1e-3
    kk = k[~small]
    out[~small] = ((1.0 - special.j0(kk * R)) / kk**2
                   - R * np.log(R) * special.j1(kk * R) / kk)
    # Taylor expansion where 1 - J0 cancels
    k2 = k[small] ** 2
    logR = np.log(R)
    out[small] = R * R * (0.25 - 0.5 * logR) + k2 * R**4 * (logR / 16.0 - 1.0 / 64.0)
    return out


@lru_cache(maxsize=8)
def _kernels(n: int, L: float):
    """rfft2 of the stream and velocity kernels on the 2n doubled grid."""
    h = 2.0 * L / n
    m = 4 * n
    R = 1.05 * np.sqrt(2.0) * 2.0 * L
    k1 = 2 * np.pi * sfft.fftfreq(m, d=h)
    K1, K2 = np.meshgrid(k1, k1, indexing="ij")
    ghat = truncated_green_hat(np.hypot(K1, K2), R)
    out = []
    for mult in (1.0, 1j * K2, -1j * K1):   # psi, u1 = d2 psi, u2 = -d1 psi
        kern = sfft.ifft2(mult * ghat, workers=-1).real
        # displacements -n..n-1 wrapped onto the 2n grid
        idx = np.r_[0:n, m - n:m]
        small = kern[np.ix_(idx, idx)]
        out.append(sfft.rfft2(small, workers=-1))
    return tuple(out)


def frame_ratio(field: GridField, band: float = 0.1) -> float:
    """max |w| on the outer band of the box relative to max |w|."""
    v = np.abs(field.values)
    peak = float(np.max(v))
    if peak == 0.0:
        return 0.0
    o = np.abs(field.spec.offsets()) >= (1.0 - band) * field.L
    mask = o[:, None] | o[None, :]
    return float(np.max(v[mask])) / peak


def check_frame(field: GridField, warn_at: float = 1e-8, fail_at: float = 1e-3) -> float:
    ratio = frame_ratio(field)
    if ratio > fail_at:
        raise FrameTruncationError(f"vorticity on the box frame is {ratio:.3g} of its peak")
    if ratio > warn_at:
        warnings.warn(f"vorticity on the box frame is {ratio:.3g} of its peak",
                      FrameTruncationWarning, stacklevel=3)
    return ratio


def _padded_forward(values: np.ndarray) -> np.ndarray:
    """rfft2 of ``values`` zero-padded to 2n x 2n, skipping the zero rows."""
    n = values.shape[0]
    rows = sfft.rfft(values, n=2 * n, axis=1, workers=-1)
    return sfft.fft(rows, n=2 * n, axis=0, workers=-1)


def _padded_inverse(spec: np.ndarray, n: int) -> np.ndarray:
    """Top-left n x n block of irfft2 on the doubled grid."""
    cols = sfft.ifft(spec, axis=0, workers=-1)[:n]
    return sfft.irfft(cols, n=2 * n, axis=1, workers=-1)[:, :n]


def _convolve(values: np.ndarray, kern_hat: np.ndarray) -> np.ndarray:
    return _padded_inverse(_padded_forward(values) * kern_hat, values.shape[0])


def velocity_arrays(values: np.ndarray, L: float):
    """(u1, u2) arrays for vorticity samples on a centered or shifted box."""
    n = values.shape[0]
    _, k1, k2 = _kernels(n, float(L))
    fw = _padded_forward(values)
    return _padded_inverse(fw * k1, n), _padded_inverse(fw * k2, n)


def biot_savart_grid(omega: GridField, check: bool = True):
    """Free-space velocity (u1, u2) of gridded vorticity."""
    if check:
        check_frame(omega)
    u1, u2 = velocity_arrays(omega.values, omega.L)
    return omega.with_values(u1), omega.with_values(u2)


def stream_function(omega: GridField, check: bool = True) -> GridField:
    if check:
        check_frame(omega)
    kpsi, _, _ = _kernels(omega.n, omega.L)
    return omega.with_values(_convolve(omega.values, kpsi))


def spectral_gradient(field: GridField):
    """(d1 f, d2 f) by FFT on the box (the field must vanish at the frame)."""
    n = field.n
    k = 2 * np.pi * sfft.fftfreq(n, d=field.h)
    kr = 2 * np.pi * sfft.rfftfreq(n, d=field.h)
    fh = sfft.rfft2(field.values, workers=-1)
    k_i = k.copy()
    k_j = kr.copy()
    # the Nyquist mode of an even grid has no derivative partner
    k_i[n // 2] = 0.0
    k_j[-1] = 0.0
    d1 = sfft.irfft2(1j * k_i[:, None] * fh, s=(n, n), workers=-1)
    d2 = sfft.irfft2(1j * k_j[None, :] * fh, s=(n, n), workers=-1)
    return field.with_values(d1), field.with_values(d2)


# -- Oseen vortices ----------------------------------------------------------------

def oseen_profile(xi1, xi2) -> np.ndarray:
    """G(xi) = exp(-|xi|^2/4)/(4 pi)."""
    return np.exp(-(np.asarray(xi1) ** 2 + np.asarray(xi2) ** 2) / 4.0) / (4.0 * np.pi)


def oseen_vorticity(alpha, nu, t, x1, x2, center=(0.0, 0.0)) -> np.ndarray:
    s = np.sqrt(nu * t)
    return alpha / (nu * t) * oseen_profile((np.asarray(x1) - center[0]) / s,
                                            (np.asarray(x2) - center[1]) / s)


def oseen_velocity(alpha, nu, t, x1, x2, center=(0.0, 0.0)):
    """Closed-form velocity alpha x^perp/(2 pi |x|^2) (1 - exp(-|x|^2/(4 nu t)))."""
    y1 = np.asarray(x1, dtype=float) - center[0]
    y2 = np.asarray(x2, dtype=float) - center[1]
    r2 = y1**2 + y2**2
    z = r2 / (4.0 * nu * t)
    with np.errstate(invalid="ignore", divide="ignore"):
        fac = np.where(r2 > 0, -np.expm1(-z) / r2, 1.0 / (4.0 * nu * t))
    fac = alpha * fac / (2.0 * np.pi)
    return -y2 * fac, y1 * fac


def oseen_field(alpha: float, nu: float, t: float, center, spec: GridSpec) -> GridField:
    """Sampled Lamb-Oseen vortex alpha/(nu t) G((x - center)/sqrt(nu t))."""
    if not (nu > 0 and t > 0):
        raise ValueError("nu and t must be positive")
    if np.sqrt(nu * t) < 2.0 * spec.h:
        raise ResolutionError("Oseen core is narrower than two grid cells")
    X1, X2 = spec.mesh()
    return GridField(oseen_vorticity(alpha, nu, t, X1, X2, center), spec.L, spec.center)
