"""Sampled complex functions on uniform 2-D grids and spectral operator application."""

from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .algebra import WeylOp

MAGIC = b"WGK1"


def _workers() -> int:
    v = os.environ.get("WCK_THREADS")
    return max(1, int(v)) if v else 1


def fft2(a: np.ndarray) -> np.ndarray:
    return sfft.fft2(a, workers=_workers())


def ifft2(a: np.ndarray) -> np.ndarray:
    return sfft.ifft2(a, workers=_workers())


@dataclass(frozen=True, eq=False)
class Grid2:
    """N x N samples on [-Lx, Lx) x [-Ly, Ly); row index = first coordinate.

    ``kind`` records what the axes mean: "space" for ordinary functions,
    "wig" for outputs of the Wigner transform (second axis is the frequency
    variable, and ``Ly = pi N / (4 Lx)``), "freq" for centred DFT lattices.
    """

    values: np.ndarray
    Lx: float
    Ly: float | None = None
    kind: str = "space"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("values must be a square N x N array")
        N = v.shape[0]
        if N < 8 or N & (N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {N}")
        if self.Ly is None:
            object.__setattr__(self, "Ly", float(self.Lx))
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError("half-widths must be positive")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, f, N: int = 256, L: float = 12.0) -> "Grid2":
        """Sample ``f(X, Y)`` (vectorised) on the square grid."""
        x = -L + 2 * L / N * np.arange(N)
        X, Y = np.meshgrid(x, x, indexing="ij")
        return cls(np.asarray(f(X, Y), dtype=complex) * np.ones_like(X), L)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def dx(self) -> float:
        return 2 * self.Lx / self.N

    @property
    def dy(self) -> float:
        return 2 * self.Ly / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.Lx + self.dx * np.arange(self.N)

    @property
    def y(self) -> np.ndarray:
        return -self.Ly + self.dy * np.arange(self.N)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def freqs(self) -> tuple[np.ndarray, np.ndarray]:
        """Angular DFT frequencies (FFT ordering) for both axes."""
        return (2 * np.pi * np.fft.fftfreq(self.N, self.dx),
                2 * np.pi * np.fft.fftfreq(self.N, self.dy))

    def with_values(self, values: np.ndarray, **changes) -> "Grid2":
        kw = dict(Lx=self.Lx, Ly=self.Ly, kind=self.kind, meta=dict(self.meta))
        kw.update(changes)
        return Grid2(values, **kw)

    def same_axes(self, other: "Grid2") -> bool:
        return (self.N == other.N and self.kind == other.kind
                and np.isclose(self.Lx, other.Lx) and np.isclose(self.Ly, other.Ly))

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "Grid2") -> "Grid2":
        if not self.same_axes(other):
            raise ValueError("grid axes differ")
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "Grid2") -> "Grid2":
        if not self.same_axes(other):
            raise ValueError("grid axes differ")
        return self.with_values(self.values - other.values)

    def __mul__(self, c) -> "Grid2":
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def norm(self) -> float:
        """Continuous L2 norm approximated by the rectangle rule."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.dx * self.dy))

    def interior(self, band: float = 2.0) -> np.ndarray:
        X, Y = self.mesh()
        return (np.abs(X) <= self.Lx - band) & (np.abs(Y) <= self.Ly - band)

    # file formats -------------------------------------------------------------
    def save(self, path: str | Path) -> None:
        """Binary format: magic WGK1, u32 N, f64 L, then N*N (re, im) f64 pairs row-major."""
        if self.kind != "space" or self.Lx != self.Ly:
            raise ValueError("binary format stores square space-domain grids only")
        data = np.empty((self.N, self.N, 2), dtype="<f8")
        data[..., 0] = self.values.real
        data[..., 1] = self.values.imag
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", self.N))
            fh.write(struct.pack("<d", self.Lx))
            fh.write(data.tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "Grid2":
        raw = Path(path).read_bytes()
        if raw[:4] != MAGIC:
            raise ValueError("not a WGK1 grid file")
        (N,) = struct.unpack("<I", raw[4:8])
        (L,) = struct.unpack("<d", raw[8:16])
        data = np.frombuffer(raw[16:], dtype="<f8")
        if data.size != 2 * N * N:
            raise ValueError("truncated grid file")
        data = data.reshape(N, N, 2)
        return cls(data[..., 0] + 1j * data[..., 1], L)

    def to_csv(self, path: str | Path) -> None:
        X, Y = self.mesh()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "re", "im"])
            for xv, yv, v in zip(X.ravel(), Y.ravel(), self.values.ravel()):
                w.writerow([repr(float(xv)), repr(float(yv)), repr(float(v.real)), repr(float(v.imag))])


def apply_op(B: WeylOp, w: Grid2) -> Grid2:
    """Apply B(M1, M2, D1, D2) to sampled data.

    Derivatives are spectral (D multiplies the DFT by the angular frequency);
    the coordinate factors of each normal-ordered term are applied last.
    Terms sharing the coordinate part (m, n) share one inverse FFT.
    """
    if B.is_zero:
        return w.with_values(np.zeros_like(w.values))
    xi, eta = w.freqs()
    x, y = w.x, w.y
    groups: dict[tuple[int, int], dict[tuple[int, int], complex]] = {}
    for (m, n, h, k), c in B.terms.items():
        groups.setdefault((m, n), {})[(h, k)] = c
    hmax = max(h for h, _ in (hk for g in groups.values() for hk in g))
    kmax = max(k for _, k in (hk for g in groups.values() for hk in g))
    Vxi = xi[:, None] ** np.arange(hmax + 1)[None, :]
    Veta = eta[:, None] ** np.arange(kmax + 1)[None, :]
    spec = None
    out = np.zeros_like(w.values)
    for (m, n), items in sorted(groups.items()):
        if set(items) == {(0, 0)}:
            part = items[(0, 0)] * w.values
        else:
            if spec is None:
                spec = fft2(w.values)
            C = np.zeros((hmax + 1, kmax + 1), complex)
            for (h, k), c in items.items():
                C[h, k] = c
            part = ifft2((Vxi @ C @ Veta.T) * spec)
        if m or n:
            part *= np.outer(x**m, y**n)
        out += part
    return w.with_values(out)
