"""Grid Wigner transform, Cohen-class multiplier and their inverses."""

from __future__ import annotations

import numpy as np

from .algebra import KernelError, KernelSpec
from .grid import Grid2, fft2, ifft2

GUARD = 1e-13


def _wig_axes(L: float, N: int) -> float:
    return np.pi * N / (4 * L)


def wig(w: Grid2) -> Grid2:
    """Wig[w](x, y) = int e^{-i t y} w(x + t/2, x - t/2) dt on the grid.

    t runs over 2*dx*k so both arguments are grid points; samples that leave
    the domain count as zero.  The frequency axis has spacing pi/(2L).
    """
    if w.kind != "space" or not np.isclose(w.Lx, w.Ly):
        raise ValueError("wig expects a square space-domain grid")
    N = w.N
    i = np.arange(N)[:, None]
    k = np.arange(N)[None, :] - N // 2
    a, b = i + k, i - k
    ok = (a >= 0) & (a < N) & (b >= 0) & (b < N)
    T = np.where(ok, w.values[np.clip(a, 0, N - 1), np.clip(b, 0, N - 1)], 0)
    dt = 2 * w.dx
    W = dt * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(T, axes=1), axis=1), axes=1)
    return Grid2(W, w.Lx, _wig_axes(w.Lx, N), kind="wig")


def _t_samples(v: np.ndarray, dt: float) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(v, axes=1), axis=1), axes=1) / dt


def wig_inverse(v: Grid2) -> Grid2:
    """Invert ``wig`` on its range.

    Pairs (a, b) with a + b even come straight from the inverse DFT in y.
    The other parity needs T at x + dx/2 and t + dx, obtained by a spectral
    half-step in x and a phase e^{i y dx} before the inverse DFT.
    """
    if v.kind != "wig":
        raise ValueError("wig_inverse expects a grid produced by wig")
    N, L = v.N, v.Lx
    if not np.isclose(v.Ly, _wig_axes(L, N)):
        raise ValueError("frequency axis does not match a wig output")
    dx = 2 * L / N
    dt = 2 * dx
    out = np.zeros((N, N), complex)
    kk = np.arange(N) - N // 2

    T = _t_samples(v.values, dt)
    i = np.arange(N)[:, None]
    a, b = i + kk[None, :], i - kk[None, :]
    ok = (a >= 0) & (a < N) & (b >= 0) & (b < N)
    out[a[ok], b[ok]] = T[ok]

    xi = 2 * np.pi * np.fft.fftfreq(N, dx)
    shift = np.exp(1j * xi * dx / 2)
    shift[N // 2] = np.cos(xi[N // 2] * dx / 2)
    Vh = np.fft.ifft(np.fft.fft(v.values, axis=0) * shift[:, None], axis=0)
    Vh = Vh * np.exp(1j * np.pi * kk / N)[None, :]
    Th = _t_samples(Vh, dt)
    a, b = i + kk[None, :] + 1, i - kk[None, :]
    ok = (a >= 0) & (a < N) & (b >= 0) & (b < N)
    out[a[ok], b[ok]] = Th[ok]
    return Grid2(out, L)


def sigma_hat_values(ker: KernelSpec, grid: Grid2) -> np.ndarray:
    """q e^{-iP} on the DFT frequency lattice of ``grid`` (FFT ordering)."""
    xi, eta = grid.freqs()
    XI, ETA = np.meshgrid(xi, eta, indexing="ij")
    return ker.q(XI, ETA) * np.exp(-1j * ker.P(XI, ETA).real)


def sigma_hat_on_grid(ker: KernelSpec, grid: Grid2) -> Grid2:
    """sigma_hat sampled on the centred frequency lattice of ``grid``."""
    vals = np.fft.fftshift(sigma_hat_values(ker, grid))
    return Grid2(vals, np.pi / grid.dx, np.pi / grid.dy, kind="freq")


def apply_multiplier(v: Grid2, ker: KernelSpec) -> Grid2:
    """F^{-1}(sigma_hat F v) for data already on Wigner axes."""
    if ker.P.is_zero and ker.q.degree == 0 and ker.q.terms.get((0, 0), 0) == 1:
        return v
    return v.with_values(ifft2(sigma_hat_values(ker, v) * fft2(v.values)))


def cohen_q(w: Grid2, ker: KernelSpec) -> Grid2:
    """Q[w] = sigma * Wig[w] computed as a Fourier multiplier."""
    return apply_multiplier(wig(w), ker)


def cohen_q_inverse(v: Grid2, ker: KernelSpec) -> Grid2:
    s = sigma_hat_values(ker, v)
    if np.min(np.abs(s)) < GUARD:
        raise KernelError("kernel vanishes numerically")
    return wig_inverse(v.with_values(ifft2(fft2(v.values) / s)))
