"""Periodic grid operators: forward differences, adjoints, norms, and
FFT-diagonalized convolution.

An image is an (M, N) float array. A gradient field stacks the horizontal
and vertical difference components into shape (2, M, N); component 0 holds
differences along columns (x), component 1 along rows (y). All operators
wrap periodically, so every convolution-like operator is diagonalized by
the 2-D DFT and can be applied or inverted through its frequency symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.fft import fft2, ifft2


def forward_gradient(u: np.ndarray) -> np.ndarray:
    """Forward differences with periodic wrap.

    Component 0: u[i, j] - u[i, j-1] (column j-1 taken mod N).
    Component 1: u[i, j] - u[i-1, j] (row i-1 taken mod M).
    """
    u = np.asarray(u, dtype=float)
    gx = u - np.roll(u, 1, axis=1)
    gy = u - np.roll(u, 1, axis=0)
    return np.stack((gx, gy))


def gradient_adjoint(p: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`forward_gradient`: <grad u, p> == <u, adjoint p>."""
    p = np.asarray(p, dtype=float)
    px, py = p[0], p[1]
    return (px - np.roll(px, -1, axis=1)) + (py - np.roll(py, -1, axis=0))


def laplacian(u: np.ndarray) -> np.ndarray:
    """-adjoint(grad(u)); negative semidefinite five-point stencil."""
    return -gradient_adjoint(forward_gradient(u))


def field_norms(p: np.ndarray) -> tuple[float, float, float]:
    """Return (l1, l2, l21) of a gradient field.

    l1 sums |px| + |py|, l2 is the Euclidean norm of the whole stack, and
    l21 sums the per-pixel vector magnitudes; l2 <= l21 <= l1 always.
    """
    p = np.asarray(p, dtype=float)
    l1 = float(np.abs(p).sum())
    l2 = float(np.sqrt((p * p).sum()))
    l21 = float(np.hypot(p[0], p[1]).sum())
    return l1, l2, l21


@dataclass(frozen=True)
class BlurKernel:
    """Point-spread function applied as circular (periodic) convolution.

    ``anchor`` marks which tap sits on the output pixel; the identity is a
    single tap of weight 1 at anchor (0, 0).
    """

    taps: np.ndarray
    anchor: tuple[int, int]

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=float)
        if taps.ndim != 2 or taps.size == 0:
            raise ValueError("kernel taps must be a non-empty 2-D array")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel taps must be finite")
        ai, aj = self.anchor
        if not (0 <= ai < taps.shape[0] and 0 <= aj < taps.shape[1]):
            raise ValueError(f"anchor {self.anchor} outside kernel of shape {taps.shape}")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def shape(self) -> tuple[int, int]:
        return self.taps.shape

    def weight_total(self) -> float:
        """Exactly accumulated sum of the taps (one final rounding)."""
        return math.fsum(self.taps.ravel())


def identity_kernel() -> BlurKernel:
    return BlurKernel(taps=np.ones((1, 1)), anchor=(0, 0))


def embed_kernel(kernel: BlurKernel, rows: int, cols: int) -> np.ndarray:
    """Place the taps on an (rows, cols) torus with the anchor at the origin.

    Raises ValueError when the kernel does not fit inside the image.
    """
    kh, kw = kernel.shape
    if kh > rows or kw > cols:
        raise ValueError(
            f"kernel of shape {(kh, kw)} does not fit a {rows}x{cols} image"
        )
    ai, aj = kernel.anchor
    out = np.zeros((rows, cols))
    ii = (np.arange(kh)[:, None] - ai) % rows
    jj = (np.arange(kw)[None, :] - aj) % cols
    out[ii, jj] = kernel.taps
    return out


def kernel_symbol(kernel: BlurKernel, rows: int, cols: int) -> np.ndarray:
    """DFT eigenvalues of the circular convolution by ``kernel``."""
    return fft2(embed_kernel(kernel, rows, cols))


def gradient_symbols(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    """DFT eigenvalues (sx, sy) of the two forward-difference operators.

    Computed analytically so the zero-frequency entries are exactly 0.
    """
    sx = np.broadcast_to(
        1.0 - np.exp(-2j * np.pi * np.arange(cols) / cols), (rows, cols)
    ).copy()
    sy = np.broadcast_to(
        (1.0 - np.exp(-2j * np.pi * np.arange(rows) / rows))[:, None], (rows, cols)
    ).copy()
    return sx, sy


def gradient_spectrum(rows: int, cols: int) -> np.ndarray:
    """|sx|^2 + |sy|^2, the (real, >= 0) symbol of adjoint(grad(.))."""
    sx, sy = gradient_symbols(rows, cols)
    return np.abs(sx) ** 2 + np.abs(sy) ** 2


def laplacian_symbol(rows: int, cols: int) -> np.ndarray:
    """Symbol of the periodic Laplacian: real, <= 0, zero only at DC."""
    return -gradient_spectrum(rows, cols)


def apply_symbol(u: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Apply a periodic convolution operator through its frequency symbol."""
    return np.real(ifft2(fft2(u) * symbol))


def convolve_periodic(u: np.ndarray, kernel: BlurKernel) -> np.ndarray:
    """Circular convolution of ``u`` with ``kernel`` via the FFT."""
    u = np.asarray(u, dtype=float)
    rows, cols = u.shape
    return apply_symbol(u, kernel_symbol(kernel, rows, cols))
