"""Reproducible degradations: average/motion blur kernels and seeded noise.

All noise draws come from a generator owned by the call, so a spec with
the same seed corrupts identically, bit for bit. Outputs stay in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import BlurKernel, identity_kernel
from .pipeline import MultiChannelImage

NOISE_KINDS = ("gaussian", "salt_pepper", "random_valued")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    fraction: float = 0.0  # impulse kinds: corruption probability per value
    mean: float = 0.0  # gaussian
    variance: float = 0.0  # gaussian
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"fraction must be in [0, 1], got {self.fraction}")
        if self.variance < 0.0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")


def make_average_kernel(size: int) -> BlurKernel:
    """Uniform size x size kernel, each tap 1/size^2; size must be odd."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"average kernel size must be odd and >= 1, got {size}")
    taps = np.full((size, size), 1.0 / (size * size))
    return BlurKernel(taps=taps, anchor=(size // 2, size // 2))


def make_motion_kernel(length: int, angle_degrees: float) -> BlurKernel:
    """Linear-motion point-spread function.

    A centered segment of the given pixel length, at ``angle_degrees``
    counter-clockwise from horizontal (as displayed, row 0 on top), is
    rasterized by exact coverage: each pixel's weight is the length of the
    segment inside its unit square. Weights are normalized to total 1.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if length == 1:
        return identity_kernel()
    theta = np.deg2rad(angle_degrees)
    dx, dy = float(np.cos(theta)), float(-np.sin(theta))
    if abs(dx) < 1e-12:
        dx = 0.0
    if abs(dy) < 1e-12:
        dy = 0.0

    half = length / 2.0
    reach = int(np.ceil(half)) + 1
    offsets = np.arange(-reach, reach + 1)
    weights = np.zeros((offsets.size, offsets.size))
    for a, row in enumerate(offsets):
        for b, col in enumerate(offsets):
            t0, t1 = -half, half
            # clip the segment (col + t*dx, row + t*dy) against the square
            for center, d in ((col, dx), (row, dy)):
                if d == 0.0:
                    if not -0.5 <= center <= 0.5:
                        t0, t1 = 1.0, 0.0
                        break
                else:
                    ta = (-0.5 - center) / d
                    tb = (0.5 - center) / d
                    t0 = max(t0, min(ta, tb))
                    t1 = min(t1, max(ta, tb))
            if t1 > t0:
                weights[a, b] = t1 - t0

    used_rows = np.flatnonzero(weights.any(axis=1))
    used_cols = np.flatnonzero(weights.any(axis=0))
    taps = weights[used_rows[0] : used_rows[-1] + 1, used_cols[0] : used_cols[-1] + 1]
    taps = taps / taps.sum()
    # the segment passes through the origin, so the center pixel (index
    # ``reach`` before trimming) always carries weight
    anchor = (reach - int(used_rows[0]), reach - int(used_cols[0]))
    return BlurKernel(taps=taps, anchor=anchor)


def add_noise(image: MultiChannelImage, spec: NoiseSpec) -> MultiChannelImage:
    """Apply the configured noise to every channel; clamps to [0, 1]."""
    rng = np.random.default_rng(spec.seed)
    values = image.channels
    if spec.kind == "gaussian":
        noisy = values + rng.normal(spec.mean, np.sqrt(spec.variance), values.shape)
        out = np.clip(noisy, 0.0, 1.0)
    elif spec.kind == "salt_pepper":
        replace = rng.random(values.shape) < spec.fraction
        salt = rng.random(values.shape) < 0.5
        out = np.where(replace, salt.astype(float), values)
    else:  # random_valued
        replace = rng.random(values.shape) < spec.fraction
        draws = rng.random(values.shape)
        out = np.where(replace, draws, values)
    return MultiChannelImage(out, image.roles)
