"""Synthetic piecewise-constant test images with exact ground truth.

Shapes (disks, rectangles, triangles) are stamped onto a constant
background; overlapping shapes are rejected. Ground-truth labels group
pixels by value, so the label count equals the number of distinct
intensities (or colors), numbered in sorted value order starting at 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pipeline import MultiChannelImage

Value = float | tuple[float, float, float]


@dataclass(frozen=True)
class Shape:
    kind: str  # disk | rect | triangle
    params: tuple[float, ...]
    value: Value

    def mask(self, rows: int, cols: int) -> np.ndarray:
        ii, jj = np.mgrid[0:rows, 0:cols]
        if self.kind == "disk":
            cx, cy, r = self.params
            return (ii - cy) ** 2 + (jj - cx) ** 2 <= r * r
        if self.kind == "rect":
            x0, y0, w, h = self.params
            return (jj >= x0) & (jj < x0 + w) & (ii >= y0) & (ii < y0 + h)
        if self.kind == "triangle":
            xs = np.array(self.params[0::2], dtype=float)
            ys = np.array(self.params[1::2], dtype=float)
            inside = np.ones((rows, cols), dtype=bool)
            # half-plane test per edge, consistent orientation
            area = (xs[1] - xs[0]) * (ys[2] - ys[0]) - (xs[2] - xs[0]) * (ys[1] - ys[0])
            sign = 1.0 if area >= 0 else -1.0
            for a in range(3):
                b = (a + 1) % 3
                cross = (xs[b] - xs[a]) * (ii - ys[a]) - (jj - xs[a]) * (ys[b] - ys[a])
                inside &= sign * cross >= 0
            return inside
        raise ValueError(f"unknown shape kind {self.kind!r}")


def synthesize(
    rows: int,
    cols: int,
    background: Value,
    shapes: list[Shape],
) -> tuple[MultiChannelImage, np.ndarray]:
    """Render the shapes and return (image, ground-truth label map)."""
    color = isinstance(background, tuple)
    for s in shapes:
        if isinstance(s.value, tuple) != color:
            raise ValueError("background and shape values must agree on grayscale vs color")

    occupied = np.zeros((rows, cols), dtype=bool)
    masks = []
    for s in shapes:
        mask = s.mask(rows, cols)
        if not mask.any():
            raise ValueError(f"shape {s.kind}{s.params} lies outside the {rows}x{cols} image")
        if (occupied & mask).any():
            raise ValueError(f"shape {s.kind}{s.params} overlaps an earlier shape")
        occupied |= mask
        masks.append(mask)

    if color:
        channels = np.empty((3, rows, cols))
        for c in range(3):
            channels[c] = background[c]
        for s, mask in zip(shapes, masks):
            for c in range(3):
                channels[c][mask] = s.value[c]
        image = MultiChannelImage.rgb(channels)
    else:
        plane = np.full((rows, cols), float(background))
        for s, mask in zip(shapes, masks):
            plane[mask] = float(s.value)
        image = MultiChannelImage.grayscale(plane)

    values = [background] + [s.value for s in shapes]
    ordering = {v: i + 1 for i, v in enumerate(sorted(set(values)))}
    labels = np.full((rows, cols), ordering[background], dtype=int)
    for s, mask in zip(shapes, masks):
        labels[mask] = ordering[s.value]
    # re-densify: the background may be fully covered, dropping its label
    labels = np.searchsorted(np.unique(labels), labels) + 1
    return image, labels
