"""Image and label-map I/O.

8-bit PNG is the canonical interchange format; intensities in [0, 1] are
quantized by round(v * 255) (ties to even) on write, so a write-then-read
round trip reproduces quantized values exactly. PGM/PPM are accepted for
reading and writing as well. Label maps travel as indexed (palette) PNGs
whose pixel value is label - 1.
"""

from __future__ import annotations

import colorsys
from pathlib import Path

import numpy as np
from PIL import Image

from .pipeline import MultiChannelImage


def read_image(path: str | Path) -> MultiChannelImage:
    """Load an 8/16-bit grayscale or RGB image, scaled to [0, 1]."""
    with Image.open(path) as im:
        mode = im.mode
        if mode == "L":
            return MultiChannelImage.grayscale(np.asarray(im, dtype=float) / 255.0)
        if mode in ("I;16", "I;16B"):
            return MultiChannelImage.grayscale(np.asarray(im, dtype=float) / 65535.0)
        if mode == "I":
            values = np.asarray(im, dtype=float)
            if values.max() > 255:
                return MultiChannelImage.grayscale(values / 65535.0)
            return MultiChannelImage.grayscale(values / 255.0)
        if mode == "RGB":
            arr = np.asarray(im, dtype=float) / 255.0
            return MultiChannelImage.rgb(np.moveaxis(arr, -1, 0))
        raise ValueError(f"unsupported image mode {mode!r} in {path}")


def quantize(values: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_image(image: MultiChannelImage, path: str | Path) -> None:
    """Write as 8-bit grayscale or RGB (format chosen by extension)."""
    data = quantize(image.channels)
    if image.n_channels == 1:
        Image.fromarray(data[0], mode="L").save(path)
    elif image.n_channels == 3:
        Image.fromarray(np.moveaxis(data, 0, -1), mode="RGB").save(path)
    else:
        raise ValueError(f"can only write 1- or 3-channel images, got {image.n_channels}")


def label_palette(n: int = 256) -> list[int]:
    """Flat RGB palette with visually distinct entries (golden-ratio hues)."""
    flat = []
    for i in range(n):
        hue = (i * 0.6180339887498949) % 1.0
        r, g, b = colorsys.hsv_to_rgb(hue, 0.75, 0.95)
        flat.extend([round(r * 255), round(g * 255), round(b * 255)])
    return flat


def write_labels(labels: np.ndarray, path: str | Path) -> None:
    """Write a label map in {1..K} as an indexed PNG (pixel = label - 1)."""
    labels = np.asarray(labels)
    if labels.min() < 1 or labels.max() > 256:
        raise ValueError("labels must lie in 1..256")
    im = Image.fromarray((labels - 1).astype(np.uint8), mode="P")
    im.putpalette(label_palette())
    im.save(path)


def read_labels(path: str | Path) -> np.ndarray:
    """Read a label map.

    Indexed PNGs map index -> label = index + 1; plain grayscale maps are
    densified by ranking their distinct pixel values.
    """
    with Image.open(path) as im:
        if im.mode == "P":
            return np.asarray(im, dtype=int) + 1
        if im.mode in ("L", "I", "I;16"):
            values = np.asarray(im, dtype=int)
            return np.searchsorted(np.unique(values), values) + 1
        raise ValueError(f"unsupported label-map mode {im.mode!r} in {path}")
