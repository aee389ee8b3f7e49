"""sRGB to CIELAB conversion (D65 white point, 2-degree observer).

Inputs are channels-first arrays of shape (3, M, N) with values in [0, 1].
L lands in [0, 100]; a and b are left on their native scales since the
pipeline min-max rescales every channel before clustering anyway.
"""

from __future__ import annotations

import numpy as np

# sRGB (linear) -> XYZ, D65
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = np.array([0.95047, 1.0, 1.08883])

_DELTA = 6.0 / 29.0


def _linearize(c: np.ndarray) -> np.ndarray:
    # inverse sRGB gamma
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3.0 * _DELTA**2) + 4.0 / 29.0)


def srgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert a (3, M, N) sRGB stack in [0, 1] to an (L, a, b) stack."""
    rgb = np.asarray(rgb, dtype=float)
    if rgb.ndim != 3 or rgb.shape[0] != 3:
        raise ValueError(f"expected shape (3, M, N), got {rgb.shape}")
    linear = _linearize(rgb)
    xyz = np.einsum("kc,cmn->kmn", _SRGB_TO_XYZ, linear)
    fxyz = _lab_f(xyz / _D65_WHITE[:, None, None])
    lum = 116.0 * fxyz[1] - 16.0
    a = 500.0 * (fxyz[0] - fxyz[1])
    b = 200.0 * (fxyz[1] - fxyz[2])
    return np.stack((lum, a, b))
