"""Multi-stage segmentation: per-channel smoothing, optional channel
lifting, min-max rescaling, and k-means thresholding.

Grayscale images go smooth -> rescale -> cluster, optionally with a local
inhomogeneity indicator appended as a second channel before smoothing.
Color images are smoothed per RGB channel, lifted to six channels by
appending the Lab transform of the smoothed triple, rescaled, and
clustered in the six-dimensional feature space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admm import AdmmResult, SolverConfig, admm_solve
from .colorspace import srgb_to_lab
from .grids import BlurKernel
from .kmeans import kmeans

RGB_ROLES = ("red", "green", "blue")
LAB_ROLES = ("lab_l", "lab_a", "lab_b")


@dataclass
class MultiChannelImage:
    """A (C, M, N) stack of equally sized channels with per-channel roles."""

    channels: np.ndarray
    roles: tuple[str, ...]

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=float)
        if self.channels.ndim != 3 or self.channels.shape[0] < 1:
            raise ValueError(f"expected (C, M, N) with C >= 1, got {self.channels.shape}")
        if len(self.roles) != self.channels.shape[0]:
            raise ValueError("one role per channel required")
        self.roles = tuple(self.roles)

    @classmethod
    def grayscale(cls, values: np.ndarray) -> "MultiChannelImage":
        return cls(np.asarray(values, dtype=float)[None], ("gray",))

    @classmethod
    def rgb(cls, values: np.ndarray) -> "MultiChannelImage":
        values = np.asarray(values, dtype=float)
        if values.shape[0] != 3:
            raise ValueError(f"expected 3 channels, got {values.shape[0]}")
        return cls(values, RGB_ROLES)

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.channels.shape[1:]

    def is_rgb(self) -> bool:
        return self.roles[:3] == RGB_ROLES and self.n_channels == 3


@dataclass(frozen=True)
class IihConfig:
    """Patch radius for the inhomogeneity indicator (radius 3 -> 7x7 patch)."""

    patch_radius: int = 3

    def __post_init__(self):
        if self.patch_radius < 1:
            raise ValueError("patch_radius must be >= 1")


@dataclass
class SegmentationResult:
    """Label map in {1..K}, centroids in feature space, and the
    piecewise-constant reconstruction (centroid of each pixel's label)."""

    labels: np.ndarray
    centroids: np.ndarray
    approx: MultiChannelImage
    k: int
    traces: list[AdmmResult] | None = None

    @property
    def n_features(self) -> int:
        return self.centroids.shape[1]


def smooth_channels(
    image: MultiChannelImage,
    kernel: BlurKernel,
    cfg: SolverConfig,
    diagnostics: bool = False,
) -> tuple[MultiChannelImage, list[AdmmResult]]:
    """Smooth every channel independently with the same configuration."""
    results = [admm_solve(ch, kernel, cfg, diagnostics=diagnostics) for ch in image.channels]
    smoothed = np.stack([r.u for r in results])
    return MultiChannelImage(smoothed, image.roles), results


def lift_to_lab(image: MultiChannelImage) -> MultiChannelImage:
    """Append the Lab transform of an RGB triple: 3 channels become 6.

    The conversion input is clamped to [0, 1]; the returned first three
    channels are the unclamped originals.
    """
    if image.n_channels != 3:
        raise ValueError(f"lifting requires exactly 3 channels, got {image.n_channels}")
    lab = srgb_to_lab(np.clip(image.channels, 0.0, 1.0))
    return MultiChannelImage(
        np.concatenate((image.channels, lab)), image.roles + LAB_ROLES
    )


def _window_views(u: np.ndarray, radius: int):
    """Yield (shifted view, validity mask) per patch offset, row-major.

    Offsets falling outside the image are masked out: border patches
    shrink instead of padding. The offset order matches the reference
    implementation so accumulated sums agree bit for bit.
    """
    rows, cols = u.shape
    padded = np.pad(u, radius, mode="constant", constant_values=np.nan)
    for di in range(-radius, radius + 1):
        for dj in range(-radius, radius + 1):
            window = padded[radius + di : radius + di + rows, radius + dj : radius + dj + cols]
            yield window, ~np.isnan(window)


def iih_channel(u: np.ndarray, cfg: IihConfig = IihConfig()) -> np.ndarray:
    """Local-inhomogeneity indicator channel, valued in [0, 1].

    Each pixel reports the fraction of its (truncated) patch whose values
    deviate from the patch mean by at least the image-wide mean patch
    variance. Windows shrink at the borders rather than pad.
    """
    u = np.asarray(u, dtype=float)
    r = cfg.patch_radius
    if min(u.shape) < r + 1:
        raise ValueError(f"image {u.shape} smaller than patch radius {r}")

    sums = np.zeros_like(u)
    counts = np.zeros_like(u)
    for window, valid in _window_views(u, r):
        sums += np.where(valid, window, 0.0)
        counts += valid
    means = sums / counts

    spread = np.zeros_like(u)
    for window, valid in _window_views(u, r):
        spread += np.where(valid, (window - means) ** 2, 0.0)
    threshold = float(np.mean(spread / counts))

    hits = np.zeros_like(u)
    for window, valid in _window_views(u, r):
        hits += ((means - window) ** 2 >= threshold) & valid
    return hits / counts


def iih_channel_reference(u: np.ndarray, cfg: IihConfig = IihConfig()) -> np.ndarray:
    """Direct double-loop evaluation of the indicator; test oracle only."""
    u = np.asarray(u, dtype=float)
    r = cfg.patch_radius
    rows, cols = u.shape
    means = np.zeros_like(u)
    counts = np.zeros_like(u)
    for i in range(rows):
        for j in range(cols):
            total = 0.0
            n = 0
            for di in range(-r, r + 1):
                for dj in range(-r, r + 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < rows and 0 <= jj < cols:
                        total += u[ii, jj]
                        n += 1
            means[i, j] = total / n
            counts[i, j] = n
    spread = np.zeros_like(u)
    for i in range(rows):
        for j in range(cols):
            total = 0.0
            for di in range(-r, r + 1):
                for dj in range(-r, r + 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < rows and 0 <= jj < cols:
                        total += (u[ii, jj] - means[i, j]) ** 2
            spread[i, j] = total / counts[i, j]
    threshold = float(np.mean(spread))
    out = np.zeros_like(u)
    for i in range(rows):
        for j in range(cols):
            hit = 0
            for di in range(-r, r + 1):
                for dj in range(-r, r + 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < rows and 0 <= jj < cols:
                        if (means[i, j] - u[ii, jj]) ** 2 >= threshold:
                            hit += 1
            out[i, j] = hit / counts[i, j]
    return out


def rescale_channels(image: MultiChannelImage) -> MultiChannelImage:
    """Min-max rescale each channel to [0, 1]; constant channels map to 0."""
    out = np.zeros_like(image.channels)
    for c, channel in enumerate(image.channels):
        lo, hi = float(channel.min()), float(channel.max())
        if hi > lo:
            out[c] = (channel - lo) / (hi - lo)
    return MultiChannelImage(out, image.roles)


def kmeans_threshold(image: MultiChannelImage, k: int, seed: int) -> SegmentationResult:
    """Cluster pixels of the feature image into k regions.

    Pixels become rows of an (M*N, C) matrix; labels are 1-based and the
    reconstruction places each pixel at its cluster centroid.
    """
    rows, cols = image.shape
    points = image.channels.reshape(image.n_channels, -1).T
    labels0, centroids, _ = kmeans(points, k, seed)
    labels = labels0.reshape(rows, cols) + 1
    approx = centroids[labels0].T.reshape(image.n_channels, rows, cols)
    return SegmentationResult(
        labels=labels,
        centroids=centroids,
        approx=MultiChannelImage(approx, image.roles),
        k=k,
    )


def segment(
    image: MultiChannelImage,
    kernel: BlurKernel,
    cfg: SolverConfig,
    k: int,
    use_iih: bool = False,
    seed: int = 0,
    iih: IihConfig = IihConfig(),
    diagnostics: bool = False,
) -> SegmentationResult:
    """Full pipeline: smooth each channel, lift color to Lab, rescale,
    cluster into k regions, and reconstruct the input-channel approximation.

    Grayscale inputs may append the inhomogeneity channel (computed on the
    raw input) before smoothing; color inputs are lifted to six clustering
    channels after smoothing. The returned approximation covers the
    original channels only, read off the matching centroid entries.
    """
    if image.n_channels == 1:
        work = image
        if use_iih:
            extra = iih_channel(image.channels[0], iih)
            work = MultiChannelImage(
                np.concatenate((image.channels, extra[None])), image.roles + ("iih",)
            )
    elif image.n_channels == 3:
        if use_iih:
            raise ValueError("the inhomogeneity channel applies to grayscale inputs only")
        work = image
    else:
        raise ValueError(f"expected 1 or 3 channels, got {image.n_channels}")

    smoothed, results = smooth_channels(work, kernel, cfg, diagnostics=diagnostics)
    if image.n_channels == 3:
        smoothed = lift_to_lab(smoothed)
    features = rescale_channels(smoothed)
    seg = kmeans_threshold(features, k, seed)

    d = image.n_channels
    approx = MultiChannelImage(seg.approx.channels[:d], image.roles)
    return SegmentationResult(
        labels=seg.labels,
        centroids=seg.centroids,
        approx=approx,
        k=k,
        traces=results,
    )
