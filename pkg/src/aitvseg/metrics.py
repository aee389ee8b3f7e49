"""Segmentation scoring: region-overlap index and reconstruction PSNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .pipeline import MultiChannelImage


@dataclass(frozen=True)
class DiceResult:
    per_label: tuple[float, ...]
    mean: float


def _validate_labels(labels: np.ndarray, name: str) -> int:
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError(f"{name} must be a 2-D label map")
    k = int(labels.max())
    present = np.unique(labels)
    if labels.min() < 1 or present.size != k:
        raise ValueError(f"{name} labels must be dense in 1..K, found {present.tolist()}")
    return k


def overlap_matrix(truth: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Counts of co-labeled pixels, shape (K_truth, K_pred)."""
    kt = _validate_labels(truth, "truth")
    kp = _validate_labels(pred, "pred")
    if truth.shape != pred.shape:
        raise ValueError(f"shape mismatch: {truth.shape} vs {pred.shape}")
    flat = (np.asarray(truth).ravel() - 1) * kp + (np.asarray(pred).ravel() - 1)
    return np.bincount(flat, minlength=kt * kp).reshape(kt, kp)


def match_labels(truth: np.ndarray, pred: np.ndarray) -> dict[int, int]:
    """Maximum-overlap one-to-one assignment of predicted to true labels.

    Clustering labels are arbitrary permutations, so scores are computed
    after this matching. Returns {truth_label: pred_label}.
    """
    overlap = overlap_matrix(truth, pred)
    rows, cols = linear_sum_assignment(-overlap)
    return {int(r) + 1: int(c) + 1 for r, c in zip(rows, cols)}


def dice(truth: np.ndarray, pred: np.ndarray) -> DiceResult:
    """Per-label overlap scores 2|R ∩ R'| / (|R| + |R'|) and their mean.

    Labels are matched one-to-one by maximum overlap first; true labels
    left unmatched (when the prediction has fewer regions) score 0.
    """
    overlap = overlap_matrix(truth, pred)
    assignment = dict(zip(*linear_sum_assignment(-overlap)))
    truth_sizes = overlap.sum(axis=1)
    pred_sizes = overlap.sum(axis=0)
    per_label = []
    for t in range(overlap.shape[0]):
        p = assignment.get(t)
        if p is None:
            per_label.append(0.0)
        else:
            inter = overlap[t, p]
            per_label.append(2.0 * inter / (truth_sizes[t] + pred_sizes[p]))
    return DiceResult(per_label=tuple(per_label), mean=float(np.mean(per_label)))


def psnr(reference: MultiChannelImage, approx: MultiChannelImage) -> float:
    """10 log10(1 / MSE) over all pixels and channels; inf when identical."""
    if reference.channels.shape != approx.channels.shape:
        raise ValueError(
            f"shape mismatch: {reference.channels.shape} vs {approx.channels.shape}"
        )
    mse = float(((reference.channels - approx.channels) ** 2).mean())
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)
