"""Elementwise proximal operators.

The workhorse is the closed-form prox of ``||x||_1 - alpha*||x||_2`` on
pixel pairs, which splits into three cases by the infinity norm of the
input. Companion operators cover the anisotropic (scalar soft-threshold),
isotropic (vector shrink), and scalar ell_p variants, plus a brute-force
grid oracle used only by tests.

Conventions: ``sign(0) = 0`` everywhere; the case-2 argmax tie goes to the
first index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ProxParams:
    """Weight ``alpha`` in [0, 1] and step ``beta`` > 0 (plus ``p`` for ell_p)."""

    alpha: float
    beta: float
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.p not in (0.5, 2.0 / 3.0):
            raise ValueError(f"p must be 1/2 or 2/3, got {self.p}")


def pair_objective(x: np.ndarray, y: np.ndarray, alpha: float, beta: float):
    """||x||_1 - alpha*||x||_2 + ||x - y||^2 / (2*beta) on 2-vectors.

    ``x`` may carry trailing broadcast axes; the pair axis is axis 0.
    """
    x = np.asarray(x, dtype=float)
    l1 = np.abs(x).sum(axis=0)
    l2 = np.sqrt((x * x).sum(axis=0))
    quad = ((x - np.asarray(y, dtype=float).reshape(x.shape[0], *([1] * (x.ndim - 1)))) ** 2).sum(axis=0)
    return l1 - alpha * l2 + quad / (2.0 * beta)


def prox_pair_field(y: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Closed-form prox of ``||.||_1 - alpha*||.||_2`` on a (2, ...) array.

    Three exclusive cases by a = max(|y0|, |y1|):
      a >  beta            -> rescaled soft-thresholded vector
      (1-alpha)*beta < a <= beta -> 1-sparse output at the larger component
      a <= (1-alpha)*beta  -> zero
    """
    y = np.asarray(y, dtype=float)
    absy = np.abs(y)
    a = absy.max(axis=0)
    out = np.zeros_like(y)

    case1 = a > beta
    if np.any(case1):
        xi = np.sign(y) * np.maximum(absy - beta, 0.0)
        norm = np.sqrt((xi * xi).sum(axis=0))
        scale = np.zeros_like(norm)
        np.divide(norm + alpha * beta, norm, out=scale, where=case1)
        out = np.where(case1, xi * scale, out)

    case2 = (a > (1.0 - alpha) * beta) & ~case1
    if np.any(case2):
        top = np.argmax(absy, axis=0)  # ties -> first index
        mag = a - (1.0 - alpha) * beta
        picked = np.take_along_axis(y, top[None], axis=0)[0]
        sparse = np.zeros_like(y)
        np.put_along_axis(sparse, top[None], (mag * np.sign(picked))[None], axis=0)
        out = np.where(case2, sparse, out)

    return out


def prox_l1_minus_alpha_l2(y, params: ProxParams) -> np.ndarray:
    """Prox of the pair regularizer at a single 2-vector ``y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {y.shape}")
    return prox_pair_field(y.reshape(2, 1), params.alpha, params.beta)[:, 0]


def prox_soft_threshold(y, beta: float):
    """sign(y) * max(|y| - beta, 0); works elementwise on arrays."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    y = np.asarray(y, dtype=float)
    out = np.sign(y) * np.maximum(np.abs(y) - beta, 0.0)
    return float(out) if out.ndim == 0 else out


def prox_isotropic_shrink(y, beta: float) -> np.ndarray:
    """Vector soft-threshold on pairs: shrink the magnitude by ``beta``.

    Accepts a 2-vector or a (2, ...) field; zero input maps to zero.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    y = np.asarray(y, dtype=float)
    mag = np.sqrt((y * y).sum(axis=0))
    scale = np.zeros_like(mag)
    np.divide(np.maximum(mag - beta, 0.0), mag, out=scale, where=mag > 0)
    return y * scale


def lp_objective(x, y, beta: float, p: float):
    """beta*|x|^p + (x - y)^2 / 2, the scalar ell_p prox objective."""
    x = np.asarray(x, dtype=float)
    return beta * np.abs(x) ** p + 0.5 * (x - y) ** 2


def prox_lp_scalar(y, beta: float, p: float, iters: int = 80):
    """Global minimizer of ``beta*|x|^p + (x - y)^2 / 2`` for p in {1/2, 2/3}.

    Solved by safeguarded candidate comparison: the origin against the
    larger stationary point, bracketed in [x_bar, |y|] and refined by
    bisection (the stationarity residual is increasing there). Odd in y.
    Vectorized over arrays.
    """
    if p not in (0.5, 2.0 / 3.0):
        raise ValueError(f"p must be 1/2 or 2/3, got {p}")
    if not beta > 0:
        raise ValueError("beta must be positive")
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    s = np.sign(y)
    t = np.abs(y)

    # g(x) = x - t + beta*p*x^(p-1) is convex on (0, inf) with minimum at
    # x_bar; a root > x_bar exists iff g(x_bar) <= 0, and then lies in
    # (x_bar, t).
    x_bar = (beta * p * (1.0 - p)) ** (1.0 / (2.0 - p))

    def g(x):
        return x - t + beta * p * np.power(x, p - 1.0, where=x > 0, out=np.full_like(x, np.inf))

    lo = np.full_like(t, x_bar)
    hi = np.maximum(t, x_bar)
    active = (t > x_bar) & (g(lo) <= 0.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        go_right = g(mid) <= 0.0
        lo = np.where(active & go_right, mid, lo)
        hi = np.where(active & ~go_right, mid, hi)
    root = 0.5 * (lo + hi)

    take_root = active & (lp_objective(root, t, beta, p) < lp_objective(0.0, t, beta, p))
    out = s * np.where(take_root, root, 0.0)
    return float(out[0]) if scalar else out


def prox_grid_oracle(
    y,
    params: ProxParams,
    kind: str = "l1-alpha-l2",
    box: float = 4.0,
    steps: int = 401,
):
    """Exhaustive grid minimizer of a prox objective; test oracle only.

    Returns ``(x_best, value_best)`` over a uniform grid on [-box, box]
    (squared for the pair objective).
    """
    if kind == "l1-alpha-l2":
        y = np.asarray(y, dtype=float)
        axis = np.linspace(-box, box, steps)
        x0, x1 = np.meshgrid(axis, axis, indexing="ij")
        vals = (
            np.abs(x0)
            + np.abs(x1)
            - params.alpha * np.sqrt(x0 * x0 + x1 * x1)
            + ((x0 - y[0]) ** 2 + (x1 - y[1]) ** 2) / (2.0 * params.beta)
        )
        flat = np.argmin(vals)
        i, j = np.unravel_index(flat, vals.shape)
        return np.array([axis[i], axis[j]]), float(vals[i, j])
    if kind == "soft":
        axis = np.linspace(-box, box, steps)
        vals = np.abs(axis) + (axis - y) ** 2 / (2.0 * params.beta)
        k = int(np.argmin(vals))
        return float(axis[k]), float(vals[k])
    if kind == "lp":
        axis = np.linspace(-box, box, steps)
        vals = lp_objective(axis, y, params.beta, params.p)
        k = int(np.argmin(vals))
        return float(axis[k]), float(vals[k])
    raise ValueError(f"unknown objective kind: {kind!r}")
