"""ADMM solver for the edge-preserving smoothing model.

Minimizes, over images u,

    lam/2 ||f - A u||^2 + mu/2 ||grad u||^2 + R(grad u)

with R one of: the weighted anisotropic-isotropic difference
``||.||_1 - alpha*||.||_{2,1}`` (the default), the plain anisotropic or
isotropic TV, or the componentwise ell_p penalty. Splitting w = grad u
gives subproblems with closed forms: the u-step is a single FFT quotient
(all operators are periodic, hence DFT-diagonal) and the w-step is a
pixelwise prox. The dual ascends by z += delta*(grad u - w) and the
penalty grows geometrically, delta_{t+1} = sigma*delta_t.

Diagnostics are optional because the energy/Lagrangian bookkeeping roughly
doubles the per-iteration cost; when enabled, each iterate records the
descent-inequality slack (which must stay nonnegative up to round-off),
the dual-variable bounds, and the relative residual of the u-step normal
equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.fft import fft2, ifft2

from .grids import (
    BlurKernel,
    field_norms,
    forward_gradient,
    gradient_adjoint,
    gradient_spectrum,
    gradient_symbols,
    kernel_symbol,
)
from .prox import prox_isotropic_shrink, prox_lp_scalar, prox_pair_field, prox_soft_threshold

REGULARIZERS = ("aitv", "tv-aniso", "tv-iso", "tvp")

DENOMINATOR_FLOOR = 1e-12

DEFAULT_EPS = 1e-4
DEFAULT_MAX_ITERS = 300
DEFAULT_SIGMA = 1.25
DEFAULT_DELTA0_GRAY = 1.0
DEFAULT_DELTA0_MULTI = 2.0


class SingularOperatorError(ValueError):
    """The data term and the gradient share a null direction, so the
    u-step system is (numerically) singular."""


class DivergenceError(RuntimeError):
    def __init__(self, iteration: int):
        super().__init__(f"non-finite iterate at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class SolverConfig:
    """All scalar knobs of the smoothing model and its solver."""

    lam: float
    mu: float
    alpha: float = 0.6
    delta0: float = DEFAULT_DELTA0_GRAY
    sigma: float = DEFAULT_SIGMA
    eps: float = DEFAULT_EPS
    max_iters: int = DEFAULT_MAX_ITERS
    regularizer: str = "aitv"
    p: float = 0.5

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.delta0 > 0:
            raise ValueError(f"delta0 must be positive, got {self.delta0}")
        if not self.sigma >= 1.0:
            raise ValueError(f"sigma must be >= 1, got {self.sigma}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.regularizer not in REGULARIZERS:
            raise ValueError(f"regularizer must be one of {REGULARIZERS}")
        if self.regularizer == "tvp" and self.p not in (0.5, 2.0 / 3.0):
            raise ValueError(f"p must be 1/2 or 2/3, got {self.p}")


@dataclass
class AdmmState:
    """Current iterate; ``delta`` equals delta0 * sigma**iter."""

    u: np.ndarray
    w: np.ndarray
    z: np.ndarray
    delta: float
    iter: int


@dataclass
class IterateDiagnostics:
    iter: int
    rel_change: float
    delta: float  # penalty in effect during this iteration's updates
    primal_residual: float
    z_inf: float
    z_norm: float
    u_change: float
    z_change: float
    w_change: float
    energy: float | None = None
    lagrangian: float | None = None
    u_residual: float | None = None
    lemma_slack: float | None = None

    def trace_record(self) -> dict:
        return {
            "iter": self.iter,
            "rel_change": self.rel_change,
            "energy": self.energy,
            "lagrangian": self.lagrangian,
            "z_inf": self.z_inf,
            "primal_residual": self.primal_residual,
            "delta": self.delta,
        }


@dataclass
class AdmmResult:
    u: np.ndarray
    trace: list[IterateDiagnostics]
    iterations: int
    converged: bool
    final_energy: float = 0.0
    initial_energy: float | None = None
    initial_lagrangian: float | None = None


@dataclass(frozen=True)
class SolveOperators:
    """Frequency symbols shared by every iteration of one solve."""

    a_sym: np.ndarray
    a_abs2: np.ndarray
    grad_x: np.ndarray
    grad_y: np.ndarray
    grad_abs2: np.ndarray

    @classmethod
    def build(cls, kernel: BlurKernel, rows: int, cols: int) -> "SolveOperators":
        a_sym = kernel_symbol(kernel, rows, cols)
        sx, sy = gradient_symbols(rows, cols)
        return cls(
            a_sym=a_sym,
            a_abs2=np.abs(a_sym) ** 2,
            grad_x=sx,
            grad_y=sy,
            grad_abs2=gradient_spectrum(rows, cols),
        )


def regularizer_value(w: np.ndarray, cfg: SolverConfig) -> float:
    """Evaluate the configured gradient penalty at a field ``w``."""
    l1, _, l21 = field_norms(w)
    if cfg.regularizer == "aitv":
        return l1 - cfg.alpha * l21
    if cfg.regularizer == "tv-aniso":
        return l1
    if cfg.regularizer == "tv-iso":
        return l21
    return float((np.abs(w) ** cfg.p).sum())  # tvp, componentwise


def energy(u: np.ndarray, f: np.ndarray, kernel: BlurKernel, cfg: SolverConfig) -> float:
    """Smoothing objective: fidelity + quadratic smoothness + gradient penalty."""
    ops = SolveOperators.build(kernel, *u.shape)
    return _energy(u, f, ops, cfg)


def _energy(u, f, ops: SolveOperators, cfg: SolverConfig) -> float:
    au = np.real(ifft2(fft2(u) * ops.a_sym))
    grad = forward_gradient(u)
    fidelity = 0.5 * cfg.lam * float(((f - au) ** 2).sum())
    smooth = 0.5 * cfg.mu * float((grad * grad).sum())
    return fidelity + smooth + regularizer_value(grad, cfg)


def augmented_lagrangian(
    state: AdmmState,
    f: np.ndarray,
    kernel: BlurKernel,
    cfg: SolverConfig,
    form: str = "multiplier",
) -> float:
    """Penalized objective with dual term.

    ``form`` selects between the two algebraically equal expansions:
    "multiplier" uses <z, grad u - w> + delta/2 ||grad u - w||^2, while
    "completed-square" folds z into the quadratic and subtracts
    ||z||^2 / (2 delta).
    """
    ops = SolveOperators.build(kernel, *state.u.shape)
    return _lagrangian(state.u, state.w, state.z, state.delta, f, ops, cfg, form)


def _lagrangian(u, w, z, delta, f, ops, cfg, form="multiplier") -> float:
    au = np.real(ifft2(fft2(u) * ops.a_sym))
    grad = forward_gradient(u)
    base = (
        0.5 * cfg.lam * float(((f - au) ** 2).sum())
        + 0.5 * cfg.mu * float((grad * grad).sum())
        + regularizer_value(w, cfg)
    )
    gap = grad - w
    if form == "multiplier":
        return base + float((z * gap).sum()) + 0.5 * delta * float((gap * gap).sum())
    if form == "completed-square":
        shifted = gap + z / delta
        return base + 0.5 * delta * float((shifted * shifted).sum()) - float((z * z).sum()) / (2.0 * delta)
    raise ValueError(f"unknown Lagrangian form: {form!r}")


def u_update(
    w: np.ndarray,
    z: np.ndarray,
    f: np.ndarray,
    kernel: BlurKernel,
    cfg: SolverConfig,
    delta: float,
    ops: SolveOperators | None = None,
    rhs_fixed: np.ndarray | None = None,
) -> np.ndarray:
    """Exact minimizer of the u-subproblem via the FFT quotient.

    Solves [lam A^T A + (mu + delta) adjoint(grad) grad] u = rhs with
    rhs = lam A^T f + delta adjoint(grad)(w - z/delta). Raises
    SingularOperatorError when the frequency-domain denominator dips
    below the floor (the positive-definiteness assumption fails).
    """
    if ops is None:
        ops = SolveOperators.build(kernel, *f.shape)
    if rhs_fixed is None:
        rhs_fixed = cfg.lam * np.conj(ops.a_sym) * fft2(f)
    denom = cfg.lam * ops.a_abs2 + (cfg.mu + delta) * ops.grad_abs2
    if float(denom.min()) < DENOMINATOR_FLOOR:
        raise SingularOperatorError(
            "frequency-domain denominator below floor: ker(A) and ker(grad) "
            "intersect nontrivially, so the u-step operator is not positive definite"
        )
    v = w - z / delta
    numer = rhs_fixed + delta * (
        np.conj(ops.grad_x) * fft2(v[0]) + np.conj(ops.grad_y) * fft2(v[1])
    )
    return np.real(ifft2(numer / denom))


def w_update(u: np.ndarray, z: np.ndarray, cfg: SolverConfig, delta: float) -> np.ndarray:
    """Pixelwise prox of the configured penalty at grad(u) + z/delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    y = forward_gradient(u) + z / delta
    beta = 1.0 / delta
    if cfg.regularizer == "aitv":
        return prox_pair_field(y, cfg.alpha, beta)
    if cfg.regularizer == "tv-aniso":
        return prox_soft_threshold(y, beta)
    if cfg.regularizer == "tv-iso":
        return prox_isotropic_shrink(y, beta)
    return prox_lp_scalar(y, beta, cfg.p)  # tvp


def zeta_smallest_eigenvalue(kernel: BlurKernel, cfg: SolverConfig, rows: int, cols: int) -> float:
    """Smallest eigenvalue of lam A^T A + (mu + delta0) adjoint(grad) grad.

    Positive exactly when A and the gradient share no null direction; it is
    the strong-convexity constant of the u-subproblem at the initial penalty.
    """
    ops = SolveOperators.build(kernel, rows, cols)
    spectrum = cfg.lam * ops.a_abs2 + (cfg.mu + cfg.delta0) * ops.grad_abs2
    return float(spectrum.min())


def descent_slack(
    lagrangian_prev: float,
    lagrangian_new: float,
    z_change: float,
    u_change: float,
    delta: float,
    sigma: float,
    zeta: float,
) -> float:
    """Slack of the per-iteration descent inequality; >= 0 up to round-off.

    The bound says the Lagrangian may rise by at most
    (sigma+1)/(2*delta) * ||dz||^2 - zeta/2 * ||du||^2 per iteration.
    """
    bound = (sigma + 1.0) / (2.0 * delta) * z_change**2 - 0.5 * zeta * u_change**2
    return bound - (lagrangian_new - lagrangian_prev)


def dual_infinity_bound(cfg: SolverConfig) -> float:
    """Componentwise bound on the dual variable implied by the w-step.

    The dual lands in the subdifferential of the penalty, whose elements
    are bounded by 1 + alpha for the weighted difference and by 1 for the
    plain TVs; the ell_p subdifferential is unbounded near zero.
    """
    if cfg.regularizer == "aitv":
        return 1.0 + cfg.alpha
    if cfg.regularizer in ("tv-aniso", "tv-iso"):
        return 1.0
    return float("inf")


def u_step_residual(u, w, z, f, kernel, cfg, delta, ops: SolveOperators) -> float:
    """Relative residual of the u-step normal equations, in the spatial domain."""
    au = np.real(ifft2(fft2(u) * ops.a_sym))
    ata_u = np.real(ifft2(fft2(au) * np.conj(ops.a_sym)))
    lhs = cfg.lam * ata_u + (cfg.mu + delta) * gradient_adjoint(forward_gradient(u))
    atf = np.real(ifft2(fft2(f) * np.conj(ops.a_sym)))
    rhs = cfg.lam * atf + delta * gradient_adjoint(w - z / delta)
    denom = float(np.linalg.norm(rhs))
    return float(np.linalg.norm(lhs - rhs)) / max(denom, np.finfo(float).tiny)


def admm_solve(
    f: np.ndarray,
    kernel: BlurKernel,
    cfg: SolverConfig,
    diagnostics: bool = False,
    callback: Callable[[AdmmState, IterateDiagnostics], None] | None = None,
) -> AdmmResult:
    """Run the splitting iteration until the relative change of u meets eps.

    Starts from the constraint-feasible point u = f, w = grad f, z = 0 (so
    the initial Lagrangian equals the initial energy). Stops when
    ||u_t - u_{t-1}|| / ||u_t|| <= eps (absolute change when ||u_t|| = 0)
    or after max_iters iterations. Identical inputs produce bit-identical
    iterates.
    """
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValueError("input image must be finite")
    rows, cols = f.shape
    ops = SolveOperators.build(kernel, rows, cols)
    rhs_fixed = cfg.lam * np.conj(ops.a_sym) * fft2(f)

    u = f.copy()
    w = forward_gradient(u)
    z = np.zeros_like(w)
    delta = cfg.delta0

    result = AdmmResult(u=u, trace=[], iterations=0, converged=False)
    zeta = None
    lagrangian_prev = None
    if diagnostics:
        zeta = zeta_smallest_eigenvalue(kernel, cfg, rows, cols)
        result.initial_energy = _energy(u, f, ops, cfg)
        lagrangian_prev = _lagrangian(u, w, z, delta, f, ops, cfg)
        result.initial_lagrangian = lagrangian_prev

    converged = False
    for it in range(1, cfg.max_iters + 1):
        u_new = u_update(w, z, f, kernel, cfg, delta, ops=ops, rhs_fixed=rhs_fixed)
        w_new = w_update(u_new, z, cfg, delta)
        gap = forward_gradient(u_new) - w_new
        z_new = z + delta * gap

        if not (
            np.all(np.isfinite(u_new))
            and np.all(np.isfinite(w_new))
            and np.all(np.isfinite(z_new))
        ):
            raise DivergenceError(it)

        u_change = float(np.linalg.norm(u_new - u))
        u_norm = float(np.linalg.norm(u_new))
        rel_change = u_change / u_norm if u_norm > 0 else u_change
        diag = IterateDiagnostics(
            iter=it,
            rel_change=rel_change,
            delta=delta,
            primal_residual=float(np.linalg.norm(gap)),
            z_inf=float(np.abs(z_new).max()),
            z_norm=float(np.linalg.norm(z_new)),
            u_change=u_change,
            z_change=float(np.linalg.norm(z_new - z)),
            w_change=float(np.linalg.norm(w_new - w)),
        )
        if diagnostics:
            diag.energy = _energy(u_new, f, ops, cfg)
            lagrangian_new = _lagrangian(u_new, w_new, z_new, delta * cfg.sigma, f, ops, cfg)
            diag.lagrangian = lagrangian_new
            diag.lemma_slack = descent_slack(
                lagrangian_prev, lagrangian_new, diag.z_change, u_change, delta, cfg.sigma, zeta
            )
            diag.u_residual = u_step_residual(u_new, w, z, f, kernel, cfg, delta, ops)
            lagrangian_prev = lagrangian_new

        u, w, z = u_new, w_new, z_new
        delta *= cfg.sigma
        result.trace.append(diag)
        if callback is not None:
            callback(AdmmState(u=u, w=w, z=z, delta=delta, iter=it), diag)
        if rel_change <= cfg.eps:
            converged = True
            break

    result.u = u
    result.iterations = len(result.trace)
    result.converged = converged
    result.final_energy = _energy(u, f, ops, cfg)
    return result


def check_descent_inequality(result: AdmmResult, zeta: float, cfg: SolverConfig) -> list[float]:
    """Recompute the per-iteration descent slack from a diagnostics trace."""
    if result.initial_lagrangian is None:
        raise ValueError("trace lacks Lagrangian values; rerun with diagnostics=True")
    slacks = []
    prev = result.initial_lagrangian
    for diag in result.trace:
        slacks.append(
            descent_slack(prev, diag.lagrangian, diag.z_change, diag.u_change, diag.delta, cfg.sigma, zeta)
        )
        prev = diag.lagrangian
    return slacks
