"""Smoothing-and-thresholding image segmentation with a weighted
anisotropic-isotropic TV regularizer, solved by ADMM."""

from .admm import (
    AdmmResult,
    AdmmState,
    DivergenceError,
    IterateDiagnostics,
    SingularOperatorError,
    SolverConfig,
    admm_solve,
    augmented_lagrangian,
    check_descent_inequality,
    dual_infinity_bound,
    energy,
    u_update,
    w_update,
    zeta_smallest_eigenvalue,
)
from .corruption import NoiseSpec, add_noise, make_average_kernel, make_motion_kernel
from .grids import (
    BlurKernel,
    convolve_periodic,
    field_norms,
    forward_gradient,
    gradient_adjoint,
    identity_kernel,
)
from .metrics import DiceResult, dice, psnr
from .pipeline import (
    IihConfig,
    MultiChannelImage,
    SegmentationResult,
    iih_channel,
    kmeans_threshold,
    lift_to_lab,
    rescale_channels,
    segment,
    smooth_channels,
)
from .prox import (
    ProxParams,
    prox_grid_oracle,
    prox_isotropic_shrink,
    prox_l1_minus_alpha_l2,
    prox_lp_scalar,
    prox_soft_threshold,
)
from .synth import Shape, synthesize

__version__ = "0.1.0"

__all__ = [
    "AdmmResult",
    "AdmmState",
    "BlurKernel",
    "DiceResult",
    "DivergenceError",
    "IihConfig",
    "IterateDiagnostics",
    "MultiChannelImage",
    "NoiseSpec",
    "ProxParams",
    "SegmentationResult",
    "Shape",
    "SingularOperatorError",
    "SolverConfig",
    "add_noise",
    "admm_solve",
    "augmented_lagrangian",
    "check_descent_inequality",
    "convolve_periodic",
    "dice",
    "dual_infinity_bound",
    "energy",
    "field_norms",
    "forward_gradient",
    "gradient_adjoint",
    "identity_kernel",
    "iih_channel",
    "kmeans_threshold",
    "lift_to_lab",
    "make_average_kernel",
    "make_motion_kernel",
    "prox_grid_oracle",
    "prox_isotropic_shrink",
    "prox_l1_minus_alpha_l2",
    "prox_lp_scalar",
    "prox_soft_threshold",
    "psnr",
    "rescale_channels",
    "segment",
    "smooth_channels",
    "synthesize",
    "u_update",
    "w_update",
    "zeta_smallest_eigenvalue",
]
