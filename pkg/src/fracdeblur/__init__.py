"""Restoration of blurred images corrupted by impulse noise.

The model combines an L1 data term, an L1 - beta*L2 penalty on framelet
coefficients and fractional-order total variation, and is solved by ADMM
with a primal-dual inner step.  Grayscale and cross-channel-blurred colour
images are supported.
"""

from .degrade import (
    ColorBlurSpec,
    Kernel,
    NoiseSpec,
    add_impulse_noise,
    blur_color,
    blur_gray,
    color_preset,
    make_average_kernel,
    make_gaussian_kernel,
    make_motion_kernel,
    parse_kernel,
)
from .metrics import QualityReport, evaluate
from .solver import IterationTrace, NumericalAbort, SolverConfig, SolverState, restore
from .spectral import SpectralOperator

__version__ = "0.1.0"

__all__ = [
    "ColorBlurSpec",
    "IterationTrace",
    "Kernel",
    "NoiseSpec",
    "NumericalAbort",
    "QualityReport",
    "SolverConfig",
    "SolverState",
    "SpectralOperator",
    "add_impulse_noise",
    "blur_color",
    "blur_gray",
    "color_preset",
    "evaluate",
    "make_average_kernel",
    "make_gaussian_kernel",
    "make_motion_kernel",
    "parse_kernel",
    "restore",
]
