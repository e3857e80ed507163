"""Tour of the building blocks: blur kernels, spectral blur, fractional
differences and the framelet transform."""

import numpy as np

from fracdeblur import framelet
from fracdeblur.degrade import make_average_kernel, make_gaussian_kernel, make_motion_kernel
from fracdeblur.fracdiff import estimate_grad_norm, ftv_norm, gl_coefficients, grad_alpha
from fracdeblur.imageio import load_sample
from fracdeblur.spectral import SpectralOperator

# Three kernel families.  All are normalised, so blurring keeps the mean.
for k in (make_average_kernel(5, 5), make_gaussian_kernel(7, 4), make_motion_kernel(9, 135)):
    print(f"{k.name:>16}: shape {k.weights.shape}, sum {k.weights.sum():.12f}")

# The motion kernel is a rasterised line through the centre.
print(np.round(make_motion_kernel(5, 45).weights, 3))

# Periodic blur is diagonal in the Fourier domain, so applying it is a
# pointwise product of spectra.
u = load_sample("phantom64")
A = SpectralOperator.from_kernel(make_gaussian_kernel(7, 4), 64, 64)
blurred = A.apply(u)
print("mean before/after blur:", u.mean(), blurred.mean())

# Grünwald-Letnikov weights: integer orders give ordinary differences,
# fractional orders have a long, decaying tail.
for alpha in (1.0, 1.3, 2.0):
    print(f"alpha={alpha}:", np.round(gl_coefficients(alpha, 6).phi, 4))

c = gl_coefficients(1.3)
g = grad_alpha(u, c)
print("gradient field shape:", g.shape, " FTV of phantom:", round(ftv_norm(u, c), 2),
      " FTV of blurred:", round(ftv_norm(blurred, c), 2))
print("operator norm of the fractional gradient ~", round(estimate_grad_norm(c, 64, 64), 3))

# One level of the undecimated piecewise-linear framelet: 9 subbands,
# and synthesis undoes analysis exactly.
w = framelet.analysis(u)
print("framelet coefficients:", w.shape,
      " reconstruction error:", np.abs(framelet.synthesis(w) - u).max())
