"""Small exhaustive parameter search, scored by SSIM against the clean image."""

from fracdeblur.bench import grid_search
from fracdeblur.degrade import NoiseSpec, add_impulse_noise, make_average_kernel
from fracdeblur.imageio import load_sample
from fracdeblur.solver import SolverConfig
from fracdeblur.spectral import SpectralOperator

ref = load_sample("phantom128")
A = SpectralOperator.from_kernel(make_average_kernel(11, 11), 128, 128)
f = add_impulse_noise(A.apply(ref), NoiseSpec("sp", 0.1, seed=1))

grid = {"lam2": [0.02, 0.05], "mu1": [10.0, 40.0], "alpha": [1.0, 1.6]}
best, score, results = grid_search(ref, f, A, grid, base=SolverConfig(record_objective=False))
for overrides, s, iters in results:
    print(f"{overrides}  SSIM {s:.4f}  ({iters} iterations)")
print("best:", {k: getattr(best, k) for k in grid}, "SSIM", round(score, 4))
