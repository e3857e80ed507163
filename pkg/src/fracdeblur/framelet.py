"""One-level undecimated piecewise-linear B-spline framelet.

Masks: ``h0 = [1, 2, 1]/4``, ``h1 = sqrt(2)/4 [1, 0, -1]``,
``h2 = [-1, 2, -1]/4``.  Subband ``(i, j)`` filters with ``h_i`` along
axis -2 and ``h_j`` along axis -1, periodically.  Coefficients have shape
``(..., 3, 3, H, W)`` and ``synthesis(analysis(u)) == u``.
"""

import numpy as np

MASKS = np.array(
    [
        [0.25, 0.5, 0.25],
        [np.sqrt(2) / 4, 0.0, -np.sqrt(2) / 4],
        [-0.25, 0.5, -0.25],
    ]
)


def _correlate(x, h, axis):
    # out[n] = h[0] x[n-1] + h[1] x[n] + h[2] x[n+1]
    return h[0] * np.roll(x, 1, axis=axis) + h[1] * x + h[2] * np.roll(x, -1, axis=axis)


def _correlate_t(x, h, axis):
    return h[0] * np.roll(x, -1, axis=axis) + h[1] * x + h[2] * np.roll(x, 1, axis=axis)


def analysis(u):
    u = np.asarray(u, dtype=np.float64)
    rows = [_correlate(u, h, axis=-2) for h in MASKS]
    return np.stack([np.stack([_correlate(r, h, axis=-1) for h in MASKS], axis=-3) for r in rows], axis=-4)


def synthesis(coeffs):
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[-4:-2] != (3, 3):
        raise ValueError(f"expected (..., 3, 3, H, W) coefficients, got {coeffs.shape}")
    out = 0.0
    for i, hi in enumerate(MASKS):
        acc = sum(_correlate_t(coeffs[..., i, j, :, :], hj, axis=-1) for j, hj in enumerate(MASKS))
        out = out + _correlate_t(acc, hi, axis=-2)
    return out
