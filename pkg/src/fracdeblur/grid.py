"""Image arrays and the small set of vector operations the solver needs.

Images are float64 arrays laid out channel-planar as ``(C, H, W)`` with
``C`` in ``{1, 3}``; a flattened grid is the stacked vector
``[u_r; u_g; u_b]``.  Every function here returns a new array.
"""

import numpy as np


def as_grid(x, copy=False):
    """Coerce ``x`` to a ``(C, H, W)`` float64 grid.

    A 2-D array is read as a single-channel image.  Raises ``ValueError``
    for other ranks, for ``C`` not in ``{1, 3}`` and for non-finite data.
    """
    g = np.array(x, dtype=np.float64) if copy else np.asarray(x, dtype=np.float64)
    if g.ndim == 2:
        g = g[np.newaxis]
    if g.ndim != 3:
        raise ValueError(f"expected a 2-D or (C, H, W) array, got shape {g.shape}")
    if g.shape[0] not in (1, 3):
        raise ValueError(f"channel count must be 1 or 3, got {g.shape[0]}")
    if g.shape[1] < 1 or g.shape[2] < 1:
        raise ValueError(f"empty image of shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("image contains non-finite values")
    return g


def from_hwc(img):
    """Convert an ``(H, W)`` or ``(H, W, C)`` array to a planar grid."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3:
        img = np.moveaxis(img, -1, 0)
    return as_grid(img)


def to_hwc(g):
    """Inverse of :func:`from_hwc`; single-channel grids come back 2-D."""
    g = np.asarray(g)
    if g.shape[0] == 1:
        return g[0]
    return np.moveaxis(g, 0, -1)


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def norm2(g):
    """Euclidean norm of the flattened grid."""
    return float(np.sqrt(np.vdot(g, g).real))


def inner(a, b):
    """Sum of elementwise products."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_shape(a, b)
    return float(np.vdot(a, b).real)


def axpy(alpha, x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    _check_same_shape(x, y)
    return alpha * x + y


def clamp01(g):
    return np.clip(g, 0.0, 1.0)
