"""Grünwald-Letnikov fractional differences on a periodic grid.

``D_x`` runs along rows (axis -2), ``D_y`` along columns (axis -1):

    D_x u[i, j] = sum_{l<K} phi_l u[i - l, j]

with indices wrapped.  The adjoint uses ``u[i + l, j]``.  Gradient fields
are stacked on a leading axis of length 2: ``(D_x u, D_y u)``.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_TAPS = 15


@dataclass(frozen=True, eq=False)
class FracCoeffs:
    alpha: float
    taps: int
    phi: np.ndarray


def gl_coefficients(alpha, taps=DEFAULT_TAPS):
    """``phi_l = (-1)^l binom(alpha, l)`` for ``l < taps``.

    Built with the recurrence ``phi_l = phi_{l-1} (l - 1 - alpha) / l``,
    which is exact for integer orders (the tail is identically zero).
    """
    if not alpha > 0:
        raise ValueError("fractional order must be positive")
    if taps < 2:
        raise ValueError("need at least two taps")
    phi = np.empty(taps)
    phi[0] = 1.0
    for l in range(1, taps):
        phi[l] = phi[l - 1] * (l - 1 - alpha) / l
    phi += 0.0  # integer orders: -0.0 tail taps become +0.0
    phi.flags.writeable = False
    return FracCoeffs(float(alpha), int(taps), phi)


def _check_taps(shape, c):
    if c.taps > min(shape[-2], shape[-1]):
        raise ValueError(f"{c.taps} taps do not fit a {shape[-2]}x{shape[-1]} grid")


def grad_alpha(u, c):
    u = np.asarray(u, dtype=np.float64)
    _check_taps(u.shape, c)
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    for l, w in enumerate(c.phi):
        if w == 0.0:
            continue
        gx += w * np.roll(u, l, axis=-2)
        gy += w * np.roll(u, l, axis=-1)
    return np.stack([gx, gy])


def grad_alpha_adjoint(p, c):
    """``(D_x)^T p[0] + (D_y)^T p[1]``.

    No ``(-1)^alpha`` factor is applied; the solver uses the plain transpose.
    """
    p = np.asarray(p, dtype=np.float64)
    _check_taps(p.shape, c)
    out = np.zeros_like(p[0])
    for l, w in enumerate(c.phi):
        if w == 0.0:
            continue
        out += w * (np.roll(p[0], -l, axis=-2) + np.roll(p[1], -l, axis=-1))
    return out


def ftv_norm(u, c):
    """Isotropic fractional TV: sum over pixels and channels of ``|grad^alpha u|``."""
    g = grad_alpha(u, c)
    return float(np.sum(np.sqrt(g[0] ** 2 + g[1] ** 2)))


def estimate_grad_norm(c, height, width, iters=50, rtol=1e-6, seed=0):
    """Power-iteration estimate of the spectral norm of ``grad^alpha``.

    Returns the square root of the Rayleigh quotient of ``G^T G`` after at
    most ``iters`` steps, stopping early once it changes by less than
    ``rtol`` relatively.
    """
    x = np.random.default_rng(seed).standard_normal((height, width))
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = grad_alpha_adjoint(grad_alpha(x, c), c)
        new = float(np.vdot(x, y))
        nrm = np.linalg.norm(y)
        if nrm == 0.0:
            return 0.0
        x = y / nrm
        if est > 0 and abs(new - est) <= rtol * est:
            est = new
            break
        est = new
    return float(np.sqrt(est))
