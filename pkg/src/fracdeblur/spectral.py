"""Periodic convolution operators in the Fourier domain.

Under periodic boundary conditions a blur is a block-circulant matrix with
circulant blocks, diagonalised by the 2-D DFT.  A :class:`SpectralOperator`
stores its eigenvalues as a ``(C, C, H, W)`` complex array: block ``(i, j)``
maps input channel ``j`` to output channel ``i``.
"""

from dataclasses import dataclass

import numpy as np

# Below this |det| (relative to the matrix scale) the adjugate solve is
# replaced by LU with partial pivoting.
PIVOT_FLOOR = 1e-14


def dft2(g):
    """Unnormalised forward 2-D DFT over the last two axes."""
    return np.fft.fft2(g, axes=(-2, -1))


def idft2(G):
    """Inverse 2-D DFT over the last two axes, real part."""
    return np.fft.ifft2(G, axes=(-2, -1)).real


def _weights(kernel):
    return np.asarray(getattr(kernel, "weights", kernel), dtype=np.float64)


def kernel_to_otf(kernel, height, width):
    """Eigenvalue grid of circular convolution with ``kernel`` on an
    ``height`` x ``width`` torus.

    The kernel is zero-padded and rolled so that its centre, index
    ``(rows // 2, cols // 2)``, lands on ``(0, 0)``.
    """
    k = _weights(kernel)
    if k.ndim != 2:
        raise ValueError("kernel must be 2-D")
    r, c = k.shape
    if r > height or c > width:
        raise ValueError(f"kernel {r}x{c} larger than image {height}x{width}")
    pad = np.zeros((height, width))
    pad[:r, :c] = k
    pad = np.roll(pad, (-(r // 2), -(c // 2)), axis=(0, 1))
    return np.fft.fft2(pad)


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=np.complex128)
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[0] not in (1, 3):
            raise ValueError(f"blocks must have shape (C, C, H, W), got {b.shape}")
        object.__setattr__(self, "blocks", b)

    @property
    def channels(self):
        return self.blocks.shape[0]

    @property
    def shape(self):
        return self.blocks.shape[2:]

    @classmethod
    def identity(cls, channels, height, width):
        b = np.zeros((channels, channels, height, width), dtype=np.complex128)
        for i in range(channels):
            b[i, i] = 1.0
        return cls(b)

    @classmethod
    def from_kernel(cls, kernel, height, width, channels=1):
        """Same kernel on every channel, no cross-channel coupling."""
        otf = kernel_to_otf(kernel, height, width)
        b = np.zeros((channels, channels, height, width), dtype=np.complex128)
        for i in range(channels):
            b[i, i] = otf
        return cls(b)

    @classmethod
    def from_blocks(cls, weights, kernels, height, width):
        """Cross-channel operator ``sum_j w_ij (k_ij * u_j)``.

        Blocks with zero weight are kept (as zero) rather than dropped.
        """
        weights = np.asarray(weights, dtype=np.float64)
        n = weights.shape[0]
        b = np.zeros((n, n, height, width), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                b[i, j] = weights[i, j] * kernel_to_otf(kernels[i][j], height, width)
        return cls(b)

    def _check(self, x):
        if x.shape != (self.channels, *self.shape):
            raise ValueError(f"operator expects {(self.channels, *self.shape)}, got {x.shape}")

    def apply_hat(self, U):
        return np.einsum("ijhw,jhw->ihw", self.blocks, U)

    def adjoint_hat(self, Y):
        return np.einsum("jihw,jhw->ihw", self.blocks.conj(), Y)

    def apply(self, u):
        u = np.asarray(u)
        self._check(u)
        return idft2(self.apply_hat(dft2(u)))

    def adjoint(self, y):
        y = np.asarray(y)
        self._check(y)
        return idft2(self.adjoint_hat(dft2(y)))

    def gram(self):
        """Per-frequency ``Lambda^H Lambda`` as an ``(H, W, C, C)`` array."""
        return np.einsum("kihw,kjhw->hwij", self.blocks.conj(), self.blocks)


def solve_scalar_freq(op, mu1, c, rhs):
    """Solve ``(mu1 |Lambda|^2 + c) x = rhs`` frequency by frequency."""
    if op.channels != 1:
        raise ValueError("solve_scalar_freq needs a single-channel operator")
    diag = mu1 * np.abs(op.blocks[0, 0]) ** 2 + c
    bad = np.argwhere(~(diag > 0))
    if bad.size:
        raise np.linalg.LinAlgError(
            f"nonpositive diagonal {diag[tuple(bad[0])]:.3e} at frequency {tuple(int(i) for i in bad[0])}"
        )
    rhs = np.asarray(rhs)
    return rhs / diag


def _adjugate_solve(M, b):
    # closed-form 3x3 inverse, rows of the adjugate
    a, bb, cc = M[..., 0, 0], M[..., 0, 1], M[..., 0, 2]
    d, e, f = M[..., 1, 0], M[..., 1, 1], M[..., 1, 2]
    g, h, i = M[..., 2, 0], M[..., 2, 1], M[..., 2, 2]
    A = e * i - f * h
    B = -(d * i - f * g)
    C = d * h - e * g
    det = a * A + bb * B + cc * C
    adj = np.stack(
        [
            np.stack([A, -(bb * i - cc * h), bb * f - cc * e], axis=-1),
            np.stack([B, a * i - cc * g, -(a * f - cc * d)], axis=-1),
            np.stack([C, -(a * h - bb * g), a * e - bb * d], axis=-1),
        ],
        axis=-2,
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.einsum("...ij,...j->...i", adj, b) / det[..., None]
    return x, det


def solve_block_freq(op, mu1, c, rhs):
    """Solve ``(mu1 Lambda_i^H Lambda_i + c I) x_i = rhs_i`` at every frequency.

    ``rhs`` has shape ``(3, H, W)``.  Uses the closed-form adjugate; any
    frequency whose determinant falls under the pivot floor is re-solved by
    LU with partial pivoting.  Raises ``LinAlgError`` naming the first
    frequency whose system is singular or not positive definite.
    """
    if op.channels != 3:
        raise ValueError("solve_block_freq needs a 3-channel operator")
    M = mu1 * op.gram()
    M[..., range(3), range(3)] += c
    if not c > 0:
        # c > 0 makes M Hermitian positive definite; otherwise check it.
        lo = np.linalg.eigvalsh(M)[..., 0]
        bad = np.argwhere(~(lo > 0))
        if bad.size:
            idx = tuple(int(v) for v in bad[0])
            raise np.linalg.LinAlgError(f"indefinite system at frequency {idx} (min eigenvalue {lo[idx]:.3e})")
    b = np.moveaxis(np.asarray(rhs, dtype=np.complex128), 0, -1)
    x, det = _adjugate_solve(M, b)
    scale = np.max(np.abs(M), axis=(-2, -1)) ** 3
    weak = ~(np.abs(det) >= PIVOT_FLOOR * scale)
    if np.any(weak):
        try:
            x[weak] = np.linalg.solve(M[weak], b[weak][..., None])[..., 0]
        except np.linalg.LinAlgError:
            idx = tuple(int(v) for v in np.argwhere(weak)[0])
            raise np.linalg.LinAlgError(f"singular system at frequency {idx}") from None
    return np.moveaxis(x, -1, 0)
