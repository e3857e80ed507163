"""Blur kernels, cross-channel colour blur and impulse noise.

Forward model: ``f = k (*) u + noise`` with periodic convolution; noise is
applied after the blur.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import as_grid
from .spectral import SpectralOperator, dft2, idft2, kernel_to_otf


@dataclass(frozen=True, eq=False)
class Kernel:
    """2-D blur kernel; centre is ``(rows // 2, cols // 2)``."""

    weights: np.ndarray
    name: str = ""

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.size == 0:
            raise ValueError("kernel weights must be a non-empty 2-D array")
        if not np.all(np.isfinite(w)):
            raise ValueError("kernel weights must be finite")
        if np.any(w < 0):
            raise ValueError("kernel weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def rows(self):
        return self.weights.shape[0]

    @property
    def cols(self):
        return self.weights.shape[1]

    def save(self, path):
        """Write the text format: ``rows cols`` then row-major weights."""
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(repr(float(v)) for v in row) for row in self.weights]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        tokens = Path(path).read_text().split()
        if len(tokens) < 2:
            raise ValueError(f"{path}: missing 'rows cols' header")
        rows, cols = int(tokens[0]), int(tokens[1])
        values = [float(t) for t in tokens[2:]]
        if rows < 1 or cols < 1 or len(values) != rows * cols:
            raise ValueError(f"{path}: expected {rows}x{cols} weights, found {len(values)}")
        return cls(np.reshape(values, (rows, cols)), name=Path(path).stem)


def make_average_kernel(r1, r2):
    if r1 < 1 or r2 < 1:
        raise ValueError("average kernel dimensions must be positive")
    return Kernel(np.full((r1, r2), 1.0 / (r1 * r2)), name=f"A([{r1},{r2}])")


def make_gaussian_kernel(hsize, sigma):
    if hsize < 1:
        raise ValueError("hsize must be positive")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.arange(hsize) - (hsize - 1) / 2.0
    g = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / (2.0 * sigma**2))
    return Kernel(g / g.sum(), name=f"G({hsize},{sigma:g})")


def make_motion_kernel(length, theta):
    """Linear motion of ``length`` pixels at ``theta`` degrees counterclockwise.

    ``length`` unit-spaced sample points on a segment through the kernel
    centre each carry equal mass, spread to the four surrounding pixels by
    bilinear weights.  The support is cropped symmetrically about the
    centre, so the kernel always has odd dimensions.
    """
    if length < 1:
        raise ValueError("motion length must be at least 1")
    t = np.arange(length) - (length - 1) / 2.0
    rad = np.deg2rad(theta)
    # rows grow downwards, so counterclockwise means negative row offset
    dx = t * np.cos(rad)
    dy = -t * np.sin(rad)
    dx[np.abs(dx) < 1e-12] = 0.0
    dy[np.abs(dy) < 1e-12] = 0.0
    half = int(np.ceil(np.max(np.abs(np.concatenate([dx, dy]))))) + 1
    size = 2 * half + 1
    k = np.zeros((size, size))
    for x, y in zip(dx + half, dy + half):
        x0, y0 = int(np.floor(x)), int(np.floor(y))
        fx, fy = x - x0, y - y0
        k[y0, x0] += (1 - fx) * (1 - fy)
        if fx > 0:
            k[y0, x0 + 1] += fx * (1 - fy)
        if fy > 0:
            k[y0 + 1, x0] += (1 - fx) * fy
        if fx > 0 and fy > 0:
            k[y0 + 1, x0 + 1] += fx * fy
    k[k < 1e-12] = 0.0
    rows = np.nonzero(k.any(axis=1))[0]
    cols = np.nonzero(k.any(axis=0))[0]
    rr = max(half - rows[0], rows[-1] - half)
    rc = max(half - cols[0], cols[-1] - half)
    k = k[half - rr : half + rr + 1, half - rc : half + rc + 1]
    return Kernel(k / k.sum(), name=f"M({length},{theta:g})")


def parse_kernel(text):
    """Parse ``gaussian:7,4``, ``average:11,11`` or ``motion:35,135``.

    The bracket shorthands ``G(7,4)``, ``A([11,11])`` and ``M(35,135)``
    are accepted as well.
    """
    s = text.strip().replace(" ", "")
    for short, long_ in (("G(", "gaussian:"), ("A(", "average:"), ("M(", "motion:")):
        if s.startswith(short) and s.endswith(")"):
            s = long_ + s[2:-1].replace("[", "").replace("]", "")
    kind, _, args = s.partition(":")
    try:
        vals = [float(a) for a in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad kernel spec {text!r}") from None
    if kind == "gaussian" and len(vals) == 2:
        return make_gaussian_kernel(int(vals[0]), vals[1])
    if kind == "average" and len(vals) in (1, 2):
        return make_average_kernel(int(vals[0]), int(vals[-1]))
    if kind == "motion" and len(vals) == 2:
        return make_motion_kernel(int(vals[0]), vals[1])
    if kind == "identity" and not vals:
        return Kernel(np.ones((1, 1)), name="identity")
    raise ValueError(f"bad kernel spec {text!r}")


@dataclass(frozen=True, eq=False)
class ColorBlurSpec:
    """3x3 cross-channel blur: output channel i is ``sum_j w_ij (k_ij * u_j)``."""

    weights: np.ndarray
    kernels: tuple

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (3, 3):
            raise ValueError("colour blur weights must be 3x3")
        ks = tuple(tuple(row) for row in self.kernels)
        if len(ks) != 3 or any(len(row) != 3 for row in ks):
            raise ValueError("colour blur needs a 3x3 grid of kernels")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kernels", ks)

    @classmethod
    def uniform(cls, weights, kernel):
        """Every block uses the same kernel, scaled by ``weights``."""
        return cls(weights, tuple((kernel,) * 3 for _ in range(3)))

    @classmethod
    def diagonal(cls, kernels, scale=1.0):
        eye = Kernel(np.ones((1, 1)))
        ks = [[kernels[i] if i == j else eye for j in range(3)] for i in range(3)]
        return cls(scale * np.eye(3), ks)

    def operator(self, height, width):
        return SpectralOperator.from_blocks(self.weights, self.kernels, height, width)

    def to_json(self):
        return {
            "weights": self.weights.tolist(),
            "kernels": [[k.weights.tolist() for k in row] for row in self.kernels],
        }

    @classmethod
    def from_json(cls, obj):
        kernels = [[Kernel(np.asarray(k)) for k in row] for row in obj["kernels"]]
        return cls(obj["weights"], kernels)


def blur_gray(u, kernel):
    u = as_grid(u)
    if u.shape[0] != 1:
        raise ValueError("blur_gray expects a single-channel image")
    otf = kernel_to_otf(kernel, *u.shape[1:])
    return idft2(dft2(u) * otf)


def blur_color(u, spec):
    u = as_grid(u)
    if u.shape[0] != 3:
        raise ValueError("blur_color expects a 3-channel image")
    return spec.operator(*u.shape[1:]).apply(u)


SALT_PEPPER = "salt_pepper"
RANDOM_VALUED = "random_valued"
_NOISE_ALIASES = {
    "sp": SALT_PEPPER,
    "salt_pepper": SALT_PEPPER,
    "saltpepper": SALT_PEPPER,
    "rv": RANDOM_VALUED,
    "random_valued": RANDOM_VALUED,
    "randomvalued": RANDOM_VALUED,
}


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    density: float
    seed: int = 0

    def __post_init__(self):
        kind = _NOISE_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"noise density {self.density} outside [0, 1]")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "density", float(self.density))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def parse(cls, text, seed=0):
        """Parse ``sp:0.1`` / ``rv:0.3``."""
        kind, _, dens = text.partition(":")
        if not dens:
            raise ValueError(f"bad noise spec {text!r}, expected kind:density")
        return cls(kind, float(dens), seed)

    @property
    def short(self):
        return "sp" if self.kind == SALT_PEPPER else "rv"


def add_impulse_noise(u, spec):
    """Replace each pixel of each channel with probability ``spec.density``.

    Draws come from a Philox counter-based stream keyed by the seed; draw
    ``(s, c, i, j)`` is a fixed counter position, so the result depends only
    on the seed and the image shape.
    """
    u = as_grid(u)
    if spec.density == 0.0:
        return u.copy()
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    draws = rng.random((3, *u.shape))
    hit = draws[0] < spec.density
    if spec.kind == SALT_PEPPER:
        values = (draws[1] < 0.5).astype(np.float64)
    else:
        values = draws[2]
    return np.where(hit, values, u)


def color_preset(name, scale=1.0):
    """Cross-channel blur matrices used for the colour test images.

    ``scale`` shrinks every kernel size (lengths and sigmas) so a preset
    fits small images; sizes are rounded and kept odd where they were odd.
    """
    def n(v):
        s = max(1, int(round(v * scale)))
        return s + 1 if v % 2 == 1 and s % 2 == 0 else s

    def A(r):
        return make_average_kernel(n(r), n(r))

    def G(h, s):
        return make_gaussian_kernel(n(h), s * scale)

    def M(length, theta):
        return make_motion_kernel(n(length), theta)

    name = name.lower()
    if name == "lena":
        w = [[0.7, 0.15, 0.15], [0.1, 0.8, 0.1], [0.0, 0.2, 0.6]]
        ks = [[A(15), G(11, 9), G(31, 13)], [G(21, 11), A(17), A(13)], [M(41, 90), M(21, 45), M(61, 135)]]
        return ColorBlurSpec(w, ks)
    if name == "house":
        return ColorBlurSpec.diagonal([A(5), A(7), A(9)], scale=1.0 / 3.0)
    if name == "peppers":
        w = [[0.8, 0.1, 0.1], [0.15, 0.7, 0.15], [0.2, 0.2, 0.6]]
        ks = [[A(11), G(11, 5), M(21, 135)] for _ in range(3)]
        return ColorBlurSpec(w, ks)
    if name == "plate":
        w = [[0.8, 0.1, 0.1], [0.15, 0.7, 0.15], [0.2, 0.2, 0.6]]
        return ColorBlurSpec.uniform(w, M(41, 135))
    raise ValueError(f"unknown colour preset {name!r}")


# noise kind each colour test image was degraded with
PRESET_NOISE = {"lena": SALT_PEPPER, "house": SALT_PEPPER, "plate": SALT_PEPPER, "peppers": RANDOM_VALUED}
