"""Deterministic synthetic test images (stand-ins for natural photographs)."""

import numpy as np


def phantom(size=64):
    """Piecewise-smooth grayscale scene: ramp background, disc, bars, square.

    Returns a ``(1, size, size)`` grid in ``[0, 1]``.
    """
    y, x = np.mgrid[0:size, 0:size] / float(size)
    img = 0.25 + 0.2 * x
    disc = (x - 0.32) ** 2 + (y - 0.35) ** 2 < 0.2**2
    img[disc] = 0.85 - 0.25 * ((x[disc] - 0.32) ** 2 + (y[disc] - 0.35) ** 2) / 0.04
    square = (np.abs(x - 0.72) < 0.14) & (np.abs(y - 0.7) < 0.14)
    img[square] = 0.1
    bars = (y > 0.12) & (y < 0.3) & (x > 0.58) & (x < 0.9)
    img[bars] = np.where(np.floor((x[bars] - 0.58) * size / 3) % 2 == 0, 0.95, 0.45)
    ring = np.abs(np.hypot(x - 0.3, y - 0.78) - 0.12) < 0.025
    img[ring] = 0.7
    return img[np.newaxis]


def textured(size=64):
    """Phantom plus a smooth sinusoidal texture; exercises SSIM/FSIM."""
    y, x = np.mgrid[0:size, 0:size] / float(size)
    tex = 0.08 * np.sin(2 * np.pi * 5 * x) * np.cos(2 * np.pi * 3 * y)
    return np.clip(phantom(size) + tex, 0.0, 1.0)


def color_phantom(size=64):
    """Three-channel scene with channel-specific structure, ``(3, size, size)``."""
    base = phantom(size)[0]
    y, x = np.mgrid[0:size, 0:size] / float(size)
    r = base
    g = np.clip(0.6 * base + 0.35 * ((x - 0.5) ** 2 + (y - 0.5) ** 2 < 0.09), 0.0, 1.0)
    b = np.clip(0.9 - 0.7 * base + 0.1 * np.sin(2 * np.pi * 4 * y), 0.0, 1.0)
    return np.stack([r, g, b])
