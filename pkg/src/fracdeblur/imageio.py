"""Image files: PNG (8/16-bit, gray or RGB), Netpbm PGM/PPM and ``.npy``.

Integer formats are scaled to ``[0, 1]`` by the format's maximum value.
``.npy`` files hold ``(H, W)`` or ``(H, W, 3)`` float arrays, lossless.
"""

import hashlib
from importlib import resources
from pathlib import Path

import numpy as np

from .grid import clamp01, from_hwc, to_hwc

SAMPLES = ("phantom64", "textured64", "phantom128", "color32", "color64")


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_netpbm(path):
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    # header: magic, width, height, maxval, with '#' comments
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    magic = tokens[0]
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    channels = {"P2": 1, "P5": 1, "P3": 3, "P6": 3}.get(magic)
    if channels is None:
        raise ValueError(f"{path}: unsupported Netpbm type {magic}")
    count = width * height * channels
    if magic in ("P2", "P3"):
        values = np.array(data[pos:].split()[:count], dtype=np.int64)
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        values = np.frombuffer(data[pos + 1 : pos + 1 + count * dtype.itemsize], dtype=dtype)
    if values.size != count:
        raise ValueError(f"{path}: expected {count} samples, found {values.size}")
    shape = (height, width) if channels == 1 else (height, width, 3)
    return values.reshape(shape).astype(np.float64) / maxval, 16 if maxval > 255 else 8


def _write_netpbm(path, img, bitdepth):
    maxval = 65535 if bitdepth == 16 else 255
    q = np.round(clamp01(img) * maxval).astype(np.int64)
    magic = "P2" if q.ndim == 2 else "P3"
    h, w = q.shape[:2]
    rows = [" ".join(str(v) for v in row.ravel()) for row in q]
    Path(path).write_text(f"{magic}\n{w} {h}\n{maxval}\n" + "\n".join(rows) + "\n")


def read_image(path):
    """Read an image file as a planar grid.

    Returns ``(grid, bitdepth)``; ``bitdepth`` is 8, 16 or 0 for float data.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    suffix = path.suffix.lower()
    if suffix == ".npy":
        return from_hwc(np.load(path)), 0
    if suffix in (".pgm", ".ppm", ".pnm"):
        img, depth = _read_netpbm(path)
        return from_hwc(img), depth
    if suffix == ".png":
        import cv2

        raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
        if raw is None:
            raise OSError(f"cannot read {path}")
        depth = 16 if raw.dtype == np.uint16 else 8
        img = raw.astype(np.float64) / (65535.0 if depth == 16 else 255.0)
        if img.ndim == 3:
            img = img[..., 2::-1] if img.shape[2] >= 3 else img[..., 0]
        return from_hwc(img), depth
    raise ValueError(f"unsupported image format: {path.suffix}")


def write_image(path, grid, bitdepth=8):
    """Write a planar grid; values are clamped to ``[0, 1]`` first."""
    path = Path(path)
    img = to_hwc(np.asarray(grid))
    suffix = path.suffix.lower()
    if suffix == ".npy":
        np.save(path, img)
        return path
    if bitdepth not in (8, 16):
        bitdepth = 16
    if suffix in (".pgm", ".ppm", ".pnm"):
        _write_netpbm(path, img, bitdepth)
        return path
    if suffix == ".png":
        import cv2

        maxval = 65535 if bitdepth == 16 else 255
        q = np.round(clamp01(img) * maxval).astype(np.uint16 if bitdepth == 16 else np.uint8)
        if q.ndim == 3:
            q = q[..., ::-1]
        if not cv2.imwrite(str(path), q):
            raise OSError(f"cannot write {path}")
        return path
    raise ValueError(f"unsupported image format: {path.suffix}")


def sample_path(name):
    """Path of a bundled synthetic test image."""
    if name not in SAMPLES:
        raise ValueError(f"unknown sample {name!r}; choose from {SAMPLES}")
    ext = ".ppm" if name.startswith("color") else ".pgm"
    return Path(str(resources.files("fracdeblur") / "data" / (name + ext)))


def load_sample(name):
    return read_image(sample_path(name))[0]
