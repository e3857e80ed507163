"""Degrade -> restore -> evaluate benchmark matrix and parameter search."""

import csv
import itertools
import logging
import re
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imageio, metrics
from .degrade import PRESET_NOISE, NoiseSpec, add_impulse_noise, color_preset, parse_kernel
from .solver import SolverConfig, restore
from .spectral import SpectralOperator

log = logging.getLogger(__name__)

HEADER = ["image", "kernel", "noise", "density", "psnr", "snr", "isnr", "reerr", "ssim", "fsim", "iters", "ms"]


@dataclass
class Suite:
    images: list = field(default_factory=lambda: ["phantom64", "textured64"])
    kernels: list = field(default_factory=lambda: ["gaussian:7,4", "average:5,5", "motion:9,135"])
    noises: list = field(default_factory=lambda: ["sp", "rv"])
    densities: list = field(default_factory=lambda: [0.1, 0.2, 0.3, 0.4])
    color_images: list = field(default_factory=lambda: ["color64"])
    color_presets: list = field(default_factory=lambda: ["house", "lena", "peppers", "plate"])
    preset_scale: float = 0.25
    seed: int = 0
    config: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown suite fields: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Cell:
    image: str
    kernel: str
    noise: str
    density: float
    seed: int
    preset_scale: float = 1.0

    @property
    def key(self):
        raw = f"{Path(self.image).stem}__{self.kernel}__{self.noise}__{self.density:g}"
        return re.sub(r"[^A-Za-z0-9_.-]+", "-", raw)

    @property
    def is_color(self):
        return self.kernel.startswith("preset:")


def cells(suite):
    """Expand a suite into gray and colour cells, in a fixed order."""
    gray, color = [], []

    def seed_for(key):
        return (suite.seed * 1_000_003 + zlib.crc32(key.encode())) % 2**63

    for img, ker, nz, d in itertools.product(suite.images, suite.kernels, suite.noises, suite.densities):
        c = Cell(img, ker, nz, float(d), 0)
        gray.append(Cell(img, ker, nz, float(d), seed_for(c.key)))
    for img, preset, d in itertools.product(suite.color_images, suite.color_presets, suite.densities):
        nz = NoiseSpec(PRESET_NOISE[preset], 0.0).short
        c = Cell(img, f"preset:{preset}", nz, float(d), 0, suite.preset_scale)
        color.append(Cell(img, c.kernel, nz, float(d), seed_for(c.key), suite.preset_scale))
    return gray, color


def _load(image):
    if image in imageio.SAMPLES:
        return imageio.load_sample(image)
    return imageio.read_image(image)[0]


def build_operator(kernel, shape, preset_scale=1.0):
    """Operator for a kernel spec string or ``preset:<name>`` on a ``(C, H, W)`` shape."""
    c, h, w = shape
    if kernel.startswith("preset:"):
        if c != 3:
            raise ValueError("colour presets need a 3-channel image")
        return color_preset(kernel.split(":", 1)[1], preset_scale).operator(h, w)
    return SpectralOperator.from_kernel(parse_kernel(kernel), h, w, channels=c)


def run_cell(cell, config, out_dir=None, with_fsim=True):
    """Run one cell; returns the CSV row as a dict."""
    ref = _load(cell.image)
    A = build_operator(cell.kernel, ref.shape, cell.preset_scale)
    noisy = add_impulse_noise(A.apply(ref), NoiseSpec(cell.noise, cell.density, cell.seed))
    t0 = time.perf_counter()
    restored, trace = restore(noisy, A, config)
    ms = (time.perf_counter() - t0) * 1e3
    rep = metrics.evaluate(restored, ref, noisy, with_fsim=with_fsim)
    if out_dir is not None:
        cdir = Path(out_dir) / "cells"
        cdir.mkdir(parents=True, exist_ok=True)
        imageio.write_image(cdir / f"{cell.key}_degraded.png", noisy, 16)
        imageio.write_image(cdir / f"{cell.key}_restored.png", restored, 16)
    row = dict(image=Path(cell.image).stem, kernel=cell.kernel, noise=cell.noise, density=cell.density)
    row.update(rep.to_dict())
    row.update(iters=trace.iterations, ms=ms)
    return row


def _run_cell_safe(args):
    cell, config, out_dir, with_fsim = args
    try:
        return run_cell(cell, config, out_dir, with_fsim), None
    except Exception as exc:  # recorded, the suite carries on
        return None, f"{cell.key}: {type(exc).__name__}: {exc}"


def _fmt(v):
    if isinstance(v, float):
        return "" if np.isnan(v) else format(v, ".10g")
    return str(v)


def write_csv(path, rows, timing=True):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for row in rows:
            vals = [row[k] for k in HEADER]
            if not timing:
                vals[-1] = float("nan")
            w.writerow([_fmt(v) for v in vals])


def run_suite(suite, out_dir, workers=1, with_fsim=True, timing=True):
    """Run every cell and write ``grayscale.csv`` / ``color.csv`` under ``out_dir``.

    Returns ``{table_name: rows}`` plus a list of failure messages.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = SolverConfig.from_dict(suite.config)
    gray, color = cells(suite)
    tables = {}
    failures = []
    for name, group in (("grayscale", gray), ("color", color)):
        if not group:
            continue
        jobs = [(c, config, out_dir, with_fsim) for c in group]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_cell_safe, jobs))
        else:
            results = [_run_cell_safe(j) for j in jobs]
        rows = []
        for row, err in results:
            if err:
                log.error(err)
                failures.append(err)
            else:
                rows.append(row)
        write_csv(out_dir / f"{name}.csv", rows, timing=timing)
        tables[name] = rows
    fail_path = out_dir / "failures.txt"
    if failures:
        fail_path.write_text("\n".join(failures) + "\n")
    elif fail_path.exists():
        fail_path.unlink()
    return tables, failures


def grid_search(reference, degraded, A, grid, base=None, score="ssim"):
    """Exhaustive search over ``grid`` (name -> list of values).

    Returns ``(best_config, best_score, results)`` where ``results`` is a
    list of ``(overrides, score, iterations)`` in grid order.
    """
    base = base or SolverConfig()
    names = list(grid)
    results = []
    best = (None, -np.inf)
    fn = {"ssim": metrics.ssim, "psnr": metrics.psnr}[score]
    for values in itertools.product(*(grid[n] for n in names)):
        overrides = dict(zip(names, values))
        cfg = base.updated(**overrides)
        restored, trace = restore(degraded, A, cfg)
        s = fn(restored, reference)
        results.append((overrides, s, trace.iterations))
        if s > best[1]:
            best = (cfg, s)
    return best[0], best[1], results
