"""Command-line front end: ``degrade``, ``restore``, ``evaluate``, ``bench``.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 numerical abort.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench, imageio, metrics
from .degrade import ColorBlurSpec, Kernel, NoiseSpec, add_impulse_noise, color_preset, parse_kernel
from .solver import NumericalAbort, SolverConfig, restore
from .spectral import SpectralOperator

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
SCHEMA = 1
SOLVER_FLAGS = ("alpha", "taps", "lam1", "lam2", "beta", "mu1", "mu2", "mu3", "tau", "gamma", "tol", "max_iter")

log = logging.getLogger("fracdeblur")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_blur_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--kernel", help="gaussian:H,S | average:R1,R2 | motion:LEN,THETA | identity")
    g.add_argument("--kernel-file", help="kernel text file: 'rows cols' then row-major weights")
    g.add_argument("--color-kernel-file", help="JSON 3x3 cross-channel blur")
    g.add_argument("--preset", choices=["lena", "house", "peppers", "plate"], help="colour blur preset")
    p.add_argument("--preset-scale", type=float, default=1.0, help="shrink factor for preset kernel sizes")


def _kernel_from_json(obj):
    if isinstance(obj, str):
        return parse_kernel(obj)
    return Kernel(np.asarray(obj, dtype=np.float64))


def load_color_spec(path):
    """JSON with ``weights`` (3x3) and either ``kernel`` (one for every
    block) or ``kernels`` (3x3, each a spec string or a nested list)."""
    obj = json.loads(Path(path).read_text())
    if "kernel" in obj:
        return ColorBlurSpec.uniform(obj["weights"], _kernel_from_json(obj["kernel"]))
    kernels = [[_kernel_from_json(k) for k in row] for row in obj["kernels"]]
    return ColorBlurSpec(obj["weights"], kernels)


def _blur(args, shape):
    """Operator plus a JSON description of it."""
    c, h, w = shape
    if args.preset:
        spec = color_preset(args.preset, args.preset_scale)
        desc = {"preset": args.preset, "scale": args.preset_scale}
    elif args.color_kernel_file:
        spec = load_color_spec(args.color_kernel_file)
        desc = {"color_kernel_file": str(args.color_kernel_file)}
    else:
        spec = None
    if spec is not None:
        if c != 3:
            raise UsageError("colour blur needs a 3-channel image")
        desc["weights"] = spec.weights.tolist()
        return spec.operator(h, w), desc
    if args.kernel_file:
        k = Kernel.load(args.kernel_file)
        desc = {"kernel_file": str(args.kernel_file)}
    else:
        k = parse_kernel(args.kernel or "identity")
        desc = {"kernel": args.kernel or "identity"}
    desc.update(name=k.name, weights=k.weights.tolist())
    return SpectralOperator.from_kernel(k, h, w, channels=c), desc


def _read(path):
    try:
        return imageio.read_image(path)
    except OSError:
        raise
    except ValueError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def _output_paths(args, stem, names):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return {n: out / f"{stem}_{n}{args.ext}" for n in names}


def _sidecar(path, payload, outputs):
    payload = {"schema": SCHEMA, **payload, "outputs": {k: {"path": str(p), "sha256": imageio.sha256(p)}
                                                        for k, p in outputs.items()}}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_degrade(args):
    u, depth = _read(args.input)
    try:
        A, blur_desc = _blur(args, u.shape)
        noise = NoiseSpec.parse(args.noise, args.seed) if args.noise else NoiseSpec("sp", 0.0, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    blurred = A.apply(u)
    noisy = add_impulse_noise(blurred, noise)
    stem = Path(args.input).stem
    args.ext = args.ext or Path(args.input).suffix
    paths = _output_paths(args, stem, ["blurred", "degraded"])
    imageio.write_image(paths["blurred"], blurred, depth)
    imageio.write_image(paths["degraded"], noisy, depth)
    _sidecar(Path(args.out_dir) / f"{stem}_degrade.json", {
        "command": "degrade",
        "input": {"path": str(args.input), "sha256": imageio.sha256(args.input)},
        "blur": blur_desc,
        "noise": {"kind": noise.kind, "density": noise.density, "seed": noise.seed},
    }, paths)
    print(paths["degraded"])
    return EXIT_OK


def _solver_config(args):
    base = SolverConfig.load(args.config) if args.config else SolverConfig()
    return base.updated(**{k: getattr(args, k) for k in SOLVER_FLAGS})


def cmd_restore(args):
    f, depth = _read(args.input)
    try:
        cfg = _solver_config(args)
        A, blur_desc = _blur(args, f.shape)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    restored, trace = restore(f, A, cfg)
    for w in trace.warnings:
        log.warning(w)
    stem = Path(args.input).stem
    args.ext = args.ext or Path(args.input).suffix
    paths = _output_paths(args, stem, ["restored"])
    imageio.write_image(paths["restored"], restored, depth or 16)
    trace_path = Path(args.out_dir) / f"{stem}_trace.csv"
    trace.to_csv(trace_path)
    paths["trace"] = trace_path
    _sidecar(Path(args.out_dir) / f"{stem}_restore.json", {
        "command": "restore",
        "input": {"path": str(args.input), "sha256": imageio.sha256(args.input)},
        "blur": blur_desc,
        "config": cfg.to_dict(),
        "iterations": trace.iterations,
        "converged": trace.converged,
        "warnings": trace.warnings,
    }, paths)
    print(paths["restored"])
    return EXIT_OK


def cmd_evaluate(args):
    cand, _ = _read(args.candidate)
    ref, _ = _read(args.reference)
    deg = _read(args.degraded)[0] if args.degraded else None
    if cand.shape != ref.shape or (deg is not None and deg.shape != ref.shape):
        raise UsageError("images differ in shape")
    rep = metrics.evaluate(cand, ref, deg, with_fsim=args.metrics == "all")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(metrics.COLUMNS)
        w.writerow([bench._fmt(v) for v in rep.as_row()])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_bench(args):
    try:
        suite = bench.Suite.from_dict(json.loads(Path(args.suite).read_text())) if args.suite else bench.Suite()
        if args.images:
            suite.images = args.images
        if args.densities:
            suite.densities = args.densities
        if args.config:
            suite.config = {**suite.config, **json.loads(Path(args.config).read_text())}
        SolverConfig.from_dict(suite.config)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    tables, failures = bench.run_suite(suite, args.out_dir, workers=args.workers,
                                       with_fsim=args.metrics == "all", timing=not args.no_timing)
    for name in tables:
        print(Path(args.out_dir) / f"{name}.csv")
    if failures:
        log.error("%d cell(s) failed, see failures.txt", len(failures))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="fracdeblur", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("degrade", help="blur and add impulse noise")
    d.add_argument("input")
    _add_blur_args(d)
    d.add_argument("--noise", help="sp:DENSITY or rv:DENSITY")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out-dir", default=".")
    d.add_argument("--ext", help="output format suffix (default: input's)")
    d.set_defaults(func=cmd_degrade)

    r = sub.add_parser("restore", help="restore a degraded image")
    r.add_argument("input")
    _add_blur_args(r)
    r.add_argument("--config", help="solver settings JSON")
    for name in SOLVER_FLAGS:
        typ = int if name in ("taps", "max_iter") else float
        r.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ)
    r.add_argument("--out-dir", default=".")
    r.add_argument("--ext", help="output format suffix (default: input's)")
    r.set_defaults(func=cmd_restore)

    e = sub.add_parser("evaluate", help="quality metrics as a CSV row")
    e.add_argument("candidate")
    e.add_argument("reference")
    e.add_argument("degraded", nargs="?")
    e.add_argument("--metrics", choices=["all", "fast"], default="all")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bench", help="run the degrade/restore/evaluate matrix")
    b.add_argument("--suite", help="suite JSON")
    b.add_argument("--images", nargs="+", help="sample names or image paths")
    b.add_argument("--densities", nargs="+", type=float)
    b.add_argument("--config", help="solver settings JSON")
    b.add_argument("--out-dir", default="bench_out")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--metrics", choices=["all", "fast"], default="all")
    b.add_argument("--no-timing", action="store_true", help="leave the ms column empty (byte-stable CSV)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
