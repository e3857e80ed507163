import csv
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from fracdeblur import metrics
from fracdeblur.cli import main
from fracdeblur.imageio import read_image, sample_path, sha256, write_image

GOLDEN_DEGRADED_SHA256 = "26dd0ce5dcedf2ba7efce96bbcea6d52a1457de2275aee25f4367f1393fb1fe3"


@pytest.fixture
def phantom(tmp_path):
    path = tmp_path / "phantom64.pgm"
    shutil.copy(sample_path("phantom64"), path)
    return path


def test_degrade_identity_is_bit_identical(tmp_path, rng):
    src = write_image(tmp_path / "in.png", rng.random((3, 16, 16)), 8)
    assert main(["degrade", str(src), "--out-dir", str(tmp_path / "o"), "--noise", "sp:0"]) == 0
    assert (tmp_path / "o" / "in_degraded.png").read_bytes() == src.read_bytes()
    assert (tmp_path / "o" / "in_blurred.png").read_bytes() == src.read_bytes()


def test_degrade_golden_checksum_and_sidecar(phantom, tmp_path):
    out = tmp_path / "out"
    argv = ["degrade", str(phantom), "--kernel", "gaussian:7,4", "--noise", "sp:0.1", "--seed", "7", "--out-dir", str(out)]
    assert main(argv) == 0
    degraded = out / "phantom64_degraded.pgm"
    assert sha256(degraded) == GOLDEN_DEGRADED_SHA256
    side = json.loads((out / "phantom64_degrade.json").read_text())
    assert side["schema"] == 1
    assert side["noise"] == {"kind": "salt_pepper", "density": 0.1, "seed": 7}
    assert side["blur"]["kernel"] == "gaussian:7,4"
    assert side["outputs"]["degraded"]["sha256"] == GOLDEN_DEGRADED_SHA256
    assert side["input"]["sha256"] == sha256(phantom)
    # rerun is bit-identical
    first = degraded.read_bytes()
    assert main(argv) == 0
    assert degraded.read_bytes() == first


def test_degrade_kernel_file_and_color(tmp_path, phantom):
    kf = tmp_path / "k.txt"
    kf.write_text("1 3\n0.25 0.5 0.25\n")
    assert main(["degrade", str(phantom), "--kernel-file", str(kf), "--out-dir", str(tmp_path / "a")]) == 0
    cf = tmp_path / "c.json"
    cf.write_text(json.dumps({"weights": np.eye(3).tolist(), "kernel": "average:3,3"}))
    color = shutil.copy(sample_path("color32"), tmp_path / "color32.ppm")
    assert main(["degrade", str(color), "--color-kernel-file", str(cf), "--noise", "rv:0.1",
                 "--out-dir", str(tmp_path / "b"), "--ext", ".png"]) == 0
    img, depth = read_image(tmp_path / "b" / "color32_degraded.png")
    assert img.shape == (3, 32, 32) and depth == 16
    assert main(["degrade", str(color), "--preset", "house", "--out-dir", str(tmp_path / "c")]) == 0


def test_usage_and_io_errors(tmp_path, phantom, capsys):
    assert main(["degrade", str(tmp_path / "missing.pgm")]) == 2
    assert main(["degrade", str(phantom), "--kernel", "boxcar:3"]) == 1
    assert main(["degrade", str(phantom), "--noise", "sp:2"]) == 1
    assert main(["degrade", str(phantom), "--kernel", "average:80,80"]) == 1
    assert main(["degrade", str(phantom), "--preset", "peppers"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["degrade"])
    assert exc.value.code == 1
    (tmp_path / "bad.json").write_text('{"nonsense": 1}')
    assert main(["restore", str(phantom), "--config", str(tmp_path / "bad.json")]) == 1
    assert main(["restore", str(phantom), "--mu1", "-1"]) == 1


def test_restore_near_identity_and_trace(tmp_path, phantom):
    out = tmp_path / "r"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lam1": 1e-4, "lam2": 1e-4}))
    assert main(["restore", str(phantom), "--config", str(cfg), "--max-iter", "40", "--out-dir", str(out)]) == 0
    restored, _ = read_image(out / "phantom64_restored.pgm")
    f, _ = read_image(phantom)
    assert np.linalg.norm(restored - f) <= 1e-2 * np.linalg.norm(f)
    side = json.loads((out / "phantom64_restore.json").read_text())
    assert side["config"]["lam1"] == 1e-4 and side["config"]["max_iter"] == 40
    with open(out / "phantom64_trace.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iteration", "objective", "rel_change", "res1", "res2", "res3", "ms"]
    assert len(rows) - 1 == side["iterations"]


def test_pipeline_gain(tmp_path, phantom):
    d = tmp_path / "d"
    assert main(["degrade", str(phantom), "--kernel", "gaussian:7,4", "--noise", "sp:0.1", "--seed", "1",
                 "--out-dir", str(d)]) == 0
    r = tmp_path / "r"
    assert main(["restore", str(d / "phantom64_degraded.pgm"), "--kernel", "gaussian:7,4", "--out-dir", str(r)]) == 0
    ref = read_image(phantom)[0]
    deg = read_image(d / "phantom64_degraded.pgm")[0]
    res = read_image(r / "phantom64_degraded_restored.pgm")[0]
    assert metrics.psnr(res, ref) >= metrics.psnr(deg, ref) + 3.0


def test_restore_numerical_abort_exit_code(tmp_path, phantom):
    assert main(["restore", str(phantom), "--tau", "1e300", "--lam2", "1e300", "--max-iter", "3",
                 "--out-dir", str(tmp_path)]) == 3


def test_evaluate(tmp_path, rng, capsys):
    u = rng.random((1, 32, 32))
    paths = []
    for name, img in (("u", u), ("c", np.clip(u + 0.05 * rng.standard_normal(u.shape), 0, 1)),
                      ("d", np.clip(u + 0.2 * rng.standard_normal(u.shape), 0, 1))):
        paths.append(write_image(tmp_path / f"{name}.npy", img))
    assert main(["evaluate", str(paths[0]), str(paths[0]), str(paths[0])]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header == "psnr,snr,isnr,reerr,ssim,fsim"
    vals = dict(zip(header.split(","), map(float, row.split(","))))
    assert vals["psnr"] == metrics.DB_CAP and vals["reerr"] == 0.0 and vals["ssim"] == 1.0

    out = tmp_path / "rep.csv"
    assert main(["evaluate", str(paths[1]), str(paths[0]), str(paths[2]), "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    got = [float(v) for v in rows[1]]
    c, r, d = (read_image(p)[0] for p in (paths[1], paths[0], paths[2]))
    want = metrics.evaluate(c, r, d).as_row()
    np.testing.assert_allclose(got, want, rtol=1e-9)

    assert main(["evaluate", str(paths[1]), str(paths[0]), "--metrics", "fast"]) == 0
    row = capsys.readouterr().out.strip().splitlines()[1].split(",")
    assert row[2] == "" and row[5] == ""
    write_image(tmp_path / "small.npy", u[:, :16])
    assert main(["evaluate", str(tmp_path / "small.npy"), str(paths[0])]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fracdeblur", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("degrade", "restore", "evaluate", "bench"):
        assert cmd in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "fracdeblur", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 1
