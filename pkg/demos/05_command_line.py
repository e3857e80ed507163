"""The command-line front end, driven from Python.  The same calls work in
a shell as ``fracdeblur degrade ...`` etc."""

import json
import tempfile
from pathlib import Path

from fracdeblur.cli import main
from fracdeblur.imageio import sample_path

work = Path(tempfile.mkdtemp(prefix="fracdeblur-"))
src = sample_path("phantom64")

# 1. blur + noise; writes *_blurred, *_degraded and a JSON sidecar with checksums
main(["degrade", str(src), "--kernel", "gaussian:7,4", "--noise", "sp:0.1", "--seed", "1",
      "--out-dir", str(work), "--ext", ".png"])
print(json.dumps(json.loads((work / "phantom64_degrade.json").read_text())["noise"]))

# 2. restore with the same blur; settings from a JSON file, overridden by a flag
(work / "solver.json").write_text(json.dumps({"lam2": 0.05, "mu1": 40}))
main(["restore", str(work / "phantom64_degraded.png"), "--kernel", "gaussian:7,4",
      "--config", str(work / "solver.json"), "--max-iter", "300", "--out-dir", str(work)])

# 3. metrics as one CSV row: psnr,snr,isnr,reerr,ssim,fsim
main(["evaluate", str(work / "phantom64_degraded_restored.png"), str(src), str(work / "phantom64_degraded.png")])

# 4. a tiny benchmark matrix; --no-timing makes the CSV byte-stable
(work / "suite.json").write_text(json.dumps({
    "images": ["phantom64"], "kernels": ["gaussian:7,4"], "noises": ["sp", "rv"], "densities": [0.1, 0.3],
    "color_images": ["color32"], "color_presets": ["house"],
}))
main(["bench", "--suite", str(work / "suite.json"), "--out-dir", str(work / "bench"), "--metrics", "fast",
      "--no-timing"])
print((work / "bench" / "grayscale.csv").read_text())
print("outputs in", work)
