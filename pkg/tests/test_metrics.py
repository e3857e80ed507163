import math

import numpy as np
import pytest

from fracdeblur.degrade import NoiseSpec, add_impulse_noise
from fracdeblur.imageio import load_sample
from fracdeblur.metrics import (
    COLUMNS,
    DB_CAP,
    QualityReport,
    evaluate,
    fsim,
    isnr,
    phase_congruency,
    psnr,
    reerr,
    snr,
    ssim,
)


@pytest.fixture(scope="module")
def textured():
    return load_sample("textured64")


def test_reerr_examples(rng):
    u = rng.random((1, 8, 8)) + 0.1
    assert reerr(u, u) == 0.0
    assert reerr(2 * u, u) == pytest.approx(1.0, rel=1e-14)
    v = rng.random((1, 8, 8))
    num = sum((a - b) ** 2 for a, b in zip(v.ravel(), u.ravel()))
    den = sum(b * b for b in u.ravel())
    assert reerr(v, u) == pytest.approx(num / den, rel=1e-12)
    with pytest.raises(ValueError):
        reerr(u, np.zeros_like(u))


def test_psnr_examples(rng):
    u = rng.random((1, 16, 16))
    assert psnr(u, u) == DB_CAP
    assert psnr(u + 0.1, u) == pytest.approx(20.0, abs=1e-9)
    v = rng.random((1, 16, 16))
    assert psnr(255 * v, 255 * u, peak=255.0) == pytest.approx(psnr(v, u), abs=1e-12)
    with pytest.raises(ValueError):
        psnr(u, u[:, :8])


def test_snr_examples(rng):
    u = rng.random((1, 16, 16))
    assert snr(u, u) == DB_CAP
    assert snr(np.full_like(u, u.mean()), u) == pytest.approx(0.0, abs=1e-12)
    v = rng.random((1, 16, 16))
    num = sum((a - u.mean()) ** 2 for a in u.ravel())
    den = sum((a - b) ** 2 for a, b in zip(u.ravel(), v.ravel()))
    assert snr(v, u) == pytest.approx(10 * math.log10(num / den), rel=1e-12)


def test_isnr_examples(rng):
    u, d, c = (rng.random((3, 8, 8)) for _ in range(3))
    assert isnr(d, u, d) == 0.0
    assert isnr(u, u, d) == DB_CAP
    num = sum((a - b) ** 2 for a, b in zip(d.ravel(), u.ravel()))
    den = sum((a - b) ** 2 for a, b in zip(c.ravel(), u.ravel()))
    assert isnr(c, u, d) == pytest.approx(10 * math.log10(num / den), rel=1e-12)


def test_psnr_reerr_identity(rng):
    for _ in range(10):
        u = rng.random((3, 16, 16))
        v = np.clip(u + 0.05 * rng.standard_normal(u.shape), 0, 1)
        n = u.size
        assert psnr(v, u) == pytest.approx(10 * math.log10(n / (reerr(v, u) * np.sum(u * u))), abs=1e-9)


def test_ssim_examples(textured):
    assert ssim(textured, textured) == 1.0
    assert ssim(1 - textured, textured) < 0.5
    a = np.full((1, 16, 16), 0.2)
    b = a + 0.5
    c1 = 0.01**2
    ref = (2 * 0.2 * 0.7 + c1) / (0.2**2 + 0.7**2 + c1)
    assert ssim(a, b) == pytest.approx(ref, rel=1e-10)


def test_ssim_matches_scikit_image(rng, textured):
    skm = pytest.importorskip("skimage.metrics")
    noisy = np.clip(textured + 0.1 * rng.standard_normal(textured.shape), 0, 1)
    ref = skm.structural_similarity(
        noisy[0], textured[0], data_range=1.0, gaussian_weights=True, sigma=1.5, use_sample_covariance=False
    )
    assert ssim(noisy, textured) == pytest.approx(ref, abs=1e-9)
    col = rng.random((3, 24, 24))
    col2 = np.clip(col + 0.1 * rng.standard_normal(col.shape), 0, 1)
    ref = np.mean([
        skm.structural_similarity(col2[i], col[i], data_range=1.0, gaussian_weights=True, sigma=1.5,
                                  use_sample_covariance=False)
        for i in range(3)
    ])
    assert ssim(col2, col) == pytest.approx(ref, abs=1e-9)


def test_fsim_identity_and_range(rng, textured):
    assert fsim(textured, textured) == pytest.approx(1.0, abs=1e-12)
    col = load_sample("color32")
    assert fsim(col, col) == pytest.approx(1.0, abs=1e-12)
    v = fsim(rng.random((1, 32, 32)), textured[:, :32, :32])
    assert 0.0 <= v <= 1.0


def test_fsim_decreases_with_noise(textured):
    values = [fsim(add_impulse_noise(textured, NoiseSpec("sp", d, 9)), textured) for d in (0.0, 0.05, 0.1, 0.2, 0.3)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_fsim_ordering(rng, textured):
    shuffled = rng.permutation(textured.ravel()).reshape(textured.shape)
    tiny = np.clip(textured + 1e-3 * rng.standard_normal(textured.shape), 0, 1)
    assert fsim(shuffled, textured) < fsim(tiny, textured)


def test_phase_congruency_flat_and_edge():
    assert np.all(phase_congruency(np.full((32, 32), 0.5)) == 0)
    im = np.zeros((128, 128))
    im[:, 64:] = 1.0
    pc = phase_congruency(im)
    assert pc.shape == (128, 128)
    row = pc[0]
    assert set(np.argsort(row)[-2:]) == {0, 64}
    assert row[64] > 3 * row[20:44].mean()


def test_no_nan_for_valid_pairs(rng):
    pairs = [
        (np.zeros((1, 16, 16)), np.ones((1, 16, 16))),
        (np.full((1, 16, 16), 0.5), np.full((1, 16, 16), 0.5)),
        (rng.random((3, 16, 16)), rng.random((3, 16, 16))),
    ]
    for a, b in pairs:
        for metric in (psnr, snr, ssim, fsim):
            assert np.isfinite(metric(a, b))


def test_evaluate_report(rng, textured):
    d = add_impulse_noise(textured, NoiseSpec("sp", 0.1, 1))
    rep = evaluate(textured, textured, textured)
    assert rep.psnr == DB_CAP and rep.reerr == 0.0 and rep.ssim == 1.0
    # candidate == reference wins over candidate == degraded
    assert rep.isnr == DB_CAP
    rep = evaluate(d, textured)
    assert isinstance(rep, QualityReport)
    assert np.isnan(rep.isnr)
    assert list(rep.to_dict()) == list(COLUMNS)
    assert rep.as_row()[:2] == [rep.psnr, rep.snr] and len(rep.as_row()) == 6
    assert rep.psnr == psnr(d, textured) and rep.fsim == fsim(d, textured)
    assert np.isnan(evaluate(d, textured, with_fsim=False).fsim)
