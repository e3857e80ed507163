"""Full-reference image quality metrics on the ``[0, 1]`` intensity scale.

PSNR/SNR/ISNR return :data:`DB_CAP` when the error energy is zero.  SSIM
follows Wang et al. (11x11 Gaussian window, sigma 1.5, K1=0.01, K2=0.03)
and FSIM follows Zhang et al. (log-Gabor phase congruency with 4 scales
and 4 orientations, Scharr gradients, T1=0.85, T2=160 on the 0-255 scale).
"""

from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .grid import as_grid

DB_CAP = 99.0
COLUMNS = ("psnr", "snr", "isnr", "reerr", "ssim", "fsim")


def _pair(a, b):
    a = as_grid(a)
    b = as_grid(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def _db(num, den):
    if den == 0.0:
        return DB_CAP
    if num == 0.0:
        return -DB_CAP
    return float(min(10.0 * np.log10(num / den), DB_CAP))


def reerr(candidate, reference):
    """``||candidate - reference||^2 / ||reference||^2``."""
    c, r = _pair(candidate, reference)
    den = float(np.sum(r * r))
    if den == 0.0:
        raise ValueError("reference image is identically zero")
    return float(np.sum((c - r) ** 2)) / den


def psnr(candidate, reference, peak=1.0):
    c, r = _pair(candidate, reference)
    mse = float(np.mean((c - r) ** 2))
    return _db(peak * peak, mse)


def snr(candidate, reference):
    c, r = _pair(candidate, reference)
    return _db(float(np.sum((r - r.mean()) ** 2)), float(np.sum((r - c) ** 2)))


def isnr(candidate, reference, degraded):
    c, r = _pair(candidate, reference)
    d, _ = _pair(degraded, reference)
    return _db(float(np.sum((d - r) ** 2)), float(np.sum((c - r) ** 2)))


def _gaussian_window(size=11, sigma=1.5):
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x**2) / (2 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def _filter_valid(img, win):
    out = ndimage.correlate(img, win, mode="constant")
    h = win.shape[0] // 2
    return out[h : img.shape[0] - h, h : img.shape[1] - h]


def ssim_map(x, y, peak=1.0, win_size=11, sigma=1.5):
    """Local SSIM over fully-contained windows of one channel."""
    if min(x.shape) < win_size:
        win_size = min(x.shape) if min(x.shape) % 2 else min(x.shape) - 1
    win = _gaussian_window(win_size, sigma)
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    mx = _filter_valid(x, win)
    my = _filter_valid(y, win)
    sxx = _filter_valid(x * x, win) - mx * mx
    syy = _filter_valid(y * y, win) - my * my
    sxy = _filter_valid(x * y, win) - mx * my
    return ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))


def ssim(candidate, reference):
    """Mean SSIM, averaged over channels for colour images."""
    c, r = _pair(candidate, reference)
    return float(np.mean([ssim_map(c[i], r[i]).mean() for i in range(c.shape[0])]))


# --- FSIM -----------------------------------------------------------------


def _freq_grid(rows, cols):
    # frequency coordinates laid out with (0, 0) at the corner
    def axis(n):
        if n % 2:
            return np.arange(-(n - 1) / 2, (n - 1) / 2 + 1) / max(n - 1, 1)
        return np.arange(-n / 2, n / 2) / n

    x, y = np.meshgrid(axis(cols), axis(rows))
    radius = np.fft.ifftshift(np.sqrt(x**2 + y**2))
    theta = np.fft.ifftshift(np.arctan2(-y, x))
    return radius, theta


def phase_congruency(im, nscale=4, norient=4, min_wavelength=6, mult=2.0,
                     sigma_onf=0.55, d_theta_on_sigma=1.2, k=2.0, eps=1e-4):
    """Kovesi phase congruency map as used by FSIM."""
    rows, cols = im.shape
    imfft = np.fft.fft2(im)
    radius, theta = _freq_grid(rows, cols)
    radius[0, 0] = 1.0
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    lowpass = 1.0 / (1.0 + (radius / 0.45) ** (2 * 15))
    theta_sigma = np.pi / norient / d_theta_on_sigma

    log_gabor = []
    for s in range(nscale):
        fo = 1.0 / (min_wavelength * mult**s)
        lg = np.exp(-(np.log(radius / fo) ** 2) / (2 * np.log(sigma_onf) ** 2)) * lowpass
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    energy_all = np.zeros((rows, cols))
    an_all = np.zeros((rows, cols))
    for o in range(norient):
        angl = o * np.pi / norient
        ds = sin_t * np.cos(angl) - cos_t * np.sin(angl)
        dc = cos_t * np.cos(angl) + sin_t * np.sin(angl)
        spread = np.exp(-np.arctan2(ds, dc) ** 2 / (2 * theta_sigma**2))

        sum_e = np.zeros((rows, cols))
        sum_o = np.zeros((rows, cols))
        sum_an = np.zeros((rows, cols))
        eo = []
        ifft_filters = []
        for s in range(nscale):
            filt = log_gabor[s] * spread
            ifft_filters.append(np.real(np.fft.ifft2(filt)) * np.sqrt(rows * cols))
            resp = np.fft.ifft2(imfft * filt)
            eo.append(resp)
            sum_an += np.abs(resp)
            sum_e += resp.real
            sum_o += resp.imag
            if s == 0:
                em_n = np.sum(filt**2)
        x_energy = np.sqrt(sum_e**2 + sum_o**2) + eps
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros((rows, cols))
        for resp in eo:
            e, od = resp.real, resp.imag
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        # noise threshold from the smallest scale's response statistics
        median_e2n = np.median(np.abs(eo[0]) ** 2)
        mean_e2n = -median_e2n / np.log(0.5)
        noise_power = mean_e2n / em_n
        est_sum_an2 = sum(f**2 for f in ifft_filters)
        est_sum_aiaj = sum(
            ifft_filters[i] * ifft_filters[j] for i in range(nscale - 1) for j in range(i + 1, nscale)
        )
        est_noise_energy2 = 2 * noise_power * est_sum_an2.sum() + 4 * noise_power * est_sum_aiaj.sum()
        tau = np.sqrt(est_noise_energy2 / 2)
        est_noise_energy = tau * np.sqrt(np.pi / 2)
        est_noise_sigma = np.sqrt((2 - np.pi / 2) * tau**2)
        threshold = (est_noise_energy + k * est_noise_sigma) / 1.7
        energy_all += np.maximum(energy - threshold, 0.0)
        an_all += sum_an

    with np.errstate(invalid="ignore", divide="ignore"):
        pc = energy_all / an_all
    return np.nan_to_num(pc, nan=0.0)


_SCHARR_X = np.array([[3.0, 0.0, -3.0], [10.0, 0.0, -10.0], [3.0, 0.0, -3.0]]) / 16.0


def _luminance(g):
    if g.shape[0] == 3:
        return 0.299 * g[0] + 0.587 * g[1] + 0.114 * g[2]
    return g[0]


def _downsample(y):
    f = max(1, int(round(min(y.shape) / 256)))
    if f == 1:
        return y
    return ndimage.uniform_filter(y, f, mode="constant")[::f, ::f]


def fsim(candidate, reference):
    """FSIM on the luminance channel; inputs rescaled to 0-255 internally."""
    c, r = _pair(candidate, reference)
    y1 = _downsample(255.0 * _luminance(r))
    y2 = _downsample(255.0 * _luminance(c))
    pc1 = phase_congruency(y1)
    pc2 = phase_congruency(y2)

    def grad_mag(y):
        gx = ndimage.convolve(y, _SCHARR_X, mode="constant")
        gy = ndimage.convolve(y, _SCHARR_X.T, mode="constant")
        return np.sqrt(gx**2 + gy**2)

    g1, g2 = grad_mag(y1), grad_mag(y2)
    t1, t2 = 0.85, 160.0
    s_pc = (2 * pc1 * pc2 + t1) / (pc1**2 + pc2**2 + t1)
    s_g = (2 * g1 * g2 + t2) / (g1**2 + g2**2 + t2)
    pcm = np.maximum(pc1, pc2)
    total = pcm.sum()
    if total == 0.0:
        # no phase structure in either image (e.g. flat fields)
        return float(np.clip(np.mean(s_g * s_pc), 0.0, 1.0))
    return float(np.clip(np.sum(s_g * s_pc * pcm) / total, 0.0, 1.0))


@dataclass
class QualityReport:
    psnr: float
    snr: float
    isnr: float
    reerr: float
    ssim: float
    fsim: float

    def as_row(self):
        return [getattr(self, k) for k in COLUMNS]

    def to_dict(self):
        return asdict(self)


def evaluate(candidate, reference, degraded=None, with_fsim=True):
    """All six metrics.  Without ``degraded`` ISNR is reported as NaN;
    with ``with_fsim=False`` so is FSIM."""
    return QualityReport(
        psnr=psnr(candidate, reference),
        snr=snr(candidate, reference),
        isnr=isnr(candidate, reference, degraded) if degraded is not None else float("nan"),
        reerr=reerr(candidate, reference),
        ssim=ssim(candidate, reference),
        fsim=fsim(candidate, reference) if with_fsim else float("nan"),
    )
