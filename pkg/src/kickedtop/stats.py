"""Histograms, Pearson correlation, Jensen-Shannon distance and level-spacing ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter1d
from scipy.signal import find_peaks

from .errors import (BinningMismatchError, DegenerateDataError, DegenerateSpectrumError,
                     EmptyHistogramError)
from .spin import TWO_PI

POISSON_R = 2.0 * math.log(2.0) - 1.0
DEFAULT_BINS = 100


@dataclass(frozen=True)
class Histogram:
    """Probability mass per equal-width bin on ``support``; ``densities`` sum to 1."""

    support: tuple
    n_bins: int
    densities: np.ndarray
    sample_count: int
    clipped: int = 0

    @property
    def edges(self):
        return np.linspace(self.support[0], self.support[1], self.n_bins + 1)

    @property
    def centers(self):
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])


def histogram(samples, support=(0.0, 1.0), n_bins=DEFAULT_BINS) -> Histogram:
    """Normalized histogram; samples outside ``support`` are clipped into the edge bins."""
    lo, hi = float(support[0]), float(support[1])
    if not lo < hi:
        raise ValueError("support must satisfy lo < hi")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    x = np.asarray(samples, dtype=float).ravel()
    x = x[np.isfinite(x)]
    if x.size == 0:
        raise EmptyHistogramError("no finite samples to histogram")
    clipped = int(np.count_nonzero((x < lo) | (x > hi)))
    counts, _ = np.histogram(np.clip(x, lo, hi), bins=n_bins, range=(lo, hi))
    return Histogram((lo, hi), int(n_bins), counts / x.size, int(x.size), clipped)


def pearson(a, b):
    """Pearson coefficient of paired samples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("pearson needs two equal-length 1-d samples of size >= 2")
    da = a - a.mean()
    db = b - b.mean()
    saa = np.dot(da, da)
    sbb = np.dot(db, db)
    if saa == 0.0 or sbb == 0.0:
        raise DegenerateDataError("zero-variance input to pearson")
    return float(np.clip(np.dot(da, db) / math.sqrt(saa * sbb), -1.0, 1.0))


def joint_valid(field_a, field_b):
    """Values of two fields at the points where both are valid."""
    if len(field_a.grid) != len(field_b.grid):
        raise ValueError("fields live on different grids")
    m = field_a.mask & field_b.mask
    return field_a.values[m], field_b.values[m]


def js_divergence(f: Histogram, g: Histogram):
    if f.n_bins != g.n_bins or f.support != g.support:
        raise BinningMismatchError("histograms have different supports or bin counts")
    p, q = f.densities, g.densities
    m = 0.5 * (p + q)

    def kl(x):
        nz = x > 0
        return float(np.sum(x[nz] * np.log(x[nz] / m[nz])))

    return min(max(0.5 * kl(p) + 0.5 * kl(q), 0.0), math.log(2.0))


def js_distance(f: Histogram, g: Histogram):
    """Square root of the Jensen-Shannon divergence (natural log), in ``[0, sqrt(ln 2)]``."""
    return math.sqrt(js_divergence(f, g))


def normalize_for_comparison(values):
    """Min-max rescale to ``[0, 1]``. Accepts an array or a ScalarField (valid values only)."""
    v = getattr(values, "valid_values", values)
    v = np.asarray(v, dtype=float)
    lo, hi = v.min(), v.max()
    if not hi > lo:
        raise DegenerateDataError("cannot rescale a constant field")
    return (v - lo) / (hi - lo)


# ---------------------------------------------------------------------------
# level spacings


@dataclass(frozen=True)
class SpacingRatio:
    mean: float
    n_ratios: int
    degeneracies: int
    sector_means: tuple = ()


def spacing_ratios(phases):
    """Ratios ``min(s_n, s_n+1) / max(s_n, s_n+1)`` of circular spacings.

    Returns the finite ratios and the number of 0/0 pairs dropped.
    """
    ph = np.sort(np.mod(np.asarray(phases, dtype=float), TWO_PI))
    if ph.size < 3:
        raise ValueError("need at least three eigenphases")
    s = np.diff(np.append(ph, ph[0] + TWO_PI))
    s_next = np.roll(s, -1)
    hi = np.maximum(s, s_next)
    lo = np.minimum(s, s_next)
    ok = hi > 0
    return lo[ok] / hi[ok], int(np.count_nonzero(~ok))


def spacing_ratio(spectrum, per_sector=True) -> SpacingRatio:
    """Mean spacing ratio of a FloquetSpectrum.

    With ``per_sector`` the parity sectors are treated separately and their
    means are combined weighted by sector size.
    """
    if not per_sector:
        groups = [spectrum.eigenphases]
    else:
        labels = spectrum.sectors
        if np.any(labels == 0):
            raise ValueError("spectrum has eigenvectors without a definite parity")
        groups = [spectrum.eigenphases[labels == s] for s in (1, -1) if np.any(labels == s)]
    means, weights = [], []
    n_tot = 0
    degenerate = 0
    for ph in groups:
        r, d = spacing_ratios(ph)
        degenerate += d
        if r.size == 0:
            raise DegenerateSpectrumError("all spacings vanish", degeneracies=d)
        means.append(float(r.mean()))
        weights.append(ph.size)
        n_tot += r.size
    mean = float(np.dot(means, weights) / np.sum(weights))
    return SpacingRatio(mean, n_tot, degenerate, tuple(means))


# ---------------------------------------------------------------------------
# densities and modes


def smoothed_density(values, support=(0.0, 1.0), n_bins=200, bandwidth=0.02):
    """Probability density smoothed by a Gaussian of fixed width ``bandwidth`` (data units).

    Returns bin centres, density and its pointwise standard error under
    independent sampling, ``sqrt(f / (2 sqrt(pi) n h))``.
    """
    h = histogram(values, support, n_bins)
    width = (support[1] - support[0]) / n_bins
    dens = gaussian_filter1d(h.densities / width, bandwidth / width, mode="constant")
    se = np.sqrt(np.maximum(dens, 0.0) / (2.0 * math.sqrt(math.pi) * h.sample_count * bandwidth))
    return h.centers, dens, se


def find_modes(values, support=(0.0, 1.0), n_bins=200, bandwidth=0.02, min_significance=3.0):
    """Local maxima of the smoothed density and the minima separating them.

    A maximum counts when its prominence exceeds ``min_significance``
    standard errors of the smoothed density at the peak, which discards
    sampling wiggles. Returns ``(peaks, minima)`` as arrays of positions.
    """
    x, d, se = smoothed_density(values, support, n_bins, bandwidth)
    padded = np.concatenate([[0.0], d, [0.0]])
    cand, props = find_peaks(padded, prominence=0.0)
    cand = cand - 1
    keep = props["prominences"] > min_significance * se[cand]
    peaks = cand[keep]
    minima = [x[a + np.argmin(d[a:b + 1])] for a, b in zip(peaks[:-1], peaks[1:])]
    return x[peaks], np.array(minima)


def count_modes(values, **kw):
    return len(find_modes(values, **kw)[0])
