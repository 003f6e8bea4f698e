"""Histograms, CCDFs and heavy-tail fits.

Power-law fits use the continuous maximum-likelihood estimator with the lower
cutoff chosen by minimising the Kolmogorov-Smirnov distance (Clauset, Shalizi
and Newman 2009).  ``exponent`` in :class:`TailFit` is the density exponent
alpha; the CCDF decays as x**-(alpha - 1).
"""
from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np


class FitError(ValueError):
    pass


# ---------------------------------------------------------------------------
# mergeable value counts

@dataclass
class ValueCounts:
    """Multiset of observed values; merges by addition."""

    counts: Counter = field(default_factory=Counter)

    def add(self, value, times: int = 1):
        self.counts[value] += times

    def update(self, values: Iterable):
        self.counts.update(values)

    def merge(self, other: ValueCounts) -> ValueCounts:
        return ValueCounts(self.counts + other.counts)

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def to_array(self) -> np.ndarray:
        keys = sorted(self.counts)
        return np.repeat(np.asarray(keys, dtype=float), [self.counts[k] for k in keys])


# ---------------------------------------------------------------------------
# CCDF

@dataclass
class CcdfCurve:
    values: np.ndarray
    fractions: np.ndarray
    n: int

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.fractions.tolist()))


def ccdf(values) -> CcdfCurve:
    """Fraction of samples >= v at every distinct sample value v."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("ccdf of an empty sample")
    uniq, counts = np.unique(x, return_counts=True)
    n = x.size
    at_least = n - np.concatenate(([0], np.cumsum(counts)[:-1]))
    return CcdfCurve(uniq, at_least / n, n)


# ---------------------------------------------------------------------------
# binned densities

@dataclass
class DistributionSummary:
    bin_edges: np.ndarray
    counts: np.ndarray
    total_n: int
    binning: str
    param: float

    @property
    def density(self) -> np.ndarray:
        widths = np.diff(self.bin_edges)
        if self.total_n == 0:
            return np.zeros_like(widths)
        return self.counts / (self.total_n * widths)

    def rows(self):
        for lo, hi, c, d in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts, self.density):
            yield float(lo), float(hi), int(c), float(d)


def log_edges(lo: float, hi: float, ratio: float = 1.3) -> np.ndarray:
    """Geometric edges covering [lo, hi].  A zero lower bound gets a [0, 1) first bin."""
    if ratio <= 1:
        raise ValueError("ratio must exceed 1")
    if lo < 0:
        raise ValueError("logarithmic binning needs nonnegative values")
    base = 1.0 if lo == 0 else lo
    # count bins in log space so a subnormal base cannot stall a multiply loop
    k = max(1, math.floor((math.log(max(hi, base)) - math.log(base)) / math.log(ratio)) + 1)
    edges = np.exp(math.log(base) + math.log(ratio) * np.arange(k + 1, dtype=float))
    edges[0] = base
    while edges[-1] <= hi:
        edges = np.append(edges, edges[-1] * ratio)
    # subnormal products can round onto each other
    edges = np.unique(edges)
    return np.concatenate(([0.0], edges)) if lo == 0 else edges


def linear_edges(lo: float, hi: float, width: float) -> np.ndarray:
    if width <= 0:
        raise ValueError("width must be positive")
    nbins = max(1, int(math.floor((hi - lo) / width)) + 1)
    return lo + width * np.arange(nbins + 1)


def _bin_index(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(edges, x, side="right") - 1
    # the top edge is inclusive
    idx[x == edges[-1]] = len(edges) - 2
    if np.any(idx < 0) or np.any(idx >= len(edges) - 1):
        raise ValueError("values fall outside the bin edges")
    return idx


def histogram(values, edges) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    edges = np.asarray(edges, dtype=float)
    return np.bincount(_bin_index(x, edges), minlength=len(edges) - 1)


def log_binned(values, ratio: float = 1.3) -> DistributionSummary:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return DistributionSummary(np.array([1.0, ratio]), np.zeros(1, dtype=int), 0, "logarithmic", ratio)
    edges = log_edges(float(x.min()), float(x.max()), ratio)
    return DistributionSummary(edges, histogram(x, edges), int(x.size), "logarithmic", ratio)


def linear_binned(values, width: float, lo: float = 0.0, hi: float | None = None) -> DistributionSummary:
    """Linear histogram over [lo, hi]; values outside the range are ignored."""
    x = np.asarray(values, dtype=float)
    if hi is None:
        hi = float(x.max()) if x.size else lo + width
    x = x[(x >= lo) & (x <= hi)]
    edges = linear_edges(lo, hi, width)
    return DistributionSummary(edges, histogram(x, edges), int(x.size), "linear", width)


@dataclass
class DensityGrid:
    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray        # shape (len(x_edges)-1, len(y_edges)-1)
    column_n: np.ndarray
    column_mean_y: np.ndarray  # nan where a column is empty


def density_grid_2d(pairs, x_edges=None, y_edges=None, ratio: float = 1.3) -> DensityGrid:
    """2-D count grid plus the mean of y within each x bin.

    Edges default to logarithmic binning of each coordinate.
    """
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if arr.shape[0] == 0:
        raise ValueError("density grid of no points")
    x, y = arr[:, 0], arr[:, 1]
    if x_edges is None:
        x_edges = log_edges(float(x.min()), float(x.max()), ratio)
    if y_edges is None:
        y_edges = log_edges(float(y.min()), float(y.max()), ratio)
    x_edges = np.asarray(x_edges, dtype=float)
    y_edges = np.asarray(y_edges, dtype=float)
    xi = _bin_index(x, x_edges)
    yi = _bin_index(y, y_edges)
    nx, ny = len(x_edges) - 1, len(y_edges) - 1
    counts = np.bincount(xi * ny + yi, minlength=nx * ny).reshape(nx, ny)
    column_n = np.bincount(xi, minlength=nx)
    sums = np.bincount(xi, weights=y, minlength=nx)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(column_n > 0, sums / np.maximum(column_n, 1), np.nan)
    return DensityGrid(x_edges, y_edges, counts, column_n, means)


# ---------------------------------------------------------------------------
# tail fits

@dataclass
class TailFit:
    family: str
    exponent_or_mu: float
    xmin: float
    stderr: float
    ks_stat: float
    n_tail: int
    sigma: float = float("nan")

    @property
    def ccdf_exponent(self) -> float:
        """Decay exponent of Q(x) for a power law (alpha - 1)."""
        if self.family != "powerlaw":
            return float("nan")
        return self.exponent_or_mu - 1.0

    def label(self) -> str:
        """Value with its uncertainty in the last digit, e.g. ``3.38(1)``."""
        return format_uncertainty(self.exponent_or_mu, self.stderr)


def format_uncertainty(value: float, err: float) -> str:
    if not (math.isfinite(err) and err > 0):
        return f"{value:g}"
    decimals = max(0, -int(math.floor(math.log10(err))))
    digit = round(err * 10**decimals)
    if digit >= 10:
        decimals = max(0, decimals - 1)
        digit = round(err * 10**decimals)
    return f"{value:.{decimals}f}({digit})"


def _powerlaw_from_sorted(tail: np.ndarray, xmin: float, discrete: bool) -> TailFit:
    n = tail.size
    if n < 2:
        raise FitError("need at least two samples at or above xmin")
    base = xmin - 0.5 if discrete else xmin
    s = float(np.sum(np.log(tail / base)))
    if not discrete and s <= 0:
        raise FitError("degenerate-tail: every tail sample equals xmin")
    if discrete and np.all(tail == xmin):
        raise FitError("degenerate-tail: every tail sample equals xmin")
    alpha = 1.0 + n / s
    ks = _powerlaw_ks(tail, xmin, alpha)
    return TailFit("powerlaw", alpha, float(xmin), (alpha - 1.0) / math.sqrt(n), ks, n)


def _powerlaw_ks(tail: np.ndarray, xmin: float, alpha: float) -> float:
    """Largest gap between empirical and model CCDF over the distinct tail values."""
    uniq, counts = np.unique(tail, return_counts=True)
    n = tail.size
    emp = (n - np.concatenate(([0], np.cumsum(counts)[:-1]))) / n
    model = (uniq / xmin) ** (1.0 - alpha)
    return float(np.max(np.abs(emp - model)))


def fit_powerlaw_mle(values, xmin: float, discrete: bool = False) -> TailFit:
    """Continuous power-law MLE above ``xmin``.

    alpha = 1 + n / sum(ln(x / xmin)); stderr = (alpha - 1) / sqrt(n).
    ``discrete=True`` uses the xmin - 1/2 approximation for integer data.
    """
    if xmin <= 0:
        raise FitError("xmin must be positive")
    x = np.asarray(values, dtype=float)
    tail = np.sort(x[x >= xmin])
    return _powerlaw_from_sorted(tail, xmin, discrete)


def scan_xmin_ks(values, max_candidates: int = 200, thin_above: int = 10_000,
                 discrete: bool = False, min_tail: int = 2) -> TailFit:
    """Fit at every distinct candidate xmin and keep the fit with the smallest KS distance.

    Above ``thin_above`` distinct values the candidates are thinned to
    ``max_candidates`` quantiles of the distinct values.
    """
    x = np.sort(np.asarray(values, dtype=float))
    x = x[x > 0]
    uniq = np.unique(x)
    if uniq.size < 10:
        raise FitError(f"need at least 10 distinct positive values, got {uniq.size}")
    candidates = uniq[:-1]
    if candidates.size > thin_above:
        pick = np.unique(np.round(np.linspace(0, candidates.size - 1, max_candidates)).astype(int))
        candidates = candidates[pick]
    logs = np.log(x)
    suffix = np.concatenate((np.cumsum(logs[::-1])[::-1], [0.0]))
    best = None
    for xmin in candidates:
        start = int(np.searchsorted(x, xmin, side="left"))
        n = x.size - start
        if n < min_tail:
            continue
        base = xmin - 0.5 if discrete else xmin
        s = float(suffix[start]) - n * math.log(base)
        if s <= 0:
            continue
        alpha = 1.0 + n / s
        ks = _powerlaw_ks(x[start:], xmin, alpha)
        if best is None or ks < best.ks_stat:
            best = TailFit("powerlaw", alpha, float(xmin), (alpha - 1.0) / math.sqrt(n), ks, n)
    if best is None:
        raise FitError("no candidate xmin produced a valid fit")
    return best


def _normal_cdf(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))


def fit_lognormal_mle(values, xmin: float | None = None) -> TailFit:
    """Lognormal MLE: mu and population sigma of ln x.

    With ``xmin`` the fit is restricted to samples >= xmin without any
    truncation correction.
    """
    x = np.asarray(values, dtype=float)
    if xmin is not None:
        x = x[x >= xmin]
    if x.size < 2:
        raise FitError("need at least two samples")
    if np.any(x <= 0):
        raise FitError("lognormal fit needs strictly positive samples")
    logs = np.log(x)
    mu = float(logs.mean())
    sigma = float(logs.std())
    if sigma == 0:
        raise FitError("zero-variance sample")
    z = np.sort((logs - mu) / sigma)
    cdf = _normal_cdf(z)
    n = z.size
    i = np.arange(1, n + 1)
    ks = float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
    return TailFit("lognormal", mu, float(x.min()), sigma / math.sqrt(n), ks, int(n), sigma=sigma)
