"""Histograms and tail fits for link- and node-strength distributions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    x_min: float
    n_tail: int | None = None
    fitted: bool = True


@dataclass(frozen=True)
class ExponentialFit:
    lam: float
    lo: float
    hi: float
    n: int | None = None
    fitted: bool = True
    at_boundary: bool = False


# Overlay parameters of the published link- and node-strength figures.
REFERENCE_POWER_LAW = PowerLawFit(alpha=1.9, x_min=10 ** -1.5, fitted=False)
REFERENCE_EXPONENTIAL = ExponentialFit(lam=0.6, lo=1.0, hi=6.0, fitted=False)


@dataclass
class Histogram:
    edges: np.ndarray
    density: np.ndarray
    count: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def rows(self):
        for i in range(len(self.count)):
            yield float(self.edges[i]), float(self.edges[i + 1]), float(self.density[i]), int(self.count[i])

    def density_at(self, x: float) -> float:
        """Density of the bin containing x (0 outside the histogram range)."""
        if x < self.edges[0] or x > self.edges[-1]:
            return 0.0
        i = min(int(np.searchsorted(self.edges, x, side="right")) - 1, len(self.count) - 1)
        return float(self.density[i])


def _histogram(values: np.ndarray, edges: np.ndarray) -> Histogram:
    counts, _ = np.histogram(values, bins=edges)  # last bin is closed
    density = counts / (np.diff(edges) * len(values))
    return Histogram(edges, density, counts)


def log_binned_histogram(values, n_bins: int = 30) -> Histogram:
    """Geometric bins from min(values) to max(values); density = count / (width * total)."""
    values = np.sort(np.asarray(values, dtype=float))
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    if not len(values):
        raise ValueError("no values")
    if values[0] <= 0:
        raise ValueError(f"log binning needs positive values, got {values[0]}")
    lo, hi = values[0], values[-1]
    if lo == hi:
        hi = lo * (1 + 1e-9)
    edges = np.geomspace(lo, hi, n_bins + 1)
    edges[0], edges[-1] = lo, hi
    return _histogram(values, edges)


def linear_histogram(values, n_bins: int = 30, range_: tuple[float, float] | None = None) -> Histogram:
    values = np.sort(np.asarray(values, dtype=float))
    if not len(values):
        raise ValueError("no values")
    lo, hi = range_ or (values[0], values[-1])
    if lo == hi:
        hi = lo + 1.0
    return _histogram(values, np.linspace(lo, hi, n_bins + 1))


def fit_power_law_tail(values, x_min: float, min_tail: int = 10) -> PowerLawFit:
    """Continuous power-law MLE: alpha = 1 + n / sum(ln(x / x_min)) over x >= x_min."""
    if x_min <= 0:
        raise ValueError("x_min must be positive")
    values = np.asarray(values, dtype=float)
    tail = np.sort(values[values >= x_min])
    n = len(tail)
    if n < min_tail:
        raise ValueError(f"only {n} samples >= x_min (need {min_tail})")
    total = math.fsum(np.log(tail / x_min).tolist())
    if total <= 0:
        raise ValueError("all tail samples equal x_min")
    return PowerLawFit(1.0 + n / total, x_min, n)


def truncated_exponential_mean(lam: float, width: float) -> float:
    """Mean offset from the lower bound of an exponential truncated to [0, width]."""
    if lam == 0:
        return width / 2
    if lam * width > 700:
        return 1.0 / lam
    return 1.0 / lam - width / math.expm1(lam * width)


def fit_exponential(values, range_: tuple[float, float] = (1.0, 6.0), min_n: int = 10, tol: float = 1e-10) -> ExponentialFit:
    """MLE decay rate of an exponential truncated to [lo, hi].

    The likelihood is stationary where the truncated mean equals the sample
    mean; that root is found by bisection. A sample mean at or above the range
    midpoint has no positive root and returns lam=0 with ``at_boundary``.
    """
    lo, hi = map(float, range_)
    if not lo < hi:
        raise ValueError("range must satisfy lo < hi")
    values = np.asarray(values, dtype=float)
    sel = np.sort(values[(values >= lo) & (values <= hi)])
    n = len(sel)
    if n < min_n:
        raise ValueError(f"only {n} samples in [{lo}, {hi}] (need {min_n})")
    width = hi - lo
    ybar = math.fsum((sel - lo).tolist()) / n
    if ybar >= width / 2 * (1 - 1e-12):
        return ExponentialFit(0.0, lo, hi, n, at_boundary=True)
    if ybar <= 0:
        raise ValueError("all samples at the lower bound")
    # truncated mean decreases in lam and is below 1/lam, so the root lies in (0, 1/ybar]
    a, b = 0.0, 1.0 / ybar
    while b - a > tol:
        mid = (a + b) / 2
        if truncated_exponential_mean(mid, width) > ybar:
            a = mid
        else:
            b = mid
    return ExponentialFit((a + b) / 2, lo, hi, n)


def overlay_curve(fit, grid, hist: Histogram | None = None, anchor: float | None = None):
    """Fit curve on ``grid`` scaled to a histogram's density at the anchor point.

    The anchor is x_min for a power law and the range lower bound for an
    exponential. Pass ``anchor`` to override the histogram lookup.
    """
    grid = np.asarray(grid, dtype=float)
    if not len(grid):
        return grid, np.array([])
    if isinstance(fit, PowerLawFit):
        x0 = fit.x_min
        shape = (grid / x0) ** (-fit.alpha)
    elif isinstance(fit, ExponentialFit):
        x0 = fit.lo
        shape = np.exp(-fit.lam * (grid - x0))
    else:
        raise TypeError(f"unsupported fit {type(fit).__name__}")
    if anchor is None:
        anchor = hist.density_at(x0) if hist is not None else 1.0
    return grid, anchor * shape


def fit_report(fit) -> dict:
    d = asdict(fit)
    d["kind"] = "power_law" if isinstance(fit, PowerLawFit) else "exponential"
    return d
