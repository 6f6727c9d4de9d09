"""Univariate downside-risk estimators.

Conventions used consistently by every estimator here and in the dependence
module:

* empirical quantile ``VaR_p`` is the ceil(n*p)-th ascending order statistic,
  the smallest sample value whose empirical CDF k/n reaches p;
* the lower tail is the set of observations strictly below ``VaR_p`` (ties at
  the cutoff are excluded), and conditional moments over it divide by the
  tail count m (population normalization);
* the Gini mean difference uses the pairwise mean over ordered pairs,
  sum|x_i - x_j| / (n*(n-1)), evaluated through its O(n log n) closed form
  on sorted data.

All estimators are pure functions of their inputs and invariant to the input
ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTailError

MIN_TAIL = 2


def quantile_index(n: int, p: float) -> int:
    """1-based order-statistic index ceil(n*p), guarded against fp round-up."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"prudence level must be in (0,1), got {p}")
    k = math.ceil(n * p - 1e-9)
    return min(max(k, 1), n)


def _series(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim != 1:
        raise ValueError("expected a 1-D series")
    return a


def empirical_var(x, p: float) -> float:
    """Generalized p-quantile: inf{l : F(l) >= p} on the empirical CDF."""
    a = _series(x)
    if a.size < 1:
        raise ValueError("empirical_var needs at least one observation")
    k = quantile_index(a.size, p)
    return float(np.partition(a, k - 1)[k - 1])


def tail_subset(x, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Indices and values strictly below VaR_p. Requires a tail of size >= 2."""
    a = _series(x)
    if a.size < 2:
        raise ValueError("tail_subset needs at least two observations")
    cutoff = empirical_var(a, p)
    idx = np.flatnonzero(a < cutoff)
    if idx.size < MIN_TAIL:
        raise DegenerateTailError(
            f"degenerate tail: {idx.size} observation(s) below VaR_{p:g}={cutoff:g}"
        )
    return idx, a[idx]


def tce(x, p: float) -> float:
    """Tail conditional expectation: mean return given the lower tail."""
    _, tail = tail_subset(x, p)
    return float(tail.mean())


def tail_variance(x, p: float) -> float:
    """Second central moment of the lower tail around its conditional mean."""
    _, tail = tail_subset(x, p)
    return float(np.mean((tail - tail.mean()) ** 2))


def tail_sd(x, p: float) -> float:
    return math.sqrt(tail_variance(x, p))


def semi_variance(x, benchmark: float) -> float:
    """Mean over all observations of (x - B)^2 restricted to x < B."""
    a = _series(x)
    if a.size < 1:
        raise ValueError("semi_variance needs at least one observation")
    return float(np.mean(np.minimum(a - benchmark, 0.0) ** 2))


def _gmd_sorted(xs: np.ndarray) -> float:
    # closed form on ascending data: 2/(n(n-1)) * sum_i x_(i) * (2i - n - 1),
    # with the sum running through i = n; identical to the pairwise mean.
    n = xs.size
    coeff = 2.0 * np.arange(1, n + 1) - (n + 1)
    val = 2.0 * float(np.dot(xs, coeff)) / (n * (n - 1))
    return max(val, 0.0)


def gmd(x) -> float:
    """Gini mean difference, mean|x_i - x_j| over ordered pairs i != j."""
    a = _series(x)
    if a.size < 2:
        raise ValueError("gmd needs at least two observations")
    return _gmd_sorted(np.sort(a))


def tail_gini(x, p: float) -> float:
    """Gini mean difference of the observations strictly below VaR_p."""
    _, tail = tail_subset(x, p)
    return _gmd_sorted(np.sort(tail))


@dataclass
class TailStats:
    """Per-asset risk summary at one prudence level (percent units)."""

    asset: str
    prudence: float
    mean: float
    std: float
    var: float
    tce: float
    tv: float
    sd: float
    gmd: float
    tail_gini: float
    tail_count: int


def tail_stats(x, p: float, asset: str = "") -> TailStats:
    """All TailStats fields for one series. Raises on a degenerate tail."""
    a = _series(x)
    idx, tail = tail_subset(a, p)
    tv = float(np.mean((tail - tail.mean()) ** 2))
    return TailStats(
        asset=asset,
        prudence=p,
        mean=float(a.mean()),
        std=float(a.std(ddof=1)),
        var=empirical_var(a, p),
        tce=float(tail.mean()),
        tv=tv,
        sd=math.sqrt(tv),
        gmd=gmd(a),
        tail_gini=_gmd_sorted(np.sort(tail)),
        tail_count=int(idx.size),
    )
