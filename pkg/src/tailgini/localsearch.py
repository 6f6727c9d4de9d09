"""Constraint-preserving local search over portfolio weights.

The budget and target-mean constraints define an affine feasible set; the
search never leaves it. Each trial direction puts +delta on one coordinate,
a compensating amount on a partner coordinate, and spreads the remainder
evenly across the rest so that both 1'dw = 0 and mu'dw = 0 hold by
construction. Moves go to the best strictly improving candidate (lowest
direction index wins ties); when no direction improves, the step shrinks
geometrically down to a floor. A fixed-step mode disables the shrinking and
stops once the objective change falls below the threshold.

Long-only runs reject any candidate that would leave the nonnegative
orthant instead of projecting, which would break the null-space feasibility
guarantee. Tail objectives re-sort the candidate portfolio series at every
evaluation because the tail set moves with the weights.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTailError, InfeasibleTargetError
from .estimators import quantile_index
from .panel import as_values

OBJECTIVES = ("variance", "gmd", "tail-gini", "tail-sd")
_LONG_ONLY_TOL = -1e-12


@dataclass
class SearchOptions:
    """Knobs for the local search; defaults match the reference schedule."""

    delta: float = 0.001
    threshold: float = 0.00001
    max_iters: int = 100_000
    shrink: float = 0.5
    min_delta: float = 1e-7
    long_only: bool = False
    objective: str = "variance"
    prudence: float | None = None
    fixed_step: bool = False
    record_path: bool = False

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.objective in ("tail-gini", "tail-sd"):
            if self.prudence is None or not 0.0 < self.prudence < 1.0:
                raise ValueError(f"{self.objective} objective needs a prudence level in (0,1)")
        if not self.delta > self.min_delta > 0:
            raise ValueError("need delta > min_delta > 0")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0,1)")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


@dataclass
class FrontierPoint:
    """One solved target: weights, risk value, and solver diagnostics."""

    target: float
    weights: np.ndarray
    risk: float
    iterations: int
    converged: bool
    final_delta: float
    error: str | None = None
    path: list | None = field(default=None, repr=False)


def feasible_start(means, target: float, long_only: bool = False) -> np.ndarray:
    """A weight vector meeting both constraints.

    Unconstrained: the minimum-norm solution of {1'w = 1, mu'w = target}.
    Long-only: the convex combination of the two assets whose means bracket
    the target most tightly (a vertex when the target hits an asset mean).
    """
    mu = np.asarray(means, dtype=float)
    d = mu.size
    if d < 1:
        raise InfeasibleTargetError("no assets")
    if np.ptp(mu) == 0.0:
        raise InfeasibleTargetError("degenerate means: all assets share one mean")
    if long_only:
        lo, hi = float(mu.min()), float(mu.max())
        if not lo - 1e-12 <= target <= hi + 1e-12:
            raise InfeasibleTargetError(
                f"long-only target {target:g} outside the asset-mean range [{lo:g}, {hi:g}]"
            )
        below = np.flatnonzero(mu <= target + 1e-12)
        above = np.flatnonzero(mu >= target - 1e-12)
        ia = below[np.argmax(mu[below])]
        ib = above[np.argmin(mu[above])]
        w = np.zeros(d)
        if ia == ib or mu[ib] == mu[ia]:
            w[ia] = 1.0
        else:
            frac = (target - mu[ia]) / (mu[ib] - mu[ia])
            w[ia] = 1.0 - frac
            w[ib] = frac
        return w
    mat = np.vstack([np.ones(d), mu])
    rhs = np.array([1.0, target])
    w, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    if np.max(np.abs(mat @ w - rhs)) > 1e-9 * max(1.0, abs(target)):
        raise InfeasibleTargetError(f"no weight vector reaches target {target:g}")
    return w


def direction_set(means, delta: float) -> np.ndarray:
    """Feasible trial directions: rows satisfy 1'dw = 0 and mu'dw = 0.

    For each coordinate i, +delta goes on i, a compensating amount on a
    partner coordinate, and the remainder spreads evenly over the other
    d - 2 coordinates; each direction ships with its negation. A partner
    whose mean ties the average of the remaining coordinates would blow up
    the formula, so the next admissible partner is used instead; if none
    is admissible the direction is omitted with a warning. Needs d >= 3;
    with d = 2 both constraints pin the weights and the set is empty.
    """
    mu = np.asarray(means, dtype=float)
    d = mu.size
    if d < 3:
        return np.zeros((0, d))
    scale = max(1.0, float(np.max(np.abs(mu))))
    rows = []
    for i in range(d):
        built = False
        for off in range(1, d):
            partner = (i + off) % d
            rest = [k for k in range(d) if k != i and k != partner]
            avg_rest = float(mu[rest].mean())
            denom = mu[partner] - avg_rest
            if abs(denom) < 1e-12 * scale:
                continue
            dw = np.zeros(d)
            dw[i] = delta
            dw[partner] = delta * (avg_rest - mu[i]) / denom
            dw[rest] = -(delta + dw[partner]) / (d - 2)
            tol = 1e-12 * scale * max(1.0, float(np.max(np.abs(dw))) / delta)
            if abs(dw.sum()) > tol or abs(float(mu @ dw)) > tol:
                continue
            rows.append(dw)
            rows.append(-dw)
            built = True
            break
        if not built:
            warnings.warn(
                f"direction {i} omitted: no admissible partner", RuntimeWarning, stacklevel=2
            )
    if not rows:
        return np.zeros((0, d))
    return np.vstack(rows)


def _column_objectives(series_matrix: np.ndarray, options: SearchOptions) -> np.ndarray:
    """Objective value per column; inf marks degenerate (rejected) columns."""
    m = series_matrix
    n = m.shape[0]
    if options.objective == "variance":
        return m.var(axis=0, ddof=1)
    s = np.sort(m, axis=0)
    if options.objective == "gmd":
        coeff = 2.0 * np.arange(1, n + 1) - (n + 1)
        return np.maximum(2.0 * (coeff @ s) / (n * (n - 1)), 0.0)
    k = quantile_index(n, options.prudence)
    out = np.empty(m.shape[1])
    for j in range(m.shape[1]):
        col = s[:, j]
        cnt = int(np.searchsorted(col[:k], col[k - 1], side="left"))
        if cnt < 2:
            out[j] = np.inf
            continue
        tail = col[:cnt]
        if options.objective == "tail-gini":
            coeff = 2.0 * np.arange(1, cnt + 1) - (cnt + 1)
            out[j] = max(2.0 * float(coeff @ tail) / (cnt * (cnt - 1)), 0.0)
        else:  # tail-sd
            out[j] = math.sqrt(float(np.mean((tail - tail.mean()) ** 2)))
    return out


def _start_value(series: np.ndarray, options: SearchOptions) -> float:
    val = float(_column_objectives(series[:, None], options)[0])
    if not np.isfinite(val):
        raise DegenerateTailError("objective undefined at the starting weights (degenerate tail)")
    return val


def minimize_risk(panel, target: float, options: SearchOptions | None = None,
                  start: np.ndarray | None = None) -> FrontierPoint:
    """Minimize the configured risk objective at one target mean."""
    options = options or SearchOptions()
    values = as_values(panel)
    n, d = values.shape
    means = values.mean(axis=0)

    w = None
    if start is not None:
        cand = np.asarray(start, dtype=float)
        ok = (
            cand.shape == (d,)
            and abs(cand.sum() - 1.0) < 1e-8
            and abs(float(means @ cand) - target) < 1e-8 * max(1.0, abs(target))
            and (not options.long_only or cand.min() >= _LONG_ONLY_TOL)
        )
        if ok:
            w = cand
    if w is None:
        w = feasible_start(means, target, options.long_only)

    series = values @ w
    value = _start_value(series, options)
    path = [(w.copy(), value)] if options.record_path else None

    unit_dirs = direction_set(means, 1.0)
    if unit_dirs.shape[0] == 0:
        return FrontierPoint(float(target), w, value, 0, True, options.delta, path=path)
    unit_series = values @ unit_dirs.T  # n x k, reused at every delta level

    delta = options.delta
    iters = 0
    converged = False
    floor = delta
    while floor * options.shrink >= options.min_delta:
        floor *= options.shrink

    while iters < options.max_iters:
        iters += 1
        cand_w = w[None, :] + delta * unit_dirs
        cand_series = series[:, None] + delta * unit_series
        vals = _column_objectives(cand_series, options)
        if options.long_only:
            vals = np.where(cand_w.min(axis=1) < _LONG_ONLY_TOL, np.inf, vals)
        j = int(np.argmin(vals))
        if vals[j] < value:
            improvement = value - vals[j]
            w = cand_w[j]
            series = cand_series[:, j].copy()
            value = float(vals[j])
            if path is not None:
                path.append((w.copy(), value))
            if improvement <= options.threshold and (
                options.fixed_step or delta <= floor
            ):
                converged = True
                break
            continue
        if options.fixed_step:
            converged = True
            break
        if delta * options.shrink < options.min_delta:
            converged = True
            break
        delta *= options.shrink

    return FrontierPoint(float(target), w, value, iters, converged, delta, path=path)


def numeric_frontier(panel, targets, options: SearchOptions | None = None) -> list[FrontierPoint]:
    """One FrontierPoint per target, warm-starting from the previous solve.

    Per-target failures are carried in-band on the point (``error`` set,
    weights NaN) so one bad target never aborts the rest.
    """
    options = options or SearchOptions()
    values = as_values(panel)
    d = values.shape[1]
    means = values.mean(axis=0)
    mat = np.vstack([np.ones(d), means])
    points: list[FrontierPoint] = []
    prev: np.ndarray | None = None
    for t in targets:
        t = float(t)
        start = None
        if prev is not None:
            rhs = np.array([1.0 - prev.sum(), t - float(means @ prev)])
            corr, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
            start = prev + corr
        try:
            point = minimize_risk(values, t, options, start=start)
        except (DegenerateTailError, InfeasibleTargetError, ValueError) as exc:
            points.append(
                FrontierPoint(t, np.full(d, np.nan), math.nan, 0, False, options.delta,
                              error=str(exc))
            )
            continue
        points.append(point)
        prev = point.weights
    return points


def distortion_rate(ref_weights, alt_weights) -> np.ndarray:
    """Percent change per weight, 100*(alt - ref)/|ref|; NaN where ref ~ 0."""
    ref = np.asarray(ref_weights, dtype=float)
    alt = np.asarray(alt_weights, dtype=float)
    if ref.shape != alt.shape:
        raise ValueError("weight vectors must have equal length")
    out = np.full(ref.shape, np.nan)
    ok = np.abs(ref) >= 1e-12
    out[ok] = 100.0 * (alt[ok] - ref[ok]) / np.abs(ref[ok])
    return out
