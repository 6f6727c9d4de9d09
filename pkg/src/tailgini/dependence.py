"""Pairwise and matrix-valued dependence estimators.

The Gini correlation of (x, y) is Cov[x, F_y(y)] / Cov[x, F_x(x)]; its tail
version conditions the numerator on y's lower tail and the denominator on
x's lower tail, so the two covariances generally run over *different*
observation sets and the measure is asymmetric in its arguments. Asymmetry
of the resulting matrix is exactly the tail-exchangeability diagnostic.

Estimator conventions match ``estimators``: strict lower tails at the
ceil(n*p) cutoff, population-normalized conditional covariances, and the
max-rank empirical CDF F(x) = #{x_j <= x}/n. Values outside [-1, 1] are
legal for (tail) Gini correlations and are never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMarginalError
from .estimators import tail_subset
from .panel import ReturnPanel, as_values


def ecdf_values(x) -> np.ndarray:
    """Empirical CDF at each observation; ties get the maximum rank."""
    a = np.asarray(x, dtype=float)
    xs = np.sort(a)
    return np.searchsorted(xs, a, side="right") / a.size


def _pcov(a: np.ndarray, b: np.ndarray) -> float:
    # population covariance, centered form for accuracy
    return float(np.mean((a - a.mean()) * (b - b.mean())))


def _check_paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise ValueError("paired series must be 1-D and of equal length")
    return a, b


def gini_corr(x, y) -> float:
    """Gini correlation Cov[x, F_y(y)] / Cov[x, F_x(x)] over all pairs."""
    a, b = _check_paired(x, y)
    if a.size < 2:
        raise ValueError("gini_corr needs at least two pairs")
    den = _pcov(a, ecdf_values(a))
    if den == 0.0:
        raise DegenerateMarginalError("degenerate marginal: Cov[x, F_x(x)] = 0")
    return _pcov(a, ecdf_values(b)) / den


def tail_gini_corr(x, y, p: float) -> float:
    """Tail Gini correlation at prudence level p.

    Numerator: Cov[x, F_y(y)] over the observations where y sits strictly
    below its own VaR_p. Denominator: Cov[x, F_x(x)] over x's own tail.
    Both CDFs are the full-sample (global) empirical CDFs.
    """
    a, b = _check_paired(x, y)
    iy, _ = tail_subset(b, p)
    ix, _ = tail_subset(a, p)
    den = _pcov(a[ix], ecdf_values(a)[ix])
    if den == 0.0:
        raise DegenerateMarginalError("degenerate marginal: conditional Cov[x, F_x(x)] = 0")
    return _pcov(a[iy], ecdf_values(b)[iy]) / den


def tail_gini_cov(x, p: float) -> float:
    """Covariance-form tail Gini: 4/p_hat * Cov[x, F_x(x) | lower tail].

    p_hat = m/n is the realized tail fraction. On tie-free data this equals
    (m-1)/m times the pairwise form ``estimators.tail_gini``; the covariance
    form is the one under which portfolio decompositions are sample-exact.
    """
    a = np.asarray(x, dtype=float)
    idx, tail = tail_subset(a, p)
    p_hat = idx.size / a.size
    return 4.0 / p_hat * _pcov(tail, ecdf_values(a)[idx])


@dataclass
class DependenceMatrices:
    """Pearson, Gini, and tail-Gini correlation matrices for one panel.

    Rows index the first argument: ``tail_gini[i, j]`` estimates the tail
    Gini correlation of (asset_i, asset_j) in that order. ``asymmetry`` is
    max_ij |tail_gini[i, j] - tail_gini[j, i]|.
    """

    assets: list[str]
    prudence: float
    pearson: np.ndarray
    gini: np.ndarray
    tail_gini: np.ndarray
    asymmetry: float


class _MarginCache:
    """Per-column ECDFs, tail index sets, and covariance denominators."""

    def __init__(self, values: np.ndarray, p: float, assets: list[str]):
        self.values = values
        n, d = values.shape
        self.cdf = np.empty_like(values)
        self.tails: list[np.ndarray] = []
        self.gini_den = np.empty(d)
        self.tail_den = np.empty(d)
        for j in range(d):
            col = values[:, j]
            self.cdf[:, j] = ecdf_values(col)
            try:
                idx, _ = tail_subset(col, p)
            except Exception as exc:
                raise type(exc)(f"asset {assets[j]!r}: {exc}") from None
            self.tails.append(idx)
            self.gini_den[j] = _pcov(col, self.cdf[:, j])
            self.tail_den[j] = _pcov(col[idx], self.cdf[idx, j])
            if self.gini_den[j] == 0.0 or self.tail_den[j] == 0.0:
                raise DegenerateMarginalError(f"asset {assets[j]!r}: degenerate marginal")


def dependence_matrices(panel, p: float) -> DependenceMatrices:
    """Entrywise Pearson/Gini/tail-Gini matrices plus the asymmetry scalar."""
    values = as_values(panel)
    assets = panel.assets if isinstance(panel, ReturnPanel) else [
        f"A{j + 1}" for j in range(values.shape[1])
    ]
    d = values.shape[1]
    cache = _MarginCache(values, p, assets)

    if d == 1:
        eye = np.ones((1, 1))
        return DependenceMatrices(assets, p, eye.copy(), eye.copy(), eye.copy(), 0.0)

    pearson = np.clip(np.corrcoef(values, rowvar=False), -1.0, 1.0)
    gini = np.ones((d, d))
    tail = np.ones((d, d))
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            gini[i, j] = _pcov(values[:, i], cache.cdf[:, j]) / cache.gini_den[i]
            tj = cache.tails[j]
            tail[i, j] = _pcov(values[tj, i], cache.cdf[tj, j]) / cache.tail_den[i]
    asym = float(np.max(np.abs(tail - tail.T)))
    return DependenceMatrices(assets, p, pearson, gini, tail, asym)


@dataclass
class ExchangeabilityReport:
    """Gap profile |G_ij,p - G_ji,p| for one asset pair over a level grid."""

    pair: tuple[int, int]
    assets: tuple[str, str]
    levels: list[float]
    gaps: list[float]
    exchangeable: list[bool]
    exchangeable_up_to: float | None = field(default=None)


def check_exchangeability(panel, levels, tol: float) -> list[ExchangeabilityReport]:
    """Per-pair tail-Gini symmetry gaps over a grid of prudence levels.

    A pair is exchangeable up to level p* when every gap at levels <= p*
    stays within ``tol``; ``exchangeable_up_to`` records the largest such
    grid level (None if even the smallest level fails).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    levels = sorted(float(p) for p in levels)
    for p in levels:
        if not 0.0 < p < 1.0:
            raise ValueError(f"prudence level must be in (0,1), got {p}")
    values = as_values(panel)
    assets = panel.assets if isinstance(panel, ReturnPanel) else [
        f"A{j + 1}" for j in range(values.shape[1])
    ]
    mats = {p: dependence_matrices(panel, p).tail_gini for p in levels}
    reports = []
    d = values.shape[1]
    for i in range(d):
        for j in range(i + 1, d):
            gaps = [abs(mats[p][i, j] - mats[p][j, i]) for p in levels]
            ok = [g <= tol for g in gaps]
            up_to = None
            for p, good in zip(levels, ok):
                if not good:
                    break
                up_to = p
            reports.append(
                ExchangeabilityReport((i, j), (assets[i], assets[j]), levels, gaps, ok, up_to)
            )
    return reports


def portfolio_tail_gini(panel, weights, p: float) -> tuple[float, np.ndarray]:
    """Tail Gini of the weighted portfolio plus its per-asset decomposition.

    Returns ``(tg, contributions)`` where ``tg`` is the covariance-form tail
    Gini of the portfolio series L = values @ weights and
    ``contributions[i] = 4/p_hat * Cov[L_i, F_L(L) | L in its lower tail]``.
    Sample covariance is bilinear, so ``weights @ contributions == tg``
    exactly (up to floating point).
    """
    values = as_values(panel)
    w = np.asarray(weights, dtype=float)
    if w.shape != (values.shape[1],):
        raise ValueError("weights length must match the number of assets")
    port = values @ w
    idx, tail = tail_subset(port, p)
    p_hat = idx.size / port.size
    cdf_tail = ecdf_values(port)[idx]
    contrib = np.array(
        [4.0 / p_hat * _pcov(values[idx, j], cdf_tail) for j in range(values.shape[1])]
    )
    tg = 4.0 / p_hat * _pcov(tail, cdf_tail)
    return tg, contrib


def _relative(residual: float, lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return residual / scale


def tail_gini_quadratic_residual(panel, weights, p: float, relative: bool = False) -> float:
    """LHS - RHS of the squared-tail-Gini expansion at the sample level.

    With T_i the covariance-form tail Gini of asset i, T_L that of the
    portfolio, G_ij the tail Gini correlation matrix and
    d_i = G_iL - G_Li the asset-vs-portfolio asymmetry, the expansion reads

        T_L^2 - T_L * sum_i w_i d_i T_i
            = 1/2 * sum_ij w_i w_j T_i T_j (G_ij + G_ji).

    Every tail Gini here is evaluated in its 4/p_hat covariance form with
    the realized tail fraction, which makes the identity hold sample-exactly
    whenever all marginal and portfolio tails have equal size (tie-free
    continuous data). The signed residual is returned; ``relative=True``
    divides by max(|LHS|, |RHS|).
    """
    values = as_values(panel)
    w = np.asarray(weights, dtype=float)
    n, d = values.shape
    if w.shape != (d,):
        raise ValueError("weights length must match the number of assets")
    port = values @ w

    tails, cdfs, dens, tg = [], [], np.empty(d), np.empty(d)
    for j in range(d):
        col = values[:, j]
        idx, _ = tail_subset(col, p)
        cdf = ecdf_values(col)
        den = _pcov(col[idx], cdf[idx])
        if den == 0.0:
            raise DegenerateMarginalError("degenerate marginal in quadratic-form check")
        tails.append(idx)
        cdfs.append(cdf)
        dens[j] = den
        tg[j] = 4.0 / (idx.size / n) * den

    il, _ = tail_subset(port, p)
    cdf_l = ecdf_values(port)
    den_l = _pcov(port[il], cdf_l[il])
    if den_l == 0.0:
        raise DegenerateMarginalError("degenerate portfolio tail in quadratic-form check")
    tg_l = 4.0 / (il.size / n) * den_l

    g_il = np.array([_pcov(values[il, j], cdf_l[il]) / dens[j] for j in range(d)])
    g_li = np.array([_pcov(port[tails[j]], cdfs[j][tails[j]]) / den_l for j in range(d)])
    gmat = np.ones((d, d))
    for i in range(d):
        for j in range(d):
            if i != j:
                tj = tails[j]
                gmat[i, j] = _pcov(values[tj, i], cdfs[j][tj]) / dens[i]

    lhs = tg_l**2 - tg_l * float(np.sum(w * (g_il - g_li) * tg))
    rhs = 0.5 * float(np.einsum("i,j,i,j,ij->", w, w, tg, tg, gmat + gmat.T))
    res = lhs - rhs
    return _relative(res, lhs, rhs) if relative else res


def gmd_quadratic_residual(panel, weights, relative: bool = False) -> float:
    """Unconditional analogue of ``tail_gini_quadratic_residual``.

    Uses covariance-form GMDs, 4*Cov[x, F_x(x)], and plain Gini correlations
    over the full sample; the identity is sample-exact regardless of ties
    because every covariance runs over the same index set.
    """
    values = as_values(panel)
    w = np.asarray(weights, dtype=float)
    n, d = values.shape
    if w.shape != (d,):
        raise ValueError("weights length must match the number of assets")
    port = values @ w

    cdfs = [ecdf_values(values[:, j]) for j in range(d)]
    dens = np.array([_pcov(values[:, j], cdfs[j]) for j in range(d)])
    if np.any(dens == 0.0):
        raise DegenerateMarginalError("degenerate marginal in quadratic-form check")
    g = 4.0 * dens
    cdf_l = ecdf_values(port)
    den_l = _pcov(port, cdf_l)
    if den_l == 0.0:
        raise DegenerateMarginalError("degenerate portfolio in quadratic-form check")
    g_l = 4.0 * den_l

    g_il = np.array([_pcov(values[:, j], cdf_l) / dens[j] for j in range(d)])
    g_li = np.array([_pcov(port, cdfs[j]) / den_l for j in range(d)])
    gmat = np.ones((d, d))
    for i in range(d):
        for j in range(d):
            if i != j:
                gmat[i, j] = _pcov(values[:, i], cdfs[j]) / dens[i]

    lhs = g_l**2 - g_l * float(np.sum(w * (g_il - g_li) * g))
    rhs = 0.5 * float(np.einsum("i,j,i,j,ij->", w, w, g, g, gmat + gmat.T))
    res = lhs - rhs
    return _relative(res, lhs, rhs) if relative else res
