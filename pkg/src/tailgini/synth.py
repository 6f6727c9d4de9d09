"""Seeded synthetic panels and samplers for tests and experiments.

Every generator is a pure function of (parameters, seed); the pseudo-random
stream is NumPy's ``default_rng`` (PCG64), fixed repo-wide so that seeded
outputs are stable across platforms. Continuous constructions draw uniforms
from a stratified grid, one point per bin of width 1/n, which makes the
samples tie-free by construction and lets rank-based estimators hit their
comonotone/antimonotone limits exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefiniteError
from .panel import ReturnPanel


def _dates(n: int) -> list[str]:
    return [f"t{k:06d}" for k in range(n)]


def stratified_uniforms(n: int, seed: int, jitter: bool = False) -> np.ndarray:
    """Tie-free uniforms: one draw per bin ((k, k+1)/n), randomly ordered.

    With ``jitter`` each point lands uniformly inside its bin; without, at
    the bin midpoint (an exact grid, useful when rank covariances must match
    their reflected counterparts bit-for-bit).
    """
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n).astype(float)
    offset = rng.uniform(0.1, 0.9, size=n) if jitter else 0.5
    return (perm + offset) / n


def mvnormal_panel(mean, cov, n: int, seed: int, assets=None) -> ReturnPanel:
    """n draws from N(mean, cov) via the Cholesky square root of cov."""
    mu = np.atleast_1d(np.asarray(mean, dtype=float))
    sigma = np.atleast_2d(np.asarray(cov, dtype=float))
    d = mu.size
    if sigma.shape != (d, d):
        raise ValueError("cov shape must match the mean vector")
    if not np.allclose(sigma, sigma.T, atol=1e-12):
        raise NotPositiveDefiniteError("covariance must be symmetric")
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("covariance is not positive definite") from None
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, d))
    values = mu + z @ chol.T
    names = list(assets) if assets is not None else [f"A{j + 1}" for j in range(d)]
    return ReturnPanel(_dates(n), names, values, meta={"seed": seed, "kind": "gaussian"})


def monotone_pair(q1, q2, n: int, seed: int, anti: bool = False, assets=("A", "B")) -> ReturnPanel:
    """Two-column panel driven by one uniform: comonotone or antimonotone.

    Column 1 is q1(u); column 2 is q2(u), or q2(1-u) when ``anti`` is set.
    q1 and q2 are quantile functions on (0, 1). The shared uniforms come
    from the exact stratified grid, so both columns are tie-free.
    """
    u = stratified_uniforms(n, seed, jitter=False)
    col1 = np.asarray(q1(u), dtype=float)
    col2 = np.asarray(q2(1.0 - u if anti else u), dtype=float)
    values = np.column_stack([col1, col2])
    return ReturnPanel(
        _dates(n), list(assets), values,
        meta={"seed": seed, "kind": "antimonotone" if anti else "comonotone"},
    )


def gpd_quantile(u, xi: float, beta: float):
    """Inverse CDF of the generalized Pareto: (beta/xi)((1-u)^-xi - 1)."""
    if beta <= 0:
        raise ValueError("scale must be positive")
    u = np.asarray(u, dtype=float)
    if xi == 0.0:
        return -beta * np.log1p(-u)
    return (beta / xi) * ((1.0 - u) ** (-xi) - 1.0)


def gpd_sample(xi: float, beta: float, n: int, seed: int) -> np.ndarray:
    """Inverse-transform sample of n generalized Pareto exceedances."""
    rng = np.random.default_rng(seed)
    return gpd_quantile(rng.random(n), xi, beta)


def five_point_panel() -> ReturnPanel:
    """Fixed 5x2 panel of equally likely outcomes with asymmetric tails.

    The two margins take values {-2,...,2} and {-1,1,3,5,7}; the pairing is
    comonotone on the two lowest outcomes only, so the tail Gini correlation
    matrix is symmetric at shallow prudence levels and asymmetric at deep
    ones. Handy as a fully hand-checkable dependence example.
    """
    values = np.array([[-2, -1], [-1, 1], [0, 7], [1, 3], [2, 5]], dtype=float)
    return ReturnPanel(_dates(5), ["A", "B"], values, meta={"kind": "five-point"})


def mixed_tail_market(n: int, seed: int) -> ReturnPanel:
    """Six-asset market: four correlated Gaussians plus two heavy-tailed.

    Asset means are distinct so long-only targets bracket; the last two
    columns are Student-t driven (df 2.5) with the market factor mixed in,
    mimicking infinite-ish-variance crypto-style return series. Percent
    units, daily-return scale.
    """
    rng = np.random.default_rng(seed)
    mu = np.array([0.055, 0.038, 0.013, 0.007, 0.202, 0.097])
    sd = np.array([1.26, 1.61, 0.38, 0.30, 4.15, 4.94])
    factor = rng.standard_normal(n)
    z = rng.standard_normal((n, 4))
    loadings = np.array([0.75, 0.70, 0.35, 0.20])
    gauss = loadings * factor[:, None] + np.sqrt(1.0 - loadings**2) * z
    t_shocks = rng.standard_t(2.5, size=(n, 2))
    heavy = 0.3 * factor[:, None] + 0.7 * t_shocks
    values = mu + sd * np.column_stack([gauss, heavy])
    names = ["LSTK", "SSTK", "CBND", "GBND", "MCRY", "ACRY"]
    return ReturnPanel(_dates(n), names, values, meta={"seed": seed, "kind": "market"})
