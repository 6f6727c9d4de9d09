"""Closed-form efficient frontier for quadratic-form risk models.

Any risk measure expressible as sqrt(w' V w) with a symmetric positive
definite V admits the classic two-constraint Lagrangian solution: with
A = 1'V^-1 mu, B = mu'V^-1 mu, C = 1'V^-1 1 and D = BC - A^2, the optimal
weights at target t are w = x + t*y for fixed vectors x, y, so the whole
frontier is spanned by two funds and risk^2(t) = (C t^2 - 2 A t + B) / D.

Three V constructions are supported. The tail-Gini model squares the
per-asset tail Ginis through their correlation matrix; since that matrix is
generally asymmetric, it is symmetrized by averaging and the size of the
discarded asymmetry is reported as ``symmetrization_gap`` (the closed form
is only meaningful when the gap is small).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DegenerateFrontierError,
    DegenerateMarginalError,
    IllConditionedError,
    NotPositiveDefiniteError,
)
from .estimators import tail_gini, tail_sd, tail_subset
from .panel import ReturnPanel, as_values
from .dependence import dependence_matrices

RISK_KINDS = ("tail-gini", "variance", "tail-variance")
GAP_WARN = 0.1
COND_LIMIT = 1e12


@dataclass
class RiskModel:
    """Mean vector and SPD risk matrix, with provenance of the estimator."""

    mu: np.ndarray
    matrix: np.ndarray
    provenance: str
    prudence: float | None
    symmetrization_gap: float
    assets: list[str]

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.matrix = np.asarray(self.matrix, dtype=float)
        d = self.mu.size
        if self.matrix.shape != (d, d):
            raise ValueError("matrix shape must match the mean vector")
        if not np.all(np.isfinite(self.mu)) or not np.all(np.isfinite(self.matrix)):
            raise ValueError("risk model contains non-finite entries")
        if np.max(np.abs(self.matrix - self.matrix.T)) > 1e-12 * max(
            1.0, float(np.max(np.abs(self.matrix)))
        ):
            raise NotPositiveDefiniteError("risk matrix is not symmetric")
        evals = np.linalg.eigvalsh(self.matrix)
        if evals[0] <= 1e-10 * max(evals[-1], 1e-300):
            raise NotPositiveDefiniteError(
                f"risk matrix is not positive definite: smallest eigenvalue {evals[0]:.6e}"
            )


@dataclass
class AnalyticFrontierPoint:
    """One closed-form frontier point with its Lagrangian diagnostics."""

    target: float
    weights: np.ndarray
    risk: float
    lam: float
    gam: float
    a: float
    b: float
    c: float
    d: float


def _tail_pearson(values: np.ndarray, p: float) -> np.ndarray:
    """Pearson correlations of each pair conditioned on the row asset's tail."""
    d = values.shape[1]
    out = np.ones((d, d))
    tails = [tail_subset(values[:, i], p)[0] for i in range(d)]
    for i in range(d):
        sub = values[tails[i], :]
        si = sub[:, i]
        si_c = si - si.mean()
        denom_i = float(np.sqrt(np.mean(si_c**2)))
        if denom_i == 0.0:
            raise DegenerateMarginalError("constant tail slice in tail-variance model")
        for j in range(d):
            if i == j:
                continue
            sj_c = sub[:, j] - sub[:, j].mean()
            denom_j = float(np.sqrt(np.mean(sj_c**2)))
            if denom_j == 0.0:
                raise DegenerateMarginalError("constant tail slice in tail-variance model")
            out[i, j] = float(np.mean(si_c * sj_c)) / (denom_i * denom_j)
    return out


def build_risk_model(panel, p: float | None = None, kind: str = "tail-gini",
                     ridge: bool = False) -> RiskModel:
    """Estimate (mu, V) from a panel for one of the supported risk kinds.

    tail-gini:     V = C Hsym C with C = diag(per-asset tail Gini) and Hsym
                   the symmetrized tail-Gini correlation matrix;
    variance:      V = sample covariance (ddof=1);
    tail-variance: V = D Rsym D with D = diag(per-asset tail SD) and Rsym a
                   symmetrized matrix of tail-conditional Pearson
                   correlations (each pair conditioned on the row asset's
                   tail, then averaged with its transpose).

    ``ridge`` adds 1e-8 * trace/d to the diagonal when V fails the positive
    definiteness check, and is off by default: repairs are never silent.
    """
    if kind not in RISK_KINDS:
        raise ValueError(f"kind must be one of {RISK_KINDS}, got {kind!r}")
    values = as_values(panel)
    assets = panel.assets if isinstance(panel, ReturnPanel) else [
        f"A{j + 1}" for j in range(values.shape[1])
    ]
    mu = values.mean(axis=0)
    d = values.shape[1]

    if kind == "variance":
        if values.shape[0] < 2:
            raise ValueError("variance model needs at least two rows")
        matrix = np.cov(values, rowvar=False, ddof=1).reshape(d, d)
        gap = 0.0
        p = None
    else:
        if p is None:
            raise ValueError(f"{kind} model requires a prudence level")
        if kind == "tail-gini":
            scale = np.array([tail_gini(values[:, j], p) for j in range(d)])
            raw = dependence_matrices(panel, p).tail_gini
        else:
            scale = np.array([tail_sd(values[:, j], p) for j in range(d)])
            raw = _tail_pearson(values, p)
        gap = float(np.max(np.abs(raw - raw.T)))
        if gap > GAP_WARN:
            warnings.warn(
                f"{kind} correlation matrix asymmetry {gap:.4f} exceeds {GAP_WARN}; "
                "the symmetrized closed form may be unreliable",
                RuntimeWarning,
                stacklevel=2,
            )
        sym = (raw + raw.T) / 2.0
        matrix = sym * np.outer(scale, scale)
        matrix = (matrix + matrix.T) / 2.0

    evals = np.linalg.eigvalsh(matrix)
    if evals[0] <= 1e-10 * max(evals[-1], 1e-300):
        if not ridge:
            raise NotPositiveDefiniteError(
                f"{kind} risk matrix is not positive definite: "
                f"smallest eigenvalue {evals[0]:.6e}"
            )
        matrix = matrix + (1e-8 * np.trace(matrix) / d) * np.eye(d)
    return RiskModel(mu, matrix, kind, p, gap, list(assets))


def _frontier_core(model: RiskModel):
    v = model.matrix
    evals = np.linalg.eigvalsh(v)
    cond = evals[-1] / evals[0]
    if cond > COND_LIMIT:
        raise IllConditionedError(f"risk matrix condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    factor = cho_factor(v)
    ones = np.ones(model.mu.size)
    vinv_one = cho_solve(factor, ones)
    vinv_mu = cho_solve(factor, model.mu)
    a = float(ones @ vinv_mu)
    b = float(model.mu @ vinv_mu)
    c = float(ones @ vinv_one)
    dsc = b * c - a * a
    if dsc <= 1e-12 * abs(b * c):
        raise DegenerateFrontierError(
            "degenerate frontier: mean vector is collinear with ones (D <= 0)"
        )
    x = (b * vinv_one - a * vinv_mu) / dsc
    y = (c * vinv_mu - a * vinv_one) / dsc
    return a, b, c, dsc, x, y


def _point(model: RiskModel, core, target: float) -> AnalyticFrontierPoint:
    a, b, c, dsc, x, y = core
    w = x + target * y
    lam = (c * target - a) / dsc
    gam = (b - a * target) / dsc
    risk2 = float(w @ model.matrix @ w)
    return AnalyticFrontierPoint(
        target=float(target),
        weights=w,
        risk=float(np.sqrt(max(risk2, 0.0))),
        lam=lam,
        gam=gam,
        a=a,
        b=b,
        c=c,
        d=dsc,
    )


def solve_analytic(model: RiskModel, target: float) -> AnalyticFrontierPoint:
    """Optimal weights at one target mean: w = x + target * y."""
    return _point(model, _frontier_core(model), target)


def analytic_frontier(model: RiskModel, targets) -> tuple[list[AnalyticFrontierPoint], float]:
    """Frontier points for each target plus the minimum-risk target A/C."""
    core = _frontier_core(model)
    a, _, c, *_ = core
    points = [_point(model, core, float(t)) for t in targets]
    return points, a / c
