import numpy as np
import pytest

from tailgini import (
    InfeasibleTargetError,
    SearchOptions,
    build_risk_model,
    direction_set,
    distortion_rate,
    feasible_start,
    minimize_risk,
    numeric_frontier,
    solve_analytic,
    tail_gini,
)
from tailgini.synth import monotone_pair, mvnormal_panel


class TestFeasibleStart:
    def test_minimum_norm_hand_case(self):
        w = feasible_start(np.array([0.0, 1.0]), 0.5)
        assert np.allclose(w, [0.5, 0.5], atol=1e-12)

    def test_long_only_vertex(self):
        w = feasible_start(np.array([1.0, 2.0, 3.0]), 3.0, long_only=True)
        assert np.allclose(w, [0, 0, 1])

    def test_long_only_bracket(self):
        w = feasible_start(np.array([1.0, 2.0, 4.0]), 3.0, long_only=True)
        assert np.allclose(w, [0, 0.5, 0.5])
        assert w.min() >= 0

    def test_degenerate_means(self):
        with pytest.raises(InfeasibleTargetError):
            feasible_start(np.array([1.0, 1.0]), 2.0)

    def test_long_only_out_of_range(self):
        with pytest.raises(InfeasibleTargetError):
            feasible_start(np.array([1.0, 2.0]), 5.0, long_only=True)

    def test_constraints_hold(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            d = int(rng.integers(2, 8))
            mu = rng.normal(size=d)
            if np.ptp(mu) < 1e-6:
                continue
            t = float(rng.normal())
            w = feasible_start(mu, t)
            assert abs(w.sum() - 1) < 1e-9
            assert abs(float(mu @ w) - t) < 1e-9


class TestDirectionSet:
    def test_hand_case(self):
        dirs = direction_set(np.array([1.0, 2.0, 4.0]), 0.001)
        assert dirs.shape == (6, 3)
        assert np.allclose(dirs[0], [0.001, -0.0015, 0.0005])
        assert np.allclose(dirs[1], -dirs[0])

    def test_null_space_contract(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            d = int(rng.integers(3, 9))
            mu = rng.normal(scale=2.0, size=d)
            dirs = direction_set(mu, 0.001)
            for dw in dirs:
                assert abs(dw.sum()) <= 1e-11
                assert abs(float(mu @ dw)) <= 1e-11

    def test_two_assets_empty(self):
        assert direction_set(np.array([0.0, 1.0]), 0.001).shape == (0, 2)

    def test_partner_fallback(self):
        # partner 2 of coordinate 1 ties the average of the rest; the builder
        # must fall through to another admissible partner, never emit NaN
        mu = np.array([1.0, 3.0, 2.0, 4.0])  # for i=0: avg(rest)=3 = mu[1]
        dirs = direction_set(mu, 0.001)
        assert np.all(np.isfinite(dirs))
        for dw in dirs:
            assert abs(float(mu @ dw)) <= 1e-11


class TestMinimizeRisk:
    def test_two_assets_exact_immediately(self):
        rng = np.random.default_rng(3)
        values = rng.normal([0.0, 1.0], [1.0, 1.0], size=(400, 2))
        values -= values.mean(axis=0) - [0.0, 1.0]  # pin sample means
        res = minimize_risk(values, 0.5, SearchOptions(objective="variance"))
        assert res.iterations == 0 and res.converged
        assert np.allclose(res.weights, [0.5, 0.5], atol=1e-9)

    def test_variance_matches_analytic(self):
        panel = mvnormal_panel([0.1, 0.2, 0.3], np.eye(3) * 0.5 + 0.5, 5000, 4)
        target = float(panel.values.mean(axis=0).mean())
        res = minimize_risk(panel, target, SearchOptions(objective="variance"))
        model = build_risk_model(panel, kind="variance")
        pt = solve_analytic(model, target)
        assert np.max(np.abs(res.weights - pt.weights)) < 1e-3
        assert res.risk == pytest.approx(pt.risk**2, rel=1e-3)

    def test_comonotone_tail_gini_value(self):
        panel = monotone_pair(lambda u: u, lambda u: 2 * u, 2000, 5)
        means = panel.values.mean(axis=0)
        target = float(means.mean())
        res = minimize_risk(panel, target, SearchOptions(objective="tail-gini", prudence=0.1))
        assert res.converged
        assert res.risk == pytest.approx(tail_gini(panel.values @ res.weights, 0.1), rel=1e-12)

    def test_feasibility_all_iterates(self):
        panel = mvnormal_panel([0.0, 0.3, 0.6, 0.2], np.eye(4), 1500, 6)
        means = panel.values.mean(axis=0)
        opts = SearchOptions(objective="variance", record_path=True)
        res = minimize_risk(panel, 0.25, opts)
        assert res.path is not None and len(res.path) >= 1
        values = [v for _, v in res.path]
        assert all(b <= a for a, b in zip(values, values[1:]))  # monotone descent
        for w, _ in res.path:
            assert abs(w.sum() - 1) < 1e-8
            assert abs(float(means @ w) - 0.25) < 1e-8

    def test_deterministic_runs_identical(self):
        panel = mvnormal_panel([0.0, 0.3, 0.6], np.eye(3), 1200, 7)
        opts = SearchOptions(objective="variance", record_path=True)
        r1 = minimize_risk(panel, 0.2, opts)
        r2 = minimize_risk(panel, 0.2, opts)
        assert np.array_equal(r1.weights, r2.weights)
        assert r1.risk == r2.risk and r1.iterations == r2.iterations
        assert all(np.array_equal(w1, w2) for (w1, _), (w2, _) in zip(r1.path, r2.path))

    def test_long_only_nonnegative(self):
        panel = mvnormal_panel([0.1, 0.2, 0.4, 0.3], np.eye(4) * 0.4 + 0.6, 2500, 8)
        opts = SearchOptions(objective="variance", long_only=True)
        res = minimize_risk(panel, 0.25, opts)
        assert res.weights.min() >= -1e-12
        assert abs(res.weights.sum() - 1) < 1e-8

    def test_long_only_never_worse_than_short(self):
        panel = mvnormal_panel([0.1, 0.2, 0.4], np.eye(3) * 0.5 + 0.5, 3000, 9)
        target = 0.25
        short = minimize_risk(panel, target, SearchOptions(objective="variance"))
        longo = minimize_risk(panel, target, SearchOptions(objective="variance", long_only=True))
        assert short.risk <= longo.risk + 1e-12

    def test_fixed_step_mode_converges(self):
        panel = mvnormal_panel([0.0, 0.3, 0.6], np.eye(3), 1500, 10)
        opts = SearchOptions(objective="variance", fixed_step=True)
        res = minimize_risk(panel, 0.3, opts)
        assert res.converged
        assert res.final_delta == opts.delta  # never shrinks in this mode


class TestNumericFrontier:
    def test_single_target_matches_minimize(self):
        panel = mvnormal_panel([0.0, 0.3, 0.6], np.eye(3), 1500, 11)
        opts = SearchOptions(objective="variance")
        pts = numeric_frontier(panel, [0.2], opts)
        solo = minimize_risk(panel, 0.2, opts)
        assert len(pts) == 1
        assert pts[0].risk == solo.risk
        assert np.array_equal(pts[0].weights, solo.weights)

    def test_risk_convex_across_targets(self):
        panel = mvnormal_panel([0.0, 0.25, 0.5], np.eye(3) * 0.5 + 0.5, 4000, 12)
        mu = panel.values.mean(axis=0)
        mvp = float(mu.mean())
        spread = float(mu.std())
        targets = np.linspace(mvp - 2 * spread, mvp + 2 * spread, 7)
        pts = numeric_frontier(panel, targets, SearchOptions(objective="variance"))
        risks = [p.risk for p in pts]
        for lo, mid, hi in zip(risks, risks[1:], risks[2:]):
            assert mid <= (lo + hi) / 2 + 1e-6

    def test_infeasible_target_isolated(self):
        panel = mvnormal_panel([0.1, 0.2, 0.3], np.eye(3), 1500, 13)
        opts = SearchOptions(objective="variance", long_only=True)
        pts = numeric_frontier(panel, [0.15, 5.0, 0.25], opts)
        assert pts[0].error is None and pts[2].error is None
        assert pts[1].error is not None and "range" in pts[1].error
        assert np.isnan(pts[1].weights).all()


class TestDistortionRate:
    def test_identical_weights_zero(self):
        w = np.array([0.4, 0.6])
        assert np.allclose(distortion_rate(w, w), 0.0)

    def test_printed_pair(self):
        rate = distortion_rate([-1.83], [-20.98])[0]
        assert round(rate, 2) == -1046.45

    def test_zero_reference_undefined(self):
        out = distortion_rate([0.0, 1.0], [0.5, 2.0])
        assert np.isnan(out[0]) and out[1] == pytest.approx(100.0)
