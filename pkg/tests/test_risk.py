import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yieldpca.curve_store import YieldCurve
from yieldpca.pca import fit_pca
from yieldpca.pricing import CashFlowStream, present_value, shift_curve
from yieldpca.risk import (
    DurationReport,
    RiskError,
    VarConfig,
    duration_report,
    effective_duration,
    factor_direction_duration,
    factor_sigmas,
    fisher_weil_duration,
    implied_flat_yield,
    key_rate_duration,
    krd_vector,
    macaulay_duration,
    pc_duration,
    pc_var,
    z_score,
)

TENORS = (1.0, 2.0, 3.0, 5.0, 7.0, 10.0)
CURVE = YieldCurve(TENORS, [0.012, 0.016, 0.02, 0.024, 0.026, 0.028])


def _random_knot_stream(rng, tenors=TENORS):
    n = int(rng.integers(1, len(tenors) + 1))
    times = np.sort(rng.choice(tenors, size=n, replace=False))
    return CashFlowStream(times, rng.uniform(1, 200, n))


class TestKeyRateDuration:
    def test_closed_form_at_knot(self):
        zc = CashFlowStream.single(5.0, 1000.0)
        got = key_rate_duration(zc, CURVE, TENORS.index(5.0))
        oracle = (math.exp(0.01 * 5) - math.exp(-0.01 * 5)) / 0.02
        assert got == pytest.approx(oracle, abs=1e-9)
        assert got == pytest.approx(math.sinh(0.05) / 0.01, abs=1e-9)
        assert got == pytest.approx(5.00208, abs=1e-5)

    def test_other_keys_are_zero(self):
        zc = CashFlowStream.single(5.0, 1000.0)
        for j in range(len(TENORS)):
            if TENORS[j] != 5.0:
                assert key_rate_duration(zc, CURVE, j) == 0.0

    def test_paper_compat_is_minus_one(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            s = _random_knot_stream(rng)
            for j in range(len(TENORS)):
                assert key_rate_duration(s, CURVE, j, "paper_compat") == -1.0

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            key_rate_duration(CashFlowStream.single(1.0, 1.0), CURVE, len(TENORS))

    def test_zero_pv(self):
        flat0 = YieldCurve.flat(0.0, TENORS)
        with pytest.raises(RiskError):
            key_rate_duration(CashFlowStream([1.0, 2.0], [5.0, -5.0]), flat0, 0)

    def test_off_knot_flow_splits_between_neighbours(self):
        krd = krd_vector(CashFlowStream.single(4.0, 100.0), CURVE)
        assert krd[TENORS.index(3.0)] > 0 and krd[TENORS.index(5.0)] > 0
        assert np.count_nonzero(krd) == 2


class TestKrdVector:
    def test_paper_compat_13(self):
        tenors = tuple(float(t) for t in range(1, 14))
        c = YieldCurve.flat(0.03, tenors)
        np.testing.assert_array_equal(krd_vector(CashFlowStream.single(6.5, 1000.0), c, "paper_compat"), -np.ones(13))

    def test_knot_support(self):
        krd = krd_vector(CashFlowStream.single(7.0, 1.0), CURVE)
        j = TENORS.index(7.0)
        assert krd[j] == pytest.approx(math.sinh(0.07) / 0.01, abs=1e-9)
        assert np.count_nonzero(krd) == 1

    def test_sum_equals_parallel_duration(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            s = _random_knot_stream(rng)
            # oracle: two full-curve repricings
            p0 = present_value(s, CURVE)
            pm = present_value(s, shift_curve(CURVE, np.ones(6), -0.01))
            pp = present_value(s, shift_curve(CURVE, np.ones(6), 0.01))
            eff = (pm - pp) / (2 * 0.01 * p0)
            assert abs(krd_vector(s, CURVE).sum() - eff) <= 1e-12
            assert effective_duration(s, CURVE) == pytest.approx(eff, abs=1e-14)


class TestPcDuration:
    def test_identity_loadings(self):
        np.testing.assert_array_equal(pc_duration([1.5, -2.0, 0.25], np.eye(3), 3), [1.5, -2.0, 0.25])

    def test_uniform_column(self):
        u = np.full((13, 1), 1 / math.sqrt(13))
        got = pc_duration(-np.ones(13), u, 1)
        assert got[0] == pytest.approx(-math.sqrt(13), abs=1e-12)
        assert got[0] == pytest.approx(-3.60555, abs=1e-5)

    def test_zero(self, knot_series):
        model = fit_pca(knot_series)
        np.testing.assert_array_equal(pc_duration(np.zeros(7), model, 3), np.zeros(3))

    def test_length_mismatch(self, knot_series):
        with pytest.raises(RiskError):
            pc_duration(np.ones(3), fit_pca(knot_series), 3)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 2**31 - 1))
    def test_linear(self, alpha, beta, seed):
        rng = np.random.default_rng(seed)
        u, _ = np.linalg.qr(rng.normal(size=(7, 7)))
        k1, k2 = rng.normal(size=7), rng.normal(size=7)
        lhs = pc_duration(alpha * k1 + beta * k2, u, 3)
        rhs = alpha * pc_duration(k1, u, 3) + beta * pc_duration(k2, u, 3)
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * (1 + abs(alpha) + abs(beta)) * 10)

    def test_paper_compat_identity(self, knot_series, flat3):
        model = fit_pca(knot_series, "levels", 3)
        krd = krd_vector(CashFlowStream.single(4.0, 1000.0), flat3, "paper_compat")
        got = pc_duration(krd, model, 3)
        np.testing.assert_allclose(got, -model.loadings[:, :3].sum(axis=0), rtol=0, atol=1e-12)


class TestVar:
    PCD = (-0.7344, -1.1991, -0.0624)

    def test_reported_95(self):
        cfg = VarConfig.paper_compat(1000.0, 0.95)
        assert cfg.z == 1.645
        assert pc_var(self.PCD, cfg, [0.1] * 3) == pytest.approx(231.5430, abs=0.05)

    def test_reported_99(self):
        cfg = VarConfig.paper_compat(1000.0, 0.99)
        assert cfg.z == 2.326
        assert pc_var(self.PCD, cfg, [0.1] * 3) == pytest.approx(327.3976, abs=0.05)

    def test_zero_pcd(self):
        assert pc_var([0.0, 0.0, 0.0], VarConfig(1000.0, 0.99), [0.1, 0.2, 0.3]) == 0.0

    def test_negative_sigma(self):
        with pytest.raises(RiskError):
            pc_var([1.0], VarConfig(1.0), [-0.1])

    def test_length_mismatch(self):
        with pytest.raises(RiskError):
            pc_var([1.0, 2.0], VarConfig(1.0), [0.1])

    def test_z_values(self):
        assert z_score(0.95) == pytest.approx(1.6449, abs=1e-4)
        assert z_score(0.99) == pytest.approx(2.3263, abs=1e-4)
        for bad in (0.5, 1.0, 1.5, 0.2):
            with pytest.raises(RiskError):
                z_score(bad)

    def test_homogeneous_in_value(self):
        a = pc_var(self.PCD, VarConfig(1000.0, 0.95), [0.1] * 3)
        b = pc_var(self.PCD, VarConfig(3500.0, 0.95), [0.1] * 3)
        assert b == pytest.approx(3.5 * a, rel=1e-14)

    def test_increasing_in_confidence(self):
        vals = [pc_var(self.PCD, VarConfig(1000.0, c), [0.1] * 3) for c in (0.9, 0.95, 0.99, 0.999)]
        assert all(x < y for x, y in zip(vals, vals[1:]))

    def test_model_sigmas(self, knot_series):
        model = fit_pca(knot_series)
        sig = factor_sigmas(VarConfig(1.0), 3, model)
        np.testing.assert_array_equal(sig, np.sqrt(model.eigenvalues[:3]))
        with pytest.raises(RiskError):
            factor_sigmas(VarConfig(1.0), 3, None)
        np.testing.assert_array_equal(factor_sigmas(VarConfig(1.0, sigma_policy="uniform", uniform_sigma=0.2), 2), [0.2, 0.2])

    def test_config_validation(self):
        with pytest.raises(RiskError):
            VarConfig(0.0)
        with pytest.raises(RiskError):
            VarConfig(1.0, sigma_policy="garch")


class TestDurations:
    def test_single_flow(self):
        s = CashFlowStream.single(7.0, 123.0)
        assert macaulay_duration(s, 0.04) == 7.0
        assert fisher_weil_duration(s, CURVE) == 7.0

    def test_macaulay_two_flows(self):
        s = CashFlowStream([1.0, 2.0], [10.0, 110.0])
        w1, w2 = 10 * math.exp(-0.1), 110 * math.exp(-0.2)
        oracle = (1 * w1 + 2 * w2) / (w1 + w2)
        assert macaulay_duration(s, 0.10) == pytest.approx(oracle, abs=1e-12)
        assert macaulay_duration(s, 0.10) == pytest.approx(1.9087, abs=1e-4)

    def test_macaulay_zero_yield(self):
        s = CashFlowStream([1.0, 3.0, 4.0], [1.0, 2.0, 5.0])
        assert macaulay_duration(s, 0.0) == pytest.approx((1 + 6 + 20) / 8, abs=1e-15)

    def test_macaulay_nonpositive_pv(self):
        with pytest.raises(RiskError):
            macaulay_duration(CashFlowStream([1.0, 2.0], [1.0, -1.0]), 0.0)

    def test_fisher_weil_zero_curve(self):
        s = CashFlowStream([1.0, 2.0], [100.0, 100.0])
        assert fisher_weil_duration(s, YieldCurve.flat(0.0, TENORS)) == pytest.approx((100 + 200) / 200, abs=1e-15)

    def test_fisher_weil_equals_macaulay_on_flat(self):
        rng = np.random.default_rng(2)
        for y in (-0.004, 0.0, 0.031, 0.09):
            times = np.sort(rng.uniform(0.1, 25, 8))
            s = CashFlowStream(times, rng.uniform(1, 50, 8))
            assert fisher_weil_duration(s, YieldCurve.flat(y, TENORS)) == pytest.approx(
                macaulay_duration(s, y), abs=1e-12)

    def test_fisher_weil_bounds_and_scaling(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            times = np.sort(rng.uniform(0.1, 30, 5))
            s = CashFlowStream(times, rng.uniform(0.1, 100, 5))
            d = fisher_weil_duration(s, CURVE)
            assert times[0] <= d <= times[-1]
            assert fisher_weil_duration(s.scaled(7.3), CURVE) == pytest.approx(d, rel=1e-12)

    def test_fisher_weil_nonpositive(self):
        with pytest.raises(RiskError):
            fisher_weil_duration(CashFlowStream([1.0], [-3.0]), CURVE)


class TestFactorDirectionDuration:
    def test_uniform_loading_reduces_to_fisher_weil(self):
        s = CashFlowStream([0.5, 1.0, 2.0, 4.5, 7.0, 12.0], [3.0, 3.0, 3.0, 3.0, 3.0, 103.0])
        u = np.full(len(TENORS), 1 / math.sqrt(len(s)))
        assert factor_direction_duration(s, CURVE, u) == pytest.approx(fisher_weil_duration(s, CURVE), abs=1e-12)

    def test_zero_loading(self):
        s = CashFlowStream([1.0, 2.0], [1.0, 1.0])
        assert factor_direction_duration(s, CURVE, np.zeros(len(TENORS))) == 0.0

    def test_two_flows_hand_value(self):
        s = CashFlowStream([1.0, 2.0], [100.0, 100.0])
        c = YieldCurve.flat(0.0, (1.0, 2.0))
        got = factor_direction_duration(s, c, [1.0, 0.0])
        assert got == pytest.approx(math.sqrt(2) * (100 * 1 * 1) / 200, abs=1e-9)
        assert got == pytest.approx(0.70711, abs=1e-5)

    def test_loading_interpolated_between_tenors(self):
        c = YieldCurve.flat(0.0, (1.0, 3.0))
        s = CashFlowStream.single(2.0, 1.0)
        assert factor_direction_duration(s, c, [1.0, 0.0]) == pytest.approx(2.0 * 0.5, abs=1e-15)

    def test_flow_count_override(self):
        s = CashFlowStream([1.0, 2.0], [100.0, 100.0])
        c = YieldCurve.flat(0.0, (1.0, 2.0))
        assert factor_direction_duration(s, c, [1.0, 0.0], flow_count=1) == pytest.approx(0.5, abs=1e-15)

    def test_bad_loading_length(self):
        with pytest.raises(RiskError):
            factor_direction_duration(CashFlowStream.single(1.0, 1.0), CURVE, [1.0])


class TestReport:
    def test_implied_flat_yield(self):
        s = CashFlowStream([1.0, 2.0, 3.0], [5.0, 5.0, 105.0])
        y = implied_flat_yield(s, CURVE)
        assert present_value(s, YieldCurve.flat(y, TENORS)) == pytest.approx(present_value(s, CURVE), rel=1e-13)

    def test_report_composition(self, knot_series):
        model = fit_pca(knot_series)
        c = YieldCurve(knot_series.tenors, knot_series.rates[-1])
        s = CashFlowStream([1.0, 2.0, 3.0, 4.0, 5.0], [4.0, 4.0, 4.0, 4.0, 104.0])
        rep = duration_report(s, c, model, 3, flat_yield=0.03)
        assert isinstance(rep, DurationReport)
        assert rep.macaulay == macaulay_duration(s, 0.03)
        assert rep.fisher_weil == fisher_weil_duration(s, c)
        for v in range(3):
            assert rep.factor_durations[v] == factor_direction_duration(s, c, model.loadings[:, v])
        assert set(rep.to_dict()) >= {"macaulay", "fisher_weil", "factor_durations"}
