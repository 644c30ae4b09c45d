import math

import numpy as np
import pytest

from perflaw.errors import ValidationError
from perflaw.laws import (
    LOSS_FULL_NAMES,
    LOSS_SIMPLIFIED_NAMES,
    PERF_PARAM_NAMES,
    LossLawParams,
    MetricKind,
    PerfLawParams,
    eval_loss_law,
    eval_perf_law,
    grad_loss_law,
    grad_perf_law,
    loss_to_performance,
)

CHINCHILLA = LossLawParams.simplified(E=1.61, A=406.4, B=410.7, alpha=0.34, beta=0.28)


class TestMetricKind:
    def test_cutoff_required_for_ranking_metrics(self):
        with pytest.raises(ValidationError):
            MetricKind("hr")
        with pytest.raises(ValidationError):
            MetricKind("ndcg")
        assert str(MetricKind("hr", 10)) == "hr@10"
        assert str(MetricKind("loss")) == "loss"
        assert str(MetricKind("mrr")) == "mrr"

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            MetricKind("auc")


class TestLossLawParams:
    def test_simplified_requires_positive_exponents(self):
        with pytest.raises(ValidationError):
            LossLawParams.simplified(1.0, 1.0, 1.0, -0.1, 0.3)
        with pytest.raises(ValidationError):
            LossLawParams.simplified(1.0, 1.0, 1.0, 0.3, 0.0)

    def test_full_requires_positive_scales(self):
        with pytest.raises(ValidationError):
            LossLawParams.full(-1.0, 2.0, 0.5, 0.5)
        with pytest.raises(ValidationError):
            LossLawParams.full(1.0, 2.0, 0.5, -0.5)

    def test_serialization_names(self):
        assert tuple(CHINCHILLA.to_dict()) == LOSS_SIMPLIFIED_NAMES
        full = LossLawParams.full(5.0, 7.0, 0.5, 0.8)
        assert tuple(full.to_dict()) == LOSS_FULL_NAMES

    def test_dict_round_trip_and_inference(self):
        assert LossLawParams.from_dict(CHINCHILLA.to_dict()) == CHINCHILLA
        full = LossLawParams.full(5.0, 7.0, 0.5, 0.8)
        assert LossLawParams.from_dict(full.to_dict()) == full
        with pytest.raises(ValidationError):
            LossLawParams.from_dict({"E": 1.0})

    def test_vector_round_trip(self):
        assert LossLawParams.from_vector("simplified", CHINCHILLA.to_vector()) == CHINCHILLA


class TestEvalLossLaw:
    def test_constant_when_amplitudes_zero(self):
        p = LossLawParams.simplified(2.5, 0.0, 0.0, 1.0, 1.0)
        for n, d in [(1, 1), (10, 1e6), (1e9, 1e12)]:
            assert eval_loss_law(p, n, d) == 2.5

    def test_chinchilla_constants_at_1e9(self):
        assert eval_loss_law(CHINCHILLA, 1e9, 1e9) == pytest.approx(
            3.2042537745272583, rel=1e-12
        )

    def test_full_form_reduces_to_ratio(self):
        p = LossLawParams.full(Nc=5.0, Dc=1e-12, alphaN=1.0, alphaD=1.0)
        for n in (1.0, 2.0, 10.0):
            assert eval_loss_law(p, n, 1.0) == pytest.approx(5.0 / n, rel=1e-10)

    def test_positive_argument_required(self):
        with pytest.raises(ValidationError):
            eval_loss_law(CHINCHILLA, 0.0, 1e6)
        with pytest.raises(ValidationError):
            eval_loss_law(CHINCHILLA, 10.0, -1.0)

    def test_array_broadcast(self):
        out = eval_loss_law(CHINCHILLA, np.array([1.0, 2.0, 4.0]), 1e8)
        assert out.shape == (3,)
        assert out[0] == pytest.approx(eval_loss_law(CHINCHILLA, 1.0, 1e8))

    def test_strictly_decreasing_in_both_axes(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            p = LossLawParams.simplified(
                rng.uniform(0, 3),
                rng.uniform(0.1, 100),
                rng.uniform(0.1, 100),
                rng.uniform(0.05, 2),
                rng.uniform(0.05, 2),
            )
            n = np.array([1.0, 2.0, 8.0, 64.0])
            assert np.all(np.diff(eval_loss_law(p, n, 1e5)) < 0)
            d = np.array([1e3, 1e4, 1e6, 1e9])
            assert np.all(np.diff(eval_loss_law(p, 4.0, d)) < 0)


class TestEvalPerfLaw:
    def test_intercept_only(self):
        p = PerfLawParams(C=0.3)
        assert eval_perf_law(p, 5.0, 64.0, 1e6) == pytest.approx(0.3, abs=1e-15)

    def test_pure_log_term(self):
        p = PerfLawParams(w1=1.0)
        assert eval_perf_law(p, 1.0, 8.0, 1e6) == 0.0
        assert eval_perf_law(p, math.e, 8.0, 1e6) == pytest.approx(1.0, rel=1e-12)

    def test_reported_constants_evaluate_far_outside_unit_interval(self):
        p = PerfLawParams(
            w1=0.50, p1=34.0, w3=0.0001,
            w2=-19.01, p2=3.0, w4=0.0365,
            w6=1.0, p3=2.5, w5=12.74, C=628.12,
        )
        value = eval_perf_law(p, 64.0, 370.0, 6074772.573)
        assert value == pytest.approx(504.4380302830725, rel=1e-9)
        assert not 0.0 <= value <= 1.0

    def test_positive_arguments_required(self):
        p = PerfLawParams(C=1.0)
        for bad in [(0, 1, 1), (1, -2, 1), (1, 1, 0)]:
            with pytest.raises(ValidationError):
                eval_perf_law(p, *bad)

    def test_canonical_form_mapping(self):
        # w6=1, C=0, p1=p2 reproduces the canonical three-group shape exactly
        rng = np.random.default_rng(1)
        for _ in range(50):
            w1, w2, w3, w4, w5 = rng.uniform(-2, 2, size=5)
            p_shared, p_data = rng.uniform(0.1, 20, size=2)
            n, d, dp = rng.uniform(1, 64), rng.uniform(2, 512), rng.uniform(1e3, 1e9)
            general = PerfLawParams(
                w1=w1, w2=w2, w3=w3, w4=w4, w5=w5,
                w6=1.0, p1=p_shared, p2=p_shared, p3=p_data, C=0.0,
            )
            canonical = (
                w1 * (math.log(n) + p_shared / n**w3)
                + w2 * (math.log(d) + p_shared / d**w4)
                + math.log(dp)
                + p_data / dp**w5
            )
            assert eval_perf_law(general, n, d, dp) == pytest.approx(
                canonical, rel=1e-12, abs=1e-12
            )

    def test_group_exchange_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            w1, w2, w3, w4 = rng.uniform(-2, 2, size=4)
            p1, p2 = rng.uniform(0.1, 10, size=2)
            n, d = rng.uniform(1, 100), rng.uniform(1, 600)
            a = PerfLawParams(w1=w1, w2=w2, w3=w3, w4=w4, p1=p1, p2=p2, w6=0.5, p3=1.0, w5=0.3, C=0.2)
            b = PerfLawParams(w1=w2, w2=w1, w3=w4, w4=w3, p1=p2, p2=p1, w6=0.5, p3=1.0, w5=0.3, C=0.2)
            assert eval_perf_law(a, n, d, 1e6) == pytest.approx(
                eval_perf_law(b, d, n, 1e6), rel=1e-12
            )

    def test_extreme_exponent_no_premature_overflow(self):
        # amplitude/width combinations representable only in log space
        p = PerfLawParams(w6=1.0, p3=1e-3, w5=-20.0, C=0.0)
        value = eval_perf_law(p, 1.0, 1.0, 1e6)
        assert value == pytest.approx(math.log(1e6) + 1e-3 * 1e120, rel=1e-10)

    def test_serialization_order(self):
        p = PerfLawParams(w1=1.0)
        assert tuple(p.to_dict()) == PERF_PARAM_NAMES
        assert PerfLawParams.from_dict(p.to_dict()) == p

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            PerfLawParams(w1=float("nan"))


class TestGradPerfLaw:
    def test_intercept_partial_is_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            p = PerfLawParams.from_vector(rng.uniform(-1, 1, size=10))
            g = grad_perf_law(p, 2.0, 16.0, 1e5)
            assert g[PERF_PARAM_NAMES.index("C")] == 1.0

    def test_w3_partial_vanishes_at_n_equal_one(self):
        p = PerfLawParams(w1=2.0, p1=5.0, w3=0.4)
        g = grad_perf_law(p, 1.0, 16.0, 1e5)
        assert g[PERF_PARAM_NAMES.index("w3")] == 0.0

    def test_matches_finite_differences(self):
        # central differences with h=1e-6, evaluated in 40-digit arithmetic:
        # double-precision differencing would be roundoff-limited well above
        # the 1e-5 target for components much smaller than the function value
        from oracles import perf_grad_fd_mp

        rng = np.random.default_rng(4)
        for _ in range(200):
            vec = np.concatenate(
                [
                    rng.uniform(-3, 3, size=2),   # w1 w2
                    rng.uniform(-2, 2, size=3),   # w3 w4 w5
                    rng.uniform(-3, 3, size=1),   # w6
                    rng.uniform(0.1, 10, size=3),  # p1 p2 p3
                    rng.uniform(-5, 5, size=1),   # C
                ]
            )
            n, d, dp = rng.uniform(1, 64), rng.uniform(2, 512), rng.uniform(1e3, 1e8)
            g = grad_perf_law(PerfLawParams.from_vector(vec), n, d, dp)
            fd = perf_grad_fd_mp(vec, n, d, dp, h="1e-6")
            rel = np.abs(g - fd) / np.maximum.reduce(
                [np.abs(fd), np.abs(g), np.full(10, 1e-30)]
            )
            assert np.max(rel) < 1e-5

    def test_shape_for_array_inputs(self):
        p = PerfLawParams(w1=1.0, w6=1.0)
        g = grad_perf_law(p, np.array([1.0, 2.0, 3.0]), 8.0, 1e5)
        assert g.shape == (10, 3)


class TestGradLossLaw:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        h = 1e-6
        for _ in range(50):
            vec = np.array(
                [
                    rng.uniform(0, 3),
                    rng.uniform(0.5, 50),
                    rng.uniform(0.5, 50),
                    rng.uniform(0.1, 1.5),
                    rng.uniform(0.1, 1.5),
                ]
            )
            n, d = rng.uniform(1, 64), rng.uniform(1e3, 1e8)
            params = LossLawParams.from_vector("simplified", vec)
            g = grad_loss_law(params, n, d)
            for i in range(5):
                vp, vm = vec.copy(), vec.copy()
                vp[i] += h
                vm[i] -= h
                fd = (
                    eval_loss_law(LossLawParams.from_vector("simplified", vp), n, d)
                    - eval_loss_law(LossLawParams.from_vector("simplified", vm), n, d)
                ) / (2 * h)
                assert abs(g[i] - fd) / max(abs(fd), abs(g[i]), 1e-3) < 1e-5

    def test_full_form_has_no_analytic_gradient(self):
        with pytest.raises(ValidationError):
            grad_loss_law(LossLawParams.full(1.0, 1.0, 0.5, 0.5), 2.0, 1e5)


class TestLossToPerformance:
    def test_zero_slope(self):
        assert loss_to_performance(0.0, 123.0) == 1.0

    def test_unit_slope(self):
        assert loss_to_performance(1.0, 0.5) == 0.5

    def test_arithmetic(self):
        assert loss_to_performance(0.2, 3.204) == pytest.approx(0.3592, abs=1e-12)
