import numpy as np
import pytest

from oracles import grid_argmax
from perflaw.errors import InfeasibleBudgetError, ValidationError
from perflaw.laws import PerfLawParams, eval_perf_law
from perflaw.optimize import (
    OptResult,
    PotentialEntry,
    SearchSpace,
    constrained_optimum,
    global_optimum,
    scaling_potential,
)

DP = 1e6


def random_params(rng):
    return PerfLawParams(
        w1=rng.uniform(-1, 1),
        w2=rng.uniform(-1, 1),
        w3=rng.uniform(-1, 1),
        w4=rng.uniform(-1, 1),
        p1=rng.uniform(0.1, 50),
        p2=rng.uniform(0.1, 50),
        w6=0.0,
        C=rng.uniform(-1, 1),
    )


class TestSearchSpace:
    def test_range_validation(self):
        with pytest.raises(ValidationError):
            SearchSpace((0, 5), (1, 5))
        with pytest.raises(ValidationError):
            SearchSpace((1, 5), (6, 5))

    def test_budget_validation(self):
        with pytest.raises(ValidationError):
            SearchSpace((1, 5), (1, 5), budget=("n_plus_d", 10.0))
        with pytest.raises(ValidationError):
            SearchSpace((1, 5), (1, 5), budget=("n_times_d", 0.0))

    def test_grid_size(self):
        assert SearchSpace((1, 3), (2, 5)).grid_size() == 12


class TestGlobalOptimum:
    def test_constant_surface_tie_break(self):
        result = global_optimum(PerfLawParams(C=0.7), DP, SearchSpace((3, 9), (5, 11)))
        assert (result.argmax_n, result.argmax_d) == (3, 5)
        assert result.predicted == pytest.approx(0.7)
        assert result.evaluated_points == 7 * 7

    def test_interior_maximum_analytic_fixture(self):
        # -ln d - 100/d is stationary at d = 100
        params = PerfLawParams(w2=-1.0, p2=100.0, w4=1.0)
        result = global_optimum(params, DP, SearchSpace((1, 4), (1, 1000)))
        assert result.argmax_d == 100
        assert result.argmax_n == 1  # constant in n: tie breaks low

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            params = random_params(rng)
            space = SearchSpace((1, 25), (1, 50))
            result = global_optimum(params, DP, space)
            n, d, v = grid_argmax(
                lambda n, d: eval_perf_law(params, n, d, DP), 1, 25, 1, 50
            )
            assert (result.argmax_n, result.argmax_d) == (n, d)
            assert result.predicted == pytest.approx(v, abs=1e-12)

    def test_coarse_to_fine_equals_exhaustive(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            params = random_params(rng)
            space = SearchSpace((1, 60), (1, 800))
            full = global_optimum(params, DP, space, refine=False)
            fast = global_optimum(params, DP, space, refine=True)
            assert (full.argmax_n, full.argmax_d) == (fast.argmax_n, fast.argmax_d)
            assert fast.evaluated_points < full.evaluated_points

    def test_auto_refine_threshold(self):
        params = PerfLawParams(w1=0.1, w2=0.1, C=0.0)
        small = global_optimum(params, DP, SearchSpace((1, 10), (1, 10)))
        assert small.evaluated_points == 100  # exhaustive below the threshold

    def test_budgeted_space_rejected(self):
        with pytest.raises(ValidationError):
            global_optimum(
                PerfLawParams(C=1.0), DP,
                SearchSpace((1, 5), (1, 5), budget=("n_times_d", 10.0)),
            )

    def test_invalid_d_prime(self):
        with pytest.raises(ValidationError):
            global_optimum(PerfLawParams(C=1.0), 0.0, SearchSpace((1, 5), (1, 5)))

    def test_monotone_restriction(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            params = random_params(rng)
            big = global_optimum(params, DP, SearchSpace((1, 30), (1, 60)))
            small = global_optimum(params, DP, SearchSpace((1, 15), (1, 30)))
            assert small.predicted <= big.predicted + 1e-15

    def test_predicted_equals_eval_at_argmax(self):
        rng = np.random.default_rng(3)
        params = random_params(rng)
        r = global_optimum(params, DP, SearchSpace((1, 20), (1, 40)))
        assert r.predicted == eval_perf_law(params, r.argmax_n, r.argmax_d, DP)


class TestConstrainedOptimum:
    def test_tight_budget(self):
        space = SearchSpace((1, 10), (1, 10), budget=("n_times_d", 1.0))
        result = constrained_optimum(PerfLawParams(w1=1.0, w2=1.0), DP, space)
        assert (result.argmax_n, result.argmax_d) == (1, 1)

    def test_matches_exhaustive_oracle_under_budget(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            params = random_params(rng)
            space = SearchSpace((1, 40), (1, 80), budget=("n_times_d", 512.0))
            result = constrained_optimum(params, DP, space)
            n, d, v = grid_argmax(
                lambda n, d: eval_perf_law(params, n, d, DP),
                1, 40, 1, 80,
                feasible_fn=lambda n, d: n * d <= 512,
            )
            assert (result.argmax_n, result.argmax_d) == (n, d)

    def test_budget_satisfied_and_frontier_tight(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            params = random_params(rng)
            space = SearchSpace((1, 30), (1, 30), budget=("n_times_d", 100.0))
            result = constrained_optimum(params, DP, space)
            assert result.argmax_n * result.argmax_d <= 100
            assert result.frontier
            for n, d, _v in result.frontier:
                assert n * d <= 100
                # no unit move stays within budget from a frontier point
                assert min((n + 1) * d, n * (d + 1)) > 100

    def test_quadratic_budget_functional(self):
        space = SearchSpace((1, 20), (1, 20), budget=("n_times_d_squared", 64.0))
        result = constrained_optimum(PerfLawParams(w2=1.0), DP, space)
        # maximize ln d subject to n d^2 <= 64
        assert (result.argmax_n, result.argmax_d) == (1, 8)

    def test_infeasible(self):
        space = SearchSpace((3, 5), (3, 5), budget=("n_times_d", 5.0))
        with pytest.raises(InfeasibleBudgetError):
            constrained_optimum(PerfLawParams(C=1.0), DP, space)

    def test_unbudgeted_space_rejected(self):
        with pytest.raises(ValidationError):
            constrained_optimum(PerfLawParams(C=1.0), DP, SearchSpace((1, 5), (1, 5)))


class TestScalingPotential:
    TABLE_ENTRIES = [
        ("HSTU", PerfLawParams(w1=1.0, w2=1.0, w3=-1.0403, w4=0.1425), 0.3322),
        ("LLaMA", PerfLawParams(w1=1.0, w2=1.0, w3=-1.4638, w4=0.0359), 0.3459),
        ("Sasrec", PerfLawParams(w1=1.0, w2=1.0, w3=0.0737, w4=0.4578), 0.3021),
    ]

    def test_identical_entries_tie(self):
        p = PerfLawParams(w1=1.0, w3=0.5, w4=0.5)
        report = scaling_potential([("a", p, 0.3), ("b", p, 0.3)])
        assert report.tie is True
        assert report.tau is None

    def test_published_values_echoed_verbatim(self):
        report = scaling_potential(self.TABLE_ENTRIES)
        by_label = {e.label: e for e in report.entries}
        assert by_label["HSTU"].w3 == -1.0403 and by_label["HSTU"].w4 == 0.1425
        assert by_label["LLaMA"].w3 == -1.4638 and by_label["LLaMA"].w4 == 0.0359
        assert by_label["Sasrec"].w3 == 0.0737 and by_label["Sasrec"].w4 == 0.4578
        text = report.to_text()
        for token in ("-1.0403", "0.1425", "-1.4638", "0.0359", "0.0737", "0.4578"):
            assert token in text

    def test_sorted_by_w4_then_w3_descending(self):
        report = scaling_potential(self.TABLE_ENTRIES)
        keys = [(e.w4, e.w3) for e in report.entries]
        assert keys == sorted(keys, reverse=True)
        assert [e.label for e in report.entries] == ["Sasrec", "HSTU", "LLaMA"]

    def test_monotone_synthetic_gives_tau_one(self):
        entries = [
            (f"m{i}", PerfLawParams(w1=1.0, w2=1.0, w3=0.1 * i, w4=0.2 * i), 0.1 * i)
            for i in range(1, 5)
        ]
        report = scaling_potential(entries)
        assert report.tau == pytest.approx(1.0)

    def test_two_entries_tau_is_plus_minus_one_or_tie(self):
        a = ("a", PerfLawParams(w4=0.5, w3=0.1), 0.4)
        b = ("b", PerfLawParams(w4=0.1, w3=0.1), 0.3)
        report = scaling_potential([a, b])
        assert report.tau in (1.0, -1.0) or report.tie

    def test_requires_two_entries(self):
        with pytest.raises(ValidationError):
            scaling_potential([("only", PerfLawParams(), None)])

    def test_missing_observed_suppresses_tau(self):
        entries = [
            ("a", PerfLawParams(w4=0.5), 0.4),
            ("b", PerfLawParams(w4=0.1), None),
        ]
        report = scaling_potential(entries)
        assert report.tau is None and report.tie is False

    def test_sign_annotations(self):
        report = scaling_potential(
            [
                ("pos", PerfLawParams(w1=0.5, w2=0.2, w4=0.9), None),
                ("neg", PerfLawParams(w1=-0.5, w2=-0.2, w4=0.1), None),
            ]
        )
        d = report.to_dict()
        signs = {e["label"]: (e["sign_w1"], e["sign_w2"]) for e in d["entries"]}
        assert signs == {"pos": ("+", "+"), "neg": ("-", "-")}


class TestOptResult:
    def test_dict_shape(self):
        r = OptResult(4, 32, 0.5, 100, [(4, 32, 0.5)])
        d = r.to_dict()
        assert d["argmax_n"] == 4 and d["frontier"][0] == {"n": 4, "d": 32, "predicted": 0.5}
