"""Search for optimal (layer count, embedding width) under a fitted law.

Layer counts and embedding widths are integers, so optimization is exact
enumeration over the integer grid. Grids above one million points switch to
a stride-8 coarse pass followed by a dense pass in a +/-16 window around the
coarse argmax; tests verify that this matches the exhaustive argmax. Ties
always resolve to the smaller layer count, then the smaller width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InfeasibleBudgetError, ValidationError
from .laws import PerfLawParams, _eval_perf_vec

__all__ = [
    "SearchSpace",
    "OptResult",
    "PotentialEntry",
    "PotentialReport",
    "global_optimum",
    "constrained_optimum",
    "scaling_potential",
    "BUDGET_FUNCTIONALS",
]

BUDGET_FUNCTIONALS = ("n_times_d", "n_times_d_squared")

_EXHAUSTIVE_LIMIT = 1_000_000
_COARSE_STRIDE = 8
_REFINE_WINDOW = 16


@dataclass(frozen=True)
class SearchSpace:
    """Integer ranges for layers and width, with an optional size budget."""

    n_range: tuple[int, int]
    d_range: tuple[int, int]
    budget: tuple[str, float] | None = None

    def __post_init__(self):
        for name, (lo, hi) in (("n_range", self.n_range), ("d_range", self.d_range)):
            if not 1 <= lo <= hi:
                raise ValidationError(f"{name} must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        if self.budget is not None:
            functional, limit = self.budget
            if functional not in BUDGET_FUNCTIONALS:
                raise ValidationError(
                    f"budget functional must be one of {BUDGET_FUNCTIONALS}, "
                    f"got {functional!r}"
                )
            if limit <= 0:
                raise ValidationError(f"budget limit must be > 0, got {limit}")

    def grid_size(self) -> int:
        return (self.n_range[1] - self.n_range[0] + 1) * (
            self.d_range[1] - self.d_range[0] + 1
        )


@dataclass(frozen=True)
class OptResult:
    """Argmax configuration, its predicted value, and the search accounting."""

    argmax_n: int
    argmax_d: int
    predicted: float
    evaluated_points: int
    frontier: list[tuple[int, int, float]] | None = None

    def to_dict(self) -> dict:
        return {
            "argmax_n": self.argmax_n,
            "argmax_d": self.argmax_d,
            "predicted": self.predicted,
            "evaluated_points": self.evaluated_points,
            "frontier": (
                None
                if self.frontier is None
                else [{"n": n, "d": d, "predicted": v} for n, d, v in self.frontier]
            ),
        }


def _budget_cost(functional: str, n: np.ndarray, d: np.ndarray) -> np.ndarray:
    if functional == "n_times_d":
        return n * d
    return n * d * d


def _eval_grid(vec, n_vals: np.ndarray, d_vals: np.ndarray, d_prime: float):
    return _eval_perf_vec(
        vec, n_vals[:, None].astype(float), d_vals[None, :].astype(float), d_prime
    )


def _argmax_first(values: np.ndarray, n_vals: np.ndarray, d_vals: np.ndarray):
    # C-order argmax returns the first maximum, i.e. smallest n then smallest d.
    flat = int(np.argmax(values))
    i, j = np.unravel_index(flat, values.shape)
    return int(n_vals[i]), int(d_vals[j]), float(values[i, j])


def global_optimum(
    params: PerfLawParams,
    d_prime: float,
    space: SearchSpace,
    refine: bool | None = None,
) -> OptResult:
    """Best (n, d) over the whole integer grid.

    ``refine`` forces the coarse-to-fine path on (True) or off (False);
    None selects it automatically for grids above 10^6 points. Both paths
    return the same argmax on the landscapes the law produces (verified
    against exhaustive enumeration in the tests).
    """
    if space.budget is not None:
        raise ValidationError("global_optimum takes a space without budget")
    if d_prime <= 0:
        raise ValidationError(f"d_prime must be > 0, got {d_prime}")
    vec = params.to_vector()
    n_lo, n_hi = space.n_range
    d_lo, d_hi = space.d_range
    use_refine = space.grid_size() > _EXHAUSTIVE_LIMIT if refine is None else refine

    if not use_refine:
        n_vals = np.arange(n_lo, n_hi + 1)
        d_vals = np.arange(d_lo, d_hi + 1)
        values = _eval_grid(vec, n_vals, d_vals, d_prime)
        n_best, d_best, v_best = _argmax_first(values, n_vals, d_vals)
        return OptResult(n_best, d_best, v_best, values.size)

    n_sub = np.unique(np.append(np.arange(n_lo, n_hi + 1, _COARSE_STRIDE), n_hi))
    d_sub = np.unique(np.append(np.arange(d_lo, d_hi + 1, _COARSE_STRIDE), d_hi))
    coarse = _eval_grid(vec, n_sub, d_sub, d_prime)
    cn, cd, _ = _argmax_first(coarse, n_sub, d_sub)
    n_vals = np.arange(max(n_lo, cn - _REFINE_WINDOW), min(n_hi, cn + _REFINE_WINDOW) + 1)
    d_vals = np.arange(max(d_lo, cd - _REFINE_WINDOW), min(d_hi, cd + _REFINE_WINDOW) + 1)
    dense = _eval_grid(vec, n_vals, d_vals, d_prime)
    n_best, d_best, v_best = _argmax_first(dense, n_vals, d_vals)
    return OptResult(n_best, d_best, v_best, coarse.size + dense.size)


def constrained_optimum(
    params: PerfLawParams, d_prime: float, space: SearchSpace
) -> OptResult:
    """Best (n, d) among grid points satisfying the budget.

    The frontier lists every feasible point whose remaining budget slack is
    smaller than the cheapest unit move (n+1 or d+1), i.e. the points from
    which no single-step growth stays within budget.
    """
    if space.budget is None:
        raise ValidationError("constrained_optimum needs a space with budget")
    if d_prime <= 0:
        raise ValidationError(f"d_prime must be > 0, got {d_prime}")
    functional, limit = space.budget
    vec = params.to_vector()
    n_lo, n_hi = space.n_range
    d_lo, d_hi = space.d_range
    n_vals = np.arange(n_lo, n_hi + 1)
    d_vals = np.arange(d_lo, d_hi + 1)
    n_grid = n_vals[:, None].astype(float)
    d_grid = d_vals[None, :].astype(float)
    cost = _budget_cost(functional, n_grid, d_grid)
    feasible = cost <= limit
    if not np.any(feasible):
        raise InfeasibleBudgetError(
            f"no grid point satisfies {functional} <= {limit}"
        )
    values = _eval_grid(vec, n_vals, d_vals, d_prime)
    masked = np.where(feasible, values, -np.inf)
    n_best, d_best, v_best = _argmax_first(masked, n_vals, d_vals)

    step_n = _budget_cost(functional, n_grid + 1, d_grid) - cost
    step_d = _budget_cost(functional, n_grid, d_grid + 1) - cost
    slack = limit - cost
    on_frontier = feasible & (slack < np.minimum(step_n, step_d))
    frontier = [
        (int(n_vals[i]), int(d_vals[j]), float(values[i, j]))
        for i, j in zip(*np.nonzero(on_frontier))
    ]
    return OptResult(n_best, d_best, v_best, int(feasible.sum()), frontier)


@dataclass(frozen=True)
class PotentialEntry:
    """One framework's fitted decay exponents and optional observed metric."""

    label: str
    w1: float
    w2: float
    w3: float
    w4: float
    observed: float | None = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "w1": self.w1,
            "w2": self.w2,
            "w3": self.w3,
            "w4": self.w4,
            "sign_w1": "+" if self.w1 >= 0 else "-",
            "sign_w2": "+" if self.w2 >= 0 else "-",
            "observed": self.observed,
        }


@dataclass(frozen=True)
class PotentialReport:
    """Frameworks ranked by their decay exponents (w4 first, then w3).

    Larger exponents indicate more headroom from scaling up when the
    matching group coefficients w1/w2 are positive; the ordering reverses
    when they are negative, so the sign columns are part of the report.
    ``tau`` is the Kendall rank correlation between this ordering and the
    observed metric when one was supplied for every entry; it is None (and
    ``tie`` is True) when either side has no rank variation.
    """

    entries: list[PotentialEntry]
    tau: float | None
    tie: bool

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "tau": self.tau,
            "tie": self.tie,
        }

    def to_text(self) -> str:
        lines = [
            f"{'label':<16} {'w3':>10} {'w4':>10} {'w1':>4} {'w2':>4} {'observed':>10}"
        ]
        for e in self.entries:
            obs = f"{e.observed:.4f}" if e.observed is not None else "-"
            lines.append(
                f"{e.label:<16} {e.w3:>10.4f} {e.w4:>10.4f} "
                f"{'+' if e.w1 >= 0 else '-':>4} {'+' if e.w2 >= 0 else '-':>4} "
                f"{obs:>10}"
            )
        if self.tie:
            lines.append("rank agreement: tie (no rank variation)")
        elif self.tau is not None:
            lines.append(f"rank agreement (kendall tau): {self.tau:.4f}")
        return "\n".join(lines)


def scaling_potential(
    fits: list[tuple[str, PerfLawParams, float | None]]
) -> PotentialReport:
    """Compare fitted frameworks by scaling headroom.

    ``fits`` holds (label, params, observed_performance_or_None) triples;
    at least two are required. Entries are sorted by (w4, w3) descending.
    """
    if len(fits) < 2:
        raise ValidationError("need at least 2 fits to compare")
    entries = [
        PotentialEntry(label, p.w1, p.w2, p.w3, p.w4, observed)
        for label, p, observed in fits
    ]
    entries.sort(key=lambda e: (e.w4, e.w3), reverse=True)

    tau = None
    tie = False
    observed = [e.observed for e in entries]
    if all(o is not None for o in observed):
        keys = [(e.w4, e.w3) for e in entries]
        ranks = [sorted(keys).index(k) for k in keys]
        if len(set(ranks)) < 2 or len(set(observed)) < 2:
            tie = True
        else:
            result = stats.kendalltau(ranks, observed)
            tau = float(result.statistic)
            if np.isnan(tau):
                tau, tie = None, True
    return PotentialReport(entries=entries, tau=tau, tie=tie)
