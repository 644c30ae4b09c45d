"""Nonlinear least-squares fitting of loss and performance laws.

The solver is a damped Gauss-Newton (Levenberg-Marquardt) iteration:
step = (J'J + mu*I)^-1 J'r with mu adapted by the gain ratio between actual
and predicted RSS reduction. It supports box bounds (steps are projected
into the box), frozen parameters, an analytic Jacobian when available and
central finite differences otherwise.

Law fits are multi-start: a deterministic RNG draws initial points
log-uniformly over per-parameter boxes, every start is polished with the
solver, and the lowest-RSS result wins (ties within 1e-12 go to the lowest
start index, so results are reproducible regardless of evaluation order).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, NumericError, ValidationError
from .laws import (
    LOSS_FULL_NAMES,
    LOSS_SIMPLIFIED_NAMES,
    PERF_PARAM_NAMES,
    LossLawParams,
    MetricKind,
    PerfLawParams,
    _eval_loss_vec,
    _eval_perf_vec,
    _grad_loss_simplified_vec,
    _grad_perf_vec,
)

__all__ = [
    "RunRecord",
    "FitResult",
    "LinearFit",
    "least_squares",
    "fit_loss_law",
    "fit_perf_law",
    "fit_k",
    "r_squared",
    "linear_fit",
]

_PERF_METRICS = ("hr", "ndcg", "mrr")


@dataclass(frozen=True)
class RunRecord:
    """One experiment observation: a model configuration and a measured metric."""

    dataset_id: str
    n_layers: int
    d_emb: int
    metric: MetricKind
    value: float
    d_prime: float | None = None

    def __post_init__(self):
        if self.n_layers < 1:
            raise ValidationError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.d_emb < 1:
            raise ValidationError(f"d_emb must be >= 1, got {self.d_emb}")
        if not np.isfinite(self.value):
            raise ValidationError("metric value must be finite")
        if self.metric.kind in _PERF_METRICS and not 0.0 <= self.value <= 1.0:
            raise ValidationError(
                f"{self.metric} value must lie in [0, 1], got {self.value}"
            )
        if self.d_prime is not None and self.d_prime <= 0:
            raise ValidationError(f"d_prime must be > 0, got {self.d_prime}")

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "n_layers": self.n_layers,
            "d_emb": self.d_emb,
            "metric": self.metric.kind,
            "k": self.metric.k,
            "value": self.value,
            "d_prime": self.d_prime,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            dataset_id=str(d["dataset_id"]),
            n_layers=int(d["n_layers"]),
            d_emb=int(d["d_emb"]),
            metric=MetricKind(d["metric"], d.get("k")),
            value=float(d["value"]),
            d_prime=None if d.get("d_prime") is None else float(d["d_prime"]),
        )


@dataclass(frozen=True)
class FitResult:
    """Outcome of one (possibly multi-start) least-squares fit.

    ``params`` is a typed law-parameter object for the law fitters, or the
    raw solution vector for the generic solver.  ``r_squared`` is None when
    no observations were attached (generic solver) and NaN when the observed
    values have zero variance.  ``data_params`` carries per-dataset fitted
    data parameters when the loss-law fit was asked to treat them as free.
    """

    params: object
    r_squared: float | None
    rss: float
    iterations: int
    converged: bool
    start_index: int = 0
    data_params: dict[str, float] | None = None

    def to_doc(self) -> dict:
        """Flat JSON document: parameter map plus fit-quality fields."""
        if isinstance(self.params, PerfLawParams):
            doc = {"law": "perf", **self.params.to_dict()}
        elif isinstance(self.params, LossLawParams):
            doc = {"law": "loss", "form": self.params.form, **self.params.to_dict()}
        else:
            doc = {"law": "generic", "x": [float(v) for v in np.ravel(self.params)]}
        doc.update(
            r_squared=self.r_squared,
            rss=self.rss,
            converged=self.converged,
            iterations=self.iterations,
            start_index=self.start_index,
        )
        if self.data_params is not None:
            doc["data_params"] = dict(sorted(self.data_params.items()))
        return doc


@dataclass(frozen=True)
class LinearFit:
    """Ordinary least squares y = slope*x + intercept with Pearson r."""

    slope: float
    intercept: float
    pearson_r: float
    r_squared: float

    def predict(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept


# ---------------------------------------------------------------------------
# Core Levenberg-Marquardt iteration


def _numeric_jacobian(residual_fn, x, lo, hi):
    r0 = np.asarray(residual_fn(x), dtype=float)
    jac = np.empty((r0.size, x.size))
    for j in range(x.size):
        h = 1e-6 * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] = min(x[j] + h, hi[j])
        xm[j] = max(x[j] - h, lo[j])
        if xp[j] == xm[j]:
            jac[:, j] = 0.0
            continue
        jac[:, j] = (
            np.asarray(residual_fn(xp), dtype=float)
            - np.asarray(residual_fn(xm), dtype=float)
        ) / (xp[j] - xm[j])
    return jac


def least_squares(
    residual_fn,
    jacobian_fn=None,
    init=None,
    bounds=None,
    mask=None,
    rss_rtol: float = 1e-12,
    grad_atol: float = 1e-10,
    max_iter: int = 10_000,
) -> FitResult:
    """Minimize ||residual_fn(x)||^2 by damped Gauss-Newton steps.

    Parameters
    ----------
    residual_fn : callable
        Maps a parameter vector to a residual vector.
    jacobian_fn : callable, optional
        Maps x to the (n_residuals, n_params) Jacobian of the residuals;
        central finite differences are used when omitted.
    init : array
        Starting point; must satisfy the bounds.
    bounds : (lo, hi) pair of arrays, optional
        Per-parameter box; steps are projected into it.
    mask : boolean array, optional
        True entries are frozen at their ``init`` value.
    rss_rtol, grad_atol, max_iter
        Stop when the relative RSS decrease of an accepted step falls below
        ``rss_rtol``, or the gradient infinity-norm falls below
        ``grad_atol``, or an accepted step moves the parameters by less than
        1e-14 relative, or after ``max_iter`` iterations.

    Returns
    -------
    FitResult with ``params`` holding the raw solution vector.
    """
    x = np.array(init, dtype=float)
    n_param = x.size
    frozen = (
        np.zeros(n_param, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    )
    free = np.flatnonzero(~frozen)
    if bounds is None:
        lo = np.full(n_param, -np.inf)
        hi = np.full(n_param, np.inf)
    else:
        lo = np.asarray(bounds[0], dtype=float)
        hi = np.asarray(bounds[1], dtype=float)
    if np.any(x < lo) or np.any(x > hi):
        raise ValidationError("init violates bounds")

    with np.errstate(over="ignore", invalid="ignore"):
        r = np.asarray(residual_fn(x), dtype=float)
        if not np.all(np.isfinite(r)):
            raise NumericError("non-finite residual at init")
        if r.size < free.size:
            raise InsufficientDataError(
                f"underdetermined: {r.size} residuals for {free.size} free parameters"
            )
        rss = float(r @ r)
        if not np.isfinite(rss):
            raise NumericError("non-finite residual norm at init")
        if free.size == 0:
            return FitResult(x, None, rss, 0, True)

        def jac_free(xv):
            if jacobian_fn is not None:
                full = np.asarray(jacobian_fn(xv), dtype=float)
            else:
                full = _numeric_jacobian(residual_fn, xv, lo, hi)
            return np.nan_to_num(full[:, free], nan=0.0, posinf=1e100, neginf=-1e100)

        jac = jac_free(x)
        hess = jac.T @ jac
        grad = jac.T @ r
        mu = 1e-3 * max(float(np.max(np.diag(hess))), 1e-300)
        nu = 2.0
        eye = np.eye(free.size)
        converged = bool(np.max(np.abs(grad)) < grad_atol)
        iterations = 0

        while not converged and iterations < max_iter:
            iterations += 1
            try:
                step = np.linalg.solve(hess + mu * eye, -grad)
            except np.linalg.LinAlgError:
                mu *= nu
                nu *= 2.0
                continue
            if not np.all(np.isfinite(step)):
                mu *= nu
                nu *= 2.0
                if mu > 1e200:
                    break
                continue
            x_new = x.copy()
            x_new[free] = np.clip(x[free] + step, lo[free], hi[free])
            actual_step = x_new[free] - x[free]
            if not np.any(actual_step):
                mu *= nu
                nu *= 2.0
                if mu > 1e200:
                    break
                continue
            r_new = np.asarray(residual_fn(x_new), dtype=float)
            if np.all(np.isfinite(r_new)):
                rss_new = float(r_new @ r_new)
                if not np.isfinite(rss_new):
                    rss_new = np.inf
            else:
                rss_new = np.inf
            predicted = float(actual_step @ (mu * actual_step - grad))
            rho = (rss - rss_new) / predicted if predicted > 0 else -1.0
            if np.isfinite(rss_new) and rho > 0:
                rel_drop = (rss - rss_new) / max(rss, 1e-300)
                step_rel = float(
                    np.max(np.abs(actual_step) / np.maximum(np.abs(x_new[free]), 1e-300))
                )
                x, r, rss = x_new, r_new, rss_new
                jac = jac_free(x)
                hess = jac.T @ jac
                grad = jac.T @ r
                mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
                nu = 2.0
                if (
                    rel_drop < rss_rtol
                    or np.max(np.abs(grad)) < grad_atol
                    or step_rel < 1e-14
                ):
                    converged = True
            else:
                mu *= nu
                nu *= 2.0
                if mu > 1e200:
                    break

    return FitResult(x, None, rss, iterations, converged)


# ---------------------------------------------------------------------------
# Multi-start machinery


@dataclass(frozen=True)
class _ParamSpec:
    """Bound box and log-uniform init range (signed = random sign) for one parameter.

    ``uniform=True`` draws uniformly over [init_lo, init_hi] instead; used
    for parameters that already live in log space.
    """

    name: str
    lo: float
    hi: float
    init_lo: float
    init_hi: float
    signed: bool = False
    uniform: bool = False

    def draw(self, rng) -> float:
        if self.uniform:
            return float(rng.uniform(self.init_lo, self.init_hi))
        mag = np.exp(rng.uniform(np.log(self.init_lo), np.log(self.init_hi)))
        if self.signed and rng.random() < 0.5:
            mag = -mag
        return float(np.clip(mag, self.lo, self.hi))


_PERF_SPECS = {
    # coefficients carry sign; inner amplitudes start positive; exponents signed
    "w1": _ParamSpec("w1", -1e3, 1e3, 1e-3, 1e3, signed=True),
    "w2": _ParamSpec("w2", -1e3, 1e3, 1e-3, 1e3, signed=True),
    "w3": _ParamSpec("w3", -32.0, 32.0, 1e-3, 32.0, signed=True),
    "w4": _ParamSpec("w4", -32.0, 32.0, 1e-3, 32.0, signed=True),
    "w5": _ParamSpec("w5", -32.0, 32.0, 1e-3, 32.0, signed=True),
    "w6": _ParamSpec("w6", -1e3, 1e3, 1e-3, 1e3, signed=True),
    "p1": _ParamSpec("p1", -1e3, 1e3, 1e-3, 1e3),
    "p2": _ParamSpec("p2", -1e3, 1e3, 1e-3, 1e3),
    "p3": _ParamSpec("p3", -1e3, 1e3, 1e-3, 1e3),
    "C": _ParamSpec("C", -1e3, 1e3, 1e-3, 1e3, signed=True),
}

_LOSS_SIMPLIFIED_SPECS = {
    "E": _ParamSpec("E", -1e3, 1e3, 1e-3, 1e3, signed=True),
    "A": _ParamSpec("A", -1e3, 1e3, 1e-3, 1e3),
    "B": _ParamSpec("B", -1e3, 1e3, 1e-3, 1e3),
    # positivity is a representational invariant of the simplified form
    "alpha": _ParamSpec("alpha", 1e-6, 32.0, 1e-3, 8.0),
    "beta": _ParamSpec("beta", 1e-6, 32.0, 1e-3, 8.0),
}

_LOSS_FULL_SPECS = {
    "Nc": _ParamSpec("Nc", 1e-9, 1e9, 1e-3, 1e3),
    "Dc": _ParamSpec("Dc", 1e-9, 1e9, 1e-3, 1e3),
    "alphaN": _ParamSpec("alphaN", 1e-6, 32.0, 1e-2, 4.0),
    "alphaD": _ParamSpec("alphaD", 1e-6, 32.0, 1e-2, 4.0),
}

# free data parameters are optimized as ln(D): it puts their sensitivity on
# the same scale as the law coefficients, which identity damping needs
_LOG_DATA_SPEC = _ParamSpec(
    "lnD", np.log(1e-12), np.log(1e15), np.log(1.0), np.log(1e12), uniform=True
)

_RSS_TIE = 1e-12


_SCREEN_ITERS = 500
_POLISH_COUNT = 6


def _multi_start(
    residual_fn,
    jacobian_fn,
    specs: list[_ParamSpec],
    mask_values: dict[str, float],
    n_starts: int,
    seed: int,
    threads: int = 1,
):
    """Run the solver from ``n_starts`` seeded draws; best RSS wins.

    ``mask_values`` freezes named parameters at fixed values. Every start
    gets a capped screening budget; the few best screened results are then
    polished to full tolerance (hopeless basins otherwise dominate the
    runtime). The reduction is order-independent: lowest RSS, ties within
    1e-12 resolved by lowest start index.
    """
    names = [s.name for s in specs]
    unknown = set(mask_values) - set(names)
    if unknown:
        raise ValidationError(f"mask names not in parameter set: {sorted(unknown)}")
    frozen = np.array([s.name in mask_values for s in specs])
    lo = np.array([s.lo for s in specs])
    hi = np.array([s.hi for s in specs])
    for name, value in mask_values.items():
        i = names.index(name)
        lo[i] = min(lo[i], value)
        hi[i] = max(hi[i], value)

    rng = np.random.default_rng(seed)
    inits = np.empty((n_starts, len(specs)))
    for row in range(n_starts):
        for col, spec in enumerate(specs):
            inits[row, col] = (
                mask_values[spec.name] if frozen[col] else spec.draw(rng)
            )

    def solve(idx, init, max_iter):
        try:
            res = least_squares(
                residual_fn,
                jacobian_fn,
                init=init,
                bounds=(lo, hi),
                mask=frozen,
                max_iter=max_iter,
            )
        except NumericError:
            return idx, None  # draw landed in an overflow region: skip it
        return idx, res

    def run(fn, tasks):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(fn, tasks))
        return [fn(t) for t in tasks]

    screened = run(lambda i: solve(i, inits[i], _SCREEN_ITERS), range(n_starts))
    screened = [(i, r) for i, r in screened if r is not None]
    if not screened:
        raise NumericError("every multi-start draw yielded non-finite residuals")
    screened.sort(key=lambda pair: (pair[1].rss, pair[0]))
    finalists = screened[:_POLISH_COUNT]

    polished = run(
        lambda pair: (
            pair[0],
            solve(pair[0], np.asarray(pair[1].params), 10_000)[1],
            pair[1].iterations,
        ),
        finalists,
    )
    results = [
        (i, FitResult(r.params, None, r.rss, pre + r.iterations, r.converged))
        for i, r, pre in polished
        if r is not None
    ] + [pair for pair in screened[_POLISH_COUNT:]]
    best_rss = min(res.rss for _, res in results)
    idx, res = min(
        ((i, r) for i, r in results if r.rss <= best_rss + _RSS_TIE),
        key=lambda pair: pair[0],
    )
    return idx, res


def r_squared(observed, predicted) -> float:
    """Coefficient of determination 1 - SSres/SStot."""
    obs = np.asarray(observed, dtype=float)
    pred = np.asarray(predicted, dtype=float)
    if obs.shape != pred.shape or obs.size == 0:
        raise ValidationError("observed and predicted must have equal non-zero length")
    ss_tot = float(np.sum((obs - obs.mean()) ** 2))
    if ss_tot == 0:
        raise ValidationError("observed values have zero variance")
    ss_res = float(np.sum((obs - pred) ** 2))
    return 1.0 - ss_res / ss_tot


def _r2_or_nan(observed, rss: float) -> float:
    ss_tot = float(np.sum((observed - observed.mean()) ** 2))
    return float("nan") if ss_tot == 0 else 1.0 - rss / ss_tot


def fit_loss_law(
    runs: list[RunRecord],
    form: str = "simplified",
    size: str = "n_layers",
    fit_data_param: bool = False,
    mask: dict[str, float] | None = None,
    n_starts: int = 64,
    seed: int = 0,
    threads: int = 1,
) -> FitResult:
    """Fit a loss law to loss-metric run records by multi-start least squares.

    ``size`` selects the model-size covariate: the layer count itself
    (``"n_layers"``) or the parameter-count proxy layers * d_emb^2
    (``"params_proxy"``). By default each run's data scale is its attached
    ``d_prime``; with ``fit_data_param=True`` one free data parameter per
    distinct dataset_id is estimated instead and reported in
    ``FitResult.data_params`` (freeze shape constants via ``mask`` to keep
    that mode identifiable, e.g. the decay exponent).
    """
    if form not in ("simplified", "full"):
        raise ValidationError(f"unknown loss-law form {form!r}")
    if size not in ("n_layers", "params_proxy"):
        raise ValidationError(f"unknown size covariate {size!r}")
    if any(r.metric.kind != "loss" for r in runs):
        raise ValidationError("fit_loss_law expects runs with metric kind 'loss'")
    if len(runs) < 6:
        raise InsufficientDataError(f"need >= 6 loss runs, got {len(runs)}")

    n = np.array(
        [
            r.n_layers if size == "n_layers" else r.n_layers * r.d_emb**2
            for r in runs
        ],
        dtype=float,
    )
    y = np.array([r.value for r in runs], dtype=float)
    if len(set(n)) < 2:
        raise InsufficientDataError("need >= 2 distinct model sizes")

    law_names = LOSS_SIMPLIFIED_NAMES if form == "simplified" else LOSS_FULL_NAMES
    law_specs = _LOSS_SIMPLIFIED_SPECS if form == "simplified" else _LOSS_FULL_SPECS
    specs = [law_specs[name] for name in law_names]
    n_law = len(specs)

    if fit_data_param:
        dataset_ids = sorted({r.dataset_id for r in runs})
        ds_index = {ds: i for i, ds in enumerate(dataset_ids)}
        col = np.array([ds_index[r.dataset_id] for r in runs])
        specs = specs + [
            _ParamSpec(
                f"lnD[{ds}]",
                _LOG_DATA_SPEC.lo,
                _LOG_DATA_SPEC.hi,
                _LOG_DATA_SPEC.init_lo,
                _LOG_DATA_SPEC.init_hi,
                uniform=True,
            )
            for ds in dataset_ids
        ]

        def residual(vec):
            d = np.exp(vec[n_law + col])
            return _eval_loss_vec(form, vec[:n_law], n, d) - y

        def jacobian(vec):
            d = np.exp(vec[n_law + col])
            jac = np.zeros((len(runs), len(vec)))
            if form == "simplified":
                jac[:, :n_law] = _grad_loss_simplified_vec(vec[:n_law], n, d).T
                _e, _a, b, _alpha, beta = vec[:n_law]
                # d(B e^{-beta ln D})/d(ln D) = -beta * B * D^-beta
                jac[np.arange(len(runs)), n_law + col] = -beta * b * np.exp(
                    -beta * np.log(d)
                )
                return jac
            raise NotImplementedError  # full form uses the numeric fallback

        jacobian_fn = jacobian if form == "simplified" else None
    else:
        if any(r.d_prime is None for r in runs):
            raise ValidationError(
                "runs must carry d_prime (or pass fit_data_param=True)"
            )
        d = np.array([r.d_prime for r in runs], dtype=float)
        if len(set(d)) < 2:
            raise InsufficientDataError("need >= 2 distinct data-scale values")

        def residual(vec):
            return _eval_loss_vec(form, vec, n, d) - y

        def jacobian(vec):
            return _grad_loss_simplified_vec(vec, n, d).T

        jacobian_fn = jacobian if form == "simplified" else None

    idx, res = _multi_start(
        residual, jacobian_fn, specs, mask or {}, n_starts, seed, threads
    )
    vec = np.asarray(res.params)
    law_vec = vec[:n_law]
    if form == "simplified":
        # keep the representational invariant even if the optimizer parked an
        # exponent at its lower bound
        law_vec = law_vec.copy()
        law_vec[3] = max(law_vec[3], 1e-12)
        law_vec[4] = max(law_vec[4], 1e-12)
    params = LossLawParams.from_vector(form, law_vec)
    data_params = None
    if fit_data_param:
        data_params = {
            ds: float(np.exp(vec[n_law + i])) for ds, i in ds_index.items()
        }
    return FitResult(
        params=params,
        r_squared=_r2_or_nan(y, res.rss),
        rss=res.rss,
        iterations=res.iterations,
        converged=res.converged,
        start_index=idx,
        data_params=data_params,
    )


def fit_perf_law(
    runs: list[RunRecord],
    mask: dict[str, float] | None = None,
    n_starts: int = 64,
    seed: int = 0,
    threads: int = 1,
) -> FitResult:
    """Fit the performance law to ranking-metric run records.

    ``mask`` freezes named parameters at fixed values; when None the data
    coefficient w6 is frozen to 1 (the canonical form). Pass ``{}`` to free
    all ten parameters. Every run must carry ``d_prime``.
    """
    if any(r.metric.kind not in _PERF_METRICS for r in runs):
        raise ValidationError(
            "fit_perf_law expects runs with metric kind hr, ndcg, or mrr"
        )
    if len(runs) < 10:
        raise InsufficientDataError(f"need >= 10 performance runs, got {len(runs)}")
    if len({r.n_layers for r in runs}) < 3:
        raise InsufficientDataError("need >= 3 distinct n_layers values")
    if len({r.d_emb for r in runs}) < 3:
        raise InsufficientDataError("need >= 3 distinct d_emb values")
    if any(r.d_prime is None for r in runs):
        raise ValidationError("every run must carry d_prime for a performance fit")

    n = np.array([r.n_layers for r in runs], dtype=float)
    d = np.array([r.d_emb for r in runs], dtype=float)
    dp = np.array([r.d_prime for r in runs], dtype=float)
    y = np.array([r.value for r in runs], dtype=float)

    def residual(vec):
        return _eval_perf_vec(vec, n, d, dp) - y

    def jacobian(vec):
        return _grad_perf_vec(vec, n, d, dp).T

    specs = [_PERF_SPECS[name] for name in PERF_PARAM_NAMES]
    mask_values = {"w6": 1.0} if mask is None else dict(mask)
    idx, res = _multi_start(
        residual, jacobian, specs, mask_values, n_starts, seed, threads
    )
    return FitResult(
        params=PerfLawParams.from_vector(res.params),
        r_squared=_r2_or_nan(y, res.rss),
        rss=res.rss,
        iterations=res.iterations,
        converged=res.converged,
        start_index=idx,
    )


def fit_k(loss_runs: list[RunRecord], perf_runs: list[RunRecord]) -> float:
    """Slope k of the through-origin regression (1 - performance) = k * loss.

    Runs are paired on (dataset_id, n_layers, d_emb).
    """
    loss_by_key = {
        (r.dataset_id, r.n_layers, r.d_emb): r.value for r in loss_runs
    }
    pairs = [
        (loss_by_key[(r.dataset_id, r.n_layers, r.d_emb)], r.value)
        for r in perf_runs
        if (r.dataset_id, r.n_layers, r.d_emb) in loss_by_key
    ]
    if not pairs:
        raise InsufficientDataError("no (loss, performance) pairs share a config")
    loss = np.array([p[0] for p in pairs])
    gap = 1.0 - np.array([p[1] for p in pairs])
    denom = float(loss @ loss)
    if denom == 0:
        raise ValidationError("all paired losses are zero")
    return float(loss @ gap / denom)


def linear_fit(xs, ys) -> LinearFit:
    """Ordinary least squares with intercept, plus the Pearson correlation."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValidationError("need >= 2 (x, y) points of equal length")
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0:
        raise ValidationError("x values are all equal")
    sxy = float(np.sum((x - x.mean()) * (y - y.mean())))
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    syy = float(np.sum((y - y.mean()) ** 2))
    if syy == 0:
        pearson = float("nan")
        r2 = float("nan")
    else:
        pearson = sxy / np.sqrt(sxx * syy)
        resid = y - (slope * x + intercept)
        r2 = 1.0 - float(np.sum(resid**2)) / syy
    return LinearFit(slope=slope, intercept=intercept, pearson_r=pearson, r_squared=r2)
