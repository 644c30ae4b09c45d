"""Loss-law and performance-law function families and their gradients.

Two loss-law parameterizations are supported:

* ``simplified``: L(n, d) = E + A/n^alpha + B/d^beta
* ``full``:       L(n, d) = [(Nc/n)^(alphaN/alphaD) + Dc/d]^alphaD

The performance law maps (layer count n, embedding width d_emb, data
parameter d_prime) to a ranking metric through three log-plus-power-decay
groups and an intercept::

    w1*(ln n + p1/n^w3) + w2*(ln d_emb + p2/d_emb^w4)
        + w6*(ln d_prime + p3/d_prime^w5) + C

The family with w6 = 1, C = 0 and p1 = p2 is the canonical ten-parameter
form; fitting may pin any subset via a parameter mask. Decay terms are
evaluated in log space so that extreme exponents (|w| up to ~32) do not
overflow prematurely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "LossLawParams",
    "PerfLawParams",
    "MetricKind",
    "PERF_PARAM_NAMES",
    "LOSS_SIMPLIFIED_NAMES",
    "LOSS_FULL_NAMES",
    "eval_loss_law",
    "eval_perf_law",
    "grad_perf_law",
    "grad_loss_law",
    "loss_to_performance",
]

PERF_PARAM_NAMES = ("w1", "w2", "w3", "w4", "w5", "w6", "p1", "p2", "p3", "C")
LOSS_SIMPLIFIED_NAMES = ("E", "A", "B", "alpha", "beta")
LOSS_FULL_NAMES = ("Nc", "Dc", "alphaN", "alphaD")

_METRIC_KINDS = ("loss", "hr", "ndcg", "mrr")


@dataclass(frozen=True)
class MetricKind:
    """Observed metric: training loss or a ranking metric at cutoff k."""

    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in _METRIC_KINDS:
            raise ValidationError(
                f"metric kind must be one of {_METRIC_KINDS}, got {self.kind!r}"
            )
        if self.kind in ("hr", "ndcg") and self.k is None:
            raise ValidationError(f"metric {self.kind!r} requires a cutoff k")

    def __str__(self) -> str:
        return self.kind if self.k is None else f"{self.kind}@{self.k}"


@dataclass(frozen=True)
class LossLawParams:
    """Parameters of one loss-law form; unused fields of the other form are None."""

    form: str
    E: float | None = None
    A: float | None = None
    B: float | None = None
    alpha: float | None = None
    beta: float | None = None
    Nc: float | None = None
    Dc: float | None = None
    alphaN: float | None = None
    alphaD: float | None = None

    def __post_init__(self):
        if self.form == "simplified":
            vals = (self.E, self.A, self.B, self.alpha, self.beta)
            if any(v is None for v in vals):
                raise ValidationError("simplified form needs E, A, B, alpha, beta")
            if self.alpha <= 0 or self.beta <= 0:
                raise ValidationError("decay exponents alpha, beta must be > 0")
        elif self.form == "full":
            vals = (self.Nc, self.Dc, self.alphaN, self.alphaD)
            if any(v is None for v in vals):
                raise ValidationError("full form needs Nc, Dc, alphaN, alphaD")
            if self.alphaN <= 0 or self.alphaD <= 0:
                raise ValidationError("alphaN, alphaD must be > 0")
            if self.Nc <= 0 or self.Dc <= 0:
                raise ValidationError("Nc, Dc must be > 0")
        else:
            raise ValidationError(f"unknown loss-law form {self.form!r}")

    @classmethod
    def simplified(cls, E, A, B, alpha, beta) -> "LossLawParams":
        return cls("simplified", E=E, A=A, B=B, alpha=alpha, beta=beta)

    @classmethod
    def full(cls, Nc, Dc, alphaN, alphaD) -> "LossLawParams":
        return cls("full", Nc=Nc, Dc=Dc, alphaN=alphaN, alphaD=alphaD)

    def names(self) -> tuple[str, ...]:
        return LOSS_SIMPLIFIED_NAMES if self.form == "simplified" else LOSS_FULL_NAMES

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.names()], dtype=float)

    @classmethod
    def from_vector(cls, form: str, vec) -> "LossLawParams":
        names = LOSS_SIMPLIFIED_NAMES if form == "simplified" else LOSS_FULL_NAMES
        return cls(form, **dict(zip(names, (float(v) for v in vec))))

    def to_dict(self) -> dict:
        return {n: getattr(self, n) for n in self.names()}

    @classmethod
    def from_dict(cls, d: dict) -> "LossLawParams":
        if set(LOSS_SIMPLIFIED_NAMES) <= set(d):
            return cls("simplified", **{n: float(d[n]) for n in LOSS_SIMPLIFIED_NAMES})
        if set(LOSS_FULL_NAMES) <= set(d):
            return cls("full", **{n: float(d[n]) for n in LOSS_FULL_NAMES})
        raise ValidationError(f"cannot infer loss-law form from keys {sorted(d)}")


@dataclass(frozen=True)
class PerfLawParams:
    """Ten performance-law parameters; canonical form has w6=1, C=0, p1=p2."""

    w1: float = 0.0
    w2: float = 0.0
    w3: float = 0.0
    w4: float = 0.0
    w5: float = 0.0
    w6: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    C: float = 0.0

    def __post_init__(self):
        for name in PERF_PARAM_NAMES:
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"parameter {name} must be finite")

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in PERF_PARAM_NAMES], dtype=float)

    @classmethod
    def from_vector(cls, vec) -> "PerfLawParams":
        return cls(**dict(zip(PERF_PARAM_NAMES, (float(v) for v in vec))))

    def to_dict(self) -> dict:
        return {n: getattr(self, n) for n in PERF_PARAM_NAMES}

    @classmethod
    def from_dict(cls, d: dict) -> "PerfLawParams":
        return cls(**{n: float(d[n]) for n in PERF_PARAM_NAMES if n in d})


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        arr = np.asarray(value, dtype=float)
        if np.any(arr <= 0):
            raise ValidationError(f"{name} must be > 0")


def _decay(amp: float, expo: float, x):
    """amp / x**expo without premature overflow: sign(amp)*exp(ln|amp| - expo*ln x)."""
    if amp == 0.0:
        return np.zeros_like(np.asarray(x, dtype=float))
    with np.errstate(over="ignore"):
        return math.copysign(1.0, amp) * np.exp(
            math.log(abs(amp)) - expo * np.log(x)
        )


def _eval_perf_vec(vec, n, d, dp):
    """Performance law on a raw (w1..w6, p1..p3, C) vector; no validation."""
    w1, w2, w3, w4, w5, w6, p1, p2, p3, c = vec
    return (
        w1 * (np.log(n) + _decay(p1, w3, n))
        + w2 * (np.log(d) + _decay(p2, w4, d))
        + w6 * (np.log(dp) + _decay(p3, w5, dp))
        + c
    )


def _grad_perf_vec(vec, n, d, dp):
    """Stacked partials (10, ...) of the performance law on a raw vector."""
    w1, w2, w3, w4, w5, w6, p1, p2, p3, _c = vec
    shape = np.broadcast(n, d, dp).shape
    ones = np.ones(shape)
    dec_n = _decay(p1, w3, n)
    dec_d = _decay(p2, w4, d)
    dec_dp = _decay(p3, w5, dp)
    pow_n = np.exp(-w3 * np.log(n))
    pow_d = np.exp(-w4 * np.log(d))
    pow_dp = np.exp(-w5 * np.log(dp))
    return np.stack(
        [
            (np.log(n) + dec_n) * ones,
            (np.log(d) + dec_d) * ones,
            -w1 * dec_n * np.log(n) * ones,
            -w2 * dec_d * np.log(d) * ones,
            -w6 * dec_dp * np.log(dp) * ones,
            (np.log(dp) + dec_dp) * ones,
            w1 * pow_n * ones,
            w2 * pow_d * ones,
            w6 * pow_dp * ones,
            ones,
        ]
    )


def _eval_loss_vec(form: str, vec, n, d):
    """Loss law on a raw vector; no validation (fitters probe freely)."""
    if form == "simplified":
        e, a, b, alpha, beta = vec
        return e + _decay(a, alpha, n) + _decay(b, beta, d)
    nc, dc, alpha_n, alpha_d = vec
    inner = np.exp((alpha_n / alpha_d) * (math.log(nc) - np.log(n))) + dc / d
    return inner**alpha_d


def _grad_loss_simplified_vec(vec, n, d):
    """Stacked partials (5, ...) of the simplified loss law, order (E,A,B,alpha,beta)."""
    _e, a, b, alpha, beta = vec
    shape = np.broadcast(n, d).shape
    ones = np.ones(shape)
    n_term = np.exp(-alpha * np.log(n))
    d_term = np.exp(-beta * np.log(d))
    return np.stack(
        [
            ones,
            n_term * ones,
            d_term * ones,
            -a * np.log(n) * n_term * ones,
            -b * np.log(d) * d_term * ones,
        ]
    )


def _as_result(value, *inputs):
    if all(np.isscalar(i) or np.ndim(i) == 0 for i in inputs):
        return float(value)
    return value


def eval_loss_law(params: LossLawParams, n, d):
    """Evaluate the loss law at model size n > 0 and data scale d > 0.

    ``n`` and ``d`` may be scalars or broadcastable arrays.
    """
    _check_positive(n=n, d=d)
    n = np.asarray(n, dtype=float)
    d = np.asarray(d, dtype=float)
    return _as_result(_eval_loss_vec(params.form, params.to_vector(), n, d), n, d)


def grad_loss_law(params: LossLawParams, n, d) -> np.ndarray:
    """Analytic partials of the simplified loss law, ordered (E, A, B, alpha, beta).

    Only the simplified form has an analytic gradient here; fitting the full
    form falls back to numerical differentiation.
    """
    if params.form != "simplified":
        raise ValidationError("analytic gradient available for the simplified form only")
    _check_positive(n=n, d=d)
    n = np.asarray(n, dtype=float)
    d = np.asarray(d, dtype=float)
    return _grad_loss_simplified_vec(params.to_vector(), n, d)


def eval_perf_law(params: PerfLawParams, n_layers, d_emb, d_prime):
    """Evaluate the performance law at (n_layers, d_emb, d_prime), all > 0.

    Inputs may be scalars or broadcastable arrays; the result matches.
    """
    _check_positive(n_layers=n_layers, d_emb=d_emb, d_prime=d_prime)
    n = np.asarray(n_layers, dtype=float)
    d = np.asarray(d_emb, dtype=float)
    dp = np.asarray(d_prime, dtype=float)
    return _as_result(_eval_perf_vec(params.to_vector(), n, d, dp), n, d, dp)


def grad_perf_law(params: PerfLawParams, n_layers, d_emb, d_prime) -> np.ndarray:
    """Analytic partials of the performance law w.r.t. its ten parameters.

    Component order follows ``PERF_PARAM_NAMES``. For scalar inputs the
    result has shape (10,); for array inputs shape (10,) + broadcast shape.
    """
    _check_positive(n_layers=n_layers, d_emb=d_emb, d_prime=d_prime)
    n = np.asarray(n_layers, dtype=float)
    d = np.asarray(d_emb, dtype=float)
    dp = np.asarray(d_prime, dtype=float)
    return _grad_perf_vec(params.to_vector(), n, d, dp)


def loss_to_performance(k: float, loss):
    """Linearized metric: performance = 1 - k * loss."""
    value = 1.0 - k * np.asarray(loss, dtype=float)
    return _as_result(value, loss)
