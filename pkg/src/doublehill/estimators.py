"""Log-spacing statistics T_n(f, s), S_n(f, s) and the estimators built on them.

All estimators read the top k + 1 order statistics of a :class:`SortedSample`.
Scalar functions (``hill``, ``marginal_estimate``, ...) return an
:class:`EstimateResult`; :func:`estimate_curve` evaluates one estimator over
many k at once and is what the simulation harness uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .special import gamma_fn
from .weights import (
    EstimatorParams,
    RegimeClass,
    UnsupportedRegimeError,
    WeightFunction,
    classify_regime,
    eval_a_n,
    eval_sigma_n,
)


class DegenerateSampleError(ValueError):
    """The sample makes an estimator undefined (zero denominator, etc.)."""


@dataclass(frozen=True)
class SortedSample:
    """Ascending order statistics X_{1,n} <= ... <= X_{n,n}."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("sample must be a nonempty 1-d sequence")
        if np.any(np.diff(v) < 0):
            raise ValueError("sample values must be nondecreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_unsorted(cls, values) -> "SortedSample":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return self.values.size

    def top(self, k: int) -> np.ndarray:
        """X_{n,n}, X_{n-1,n}, ..., X_{n-k,n} (descending, length k + 1)."""
        if k + 1 > self.n:
            raise ValueError(f"k={k} needs at least k+1={k + 1} observations, have {self.n}")
        return self.values[self.n - k - 1 :][::-1]

    def count_ties(self, k: int) -> int:
        return int(np.count_nonzero(log_spacings(self, k) == 0))


@dataclass(frozen=True)
class EstimateResult:
    gamma_hat: float
    statistic_value: float
    normalizer: float
    regime: Optional[RegimeClass]
    k_used: int
    asymptotic_sd: Optional[float] = None
    s: float = 1.0
    tau: Optional[float] = None
    ties: int = 0


def _top_logs(sample: SortedSample, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError("k must be >= 1")
    top = sample.top(k)
    if not top[-1] > 0:
        raise ValueError(f"X_(n-k,n) = {top[-1]!r} must be positive to take logs")
    return np.log(top)


def log_spacings(sample: SortedSample, k: int) -> np.ndarray:
    """Delta_j = log X_{n-j+1,n} - log X_{n-j,n}, j = 1..k."""
    logs = _top_logs(sample, k)
    return logs[:-1] - logs[1:]


def t_statistic(params: EstimatorParams, sample: SortedSample) -> float:
    """T_n(f, s) = sum_j f(j) Delta_j^s."""
    d = log_spacings(sample, params.k)
    return math.fsum((params.weight.values(params.k) * d**params.s).tolist())


def s_statistic(params: EstimatorParams, sample: SortedSample) -> float:
    """Threshold form S_n(f, s) = sum_j f(j) (log X_{n-j+1,n} - log X_{n-k,n})^s."""
    logs = _top_logs(sample, params.k)
    d = logs[:-1] - logs[-1]
    return math.fsum((params.weight.values(params.k) * d**params.s).tolist())


def marginal_estimate(params: EstimatorParams, sample: SortedSample) -> EstimateResult:
    """(T_n / a_n)^(1/s); power weights in region I are refused."""
    regime = None
    tau = params.weight.tau if params.weight.kind != "custom" else None
    if tau is not None:
        regime = classify_regime(tau, params.s)
        if regime.region == "I":
            raise UnsupportedRegimeError(
                f"(tau={tau}, s={params.s}) is region I: T_n carries no estimate of gamma"
            )
    t = t_statistic(params, sample)
    a_n = eval_a_n(params)
    gamma_hat = (t / a_n) ** (1.0 / params.s)
    sd = None
    if regime is not None and regime.gaussian:
        sd = asymptotic_sd_op(tau, params.s, params.k, gamma_hat)
    return EstimateResult(
        gamma_hat=gamma_hat,
        statistic_value=t,
        normalizer=a_n,
        regime=regime,
        k_used=params.k,
        asymptotic_sd=sd,
        s=params.s,
        tau=tau,
        ties=sample.count_ties(params.k),
    )


def hill(sample: SortedSample, k: int) -> EstimateResult:
    return marginal_estimate(EstimatorParams.diop_lo(1.0, 1.0, k), sample)


def double_hill_optimal(tau: float, sample: SortedSample, k: int) -> EstimateResult:
    """Margin s = tau (minimum asymptotic variance for fixed s)."""
    if tau < 1:
        raise ValueError(f"optimal double Hill needs tau >= 1, got {tau}")
    return marginal_estimate(EstimatorParams.diop_lo(tau, tau, k), sample)


def double_hill_boundary(s: float, sample: SortedSample, k: int) -> EstimateResult:
    """Margin tau = s - 1/2, the Gaussian/non-Gaussian boundary."""
    return marginal_estimate(EstimatorParams.diop_lo(s - 0.5, s, k), sample)


def dekkers_moment(sample: SortedSample, k: int) -> EstimateResult:
    """Moment estimator M1 + 1 - 1/2 (1 - M1^2/M2)^-1."""
    one = WeightFunction.constant()
    m1 = s_statistic(EstimatorParams(one, 1.0, k), sample) / k
    m2 = s_statistic(EstimatorParams(one, 2.0, k), sample) / k
    gamma_hat = _moment_formula(m1, m2)
    return EstimateResult(gamma_hat, m1, 1.0, None, k, ties=sample.count_ties(k))


def _moment_formula(m1: float, m2: float) -> float:
    if not m1 > 0:
        raise DegenerateSampleError("M1 must be positive")
    denom = 1.0 - m1 * m1 / m2
    if denom == 0:
        raise DegenerateSampleError("M2 == M1^2: moment estimator undefined")
    return m1 + 1.0 - 0.5 / denom


def _variance_factor(s: float) -> float:
    return gamma_fn(2 * s + 1) - gamma_fn(s + 1) ** 2


def asymptotic_sd_op(tau: float, s: float, k: int, gamma_hat: float) -> float:
    """1 / V_n(tau, s), the delta-method sd of (T_n/a_n)^(1/s)."""
    region = classify_regime(tau, s).region
    if region not in ("III", "IV"):
        raise UnsupportedRegimeError(f"region {region} has a non-Gaussian limit; no sd")
    if gamma_hat < 0:
        raise ValueError("gamma_hat must be nonnegative")
    params = EstimatorParams.diop_lo(tau, s, k)
    ratio = eval_sigma_n(params) / eval_a_n(params)
    return ratio * gamma_hat * math.sqrt(_variance_factor(s)) / s


def normal_quantile(p: float) -> float:
    """Standard normal quantile (scipy's ndtri)."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return float(stats.norm.ppf(p))


def confidence_interval(result: EstimateResult, level: float = 0.95) -> tuple:
    if result.asymptotic_sd is None:
        raise UnsupportedRegimeError("no asymptotic sd: confidence interval refused")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    half = normal_quantile((1 + level) / 2) * result.asymptotic_sd
    return max(0.0, result.gamma_hat - half), result.gamma_hat + half


# ---------------------------------------------------------------------------
# estimator specs and vectorized curves


@dataclass(frozen=True)
class EstimatorSpec:
    """One estimator of the mini-grammar: hill, dekkers, dh:<s>, odh:<tau>, marginal:<tau>:<s>."""

    name: str
    tau: Optional[float] = None
    s: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "EstimatorSpec":
        parts = text.strip().split(":")
        head = parts[0].lower()
        try:
            nums = [float(p) for p in parts[1:]]
        except ValueError:
            raise ValueError(f"bad estimator spec {text!r}") from None
        if head in ("hill", "dekkers") and not nums:
            return cls(head)
        if head == "dh" and len(nums) == 1:
            if nums[0] < 1:
                raise ValueError(f"dh needs s >= 1: {text!r}")
            return cls("dh", tau=nums[0] - 0.5, s=nums[0])
        if head == "odh" and len(nums) == 1:
            if nums[0] < 1:
                raise ValueError(f"odh needs tau >= 1: {text!r}")
            return cls("odh", tau=nums[0], s=nums[0])
        if head == "marginal" and len(nums) == 2:
            if nums[1] < 1 or nums[0] < 0:
                raise ValueError(f"marginal needs tau >= 0, s >= 1: {text!r}")
            if classify_regime(nums[0], nums[1]).region == "I":
                raise ValueError(f"marginal {text!r} lies in region I (no estimate)")
            return cls("marginal", tau=nums[0], s=nums[1])
        raise ValueError(f"bad estimator spec {text!r}")

    @property
    def label(self) -> str:
        if self.name in ("hill", "dekkers"):
            return self.name
        if self.name == "dh":
            return f"dh:{self.s:g}"
        if self.name == "odh":
            return f"odh:{self.tau:g}"
        return f"marginal:{self.tau:g}:{self.s:g}"

    @property
    def margin(self) -> Optional[tuple]:
        """(tau, s) of the T_n margin, or None for the moment estimator."""
        if self.name == "hill":
            return 1.0, 1.0
        if self.name == "dekkers":
            return None
        return self.tau, self.s

    def estimate(self, sample: SortedSample, k: int) -> EstimateResult:
        if self.name == "dekkers":
            return dekkers_moment(sample, k)
        if self.name == "hill":
            return hill(sample, k)
        if self.name == "dh":
            return double_hill_boundary(self.s, sample, k)
        if self.name == "odh":
            return double_hill_optimal(self.tau, sample, k)
        return marginal_estimate(EstimatorParams.diop_lo(self.tau, self.s, k), sample)


def estimate_curve(spec: EstimatorSpec, sample: SortedSample, kmax: int) -> np.ndarray:
    """gamma_hat(k) for k = 1..kmax as an array (entry i is k = i + 1).

    Entries where the estimator is undefined are NaN. The running sums use
    plain cumulative summation, so values may differ from the scalar
    functions in the last few bits.
    """
    top = sample.top(kmax)
    out = np.full(kmax, np.nan)
    positive = top > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(positive, np.log(np.where(positive, top, 1.0)), np.nan)
    ks = np.arange(1, kmax + 1, dtype=float)
    margin = spec.margin
    if margin is None:
        csum = np.cumsum(logs[:-1])
        csum2 = np.cumsum(logs[:-1] ** 2)
        thr = logs[1:]
        m1 = csum / ks - thr
        m2 = csum2 / ks - 2 * thr * csum / ks + thr**2
        with np.errstate(divide="ignore", invalid="ignore"):
            denom = 1.0 - m1 * m1 / m2
            est = m1 + 1.0 - 0.5 / denom
        ok = (m1 > 0) & (denom != 0) & np.isfinite(est)
        out[ok] = est[ok]
        return out
    tau, s = margin
    d = logs[:-1] - logs[1:]
    w = ks**tau
    t = np.cumsum(w * d**s)
    a = gamma_fn(s + 1) * np.cumsum(w * ks**-s)
    with np.errstate(invalid="ignore"):
        est = (t / a) ** (1.0 / s)
    ok = np.isfinite(est)
    out[ok] = est[ok]
    return out
