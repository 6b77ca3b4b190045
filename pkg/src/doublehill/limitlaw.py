"""The non-Gaussian limit L(f, s) = sum_j f(j) j^-s F_j and the expectation
surrogates of the perturbation conditions.

F_j = (E_j^s - Gamma(s+1)) / sqrt(Gamma(2s+1) - Gamma(s+1)^2) with E_j ~ Exp(1),
so every F_j is centred with unit variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import RngStream, derive_stream
from .special import closed_J, gamma_fn
from .weights import EstimatorParams, WeightFunction, eval_a_n, eval_sigma_n, eval_sigma_n2, zeta_tail_bound

DEFAULT_TRUNCATION = 10_000


@dataclass(frozen=True)
class LimitLawSpec:
    weight: WeightFunction
    s: float
    j_max: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if not self.s >= 1:
            raise ValueError("s must be >= 1")
        if self.j_max < 1:
            raise ValueError("j_max must be >= 1")

    def coefficients(self) -> np.ndarray:
        j = np.arange(1, self.j_max + 1, dtype=float)
        return self.weight.values(self.j_max) * j**-self.s

    def tail_variance_bound(self) -> float:
        """Bound on the variance dropped by truncating at j_max (power weights only)."""
        if self.weight.kind == "custom":
            return math.nan
        return zeta_tail_bound(2 * (self.s - (self.weight.tau or 0.0)), self.j_max)


@dataclass(frozen=True)
class ConditionInputs:
    p_n_lambda: float
    b_n_lambda: float
    gamma: float
    log_k: float

    def __post_init__(self):
        if min(self.p_n_lambda, self.b_n_lambda, self.gamma) < 0 or not self.log_k > 0:
            raise ValueError("condition inputs must be nonnegative (log_k positive)")


def _standardize(e: np.ndarray, s: float) -> np.ndarray:
    g1 = gamma_fn(s + 1)
    return (e**s - g1) / math.sqrt(gamma_fn(2 * s + 1) - g1**2)


def sample_F(s: float, rng_stream: RngStream, size=None):
    """Standardized power of an Exp(1) draw."""
    if not s >= 1:
        raise ValueError("s must be >= 1")
    return _standardize(rng_stream.exponential(size), s)


def sample_L(spec: LimitLawSpec, rng_stream: RngStream, size: int = 1) -> np.ndarray:
    """``size`` independent draws of the truncated series.

    Column j of the underlying draw matrix feeds summand j, so summands are
    independent; one stream supplies all of them.
    """
    coef = spec.coefficients()
    out = np.empty(size)
    chunk = max(1, 2_000_000 // spec.j_max)
    for start in range(0, size, chunk):
        m = min(chunk, size - start)
        f = sample_F(spec.s, rng_stream, (m, spec.j_max))
        out[start : start + m] = f @ coef
    return out


def variance_truncated_L(spec: LimitLawSpec) -> float:
    return eval_sigma_n2(EstimatorParams(spec.weight, spec.s, spec.j_max))


def monte_carlo_quantiles(spec: LimitLawSpec, probs, N: int, seed: int) -> np.ndarray:
    if N < 1000:
        raise ValueError("N must be >= 1000")
    probs = np.asarray(probs, dtype=float)
    if np.any((probs <= 0) | (probs >= 1)):
        raise ValueError("probabilities must lie in (0, 1)")
    draws = sample_L(spec, derive_stream(seed, 0), N)
    return np.quantile(draws, probs)


def _perturbation_terms(kind: str, inputs: ConditionInputs) -> tuple:
    p, b = inputs.p_n_lambda, inputs.b_n_lambda
    if kind == "frechet":
        return p, b, inputs.gamma + b
    if kind == "gumbel":
        m = max(p, b * inputs.log_k)
        return p, m, 1.0 + m
    raise ValueError(f"kind must be 'frechet' or 'gumbel', got {kind!r}")


def condition_sum(
    kind: str,
    weight: WeightFunction,
    s: int,
    k: int,
    inputs: ConditionInputs,
    normalizer: str = "none",
) -> float:
    """sum_{j<=k} f(j) I_n(., j, s), optionally divided by a_n or sigma_n.

    I_n(., j, s) = s * J(p, b'/j, c'/j, s - 1), with (b', c') = (b_n, gamma + b_n)
    for ``kind="frechet"`` and (m, 1 + m), m = max(p_n, b_n log k), for
    ``kind="gumbel"``. The result is a diagnostic, not a test.
    """
    if isinstance(s, bool) or int(s) != s or s < 1:
        raise ValueError("condition_sum needs an integer s >= 1 (closed form only)")
    s = int(s)
    p, bb, cc = _perturbation_terms(kind, inputs)
    f = weight.values(k)
    terms = [f[j - 1] * s * closed_J(p, bb / j, cc / j, s - 1) for j in range(1, k + 1)]
    total = math.fsum(terms)
    if normalizer == "none":
        return total
    params = EstimatorParams(weight, s, k)
    if normalizer == "a_n":
        return total / eval_a_n(params)
    if normalizer == "sigma_n":
        return total / eval_sigma_n(params)
    raise ValueError(f"normalizer must be 'a_n', 'sigma_n' or 'none', got {normalizer!r}")


def condition_sum_smooth(kind: str, weight: WeightFunction, s: int, k: int, inputs: ConditionInputs) -> float:
    """The p = 0 simplification: s * s! * b (gamma + b)^(s-1) * sum f(j) j^-s.

    For ``kind="gumbel"`` b is replaced by b_n log k and gamma by 1.
    """
    s = int(s)
    if kind == "frechet":
        b, g = inputs.b_n_lambda, inputs.gamma
    elif kind == "gumbel":
        b, g = inputs.b_n_lambda * inputs.log_k, 1.0
    else:
        raise ValueError(f"kind must be 'frechet' or 'gumbel', got {kind!r}")
    j = np.arange(1, k + 1, dtype=float)
    weighted = math.fsum((weight.values(k) * j**-s).tolist())
    return s * math.factorial(s) * b * (g + b) ** (s - 1) * weighted
