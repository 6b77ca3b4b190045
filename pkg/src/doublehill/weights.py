"""Weight functions, the normalizing sums a_n, sigma_n, B_n, and the
regime classification of the power-weight family f(j) = j**tau.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .special import gamma_fn

BOUNDARY_RTOL = 1e-12


class UnsupportedRegimeError(ValueError):
    """Raised when an operation is undefined for the (tau, s) regime."""


@dataclass(frozen=True)
class WeightFunction:
    """Positive weight f on 1, 2, ...

    Use :meth:`power`, :meth:`constant` or :meth:`custom` to build one.
    """

    kind: str
    tau: Optional[float] = None
    table: Optional[tuple] = field(default=None, repr=False)

    @classmethod
    def power(cls, tau: float) -> "WeightFunction":
        if tau < 0:
            raise ValueError(f"power weight needs tau >= 0, got {tau}")
        return cls("power", tau=float(tau))

    @classmethod
    def constant(cls) -> "WeightFunction":
        return cls("constant", tau=0.0)

    @classmethod
    def custom(cls, values: Sequence[float]) -> "WeightFunction":
        values = tuple(float(v) for v in values)
        if not values:
            raise ValueError("custom weight table is empty")
        if any(not v > 0 or not math.isfinite(v) for v in values):
            raise ValueError("custom weights must be finite and positive")
        return cls("custom", table=values)

    @property
    def k_max(self) -> Optional[int]:
        return None if self.table is None else len(self.table)

    def values(self, k: int) -> np.ndarray:
        """f(1), ..., f(k) as a float array."""
        if self.kind == "custom":
            if k > len(self.table):
                raise ValueError(f"custom weight table covers j <= {len(self.table)}, asked for k={k}")
            return np.asarray(self.table[:k], dtype=float)
        if self.kind == "constant":
            return np.ones(k)
        return np.arange(1, k + 1, dtype=float) ** self.tau

    def __call__(self, j: int) -> float:
        if j < 1:
            raise ValueError("weights are defined on j >= 1")
        if self.kind == "custom":
            return self.values(j)[-1]
        if self.kind == "constant":
            return 1.0
        return float(j) ** self.tau


@dataclass(frozen=True)
class EstimatorParams:
    weight: WeightFunction
    s: float
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.s >= 1:
            raise ValueError(f"s must be >= 1, got {self.s}")

    @classmethod
    def diop_lo(cls, tau: float, s: float, k: int) -> "EstimatorParams":
        return cls(WeightFunction.power(tau), s, k)


@dataclass(frozen=True)
class RegimeClass:
    region: str
    k1_holds: bool
    k2_holds: bool
    a_n_behavior: str
    sigma_n_behavior: str
    near_boundary: bool = False

    @property
    def gaussian(self) -> bool:
        return self.region in ("III", "IV")


def _scaled_terms(params: EstimatorParams, power: float) -> np.ndarray:
    j = np.arange(1, params.k + 1, dtype=float)
    return params.weight.values(params.k) ** power * j ** (-power * params.s)


def _fsum_ascending(terms: np.ndarray) -> float:
    return math.fsum(terms.tolist())


def eval_a_n(params: EstimatorParams) -> float:
    """Gamma(s+1) * sum_{j<=k} f(j) j^-s."""
    return gamma_fn(params.s + 1) * _fsum_ascending(_scaled_terms(params, 1))


def eval_sigma_n2(params: EstimatorParams) -> float:
    return _fsum_ascending(_scaled_terms(params, 2))


def eval_sigma_n(params: EstimatorParams) -> float:
    return math.sqrt(eval_sigma_n2(params))


def eval_B_n(params: EstimatorParams) -> float:
    return float(_scaled_terms(params, 1).max()) / eval_sigma_n(params)


def classify_regime(tau: float, s: float) -> RegimeClass:
    """Regions I-IV of the power-weight family."""
    if tau < 0 or s < 1:
        raise ValueError(f"classify_regime needs tau >= 0 and s >= 1, got ({tau}, {s})")
    gap = tau - (s - 0.5)
    near = gap != 0 and abs(gap) <= BOUNDARY_RTOL * max(1.0, abs(s))
    if gap == 0 or near:
        if near:
            warnings.warn(f"tau={tau!r} within tolerance of s-1/2; treated as boundary region III")
        return RegimeClass("III", False, True, "divergent(k^1/2)", "log_rate", near_boundary=near)
    if gap > 0:
        return RegimeClass("IV", False, True, f"divergent(k^{tau - s + 1:g})", "power_rate")
    if tau >= s - 1:
        rate = "log k" if tau == s - 1 else f"k^{tau - s + 1:g}"
        return RegimeClass("II", True, False, f"divergent({rate})", "bounded")
    return RegimeClass("I", True, False, "bounded", "bounded")


@dataclass(frozen=True)
class Normalizers:
    """Asymptotic equivalents of a_n and sigma_n; ``None`` marks a bounded limit."""

    a_n_equiv: Optional[float]
    sigma_n_equiv: Optional[float]
    a_n_limit: Optional[float] = None
    sigma_n_limit: Optional[float] = None


def asymptotic_normalizers(tau: float, s: float, k: int) -> Normalizers:
    """Leading-order equivalents of a_n(tau, s) and sigma_n(tau, s) at k.

    Gamma(s+1) replaces s! throughout so real s works.
    """
    region = classify_regime(tau, s).region
    g = gamma_fn(s + 1)
    e = tau - s
    if region == "IV":
        return Normalizers(g * k ** (e + 1) / (e + 1), k ** (e + 0.5) / math.sqrt(2 * e + 1))
    if region == "III":
        return Normalizers(2 * g * math.sqrt(k), math.sqrt(math.log(k)))
    var = k1_constant_A(WeightFunction.power(tau), s, "variance")
    sigma_lim = math.sqrt(var) if var is not None else None
    if region == "II":
        a_eq = g * math.log(k) if e == -1 else g * k ** (e + 1) / (e + 1)
        return Normalizers(a_eq, None, sigma_n_limit=sigma_lim)
    cen = k1_constant_A(WeightFunction.power(tau), s, "centering")
    return Normalizers(None, None, a_n_limit=g * cen, sigma_n_limit=sigma_lim)


def _zeta_series(p: float, head: int = 1000) -> float:
    """sum_{j>=1} j^-p for p > 1: exact head plus Euler-Maclaurin tail."""
    j = np.arange(1, head, dtype=float)
    partial = math.fsum((j**-p).tolist())
    n = float(head)
    # tail sum_{j>=n} j^-p
    tail = (
        n ** (1 - p) / (p - 1)
        + 0.5 * n**-p
        + p * n ** (-p - 1) / 12
        - p * (p + 1) * (p + 2) * n ** (-p - 3) / 720
        + p * (p + 1) * (p + 2) * (p + 3) * (p + 4) * n ** (-p - 5) / 30240
    )
    return partial + tail


def k1_constant_A(weight: WeightFunction, s: float, which: str = "variance") -> Optional[float]:
    """Infinite series constant for power weights, or ``None`` when it diverges.

    ``which="variance"`` gives sum f(j)^2 j^-2s (finite iff 2(s - tau) > 1);
    ``which="centering"`` gives sum f(j) j^-s (finite iff s - tau > 1).
    """
    if weight.kind == "custom":
        raise ValueError("series constants need a power or constant weight")
    tau = weight.tau or 0.0
    if which == "variance":
        p = 2 * (s - tau)
    elif which == "centering":
        p = s - tau
    else:
        raise ValueError(f"unknown constant {which!r}")
    if p <= 1:
        return None
    return _zeta_series(p)


def zeta_tail_bound(p: float, start: int) -> float:
    """Upper bound on sum_{j>start} j^-p for p > 1 (integral bracket as k -> inf)."""
    if p <= 1:
        return math.inf
    m = start + 1
    return m ** (1 - p) / (p - 1) + m**-p
