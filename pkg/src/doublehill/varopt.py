"""Asymptotic precision V_n(tau, s) of the power-weight estimators and its
maximization over tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import gamma_fn
from .weights import EstimatorParams, UnsupportedRegimeError, eval_a_n, eval_sigma_n

TAU_FLOOR_EPS = 1e-9
TAU_SPAN = 10.0
_INVPHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class VarianceProfile:
    s: float
    k: int
    gamma: float
    tau_grid: np.ndarray
    v_values: np.ndarray
    argmax_tau: float
    v_max: float


def _q(s: float, gamma: float) -> float:
    return s / (gamma * math.sqrt(gamma_fn(2 * s + 1) - gamma_fn(s + 1) ** 2))


def v_n(tau: float, s: float, k: int, gamma: float) -> float:
    """(a_n / sigma_n) * s / (gamma sqrt(Gamma(2s+1) - Gamma(s+1)^2)), exact sums."""
    if tau < s - 0.5:
        raise UnsupportedRegimeError(f"tau={tau} is below s-1/2={s - 0.5}: no Gaussian limit")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    params = EstimatorParams.diop_lo(tau, s, k)
    return eval_a_n(params) / eval_sigma_n(params) * _q(s, gamma)


def v_n_closed_optimal(tau: float, k: int, gamma: float) -> float:
    """Closed form at s = tau: Gamma(tau+1) sqrt(k) * tau / (gamma sqrt(...))."""
    return gamma_fn(tau + 1) * math.sqrt(k) * _q(tau, gamma)


def v_n_closed_boundary(s: float, k: int, gamma: float) -> float:
    """Closed form at tau = s - 1/2: 2 Gamma(s+1) sqrt(k / log k) * s / (gamma sqrt(...))."""
    return 2 * gamma_fn(s + 1) * math.sqrt(k / math.log(k)) * _q(s, gamma)


def region_ii_variance(tau: float, s: float, gamma: float) -> float:
    """gamma (Gamma(2s+1) - Gamma(s+1)^2) / (s (tau - s + 1)), reported as printed."""
    return gamma * (gamma_fn(2 * s + 1) - gamma_fn(s + 1) ** 2) / (s * (tau - s + 1))


def cauchy_schwarz_ratio(tau: float, s: float, k: int) -> float:
    """sum j^(tau-s) / sqrt(k sum j^(2(tau-s))); equals 1 only when tau = s."""
    j = np.arange(1, k + 1, dtype=float)
    t = j ** (tau - s)
    return math.fsum(t.tolist()) / math.sqrt(k * math.fsum((t * t).tolist()))


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2


def argmax_tau(s: float, k: int, gamma: float, grid=None, tol: float = 1e-6) -> VarianceProfile:
    """Grid search for the tau maximizing v_n, refined by golden section.

    ``grid`` is (lo, hi, step); it is clipped to [s - 1/2 + 1e-9, s + 10].
    """
    lo, hi, step = grid if grid is not None else (s - 0.5, s + 3.0, 0.01)
    if not step > 0:
        raise ValueError("grid step must be positive")
    lo = max(lo, s - 0.5 + TAU_FLOOR_EPS)
    hi = min(hi, s + TAU_SPAN)
    if not lo < hi:
        raise ValueError("empty tau grid after clipping")
    taus = np.arange(lo, hi + step / 2, step)
    taus = taus[taus <= hi]
    vals = np.array([v_n(t, s, k, gamma) for t in taus])
    i = int(np.argmax(vals))
    a = taus[max(i - 1, 0)]
    b = taus[min(i + 1, taus.size - 1)]
    best = _golden_max(lambda t: v_n(t, s, k, gamma), a, b, tol) if b > a else float(taus[i])
    v_best = v_n(best, s, k, gamma)
    if vals[i] > v_best:
        best, v_best = float(taus[i]), float(vals[i])
    return VarianceProfile(s, k, gamma, taus, vals, float(best), float(v_best))
