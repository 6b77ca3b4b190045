"""Stability protocol: windowed RMSE of an estimator over a grid of k values.

For grid point j the window is k in [kv(j) - kstab, kv(j) + kstab]. Three ways
of folding B replications into one number per grid point are offered:

``mean`` (default)
    average gamma_hat(k) over replications first, then take the windowed
    RMSE of that averaged curve against gamma.
``pooled``
    RMSE of all B * (2 kstab + 1) squared errors together.
``per-replication``
    windowed RMSE inside each replication, then the mean over replications.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .estimators import EstimatorSpec, estimate_curve
from .models import GENERATOR_ID, ModelSpec, derive_stream, generate_sample, replication_stream_id

AGGREGATIONS = ("mean", "pooled", "per-replication")


@dataclass(frozen=True)
class StabilityConfig:
    n: int = 1000
    kmin: int = 105
    kmax: int = 375
    ksize: int = 100
    kstab: int = 5
    B: int = 1000
    root_seed: int = 0
    aggregation: str = "mean"

    def __post_init__(self):
        if self.ksize < 1 or self.B < 1 or self.kstab < 0:
            raise ValueError("ksize and B must be >= 1, kstab >= 0")
        if not self.kmin < self.kmax:
            raise ValueError(f"kmin ({self.kmin}) must be < kmax ({self.kmax})")
        if self.kmin - self.kstab < 1:
            raise ValueError("kmin - kstab must be >= 1")
        if self.kmax + self.kstab + 1 > self.n:
            raise ValueError("kmax + kstab + 1 must be <= n")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")
        if not 0 <= self.root_seed < 2**64:
            raise ValueError("root_seed must be a 64-bit unsigned integer")


def k_grid(config: StabilityConfig) -> np.ndarray:
    """kv(j) = round(kmin + j (kmax - kmin) / ksize), j = 1..ksize."""
    j = np.arange(1, config.ksize + 1)
    # exact rational arithmetic, half-up rounding
    num = config.kmin * config.ksize + j * (config.kmax - config.kmin)
    return (2 * num + config.ksize) // (2 * config.ksize)


def summarize(curve: Sequence[float]) -> dict:
    curve = np.asarray(curve, dtype=float)
    if curve.size == 0:
        raise ValueError("cannot summarize an empty curve")
    lo, hi = float(curve.min()), float(curve.max())
    return {"min": lo, "max": hi, "diff": hi - lo, "mid": (lo + hi) / 2}


def cell_id(estimator: EstimatorSpec, model: ModelSpec) -> int:
    """Stable 32-bit id of an (estimator, model) cell.

    Estimators are keyed by their (tau, s) margin, so ``hill`` and ``odh:1``
    share replications.
    """
    margin = estimator.margin
    est_key = "dekkers" if margin is None else f"margin:{margin[0]!r}:{margin[1]!r}"
    key = f"{est_key}|{model.family}|{model.gamma!r}|{model.beta!r}"
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=4).digest(), "big")


def replication_curves(
    estimator: EstimatorSpec, model: ModelSpec, config: StabilityConfig, B: Optional[int] = None
) -> tuple:
    """gamma_hat(k), k = 1..kmax+kstab, for each replication; failed rows dropped.

    Returns (curves, failures).
    """
    B = config.B if B is None else B
    top_k = config.kmax + config.kstab
    lo = config.kmin - config.kstab
    cid = cell_id(estimator, model)
    rows, failures = [], 0
    for r in range(B):
        stream = derive_stream(config.root_seed, replication_stream_id(cid, r))
        sample = generate_sample(model, config.n, stream)
        curve = estimate_curve(estimator, sample, top_k)
        if not np.all(np.isfinite(curve[lo - 1 :])):
            failures += 1
            continue
        rows.append(curve)
    curves = np.array(rows) if rows else np.empty((0, top_k))
    return curves, failures


def rmse_curve(curves: np.ndarray, gamma: float, config: StabilityConfig) -> np.ndarray:
    kv = k_grid(config)
    if curves.shape[0] == 0:
        return np.full(kv.size, np.nan)
    w = 2 * config.kstab + 1
    out = np.empty(kv.size)
    if config.aggregation == "mean":
        err = curves.mean(axis=0) - gamma
        for i, k in enumerate(kv):
            seg = err[k - config.kstab - 1 : k + config.kstab]
            out[i] = math.sqrt(math.fsum((seg * seg).tolist()) / w)
    elif config.aggregation == "pooled":
        for i, k in enumerate(kv):
            seg = curves[:, k - config.kstab - 1 : k + config.kstab] - gamma
            out[i] = math.sqrt(math.fsum((seg * seg).ravel().tolist()) / seg.size)
    else:
        for i, k in enumerate(kv):
            seg = curves[:, k - config.kstab - 1 : k + config.kstab] - gamma
            per = np.sqrt((seg * seg).sum(axis=1) / w)
            out[i] = math.fsum(per.tolist()) / per.size
    return out


def rmse_at(estimator: EstimatorSpec, model: ModelSpec, config: StabilityConfig, j: int) -> float:
    """RMSE at grid index j (1-based)."""
    if not 1 <= j <= config.ksize:
        raise ValueError(f"grid index must be in 1..{config.ksize}")
    curves, _ = replication_curves(estimator, model, config)
    return float(rmse_curve(curves, model.gamma, config)[j - 1])


@dataclass
class CellResult:
    estimator: str
    model: str
    family: str
    gamma: float
    beta: float
    s: Optional[float]
    tau: Optional[float]
    rmse: List[float]
    min: float
    max: float
    diff: float
    mid: float
    failures: int
    replications_used: int
    mc_se: float = math.nan
    error: Optional[str] = None


@dataclass
class StabilityReport:
    config: StabilityConfig
    k_values: List[int]
    cells: List[CellResult]
    generator: str = GENERATOR_ID
    metadata: Dict[str, object] = field(default_factory=dict)

    def cell(self, estimator: str, family: str) -> CellResult:
        for c in self.cells:
            if c.estimator == estimator and c.family == family:
                return c
        raise KeyError((estimator, family))

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "generator": self.generator,
            "metadata": dict(self.metadata),
            "k_values": [int(k) for k in self.k_values],
            "cells": [asdict(c) for c in self.cells],
        }


def _mc_standard_error(curves: np.ndarray, gamma: float, config: StabilityConfig) -> float:
    """Rough Monte-Carlo standard error of the RMSE curve (max over the grid)."""
    if curves.shape[0] < 2:
        return math.nan
    kv = k_grid(config)
    sd = curves[:, kv - 1].std(axis=0, ddof=1)
    if config.aggregation == "mean":
        return float(sd.max() / math.sqrt(curves.shape[0]))
    err = curves[:, kv - 1] - gamma
    return float((err**2).std(axis=0, ddof=1).max() / math.sqrt(curves.shape[0]))


def run_cell(estimator: EstimatorSpec, model: ModelSpec, config: StabilityConfig) -> CellResult:
    s = estimator.margin[1] if estimator.margin else None
    tau = estimator.margin[0] if estimator.margin else None
    base = dict(
        estimator=estimator.label,
        model=model.label,
        family=model.family,
        gamma=model.gamma,
        beta=model.beta,
        s=s,
        tau=tau,
    )
    try:
        curves, failures = replication_curves(estimator, model, config)
    except Exception as exc:  # a broken cell must not sink the run
        nan = math.nan
        return CellResult(**base, rmse=[], min=nan, max=nan, diff=nan, mid=nan,
                          failures=config.B, replications_used=0, error=repr(exc))
    rmse = rmse_curve(curves, model.gamma, config)
    if curves.shape[0] == 0:
        nan = math.nan
        return CellResult(**base, rmse=rmse.tolist(), min=nan, max=nan, diff=nan, mid=nan,
                          failures=failures, replications_used=0, error="all replications failed")
    summary = summarize(rmse)
    return CellResult(
        **base,
        rmse=rmse.tolist(),
        failures=failures,
        replications_used=int(curves.shape[0]),
        mc_se=_mc_standard_error(curves, model.gamma, config),
        **summary,
    )


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(
    config: StabilityConfig,
    models: Sequence[ModelSpec],
    estimators: Sequence[EstimatorSpec],
    workers: int = 1,
) -> StabilityReport:
    """Every (estimator, model) cell; cell numbers do not depend on list order or workers."""
    jobs = [(e, m, config) for m in models for e in estimators]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell_args, jobs))
    else:
        cells = [run_cell(*job) for job in jobs]
    return StabilityReport(config=config, k_values=k_grid(config).tolist(), cells=cells)
