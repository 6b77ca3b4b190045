"""Heavy-tailed data models and seeded random streams.

Three families, all given through the upper-tail quantile
Q(u) = F^{-1}(1 - u) (small u is the upper tail):

    I    Q(u) = u^-gamma
    II   Q(u) = u^-gamma (1 - u^beta)
    III  Q(u) = u^-gamma (1 - (-1/log u)^beta)

Family III is only positive for u < 1/e, whatever beta is, so it is sampled
conditionally on that region (see :attr:`ModelSpec.u_max`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .estimators import SortedSample

GENERATOR_ID = "numpy.PCG64 seeded by SeedSequence(root_seed, spawn_key=(stream_id,))"
_TWO53 = float(2**53)


class RngStream:
    """Single-owner random stream keyed by (root_seed, stream_id)."""

    def __init__(self, root_seed: int, stream_id: int):
        if not 0 <= root_seed < 2**64 or not 0 <= stream_id < 2**64:
            raise ValueError("root_seed and stream_id must be 64-bit unsigned integers")
        self.root_seed = int(root_seed)
        self.stream_id = int(stream_id)
        seq = np.random.SeedSequence(entropy=self.root_seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RngStream(root_seed={self.root_seed}, stream_id={self.stream_id})"

    def open_uniform(self, size=None):
        """Uniforms strictly inside (0, 1): midpoints of the 2^-53 grid."""
        r = self._gen.random(size)
        return (np.floor(r * _TWO53) + 0.5) / _TWO53

    def exponential(self, size=None):
        """Exp(1) by inverse transform -log(1 - U)."""
        return -np.log1p(-self.open_uniform(size))

    def raw_uint64(self, size):
        return self._gen.integers(0, 2**64, size=size, dtype=np.uint64, endpoint=False)


def derive_stream(root_seed: int, stream_id: int) -> RngStream:
    return RngStream(root_seed, stream_id)


def replication_stream_id(experiment: int, replication: int) -> int:
    """stream_id = experiment * 2^32 + replication."""
    if not 0 <= experiment < 2**32 or not 0 <= replication < 2**32:
        raise ValueError("experiment and replication ids must fit in 32 bits")
    return (experiment << 32) + replication


@dataclass(frozen=True)
class ModelSpec:
    family: str
    gamma: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        fam = str(self.family).upper()
        if fam not in ("I", "II", "III"):
            raise ValueError(f"model family must be I, II or III, got {self.family!r}")
        object.__setattr__(self, "family", fam)
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if fam != "I" and not self.beta > 0:
            raise ValueError(f"beta must be positive for family {fam}, got {self.beta}")
        self._validate_grid()

    @property
    def u_max(self) -> float:
        """Upper end of the u-range where the quantile is positive."""
        return math.exp(-1.0) if self.family == "III" else 1.0

    @property
    def label(self) -> str:
        if self.family == "I":
            return f"I(gamma={self.gamma:g})"
        return f"{self.family}(gamma={self.gamma:g},beta={self.beta:g})"

    def _validate_grid(self):
        u = np.geomspace(1e-12, self.u_max, 10_000)[:-1]
        q = _quantile_array(self, u)
        if not np.all(q > 0):
            raise ValueError(f"{self.label}: quantile not positive on (0, {self.u_max:g})")
        if not np.all(np.diff(q) < 0):
            raise ValueError(f"{self.label}: quantile not strictly decreasing on the check grid")


def _quantile_array(model: ModelSpec, u: np.ndarray) -> np.ndarray:
    base = u ** (-model.gamma)
    if model.family == "I":
        return base
    if model.family == "II":
        return base * (1.0 - u**model.beta)
    # (-1/log u)^beta as exp(-beta * log(-log u))
    return base * (1.0 - np.exp(-model.beta * np.log(-np.log(u))))


def quantile(model: ModelSpec, u: float) -> float:
    """F^{-1}(1 - u) for u in (0, 1)."""
    if not 0 < u < 1:
        raise ValueError(f"u must lie in (0, 1), got {u!r}")
    return float(_quantile_array(model, np.asarray(u, dtype=float)))


def generate_sample(model: ModelSpec, n: int, stream: RngStream) -> SortedSample:
    """n i.i.d. draws by inverse transform, sorted ascending."""
    if n < 2:
        raise ValueError("n must be >= 2")
    u = stream.open_uniform(n) * model.u_max
    return SortedSample(np.sort(_quantile_array(model, u)))


def malmquist_spacings(uniform_order_stats, k: int) -> np.ndarray:
    """j * log(U_{j+1,n} / U_{j,n}) for j = 1..k; i.i.d. Exp(1) in law."""
    u = np.asarray(uniform_order_stats, dtype=float)
    if k + 1 > u.size:
        raise ValueError(f"need at least k+1={k + 1} order statistics, got {u.size}")
    u = u[: k + 1]
    if np.any(u <= 0) or np.any(u >= 1):
        raise ValueError("uniform order statistics must lie in (0, 1)")
    steps = np.diff(u)
    if np.any(steps < 0):
        raise ValueError("uniform order statistics must be ascending")
    if np.any(steps == 0):
        warnings.warn(f"{int(np.count_nonzero(steps == 0))} tied uniforms give zero spacings")
    j = np.arange(1, k + 1, dtype=float)
    return j * np.log(u[1:] / u[:-1])
