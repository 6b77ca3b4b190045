"""Fast analytic self-checks run by ``doublehill selftest``."""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import estimators as est
from .models import ModelSpec, derive_stream, generate_sample
from .special import closed_I, closed_J, quad_I, quad_J
from .weights import EstimatorParams, eval_a_n, eval_sigma_n


def _closed_vs_quad():
    worst = 0.0
    for s in range(7):
        for a, b in itertools.product((0, 0.5, 1, 2), repeat=2):
            c = closed_I(a, b, s)
            worst = max(worst, abs(c - quad_I(a, b, s)) / max(1.0, abs(c)))
    for s in range(6):
        for a, b, c3 in itertools.product((0, 0.5, 1), repeat=3):
            c = closed_J(a, b, c3, s)
            worst = max(worst, abs(c - quad_J(a, b, c3, s)) / max(1.0, abs(c)))
    return worst <= 1e-8, f"max relative gap {worst:.2e}"


def _hand_sample():
    sample = est.SortedSample(np.exp([1.0, 2.0, 3.0, 4.0]))
    ok = est.hill(sample, 3).gamma_hat == 2.0
    ok &= est.s_statistic(EstimatorParams(est.WeightFunction.constant(), 2.0, 3), sample) == 14.0
    return ok, "hill=2, S_n(1,2)=14 on (e, e^2, e^3, e^4)"


def _identities():
    model = ModelSpec("I", 1.0)
    ok = True
    for r in range(20):
        sample = generate_sample(model, 500, derive_stream(7, r))
        h = est.hill(sample, 100).gamma_hat
        ok &= h == est.marginal_estimate(EstimatorParams.diop_lo(1, 1, 100), sample).gamma_hat
        ok &= h == est.double_hill_optimal(1.0, sample, 100).gamma_hat
    return ok, "hill == marginal(1,1) == odh:1 on 20 samples"


def _normalized_spacing():
    # j * Delta_j = c for every j: the s = 1 margins return c exactly
    c, k = 0.37, 50
    logs = np.concatenate([[0.0], np.cumsum(c / np.arange(k, 0, -1.0))])
    sample = est.SortedSample(np.exp(logs))
    vals = [est.hill(sample, k).gamma_hat, est.double_hill_boundary(1.0, sample, k).gamma_hat]
    gap = max(abs(v - c) / c for v in vals)
    return gap <= 1e-12, f"max relative gap {gap:.1e}"


def _normalizers():
    p = EstimatorParams.diop_lo(2.0, 2.0, 100)
    ok = math.isclose(eval_a_n(p), 200.0, rel_tol=1e-12) and math.isclose(eval_sigma_n(p), 10.0, rel_tol=1e-12)
    return ok, "a_n(2,2,100)=200, sigma_n=10"


CHECKS = [
    ("closed forms vs quadrature", _closed_vs_quad),
    ("hand-computed sample", _hand_sample),
    ("estimator identities", _identities),
    ("normalized log-spacings", _normalized_spacing),
    ("power-weight normalizers", _normalizers),
]


def run(out=print) -> bool:
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:
            ok, detail = False, repr(exc)
        all_ok &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
