"""Command-line front end.

Subcommands: estimate, simulate, varprofile, limitlaw-quantiles, selftest.
Every option can also come from a flat ``key=value`` file given with
``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import selftest
from .estimators import EstimatorSpec, confidence_interval, estimate_curve
from .limitlaw import LimitLawSpec, monte_carlo_quantiles, variance_truncated_L
from .models import GENERATOR_ID, ModelSpec
from .report import emit_report, fmt, ingest_csv
from .simharness import AGGREGATIONS, StabilityConfig, run_experiment
from .varopt import argmax_tau
from .weights import WeightFunction

log = logging.getLogger("doublehill")

SEED_ENV = "DOUBLEHILL_SEED"
DEFAULT_ESTIMATORS = "hill,dekkers,dh:1,odh:1"

# fallback values applied after flags and config file are merged
DEFAULTS = {
    "estimate": {"column": "0", "estimator": "hill", "level": 0.95},
    "simulate": {
        "model": "I", "beta": 1.0, "n": 1000, "kmin": 105, "kmax": 375, "ksize": 100,
        "kstab": 5, "B": 1000, "estimators": DEFAULT_ESTIMATORS, "aggregation": "mean",
        "workers": 1, "format": "csv", "out": "report.csv", "plot": False,
    },
    "varprofile": {"gamma": 1.0, "step": 0.01, "plot": False},
    "limitlaw-quantiles": {
        "weight": "constant", "jmax": 10_000, "N": 100_000,
        "probs": "0.01,0.05,0.25,0.5,0.75,0.95,0.99",
    },
    "selftest": {},
}
REQUIRED = {
    "estimate": ("input", "k"),
    "simulate": ("gamma",),
    "varprofile": ("s", "k"),
    "limitlaw-quantiles": ("s",),
    "selftest": (),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["options"][name]
        except KeyError:
            raise AttributeError(name) from None


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _pos_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="doublehill", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key=value file")
        sp.add_argument("--seed", type=_seed, default=None)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("estimate", help="estimate gamma from a CSV column")
    common(sp)
    sp.add_argument("--input")
    sp.add_argument("--column", help="0-based index or header name")
    sp.add_argument("--k", type=_pos_int)
    sp.add_argument("--estimator", "--estimators", dest="estimator")
    sp.add_argument("--level", type=float)
    sp.add_argument("--hill-plot", dest="hill_plot", help="CSV of gamma_hat(k); PNG drawn alongside")
    sp.add_argument("--kmax-plot", dest="kmax_plot", type=_pos_int)

    sp = sub.add_parser("simulate", help="run the k-grid stability experiment")
    common(sp)
    sp.add_argument("--model", help="comma list of I, II, III")
    sp.add_argument("--gamma", type=_pos_float)
    sp.add_argument("--beta", type=_pos_float)
    sp.add_argument("--n", type=_pos_int)
    sp.add_argument("--kmin", type=_pos_int)
    sp.add_argument("--kmax", type=_pos_int)
    sp.add_argument("--ksize", type=_pos_int)
    sp.add_argument("--kstab", type=_nonneg_int)
    sp.add_argument("--B", type=_pos_int)
    sp.add_argument("--estimators")
    sp.add_argument("--aggregation", choices=AGGREGATIONS)
    sp.add_argument("--workers", type=_pos_int)
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--plot", type=_bool, nargs="?", const=True, help="render RMSE curves to PNG")

    sp = sub.add_parser("varprofile", help="V_n(tau, s) over a tau grid")
    common(sp)
    sp.add_argument("--s", type=float)
    sp.add_argument("--k", type=_pos_int)
    sp.add_argument("--gamma", type=_pos_float)
    sp.add_argument("--lo", type=float)
    sp.add_argument("--hi", type=float)
    sp.add_argument("--step", type=_pos_float)
    sp.add_argument("--plot", type=_bool, nargs="?", const=True)

    sp = sub.add_parser("limitlaw-quantiles", help="Monte-Carlo quantiles of the series limit law")
    common(sp)
    sp.add_argument("--weight", help="constant or power:<tau>")
    sp.add_argument("--s", type=float)
    sp.add_argument("--jmax", type=_pos_int)
    sp.add_argument("--N", type=_pos_int)
    sp.add_argument("--probs")

    sp = sub.add_parser("selftest", help="analytic oracle checks")
    sp.add_argument("--config")
    return p


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (x.strip() for x in line.split("=", 1))
            out[key.replace("-", "_")] = (lineno, value)
    return out


def parse_config(argv, config_path: Optional[str] = None) -> RunConfig:
    """Parse argv (plus an optional config file) into a validated RunConfig.

    Raises UsageError on any invalid or missing value.
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("invalid command line") from exc
    opts = vars(ns)
    name = opts.pop("subcommand")
    opts.pop("verbose", None)
    path = config_path or opts.pop("config", None)
    opts.pop("config", None)
    if path:
        sp = _subparser(parser, name)
        types = {a.dest: a.type for a in sp._actions if a.dest not in ("help", "config")}
        try:
            entries = read_config_file(path)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        for key, (lineno, value) in entries.items():
            if key not in types:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r} for {name}")
            if opts.get(key) is not None:
                continue
            conv = types[key] or str
            try:
                opts[key] = conv(value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    for key, value in DEFAULTS[name].items():
        if opts.get(key) is None:
            opts[key] = value
    if "seed" in opts and opts["seed"] is None:
        env = os.environ.get(SEED_ENV)
        try:
            opts["seed"] = _seed(env) if env else 0
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"{SEED_ENV} is not a valid seed: {env!r}") from None
    missing = [f"--{k}" for k in REQUIRED[name] if opts.get(k) is None]
    if missing:
        raise UsageError(f"{name}: missing required option(s) {', '.join(missing)}")
    cfg = RunConfig(name, opts)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    o = cfg.options
    try:
        if cfg.subcommand == "simulate":
            o["estimator_specs"] = [EstimatorSpec.parse(t) for t in o["estimators"].split(",") if t.strip()]
            o["models"] = [ModelSpec(f.strip(), o["gamma"], o["beta"]) for f in o["model"].split(",") if f.strip()]
            o["stability"] = StabilityConfig(
                n=o["n"], kmin=o["kmin"], kmax=o["kmax"], ksize=o["ksize"], kstab=o["kstab"],
                B=o["B"], root_seed=o["seed"], aggregation=o["aggregation"],
            )
            if not o["estimator_specs"] or not o["models"]:
                raise ValueError("need at least one estimator and one model")
        elif cfg.subcommand == "estimate":
            o["estimator_specs"] = [EstimatorSpec.parse(t) for t in o["estimator"].split(",") if t.strip()]
            if not 0 < o["level"] < 1:
                raise ValueError("--level must lie in (0, 1)")
        elif cfg.subcommand == "varprofile":
            if o["s"] < 1:
                raise ValueError("--s must be >= 1")
        elif cfg.subcommand == "limitlaw-quantiles":
            if o["s"] < 1:
                raise ValueError("--s must be >= 1")
            o["prob_list"] = [float(x) for x in o["probs"].split(",")]
            if any(not 0 < q < 1 for q in o["prob_list"]):
                raise ValueError("--probs must lie in (0, 1)")
            if o["N"] < 1000:
                raise ValueError("--N must be >= 1000")
            _parse_weight(o["weight"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_weight(text: str):
    t = text.strip().lower()
    if t == "constant":
        return WeightFunction.constant()
    if t.startswith("power:"):
        return WeightFunction.power(float(t.split(":", 1)[1]))
    raise ValueError(f"weight must be 'constant' or 'power:<tau>', got {text!r}")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_estimate(cfg: RunConfig) -> int:
    data = ingest_csv(cfg.input, cfg.column)
    if data.dropped:
        log.warning("dropped %d non-finite or non-numeric entries", data.dropped)
    sample = data.sample
    fh, close = _open_out(cfg.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["estimator", "k", "gamma_hat", "statistic", "normalizer", "asymptotic_sd",
                "ci_lo", "ci_hi", "regime", "ties", "n", "dropped"])
    for spec in cfg.estimator_specs:
        res = spec.estimate(sample, cfg.k)
        lo = hi = None
        if res.asymptotic_sd is not None:
            lo, hi = confidence_interval(res, cfg.level)
        region = res.regime.region if res.regime else ""
        w.writerow([spec.label, res.k_used, fmt(res.gamma_hat), fmt(res.statistic_value),
                    fmt(res.normalizer), fmt(res.asymptotic_sd), fmt(lo), fmt(hi), region,
                    res.ties, sample.n, data.dropped])
    if close:
        fh.close()
    if cfg.hill_plot:
        kmax = min(cfg.kmax_plot or sample.n - 1, sample.n - 1)
        curves = [estimate_curve(spec, sample, kmax) for spec in cfg.estimator_specs]
        labels = [s.label for s in cfg.estimator_specs]
        with open(cfg.hill_plot, "w", encoding="utf-8", newline="") as ph:
            pw = csv.writer(ph, lineterminator="\n")
            pw.writerow(["k"] + [f"gamma_{lab}" for lab in labels])
            for i in range(kmax):
                pw.writerow([i + 1] + [fmt(c[i]) for c in curves])
        from .plotting import plot_hill

        plot_hill(np.arange(1, kmax + 1), curves, os.path.splitext(cfg.hill_plot)[0] + ".png", labels)
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    report = run_experiment(cfg.stability, cfg.models, cfg.estimator_specs, workers=cfg.workers)
    report.metadata.update(
        {"aggregation": cfg.aggregation, "seed": cfg.seed, "generator": GENERATOR_ID,
         "models": [m.label for m in cfg.models]}
    )
    written = emit_report(report, cfg.format, cfg.out)
    if cfg.plot:
        from .plotting import plot_rmse_curves

        written.append(plot_rmse_curves(report, os.path.splitext(cfg.out)[0] + "_curves.png"))
    failures = sum(c.failures for c in report.cells)
    broken = [c for c in report.cells if c.error]
    for c in broken:
        log.warning("cell %s/%s failed: %s", c.estimator, c.family, c.error)
    print(f"wrote {', '.join(written)}; replication failures: {failures}", file=sys.stderr)
    return 0


def cmd_varprofile(cfg: RunConfig) -> int:
    grid = (
        cfg.lo if cfg.lo is not None else cfg.s - 0.5,
        cfg.hi if cfg.hi is not None else cfg.s + 3.0,
        cfg.step,
    )
    prof = argmax_tau(cfg.s, cfg.k, cfg.gamma, grid)
    fh, close = _open_out(cfg.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["tau", "v_n"])
    for t, v in zip(prof.tau_grid, prof.v_values):
        w.writerow([fmt(t), fmt(v)])
    w.writerow(["argmax_tau", fmt(prof.argmax_tau)])
    w.writerow(["v_max", fmt(prof.v_max)])
    if close:
        fh.close()
    if cfg.plot and cfg.out not in (None, "-"):
        from .plotting import plot_variance_profile

        plot_variance_profile(prof, os.path.splitext(cfg.out)[0] + ".png")
    return 0


def cmd_limitlaw(cfg: RunConfig) -> int:
    spec = LimitLawSpec(_parse_weight(cfg.weight), cfg.s, cfg.jmax)
    q = monte_carlo_quantiles(spec, cfg.prob_list, cfg.N, cfg.seed)
    fh, close = _open_out(cfg.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["prob", "quantile"])
    for p, v in zip(cfg.prob_list, q):
        w.writerow([fmt(p), fmt(v)])
    w.writerow(["truncated_variance", fmt(variance_truncated_L(spec))])
    w.writerow(["tail_variance_bound", fmt(spec.tail_variance_bound())])
    if close:
        fh.close()
    return 0


def cmd_selftest(cfg: RunConfig) -> int:
    return 0 if selftest.run() else 1


COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "varprofile": cmd_varprofile,
    "limitlaw-quantiles": cmd_limitlaw,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"doublehill: error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except (OSError, ValueError) as exc:
        print(f"doublehill: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
