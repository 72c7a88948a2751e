"""Command-line front end.

    evocoef <subcommand> --config cfg.json [--out DIR] [--set key=value ...]

Subcommands: forward-heat, forward-wave, forward-general, recover,
experiment, converge, selftest.  Exit codes: 0 success, 1 internal error,
2 configuration or validation error, 3 hard failure of the recovery
hypotheses (``h2`` vanishes or changes sign).  Result files are written
only on exit 0.  ``EVOCOEF_THREADS`` caps BLAS/FFT thread pools (0 = auto).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import io
from .config import config_to_dict, levels_for, load_config
from .errors import ConfigError, HypothesisError, StabilityError
from .harness import (add_noise, convergence_study, error_metrics,
                      generate_traces, recover_from_traces, run_experiment,
                      truth_coefficient)

__all__ = ["main", "load_config"]

log = logging.getLogger("evocoef")

SUBCOMMANDS = ("forward-heat", "forward-wave", "forward-general", "recover",
               "experiment", "converge", "selftest")
FORWARD_KINDS = {
    "forward-heat": ("heat",),
    "forward-wave": ("wave",),
    "forward-general": ("general_first", "general_second"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evocoef",
        description="Recover time-dependent coefficients of evolution equations "
                    "from point traces.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        if name == "selftest":
            continue
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="output directory (default: output.dir)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. grids.n_steps=512")
        loud = p.add_mutually_exclusive_group()
        loud.add_argument("--quiet", action="store_true")
        loud.add_argument("--verbose", action="store_true")
    return parser


def _threads():
    raw = os.environ.get("EVOCOEF_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"EVOCOEF_THREADS must be an integer, got {raw!r}",
                          "EVOCOEF_THREADS") from None
    if n < 0:
        raise ConfigError("EVOCOEF_THREADS must be >= 0", "EVOCOEF_THREADS")
    return n or None


def _hard_fail(report):
    if report.hard_failure:
        nodes = sorted(set(report.item("h2_nonvanishing").witness)
                       | set(report.item("h2_sign").witness))
        raise HypothesisError("recovery hypotheses violated: h2 vanishes or "
                              "changes sign", nodes)


def _forward(cfg, command):
    if cfg.problem.kind not in FORWARD_KINDS[command]:
        raise ConfigError(f"{command} cannot run problem.kind {cfg.problem.kind!r}",
                          "problem.kind")
    h1, h2 = generate_traces(cfg)
    nz = cfg.noise
    h1 = add_noise(h1, nz.sigma_rel, nz.seed, stream=1)
    h2 = add_noise(h2, nz.sigma_rel, nz.seed, stream=2)
    log.info("h2(0) = %.6g, max|h2| = %.6g", h2.values[0], np.max(np.abs(h2.values)))
    doc = {"config": config_to_dict(cfg), "seed": nz.seed,
           "traces": {"h1_0": h1.values[0], "h2_0": h2.values[0],
                      "max_abs_h2": np.max(np.abs(h2.values))}}
    return {"traces.csv": io.traces_csv(h1.grid.nodes, h1.values, h2.values),
            "report.json": io.report_json(doc)}


def _recover(cfg):
    if cfg.recovery.traces is None:
        raise ConfigError("recovery.traces must name a traces.csv file",
                          "recovery.traces")
    h1, h2 = io.read_traces(cfg.recovery.traces)
    result, report = recover_from_traces(cfg, h1, h2)
    _hard_fail(report)
    truth = truth_coefficient(cfg, h1.grid)
    metrics = error_metrics(result.coefficient, truth, result.valid)
    log.info("max_rel = %.3e over %d valid nodes", metrics["max_rel"],
             int(result.valid.sum()))
    doc = {"metrics": metrics, "diagnostics": report.to_dict(),
           "config": config_to_dict(cfg), "seed": cfg.noise.seed}
    return {"recovery.csv": io.recovery_csv(h1.grid.nodes, truth.samples,
                                            result.coefficient.samples, result.valid),
            "report.json": io.report_json(doc)}


def _experiment(cfg):
    rep = run_experiment(cfg)
    _hard_fail(rep.diagnostics)
    log.info("max_rel = %.3e, l2_rel = %.3e", rep.metrics["max_rel"],
             rep.metrics["l2_rel"])
    return {"traces.csv": io.traces_csv(rep.times, rep.h1, rep.h2),
            "recovery.csv": io.recovery_csv(rep.times, rep.truth, rep.recovered,
                                            rep.valid),
            "report.json": io.report_json(rep.to_dict())}


def _converge(cfg):
    rows = convergence_study(cfg, levels_for(cfg))
    for r in rows:
        log.info("n_steps=%d error=%.3e order=%s", r.n_steps, r.error,
                 "-" if r.order is None else f"{r.order:.2f}")
    doc = {"convergence": [r.to_dict() for r in rows],
           "config": config_to_dict(cfg), "seed": cfg.noise.seed}
    return {"convergence.csv": io.convergence_csv(rows),
            "report.json": io.report_json(doc)}


def _selftest() -> int:
    from .selftest import CHECKS, run_selftest
    passed, failed = run_selftest()
    for name in failed:
        print(f"FAIL {name}")
    print(f"selftest: {passed} passed, {len(failed)} failed of {len(CHECKS)}")
    return 0 if not failed else 1


def _run(args) -> int:
    if args.command == "selftest":
        return _selftest()
    cfg = load_config(args.config, args.set)
    if args.command in FORWARD_KINDS:
        files = _forward(cfg, args.command)
    elif args.command == "recover":
        files = _recover(cfg)
    elif args.command == "experiment":
        files = _experiment(cfg)
    else:
        files = _converge(cfg)
    out = Path(args.out or cfg.output.dir)
    io.write_files(out, files)
    log.info("wrote %s to %s", ", ".join(sorted(files)), out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    level = logging.INFO
    if getattr(args, "quiet", False):
        level = logging.WARNING
    elif getattr(args, "verbose", False):
        level = logging.DEBUG
    logging.captureWarnings(True)
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        with threadpool_limits(limits=_threads()):
            return _run(args)
    except (ConfigError, StabilityError) as exc:
        where = getattr(exc, "field", None)
        print(f"error: {where + ': ' if where else ''}{exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis failure: {exc}; flagged nodes: {exc.flagged}",
              file=sys.stderr)
        return 3
    except Exception as exc:  # anything else is a bug or an environment problem
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
