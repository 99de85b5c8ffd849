"""Command-line interface.

    vqcdisc run <experiment> [--config file.json] [flag overrides...]
    vqcdisc validate <config.json>

Exit codes: 0 success, 1 runtime failure (the failing unit is named),
2 configuration/schema violation, 3 compute-capacity violation.
"""

from __future__ import annotations

import argparse
import sys

from .config import (
    EXPERIMENT_KINDS,
    ConfigError,
    apply_defaults,
    load_config,
    validate_config,
)
from .errors import CapacityError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def _parse_depths(text: str) -> list[int]:
    """Depth lists as '1..8' (inclusive range) or '1,2,4'."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _parse_ensemble(text: str) -> dict:
    """Ensemble specs as 'haar', 'local-random:4', 'ti-local-random:64',
    'tfim-ground:1.0'."""
    kind, _, param = text.partition(":")
    ens: dict = {"kind": kind}
    if param:
        if kind in ("local-random", "ti-local-random"):
            ens["d0"] = int(param)
        elif kind == "tfim-ground":
            ens["g"] = float(param)
        else:
            raise ValueError(f"ensemble {kind!r} takes no parameter")
    return ens


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqcdisc",
                                     description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run an experiment sweep")
    runp.add_argument("experiment", choices=EXPERIMENT_KINDS)
    runp.add_argument("--config", help="JSON config file (flags override fields)")
    runp.add_argument("--arch", dest="architecture")
    runp.add_argument("--architectures", help="comma-separated list (arch-bench)")
    runp.add_argument("--n", type=int)
    runp.add_argument("--n-values", help="comma-separated qubit counts")
    runp.add_argument("--depths", help="e.g. '1..8' or '1,2,4'")
    runp.add_argument("--d0-values", help="comma-separated preparation depths")
    runp.add_argument("--g-values", help="comma-separated field strengths")
    runp.add_argument("--ensemble", help="haar | local-random:D0 | "
                                         "ti-local-random:D0 | tfim-ground:g")
    runp.add_argument("--pairs", type=int)
    runp.add_argument("--samples", type=int)
    runp.add_argument("--param-samples", type=int)
    runp.add_argument("--task", choices=["dis", "gen", "both"])
    runp.add_argument("--measurement", choices=["mle", "single-qubit"])
    runp.add_argument("--restarts", type=int)
    runp.add_argument("--max-iterations", type=int)
    runp.add_argument("--fd-step", type=float)
    runp.add_argument("--depth-limit", type=int)
    runp.add_argument("--threshold-multiplier", type=float)
    runp.add_argument("--seed", type=int)
    runp.add_argument("--out", dest="output")
    runp.add_argument("--workers", type=int)
    runp.add_argument("--cache-dir")
    runp.add_argument("--no-timestamp", action="store_true", default=None)
    runp.add_argument("--quiet", action="store_true")

    valp = sub.add_parser("validate", help="validate a config file, no compute")
    valp.add_argument("config")
    return parser


def _config_from_args(args) -> dict:
    config = load_config(args.config) if args.config else {}
    config["experiment"] = args.experiment
    direct = ("architecture", "n", "pairs", "samples", "task", "measurement",
              "seed", "output", "workers", "cache_dir", "no_timestamp",
              "depth_limit", "threshold_multiplier")
    for name in direct:
        value = getattr(args, name)
        if value is not None:
            config[name] = value
    if args.param_samples is not None:
        config["param_samples"] = args.param_samples
    if args.architectures:
        config["architectures"] = [a.strip() for a in args.architectures.split(",")]
    if args.n_values:
        config["n_values"] = [int(x) for x in args.n_values.split(",")]
    if args.depths:
        config["depths"] = _parse_depths(args.depths)
    if args.d0_values:
        config["d0_values"] = [int(x) for x in args.d0_values.split(",")]
    if args.g_values:
        config["g_values"] = [float(x) for x in args.g_values.split(",")]
    if args.ensemble:
        config["ensemble"] = _parse_ensemble(args.ensemble)
    optimizer = dict(config.get("optimizer", {}))
    if args.restarts is not None:
        optimizer["restarts"] = args.restarts
    if args.max_iterations is not None:
        optimizer["max_iterations"] = args.max_iterations
    if args.fd_step is not None:
        optimizer["fd_step"] = args.fd_step
    if optimizer:
        config["optimizer"] = optimizer
    config.setdefault("seed", 0)
    config.setdefault("output", f"{args.experiment}.csv")
    return apply_defaults(config)


def _report_problems(problems: list[str]) -> int:
    capacity = [p for p in problems if p.startswith("capacity:")]
    for p in problems:
        print(f"config error: {p}", file=sys.stderr)
    return EXIT_CAPACITY if capacity and len(capacity) == len(problems) else EXIT_CONFIG


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "validate":
        try:
            config = apply_defaults(load_config(args.config))
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        problems = validate_config(config)
        if problems:
            return _report_problems(problems)
        print("config ok")
        return EXIT_OK

    try:
        config = _config_from_args(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate_config(config)
    if problems:
        return _report_problems(problems)

    from .runner import run_experiment
    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    try:
        output = run_experiment(config, log=log)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except RuntimeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
