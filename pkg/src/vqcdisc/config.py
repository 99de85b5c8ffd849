"""Experiment configuration: JSON schema, validation, and capacity checks.

A config is a flat JSON object; the CLI can override any field with flags.
``validate_config`` performs full static validation (schema, then semantic
checks like architecture depth caps and dense-matrix budgets) without running
any computation.
"""

from __future__ import annotations

import json

import jsonschema

from .circuits import Architecture, build_layout
from .ensembles import ENSEMBLE_KINDS, EnsembleSpec
from .errors import CapacityError

__all__ = [
    "EXPERIMENT_KINDS", "CONFIG_SCHEMA", "ConfigError",
    "load_config", "validate_config", "optimizer_from_config",
    "ensemble_from_config",
]

EXPERIMENT_KINDS = ("discriminate", "generate", "gradvar", "opsize",
                    "helstrom-stats", "dc-scan", "tfim", "arch-bench")

_OPTIMIZER_SCHEMA = {
    "type": "object",
    "properties": {
        "fd_step": {"type": "number", "exclusiveMinimum": 0},
        "max_iterations": {"type": "integer", "minimum": 1},
        "gradient_norm_tolerance": {"type": "number", "exclusiveMinimum": 0},
        "cost_tolerance": {"type": "number", "minimum": 0},
        "restarts": {"type": "integer", "minimum": 1},
        "wolfe_c1": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "wolfe_c2": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": list(EXPERIMENT_KINDS)},
        "architecture": {"enum": [a.value for a in Architecture]},
        "architectures": {"type": "array", "minItems": 1,
                          "items": {"enum": [a.value for a in Architecture]}},
        "n": {"type": "integer", "minimum": 1},
        "n_values": {"type": "array", "minItems": 1,
                     "items": {"type": "integer", "minimum": 1}},
        "depths": {"type": "array", "minItems": 1,
                   "items": {"type": "integer", "minimum": 0}},
        "ensemble": {
            "type": "object",
            "properties": {
                "kind": {"enum": list(ENSEMBLE_KINDS)},
                "d0": {"type": ["integer", "null"], "minimum": 1},
                "g": {"type": ["number", "null"]},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "g_values": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        "d0_values": {"type": "array", "minItems": 1,
                      "items": {"type": "integer", "minimum": 1}},
        "pairs": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "param_samples": {"type": "integer", "minimum": 1},
        "task": {"enum": ["dis", "gen", "both"]},
        "measurement": {"enum": ["mle", "single-qubit"]},
        "optimizer": _OPTIMIZER_SCHEMA,
        "depth_limit": {"type": "integer", "minimum": 0},
        "threshold_multiplier": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "output": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
        "cache_dir": {"type": ["string", "null"]},
        "no_timestamp": {"type": "boolean"},
    },
    "required": ["experiment", "seed", "output"],
    "additionalProperties": False,
}

_DEFAULTS = {
    "architecture": "brickwall-open",
    "ensemble": {"kind": "haar"},
    "pairs": 10,
    "samples": 100,
    "param_samples": 5,
    "task": "dis",
    "measurement": "mle",
    "optimizer": {},
    "depth_limit": 10,
    "threshold_multiplier": 2.0,
    "workers": 1,
    "cache_dir": None,
    "no_timestamp": False,
}

#: Per-experiment required fields beyond the base schema.
_REQUIRED = {
    "discriminate": ("n", "depths"),
    "generate": ("n", "depths"),
    "gradvar": ("n_values", "depths"),
    "opsize": ("n", "depths"),
    "helstrom-stats": ("n",),
    "dc-scan": ("n", "d0_values"),
    "tfim": ("n_values", "g_values"),
    "arch-bench": ("n", "depths", "architectures"),
}

_OPSIZE_MAX_QUBITS = 8
_TFIM_MAX_QUBITS = 12


class ConfigError(ValueError):
    """Schema-level configuration problem (exit code 2)."""


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: "
                          f"{exc.msg}") from None


def apply_defaults(config: dict) -> dict:
    merged = dict(_DEFAULTS)
    merged.update(config)
    return merged


def validate_config(config: dict) -> list[str]:
    """Full static validation; returns a list of problems (empty when valid).

    Schema problems are reported with their JSON path; capacity problems
    (budgets exceeded) are prefixed ``capacity:`` so callers can map them to
    the dedicated exit code.
    """
    problems: list[str] = []
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    for err in sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        problems.append(f"{where}: {err.message}")
    if problems:
        return problems

    exp = config["experiment"]
    for f in _REQUIRED[exp]:
        if f not in config:
            problems.append(f"{f}: missing field (required by experiment {exp!r})")
    if problems:
        return problems

    try:
        optimizer_from_config(config)
    except ValueError as exc:
        problems.append(f"optimizer: {exc}")

    archs = config.get("architectures") or [config.get("architecture",
                                                       _DEFAULTS["architecture"])]
    n_list = config.get("n_values") or ([config["n"]] if "n" in config else [])
    depths = config.get("depths", [])
    for n in n_list:
        if exp in ("discriminate", "generate", "gradvar", "dc-scan", "arch-bench",
                   "opsize"):
            for arch in archs:
                for depth in (depths or [1]):
                    try:
                        build_layout(arch, n, depth)
                    except CapacityError as exc:
                        problems.append(f"capacity: {exc}")
                    except ValueError as exc:
                        problems.append(f"architecture {arch!r}: {exc}")
        if exp == "opsize" and n > _OPSIZE_MAX_QUBITS:
            problems.append(f"capacity: dense operator evolution supports "
                            f"n <= {_OPSIZE_MAX_QUBITS}, got {n}")
        if exp == "tfim" and n > _TFIM_MAX_QUBITS:
            problems.append(f"capacity: dense TFIM diagonalization supports "
                            f"n <= {_TFIM_MAX_QUBITS}, got {n}")
    if exp != "tfim" and "ensemble" in config:
        try:
            ensemble_from_config(config, n_list[0] if n_list else 2)
        except ValueError as exc:
            problems.append(f"ensemble: {exc}")
    return sorted(set(problems))


def optimizer_from_config(config: dict):
    from .optimize import OptimizerConfig
    return OptimizerConfig(**config.get("optimizer", {}))


def ensemble_from_config(config: dict, n: int, seed: int = 0) -> EnsembleSpec:
    ens = config.get("ensemble", _DEFAULTS["ensemble"])
    return EnsembleSpec(ens["kind"], n, d0=ens.get("d0"), g=ens.get("g"), seed=seed)
