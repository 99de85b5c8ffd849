"""Experiment definitions: deterministic work units and their result rows.

Every experiment decomposes into an ordered list of independent units (one
trained task instance, one parameter sweep point, ...). A unit's rows depend
only on (config, unit index), never on execution order, so serial and
parallel runs produce identical output. Per-unit seeds derive from the master
seed and the unit's position via the documented SeedSequence spawn-key split.

Row schema (one CSV row per metric): experiment, arch, n, depth, d_star,
ensemble, param, unit, metric, value, std_err, seed, master_seed, version.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy import stats as scipy_stats

from . import __version__
from . import rng as rngmod
from .circuits import (
    Architecture,
    build_layout,
    embed_params,
    max_depth,
)
from .config import ensemble_from_config, optimizer_from_config
from .discrimination import (
    DiscriminationTask,
    cost_gen,
    critical_depth,
    error_probability,
)
from .ensembles import EnsembleSpec, load_states, sample_state, save_states
from .ensembles import tfim_ground, tfim_ground_energy_free_fermion
from .optimize import (
    gradient_variance,
    make_discrimination_objective,
    make_generation_objective,
    multi_restart_train,
)
from .rng import child_seed
from .scrambling import (
    evolve_operator,
    operator_size,
    pauli_decompose,
    random_circuit_gates,
)
from .statevec import StateVector, bipartite_entropy

__all__ = ["CSV_COLUMNS", "experiment_units", "run_unit", "aggregate_rows"]

CSV_COLUMNS = ("experiment", "arch", "n", "depth", "d_star", "ensemble", "param",
               "unit", "metric", "value", "std_err", "seed", "master_seed",
               "version")


def _row(config, metric, value, *, arch="", n="", depth="", d_star="",
         ensemble="", param="", unit="", std_err="", seed="") -> dict:
    return {
        "experiment": config["experiment"], "arch": arch, "n": n,
        "depth": depth, "d_star": d_star, "ensemble": ensemble, "param": param,
        "unit": unit, "metric": metric, "value": value, "std_err": std_err,
        "seed": seed, "master_seed": config["seed"], "version": __version__,
    }


def _ensemble_label(spec: EnsembleSpec) -> str:
    p = spec.parameter
    return spec.kind if math.isnan(p) else f"{spec.kind}:{p:g}"


def _cached_pair(config, spec: EnsembleSpec, pair_index: int) -> tuple[StateVector, StateVector]:
    """Pair (2i, 2i+1) of the ensemble, via the binary cache when configured."""
    cache_dir = config.get("cache_dir")
    if not cache_dir:
        return (sample_state(spec, 2 * pair_index), sample_state(spec, 2 * pair_index + 1))
    os.makedirs(cache_dir, exist_ok=True)
    name = (f"{spec.kind}_n{spec.n_qubits}_p{spec.parameter:g}_s{spec.seed}"
            f"_pair{pair_index}.bin")
    path = os.path.join(cache_dir, name)
    if os.path.exists(path):
        _, states = load_states(path)
        return states[0], states[1]
    states = [sample_state(spec, 2 * pair_index), sample_state(spec, 2 * pair_index + 1)]
    tmp = path + f".tmp{os.getpid()}"
    save_states(tmp, spec, states)
    os.replace(tmp, path)
    return states[0], states[1]


def _tfim_pair(config, n: int) -> tuple[StateVector, StateVector, str]:
    gs = config.get("g_values")
    if not gs or len(gs) != 2:
        raise ValueError("a tfim-ground discrimination pair needs exactly two "
                         "entries in g_values")
    return (tfim_ground(n, gs[0]).ground, tfim_ground(n, gs[1]).ground,
            f"tfim-ground:{gs[0]:g}|{gs[1]:g}")


def _pair_for_unit(config, n: int, pair_index: int) -> tuple[StateVector, StateVector, str]:
    ens = config.get("ensemble", {"kind": "haar"})
    if ens["kind"] == "tfim-ground":
        return _tfim_pair(config, n)
    spec = ensemble_from_config(config, n, seed=config["seed"])
    a, b = _cached_pair(config, spec, pair_index)
    return a, b, _ensemble_label(spec)


def _depths_for(arch: Architecture, n: int, depths: list[int]) -> list[int]:
    """Requested depths clipped to a capped architecture's admissible range.

    For non-extensive architectures the structural maximum is always included
    so depth-matched comparisons can reference it.
    """
    cap = max_depth(arch, n)
    if cap is None:
        return list(depths)
    kept = sorted({d for d in depths if d <= cap} | {cap})
    return kept


def _train_depth_sweep(config, arch, n, depths, task=None, target=None,
                       unit_tag=(0,)):
    """Train one task (or target) across depths, warm-starting each depth with
    the embedded previous solution; yields (depth, layout, result|None, params)."""
    optimizer = optimizer_from_config(config)
    previous = None
    for depth in depths:
        layout = build_layout(arch, n, depth)
        if layout.param_count == 0:
            yield depth, layout, None, np.zeros(0)
            continue
        warm = None
        if previous is not None:
            prev_layout, prev_params = previous
            try:
                warm = embed_params(prev_layout, prev_params, layout)
            except ValueError:
                warm = None
        objective = (make_discrimination_objective(task, layout) if task is not None
                     else make_generation_objective(layout, target))
        seed = child_seed(config["seed"], *unit_tag, depth)
        result = multi_restart_train(objective, optimizer, seed, warm_start=warm)
        previous = (layout, result.best_params)
        yield depth, layout, result, result.best_params


# ---------------------------------------------------------------------------
# unit enumeration

def experiment_units(config) -> list[str]:
    exp = config["experiment"]
    if exp in ("discriminate", "generate"):
        return [f"pair={i}" for i in range(config["pairs"])]
    if exp == "gradvar":
        kinds = ["dis", "gen"] if config["task"] == "both" else [config["task"]]
        return [f"n={n}/task={k}" for n in config["n_values"] for k in kinds]
    if exp == "opsize":
        return [f"depth={d}" for d in config["depths"]]
    if exp == "helstrom-stats":
        return ["stats"]
    if exp == "dc-scan":
        return [f"d0={d0}" for d0 in config["d0_values"]]
    if exp == "tfim":
        return [f"n={n}/g={g:g}" for n in config["n_values"]
                for g in config["g_values"]]
    if exp == "arch-bench":
        return [f"arch={a}/pair={i}" for a in config["architectures"]
                for i in range(config["pairs"])]
    raise ValueError(f"unknown experiment {exp!r}")


# ---------------------------------------------------------------------------
# unit execution

def run_unit(config, unit_index: int) -> list[dict]:
    exp = config["experiment"]
    handler = {
        "discriminate": _unit_discriminate,
        "generate": _unit_generate,
        "gradvar": _unit_gradvar,
        "opsize": _unit_opsize,
        "helstrom-stats": _unit_helstrom_stats,
        "dc-scan": _unit_dc_scan,
        "tfim": _unit_tfim,
        "arch-bench": _unit_arch_bench,
    }[exp]
    return handler(config, unit_index)


def _unit_discriminate(config, i: int) -> list[dict]:
    n = config["n"]
    arch = Architecture.from_string(config["architecture"])
    psi0, psi1, label = _pair_for_unit(config, n, i)
    task = DiscriminationTask(psi0, psi1, measurement=config["measurement"])
    ph = task.helstrom()
    unit = f"pair={i}"
    rows = [_row(config, "helstrom", ph, arch=arch.value, n=n, ensemble=label,
                 unit=unit, seed=child_seed(config["seed"], i))]
    depths = _depths_for(arch, n, config["depths"])
    for depth, layout, result, params in _train_depth_sweep(
            config, arch, n, depths, task=task, unit_tag=(i,)):
        pe = error_probability(task, layout, params)
        common = dict(arch=arch.value, n=n, depth=depth,
                      d_star=layout.entangler_layers, ensemble=label, unit=unit,
                      seed=child_seed(config["seed"], i, depth))
        rows.append(_row(config, "error_probability", pe, **common))
        rows.append(_row(config, "cost_dis", pe - ph, **common))
        if result is not None:
            rows.append(_row(config, "restart_best", result.best_restart, **common))
    return rows


def _unit_generate(config, i: int) -> list[dict]:
    n = config["n"]
    arch = Architecture.from_string(config["architecture"])
    ens = config.get("ensemble", {"kind": "haar"})
    if ens["kind"] == "tfim-ground":
        target, _, label = _tfim_pair(config, n)
    else:
        spec = ensemble_from_config(config, n, seed=config["seed"])
        target = sample_state(spec, i)
        label = _ensemble_label(spec)
    unit = f"pair={i}"
    rows = []
    depths = _depths_for(arch, n, config["depths"])
    for depth, layout, result, params in _train_depth_sweep(
            config, arch, n, depths, target=target, unit_tag=(i,)):
        cost = cost_gen(layout, params, target)
        common = dict(arch=arch.value, n=n, depth=depth,
                      d_star=layout.entangler_layers, ensemble=label, unit=unit,
                      seed=child_seed(config["seed"], i, depth))
        rows.append(_row(config, "cost_gen", cost, **common))
        rows.append(_row(config, "fidelity", 1.0 - cost, **common))
    return rows


def _unit_gradvar(config, index: int) -> list[dict]:
    kinds = ["dis", "gen"] if config["task"] == "both" else [config["task"]]
    n_values = config["n_values"]
    n = n_values[index // len(kinds)]
    kind = kinds[index % len(kinds)]
    arch = Architecture.from_string(config["architecture"])
    depth = config["depths"][0]
    layout = build_layout(arch, n, depth)
    spec = ensemble_from_config(config, n, seed=config["seed"])
    objectives = []
    for t in range(config["pairs"]):
        if kind == "dis":
            task = DiscriminationTask(sample_state(spec, 2 * t),
                                      sample_state(spec, 2 * t + 1),
                                      measurement=config["measurement"])
            objectives.append(make_discrimination_objective(task, layout))
        else:
            objectives.append(make_generation_objective(layout, sample_state(spec, t)))
    optimizer = optimizer_from_config(config)
    res = gradient_variance(objectives, config["param_samples"],
                            child_seed(config["seed"], index),
                            fd_step=optimizer.fd_step)
    common = dict(arch=arch.value, n=n, depth=depth,
                  d_star=layout.entangler_layers,
                  ensemble=_ensemble_label(spec), param=kind,
                  unit=f"n={n}/task={kind}",
                  seed=child_seed(config["seed"], index))
    return [
        _row(config, "gradient_variance", res.mean_variance,
             std_err=res.std_err, **common),
        _row(config, "gradient_samples", res.samples, **common),
    ]


def _unit_opsize(config, index: int) -> list[dict]:
    n = config["n"]
    depth = config["depths"][index]
    arch = Architecture.from_string(config["architecture"])
    layout = build_layout(arch, n, depth)
    samples = config["samples"]
    sizes = np.empty(samples)
    max_weight_dev = 0.0
    max_identity = 0.0
    seed = child_seed(config["seed"], index)
    for s in range(samples):
        gates = random_circuit_gates(layout, rngmod.generator(seed, s))
        dec = pauli_decompose(evolve_operator(layout, gates=gates), n)
        max_weight_dev = max(max_weight_dev, abs(dec.total_weight() - 1.0))
        max_identity = max(max_identity, abs(dec.identity_coefficient()))
        sizes[s] = operator_size(dec)
    stderr = float(sizes.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    common = dict(arch=arch.value, n=n, depth=depth,
                  d_star=layout.entangler_layers, unit=f"depth={depth}", seed=seed)
    return [
        _row(config, "mean_operator_size", float(sizes.mean()), std_err=stderr,
             **common),
        _row(config, "max_weight_deviation", max_weight_dev, **common),
        _row(config, "max_identity_coefficient", max_identity, **common),
    ]


def _unit_helstrom_stats(config, _index: int) -> list[dict]:
    n = config["n"]
    spec = ensemble_from_config(config, n, seed=config["seed"])
    pairs = config["pairs"]
    overlaps = np.empty(pairs)
    for i in range(pairs):
        a = sample_state(spec, 2 * i)
        b = sample_state(spec, 2 * i + 1)
        overlaps[i] = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    ph = 0.5 * (1.0 - np.sqrt(np.clip(1.0 - overlaps, 0.0, None)))
    dim = 2**n
    ks = scipy_stats.kstest(overlaps, lambda x: 1.0 - (1.0 - x) ** (dim - 1))
    common = dict(n=n, ensemble=_ensemble_label(spec), unit="stats",
                  seed=child_seed(config["seed"], 0))
    se = lambda v: float(v.std(ddof=1) / np.sqrt(pairs))
    return [
        _row(config, "mean_helstrom", float(ph.mean()), std_err=se(ph), **common),
        _row(config, "mean_overlap", float(overlaps.mean()), std_err=se(overlaps),
             **common),
        _row(config, "ks_distance", float(ks.statistic), **common),
        _row(config, "ks_pvalue", float(ks.pvalue), **common),
        _row(config, "pairs", pairs, **common),
    ]


def _unit_dc_scan(config, index: int) -> list[dict]:
    n = config["n"]
    d0 = config["d0_values"][index]
    arch = Architecture.from_string(config["architecture"])
    spec = EnsembleSpec("local-random", n, d0=d0, seed=config["seed"])
    tasks = [DiscriminationTask(sample_state(spec, 2 * i),
                                sample_state(spec, 2 * i + 1),
                                measurement=config["measurement"])
             for i in range(config["pairs"])]
    result = critical_depth(tasks, arch,
                            threshold_multiplier=config["threshold_multiplier"],
                            depth_limit=config["depth_limit"],
                            config=optimizer_from_config(config),
                            seed=child_seed(config["seed"], index))
    label = _ensemble_label(spec)
    unit = f"d0={d0}"
    seed = child_seed(config["seed"], index)
    rows = [
        _row(config, "critical_depth",
             result.critical_depth if result.critical_depth is not None else "",
             arch=arch.value, n=n, ensemble=label, param=d0, unit=unit, seed=seed),
        _row(config, "censored", int(result.censored), arch=arch.value, n=n,
             ensemble=label, param=d0, unit=unit, seed=seed),
        _row(config, "threshold", result.threshold, arch=arch.value, n=n,
             ensemble=label, param=d0, unit=unit, seed=seed),
        _row(config, "mean_helstrom", result.helstrom_mean, arch=arch.value, n=n,
             ensemble=label, param=d0, unit=unit, seed=seed),
    ]
    for depth, mean_pe, stderr in result.curve:
        rows.append(_row(config, "mean_error", mean_pe, std_err=stderr,
                         arch=arch.value, n=n, depth=depth, ensemble=label,
                         param=d0, unit=unit, seed=seed))
    return rows


def _unit_tfim(config, index: int) -> list[dict]:
    g_count = len(config["g_values"])
    n = config["n_values"][index // g_count]
    g = config["g_values"][index % g_count]
    slice_ = tfim_ground(n, g)
    oracle = tfim_ground_energy_free_fermion(n, g)
    entropy = bipartite_entropy(slice_.ground, n // 2)
    common = dict(n=n, ensemble="tfim-ground", param=g, unit=f"n={n}/g={g:g}",
                  seed=child_seed(config["seed"], index))
    return [
        _row(config, "ground_energy", slice_.e0, **common),
        _row(config, "first_excited_energy", slice_.e1, **common),
        _row(config, "gap", slice_.e1 - slice_.e0, **common),
        _row(config, "ground_energy_free_fermion", oracle, **common),
        _row(config, "ground_energy_oracle_deviation", abs(slice_.e0 - oracle),
             **common),
        _row(config, "entropy_half_cut", entropy, **common),
        _row(config, "degenerate", int(slice_.degenerate), **common),
    ]


def _unit_arch_bench(config, index: int) -> list[dict]:
    pairs = config["pairs"]
    arch_name = config["architectures"][index // pairs]
    i = index % pairs
    arch = Architecture.from_string(arch_name)
    n = config["n"]
    psi0, psi1, label = _pair_for_unit(config, n, i)
    unit = f"arch={arch_name}/pair={i}"
    rows = []
    depths = _depths_for(arch, n, config["depths"])
    want_dis = config["task"] in ("dis", "both")
    want_gen = config["task"] in ("gen", "both")
    if want_dis:
        task = DiscriminationTask(psi0, psi1, measurement=config["measurement"])
        ph = task.helstrom()
        for depth, layout, result, params in _train_depth_sweep(
                config, arch, n, depths, task=task, unit_tag=(index, 0)):
            pe = error_probability(task, layout, params)
            rows.append(_row(config, "cost_dis", pe - ph, arch=arch.value, n=n,
                             depth=depth, d_star=layout.entangler_layers,
                             ensemble=label, unit=unit,
                             seed=child_seed(config["seed"], index, 0, depth)))
    if want_gen:
        for depth, layout, result, params in _train_depth_sweep(
                config, arch, n, depths, target=psi0, unit_tag=(index, 1)):
            rows.append(_row(config, "cost_gen", cost_gen(layout, params, psi0),
                             arch=arch.value, n=n, depth=depth,
                             d_star=layout.entangler_layers, ensemble=label,
                             unit=unit,
                             seed=child_seed(config["seed"], index, 1, depth)))
    return rows


# ---------------------------------------------------------------------------
# aggregation

_AGGREGATED = {"error_probability", "cost_dis", "cost_gen", "fidelity", "helstrom"}


def aggregate_rows(config, unit_rows: list[dict]) -> list[dict]:
    """Ensemble-mean rows (unit="mean") over the per-unit rows."""
    if config["experiment"] not in ("discriminate", "generate", "arch-bench"):
        return []
    groups: dict[tuple, list[dict]] = {}
    for r in unit_rows:
        if r["metric"] not in _AGGREGATED:
            continue
        key = (r["arch"], r["n"], r["depth"], r["d_star"], r["ensemble"],
               r["param"], r["metric"])
        groups.setdefault(key, []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        rows = groups[key]
        vals = np.array([float(r["value"]) for r in rows])
        stderr = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else ""
        arch, n, depth, d_star, ensemble, param, metric = key
        out.append(_row(config, f"mean_{metric}", float(vals.mean()),
                        std_err=stderr, arch=arch, n=n, depth=depth,
                        d_star=d_star, ensemble=ensemble, param=param,
                        unit="mean"))
    return out
