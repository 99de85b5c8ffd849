"""Experiment runner: deterministic CSV output, resume manifest, worker pool.

Rows are flushed to the CSV as each unit completes (in unit order, buffering
out-of-order parallel completions), and a manifest file next to the output
records the config fingerprint and completed-unit count, so interrupted
sweeps resume instead of recomputing. Aggregate rows are appended once all
units are done.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from datetime import datetime, timezone

from .experiments import CSV_COLUMNS, aggregate_rows, experiment_units, run_unit

__all__ = ["run_experiment", "config_fingerprint", "WORKERS_ENV_VAR"]

WORKERS_ENV_VAR = "VQCDISC_WORKERS"


def config_fingerprint(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _format(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(fh, rows):
    writer = csv.writer(fh, lineterminator="\r\n")
    for row in rows:
        writer.writerow([_format(row[c]) for c in CSV_COLUMNS])


def _manifest_path(output: str) -> str:
    return output + ".manifest.json"


def _load_manifest(output: str, fingerprint: str):
    path = _manifest_path(output)
    if not (os.path.exists(path) and os.path.exists(output)):
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if doc.get("fingerprint") != fingerprint:
        return None
    return doc


def _save_manifest(output: str, fingerprint: str, completed: int, total: int,
                   finalized: bool):
    doc = {"fingerprint": fingerprint, "completed": completed, "total": total,
           "finalized": finalized}
    tmp = _manifest_path(output) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    os.replace(tmp, _manifest_path(output))


def _read_unit_rows(output: str) -> list[dict]:
    with open(output, "r", encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.DictReader(fh)
        return [dict(r) for r in reader if r["unit"] != "mean"]


def _pool_worker(config: dict, index: int) -> list[dict]:
    return run_unit(config, index)


def run_experiment(config: dict, log=None) -> str:
    """Execute the configured experiment; returns the output CSV path.

    A unit failure raises RuntimeError naming the unit. Deterministic for a
    fixed config: unit seeds depend only on the master seed and unit index,
    and rows are merged in unit order regardless of the worker count.
    """
    output = config["output"]
    units = experiment_units(config)
    fingerprint = config_fingerprint(config)
    log = log or (lambda msg: None)

    manifest = _load_manifest(output, fingerprint)
    start = 0
    if manifest is not None:
        if manifest.get("finalized"):
            log(f"{output}: already complete ({len(units)} units)")
            return output
        start = int(manifest.get("completed", 0))
        log(f"{output}: resuming at unit {start}/{len(units)}")
    else:
        parent = os.path.dirname(os.path.abspath(output))
        os.makedirs(parent, exist_ok=True)
        with open(output, "w", encoding="utf-8", newline="") as fh:
            if not config.get("no_timestamp"):
                stamp = datetime.now(timezone.utc).isoformat()
                fh.write(f"# generated: {stamp}\r\n")
            fh.write(",".join(CSV_COLUMNS) + "\r\n")
        _save_manifest(output, fingerprint, 0, len(units), False)

    workers = int(config.get("workers")
                  or os.environ.get(WORKERS_ENV_VAR, "1"))

    def flush(index: int, rows: list[dict]):
        with open(output, "a", encoding="utf-8", newline="") as fh:
            _write_rows(fh, rows)
        _save_manifest(output, fingerprint, index + 1, len(units), False)
        log(f"unit {units[index]} done ({index + 1}/{len(units)})")

    pending = list(range(start, len(units)))
    if workers <= 1 or len(pending) <= 1:
        for index in pending:
            try:
                rows = run_unit(config, index)
            except Exception as exc:
                raise RuntimeError(f"unit {units[index]!r} failed: {exc}") from exc
            flush(index, rows)
    else:
        results: dict[int, list[dict]] = {}
        next_flush = start
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_pool_worker, config, i): i for i in pending}
            remaining = set(futures)
            while remaining:
                done, remaining = wait(remaining, return_when=FIRST_COMPLETED)
                for fut in done:
                    index = futures[fut]
                    try:
                        results[index] = fut.result()
                    except Exception as exc:
                        for other in remaining:
                            other.cancel()
                        raise RuntimeError(f"unit {units[index]!r} failed: "
                                           f"{exc}") from exc
                while next_flush in results:
                    flush(next_flush, results.pop(next_flush))
                    next_flush += 1

    unit_rows = _read_unit_rows(output)
    extra = aggregate_rows(config, unit_rows)
    if extra:
        with open(output, "a", encoding="utf-8", newline="") as fh:
            _write_rows(fh, extra)
    _save_manifest(output, fingerprint, len(units), len(units), True)
    return output
