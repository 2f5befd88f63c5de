"""Figure presets plus CSV / JSON emission of experiment results."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .bounds import bound_report
from .config import ExperimentConfig
from .env import ProblemInstance, build_synthetic, summarize
from .sim import ExperimentResult, run_experiment, verify_counters

CSV_COLUMNS = (
    "policy", "K", "gamma", "s1_size", "t",
    "mean_pseudo_regret", "std_pseudo_regret", "mean_realized_regret", "std_realized_regret",
)
PRESETS = ("fig1a", "fig1b", "fig1c")
DEFAULT_HORIZON = 100_000
DEFAULT_PATHS = 20


def _num(x: float) -> str:
    return repr(float(x))


def emit_curves(results: dict[str, ExperimentResult], path, K: int, gamma: float | None,
                s1_size: int) -> Path:
    """Write one row per (policy, checkpoint), sorted by policy then t."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for policy in sorted(results):
            c = results[policy].curve
            for q, t in enumerate(c.checkpoints):
                writer.writerow([
                    policy, K, "" if gamma is None else _num(gamma), s1_size, int(t),
                    _num(c.mean_pseudo[q]), _num(c.std_pseudo[q]),
                    _num(c.mean_realized[q]), _num(c.std_realized[q]),
                ])
    return path


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not math.isfinite(obj) else float(obj)
    return obj


def emit_summary(doc: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


def policy_summary(instance: ProblemInstance, result: ExperimentResult, T: int,
                   with_paths: bool = True) -> dict:
    """Final regret, averaged counters and identity checks for one policy."""
    summary = summarize(instance)
    traces = result.traces
    n_i_j = np.mean([tr.n_i_j for tr in traces], axis=0)
    s1 = sorted(summary.s1)
    doc = {
        "final_mean_pseudo_regret": result.curve.mean_pseudo[-1],
        "final_std_pseudo_regret": result.curve.std_pseudo[-1],
        "final_mean_realized_regret": result.curve.mean_realized[-1],
        "final_std_realized_regret": result.curve.std_realized[-1],
        "mean_n_i": np.mean([tr.n_i for tr in traces], axis=0),
        "mean_n_super_j": np.mean([tr.n_super_j for tr in traces], axis=0),
        "mean_n_i_j": n_i_j,
        "mean_s2_pulls_on_s1_regions": {i: n_i_j[i, s1].sum() for i in sorted(summary.s2)},
        "counter_identities_hold": all(all(verify_counters(tr, T).values()) for tr in traces),
    }
    if with_paths:
        doc["paths"] = [
            {"seed": tr.seed, "n_i": tr.n_i, "n_super_j": tr.n_super_j, "n_i_j": tr.n_i_j,
             "final_pseudo_regret": tr.cum_pseudo_regret[-1],
             "final_realized_regret": tr.cum_realized_regret[-1]}
            for tr in traces
        ]
    return doc


def run_config(cfg: ExperimentConfig, out_dir=None) -> tuple[Path, Path]:
    """Run an experiment config and write its curves CSV and summary JSON."""
    instance = cfg.instance.build()
    summary = summarize(instance)
    run = cfg.run
    results = run_experiment(instance, list(cfg.policies), run.horizon, run.paths, run.base_seed,
                             run.checkpoint_stride, run.workers)
    base = Path(out_dir) if out_dir is not None else Path(".")
    gamma = getattr(cfg.instance, "gamma", None)
    curves = emit_curves(results, base / cfg.output.curves_path, instance.K, gamma, len(summary.s1))
    doc = {
        "config": cfg.model_dump(),
        "seeds": [run.base_seed + p for p in range(run.paths)],
        "bounds": bound_report(instance, run.horizon, cfg.bounds.alpha, cfg.bounds.C, summary),
        "policies": {name: policy_summary(instance, res, run.horizon, cfg.output.counters)
                     for name, res in results.items()},
    }
    return curves, emit_summary(doc, base / cfg.output.summary_path)


def preset_instances(name: str, base_seed: int) -> list[tuple[str, ProblemInstance, dict]]:
    """(label, instance, metadata) for every configuration of a figure preset."""
    if name == "fig1a":
        return [(f"K{k}", build_synthetic(k, 1.0, range(1, 6), base_seed),
                 {"K": k, "gamma": 1.0, "active_preferences": [1, 2, 3, 4, 5]})
                for k in (5, 10, 15, 20)]
    if name == "fig1b":
        # same mix_seed and same path seeds: only the scaling differs between runs
        return [(f"gamma{g}", build_synthetic(10, g, range(1, 6), base_seed),
                 {"K": 10, "gamma": g, "active_preferences": [1, 2, 3, 4, 5]})
                for g in (1.0, 0.7, 0.5)]
    if name == "fig1c":
        return [(f"S1_{s}", build_synthetic(5, 1.0, range(1, s + 1), base_seed),
                 {"K": 5, "gamma": 1.0, "active_preferences": list(range(1, s + 1))})
                for s in (2, 3, 4, 5)]
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")


def run_preset(name: str, base_seed: int, out_dir, horizon: int = DEFAULT_HORIZON,
               paths: int = DEFAULT_PATHS, workers: int = 1, checkpoint_stride: int = 100,
               policies=("wucb",)) -> dict[str, Any]:
    """Run every configuration of a figure preset; returns curves and written files."""
    out_dir = Path(out_dir)
    configs = preset_instances(name, base_seed)
    files: list[Path] = []
    curves = {}
    doc: dict[str, Any] = {"preset": name, "base_seed": base_seed, "horizon": horizon,
                           "paths": paths, "seeds": [base_seed + p for p in range(paths)],
                           "configurations": {}}
    for label, instance, meta in configs:
        summary = summarize(instance)
        results = run_experiment(instance, list(policies), horizon, paths, base_seed,
                                 checkpoint_stride, workers)
        curves[label] = results
        files.append(emit_curves(results, out_dir / f"{name}_{label}.csv", instance.K,
                                 meta["gamma"], len(summary.s1)))
        doc["configurations"][label] = {
            **meta,
            "mix_seed": base_seed,
            "bounds": bound_report(instance, horizon, summary=summary),
            "policies": {p: policy_summary(instance, r, horizon, with_paths=False)
                         for p, r in results.items()},
        }
    files.append(emit_summary(doc, out_dir / f"{name}_summary.json"))
    return {"files": files, "results": curves, "instances": {lab: inst for lab, inst, _ in configs}}
