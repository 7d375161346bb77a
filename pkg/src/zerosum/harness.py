"""Experiment harness: validated JSON configs, seeded runs fanned out over a
worker pool, deterministic CSV traces, and run comparison.

Trace CSVs contain only deterministic columns (identical config + seed means
byte-identical files); measured wall times go to the JSON summary instead.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .games.matrix import MatrixGame
from .games.tree import GameTree
from .games.zoo import game_from_spec
from .meta import (
    AdoRunner,
    ApsroRunner,
    CSV_COLUMNS,
    DoRunner,
    PsroTabularRunner,
    RmbrDoRunner,
    RunTrace,
)

ALGORITHMS = ("do", "ado", "rmbr_do", "psro_tabular", "apsro")

# Inner-config keys per algorithm, with the subset that scales with the
# budget factor (ratios like BR cadence and batch sizes stay fixed).
_INNER_KEYS = {
    "do": set(),
    "ado": set(),
    "rmbr_do": {"epsilon", "n_updates", "br_every", "rm", "eta", "gamma", "gamma_mode"},
    "psro_tabular": {
        "q_episodes",
        "q_step_size",
        "q_epsilon",
        "payoff_mode",
        "payoff_episodes",
        "oracle_br",
    },
    "apsro": {
        "n_regret_updates",
        "q_episodes",
        "regret_batch",
        "q_batch",
        "q_step_size",
        "q_epsilon",
        "eta",
        "gamma",
        "gamma_mode",
        "oracle_br",
        "q_warm_start",
        "tol",
    },
}
_SCALED_KEYS = {"n_updates", "q_episodes", "n_regret_updates"}

_TOP_KEYS = {
    "name",
    "game",
    "algorithm",
    "seeds",
    "outer_iters",
    "tol",
    "budget_scale",
    "out_dir",
    "workers",
    "inner",
}


@dataclass
class ExperimentConfig:
    """Validated experiment description; see README for the JSON schema."""

    game: dict
    algorithm: str
    seeds: list[int]
    outer_iters: int = 50
    tol: float = 1e-9
    budget_scale: float = 1.0
    out_dir: str = "runs"
    workers: int = 1
    name: str = ""
    inner: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for required in ("game", "algorithm", "seeds"):
            if required not in doc:
                raise ConfigError(f"config missing required key {required!r}")
        algorithm = doc["algorithm"]
        if algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}"
            )
        seeds = doc["seeds"]
        if (
            not isinstance(seeds, list)
            or not seeds
            or not all(isinstance(s, int) for s in seeds)
        ):
            raise ConfigError("seeds must be a non-empty list of integers")
        inner = doc.get("inner", {})
        if not isinstance(inner, dict):
            raise ConfigError("inner must be an object")
        unknown_inner = set(inner) - _INNER_KEYS[algorithm]
        if unknown_inner:
            raise ConfigError(
                f"unknown inner keys for {algorithm!r}: {sorted(unknown_inner)}"
            )
        config = cls(
            game=doc["game"],
            algorithm=algorithm,
            seeds=list(seeds),
            outer_iters=int(doc.get("outer_iters", 50)),
            tol=float(doc.get("tol", 1e-9)),
            budget_scale=float(doc.get("budget_scale", 1.0)),
            out_dir=str(doc.get("out_dir", "runs")),
            workers=int(doc.get("workers", 1)),
            name=str(doc.get("name", "")),
            inner=dict(inner),
        )
        if config.outer_iters < 1:
            raise ConfigError("outer_iters must be >= 1")
        if config.budget_scale <= 0:
            raise ConfigError("budget_scale must be positive")
        # Fail fast on malformed game specs.
        game_from_spec(config.game, seed=config.seeds[0])
        return config

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "game": self.game,
            "algorithm": self.algorithm,
            "seeds": self.seeds,
            "outer_iters": self.outer_iters,
            "tol": self.tol,
            "budget_scale": self.budget_scale,
            "out_dir": self.out_dir,
            "workers": self.workers,
            "inner": self.inner,
        }

    def scaled_inner(self) -> dict:
        inner = dict(self.inner)
        if self.budget_scale != 1.0:
            for key in _SCALED_KEYS & set(inner):
                inner[key] = max(1, round(inner[key] * self.budget_scale))
        return inner


def _build_runner(config: ExperimentConfig, seed: int):
    game = game_from_spec(config.game, seed=seed)
    inner = config.scaled_inner()
    algorithm = config.algorithm
    if algorithm in ("do", "ado"):
        if not isinstance(game, MatrixGame):
            raise ConfigError(f"{algorithm} requires a matrix game")
        cls = DoRunner if algorithm == "do" else AdoRunner
        return cls(game, tol=config.tol, seed=seed)
    if algorithm == "rmbr_do":
        defaults = {"n_updates": 100_000, "br_every": 1_000}
        if config.budget_scale != 1.0:
            defaults["n_updates"] = max(1, round(defaults["n_updates"] * config.budget_scale))
        return RmbrDoRunner(game, seed=seed, **{**defaults, **inner})
    if not isinstance(game, GameTree):
        raise ConfigError(f"{algorithm} requires an extensive-form game")
    if algorithm == "psro_tabular":
        defaults = {"q_episodes": 500_000}
        if config.budget_scale != 1.0:
            defaults["q_episodes"] = max(1, round(defaults["q_episodes"] * config.budget_scale))
        return PsroTabularRunner(game, tol=config.tol, seed=seed, **{**defaults, **inner})
    defaults = {"n_regret_updates": 50_000, "q_episodes": 500_000}
    if config.budget_scale != 1.0:
        defaults = {
            k: max(1, round(v * config.budget_scale)) for k, v in defaults.items()
        }
    return ApsroRunner(game, seed=seed, **{**defaults, **inner})


def trace_to_csv(trace: RunTrace) -> str:
    """Render the deterministic trace columns; floats use repr so identical
    runs yield identical bytes."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in trace.records:
        writer.writerow(
            [repr(v) if isinstance(v, float) else v for v in record.csv_row()]
        )
    return buffer.getvalue()


def _atomic_write(path: str, data: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
    os.replace(tmp, path)


def run_single_seed(config: ExperimentConfig, seed: int) -> RunTrace:
    runner = _build_runner(config, seed)
    return runner.run(config.outer_iters)


def _worker(args) -> dict:
    config_doc, seed = args
    config = ExperimentConfig.from_dict(config_doc)
    trace = run_single_seed(config, seed)
    return {"seed": seed, "trace": trace.to_json_dict()}


def trace_filename(algorithm: str, seed: int) -> str:
    return f"trace_{algorithm}_seed{seed}.csv"


def run_experiment(
    config: ExperimentConfig,
    seed_offset: int = 0,
    budget_scale: float | None = None,
    out_dir: str | None = None,
) -> dict:
    """Run every seed, write one CSV trace per seed plus summary.json, and
    return the summary dict. Partial traces are flushed as soon as each seed
    finishes, so a late failure keeps earlier results on disk."""
    if budget_scale is not None:
        config = ExperimentConfig.from_dict(
            {**config.to_dict(), "budget_scale": float(budget_scale)}
        )
    out = out_dir if out_dir is not None else config.out_dir
    os.makedirs(out, exist_ok=True)
    seeds = [s + seed_offset for s in config.seeds]
    started = time.perf_counter()

    traces: dict[int, RunTrace] = {}
    failures: dict[int, str] = {}

    def record(seed: int, trace: RunTrace) -> None:
        traces[seed] = trace
        _atomic_write(
            os.path.join(out, trace_filename(config.algorithm, seed)),
            trace_to_csv(trace),
        )

    try:
        if config.workers > 1 and len(seeds) > 1:
            jobs = [(config.to_dict(), seed) for seed in seeds]
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                for result in pool.map(_worker, jobs):
                    record(result["seed"], RunTrace.from_json_dict(result["trace"]))
        else:
            for seed in seeds:
                try:
                    record(seed, run_single_seed(config, seed))
                except Exception as exc:
                    failures[seed] = f"{type(exc).__name__}: {exc}"
                    raise
    finally:
        summary = _summarize(config, seeds, traces, failures, started)
        _atomic_write(
            os.path.join(out, "summary.json"),
            json.dumps(summary, indent=2, sort_keys=True),
        )
    return summary


def _summarize(config, seeds, traces, failures, started) -> dict:
    finals = [
        traces[s].records[-1].exploitability
        for s in seeds
        if s in traces and traces[s].records
    ]
    quartiles = (
        {
            "q25": float(np.percentile(finals, 25)),
            "median": float(np.median(finals)),
            "q75": float(np.percentile(finals, 75)),
        }
        if finals
        else None
    )
    return {
        "config": config.to_dict(),
        "seeds": seeds,
        "algorithm": config.algorithm,
        "game": config.game,
        "final_exploitability": quartiles,
        "wall_seconds_total": time.perf_counter() - started,
        "runs": {
            str(seed): {
                "file": trace_filename(config.algorithm, seed),
                "termination": traces[seed].termination,
                "iterations": len(traces[seed].records),
                "final_exploitability": (
                    traces[seed].records[-1].exploitability
                    if traces[seed].records
                    else None
                ),
                "wall_ms": [r.wall_ms for r in traces[seed].records],
            }
            for seed in seeds
            if seed in traces
        },
        "failures": failures,
    }


# -- comparison -----------------------------------------------------------------


def load_trace_csv(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = [
            {k: (int(v) if k.startswith(("iter", "pop", "br", "regret", "q_")) else float(v)) for k, v in row.items()}
            for row in reader
        ]
    return rows


def _exploit_curves(summary: dict, directory: str) -> list[list[float]]:
    curves = []
    for info in summary["runs"].values():
        rows = load_trace_csv(os.path.join(directory, info["file"]))
        curves.append([row["exploitability"] for row in rows])
    return curves


def _pad_to(curves: list[list[float]], length: int) -> np.ndarray:
    """Carry each terminated run's final exploitability forward so curves
    share an iteration axis."""
    out = np.empty((len(curves), length))
    for i, curve in enumerate(curves):
        out[i, : len(curve)] = curve
        out[i, len(curve) :] = curve[-1]
    return out


def count_increase_events(curve, threshold: float = 1e-9) -> int:
    return int(
        sum(1 for a, b in zip(curve, curve[1:]) if b > a + threshold)
    )


def compare_runs(
    baseline_dir: str, candidate_dir: str, increase_threshold: float = 1e-9
) -> dict:
    """Side-by-side report of two experiment directories on the same game:
    per-iteration median curves, final medians, and exploitability-increase
    event counts."""
    with open(os.path.join(baseline_dir, "summary.json"), encoding="utf-8") as fh:
        base = json.load(fh)
    with open(os.path.join(candidate_dir, "summary.json"), encoding="utf-8") as fh:
        cand = json.load(fh)
    if json.dumps(base["game"], sort_keys=True) != json.dumps(cand["game"], sort_keys=True):
        raise ValueError(
            f"runs are on different games: {base['game']} vs {cand['game']}"
        )
    base_curves = _exploit_curves(base, baseline_dir)
    cand_curves = _exploit_curves(cand, candidate_dir)
    length = max(max(map(len, base_curves)), max(map(len, cand_curves)))
    base_matrix = _pad_to(base_curves, length)
    cand_matrix = _pad_to(cand_curves, length)
    base_median = np.median(base_matrix, axis=0)
    cand_median = np.median(cand_matrix, axis=0)
    return {
        "game": base["game"],
        "iterations": length,
        "baseline": {
            "algorithm": base["algorithm"],
            "median_curve": base_median.tolist(),
            "final_median": float(base_median[-1]),
            "increase_events": [
                count_increase_events(c, increase_threshold) for c in base_curves
            ],
        },
        "candidate": {
            "algorithm": cand["algorithm"],
            "median_curve": cand_median.tolist(),
            "final_median": float(cand_median[-1]),
            "increase_events": [
                count_increase_events(c, increase_threshold) for c in cand_curves
            ],
        },
        "candidate_leq_baseline_everywhere": bool(
            np.all(cand_median <= base_median + 1e-12)
        ),
        "final_winner": (
            "candidate" if cand_median[-1] <= base_median[-1] else "baseline"
        ),
    }
