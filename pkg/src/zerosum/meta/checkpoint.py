"""Checkpointing of meta-algorithm runs at outer-iteration boundaries.

The bundle is plain JSON: config hash, iteration, serialized populations,
cumulative counters, the trace so far, warm Q tables when enabled, and the
RNG cursor. Because every runner derives its per-iteration streams from
(seed, algorithm, iteration), the cursor is just those integers and resumed
runs are bit-identical to uninterrupted ones.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from ..errors import ConfigError
from ..games.tree import BehaviorPolicy
from ..qlearn import QLearner
from .oracle import AdoRunner, DoRunner
from .rl import ApsroRunner, PsroTabularRunner
from .rmbr import RmbrDoRunner
from .traces import Population, RunTrace

CHECKPOINT_FORMAT = 1

RUNNERS = {
    cls.algorithm: cls
    for cls in (DoRunner, AdoRunner, RmbrDoRunner, PsroTabularRunner, ApsroRunner)
}


def _member_to_json(member):
    if isinstance(member, BehaviorPolicy):
        return {
            "kind": "policy",
            "owner": member.owner,
            "probs": {str(s): p.tolist() for s, p in member.action_probs.items()},
        }
    return {"kind": "index", "value": int(member)}


def _member_from_json(doc):
    if doc["kind"] == "policy":
        probs = {int(s): np.asarray(p, dtype=float) for s, p in doc["probs"].items()}
        return BehaviorPolicy(doc["owner"], probs)
    return int(doc["value"])


def config_hash(runner) -> str:
    payload = json.dumps(
        {
            "algorithm": runner.algorithm,
            "game": getattr(runner.game, "name", ""),
            "config": runner.config_dict(),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


_COUNTERS = ("br_calls", "regret_updates", "q_episodes")
_LAST_FIELDS = ("_last_profile", "_last_average", "_last_meta")


def checkpoint_state(runner) -> dict:
    state = {
        "format": CHECKPOINT_FORMAT,
        "algorithm": runner.algorithm,
        "config": runner.config_dict(),
        "config_hash": config_hash(runner),
        "iteration": runner.iteration,
        "rng_cursor": {"seed": runner.seed, "iteration": runner.iteration},
        "populations": [
            [_member_to_json(m) for m in pop.members] for pop in runner.pops
        ],
        "counters": {
            name: getattr(runner, name)
            for name in _COUNTERS
            if hasattr(runner, name)
        },
        "trace": runner.trace.to_json_dict(),
    }
    for field in _LAST_FIELDS:
        value = getattr(runner, field, None)
        if value is not None:
            state[field] = [
                v.tolist() if isinstance(v, np.ndarray) else v for v in value
            ]
    warm = getattr(runner, "_warm", None)
    if warm:
        state["q_tables"] = {str(p): q.to_json_dict() for p, q in warm.items()}
    return state


def restore_runner(state: dict, game):
    """Rebuild a runner from a checkpoint bundle; the caller supplies the
    (immutable) game object the run was started on."""
    if state.get("format") != CHECKPOINT_FORMAT:
        raise ConfigError("unsupported checkpoint format")
    cls = RUNNERS.get(state["algorithm"])
    if cls is None:
        raise ConfigError(f"unknown algorithm {state['algorithm']!r}")
    pops = [
        [_member_from_json(doc) for doc in members]
        for members in state["populations"]
    ]
    runner = cls(game, init_pops=pops, **state["config"])
    if config_hash(runner) != state["config_hash"]:
        raise ConfigError("checkpoint config hash does not match this game/config")
    runner.iteration = int(state["iteration"])
    for name, value in state["counters"].items():
        setattr(runner, name, value)
    runner.trace = RunTrace.from_json_dict(state["trace"])
    for field in _LAST_FIELDS:
        if field in state and hasattr(runner, field):
            setattr(runner, field, tuple(state[field]))
    if "q_tables" in state and hasattr(runner, "_warm"):
        runner._warm = {
            int(p): QLearner.from_json_dict(game, doc)
            for p, doc in state["q_tables"].items()
        }
    return runner


def save_checkpoint(runner, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(checkpoint_state(runner), fh)


def load_checkpoint(path, game):
    with open(path, "r", encoding="utf-8") as fh:
        return restore_runner(json.load(fh), game)
