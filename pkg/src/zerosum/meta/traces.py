"""Run traces and populations shared by all meta-algorithm runners."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

CSV_COLUMNS = (
    "iteration",
    "exploitability",
    "restricted_value_p1",
    "restricted_value_p2",
    "pop_size_p1",
    "pop_size_p2",
    "br_calls",
    "regret_updates",
    "q_episodes",
)


@dataclass
class IterationRecord:
    """One outer iteration: exploitability of the reported distribution,
    restricted-game values, population sizes, and cumulative budgets.

    wall_ms is measured timing; it is carried in JSON summaries but kept out
    of the deterministic CSV trace.
    """

    iteration: int
    exploitability: float
    restricted_value_p1: float
    restricted_value_p2: float
    pop_size_p1: int
    pop_size_p2: int
    br_calls: int
    regret_updates: int
    q_episodes: int
    wall_ms: float = 0.0

    def csv_row(self) -> list:
        return [getattr(self, col) for col in CSV_COLUMNS]


@dataclass
class RunTrace:
    """Per-iteration records plus the final reported distributions."""

    algorithm: str
    game_name: str
    seed: int
    records: list[IterationRecord] = field(default_factory=list)
    termination: str = "max_iterations"
    final_distribution_p1: list[float] = field(default_factory=list)
    final_distribution_p2: list[float] = field(default_factory=list)

    def exploitabilities(self) -> list[float]:
        return [r.exploitability for r in self.records]

    def to_json_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "game_name": self.game_name,
            "seed": self.seed,
            "termination": self.termination,
            "final_distribution_p1": self.final_distribution_p1,
            "final_distribution_p2": self.final_distribution_p2,
            "records": [asdict(r) for r in self.records],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RunTrace":
        trace = cls(
            algorithm=doc["algorithm"],
            game_name=doc["game_name"],
            seed=doc["seed"],
            termination=doc["termination"],
            final_distribution_p1=doc["final_distribution_p1"],
            final_distribution_p2=doc["final_distribution_p2"],
        )
        trace.records = [IterationRecord(**r) for r in doc["records"]]
        return trace


class Population:
    """Ordered, duplicate-free, append-only strategy set for one player.

    Members are pure-strategy indices (matrix games) or deterministic
    behavior policies (tree games); policies are identified by their action
    map.
    """

    def __init__(self, members=()):
        self.members: list = []
        self._keys: set = set()
        for m in members:
            self.add(m)

    @staticmethod
    def _key(member):
        return member.key() if hasattr(member, "key") else int(member)

    def add(self, member) -> bool:
        key = self._key(member)
        if key in self._keys:
            return False
        self._keys.add(key)
        self.members.append(member)
        return True

    def __contains__(self, member) -> bool:
        return self._key(member) in self._keys

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def keys(self) -> frozenset:
        return frozenset(self._keys)

    def indices(self) -> list[int]:
        """Pure-strategy indices (matrix populations only)."""
        return [int(m) for m in self.members]


def pad_distribution(weights, pop_indices, size: int) -> np.ndarray:
    """Spread a distribution over population members onto the full strategy
    space, zero elsewhere."""
    w = np.asarray(getattr(weights, "weights", weights), dtype=float)
    full = np.zeros(size)
    full[list(pop_indices)] = w
    return full
