"""Normal-form zero-sum games as payoff matrices.

The matrix stores the row player's payoff; the column player receives its
negation. Mixed strategies are probability vectors over rows or columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-12


def _as_weights(x) -> np.ndarray:
    """Coerce a MixedStrategy or array-like to a 1-D float array."""
    return np.asarray(getattr(x, "weights", x), dtype=float)


@dataclass(frozen=True)
class MixedStrategy:
    """A probability vector over an ordered set of pure strategies."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D vector")
        if np.any(w < -PROB_TOL) or abs(w.sum() - 1.0) > PROB_TOL:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class MatrixGame:
    """Two-player zero-sum game; ``payoff[r, c]`` is the row player's payoff."""

    payoff: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        a = np.asarray(self.payoff, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("payoff must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(a)):
            raise ValueError("payoff entries must be finite")
        object.__setattr__(self, "payoff", a)

    @property
    def row_count(self) -> int:
        return self.payoff.shape[0]

    @property
    def col_count(self) -> int:
        return self.payoff.shape[1]

    def payoff_bounds(self) -> tuple[float, float]:
        """(min, max) over entries; used to normalize regret rewards."""
        return float(self.payoff.min()), float(self.payoff.max())


def evaluate_matrix(game: MatrixGame, x, y) -> float:
    """Expected payoff to the row player of mixed profile (x, y).

    The column player's value is the negation. Raises ValueError on a
    dimension mismatch.
    """
    xv, yv = _as_weights(x), _as_weights(y)
    if xv.size != game.row_count or yv.size != game.col_count:
        raise ValueError(
            f"profile dims ({xv.size},{yv.size}) do not match "
            f"{game.row_count}x{game.col_count} game"
        )
    return float(xv @ game.payoff @ yv)
