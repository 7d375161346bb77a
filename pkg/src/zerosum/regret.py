"""No-regret engines: Exp3 (bandit feedback) and MWU (full feedback).

Both share one mutable state over k arms holding exponentiated cumulative
rewards and a running sum of the sampling distributions actually played,
from which the time-average iterate is recovered. Rewards must already be
normalized to [0, 1] by the caller (use the game's payoff bounds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class RegretState:
    """State of an exponential-weights learner over k arms.

    gamma is the Exp3 exploration mix (0 for MWU); eta the learning rate.
    """

    k: int
    eta: float
    gamma: float = 0.0
    cumulative: np.ndarray = field(init=False)
    avg_accumulator: np.ndarray = field(init=False)
    t: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("need at least one arm")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        self.cumulative = np.zeros(self.k)
        self.avg_accumulator = np.zeros(self.k)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "eta": self.eta,
            "gamma": self.gamma,
            "cumulative": self.cumulative.tolist(),
            "avg_accumulator": self.avg_accumulator.tolist(),
            "t": self.t,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RegretState":
        state = cls(k=doc["k"], eta=doc["eta"], gamma=doc["gamma"])
        state.cumulative = np.asarray(doc["cumulative"], dtype=float)
        state.avg_accumulator = np.asarray(doc["avg_accumulator"], dtype=float)
        state.t = int(doc["t"])
        return state


def exp3_state(k: int, n_total: int, eta: float | None = None, gamma: float | None = None) -> RegretState:
    """Exp3 state with gamma from the schedule (unless given) and eta
    defaulting to gamma / k."""
    if gamma is None:
        gamma = exp3_gamma_schedule(k, n_total)
    if eta is None:
        eta = gamma / k if gamma > 0 else 1.0 / k
    return RegretState(k=k, eta=eta, gamma=gamma)


def mwu_state(k: int, eta: float = 0.1) -> RegretState:
    return RegretState(k=k, eta=eta, gamma=0.0)


def exp3_distribution(state: RegretState) -> np.ndarray:
    """P_i = (1 - gamma) * softmax(eta * S)_i + gamma / k, overflow-safe."""
    z = state.eta * state.cumulative
    z = z - z.max()
    w = np.exp(z)
    soft = w / w.sum()
    if state.gamma == 0.0:
        return soft
    return (1.0 - state.gamma) * soft + state.gamma / state.k


def exp3_update(state: RegretState, sampled_arm: int, reward: float, p_sampled: float) -> RegretState:
    """Importance-weighted update of the sampled arm only.

    `reward` must be in [0, 1] (normalization is the caller's job) and
    `p_sampled` the probability the arm was drawn with. The pre-update
    sampling distribution is added to the average accumulator.
    """
    if not 0.0 <= reward <= 1.0:
        raise ValueError(f"reward {reward} outside [0, 1]; normalize upstream")
    if not 0 <= sampled_arm < state.k:
        raise ValueError("sampled arm out of range")
    if p_sampled <= 0.0:
        raise ValueError("p_sampled must be positive")
    state.avg_accumulator += exp3_distribution(state)
    state.cumulative[sampled_arm] += reward / p_sampled
    state.t += 1
    return state


def mwu_update(state: RegretState, rewards) -> RegretState:
    """Full-feedback update: S += X elementwise."""
    x = np.asarray(rewards, dtype=float)
    if x.shape != (state.k,):
        raise ValueError(f"expected {state.k} rewards, got shape {x.shape}")
    state.avg_accumulator += exp3_distribution(state)
    state.cumulative += x
    state.t += 1
    return state


def average_distribution(state: RegretState) -> np.ndarray:
    """Arithmetic mean of the sampling distributions used so far."""
    if state.t == 0:
        raise ValueError("no updates yet; the average distribution is undefined")
    return state.avg_accumulator / state.t


def exp3_gamma_schedule(k: int, n_total: int) -> float:
    """gamma = min(1, sqrt(k ln k) / ((e - 1) n_total)).

    n_total is the planned number of updates, standing in for the estimated
    cumulative-regret bound the schedule was stated with.
    """
    if k < 2:
        raise ValueError("schedule needs k >= 2")
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    return min(1.0, math.sqrt(k * math.log(k)) / ((math.e - 1.0) * n_total))


def classic_gamma(k: int, n_total: int) -> float:
    """Auer-style tuning gamma = min(1, sqrt(k ln k / ((e - 1) n))); stronger
    learning rates at short horizons than the printed schedule."""
    if k < 2:
        return 1.0
    return min(1.0, math.sqrt(k * math.log(k) / ((math.e - 1.0) * n_total)))


def normalize_reward(value: float, lo: float, hi: float) -> float:
    """Affine map of a payoff in [lo, hi] to [0, 1], clamped against roundoff."""
    if hi <= lo:
        return 0.5
    return min(1.0, max(0.0, (value - lo) / (hi - lo)))
