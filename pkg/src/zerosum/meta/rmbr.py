"""Regret minimization against best responses, and the double-oracle loop
built on it.

Each player runs a no-regret learner (Exp3 or MWU) over their population
while the unrestricted opponent repeatedly best-responds to the learner's
current mixture; the learner's time-average converges to the population's
least-exploitable mixture. The outer loop re-runs this from uniform every
iteration and expands both populations with the final best responses.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .. import rng as rng_mod
from ..games.matrix import MatrixGame
from ..games.tree import GameTree, deterministic_policy, evaluate_tree, merge_population
from ..regret import (
    RegretState,
    average_distribution,
    classic_gamma,
    exp3_distribution,
    exp3_gamma_schedule,
    exp3_update,
    mwu_state,
    mwu_update,
    normalize_reward,
)
from ..solvers import best_response_matrix, best_response_tree
from .traces import IterationRecord, Population, RunTrace, pad_distribution


def sample_index(rng: np.random.Generator, dist: np.ndarray) -> int:
    u = rng.random()
    acc = 0.0
    for i, p in enumerate(dist):
        acc += p
        if u < acc:
            return i
    return len(dist) - 1


def make_regret_state(k, rm, n_updates, eta=None, gamma=None, gamma_mode="paper") -> RegretState:
    """Build the inner learner; gamma_mode 'paper' uses the printed schedule,
    'classic' the Auer-style tuning (stronger at short horizons)."""
    if rm == "mwu":
        return mwu_state(k, 0.1 if eta is None else eta)
    if rm != "exp3":
        raise ValueError("rm must be 'exp3' or 'mwu'")
    if gamma is None:
        if k < 2:
            gamma = 0.0
        elif gamma_mode == "paper":
            gamma = exp3_gamma_schedule(k, n_updates)
        elif gamma_mode == "classic":
            gamma = classic_gamma(k, n_updates)
        else:
            raise ValueError("gamma_mode must be 'paper' or 'classic'")
    if eta is None:
        eta = gamma / k if gamma > 0 else 1.0 / max(k, 1)
    return RegretState(k=k, eta=eta, gamma=gamma)


class _RmbrSide:
    """One player's inner state: learner over their population plus the
    opponent's cached best response and the member-vs-BR payoff cache."""

    def __init__(self, game, player, pop, rm, n_updates, eta, gamma, gamma_mode):
        self.game = game
        self.player = player
        self.pop = list(pop)
        self.rm = rm
        self.state = make_regret_state(
            len(self.pop), rm, n_updates, eta, gamma, gamma_mode
        )
        if isinstance(game, MatrixGame):
            lo, hi = game.payoff_bounds()
        else:
            lo, hi = game.payoff_bounds()
        self.bounds = (lo, hi) if player == 1 else (-hi, -lo)
        self.br = None
        self._values = None
        self.br_calls = 0

    def distribution(self) -> np.ndarray:
        return exp3_distribution(self.state)

    def refresh_br(self, br_oracle=None):
        dist = self.distribution()
        if br_oracle is not None:
            self.br = br_oracle(self.player, dist, self.pop)
        elif isinstance(self.game, MatrixGame):
            side = "col" if self.player == 1 else "row"
            axis = self.game.row_count if self.player == 1 else self.game.col_count
            full = pad_distribution(dist, self.pop, axis)
            self.br = best_response_matrix(self.game, full, side).index
        else:
            merged = merge_population(self.game, self.pop, dist)
            self.br, _ = best_response_tree(self.game, merged, 3 - self.player)
        self.br_calls += 1
        self._values = [None] * len(self.pop)

    def _member_value(self, arm: int) -> float:
        got = self._values[arm]
        if got is None:
            if isinstance(self.game, MatrixGame):
                if self.player == 1:
                    got = float(self.game.payoff[self.pop[arm], self.br])
                else:
                    got = -float(self.game.payoff[self.br, self.pop[arm]])
            else:
                member = self.pop[arm]
                if self.player == 1:
                    got = evaluate_tree(self.game, member, self.br)
                else:
                    got = -evaluate_tree(self.game, self.br, member)
            self._values[arm] = got
        return got

    def update(self, rng) -> None:
        lo, hi = self.bounds
        if self.rm == "mwu":
            rewards = np.array(
                [
                    normalize_reward(self._member_value(a), lo, hi)
                    for a in range(len(self.pop))
                ]
            )
            mwu_update(self.state, rewards)
        else:
            dist = self.distribution()
            arm = sample_index(rng, dist)
            reward = normalize_reward(self._member_value(arm), lo, hi)
            exp3_update(self.state, arm, reward, float(dist[arm]))


@dataclass
class RmbrResult:
    last: tuple[np.ndarray, np.ndarray]
    average: tuple[np.ndarray, np.ndarray]
    br_calls: int
    regret_updates: int


def run_rmbr(
    game,
    populations,
    n_updates: int,
    br_every: int = 1,
    rm: str = "exp3",
    eta: float | None = None,
    gamma: float | None = None,
    gamma_mode: str = "paper",
    rng: np.random.Generator | None = None,
    br_oracle=None,
) -> RmbrResult:
    """Inner loop: both players independently run their learner against a
    periodically recomputed opponent best response.

    Returns last-iterate and time-average distributions over each
    population; the time-average carries the regret-to-exploitability
    guarantee. `br_oracle(player, dist, pop)`, when given, replaces the
    exact oracle (matrix: return an opponent index; tree: a policy).
    """
    if br_every < 1:
        raise ValueError("br_every must be >= 1")
    if rng is None:
        rng = rng_mod.stream(0, "rmbr")
    sides = [
        _RmbrSide(game, player, pop, rm, n_updates, eta, gamma, gamma_mode)
        for player, pop in ((1, populations[0]), (2, populations[1]))
    ]
    for t in range(int(n_updates)):
        for side in sides:
            if t % br_every == 0:
                side.refresh_br(br_oracle)
            side.update(rng)
    last = tuple(side.distribution() for side in sides)
    average = tuple(
        average_distribution(side.state)
        if side.state.t
        else np.full(len(side.pop), 1.0 / len(side.pop))
        for side in sides
    )
    return RmbrResult(
        last=last,
        average=average,
        br_calls=sum(side.br_calls for side in sides),
        regret_updates=sum(side.state.t for side in sides),
    )


def measure_matrix_profile(game: MatrixGame, x_full, y_full, avoid_rows=frozenset(), avoid_cols=frozenset()):
    """(exploitability, guaranteed value p1, guaranteed value p2, row BR,
    col BR) for a full-space mixed profile. The avoid sets steer tie-breaking
    of the returned best responses toward novel strategies; the values are
    unaffected."""
    br_row = best_response_matrix(game, y_full, "row", avoid=avoid_rows)
    br_col = best_response_matrix(game, x_full, "col", avoid=avoid_cols)
    return (
        float(br_row.value - br_col.value),
        float(br_col.value),
        float(-br_row.value),
        br_row,
        br_col,
    )


def measure_tree_profile(game: GameTree, merged1, merged2):
    """Same as measure_matrix_profile for behavior-policy profiles."""
    br_pol1, v1 = best_response_tree(game, merged2, responder=1)
    br_pol2, v2 = best_response_tree(game, merged1, responder=2)
    return float(v1 + v2), float(-v2), float(-v1), br_pol1, br_pol2


class RmbrDoRunner:
    """Outer double-oracle loop whose restricted mixtures come from run_rmbr.

    Terminates when the restricted-game gap -(g1 + g2), measured through the
    exact best responses against the reported average mixtures, drops to
    `epsilon` (the reported profile's exploitability), or when no novel best
    response exists.
    """

    algorithm = "rmbr_do"

    def __init__(
        self,
        game,
        init_pops=None,
        epsilon: float = 1e-3,
        n_updates: int = 100_000,
        br_every: int = 1_000,
        rm: str = "exp3",
        eta: float | None = None,
        gamma: float | None = None,
        gamma_mode: str = "classic",
        novelty_window: float | str = "auto",
        seed: int = 0,
    ):
        self.game = game
        self.epsilon = float(epsilon)
        self.novelty_window = novelty_window
        self.inner = dict(
            n_updates=int(n_updates),
            br_every=int(br_every),
            rm=rm,
            eta=eta,
            gamma=gamma,
            gamma_mode=gamma_mode,
        )
        self.seed = int(seed)
        if init_pops is None:
            if isinstance(game, MatrixGame):
                init_pops = ([0], [0])
            else:
                init_pops = (
                    [deterministic_policy(game, 1)],
                    [deterministic_policy(game, 2)],
                )
        self.pops = (Population(init_pops[0]), Population(init_pops[1]))
        self.iteration = 0
        self.br_calls = 0
        self.regret_updates = 0
        self.trace = RunTrace(self.algorithm, game.name, self.seed)
        self._last_average = None

    def config_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "novelty_window": self.novelty_window,
            "seed": self.seed,
            **self.inner,
        }

    def step(self) -> bool:
        started = time.perf_counter()
        rng = rng_mod.stream(self.seed, "rmbr_do", self.iteration)
        res = run_rmbr(
            self.game, (self.pops[0].members, self.pops[1].members), rng=rng, **self.inner
        )
        avg1, avg2 = res.average
        self.br_calls += res.br_calls
        self.regret_updates += res.regret_updates
        if isinstance(self.game, MatrixGame):
            x_full = pad_distribution(avg1, self.pops[0].indices(), self.game.row_count)
            y_full = pad_distribution(avg2, self.pops[1].indices(), self.game.col_count)
            exploit, v1, v2, _, _ = measure_matrix_profile(self.game, x_full, y_full)
            window = exploit if self.novelty_window == "auto" else self.novelty_window
            br_row = best_response_matrix(
                self.game, y_full, "row", avoid=set(self.pops[0].indices()), window=window
            )
            br_col = best_response_matrix(
                self.game, x_full, "col", avoid=set(self.pops[1].indices()), window=window
            )
            new_members = (br_row.index, br_col.index)
            self._last_average = (x_full.tolist(), y_full.tolist())
        else:
            merged1 = merge_population(self.game, self.pops[0].members, avg1)
            merged2 = merge_population(self.game, self.pops[1].members, avg2)
            exploit, v1, v2, _, _ = measure_tree_profile(self.game, merged1, merged2)
            window = exploit if self.novelty_window == "auto" else self.novelty_window
            br_pol1, _ = best_response_tree(
                self.game,
                merged2,
                responder=1,
                avoid_keys=self.pops[0].keys,
                novelty_window=window,
            )
            br_pol2, _ = best_response_tree(
                self.game,
                merged1,
                responder=2,
                avoid_keys=self.pops[1].keys,
                novelty_window=window,
            )
            new_members = (br_pol1, br_pol2)
            self._last_average = (avg1.tolist(), avg2.tolist())
        self.br_calls += 2
        self.trace.records.append(
            IterationRecord(
                iteration=self.iteration,
                exploitability=exploit,
                restricted_value_p1=v1,
                restricted_value_p2=v2,
                pop_size_p1=len(self.pops[0]),
                pop_size_p2=len(self.pops[1]),
                br_calls=self.br_calls,
                regret_updates=self.regret_updates,
                q_episodes=0,
                wall_ms=(time.perf_counter() - started) * 1000.0,
            )
        )
        self.iteration += 1
        gap = -(v1 + v2)
        if gap <= self.epsilon:
            self.trace.termination = "gap<=epsilon"
            return False
        # Per the restricted-game-gap termination rule, non-novel best
        # responses do not stop the loop; the populations simply stay put for
        # this iteration (approximate mixtures can break BR ties either way).
        self.pops[0].add(new_members[0])
        self.pops[1].add(new_members[1])
        return True

    def run(self, max_iters: int) -> RunTrace:
        for _ in range(int(max_iters)):
            if not self.step():
                break
        if self._last_average is not None:
            self.trace.final_distribution_p1 = self._last_average[0]
            self.trace.final_distribution_p2 = self._last_average[1]
        return self.trace


def run_rmbr_do(game, init_pops=None, outer_iters: int = 50, **kwargs) -> RunTrace:
    return RmbrDoRunner(game, init_pops, **kwargs).run(outer_iters)
