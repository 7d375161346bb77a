"""Population loops with learned best responses on extensive-form games.

PsroTabularRunner is the double-oracle approximation: restricted equilibria
are solved on the empirical payoff table and the new population members are
Q-learner greedy policies trained against the merged restricted mixture.

ApsroRunner is the anytime variant: per player, a no-regret learner over the
population is updated against a single continually trained exploiter, and
the exploiter's greedy policy joins the opposite population. Exact expected
payoffs for the sampled population member are obtained by full tree
traversal and normalized to [0, 1] before the regret update.
"""

from __future__ import annotations

import time

import numpy as np

from .. import rng as rng_mod
from ..games.tree import GameTree, deterministic_policy, merge_population, evaluate_tree
from ..qlearn import QLearner, qlearner_train
from ..regret import average_distribution, exp3_distribution, exp3_update, normalize_reward
from ..solvers import EmpiricalPayoffTable, best_response_tree, solve_matrix_nash
from .rmbr import make_regret_state, measure_tree_profile, sample_index
from .traces import IterationRecord, Population, RunTrace


def _default_tree_pops(game: GameTree):
    return (
        [deterministic_policy(game, 1)],
        [deterministic_policy(game, 2)],
    )


class PsroTabularRunner:
    """PSRO with exact or simulated empirical payoffs and tabular Q-learning
    best responses (an exact-oracle mode reduces it to the double-oracle
    loop for tests and baselines)."""

    algorithm = "psro_tabular"

    def __init__(
        self,
        game: GameTree,
        init_pops=None,
        q_episodes: int = 500_000,
        q_step_size: float = 0.1,
        q_epsilon: float = 0.2,
        payoff_mode: str = "exact",
        payoff_episodes: int = 1000,
        oracle_br: bool = False,
        tol: float = 1e-9,
        seed: int = 0,
    ):
        self.game = game
        self.q_episodes_per_iter = int(q_episodes)
        self.q_step_size = q_step_size
        self.q_epsilon = q_epsilon
        self.oracle_br = bool(oracle_br)
        self.tol = float(tol)
        self.seed = int(seed)
        init = init_pops if init_pops is not None else _default_tree_pops(game)
        self.pops = (Population(init[0]), Population(init[1]))
        self.table = EmpiricalPayoffTable(
            game, payoff_mode, payoff_episodes, seed=seed
        )
        self.iteration = 0
        self.br_calls = 0
        self.q_episodes = 0
        self.trace = RunTrace(self.algorithm, game.name, self.seed)
        self._last_meta = None

    def config_dict(self) -> dict:
        return {
            "q_episodes": self.q_episodes_per_iter,
            "q_step_size": self.q_step_size,
            "q_epsilon": self.q_epsilon,
            "payoff_mode": self.table.mode,
            "payoff_episodes": self.table.episodes,
            "oracle_br": self.oracle_br,
            "tol": self.tol,
            "seed": self.seed,
        }

    def step(self) -> bool:
        started = time.perf_counter()
        empirical = self.table.matrix(self.pops[0].members, self.pops[1].members)
        sol = solve_matrix_nash(empirical, max(self.tol, 1e-9))
        meta1 = sol.row_strategy.weights
        meta2 = sol.col_strategy.weights
        merged1 = merge_population(self.game, self.pops[0].members, meta1)
        merged2 = merge_population(self.game, self.pops[1].members, meta2)
        exploit, v1, v2, br_pol1, br_pol2 = measure_tree_profile(
            self.game, merged1, merged2
        )
        if self.oracle_br:
            self.br_calls += 2
        self._last_meta = (meta1.tolist(), meta2.tolist())
        self.trace.records.append(
            IterationRecord(
                iteration=self.iteration,
                exploitability=exploit,
                restricted_value_p1=sol.value,
                restricted_value_p2=-sol.value,
                pop_size_p1=len(self.pops[0]),
                pop_size_p2=len(self.pops[1]),
                br_calls=self.br_calls,
                regret_updates=0,
                q_episodes=self.q_episodes,
                wall_ms=(time.perf_counter() - started) * 1000.0,
            )
        )
        iteration = self.iteration
        self.iteration += 1
        if self.oracle_br:
            if exploit <= self.tol:
                self.trace.termination = "exploitability<=tol"
                return False
            new1, new2 = br_pol1, br_pol2
        else:
            new1 = self._train_exploiter(1, merged2, iteration)
            new2 = self._train_exploiter(2, merged1, iteration)
        added = self.pops[0].add(new1)
        added = self.pops[1].add(new2) or added
        if not added and self.oracle_br:
            self.trace.termination = "no novel best response"
            return False
        return True

    def _train_exploiter(self, player: int, merged_opponent, iteration: int):
        learner = QLearner(self.game, player, self.q_step_size, self.q_epsilon)
        rng = rng_mod.stream(self.seed, "psro", iteration, "q", player)
        qlearner_train(
            learner,
            self.game,
            lambda _rng: merged_opponent,
            self.q_episodes_per_iter,
            rng,
        )
        self.q_episodes += self.q_episodes_per_iter
        return learner.greedy_policy()

    def run(self, max_iters: int) -> RunTrace:
        for _ in range(int(max_iters)):
            if not self.step():
                break
        if self._last_meta is not None:
            self.trace.final_distribution_p1 = self._last_meta[0]
            self.trace.final_distribution_p2 = self._last_meta[1]
        return self.trace


class ApsroRunner:
    """Anytime PSRO with tabular Q-learning exploiters.

    Per iteration and per player i: the restricted mixture over player i's
    population starts uniform and is updated by Exp3 in batches, interleaved
    with batches of Q-learning episodes in which the exploiter (playing as
    the other player) trains against a population member freshly sampled
    from the current mixture each episode. The Exp3 reward for the sampled
    member is its exact expected payoff against the exploiter's current
    greedy policy. The reported mixture is the time-average iterate.
    """

    algorithm = "apsro"

    def __init__(
        self,
        game: GameTree,
        init_pops=None,
        n_regret_updates: int = 50_000,
        q_episodes: int = 500_000,
        regret_batch: int = 10,
        q_batch: int = 100,
        q_step_size: float = 0.1,
        q_epsilon: float = 0.2,
        eta: float | None = None,
        gamma: float | None = None,
        gamma_mode: str = "classic",
        oracle_br: bool = False,
        q_warm_start: bool = False,
        tol: float = 0.0,
        seed: int = 0,
    ):
        self.game = game
        self.n_regret_updates = int(n_regret_updates)
        self.q_episodes_per_iter = int(q_episodes)
        self.regret_batch = int(regret_batch)
        self.q_batch = int(q_batch)
        self.q_step_size = q_step_size
        self.q_epsilon = q_epsilon
        self.eta = eta
        self.gamma = gamma
        self.gamma_mode = gamma_mode
        self.oracle_br = bool(oracle_br)
        self.q_warm_start = bool(q_warm_start)
        self.tol = float(tol)
        self.seed = int(seed)
        init = init_pops if init_pops is not None else _default_tree_pops(game)
        self.pops = (Population(init[0]), Population(init[1]))
        self.iteration = 0
        self.br_calls = 0
        self.regret_updates = 0
        self.q_episodes = 0
        self.trace = RunTrace(self.algorithm, game.name, self.seed)
        self._warm: dict[int, QLearner] = {}
        self._last_average = None

    def config_dict(self) -> dict:
        return {
            "n_regret_updates": self.n_regret_updates,
            "q_episodes": self.q_episodes_per_iter,
            "regret_batch": self.regret_batch,
            "q_batch": self.q_batch,
            "q_step_size": self.q_step_size,
            "q_epsilon": self.q_epsilon,
            "eta": self.eta,
            "gamma": self.gamma,
            "gamma_mode": self.gamma_mode,
            "oracle_br": self.oracle_br,
            "q_warm_start": self.q_warm_start,
            "tol": self.tol,
            "seed": self.seed,
        }

    def _inner_loop(self, restricted_player: int, iteration: int):
        """Train one side's mixture against its dedicated exploiter.

        Returns (average mixture over the restricted player's population,
        exploiter policy for the other player).
        """
        pop = self.pops[restricted_player - 1].members
        k = len(pop)
        exploiter_player = 3 - restricted_player
        lo, hi = self.game.payoff_bounds()
        bounds = (lo, hi) if restricted_player == 1 else (-hi, -lo)
        state = make_regret_state(
            k, "exp3", max(self.n_regret_updates, 1), self.eta, self.gamma, self.gamma_mode
        )
        rng_q = rng_mod.stream(self.seed, "apsro", iteration, "q", restricted_player)
        rng_s = rng_mod.stream(self.seed, "apsro", iteration, "sample", restricted_player)

        learner = None
        if not self.oracle_br:
            learner = self._warm.get(exploiter_player) if self.q_warm_start else None
            if learner is None:
                learner = QLearner(
                    self.game, exploiter_player, self.q_step_size, self.q_epsilon
                )

        def sample_member(rng):
            return pop[sample_index(rng, exp3_distribution(state))]

        updates_left = self.n_regret_updates
        episodes_left = 0 if self.oracle_br else self.q_episodes_per_iter
        exploiter_policy = None
        while updates_left > 0 or episodes_left > 0:
            if episodes_left > 0:
                batch = min(self.q_batch, episodes_left)
                qlearner_train(learner, self.game, sample_member, batch, rng_q)
                episodes_left -= batch
                self.q_episodes += batch
                exploiter_policy = None
            if updates_left > 0:
                if exploiter_policy is None or self.oracle_br:
                    if self.oracle_br:
                        merged = merge_population(
                            self.game, pop, exp3_distribution(state)
                        )
                        exploiter_policy, _ = best_response_tree(
                            self.game, merged, exploiter_player
                        )
                        self.br_calls += 1
                    else:
                        exploiter_policy = learner.greedy_policy()
                batch = min(self.regret_batch, updates_left)
                values: dict[int, float] = {}
                for _ in range(batch):
                    dist = exp3_distribution(state)
                    arm = sample_index(rng_s, dist)
                    value = values.get(arm)
                    if value is None:
                        if restricted_player == 1:
                            value = evaluate_tree(self.game, pop[arm], exploiter_policy)
                        else:
                            value = -evaluate_tree(self.game, exploiter_policy, pop[arm])
                        values[arm] = value
                    exp3_update(
                        state,
                        arm,
                        normalize_reward(value, *bounds),
                        float(dist[arm]),
                    )
                updates_left -= batch
                self.regret_updates += batch
        if state.t:
            average = average_distribution(state)
        else:
            average = np.full(k, 1.0 / k)
        if not self.oracle_br:
            if self.q_warm_start:
                self._warm[exploiter_player] = learner
            exploiter_policy = learner.greedy_policy()
        elif exploiter_policy is None:
            merged = merge_population(self.game, pop, exp3_distribution(state))
            exploiter_policy, _ = best_response_tree(self.game, merged, exploiter_player)
            self.br_calls += 1
        return average, exploiter_policy

    def step(self) -> bool:
        started = time.perf_counter()
        iteration = self.iteration
        avg1, exploiter_of_1 = self._inner_loop(1, iteration)
        avg2, exploiter_of_2 = self._inner_loop(2, iteration)
        merged1 = merge_population(self.game, self.pops[0].members, avg1)
        merged2 = merge_population(self.game, self.pops[1].members, avg2)
        exploit, v1, v2, _, _ = measure_tree_profile(self.game, merged1, merged2)
        self._last_average = (avg1.tolist(), avg2.tolist())
        self.trace.records.append(
            IterationRecord(
                iteration=iteration,
                exploitability=exploit,
                restricted_value_p1=v1,
                restricted_value_p2=v2,
                pop_size_p1=len(self.pops[0]),
                pop_size_p2=len(self.pops[1]),
                br_calls=self.br_calls,
                regret_updates=self.regret_updates,
                q_episodes=self.q_episodes,
                wall_ms=(time.perf_counter() - started) * 1000.0,
            )
        )
        self.iteration += 1
        if self.tol > 0.0 and exploit <= self.tol:
            self.trace.termination = "exploitability<=tol"
            return False
        # The exploiter trained against player i's mixture plays as the other
        # player and joins that player's population.
        self.pops[1].add(exploiter_of_1)
        self.pops[0].add(exploiter_of_2)
        return True

    def run(self, max_iters: int) -> RunTrace:
        for _ in range(int(max_iters)):
            if not self.step():
                break
        if self._last_average is not None:
            self.trace.final_distribution_p1 = self._last_average[0]
            self.trace.final_distribution_p2 = self._last_average[1]
        return self.trace


def run_psro_tabular(game: GameTree, init_pops=None, outer_iters: int = 20, **kwargs) -> RunTrace:
    return PsroTabularRunner(game, init_pops, **kwargs).run(outer_iters)


def run_apsro(game: GameTree, init_pops=None, outer_iters: int = 20, **kwargs) -> RunTrace:
    return ApsroRunner(game, init_pops, **kwargs).run(outer_iters)
