"""Exact population oracles on matrix games: the plain double-oracle loop
and its anytime variant with one-sided restricted games."""

from __future__ import annotations

import time

from ..games.matrix import MatrixGame
from ..solvers import (
    best_response_matrix,
    restricted_ado,
    restricted_do,
    solve_matrix_nash,
)
from .traces import IterationRecord, Population, RunTrace, pad_distribution


class _MatrixOracleRunner:
    """Shared loop: solve a restricted game, measure, expand with novel BRs."""

    algorithm = "?"

    def __init__(self, game: MatrixGame, init_pops=None, tol: float = 1e-9, seed: int = 0):
        self.game = game
        self.tol = float(tol)
        self.seed = int(seed)
        init_rows, init_cols = init_pops if init_pops is not None else ([0], [0])
        self.pops = (Population(init_rows), Population(init_cols))
        self.iteration = 0
        self.br_calls = 0
        self.trace = RunTrace(self.algorithm, game.name, seed)
        self._last_profile = None

    def config_dict(self) -> dict:
        return {"tol": self.tol, "seed": self.seed}

    def _solve_restricted(self):
        """Return (x_full, y_full, restricted_value_p1, restricted_value_p2)."""
        raise NotImplementedError

    def step(self) -> bool:
        """One outer iteration; False once terminated."""
        started = time.perf_counter()
        x_full, y_full, rv1, rv2 = self._solve_restricted()
        br_row = best_response_matrix(
            self.game, y_full, "row", avoid=set(self.pops[0].indices())
        )
        br_col = best_response_matrix(
            self.game, x_full, "col", avoid=set(self.pops[1].indices())
        )
        self.br_calls += 2
        exploit = br_row.value - br_col.value
        self._last_profile = (x_full.tolist(), y_full.tolist())
        self.trace.records.append(
            IterationRecord(
                iteration=self.iteration,
                exploitability=exploit,
                restricted_value_p1=rv1,
                restricted_value_p2=rv2,
                pop_size_p1=len(self.pops[0]),
                pop_size_p2=len(self.pops[1]),
                br_calls=self.br_calls,
                regret_updates=0,
                q_episodes=0,
                wall_ms=(time.perf_counter() - started) * 1000.0,
            )
        )
        self.iteration += 1
        if exploit <= self.tol:
            self.trace.termination = "exploitability<=tol"
            return False
        added = False
        if br_row.novel:
            added = self.pops[0].add(br_row.index) or added
        if br_col.novel:
            added = self.pops[1].add(br_col.index) or added
        if not added:
            self.trace.termination = "no novel best response"
            return False
        return True

    def run(self, max_iters: int) -> RunTrace:
        for _ in range(int(max_iters)):
            if not self.step():
                break
        if self._last_profile is not None:
            self.trace.final_distribution_p1 = list(self._last_profile[0])
            self.trace.final_distribution_p2 = list(self._last_profile[1])
        return self.trace


class DoRunner(_MatrixOracleRunner):
    """Double oracle: both players restricted to their populations; the
    restricted equilibrium can become more exploitable as the game grows."""

    algorithm = "do"

    def _solve_restricted(self):
        rows, cols = self.pops[0].indices(), self.pops[1].indices()
        sub = restricted_do(self.game, rows, cols)
        sol = solve_matrix_nash(sub.matrix, self.tol)
        x_full = pad_distribution(sol.row_strategy, rows, self.game.row_count)
        y_full = pad_distribution(sol.col_strategy, cols, self.game.col_count)
        return x_full, y_full, sol.value, -sol.value


class AdoRunner(_MatrixOracleRunner):
    """Anytime double oracle: each player's mixture comes from their own
    one-sided restricted game (opponent unrestricted), so the reported
    profile is the least-exploitable mixture each population supports and
    its exploitability never increases."""

    algorithm = "ado"

    def _solve_restricted(self):
        rows, cols = self.pops[0].indices(), self.pops[1].indices()
        sol_rows = solve_matrix_nash(
            restricted_ado(self.game, rows, "row").matrix, self.tol
        )
        sol_cols = solve_matrix_nash(
            restricted_ado(self.game, cols, "col").matrix, self.tol
        )
        x_full = pad_distribution(sol_rows.row_strategy, rows, self.game.row_count)
        y_full = pad_distribution(sol_cols.col_strategy, cols, self.game.col_count)
        # Player 2's value of their own restricted game is the negated matrix
        # value (the matrix is in row-player units).
        return x_full, y_full, sol_rows.value, -sol_cols.value


def run_do(game: MatrixGame, init_pops=None, max_iters: int = 1000, tol: float = 1e-9) -> RunTrace:
    return DoRunner(game, init_pops, tol).run(max_iters)


def run_ado(game: MatrixGame, init_pops=None, max_iters: int = 1000, tol: float = 1e-9) -> RunTrace:
    return AdoRunner(game, init_pops, tol).run(max_iters)
