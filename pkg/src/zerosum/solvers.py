"""Exact oracles: matrix Nash via LP, best responses, exploitability, and
restricted-game construction for the population meta-algorithms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rng_mod
from .errors import CertificationError
from .games.matrix import MatrixGame, MixedStrategy, _as_weights
from .games.tree import (
    BehaviorPolicy,
    Chance,
    Decision,
    GameTree,
    Terminal,
    evaluate_tree,
    playout,
)
from .lp import solve_zero_sum_lp

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class NashSolution:
    """Certified equilibrium of a payoff matrix (value is the row player's)."""

    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    value: float

    def to_json_dict(self) -> dict:
        return {
            "row_strategy": self.row_strategy.weights.tolist(),
            "col_strategy": self.col_strategy.weights.tolist(),
            "value": self.value,
        }


def solve_matrix_nash(game: MatrixGame, tol: float = 1e-9) -> NashSolution:
    """Solve the zero-sum matrix game exactly by LP.

    The solution is certified before it is returned: neither player may gain
    more than `tol` by a pure deviation, otherwise the solve is retried under
    Bland's rule and, failing that, CertificationError is raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = game.payoff
    if not np.all(np.isfinite(a)):
        raise ValueError("payoff entries must be finite")

    def certified(x, y, value):
        row_gain = float(np.max(a @ y)) - value
        col_gain = value - float(np.min(x @ a))
        return row_gain <= tol and col_gain <= tol

    x, y, value = solve_zero_sum_lp(a)
    if not certified(x, y, value):
        x, y, value = solve_zero_sum_lp(a, bland_after=0)
        if not certified(x, y, value):
            raise CertificationError(
                f"LP solution failed its {tol:g}-equilibrium certificate"
            )
    return NashSolution(MixedStrategy(x), MixedStrategy(y), value)


@dataclass(frozen=True)
class BestResponse:
    """A pure best response.

    `value` is the row player's expected payoff at the best-response profile
    (the responder's own payoff is `value` for the row side and `-value` for
    the column side). `novel` is False when every maximizer was in `avoid`.
    """

    index: int
    value: float
    novel: bool

    def responder_value(self, side: str) -> float:
        return self.value if side == "row" else -self.value


def best_response_matrix(
    game: MatrixGame, opponent, side: str, avoid=frozenset(), window: float = _TIE_TOL
) -> BestResponse:
    """Best pure response for `side` against the opponent's mixed strategy.

    Among maximizers within `window` of the best value (default 1e-12, i.e.
    exact ties), an index outside `avoid` is preferred (novelty); remaining
    ties go to the lowest index, highest value first when the window is
    widened. `value` is always the true best-response value.
    """
    w = _as_weights(opponent)
    if side == "row":
        if w.size != game.col_count:
            raise ValueError("opponent strategy must be over columns")
        gains = game.payoff @ w
    elif side == "col":
        if w.size != game.row_count:
            raise ValueError("opponent strategy must be over rows")
        gains = -(w @ game.payoff)
    else:
        raise ValueError("side must be 'row' or 'col'")
    best = float(np.max(gains))
    candidates = sorted(
        (int(i) for i in np.flatnonzero(gains >= best - max(window, _TIE_TOL))),
        key=lambda i: (-gains[i], i),
    )
    fresh = [i for i in candidates if i not in avoid]
    if fresh:
        index, novel = fresh[0], True
    else:
        index, novel = candidates[0], False
    row_value = best if side == "row" else -best
    return BestResponse(index, row_value, novel)


def best_response_tree(
    game: GameTree,
    opponent: BehaviorPolicy,
    responder: int,
    avoid_keys=None,
    novelty_window: float = 0.0,
) -> tuple[BehaviorPolicy, float]:
    """Exact deterministic best response against a fixed opponent policy.

    One bottom-up pass over the responder's infosets in decreasing
    own-decision depth: each action's value is the opponent-and-chance-reach
    weighted sum over the infoset's member histories, ties broken toward the
    lowest action index. Returns (policy, responder's expected root value).

    When `avoid_keys` (policy action-map keys) is given and the exact best
    response is already in it, the cheapest single action swap at an infoset
    that is reachable both by the policy's own play and by chance/opponent,
    costing at most `novelty_window` in root value, is applied to produce a
    novel epsilon-best response. The returned value is always the exact
    best-response value.
    """
    if responder not in (1, 2):
        raise ValueError("responder must be 1 or 2")
    opp = 3 - responder
    if opponent.owner != opp:
        raise ValueError(f"opponent policy must belong to player {opp}")
    nodes = game.nodes
    sign = 1.0 if responder == 1 else -1.0

    # Opponent-and-chance reach probabilities, root downwards.
    reach = np.zeros(len(nodes))
    reach[game.root] = 1.0
    stack = [game.root]
    while stack:
        idx = stack.pop()
        node = nodes[idx]
        if isinstance(node, Terminal):
            continue
        r = reach[idx]
        if isinstance(node, Chance):
            for p, child in zip(node.probs, node.children):
                reach[child] = r * p
                if r * p:
                    stack.append(child)
                elif not isinstance(nodes[child], Terminal):
                    stack.append(child)
        elif node.player == opp:
            probs = opponent.prob_vector(node.infoset) if r else None
            for a, child in enumerate(node.children):
                p = probs[a] if r else 0.0
                reach[child] = r * p
                if not isinstance(nodes[child], Terminal):
                    stack.append(child)
        else:
            for child in node.children:
                reach[child] = r
                if not isinstance(nodes[child], Terminal):
                    stack.append(child)

    chosen: dict[int, int] = {}
    memo: dict[int, float] = {}

    def value(idx: int) -> float:
        got = memo.get(idx)
        if got is not None:
            return got
        node = nodes[idx]
        if isinstance(node, Terminal):
            v = sign * node.payoff
        elif isinstance(node, Chance):
            v = sum(p * value(c) for p, c in zip(node.probs, node.children) if p)
        elif node.player == responder:
            v = value(node.children[chosen[node.infoset]])
        else:
            if reach[idx] > 0.0:
                probs = opponent.prob_vector(node.infoset)
                v = sum(p * value(c) for p, c in zip(probs, node.children) if p)
            else:
                v = 0.0
        memo[idx] = v
        return v

    infosets = sorted(
        game.infosets(responder),
        key=lambda s: (-len(game.own_sequence(responder, s)), s),
    )
    all_values: dict[int, np.ndarray] = {}
    for s in infosets:
        k = len(game.infoset_actions(responder, s))
        action_values = np.zeros(k)
        for idx in game.infoset_nodes(responder, s):
            if reach[idx] == 0.0:
                continue
            node = nodes[idx]
            for a in range(k):
                action_values[a] += reach[idx] * value(node.children[a])
        chosen[s] = int(np.argmax(action_values))
        all_values[s] = action_values

    root_value = float(value(game.root))
    if avoid_keys:
        _swap_for_novelty(game, responder, reach, chosen, all_values, avoid_keys, novelty_window)

    probs_out = {}
    for s, pick in chosen.items():
        one_hot = np.zeros(len(game.infoset_actions(responder, s)))
        one_hot[pick] = 1.0
        probs_out[s] = one_hot
    return BehaviorPolicy(responder, probs_out), root_value


def _swap_for_novelty(game, responder, reach, chosen, all_values, avoid_keys, window):
    """If the argmax action map is in `avoid_keys`, apply the cheapest
    value-relevant single-action swap within `window` that leaves it."""
    key = tuple((s, a) for s, a in sorted(chosen.items()))
    if key not in avoid_keys:
        return
    key_map = dict(key)
    best_swap = None
    for s, q in all_values.items():
        if not any(reach[idx] > 0.0 for idx in game.infoset_nodes(responder, s)):
            continue
        if any(chosen[s2] != a2 for s2, a2 in game.own_sequence(responder, s)):
            continue
        c = chosen[s]
        for a in range(len(q)):
            if a == c:
                continue
            loss = float(q[c] - q[a])
            if loss > window:
                continue
            swapped = tuple(
                (s2, a if s2 == s else key_map[s2]) for s2 in sorted(key_map)
            )
            if swapped in avoid_keys:
                continue
            if best_swap is None or (loss, s, a) < best_swap:
                best_swap = (loss, s, a)
    if best_swap is not None:
        chosen[best_swap[1]] = best_swap[2]


def exploitability(game, strategy_1, strategy_2) -> float:
    """Sum of both players' best-response values against the profile.

    For a MatrixGame the profile is a pair of mixed strategies; for a
    GameTree it is a pair of behavior policies (merge population mixtures
    first). Zero exactly at a Nash equilibrium; always >= 0 up to oracle
    tolerance in zero-sum games.
    """
    if isinstance(game, MatrixGame):
        x, y = _as_weights(strategy_1), _as_weights(strategy_2)
        row_br = best_response_matrix(game, y, "row")
        col_br = best_response_matrix(game, x, "col")
        return row_br.value - col_br.value
    _, v1 = best_response_tree(game, strategy_2, responder=1)
    _, v2 = best_response_tree(game, strategy_1, responder=2)
    return v1 + v2


@dataclass(frozen=True)
class RestrictedGame:
    """A submatrix plus the population indices it was built from; a label of
    None marks the full, unrestricted action space."""

    matrix: MatrixGame
    row_labels: tuple[int, ...] | None
    col_labels: tuple[int, ...] | None


def _check_indices(indices, bound, what):
    indices = tuple(int(i) for i in indices)
    if not indices:
        raise ValueError(f"{what} population is empty")
    for i in indices:
        if not 0 <= i < bound:
            raise IndexError(f"{what} index {i} out of range (size {bound})")
    return indices


def restricted_do(game: MatrixGame, pop_rows, pop_cols) -> RestrictedGame:
    """Population-vs-population restricted game (both players restricted)."""
    rows = _check_indices(pop_rows, game.row_count, "row")
    cols = _check_indices(pop_cols, game.col_count, "col")
    sub = game.payoff[np.ix_(rows, cols)]
    return RestrictedGame(MatrixGame(sub), rows, cols)


def restricted_ado(game: MatrixGame, pop, side: str) -> RestrictedGame:
    """One-sided restricted game: `side` restricted to `pop`, opponent free.

    Solving the result with solve_matrix_nash realizes the restricted
    player's max-min over the full opponent space; the restricted player's
    equilibrium mixture is their least-exploitable distribution.
    """
    if side == "row":
        rows = _check_indices(pop, game.row_count, "row")
        return RestrictedGame(MatrixGame(game.payoff[rows, :]), rows, None)
    if side == "col":
        cols = _check_indices(pop, game.col_count, "col")
        return RestrictedGame(MatrixGame(game.payoff[:, cols]), None, cols)
    raise ValueError("side must be 'row' or 'col'")


class EmpiricalPayoffTable:
    """Population-vs-population payoff estimates, extended incrementally.

    Entries are cached by (row position, column position), so each PSRO
    iteration only evaluates the new row and column. In "simulated" mode
    every entry gets its own seeded stream, making the table independent of
    evaluation order.
    """

    def __init__(self, game: GameTree, mode: str = "exact", episodes: int = 1000, seed: int = 0):
        if mode not in ("exact", "simulated"):
            raise ValueError("mode must be 'exact' or 'simulated'")
        self.game = game
        self.mode = mode
        self.episodes = int(episodes)
        self.seed = int(seed)
        self._cache: dict[tuple[int, int], float] = {}
        self.episodes_spent = 0

    def _entry(self, k: int, l: int, p1: BehaviorPolicy, p2: BehaviorPolicy) -> float:
        got = self._cache.get((k, l))
        if got is None:
            if self.mode == "exact":
                got = evaluate_tree(self.game, p1, p2)
            else:
                gen = rng_mod.stream(self.seed, "empirical", k, l)
                total = 0.0
                for _ in range(self.episodes):
                    total += playout(self.game, p1, p2, gen)
                got = total / self.episodes
                self.episodes_spent += self.episodes
            self._cache[(k, l)] = got
        return got

    def matrix(self, pop1, pop2) -> MatrixGame:
        payoff = np.empty((len(pop1), len(pop2)))
        for k, p1 in enumerate(pop1):
            for l, p2 in enumerate(pop2):
                payoff[k, l] = self._entry(k, l, p1, p2)
        return MatrixGame(payoff)


def empirical_payoff_matrix(
    game: GameTree,
    pop1,
    pop2,
    mode: str = "exact",
    episodes: int = 1000,
    seed: int = 0,
) -> MatrixGame:
    """One-shot empirical game matrix; see EmpiricalPayoffTable for the
    incremental form used inside PSRO."""
    if not pop1 or not pop2:
        raise ValueError("populations must be non-empty")
    return EmpiricalPayoffTable(game, mode, episodes, seed).matrix(pop1, pop2)
