"""Extensive-form two-player zero-sum games with chance nodes.

A `GameTree` is a fully materialized tree of `Decision`, `Chance`, and
`Terminal` nodes. Players are 1 and 2; terminal payoffs are to player 1.
Information sets are per-player opaque integer ids with debug labels, and
perfect recall is validated at construction: every node of one infoset sees
the same sequence of own (infoset, action) pairs on the path from the root.

Behavior policies map each of the owner's infoset ids to a probability
vector over that infoset's legal actions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import EnumerationCapError, PolicyDomainError

PROB_TOL = 1e-12


@dataclass(frozen=True)
class Decision:
    player: int
    infoset: int
    actions: tuple[str, ...]
    children: tuple[int, ...]


@dataclass(frozen=True)
class Chance:
    probs: tuple[float, ...]
    children: tuple[int, ...]


@dataclass(frozen=True)
class Terminal:
    payoff: float


class GameTree:
    """Validated immutable game tree.

    Args:
      nodes: list of Decision/Chance/Terminal; children refer to indices.
      root: index of the root node.
      infoset_labels: {player: {infoset_id: debug label}}.
      name: optional display name.
    """

    def __init__(self, nodes, root, infoset_labels, name=""):
        self.nodes = list(nodes)
        self.root = int(root)
        self.name = name
        self.infoset_labels = {
            1: dict(infoset_labels.get(1, {})),
            2: dict(infoset_labels.get(2, {})),
        }
        self._validate_structure()
        self._index_infosets()
        self._check_perfect_recall()
        self._payoff_bounds = None

    # -- construction-time checks -------------------------------------------

    def _validate_structure(self):
        n = len(self.nodes)
        if not 0 <= self.root < n:
            raise ValueError("root index out of range")
        indegree = [0] * n
        for idx, node in enumerate(self.nodes):
            if isinstance(node, Terminal):
                if not np.isfinite(node.payoff):
                    raise ValueError(f"node {idx}: non-finite payoff")
                continue
            if isinstance(node, Chance):
                if len(node.probs) != len(node.children) or not node.children:
                    raise ValueError(f"node {idx}: probs/children mismatch")
                if any(p < 0 for p in node.probs):
                    raise ValueError(f"node {idx}: negative chance probability")
                if abs(sum(node.probs) - 1.0) > PROB_TOL:
                    raise ValueError(f"node {idx}: chance probs do not sum to 1")
            elif isinstance(node, Decision):
                if node.player not in (1, 2):
                    raise ValueError(f"node {idx}: player must be 1 or 2")
                if len(node.actions) != len(node.children) or not node.children:
                    raise ValueError(f"node {idx}: actions/children mismatch")
            else:
                raise ValueError(f"node {idx}: unknown node type {type(node)}")
            for child in node.children:
                if not 0 <= child < n:
                    raise ValueError(f"node {idx}: child index {child} out of range")
                indegree[child] += 1
        if indegree[self.root] != 0:
            raise ValueError("root must have no parent")
        bad = [i for i, d in enumerate(indegree) if d > 1]
        if bad:
            raise ValueError(f"nodes with multiple parents (not a tree): {bad[:5]}")
        # Reachability from the root; with in-degree <= 1 this implies a tree.
        seen = [False] * n
        stack = [self.root]
        while stack:
            idx = stack.pop()
            if seen[idx]:
                continue
            seen[idx] = True
            node = self.nodes[idx]
            if not isinstance(node, Terminal):
                stack.extend(node.children)
        if not all(seen):
            raise ValueError("unreachable nodes present")

    def _index_infosets(self):
        members: dict[int, dict[int, list[int]]] = {1: {}, 2: {}}
        actions: dict[int, dict[int, tuple[str, ...]]] = {1: {}, 2: {}}
        for idx, node in enumerate(self.nodes):
            if not isinstance(node, Decision):
                continue
            fixed = actions[node.player].setdefault(node.infoset, node.actions)
            if fixed != node.actions:
                raise ValueError(
                    f"infoset {node.infoset} of player {node.player} has "
                    "inconsistent legal actions"
                )
            members[node.player].setdefault(node.infoset, []).append(idx)
        for player in (1, 2):
            for infoset in members[player]:
                self.infoset_labels[player].setdefault(infoset, str(infoset))
        self._members = members
        self._actions = actions

    def _check_perfect_recall(self):
        """DFS recording each player's own (infoset, action) path; every
        member of one infoset must agree on it."""
        own_seq: dict[int, dict[int, tuple]] = {1: {}, 2: {}}
        stack = [(self.root, (), ())]
        while stack:
            idx, seq1, seq2 = stack.pop()
            node = self.nodes[idx]
            if isinstance(node, Terminal):
                continue
            if isinstance(node, Decision):
                seq = seq1 if node.player == 1 else seq2
                prev = own_seq[node.player].setdefault(node.infoset, seq)
                if prev != seq:
                    raise ValueError(
                        f"perfect recall violated at infoset {node.infoset} "
                        f"of player {node.player}"
                    )
                for a, child in enumerate(node.children):
                    nxt = seq + ((node.infoset, a),)
                    if node.player == 1:
                        stack.append((child, nxt, seq2))
                    else:
                        stack.append((child, seq1, nxt))
            else:
                for child in node.children:
                    stack.append((child, seq1, seq2))
        self._own_seq = own_seq

    # -- queries -------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def infosets(self, player: int) -> list[int]:
        return sorted(self._members[player])

    def infoset_count(self, player: int) -> int:
        return len(self._members[player])

    def infoset_nodes(self, player: int, infoset: int) -> list[int]:
        return self._members[player][infoset]

    def infoset_actions(self, player: int, infoset: int) -> tuple[str, ...]:
        return self._actions[player][infoset]

    def own_sequence(self, player: int, infoset: int) -> tuple:
        """The owner's (infoset, action) pairs on the path to this infoset."""
        return self._own_seq[player][infoset]

    def payoff_bounds(self) -> tuple[float, float]:
        """(min, max) over terminal payoffs to player 1."""
        if self._payoff_bounds is None:
            payoffs = [n.payoff for n in self.nodes if isinstance(n, Terminal)]
            self._payoff_bounds = (min(payoffs), max(payoffs))
        return self._payoff_bounds


class TreeBuilder:
    """Bottom-up construction helper; children are created before parents."""

    def __init__(self, name: str = ""):
        self.name = name
        self._nodes = []
        self._ids = {1: {}, 2: {}}
        self._labels = {1: {}, 2: {}}

    def infoset(self, player: int, label: str) -> int:
        table = self._ids[player]
        if label not in table:
            table[label] = len(table)
            self._labels[player][table[label]] = label
        return table[label]

    def terminal(self, payoff: float) -> int:
        self._nodes.append(Terminal(float(payoff)))
        return len(self._nodes) - 1

    def chance(self, probs, children) -> int:
        self._nodes.append(Chance(tuple(float(p) for p in probs), tuple(children)))
        return len(self._nodes) - 1

    def decision(self, player: int, infoset: int, actions, children) -> int:
        self._nodes.append(
            Decision(player, infoset, tuple(actions), tuple(children))
        )
        return len(self._nodes) - 1

    def build(self, root: int) -> GameTree:
        return GameTree(self._nodes, root, self._labels, name=self.name)


@dataclass(frozen=True)
class BehaviorPolicy:
    """Per-infoset action distributions for one player."""

    owner: int
    action_probs: dict[int, np.ndarray]

    def prob_vector(self, infoset: int) -> np.ndarray:
        probs = self.action_probs.get(infoset)
        if probs is None:
            raise PolicyDomainError(
                f"player {self.owner} policy has no entry for infoset {infoset}"
            )
        return probs

    def is_deterministic(self) -> bool:
        return all(np.max(p) == 1.0 for p in self.action_probs.values())

    def key(self) -> tuple:
        """Hashable identity for deterministic policies (population dedup)."""
        return tuple(
            (s, int(np.argmax(p))) for s, p in sorted(self.action_probs.items())
        )


def validate_policy(game: GameTree, policy: BehaviorPolicy) -> None:
    """Check the policy's domain is exactly the owner's infosets with valid
    probability vectors. Raises PolicyDomainError / ValueError."""
    expected = set(game.infosets(policy.owner))
    got = set(policy.action_probs)
    if got != expected:
        missing, extra = expected - got, got - expected
        raise PolicyDomainError(
            f"policy domain mismatch for player {policy.owner}: "
            f"missing={sorted(missing)[:5]} extra={sorted(extra)[:5]}"
        )
    for infoset, probs in policy.action_probs.items():
        k = len(game.infoset_actions(policy.owner, infoset))
        if probs.shape != (k,):
            raise ValueError(f"infoset {infoset}: expected {k} action probs")
        if np.any(probs < -PROB_TOL) or abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"infoset {infoset}: invalid probability vector")


def uniform_policy(game: GameTree, player: int) -> BehaviorPolicy:
    probs = {
        s: np.full(len(game.infoset_actions(player, s)), 1.0)
        / len(game.infoset_actions(player, s))
        for s in game.infosets(player)
    }
    return BehaviorPolicy(player, probs)


def deterministic_policy(
    game: GameTree, player: int, choices: dict[int, int] | None = None
) -> BehaviorPolicy:
    """One-hot policy; infosets absent from `choices` get action 0."""
    choices = choices or {}
    probs = {}
    for s in game.infosets(player):
        k = len(game.infoset_actions(player, s))
        vec = np.zeros(k)
        vec[choices.get(s, 0)] = 1.0
        probs[s] = vec
    return BehaviorPolicy(player, probs)


def evaluate_tree(game: GameTree, p1: BehaviorPolicy, p2: BehaviorPolicy) -> float:
    """Exact expected payoff to player 1 under (p1, p2).

    Full recursive traversal weighting by chance and action probabilities;
    zero-probability branches are skipped, so policies only need entries at
    reachable infosets.
    """
    if p1.owner != 1 or p2.owner != 2:
        raise ValueError("evaluate_tree expects (player-1 policy, player-2 policy)")
    nodes = game.nodes
    probs_of = {1: p1.action_probs, 2: p2.action_probs}

    def value(idx: int) -> float:
        node = nodes[idx]
        if isinstance(node, Terminal):
            return node.payoff
        if isinstance(node, Chance):
            total = 0.0
            for p, child in zip(node.probs, node.children):
                if p:
                    total += p * value(child)
            return total
        probs = probs_of[node.player].get(node.infoset)
        if probs is None:
            raise PolicyDomainError(
                f"player {node.player} policy missing reachable infoset "
                f"{node.infoset} "
                f"({game.infoset_labels[node.player].get(node.infoset)})"
            )
        total = 0.0
        for p, child in zip(probs, node.children):
            if p:
                total += p * value(child)
        return total

    return value(game.root)


def merge_population(game: GameTree, pop, weights) -> BehaviorPolicy:
    """Collapse a weighted population of same-owner policies into one
    realization-equivalent behavior policy.

    At infoset s the merged probabilities are the member policies' action
    probabilities weighted by ``w_k * rho_k(s)``, where rho_k(s) is member
    k's own-action reach product along the path to s (chance and opponent
    factors excluded). Infosets unreachable under every weighted member get
    a uniform distribution; the choice there cannot affect any value.
    """
    if not pop:
        raise ValueError("empty population")
    owner = pop[0].owner
    if any(p.owner != owner for p in pop):
        raise ValueError("population members must share one owner")
    w = np.asarray(getattr(weights, "weights", weights), dtype=float)
    if w.size != len(pop):
        raise ValueError(f"{w.size} weights for population of {len(pop)}")

    merged = {}
    for s in game.infosets(owner):
        k = len(game.infoset_actions(owner, s))
        seq = game.own_sequence(owner, s)
        num = np.zeros(k)
        denom = 0.0
        for wk, policy in zip(w, pop):
            if wk == 0.0:
                continue
            reach = wk
            for s_prev, a_prev in seq:
                reach *= policy.action_probs[s_prev][a_prev]
                if reach == 0.0:
                    break
            if reach:
                num += reach * policy.action_probs[s]
                denom += reach
        merged[s] = num / denom if denom > 0.0 else np.full(k, 1.0 / k)
    return BehaviorPolicy(owner, merged)


def reduced_normal_form(
    game: GameTree, player: int, cap: int = 100_000
) -> list[BehaviorPolicy]:
    """Enumerate the player's reduced pure strategies as one-hot policies.

    Reduced means choices are assigned only at infosets reachable given the
    player's own earlier choices; all other infosets are filled with action 0
    (value-irrelevant). Raises EnumerationCapError if the count exceeds `cap`
    rather than silently truncating.
    """
    infosets = game.infosets(player)
    by_prefix: dict[tuple, list[int]] = {}
    for s in infosets:
        by_prefix.setdefault(game.own_sequence(player, s), []).append(s)
    opened = {
        s: [
            by_prefix.get(game.own_sequence(player, s) + ((s, a),), [])
            for a in range(len(game.infoset_actions(player, s)))
        ]
        for s in infosets
    }
    initial = by_prefix.get((), [])

    counts: dict[int, int] = {}

    def count(s: int) -> int:
        if s not in counts:
            counts[s] = sum(
                math.prod(count(s2) for s2 in nxt) for nxt in opened[s]
            )
        return counts[s]

    total = math.prod(count(s) for s in initial)
    if total > cap:
        raise EnumerationCapError(
            f"player {player} has {total} reduced pure strategies (cap {cap})"
        )

    def plans(frontier: tuple):
        if not frontier:
            yield {}
            return
        s, rest = frontier[0], frontier[1:]
        for a in range(len(game.infoset_actions(player, s))):
            for tail in plans(tuple(opened[s][a]) + rest):
                yield {**tail, s: a}

    return [
        deterministic_policy(game, player, assignment)
        for assignment in plans(tuple(initial))
    ]


def playout(
    game: GameTree, p1: BehaviorPolicy, p2: BehaviorPolicy, rng: np.random.Generator
) -> float:
    """Sample one episode under (p1, p2); returns the terminal payoff to
    player 1. Used as the simulation-mode estimator and as a test oracle."""
    probs_of = {1: p1.action_probs, 2: p2.action_probs}
    idx = game.root
    while True:
        node = game.nodes[idx]
        if isinstance(node, Terminal):
            return node.payoff
        if isinstance(node, Chance):
            weights = node.probs
        else:
            weights = probs_of[node.player][node.infoset]
        u = rng.random()
        acc = 0.0
        pick = len(node.children) - 1
        for a, p in enumerate(weights):
            acc += p
            if u < acc:
                pick = a
                break
        idx = node.children[pick]


def matrix_to_tree(payoff: np.ndarray, name: str = "") -> GameTree:
    """Wrap a payoff matrix as a one-step extensive-form game: player 1 picks
    a row, player 2 picks a column without observing it."""
    payoff = np.asarray(payoff, dtype=float)
    n_rows, n_cols = payoff.shape
    b = TreeBuilder(name=name or "matrix")
    col_infoset = b.infoset(2, "cols")
    col_actions = [f"c{j}" for j in range(n_cols)]
    row_nodes = []
    for r in range(n_rows):
        terminals = [b.terminal(payoff[r, c]) for c in range(n_cols)]
        row_nodes.append(b.decision(2, col_infoset, col_actions, terminals))
    root = b.decision(
        1,
        b.infoset(1, "rows"),
        [f"r{i}" for i in range(n_rows)],
        row_nodes,
    )
    return b.build(root)


# -- JSON serialization (schema documented in README) -------------------------


def tree_to_json(game: GameTree) -> str:
    nodes = []
    for node in game.nodes:
        if isinstance(node, Terminal):
            nodes.append({"kind": "terminal", "payoff": node.payoff})
        elif isinstance(node, Chance):
            nodes.append(
                {
                    "kind": "chance",
                    "probs": list(node.probs),
                    "children": list(node.children),
                }
            )
        else:
            nodes.append(
                {
                    "kind": "decision",
                    "player": node.player,
                    "infoset": node.infoset,
                    "actions": list(node.actions),
                    "children": list(node.children),
                }
            )
    doc = {
        "name": game.name,
        "root": game.root,
        "nodes": nodes,
        "infoset_labels": {
            str(player): {str(i): lbl for i, lbl in game.infoset_labels[player].items()}
            for player in (1, 2)
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def tree_from_json(text: str) -> GameTree:
    doc = json.loads(text)
    nodes = []
    for raw in doc["nodes"]:
        kind = raw["kind"]
        if kind == "terminal":
            nodes.append(Terminal(float(raw["payoff"])))
        elif kind == "chance":
            nodes.append(Chance(tuple(raw["probs"]), tuple(raw["children"])))
        elif kind == "decision":
            nodes.append(
                Decision(
                    int(raw["player"]),
                    int(raw["infoset"]),
                    tuple(raw["actions"]),
                    tuple(raw["children"]),
                )
            )
        else:
            raise ValueError(f"unknown node kind {kind!r}")
    labels = {
        int(player): {int(i): lbl for i, lbl in table.items()}
        for player, table in doc.get("infoset_labels", {}).items()
    }
    return GameTree(nodes, doc["root"], labels, name=doc.get("name", ""))
