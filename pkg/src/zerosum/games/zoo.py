"""Constructors for the benchmark games used by the experiment harness."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .. import rng as rng_mod
from ..errors import ConfigError
from .matrix import MatrixGame
from .tree import GameTree, TreeBuilder


def random_matrix_game(n_rows: int, n_cols: int, seed: int) -> MatrixGame:
    """Payoffs i.i.d. Uniform(0,1) to the row player; deterministic per seed.

    The stream is keyed by (seed, "game", dims) via the pinned Philox
    generator, so the same seed always yields the same matrix.
    """
    if n_rows < 1 or n_cols < 1:
        raise ValueError("dimensions must be positive")
    gen = rng_mod.stream(seed, "game", "random_nfg", n_rows, n_cols)
    payoff = gen.random((n_rows, n_cols))
    return MatrixGame(payoff, name=f"random_nfg_{n_rows}x{n_cols}_s{seed}")


class BadCaseVariant(enum.Enum):
    """Two parses of the escalating off-diagonal value formula.

    SUMMED: entry value is sum_{i=0..r} (2^i + 2i).
    SPLIT:  entry value is (sum_{i=0..r} 2^i) + 2r.
    """

    SUMMED = "summed"
    SPLIT = "split"


@dataclass(frozen=True)
class BadCaseSpec:
    n: int
    variant: BadCaseVariant

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("bad case needs n >= 2 actions")
        if not isinstance(self.variant, BadCaseVariant):
            raise ValueError("variant must be set explicitly")


def _escalation_value(index: int, variant: BadCaseVariant, negate_powers: bool) -> float:
    sign = -1 if negate_powers else 1
    if variant is BadCaseVariant.SUMMED:
        return float(sum(sign * 2**i + 2 * i for i in range(index + 1)))
    return float(sum(sign * 2**i for i in range(index + 1)) + 2 * index)


def do_bad_case(spec: BadCaseSpec) -> MatrixGame:
    """Ladder game on which the plain double-oracle loop escalates.

    All entries are 0 except the first sub- and super-diagonals: entry
    (c+1, c) uses the positive-power formula at index c+1, and entry
    (r, r+1) uses the negated-power formula at index r+1.
    """
    n = spec.n
    payoff = np.zeros((n, n))
    for k in range(1, n):
        payoff[k, k - 1] = _escalation_value(k, spec.variant, negate_powers=False)
        payoff[k - 1, k] = _escalation_value(k, spec.variant, negate_powers=True)
    return MatrixGame(payoff, name=f"bad_case_{spec.variant.value}_n{n}")


def fig1_bad_case() -> MatrixGame:
    """Fixed 3x3 ladder: oracle-loop exploitability goes 2 -> 4 -> 0 while the
    anytime variant goes 2 -> 4/3 -> 0."""
    return MatrixGame(
        np.array([[0.0, -1.0, 0.0], [1.0, 0.0, -2.0], [0.0, 2.0, 0.0]]),
        name="fig1_bad_case",
    )


# -- Kuhn poker ----------------------------------------------------------------

_RANKS = ("J", "Q", "K")


def kuhn_poker() -> GameTree:
    """Standard Kuhn poker: 3-card deck, ante 1, one betting round with a
    single bet of 1; the 6 ordered deals are equally likely.

    Action order everywhere: 0 = check/fold, 1 = bet/call.
    """
    b = TreeBuilder(name="kuhn_poker")

    def showdown(c1: int, c2: int, stake: int) -> float:
        return float(stake if c1 > c2 else -stake)

    deal_nodes = []
    for c1, c2 in itertools.permutations(range(3), 2):
        r1, r2 = _RANKS[c1], _RANKS[c2]
        # Histories: '' (P1 to act), 'k'/'b' (P2), 'kb' (P1).
        t_kk = b.terminal(showdown(c1, c2, 1))
        t_kbf = b.terminal(-1.0)
        t_kbc = b.terminal(showdown(c1, c2, 2))
        t_bf = b.terminal(1.0)
        t_bc = b.terminal(showdown(c1, c2, 2))
        p1_kb = b.decision(
            1, b.infoset(1, f"{r1}:kb"), ("fold", "call"), (t_kbf, t_kbc)
        )
        p2_k = b.decision(2, b.infoset(2, f"{r2}:k"), ("check", "bet"), (t_kk, p1_kb))
        p2_b = b.decision(2, b.infoset(2, f"{r2}:b"), ("fold", "call"), (t_bf, t_bc))
        deal_nodes.append(
            b.decision(1, b.infoset(1, f"{r1}:"), ("check", "bet"), (p2_k, p2_b))
        )
    root = b.chance([1.0 / 6.0] * 6, deal_nodes)
    return b.build(root)


# -- Leduc poker ---------------------------------------------------------------

# Limit betting round, at most 2 raises (the opening bet counts as the first).
# Terminal in-round histories and their outcome; 'continue' means the round
# completed without a fold.
_ROUND_OUTCOMES = {
    "kk": "continue",
    "kbf": "fold1",
    "kbc": "continue",
    "kbrf": "fold2",
    "kbrc": "continue",
    "bf": "fold2",
    "bc": "continue",
    "brf": "fold1",
    "brc": "continue",
}
_TO_ACT = {"": 1, "k": 2, "b": 2, "kb": 1, "br": 1, "kbr": 2}
# Legal continuations: (action char, display name, chips the actor adds now,
# in units of the round's bet size).
_LEGAL = {
    "": (("k", "check", 0), ("b", "bet", 1)),
    "k": (("k", "check", 0), ("b", "bet", 1)),
    "b": (("f", "fold", 0), ("c", "call", 1), ("r", "raise", 2)),
    "kb": (("f", "fold", 0), ("c", "call", 1), ("r", "raise", 2)),
    "br": (("f", "fold", 0), ("c", "call", 1)),
    "kbr": (("f", "fold", 0), ("c", "call", 1)),
}


def leduc_poker() -> GameTree:
    """Standard research Leduc: 6-card deck (3 ranks x 2 suits), ante 1, two
    betting rounds with bet sizes 2 then 4, at most 2 raises per round, one
    public card revealed before round 2.

    Information sets are keyed by rank (suits carry no information), so
    nodes from suit-permuted deals share infosets. Payoffs lie in [-13, 13].
    """
    b = TreeBuilder(name="leduc_poker")
    deck = [(rank, suit) for rank in range(3) for suit in range(2)]

    def winner(rank1: int, rank2: int, public: int) -> int:
        """1/2 for a win, 0 for a split pot."""
        pair1, pair2 = rank1 == public, rank2 == public
        if pair1 != pair2:
            return 1 if pair1 else 2
        if rank1 != rank2:
            return 1 if rank1 > rank2 else 2
        return 0

    def build_round(round_no, card1, card2, public_rank, hist1, pot1, pot2):
        rank1, rank2 = card1[0], card2[0]
        bet = 2 if round_no == 1 else 4

        def node(hist: str, c1: int, c2: int) -> int:
            new_pot1, new_pot2 = pot1 + c1 * bet, pot2 + c2 * bet
            outcome = _ROUND_OUTCOMES.get(hist)
            if outcome == "fold1":
                return b.terminal(float(-new_pot1))
            if outcome == "fold2":
                return b.terminal(float(new_pot2))
            if outcome == "continue":
                if round_no == 2:
                    w = winner(rank1, rank2, public_rank)
                    value = 0.0 if w == 0 else (new_pot2 if w == 1 else -new_pot1)
                    return b.terminal(float(value))
                # Round 1 done: reveal one of the 4 remaining cards.
                remaining = [c for c in deck if c != card1 and c != card2]
                kids = [
                    build_round(2, card1, card2, rank, hist, new_pot1, new_pot2)
                    for rank, _suit in remaining
                ]
                return b.chance([1.0 / len(remaining)] * len(remaining), kids)
            player = _TO_ACT[hist]
            rank = rank1 if player == 1 else rank2
            if round_no == 1:
                label = f"r1:{_RANKS[rank]}:{hist}"
            else:
                label = f"r2:{_RANKS[rank]}:{hist1}:{_RANKS[public_rank]}:{hist}"
            actions, kids = [], []
            for act, act_name, owes in _LEGAL[hist]:
                d1 = c1 + (owes if player == 1 else 0)
                d2 = c2 + (owes if player == 2 else 0)
                actions.append(act_name)
                kids.append(node(hist + act, d1, d2))
            return b.decision(player, b.infoset(player, label), actions, kids)

        return node("", 0, 0)

    deal_nodes = []
    for card1, card2 in itertools.permutations(deck, 2):
        deal_nodes.append(build_round(1, card1, card2, None, "", 1, 1))
    root = b.chance([1.0 / 30.0] * 30, deal_nodes)
    return b.build(root)


# -- CLI game specs --------------------------------------------------------------


def game_from_spec(spec: dict, seed: int = 0):
    """Build a game from a JSON-style spec: {"kind": ..., params}.

    Kinds: random_nfg (rows, cols), bad_case (n, variant), fig1, kuhn, leduc.
    For random_nfg the instance is derived from the run seed.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("game spec must be an object with a 'kind' field")
    spec = dict(spec)
    kind = spec.pop("kind")
    known_params = {
        "random_nfg": {"rows", "cols"},
        "bad_case": {"n", "variant"},
        "fig1": set(),
        "kuhn": set(),
        "leduc": set(),
    }
    if kind not in known_params:
        raise ConfigError(f"unknown game kind {kind!r}")
    unknown = set(spec) - known_params[kind]
    if unknown:
        raise ConfigError(f"unknown game params for {kind!r}: {sorted(unknown)}")
    if kind == "random_nfg":
        try:
            return random_matrix_game(int(spec["rows"]), int(spec["cols"]), seed)
        except KeyError as exc:
            raise ConfigError(f"random_nfg spec missing {exc}") from exc
    if kind == "bad_case":
        try:
            variant = BadCaseVariant(spec.get("variant", "summed"))
            return do_bad_case(BadCaseSpec(int(spec["n"]), variant))
        except KeyError as exc:
            raise ConfigError(f"bad_case spec missing {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if kind == "fig1":
        return fig1_bad_case()
    if kind == "kuhn":
        return kuhn_poker()
    return leduc_poker()
