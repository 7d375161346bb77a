"""Tabular epsilon-greedy Q-learning over a player's information sets.

Episodes are played against a sampled opponent policy; payoffs arrive only
at terminal nodes and are backed up through the learner's own
(infoset, action) trajectory with discount 1.
"""

from __future__ import annotations

import numpy as np

from .games.tree import BehaviorPolicy, Chance, GameTree, Terminal


class QLearner:
    """One player's Q table; greedy extraction is deterministic (ties go to
    the lowest action index)."""

    def __init__(self, game: GameTree, player: int, step_size: float = 0.1, epsilon: float = 0.2):
        if player not in (1, 2):
            raise ValueError("player must be 1 or 2")
        self.game = game
        self.player = player
        self.step_size = float(step_size)
        self.epsilon = float(epsilon)
        self.q: dict[int, list[float]] = {}
        self.episodes = 0

    def q_row(self, infoset: int) -> list[float]:
        row = self.q.get(infoset)
        if row is None:
            k = len(self.game.infoset_actions(self.player, infoset))
            row = [0.0] * k
            self.q[infoset] = row
        return row

    def greedy_policy(self) -> BehaviorPolicy:
        """One-hot argmax policy over every own infoset (unvisited ones pick
        action 0)."""
        probs = {}
        for s in self.game.infosets(self.player):
            k = len(self.game.infoset_actions(self.player, s))
            row = self.q.get(s)
            pick = 0 if row is None else row.index(max(row))
            vec = np.zeros(k)
            vec[pick] = 1.0
            probs[s] = vec
        return BehaviorPolicy(self.player, probs)

    def to_json_dict(self) -> dict:
        return {
            "player": self.player,
            "step_size": self.step_size,
            "epsilon": self.epsilon,
            "episodes": self.episodes,
            "q": {str(s): row for s, row in self.q.items()},
        }

    @classmethod
    def from_json_dict(cls, game: GameTree, doc: dict) -> "QLearner":
        learner = cls(game, doc["player"], doc["step_size"], doc["epsilon"])
        learner.episodes = int(doc["episodes"])
        learner.q = {int(s): list(map(float, row)) for s, row in doc["q"].items()}
        return learner


def _play_episode(
    learner: QLearner, opp_probs: dict[int, np.ndarray], rng: np.random.Generator
) -> None:
    game = learner.game
    nodes = game.nodes
    me = learner.player
    epsilon = learner.epsilon
    trajectory = []
    idx = game.root
    while True:
        node = nodes[idx]
        if isinstance(node, Terminal):
            reward = node.payoff if me == 1 else -node.payoff
            break
        if isinstance(node, Chance):
            weights = node.probs
        elif node.player == me:
            row = learner.q_row(node.infoset)
            if rng.random() < epsilon:
                a = int(rng.integers(len(row)))
            else:
                a = row.index(max(row))
            trajectory.append((node.infoset, a))
            idx = node.children[a]
            continue
        else:
            weights = opp_probs[node.infoset]
        u = rng.random()
        acc = 0.0
        pick = len(node.children) - 1
        for a, p in enumerate(weights):
            acc += p
            if u < acc:
                pick = a
                break
        idx = node.children[pick]

    alpha = learner.step_size
    q = learner.q
    last = len(trajectory) - 1
    for i, (s, a) in enumerate(trajectory):
        row = q[s]
        target = reward if i == last else max(q[trajectory[i + 1][0]])
        row[a] += alpha * (target - row[a])
    learner.episodes += 1


def qlearner_train(
    learner: QLearner,
    game: GameTree,
    opponent_sampler,
    episodes: int,
    rng: np.random.Generator,
) -> QLearner:
    """Run `episodes` of one-step Q-learning; each episode's opponent policy
    is drawn from `opponent_sampler(rng)` (return a fixed policy for a
    stationary opponent)."""
    if game is not learner.game:
        raise ValueError("learner was built for a different game")
    for _ in range(int(episodes)):
        opp = opponent_sampler(rng)
        _play_episode(learner, opp.action_probs, rng)
    return learner
