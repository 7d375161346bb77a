"""Game representations: payoff matrices, extensive-form trees, and the zoo."""

from .matrix import MatrixGame, MixedStrategy, evaluate_matrix
from .tree import (
    BehaviorPolicy,
    Chance,
    Decision,
    GameTree,
    Terminal,
    TreeBuilder,
    deterministic_policy,
    evaluate_tree,
    matrix_to_tree,
    merge_population,
    playout,
    reduced_normal_form,
    tree_from_json,
    tree_to_json,
    uniform_policy,
    validate_policy,
)
from .zoo import (
    BadCaseSpec,
    BadCaseVariant,
    do_bad_case,
    fig1_bad_case,
    game_from_spec,
    kuhn_poker,
    leduc_poker,
    random_matrix_game,
)

__all__ = [
    "BadCaseSpec",
    "BadCaseVariant",
    "BehaviorPolicy",
    "Chance",
    "Decision",
    "GameTree",
    "MatrixGame",
    "MixedStrategy",
    "Terminal",
    "TreeBuilder",
    "deterministic_policy",
    "do_bad_case",
    "evaluate_matrix",
    "evaluate_tree",
    "fig1_bad_case",
    "game_from_spec",
    "kuhn_poker",
    "leduc_poker",
    "matrix_to_tree",
    "merge_population",
    "playout",
    "random_matrix_game",
    "reduced_normal_form",
    "tree_from_json",
    "tree_to_json",
    "uniform_policy",
    "validate_policy",
]
