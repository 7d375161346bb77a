import itertools

import numpy as np
import pytest

from zerosum.games import MatrixGame, MixedStrategy, evaluate_matrix
from zerosum.rng import stream


def brute_force_expectation(payoff, x, y):
    """Oracle: expectation as an explicit sum over pure profiles."""
    total = 0.0
    for r, c in itertools.product(range(payoff.shape[0]), range(payoff.shape[1])):
        total += x[r] * y[c] * payoff[r, c]
    return total


def test_pure_profile_is_table_lookup():
    g = MatrixGame([[0, -1], [1, 0]])
    assert evaluate_matrix(g, (1, 0), (0, 1)) == -1


def test_matching_pennies_uniform_is_zero():
    g = MatrixGame([[1, -1], [-1, 1]])
    assert evaluate_matrix(g, (0.5, 0.5), (0.5, 0.5)) == pytest.approx(0.0, abs=1e-15)


def test_fig1_mixed_profile_matches_brute_force():
    payoff = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, -2.0], [0.0, 2.0, 0.0]])
    g = MatrixGame(payoff)
    x = np.array([2 / 3, 1 / 3, 0.0])
    y = np.array([0.0, 1.0, 0.0])
    expected = brute_force_expectation(payoff, x, y)
    assert expected == pytest.approx(-2 / 3, abs=1e-12)
    assert evaluate_matrix(g, x, y) == pytest.approx(expected, abs=1e-12)


def test_bilinearity():
    rng = stream(11, "test", "bilinear")
    for _ in range(25):
        m, n = rng.integers(1, 8, size=2)
        g = MatrixGame(rng.random((m, n)) * 4 - 2)
        x1, x2 = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(m))
        y = rng.dirichlet(np.ones(n))
        alpha = float(rng.random())
        mixed = alpha * x1 + (1 - alpha) * x2
        lhs = evaluate_matrix(g, mixed, y)
        rhs = alpha * evaluate_matrix(g, x1, y) + (1 - alpha) * evaluate_matrix(g, x2, y)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_zero_sum_by_negation():
    rng = stream(12, "test", "zerosum")
    g = MatrixGame(rng.random((4, 5)))
    x, y = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(5))
    assert evaluate_matrix(g, x, y) == -(-evaluate_matrix(g, x, y))


def test_dimension_mismatch_raises():
    g = MatrixGame([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        evaluate_matrix(g, (1, 0, 0), (1, 0))


def test_matrix_validation():
    with pytest.raises(ValueError):
        MatrixGame(np.array([[np.inf, 0.0]]))
    with pytest.raises(ValueError):
        MatrixGame(np.zeros((0, 3)))


def test_mixed_strategy_validation():
    MixedStrategy(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        MixedStrategy(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        MixedStrategy(np.array([-0.1, 1.1]))
