import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tifu_fp import (
    AssumptionError,
    GameError,
    GameSpec,
    MixedStrategy,
    PureAction,
    best_response,
    check_assumption,
    entropy,
    soft_max,
    solve_equilibrium,
    utility,
    verify_equilibrium,
)

from conftest import damped_fixed_point, random_games, random_security_game

probs = st.floats(0.0, 1.0)
payoffs = st.floats(-10, 10)


def test_mixed_strategy_validation():
    MixedStrategy(0.25, 0.75)
    with pytest.raises(ValueError):
        MixedStrategy(0.5, 0.6)
    with pytest.raises(ValueError):
        MixedStrategy(-0.1, 1.1)
    assert PureAction.ACTION1.as_strategy() == MixedStrategy(1.0, 0.0)
    assert PureAction.ACTION2.as_strategy() == MixedStrategy(0.0, 1.0)


def test_game_rejects_non_positive_tau():
    with pytest.raises(GameError):
        GameSpec.from_rows([[1, 5], [3, 2]], [[4, 1], [3, 5]], 0.0, 0.3)
    with pytest.raises(GameError):
        GameSpec.from_rows([[1, 5], [3, 2]], [[4, 1], [3, 5]], 0.5, -1)


def test_check_assumption(game):
    assert check_assumption(game).ok
    tied = GameSpec.from_rows([[3, 5], [3, 2]], game.m2.as_array(), 0.5, 0.3)
    assert check_assumption(tied).violations == ("a<c",)
    swapped = GameSpec.from_rows([[3, 2], [1, 5]], game.m2.as_array(), 0.5, 0.3)
    assert check_assumption(swapped).violations == ("a<c", "b>d")
    # defender rows swapped breaks both column comparisons
    bad_def = GameSpec.from_rows(game.m1.as_array(), [[3, 5], [4, 1]], 0.5, 0.3)
    assert check_assumption(bad_def).violations == ("e>f", "g<h")


def test_entropy_values():
    assert entropy(MixedStrategy(1.0, 0.0)) == 0.0
    assert entropy(MixedStrategy(0.5, 0.5)) == pytest.approx(math.log(2), abs=1e-15)
    assert entropy(MixedStrategy(0.75, 0.25)) == pytest.approx(0.562335144618808, abs=1e-12)


def test_utility_values(game):
    pure = MixedStrategy(1.0, 0.0)
    assert utility(game, 1, pure, pure) == 1.0
    u = MixedStrategy.uniform()
    assert utility(game, 1, u, u) == pytest.approx(2.75 + 0.5 * math.log(2), abs=1e-12)
    assert utility(game, 1, u, u) == pytest.approx(3.096574, abs=1e-6)
    # entropy term vanishes at a vertex
    for v in (MixedStrategy(1.0, 0.0), MixedStrategy(0.0, 1.0)):
        bilinear = v.as_array() @ game.m2.as_array() @ u.as_array()
        assert utility(game, 2, v, u) - bilinear == 0.0


def test_soft_max_values():
    assert soft_max((0, 0)) == MixedStrategy(0.5, 0.5)
    p = soft_max((math.log(3), 0))
    assert p.first == pytest.approx(0.75, abs=1e-15)
    assert p.second == pytest.approx(0.25, abs=1e-15)
    big = soft_max((1000, 0))
    assert big.first == 1.0 and big.second == 0.0  # underflow, no overflow
    assert soft_max((30, 0)).second > 0


@given(st.floats(-200, 200), st.floats(-200, 200), st.floats(-500, 500))
def test_soft_max_shift_invariance(x1, x2, c):
    a = soft_max((x1, x2))
    b = soft_max((x1 + c, x2 + c))
    assert abs(a.first - b.first) <= 1e-12
    assert abs(a.second - b.second) <= 1e-12
    assert a.first >= 0 and a.second >= 0
    assert abs(a.first + a.second - 1) <= 1e-12


def test_best_response_values(game):
    u = MixedStrategy.uniform()
    br = best_response(game, 1, u)
    assert br.first == pytest.approx(1 / (1 + math.exp(-1)), abs=1e-15)
    assert br.first == pytest.approx(0.731059, abs=1e-6)
    assert br.second == pytest.approx(0.268941, abs=1e-6)
    pennies = GameSpec.from_rows([[0, 1], [1, 0]], [[1, 0], [0, 1]], 0.7, 0.7)
    assert best_response(pennies, 1, u) == MixedStrategy(0.5, 0.5)
    flat = game.with_taus(1e6, 0.3)
    assert abs(best_response(flat, 1, u).first - 0.5) < 1e-5


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), probs)
def test_best_response_is_optimal_and_interior(seed, x):
    g = random_security_game(np.random.default_rng(seed))
    opp = MixedStrategy.from_first(x)
    grid = np.linspace(0.0, 1.0, 1001)
    for player in (1, 2):
        br = best_response(g, player, opp)
        assert 0.0 < br.first < 1.0 and 0.0 < br.second < 1.0
        best = utility(g, player, br, opp)
        values = [utility(g, player, MixedStrategy.from_first(p), opp) for p in grid]
        assert max(values) <= best + 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_best_response_monotonicity(seed):
    g = random_security_game(np.random.default_rng(seed))
    grid = np.linspace(0.0, 1.0, 1000)
    att = [best_response(g, 1, MixedStrategy.from_first(y)).first for y in grid]
    dfd = [best_response(g, 2, MixedStrategy.from_first(x)).first for x in grid]
    # strict up to float resolution when the logistic saturates
    assert np.all(np.diff(att) <= 0) and att[0] > att[-1]
    assert np.all(np.diff(dfd) >= 0) and dfd[0] < dfd[-1]


def test_verify_equilibrium(game, symmetric_game):
    rep = solve_equilibrium(game)
    assert verify_equilibrium(game, rep.rbar1, rep.rbar2)
    pure = MixedStrategy(1.0, 0.0)
    assert not verify_equilibrium(game, pure, pure)
    u = MixedStrategy.uniform()
    assert verify_equilibrium(symmetric_game, u, u)


def test_solve_equilibrium_benchmark(game):
    rep = solve_equilibrium(game)
    assert rep.rbar1.first == pytest.approx(0.79, abs=0.005)
    assert rep.rbar1.second == pytest.approx(0.21, abs=0.005)
    assert rep.rbar2.first == pytest.approx(0.47, abs=0.005)
    assert rep.rbar2.second == pytest.approx(0.53, abs=0.005)
    assert rep.residual <= 1e-10
    assert rep.spectral_radius_at_eta0 == pytest.approx(1.0, abs=1e-9)


def test_solve_equilibrium_symmetric(symmetric_game):
    rep = solve_equilibrium(symmetric_game)
    assert rep.rbar1.first == pytest.approx(0.5, abs=1e-12)
    assert rep.rbar2.first == pytest.approx(0.5, abs=1e-12)


def test_solve_equilibrium_errors(game):
    bad = GameSpec.from_rows([[3, 2], [1, 5]], game.m2.as_array(), 0.5, 0.3)
    with pytest.raises(AssumptionError) as info:
        solve_equilibrium(bad)
    assert info.value.violations == ("a<c", "b>d")
    with pytest.raises(ValueError):
        solve_equilibrium(game, tol=0)
    # distinct from the smoothing-weight error, raised at construction
    assert not issubclass(GameError, AssumptionError)


def test_solver_matches_damped_iteration():
    games = random_games(100, seed=2024)
    x, y = damped_fixed_point(games)
    for g, xo, yo in zip(games, x, y):
        rep = solve_equilibrium(g)
        assert abs(rep.rbar1.first - xo) <= 1e-9
        assert abs(rep.rbar2.first - yo) <= 1e-9
