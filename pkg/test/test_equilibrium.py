# Copyright(C) 2024 by Mixcon developers.

"""test_equilibrium.py: certificates, enumeration, solvers and approximation"""

# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as
# published by the Free Software Foundation, either version 3 of the
# License, or (at your option) any later version.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public
# License along with this program.  If not, see
# <http://www.gnu.org/licenses/agpl.html>.

import math
from fractions import Fraction

import pytest

from Mixcon import equilibrium, gadgets
from Mixcon.dynamics import ResponseModel
from Mixcon.equilibrium import approx_solve, certify, enumerate_pne, solve
from Mixcon.exceptions import CapExceeded, IntractableBestResponse, NotApplicable
from Mixcon.game import (
    CostFunction,
    Game,
    Player,
    Resource,
    State,
    StrategySpace,
    bottleneck_max,
    latency_sum,
    random_state,
)
from Mixcon.matroid import Matroid
from Mixcon.typing import PotentialKind, SolveMethod
from . import data
from .datagen import DEPENDENCES, Gen


def _qualifying_moves(game: Game, state: State, target: Fraction, squared: bool):
    """Every (player, strategy) whose switch beats the target factor"""
    model = ResponseModel(game)
    counts = model.counts(state)
    for i in range(game.n):
        cost = model.cost(i, state[i], counts)
        for candidate in game.strategies(i):
            if candidate == state[i]:
                continue
            after = model.deviation_cost(i, state[i], candidate, counts)
            if squared:
                beats = cost * cost > target * after * after
            else:
                beats = cost > target * after
            if beats:
                yield i, candidate


def _assert_descent(game: Game, kind: int, gen: Gen) -> None:
    target, squared = equilibrium.approximation_target(game, kind)
    state = random_state(game, gen.random)
    before = equilibrium.potential(game, state, kind)
    for i, candidate in _qualifying_moves(game, state, target, squared):
        after = equilibrium.potential(game, state.replace(i, candidate), kind)
        assert after < before, (game, state, i, candidate)
    certificate = approx_solve(game, kind, state)
    assert certificate.passed
    assert certificate.target == target


def test_certificate_of_two_player_game(two_player_game: Game) -> None:
    """At (S11, S22) player 2 gains 84/45 by moving to S21"""
    state = data.state_of(gadgets.S11, gadgets.S22)
    certificate = certify(two_player_game, state)
    assert certificate.beta_achieved == data.TWO_PLAYER_WORST
    assert certificate.worst_player == 1
    assert certificate.worst_deviation == frozenset(gadgets.S21)
    assert not certificate.passed
    assert not certificate.is_equilibrium
    assert certificate.line(two_player_game) == (
        "beta_achieved=28/15 worst_player=2 worst_deviation=0 pass=false"
    )
    assert certify(two_player_game, state, 2).passed
    assert certify(two_player_game, state, Fraction(7, 2), squared=True).passed
    assert not certify(two_player_game, state, Fraction(3), squared=True).passed


def test_certify_rejects_small_beta(two_player_game: Game) -> None:
    """test_certify_rejects_small_beta"""
    with pytest.raises(ValueError):
        certify(two_player_game, data.state_of(gadgets.S11, gadgets.S22), Fraction(1, 2))


def test_certificate_infinite() -> None:
    """A positive cost against a free alternative is an unbounded factor"""
    resources = (
        Resource("a", CostFunction.linear(1), CostFunction.linear(1)),
        Resource("b", CostFunction.linear(0), CostFunction.linear(0)),
    )
    game = Game(
        (Player(Fraction(1, 3), StrategySpace.explicit([["a"], ["b"]])),), resources
    )
    certificate = certify(game, data.state_of(["a"]), 100)
    assert certificate.beta_achieved == math.inf
    assert not certificate.passed
    assert certificate.line(game) == (
        "beta_achieved=inf worst_player=1 worst_deviation=1 pass=false"
    )


def test_certify_equilibrium(cycle_game: Game) -> None:
    """test_certify_equilibrium"""
    for names in data.SINGLETON_EQUILIBRIA:
        certificate = certify(cycle_game, data.singleton_state(names))
        assert certificate.beta_achieved == 1
        assert certificate.passed


@pytest.mark.parametrize("builder", ["thm2", "thm2-restricted", "thm4a", "thm4b"])
def test_no_equilibrium(builder: str) -> None:
    """The fixed cycle games have no pure equilibrium, pruned or not"""
    game = gadgets.BUILDERS[builder]()
    assert enumerate_pne(game) == []
    assert enumerate_pne(game, prune=False) == []
    result = solve(game)
    assert result.state is None
    assert result.route == "enumerate"
    assert result.certificate is None


def test_enumerate_singleton_cycle_game(cycle_game: Game) -> None:
    """test_enumerate_singleton_cycle_game"""
    expected = [data.singleton_state(names) for names in data.SINGLETON_EQUILIBRIA]
    assert enumerate_pne(cycle_game) == expected
    assert enumerate_pne(cycle_game, limit=1) == expected[:1]
    assert enumerate_pne(cycle_game, workers=2, chunk_size=1) == expected


def test_enumerate_cap(two_player_game: Game) -> None:
    """test_enumerate_cap"""
    with pytest.raises(CapExceeded) as info:
        enumerate_pne(two_player_game, cap=10, prune=False)
    assert info.value.size == 120


def test_enumerate_basis_cap() -> None:
    """Matroid spaces above the basis cap cannot be enumerated"""
    resources = tuple(
        Resource(f"r{j}", CostFunction.linear(1), CostFunction.linear(1)) for j in range(5)
    )
    space = StrategySpace.of_matroid(Matroid.uniform([r.id for r in resources], 2))
    game = Game((Player(Fraction(1, 2), space),), resources)
    with pytest.raises(CapExceeded) as info:
        enumerate_pne(game, basis_cap=3)
    assert info.value.what == "matroid ground set of player 1"
    with pytest.raises(IntractableBestResponse):
        approx_solve(game, PotentialKind.mixed, basis_cap=3)


def test_pruning_keeps_equilibria() -> None:
    """Dominance pruning never changes the equilibrium set"""
    gen = Gen(seed=b"pruning")
    for _ in range(100):
        game = gen.game(gen.random.randint(1, 3), gen.random.randint(1, 5), space="explicit")
        assert enumerate_pne(game) == enumerate_pne(game, prune=False)


def test_beta_sweep_four_states(four_state_game: Game) -> None:
    """test_beta_sweep_four_states"""
    sweep = equilibrium.beta_sweep(four_state_game)
    assert sweep.min_beta == Fraction(45, 44)
    assert sweep.argmin == data.state_of(gadgets.S12, gadgets.S21)
    assert sweep.max_beta == data.TWO_PLAYER_WORST
    assert sweep.states == 4
    assert equilibrium.beta_sweep(four_state_game, workers=2, chunk_size=1) == sweep


def test_solve_singleton_cycle_game(cycle_game: Game) -> None:
    """Insertion ends in (r1, r3, r2)"""
    expected = data.singleton_state(data.SINGLETON_EQUILIBRIA[0])
    assert equilibrium.solve_singleton(cycle_game) == expected
    result = solve(cycle_game)
    assert result.route == "singleton"
    assert result.state == expected
    assert result.certificate.passed


def test_solvers_check_flags(two_player_game: Game, four_state_game: Game) -> None:
    """test_solvers_check_flags"""
    with pytest.raises(NotApplicable) as info:
        equilibrium.solve_singleton(two_player_game)
    assert info.value.flag == "is_singleton"
    with pytest.raises(NotApplicable) as info:
        equilibrium.solve_pure_preferences(two_player_game)
    assert info.value.flag == "has_pure_preferences"
    with pytest.raises(NotApplicable) as info:
        equilibrium.solve_monotone_dependence(four_state_game)
    assert info.value.flag == "is_matroid"
    with pytest.raises(NotApplicable):
        solve(two_player_game, SolveMethod.singleton)


def test_check_monotone_dependence(two_player_game: Game) -> None:
    """test_check_monotone_dependence"""
    check = equilibrium.check_monotone_dependence(two_player_game)
    assert not check.holds
    assert check.witness[0].latency == check.witness[1].latency


def test_singleton_solver_matches_oracle() -> None:
    """Insertion finds an equilibrium on 200 singleton games"""
    gen = Gen(seed=b"singleton")
    for _ in range(200):
        game = gen.game(gen.random.randint(1, 5), gen.random.randint(1, 6), space="singleton")
        state = equilibrium.solve_singleton(game)
        assert state in enumerate_pne(game)
        assert solve(game).route == "singleton"


def test_pure_preference_solver_matches_oracle() -> None:
    """Matroid games with alpha 0 or 1 on 200 instances"""
    gen = Gen(seed=b"pure preferences")
    for _ in range(200):
        game = gen.game(
            gen.random.randint(1, 3), gen.random.randint(1, 6), alphas="pure", max_ground=5
        )
        state = equilibrium.solve_pure_preferences(game)
        assert state in enumerate_pne(game)


def test_monotone_solver_matches_oracle() -> None:
    """Matroid games whose bottleneck follows the latency, 200 instances"""
    gen = Gen(seed=b"monotone")
    for _ in range(200):
        game = gen.game(
            gen.random.randint(1, 3),
            gen.random.randint(1, 6),
            dependence=gen.random.choice(DEPENDENCES),
            max_ground=5,
        )
        state = equilibrium.solve_monotone_dependence(game)
        assert state in enumerate_pne(game)


def test_solve_auto_routes() -> None:
    """test_solve_auto_routes"""
    resources = tuple(
        Resource(r, CostFunction.linear(a, 1), CostFunction.linear(a, 1))
        for r, a in (("a", 1), ("b", 2), ("c", 3))
    )
    space = StrategySpace.of_matroid(Matroid.uniform(["a", "b", "c"], 2))

    def game_with(*alphas) -> Game:
        return Game(tuple(Player(Fraction(x), space) for x in alphas), resources)

    pure = game_with(0, 1)
    monotone = game_with(Fraction(1, 2), Fraction(1, 3))
    assert solve(pure).route == "pure_pref"
    assert solve(monotone).route == "monotone"
    assert solve(monotone, SolveMethod.enumerate).route == "enumerate"
    assert solve(pure).state in enumerate_pne(pure)
    assert solve(monotone).state in enumerate_pne(monotone)


def test_potential_values(four_state_game: Game) -> None:
    """test_potential_values"""
    state = data.state_of(gadgets.S12, gadgets.S21)
    # r4 and r5 twice, r6 once
    assert equilibrium.potential(four_state_game, state, PotentialKind.mixed) == 2 * 105 + 44
    game = gadgets.build_thm4b()
    state = State.from_indices(game, [0, 0])
    assert equilibrium.potential(game, state, PotentialKind.sum) == 32 + 14 + 28 + 20 + 20
    assert equilibrium.potential(game, state, PotentialKind.square) == (
        32**2 + 14**2 + 28**2 + 20**2 + 20**2
    )


def test_potential_needs_flags(two_player_game: Game, cycle_game: Game) -> None:
    """test_potential_needs_flags"""
    state = data.state_of(gadgets.S11, gadgets.S21)
    with pytest.raises(NotApplicable) as info:
        equilibrium.potential(two_player_game, state, PotentialKind.square)
    assert info.value.flag == "has_identical_costs"
    with pytest.raises(NotApplicable):
        equilibrium.potential(two_player_game, state, PotentialKind.matroid)
    with pytest.raises(NotApplicable) as info:
        equilibrium.approximation_target(cycle_game, PotentialKind.mixed)
    assert info.value.flag == "is_alpha_uniform"
    with pytest.raises(NotApplicable) as info:
        approx_solve(gadgets.build_thm4a(), PotentialKind.matroid)
    assert info.value.flag == "is_matroid"


def test_approximation_targets(two_player_game: Game) -> None:
    """test_approximation_targets"""
    game = gadgets.build_thm4b()
    assert equilibrium.approximation_target(game, PotentialKind.sum) == (Fraction(3, 2), False)
    assert equilibrium.approximation_target(game, PotentialKind.square) == (3, True)
    assert equilibrium.approximation_target(two_player_game, PotentialKind.mixed) == (3, False)
    assert equilibrium.approximation_target(two_player_game, PotentialKind.matroid) == (3, False)


def test_approx_on_identical_cycle_game() -> None:
    """No exact equilibrium, but 3/2 and square-root-of-3 ones exist"""
    game = gadgets.build_thm4b()
    for kind in (PotentialKind.sum, PotentialKind.square, PotentialKind.mixed):
        certificate = approx_solve(game, kind)
        assert certificate.passed
        assert certificate.beta_achieved > 1


def test_approx_matroid_route(two_player_game: Game) -> None:
    """test_approx_matroid_route"""
    certificate = approx_solve(two_player_game, PotentialKind.matroid)
    assert certificate.passed
    assert certificate.steps == 0


def test_mixed_descent() -> None:
    """Steps beating d lower the mixed potential; 500 alpha-uniform games"""
    gen = Gen(seed=b"mixed descent")
    for _ in range(500):
        game = gen.game(
            gen.random.randint(1, 4), gen.random.randint(1, 6), space="explicit", alphas="uniform"
        )
        _assert_descent(game, PotentialKind.mixed, gen)


def test_square_descent() -> None:
    """Steps beating sqrt(d) lower the square potential; 500 games"""
    gen = Gen(seed=b"square descent")
    for _ in range(500):
        game = gen.identical_game(gen.random.randint(1, 4), gen.random.randint(1, 6))
        _assert_descent(game, PotentialKind.square, gen)


def test_sum_descent() -> None:
    """Steps beating d/(alpha(d-1)+1) lower the sum potential; 500 games"""
    gen = Gen(seed=b"sum descent")
    for _ in range(500):
        game = gen.identical_game(
            gen.random.randint(1, 4), gen.random.randint(1, 6), alphas="uniform"
        )
        _assert_descent(game, PotentialKind.sum, gen)


def test_matroid_and_rank_routes() -> None:
    """Player-specific route within d, lazy route exact"""
    gen = Gen(seed=b"routes")
    for _ in range(100):
        game = gen.game(gen.random.randint(1, 4), gen.random.randint(1, 6), max_ground=5)
        assert approx_solve(game, PotentialKind.matroid).passed
        monotone = gen.game(
            gen.random.randint(1, 4),
            gen.random.randint(1, 6),
            dependence=gen.random.choice(DEPENDENCES),
            max_ground=5,
        )
        certificate = approx_solve(monotone, PotentialKind.rank)
        assert certificate.is_equilibrium


def test_specific_equilibrium_enumeration_cap(cycle_game: Game) -> None:
    """When dynamics and search fail, enumeration honours the given cap"""
    model = ResponseModel(cycle_game)
    start = data.singleton_state(data.SINGLETON_CYCLE[0][0])
    with pytest.raises(CapExceeded) as info:
        equilibrium._specific_equilibrium(model, start, 10, 0, 0, enum_cap=1)
    assert info.value.cap == 1
    state = equilibrium._specific_equilibrium(model, start, 10, 0, 0)
    assert model.is_equilibrium(state)


def test_bottleneck_at_least_average_latency() -> None:
    """With bottleneck equal to latency the largest cost of a strategy is
    at least its average latency"""
    gen = Gen(seed=b"average latency")
    for _ in range(300):
        game = gen.identical_game(
            gen.random.randint(1, 4), gen.random.randint(1, 6), space="matroid"
        )
        state = random_state(game, gen.random)
        for i, strategy in enumerate(state):
            total = latency_sum(game, state, i)
            assert len(strategy) * bottleneck_max(game, state, i) >= total


def test_certify_monotone_in_beta() -> None:
    """A state passing at beta passes at every larger beta"""
    gen = Gen(seed=b"certify beta")
    betas = [Fraction(1), Fraction(9, 8), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(10)]
    for _ in range(200):
        game = gen.game(gen.random.randint(1, 4), gen.random.randint(1, 6), space="explicit")
        state = random_state(game, gen.random)
        achieved = certify(game, state).beta_achieved
        passed = [certify(game, state, beta).passed for beta in betas]
        assert passed == [beta >= achieved for beta in betas]
        assert passed == sorted(passed)
