# Copyright(C) 2024 by Mixcon developers.

"""test_game.py: costs, congestion, validation and derived flags"""

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

from fractions import Fraction
from random import Random

import pytest

from Mixcon import game as g
from Mixcon import gadgets
from Mixcon.exceptions import CostTableOverflow, InvalidState
from Mixcon.game import (
    CostEvaluator,
    CostFunction,
    Game,
    Player,
    Resource,
    State,
    StrategySpace,
)
from Mixcon.matroid import Matroid
from . import data
from .datagen import DEPENDENCES, Gen


def _one_resource_game(latency: CostFunction, bottleneck: CostFunction, n: int = 2) -> Game:
    players = [Player(Fraction(1), StrategySpace.explicit([["r"]])) for _ in range(n)]
    return Game(tuple(players), (Resource("r", latency, bottleneck),))


def test_linear_cost() -> None:
    """test_linear_cost"""
    func = CostFunction.linear(3, 1)
    assert func(2) == 7
    assert func.upto(3) == [4, 7, 10]
    assert func.length is None


def test_table_cost_overflow() -> None:
    """test_table_cost_overflow"""
    func = CostFunction.table([1, 2])
    assert func(2) == 2
    with pytest.raises(CostTableOverflow) as info:
        func(3, "r9")
    assert info.value.resource == "r9"
    assert "table length 2" in str(info.value)


def test_four_state_costs(four_state_game: Game) -> None:
    """test_four_state_costs"""
    for s1, s2, costs in data.FOUR_STATE_CYCLE:
        state = data.state_of(s1, s2)
        assert (
            g.player_cost(four_state_game, state, 0),
            g.player_cost(four_state_game, state, 1),
        ) == costs


def test_cost_decomposition(four_state_game: Game) -> None:
    """c_i is alpha times the latency sum plus the rest times the bottleneck"""
    state = data.state_of(gadgets.S12, gadgets.S21)
    assert g.latency_sum(four_state_game, state, 0) == 88
    assert g.bottleneck_max(four_state_game, state, 0) == 100
    assert g.latency_sum(four_state_game, state, 1) == 80
    assert g.bottleneck_max(four_state_game, state, 1) == 100


def test_congestion(four_state_game: Game) -> None:
    """test_congestion"""
    counts = g.congestion(four_state_game, data.state_of(gadgets.S12, gadgets.S21))
    assert counts == {"r1": 0, "r2": 0, "r3": 0, "r4": 2, "r5": 2, "r6": 1, "r7": 0}
    assert counts.total() == 5


def test_alpha_extremes_costs() -> None:
    """alpha 0 pays the bottleneck, alpha 1 the latency sum"""
    game = gadgets.build_thm4a()
    for i, j, costs in data.ALPHA_EXTREMES_CYCLE:
        state = State.from_indices(game, [i, j])
        assert tuple(CostEvaluator(game).costs(state)) == costs
    lonely = data.state_of(["r1"], ["r2", "r3", "r4"])
    assert g.latency_sum(game, lonely, 1) == 6
    assert g.bottleneck_max(game, lonely, 1) == 2


def test_identical_costs_values() -> None:
    """test_identical_costs_values"""
    game = gadgets.build_thm4b()
    for indices, costs in data.IDENTICAL_COSTS.items():
        state = State.from_indices(game, indices)
        assert tuple(g.player_cost(game, state, i) for i in range(2)) == costs


def test_evaluator_matches_player_cost() -> None:
    """The table-driven evaluator agrees with the direct definition"""
    gen = Gen(seed=11)
    for _ in range(100):
        game = gen.game(gen.random.randint(1, 4), gen.random.randint(1, 6))
        state = g.random_state(game, gen.random)
        evaluator = CostEvaluator(game)
        assert evaluator.costs(state) == [
            g.player_cost(game, state, i) for i in range(game.n)
        ]


def test_cost_decomposition_generated() -> None:
    """Random games: c_i is alpha times the latency sum plus the rest times
    the largest bottleneck, and every player is counted once per resource"""
    gen = Gen(seed=b"decomposition")
    for _ in range(200):
        space = gen.random.choice(["matroid", "explicit", "singleton"])
        game = gen.game(gen.random.randint(1, 5), gen.random.randint(1, 7), space)
        state = g.random_state(game, gen.random)
        counts = g.congestion(game, state)
        assert counts.total() == sum(len(s) for s in state)
        for r in game.resources:
            assert counts[r.id] == sum(r.id in s for s in state)
        evaluator = CostEvaluator(game)
        for i, strategy in enumerate(state):
            used = [game.resource_map[r] for r in strategy]
            lat = sum(res.latency(counts[res.id]) for res in used)
            bot = max(res.bottleneck(counts[res.id]) for res in used)
            alpha = game.players[i].alpha
            expected = alpha * lat + (1 - alpha) * bot
            assert g.player_cost(game, state, i) == expected
            assert evaluator.cost(i, strategy, evaluator.counts(state)) == expected


def test_weights_overflow_names_the_table() -> None:
    """A short bottleneck table is reported with its own length"""
    resources = (
        Resource("r", CostFunction.linear(1), CostFunction.table([1])),
        Resource("s", CostFunction.linear(1), CostFunction.linear(1)),
    )
    players = (
        Player(Fraction(0), StrategySpace.explicit([["s"], ["r"]])),
        Player(Fraction(0), StrategySpace.explicit([["r"]])),
    )
    evaluator = CostEvaluator(Game(players, resources))
    state = data.state_of(["s"], ["r"])
    counts = evaluator.counts(state)
    assert evaluator.weights(0, state[0], counts, "latency") == {"r": 2, "s": 1}
    with pytest.raises(CostTableOverflow) as info:
        evaluator.weights(0, state[0], counts, "bottleneck")
    assert (info.value.resource, info.value.congestion, info.value.length) == ("r", 2, 1)
    with pytest.raises(CostTableOverflow) as info:
        evaluator.weights(0, state[0], counts, "mixed")
    assert info.value.length == 1


def test_deviation_cost_counts_the_mover_once(four_state_game: Game) -> None:
    """test_deviation_cost_counts_the_mover_once"""
    evaluator = CostEvaluator(four_state_game)
    state = data.state_of(gadgets.S11, gadgets.S21)
    counts = evaluator.counts(state)
    after = evaluator.deviation_cost(0, state[0], frozenset(gadgets.S12), counts)
    assert after == 94


def test_validate_clean(two_player_game: Game, ten_player_game: Game) -> None:
    """test_validate_clean"""
    assert g.validate(two_player_game) == []
    assert g.validate(ten_player_game) == []


def test_validate_reports_each_rule() -> None:
    """test_validate_reports_each_rule"""
    resources = (
        Resource("r1", CostFunction.linear(-1), CostFunction.linear(0)),
        Resource("r2", CostFunction.table([2, 1]), CostFunction.table([0])),
        Resource("r2", CostFunction.linear(1), CostFunction.linear(1)),
    )
    players = (
        Player(Fraction(3, 2), StrategySpace.explicit([["r1"], ["r1"]])),
        Player(Fraction(1), StrategySpace.explicit([["r1", "r1"], ["r9"], []])),
        Player(Fraction(0), StrategySpace.explicit([])),
    )
    found = {(v.subject, v.rule) for v in g.validate(Game(players, resources))}
    assert ("resource r1", g.NON_MONOTONE) in found
    assert ("resource r1", g.NEGATIVE_COST) in found
    assert ("resource r2", g.NON_MONOTONE) in found
    assert ("resource r2", g.TABLE_TOO_SHORT) in found
    assert ("resource r2", g.DUPLICATE_RESOURCE_ID) in found
    assert ("player 1", g.ALPHA_RANGE) in found
    assert ("player 1", g.DUPLICATE_STRATEGY) in found
    assert ("player 2", g.DUPLICATE_IN_STRATEGY) in found
    assert ("player 2", g.UNKNOWN_RESOURCE) in found
    assert ("player 2", g.EMPTY_STRATEGY) in found
    assert ("player 3", g.EMPTY_SPACE) in found


def test_validate_rejects_decreasing_tables() -> None:
    """Generated tables pass; swapping two unequal neighbours fails"""
    gen = Gen(seed=b"monotone tables")
    for _ in range(200):
        n = gen.random.randint(2, 5)
        values = gen.table(n)
        good = _one_resource_game(CostFunction.table(values), CostFunction.linear(), n)
        assert g.validate(good) == []
        rises = [j for j in range(n - 1) if values[j] < values[j + 1]]
        if not rises:
            continue
        j = gen.random.choice(rises)
        values[j], values[j + 1] = values[j + 1], values[j]
        for latency, bottleneck in (
            (CostFunction.table(values), CostFunction.linear()),
            (CostFunction.linear(), CostFunction.table(values)),
        ):
            found = g.validate(_one_resource_game(latency, bottleneck, n))
            assert [v.rule for v in found] == [g.NON_MONOTONE]


def test_validate_repeated_resource_generated() -> None:
    """test_validate_repeated_resource_generated"""
    gen = Gen(seed=b"repeated ids")
    for _ in range(50):
        game = gen.game(gen.random.randint(1, 3), gen.random.randint(1, 5))
        assert g.validate(game) == []
        extra = gen.random.choice(game.resources)
        twice = Game(game.players, game.resources + (extra,))
        assert [(v.subject, v.rule) for v in g.validate(twice)] == [
            (f"resource {extra.id}", g.DUPLICATE_RESOURCE_ID)
        ]


def test_validate_no_players() -> None:
    """test_validate_no_players"""
    found = g.validate(Game((), (Resource("r", CostFunction.linear(), CostFunction.linear()),)))
    assert [v.rule for v in found] == [g.NO_PLAYERS]


def test_validate_declared_singleton() -> None:
    """test_validate_declared_singleton"""
    resources = tuple(
        Resource(r, CostFunction.linear(1), CostFunction.linear(1)) for r in ("a", "b")
    )
    players = (
        Player(Fraction(1), StrategySpace.explicit([["a"], ["a", "b"]])),
        Player(Fraction(1), StrategySpace.of_matroid(Matroid.uniform(["a", "b"], 2))),
    )
    found = g.validate(Game(players, resources, singleton_declared=True))
    assert [(v.subject, v.rule) for v in found] == [
        ("player 1", g.NOT_SINGLETON),
        ("player 2", g.NOT_SINGLETON),
    ]


def test_violation_text() -> None:
    """test_violation_text"""
    assert str(g.Violation("player 2", g.UNKNOWN_RESOURCE, "r9")) == (
        "player 2: unknown resource (r9)"
    )
    assert str(g.Violation("game", g.NO_PLAYERS)) == "game: no players"


def test_flags(two_player_game: Game, four_state_game: Game, cycle_game: Game) -> None:
    """test_flags"""
    assert two_player_game.is_matroid
    assert not four_state_game.is_matroid
    assert not two_player_game.is_singleton
    assert cycle_game.is_singleton
    assert not cycle_game.is_alpha_uniform
    assert cycle_game.has_pure_preferences
    assert two_player_game.is_alpha_uniform
    assert not two_player_game.has_pure_preferences
    assert two_player_game.d == 3
    assert gadgets.build_thm4b().has_identical_costs
    assert not two_player_game.has_identical_costs


def test_monotone_dependence_witness() -> None:
    """Equal latencies with different bottlenecks break monotone dependence"""
    game = Game(
        tuple(Player(Fraction(1), StrategySpace.explicit([["a"], ["b"]])) for _ in range(2)),
        (
            Resource("a", CostFunction.linear(1), CostFunction.linear(0, 5)),
            Resource("b", CostFunction.linear(1), CostFunction.linear(0, 6)),
        ),
    )
    low, high = g.monotone_dependence_witness(game)
    assert (low.resource, high.resource) == ("a", "b")
    assert low.latency == high.latency == 1
    assert not game.has_monotone_dependence


def test_monotone_dependence_generated() -> None:
    """test_monotone_dependence_generated"""
    gen = Gen(seed=3)
    for dependence in DEPENDENCES:
        game = gen.game(3, 4, dependence=dependence)
        assert game.has_monotone_dependence
        assert g.monotone_dependence_witness(game) is None


def test_decreasing_dependence_is_not_monotone() -> None:
    """test_decreasing_dependence_is_not_monotone"""
    game = _one_resource_game(CostFunction.linear(1), CostFunction.table([5, 4]))
    assert not game.has_monotone_dependence


def test_check_state() -> None:
    """test_check_state"""
    game = gadgets.build_thm4a()
    with pytest.raises(InvalidState):
        g.check_state(game, data.state_of(["r1"]))
    with pytest.raises(InvalidState) as info:
        g.check_state(game, data.state_of(["r1"], ["r2", "r6"]))
    assert info.value.player == 1
    with pytest.raises(InvalidState) as info:
        g.check_state(game, data.state_of(["r1"], ["r2", "r8"]))
    assert "unknown resource r8" in str(info.value)


def test_state_strings(two_player_game: Game) -> None:
    """test_state_strings"""
    state = State.from_indices(two_player_game, [19, 5])
    assert state[0] == frozenset(gadgets.S12)
    assert state[1] == frozenset(gadgets.S22)
    assert state.describe(two_player_game) == "19,5"
    assert state.replace(1, frozenset(gadgets.S21)).tokens(two_player_game) == ["19", "0"]


def test_matroid_space_first_and_tokens() -> None:
    """test_matroid_space_first_and_tokens"""
    space = StrategySpace.of_matroid(Matroid.uniform(["c", "a", "b"], 2))
    assert space.first() == frozenset({"c", "a"})
    assert space.token(frozenset({"b", "c"})) == "c+b"
    assert space.contains(frozenset({"a", "b"}))
    assert not space.contains(frozenset({"a", "z"}))


def test_state_count(two_player_game: Game, ten_player_game: Game) -> None:
    """test_state_count"""
    assert two_player_game.state_count() == 120
    assert ten_player_game.state_count() == 2**8 * 72 * 72


def test_random_state_reproducible(ten_player_game: Game) -> None:
    """test_random_state_reproducible"""
    first = g.random_state(ten_player_game, Random(5))
    second = g.random_state(ten_player_game, Random(5))
    assert first == second
    g.check_state(ten_player_game, first)
