# Copyright(C) 2024 by Mixcon developers.

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

"""Congestion games with mixed objectives.

A player i choosing strategy S_i in state S pays

    c_i(S) = alpha_i * sum of latency(r)  +  (1 - alpha_i) * max of bottleneck(r)

over r in S_i, both cost functions evaluated at the congestion n_r(S),
the number of players whose strategy contains r.  All arithmetic is
exact (fractions.Fraction).

Players are indexed from 0 in the API; messages and exported formats
count from 1.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from random import Random
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from Mixcon import matroid
from Mixcon.constants import BASIS_CAP, EXCHANGE_SCAN_LIMIT, STRATEGY_SEP
from Mixcon.exceptions import CostTableOverflow, GroundSetError, InvalidState
from Mixcon.matroid import Matroid
from Mixcon.typing import CostKind
from Mixcon.util import order_index, ordered

log = logging.getLogger(__name__)

Strategy = FrozenSet[str]
Number = Union[int, Fraction]

# Validation rules.  A Violation names one of these.
NON_MONOTONE = "non-monotone cost function"
NEGATIVE_COST = "negative cost"
TABLE_TOO_SHORT = "table too short"
EMPTY_TABLE = "empty table"
ALPHA_RANGE = "alpha out of range"
NO_PLAYERS = "no players"
DUPLICATE_RESOURCE_ID = "duplicate resource id"
EMPTY_SPACE = "empty strategy space"
EMPTY_STRATEGY = "empty strategy"
DUPLICATE_STRATEGY = "duplicate strategy"
DUPLICATE_IN_STRATEGY = "duplicate resource in strategy"
UNKNOWN_RESOURCE = "unknown resource"
NOT_SINGLETON = "strategy is not a singleton"
BAD_MATROID = "invalid matroid"


@dataclass(frozen=True)
class CostFunction:
    """Non-decreasing, non-negative cost of a resource by congestion.

    linear: a*x + b.  table: values[x-1] for x = 1..len(values).
    """

    kind: int
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    values: Tuple[Fraction, ...] = ()

    @classmethod
    def linear(cls, a: Number = 0, b: Number = 0) -> "CostFunction":
        """a*x + b"""
        return cls(CostKind.linear, Fraction(a), Fraction(b))

    @classmethod
    def table(cls, values: Iterable[Number]) -> "CostFunction":
        """Tabulated by congestion 1, 2, ..."""
        return cls(CostKind.table, values=tuple(Fraction(v) for v in values))

    @property
    def length(self) -> Optional[int]:
        """Number of table entries; None for linear functions"""
        if self.kind == CostKind.table:
            return len(self.values)
        return None

    def __call__(self, x: int, resource: str = "?") -> Fraction:
        if self.kind == CostKind.linear:
            return self.a * x + self.b
        if not 1 <= x <= len(self.values):
            raise CostTableOverflow(resource, x, len(self.values))
        return self.values[x - 1]

    def upto(self, n: int) -> List[Fraction]:
        """Values for congestion 1..n, cut at the end of a table"""
        if self.kind == CostKind.table:
            return list(self.values[:n])
        return [self.a * x + self.b for x in range(1, n + 1)]

    def violations(self) -> List[str]:
        """Rules this function breaks on its own (table length is game level)"""
        if self.kind == CostKind.linear:
            problems = []
            if self.a < 0:
                problems.append(NON_MONOTONE)
            if self.a < 0 or self.b < 0:
                problems.append(NEGATIVE_COST)
            return problems
        if not self.values:
            return [EMPTY_TABLE]
        problems = []
        if any(y < x for x, y in zip(self.values, self.values[1:])):
            problems.append(NON_MONOTONE)
        if any(v < 0 for v in self.values):
            problems.append(NEGATIVE_COST)
        return problems


@dataclass(frozen=True)
class Resource:
    """A resource with latency and bottleneck cost functions"""

    id: str
    latency: CostFunction
    bottleneck: CostFunction


@dataclass(frozen=True)
class StrategySpace:
    """Either an explicit list of strategies or the bases of a matroid.

    Explicit strategies are kept as written (ordered tuples) so that
    duplicates can be reported and documents round-trip unchanged; the
    sets they denote are in `strategies`.
    """

    listed: Tuple[Tuple[str, ...], ...] = ()
    matroid: Optional[Matroid] = None

    @classmethod
    def explicit(cls, strategies: Iterable[Iterable[str]]) -> "StrategySpace":
        """Explicit list; a strategy's index is its position"""
        return cls(listed=tuple(tuple(s) for s in strategies))

    @classmethod
    def of_matroid(cls, m: Matroid) -> "StrategySpace":
        """The bases of m"""
        return cls(matroid=m)

    @property
    def is_explicit(self) -> bool:
        """True for listed strategies"""
        return self.matroid is None

    @cached_property
    def strategies(self) -> Tuple[Strategy, ...]:
        """Listed strategies as sets"""
        return tuple(frozenset(s) for s in self.listed)

    @cached_property
    def position(self) -> Dict[Strategy, int]:
        """Index of each listed strategy (first occurrence)"""
        found: Dict[Strategy, int] = {}
        for pos, strategy in enumerate(self.strategies):
            found.setdefault(strategy, pos)
        return found

    @cached_property
    def resources(self) -> Tuple[str, ...]:
        """Resources this space can use, in first-seen or ground order"""
        if self.matroid is not None:
            return self.matroid.ground
        return tuple(dict.fromkeys(r for s in self.listed for r in s))

    @cached_property
    def order(self) -> Dict[str, int]:
        """Position of each usable resource"""
        return order_index(self.resources)

    @cached_property
    def max_size(self) -> int:
        """Largest strategy cardinality"""
        if self.matroid is not None:
            return self.matroid.rank
        return max((len(s) for s in self.strategies), default=0)

    @cached_property
    def as_matroid(self) -> Optional[Matroid]:
        """A matroid whose bases are exactly this space, if there is one.

        Listed strategies qualify when they have equal sizes and satisfy
        the basis exchange property; long lists are not examined.
        """
        if self.matroid is not None:
            return self.matroid
        bases = tuple(dict.fromkeys(self.strategies))
        if not bases or len(bases) > EXCHANGE_SCAN_LIMIT:
            return None
        if len({len(b) for b in bases}) != 1:
            return None
        if matroid.basis_exchange_violation(bases) is not None:
            return None
        return Matroid.explicit_bases(
            [ordered(b, self.order) for b in bases],
            self.resources,
            exchange_cap=len(self.resources),
        )

    def expand(self, cap: int = BASIS_CAP) -> Tuple[Strategy, ...]:
        """Every strategy in strategy order (list order, or lexicographic bases)"""
        if self.matroid is None:
            return self.strategies
        return tuple(matroid.enumerate_bases(self.matroid, cap))

    def can_expand(self, cap: int = BASIS_CAP) -> bool:
        """Whether expand() fits under cap"""
        if self.matroid is None:
            return True
        return len(self.matroid.ground) <= cap or not self.matroid.ground

    def first(self) -> Strategy:
        """The first strategy in strategy order"""
        if self.matroid is None:
            return self.strategies[0]
        weights = {e: pos for pos, e in enumerate(self.matroid.ground)}
        return matroid.greedy_min_basis(self.matroid, weights)

    def contains(self, strategy: Strategy) -> bool:
        """Membership test"""
        if self.matroid is None:
            return strategy in self.position
        try:
            return self.matroid.is_basis(strategy)
        except GroundSetError:
            return False

    def token(self, strategy: Strategy) -> str:
        """State-string form: list index, or resources joined by '+'"""
        if self.matroid is None:
            return str(self.position[strategy])
        return STRATEGY_SEP.join(ordered(strategy, self.matroid.index))


@dataclass(frozen=True)
class Player:
    """Preference value alpha and strategy space"""

    alpha: Fraction
    space: StrategySpace


class Violation(NamedTuple):
    """A broken game invariant"""

    subject: str
    rule: str
    detail: str = ""

    def __str__(self):
        if self.detail:
            return f"{self.subject}: {self.rule} ({self.detail})"
        return f"{self.subject}: {self.rule}"


class DependencePoint(NamedTuple):
    """One (latency, bottleneck) pair of a resource at a congestion"""

    resource: str
    congestion: int
    latency: Fraction
    bottleneck: Fraction


@dataclass(frozen=True)
class Game:
    """Immutable game.  Flags are derived from the content on demand."""

    players: Tuple[Player, ...]
    resources: Tuple[Resource, ...]
    name: str = ""
    singleton_declared: bool = False

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "resources", tuple(self.resources))

    @property
    def n(self) -> int:
        """Number of players"""
        return len(self.players)

    @property
    def m(self) -> int:
        """Number of resources"""
        return len(self.resources)

    @cached_property
    def resource_map(self) -> Dict[str, Resource]:
        """Resources by id"""
        return {r.id: r for r in self.resources}

    @cached_property
    def resource_index(self) -> Dict[str, int]:
        """Position of each resource id"""
        return order_index(r.id for r in self.resources)

    @cached_property
    def d(self) -> int:
        """Maximum number of resources in any strategy of any player"""
        return max((p.space.max_size for p in self.players), default=0)

    @cached_property
    def is_singleton(self) -> bool:
        """Every strategy of every player is a single resource"""
        return all(
            p.space.max_size == 1
            and (
                p.space.matroid is not None
                or all(len(s) == 1 for s in p.space.strategies)
            )
            for p in self.players
        )

    @cached_property
    def is_matroid(self) -> bool:
        """Every strategy space is the set of bases of a matroid"""
        return all(p.space.as_matroid is not None for p in self.players)

    @cached_property
    def has_pure_preferences(self) -> bool:
        """Every alpha is 0 or 1"""
        return all(p.alpha in (0, 1) for p in self.players)

    @cached_property
    def is_alpha_uniform(self) -> bool:
        """All players share one alpha"""
        return len({p.alpha for p in self.players}) <= 1

    @cached_property
    def has_monotone_dependence(self) -> bool:
        """bottleneck = f(latency) for one non-decreasing f"""
        return monotone_dependence_witness(self) is None

    @cached_property
    def has_identical_costs(self) -> bool:
        """bottleneck equals latency on every resource for congestion 1..n"""
        n = self.n
        return all(r.latency.upto(n) == r.bottleneck.upto(n) for r in self.resources)

    def flags(self) -> Dict[str, bool]:
        """All derived flags by name"""
        return {
            "is_singleton": self.is_singleton,
            "is_matroid": self.is_matroid,
            "has_pure_preferences": self.has_pure_preferences,
            "is_alpha_uniform": self.is_alpha_uniform,
            "has_monotone_dependence": self.has_monotone_dependence,
        }

    def strategies(self, i: int, cap: int = BASIS_CAP) -> Tuple[Strategy, ...]:
        """Expanded strategy list of player i"""
        return self.players[i].space.expand(cap)

    def state_count(self, cap: int = BASIS_CAP) -> int:
        """Number of states, expanding matroid spaces"""
        count = 1
        for i in range(self.n):
            count *= len(self.strategies(i, cap))
        return count


@dataclass(frozen=True)
class State:
    """One strategy (a resource set) per player"""

    choices: Tuple[Strategy, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "choices", tuple(frozenset(c) for c in self.choices)
        )

    @classmethod
    def from_indices(cls, game: Game, indices: Sequence[int]) -> "State":
        """State from positions in each player's expanded strategy list"""
        return cls(tuple(game.strategies(i)[k] for i, k in enumerate(indices)))

    def __len__(self) -> int:
        return len(self.choices)

    def __getitem__(self, i: int) -> Strategy:
        return self.choices[i]

    def __iter__(self) -> Iterator[Strategy]:
        return iter(self.choices)

    def replace(self, i: int, strategy: Strategy) -> "State":
        """The state after player i switches to strategy"""
        choices = list(self.choices)
        choices[i] = frozenset(strategy)
        return State(tuple(choices))

    def tokens(self, game: Game) -> List[str]:
        """Per-player state-string tokens"""
        return [p.space.token(s) for p, s in zip(game.players, self.choices)]

    def describe(self, game: Game) -> str:
        """Comma separated state string"""
        return ",".join(self.tokens(game))


class CongestionProfile(Dict[str, int]):
    """n_r(S) for every resource of the game, zeros included"""

    def total(self) -> int:
        """Sum over resources; equals the sum of strategy sizes"""
        return sum(self.values())


def validate(game: Game) -> List[Violation]:
    """Every broken invariant of game; empty when the game is well formed"""
    found: List[Violation] = []
    n = game.n
    if n == 0:
        found.append(Violation("game", NO_PLAYERS))

    seen = set()
    for res in game.resources:
        subject = f"resource {res.id}"
        if res.id in seen:
            found.append(Violation(subject, DUPLICATE_RESOURCE_ID))
        seen.add(res.id)
        for label, func in (("latency", res.latency), ("bottleneck", res.bottleneck)):
            for rule in func.violations():
                found.append(Violation(subject, rule, label))
            if func.length is not None and 0 < func.length < n:
                found.append(
                    Violation(
                        subject,
                        TABLE_TOO_SHORT,
                        f"{label} has {func.length} entries for {n} players",
                    )
                )

    for i, player in enumerate(game.players):
        found.extend(_player_violations(game, i, player))
    return found


def _player_violations(game: Game, i: int, player: Player) -> List[Violation]:
    subject = f"player {i + 1}"
    found: List[Violation] = []
    if not 0 <= player.alpha <= 1:
        found.append(Violation(subject, ALPHA_RANGE, str(player.alpha)))

    space = player.space
    known = game.resource_map
    if space.matroid is not None:
        for problem in space.matroid.violations():
            found.append(Violation(subject, BAD_MATROID, problem))
        for r in space.matroid.ground:
            if r not in known:
                found.append(Violation(subject, UNKNOWN_RESOURCE, r))
        if game.singleton_declared and space.matroid.rank != 1:
            found.append(Violation(subject, NOT_SINGLETON))
        return found

    if not space.listed:
        found.append(Violation(subject, EMPTY_SPACE))
    first_seen: Dict[Strategy, int] = {}
    for pos, listed in enumerate(space.listed):
        where = f"strategy {pos}"
        if not listed:
            found.append(Violation(subject, EMPTY_STRATEGY, where))
        if len(set(listed)) != len(listed):
            found.append(Violation(subject, DUPLICATE_IN_STRATEGY, where))
        for r in listed:
            if r not in known:
                found.append(Violation(subject, UNKNOWN_RESOURCE, f"{r} in {where}"))
        as_set = frozenset(listed)
        if as_set in first_seen:
            found.append(
                Violation(
                    subject, DUPLICATE_STRATEGY, f"{where} repeats {first_seen[as_set]}"
                )
            )
        first_seen.setdefault(as_set, pos)
        if game.singleton_declared and len(as_set) != 1:
            found.append(Violation(subject, NOT_SINGLETON, where))
    return found


def monotone_dependence_witness(
    game: Game,
) -> Optional[Tuple[DependencePoint, DependencePoint]]:
    """Two (latency, bottleneck) points that no non-decreasing f can join.

    None when bottleneck(r, x) = f(latency(r, x)) holds for all resources
    and congestions 1..n with f non-decreasing.
    """
    points = [
        DependencePoint(res.id, x, lat, bot)
        for res in game.resources
        for x, (lat, bot) in enumerate(
            zip(res.latency.upto(game.n), res.bottleneck.upto(game.n)), start=1
        )
    ]
    index = game.resource_index
    points.sort(key=lambda p: (p.latency, p.bottleneck, index[p.resource], p.congestion))
    for low, high in zip(points, points[1:]):
        if low.bottleneck != high.bottleneck and (
            low.latency == high.latency or low.bottleneck > high.bottleneck
        ):
            return low, high
    return None


def check_state(game: Game, state: State) -> None:
    """Raise InvalidState unless every choice belongs to its player's space"""
    if len(state) != game.n:
        raise InvalidState(
            min(len(state), game.n), f"{len(state)} choices for {game.n} players"
        )
    known = game.resource_map
    for i, (player, strategy) in enumerate(zip(game.players, state)):
        unknown = [r for r in strategy if r not in known]
        if unknown:
            raise InvalidState(i, "unknown resource " + ", ".join(sorted(unknown)))
        if not player.space.contains(strategy):
            if player.space.is_explicit:
                raise InvalidState(i, f"{sorted(strategy)} is not a listed strategy")
            raise InvalidState(i, f"{sorted(strategy)} is not a basis")


def congestion(game: Game, state: State) -> CongestionProfile:
    """n_r(S) for every resource"""
    check_state(game, state)
    counts = CongestionProfile((r.id, 0) for r in game.resources)
    for strategy in state:
        for r in strategy:
            counts[r] += 1
    return counts


def latency_sum(game: Game, state: State, i: int) -> Fraction:
    """Sum of latency costs over player i's resources"""
    counts = congestion(game, state)
    res = game.resource_map
    return sum(
        (res[r].latency(counts[r], r) for r in state[i]), Fraction(0)
    )


def bottleneck_max(game: Game, state: State, i: int) -> Fraction:
    """Largest bottleneck cost over player i's resources"""
    counts = congestion(game, state)
    res = game.resource_map
    return max(
        (res[r].bottleneck(counts[r], r) for r in state[i]), default=Fraction(0)
    )


def player_cost(game: Game, state: State, i: int) -> Fraction:
    """c_i(S), exactly"""
    alpha = game.players[i].alpha
    total = latency_sum(game, state, i)
    worst = bottleneck_max(game, state, i)
    return alpha * total + (1 - alpha) * worst


def first_state(game: Game) -> State:
    """Everyone on her first strategy"""
    return State(tuple(p.space.first() for p in game.players))


def random_state(game: Game, rng: Random, cap: int = BASIS_CAP) -> State:
    """A random strategy per player, reproducible from rng"""
    choices = []
    for player in game.players:
        space = player.space
        if space.can_expand(cap):
            options = space.expand(cap)
            choices.append(options[rng.randrange(len(options))])
        else:
            m = space.matroid
            weights = {e: rng.random() for e in m.ground}  # type: ignore[union-attr]
            choices.append(matroid.greedy_min_basis(m, weights))  # type: ignore
    return State(tuple(choices))


class CostEvaluator:
    """Table-driven cost evaluation shared by the search loops.

    Cost tables are built once for congestion 1..n; integral values are
    stored as int, which keeps the arithmetic exact and fast.  Counts
    passed in always include the player being evaluated.
    """

    def __init__(self, game: Game):
        self.game = game
        n = game.n
        self.latency: Dict[str, List[Any]] = {}
        self.bottleneck: Dict[str, List[Any]] = {}
        for res in game.resources:
            self.latency[res.id] = [None] + [_compact(v) for v in res.latency.upto(n)]
            self.bottleneck[res.id] = [None] + [
                _compact(v) for v in res.bottleneck.upto(n)
            ]
        self.alpha = [_compact(p.alpha) for p in game.players]
        self.weight = [_compact(1 - p.alpha) for p in game.players]

    def counts(self, state: Iterable[Strategy]) -> Counter:
        """Congestion of the used resources"""
        counts: Counter = Counter()
        for strategy in state:
            counts.update(strategy)
        return counts

    def latency_sum(self, strategy: Strategy, counts) -> Number:
        """Sum of latencies at the given counts"""
        try:
            lat = self.latency
            return sum(lat[r][counts[r]] for r in strategy)
        except IndexError:
            raise self._overflow(strategy, counts) from None

    def bottleneck_max(self, strategy: Strategy, counts) -> Number:
        """Maximum bottleneck cost at the given counts"""
        try:
            bot = self.bottleneck
            return max((bot[r][counts[r]] for r in strategy), default=0)
        except IndexError:
            raise self._overflow(strategy, counts) from None

    def cost(self, i: int, strategy: Strategy, counts) -> Number:
        """Cost of player i on strategy; counts include her"""
        alpha = self.alpha[i]
        if alpha == 1:
            return self.latency_sum(strategy, counts)
        if alpha == 0:
            return self.bottleneck_max(strategy, counts)
        return alpha * self.latency_sum(strategy, counts) + self.weight[
            i
        ] * self.bottleneck_max(strategy, counts)

    def deviation_cost(
        self, i: int, current: Strategy, candidate: Strategy, counts
    ) -> Number:
        """Cost of player i after moving from current to candidate"""
        if candidate == current:
            return self.cost(i, candidate, counts)
        shifted = {r: counts[r] + (r not in current) for r in candidate}
        return self.cost(i, candidate, shifted)

    def costs(self, state: State) -> List[Number]:
        """Every player's cost"""
        counts = self.counts(state)
        return [self.cost(i, s, counts) for i, s in enumerate(state)]

    def weights(self, i: int, current: Strategy, counts, which: str) -> Dict[str, Number]:
        """Per-resource cost player i would face on each usable resource.

        which is "latency", "bottleneck" or "mixed" (alpha-weighted sum
        of both, the player-specific cost of the resource).
        """
        space = self.game.players[i].space
        table = {}
        for r in space.resources:
            x = counts[r] + (r not in current)
            try:
                if which == "latency":
                    table[r] = self.latency[r][x]
                elif which == "bottleneck":
                    table[r] = self.bottleneck[r][x]
                else:
                    table[r] = (
                        self.alpha[i] * self.latency[r][x]
                        + self.weight[i] * self.bottleneck[r][x]
                    )
            except IndexError:
                raise self._overflow(frozenset([r]), {r: x}, which) from None
        return table

    def _overflow(
        self, strategy: Strategy, counts, which: str = "mixed"
    ) -> CostTableOverflow:
        for r in strategy:
            if which == "latency":
                length = len(self.latency[r]) - 1
            elif which == "bottleneck":
                length = len(self.bottleneck[r]) - 1
            else:
                length = min(len(self.latency[r]), len(self.bottleneck[r])) - 1
            if counts[r] > length:
                return CostTableOverflow(r, counts[r], length)
        return CostTableOverflow("?", 0, 0)


def _compact(value: Fraction) -> Number:
    if value.denominator == 1:
        return int(value)
    return value
