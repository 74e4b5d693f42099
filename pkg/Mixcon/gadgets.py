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

"""Fixed games with known behaviour and the independent-set reduction.

build_thm2     two players, alpha 1/2, uniform matroids, no equilibrium
build_thm4a    two players with alpha 0 and 1, no equilibrium
build_thm4b    two players, alpha 1/2, identical linear costs, no equilibrium
build_thm5     three-player singleton game whose best responses cycle
build_thm7     ten players, every state leaves someone a factor 3 gain
build_is_reduction
               matroid game with an equilibrium iff a graph has an
               independent set of size k
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx

from Mixcon.equilibrium import enumerate_pne
from Mixcon.exceptions import CapExceeded, ReductionError
from Mixcon.game import CostFunction, Game, Player, Resource, StrategySpace, validate
from Mixcon.matroid import Matroid

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)

S11 = ("r1", "r2", "r3")
S12 = ("r4", "r5", "r6")
S21 = ("r4", "r5")
S22 = ("r6", "r7")


def _linear(lat_a=0, lat_b=0, bot_a=0, bot_b=0):
    return CostFunction.linear(lat_a, lat_b), CostFunction.linear(bot_a, bot_b)


def _resource(rid: str, costs) -> Resource:
    return Resource(rid, costs[0], costs[1])


def _checked(game: Game) -> Game:
    problems = validate(game)
    if problems:
        raise AssertionError(f"{game.name}: " + "; ".join(map(str, problems)))
    return game


def _thm2_resources(e_r7: int) -> List[Resource]:
    resources = [_resource(f"r{i}", _linear(0, 0, 200)) for i in (1, 2, 3)]
    resources += [_resource(f"r{i}", _linear(20, 0, 50)) for i in (4, 5)]
    resources.append(_resource("r6", _linear(8, 0, 80)))
    resources.append(_resource("r7", _linear(0, 0, e_r7)))
    return resources


def _triples() -> List[Tuple[str, ...]]:
    return list(itertools.combinations([f"r{i}" for i in range(1, 7)], 3))


def _pairs() -> List[Tuple[str, ...]]:
    return list(itertools.combinations([f"r{i}" for i in range(4, 8)], 2))


def build_thm2(restricted: bool = False) -> Game:
    """Two players with alpha 1/2 and no pure equilibrium.

    Player 1 picks any three of r1..r6, player 2 any two of r4..r7.
    With restricted=True each player keeps only the two strategies
    S11, S12 and S21, S22 on which best responses go round in a
    four-state cycle.
    """
    if restricted:
        spaces = [[S11, S12], [S21, S22]]
    else:
        spaces = [_triples(), _pairs()]
    players = [Player(HALF, StrategySpace.explicit(s)) for s in spaces]
    name = "thm2-restricted" if restricted else "thm2"
    return _checked(Game(tuple(players), tuple(_thm2_resources(160)), name))


def build_thm4a() -> Game:
    """alpha 0 against alpha 1 with identical linear costs, no equilibrium"""
    slopes = {"r1": 6, "r2": 2, "r3": 2, "r4": 2, "r5": 4, "r6": 3}
    resources = [_resource(r, _linear(a, 0, a)) for r, a in slopes.items()]
    players = [
        Player(Fraction(0), StrategySpace.explicit([["r1"], ["r2", "r3", "r4", "r5"]])),
        Player(Fraction(1), StrategySpace.explicit([["r2", "r3", "r4"], ["r5", "r6"]])),
    ]
    return _checked(Game(tuple(players), tuple(resources), "thm4a"))


def build_thm4b() -> Game:
    """Two alpha 1/2 players with identical linear costs, no equilibrium"""
    costs = {
        "r1": (32, 0),
        "r2": (14, 0),
        "r3": (14, 0),
        "r4": (12, 8),
        "r5": (12, 8),
    }
    resources = [_resource(r, _linear(a, b, a, b)) for r, (a, b) in costs.items()]
    players = [
        Player(HALF, StrategySpace.explicit([["r1", "r2", "r4"], ["r1", "r3", "r5"]])),
        Player(HALF, StrategySpace.explicit([["r2", "r5"], ["r3", "r4"]])),
    ]
    return _checked(Game(tuple(players), tuple(resources), "thm4b"))


def build_thm5() -> Game:
    """Singleton game in which best responses from (r1, r1, r2) cycle.

    Tables repeat their last value up to three players; no resource is
    available to all three, so that entry is never read.  The bottleneck
    cost of r1 is zero: only the alpha 1 players can use r1.
    """
    tables = {
        "r1": ((2, 5), (0, 0)),
        "r2": ((3, 4), (1, 4)),
        "r3": ((1, 6), (2, 3)),
    }
    resources = [
        Resource(
            r,
            CostFunction.table(lat + lat[-1:]),
            CostFunction.table(bot + bot[-1:]),
        )
        for r, (lat, bot) in tables.items()
    ]
    players = [
        Player(Fraction(1), StrategySpace.explicit([["r1"], ["r2"]])),
        Player(Fraction(1), StrategySpace.explicit([["r1"], ["r3"]])),
        Player(Fraction(0), StrategySpace.explicit([["r2"], ["r3"]])),
    ]
    return _checked(Game(tuple(players), tuple(resources), "thm5", singleton_declared=True))


GROUPS = ((1, 2, 3, 4), (7, 8, 9, 10))


def personal(i: int, side: int) -> str:
    """Resource only player i uses with her strategy side"""
    return f"r{i}_{side}"


def shared(i: int, j: int, copy: int, side: int) -> str:
    """Resource of the pair i < j, used by copy 1 (player 5) or 2 (player 6)"""
    return f"r{i}-{j}_{copy}{side}"


def _small_player(i: int) -> List[List[str]]:
    group = GROUPS[0] if i in GROUPS[0] else GROUPS[1]
    pairs = [p for p in itertools.combinations(group, 2) if i in p]
    return [
        [personal(i, side)]
        + [shared(a, b, copy, side) for a, b in pairs for copy in (1, 2)]
        for side in (1, 2)
    ]


def _large_player(
    copy: int, sides: Tuple[Tuple[int, int], Tuple[int, int]]
) -> List[List[str]]:
    """Strategies of player 5 (copy 1) or player 6 (copy 2).

    sides lists, per strategy side, the personal side taken in the first
    and the second group; the pair resources use the other side.
    """
    strategies = []
    for first, second in sides:
        base = [personal(i, first) for i in GROUPS[0]]
        base += [personal(i, second) for i in GROUPS[1]]
        for a in itertools.combinations(GROUPS[0], 2):
            for b in itertools.combinations(GROUPS[1], 2):
                strategies.append(
                    base
                    + [shared(*a, copy, 3 - first), shared(*b, copy, 3 - second)]
                )
    return strategies


def build_thm7() -> Game:
    """Ten players; in every state some player can cut her cost to a third.

    Players 1-4 and 7-10 have alpha 1 and two strategies.  Players 5 and
    6 have alpha 0; each picks a side and, freely, one pair in each
    group.
    """
    ids: List[str] = []
    for group in GROUPS:
        for i in group:
            ids += [personal(i, 1), personal(i, 2)]
    pair_ids = [
        shared(a, b, copy, side)
        for group in GROUPS
        for a, b in itertools.combinations(group, 2)
        for copy in (1, 2)
        for side in (1, 2)
    ]
    resources = [_resource(r, _linear(1, 0, 0)) for r in ids]
    resources += [_resource(r, _linear(0, 0, 1)) for r in pair_ids]

    players = []
    for i in range(1, 11):
        if i == 5:
            space = _large_player(1, ((1, 1), (2, 2)))
        elif i == 6:
            space = _large_player(2, ((1, 2), (2, 1)))
        else:
            space = _small_player(i)
        alpha = Fraction(0) if i in (5, 6) else Fraction(1)
        players.append(Player(alpha, StrategySpace.explicit(space)))
    return _checked(Game(tuple(players), tuple(resources), "thm7"))


# Independent set reduction


@dataclass(frozen=True)
class GraphInstance:
    """A simple graph and the independent-set size k asked for"""

    vertices: Tuple[Hashable, ...]
    edges: Tuple[Tuple[Hashable, Hashable], ...]
    k: int

    @classmethod
    def from_graph(cls, graph: nx.Graph, k: int) -> "GraphInstance":
        """Vertices in graph order; edges oriented by that order"""
        order = {v: pos for pos, v in enumerate(graph.nodes)}
        edges = tuple(
            (u, v) if order[u] < order[v] else (v, u) for u, v in graph.edges
        )
        return cls(tuple(graph.nodes), edges, k)

    @classmethod
    def from_edgelist(cls, lines: Iterable[str], k: int) -> "GraphInstance":
        """One "u v" pair per line; '#' starts a comment"""
        try:
            graph = nx.parse_edgelist(
                (line for line in lines if line.strip()), nodetype=str, data=False
            )
        except (TypeError, IndexError) as error:
            raise ReductionError(f"bad edge list: {error}") from error
        return cls.from_graph(graph, k)

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph

    @property
    def max_degree(self) -> int:
        return max((deg for _, deg in self.graph.degree), default=0)

    def violations(self) -> List[str]:
        """Why the reduction cannot be built, if it cannot"""
        problems = []
        if len(set(self.vertices)) != len(self.vertices):
            problems.append("duplicate vertex")
        if any(u == v for u, v in self.edges):
            problems.append("self-loop")
        if self.graph.number_of_edges() != len(self.edges):
            problems.append("duplicate edge")
        isolated = [v for v in self.vertices if self.graph.degree[v] == 0]
        if isolated:
            problems.append(f"isolated vertices {isolated}")
        if self.max_degree < 2:
            problems.append(f"maximum degree {self.max_degree} < 2")
        if not 0 <= self.k <= len(self.vertices):
            problems.append(f"k={self.k} outside 0..{len(self.vertices)}")
        return problems


def _edge_id(u: Hashable, v: Hashable) -> str:
    return f"e{u}-{v}"


def build_is_reduction(g: GraphInstance) -> Game:
    """Matroid game that has an equilibrium iff g has an independent set of size k.

    Players are one per vertex (in vertex order), then the connection
    player, then the two players of the no-equilibrium game.  Vertex v
    with degree d takes any d of its edge resources, d-1 private
    resources and the connection resource.  The connection resource
    turns expensive once more than n-k+1 players use it, which sends the
    connection player to r7 and revives the two-player cycle.

    Raises:
        ReductionError: the graph breaks the reduction's assumptions.
    """
    problems = g.violations()
    if problems:
        raise ReductionError("; ".join(problems))
    n = len(g.vertices)
    players_total = n + 3
    threshold = n - g.k + 1

    resources = [_resource(_edge_id(u, v), _linear(1000)) for u, v in g.edges]
    players = []
    for v in g.vertices:
        degree = g.graph.degree[v]
        incident = [_edge_id(a, b) for a, b in g.edges if v in (a, b)]
        private = [f"q{v}_{j}" for j in range(1, degree)]
        resources += [_resource(q, _linear(0, 0, 0, 1000 * degree + 1)) for q in private]
        ground = incident + private + ["rc"]
        players.append(Player(HALF, StrategySpace.of_matroid(Matroid.uniform(ground, degree))))

    resources.append(
        Resource(
            "rc",
            CostFunction.linear(0),
            CostFunction.table(
                0 if x <= threshold else 1000 for x in range(1, players_total + 1)
            ),
        )
    )
    resources += _thm2_resources(80)
    players.append(Player(HALF, StrategySpace.explicit([["rc"], ["r7"]])))
    players.append(Player(HALF, StrategySpace.explicit(_triples())))
    players.append(Player(HALF, StrategySpace.explicit(_pairs())))
    name = f"is-reduction n={n} m={len(g.edges)} k={g.k}"
    return _checked(Game(tuple(players), tuple(resources), name))


def max_independent_set(graph: nx.Graph) -> List[Hashable]:
    """A largest independent set, by trying every vertex subset"""
    nodes = list(graph.nodes)
    for size in range(len(nodes), 0, -1):
        for subset in itertools.combinations(nodes, size):
            if not any(graph.has_edge(u, v) for u, v in itertools.combinations(subset, 2)):
                return list(subset)
    return []


def has_independent_set(graph: nx.Graph, k: int) -> bool:
    """Whether graph has an independent set of at least k vertices"""
    return len(max_independent_set(graph)) >= k


class ReductionOutcome(NamedTuple):
    """One (graph, k) of a reduction check; has_pne None when not decided"""

    instance: GraphInstance
    has_independent_set: bool
    has_pne: Optional[bool]

    @property
    def agrees(self) -> bool:
        return self.has_pne is None or self.has_pne == self.has_independent_set


def reduction_check(graph: nx.Graph, cap: Optional[int] = None) -> List[ReductionOutcome]:
    """Compare equilibrium existence with independent sets for k = 1..n"""
    outcomes = []
    size = len(max_independent_set(graph))
    for k in range(1, graph.number_of_nodes() + 1):
        instance = GraphInstance.from_graph(graph, k)
        game = build_is_reduction(instance)
        options: Dict[str, Any] = {"limit": 1}
        if cap is not None:
            options["cap"] = cap
        try:
            has_pne: Optional[bool] = bool(enumerate_pne(game, **options))
        except CapExceeded as error:
            log.warning("%s: %s", game.name, error)
            has_pne = None
        outcome = ReductionOutcome(instance, size >= k, has_pne)
        if not outcome.agrees:
            log.warning(
                "%s: independent set %s but equilibrium %s",
                game.name,
                outcome.has_independent_set,
                outcome.has_pne,
            )
        outcomes.append(outcome)
    return outcomes


def reduction_sweep(max_vertices: int = 4, cap: Optional[int] = None) -> List[ReductionOutcome]:
    """reduction_check over every atlas graph the reduction accepts"""
    outcomes = []
    for graph in nx.graph_atlas_g():
        if graph.number_of_nodes() > max_vertices:
            break
        if graph.number_of_nodes() == 0:
            continue
        degrees = [deg for _, deg in graph.degree]
        if min(degrees) == 0 or max(degrees) < 2:
            continue
        outcomes += reduction_check(graph, cap)
    return outcomes


BUILDERS = {
    "thm2": build_thm2,
    "thm2-restricted": lambda: build_thm2(restricted=True),
    "thm4a": build_thm4a,
    "thm4b": build_thm4b,
    "thm5": build_thm5,
    "thm7": build_thm7,
}
