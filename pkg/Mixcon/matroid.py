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

"""Matroid strategy spaces.

A Matroid is an immutable description (uniform, partition, graphic or an
explicit list of bases) over an ordered ground set of resource ids.  The
ground order is the tie breaker of every deterministic choice made here:
basis enumeration is lexicographic in it and the greedy algorithm prefers
earlier elements among equal weights.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import (
    Collection,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import networkx as nx

from Mixcon.constants import BASIS_CAP, EXCHANGE_CAP
from Mixcon.exceptions import CapExceeded, GroundSetError
from Mixcon.typing import MatroidKind
from Mixcon.util import order_index, sort_key

log = logging.getLogger(__name__)

Basis = FrozenSet[str]
Edge = Tuple[str, Hashable, Hashable]


@dataclass(frozen=True)
class Matroid:
    """Immutable matroid handle; build it with the class methods."""

    kind: int
    ground: Tuple[str, ...]
    k: int = 0
    blocks: Tuple[Tuple[str, ...], ...] = ()
    ranks: Tuple[int, ...] = ()
    edges: Tuple[Edge, ...] = ()
    bases: Tuple[Tuple[str, ...], ...] = ()
    exchange_cap: int = field(default=EXCHANGE_CAP, compare=False)

    @classmethod
    def uniform(cls, ground: Iterable[str], k: int) -> "Matroid":
        """All k-subsets of ground are bases"""
        return cls(MatroidKind.uniform, tuple(ground), k=k)

    @classmethod
    def partition(
        cls, blocks: Iterable[Iterable[str]], ranks: Iterable[int]
    ) -> "Matroid":
        """At most ranks[j] elements from blocks[j]; ground is the blocks in order"""
        blocks = tuple(tuple(block) for block in blocks)
        ground = tuple(e for block in blocks for e in block)
        return cls(MatroidKind.partition, ground, blocks=blocks, ranks=tuple(ranks))

    @classmethod
    def graphic(cls, edges: Iterable[Sequence[Hashable]]) -> "Matroid":
        """Spanning forests of a multigraph whose edges are (id, u, v)"""
        edges = tuple((str(e[0]), e[1], e[2]) for e in edges)
        return cls(MatroidKind.graphic, tuple(e[0] for e in edges), edges=edges)

    @classmethod
    def explicit_bases(
        cls,
        bases: Iterable[Iterable[str]],
        ground: Optional[Iterable[str]] = None,
        exchange_cap: int = EXCHANGE_CAP,
    ) -> "Matroid":
        """Bases listed one by one.

        Without a ground order the elements are ordered by first
        appearance in the list.
        """
        bases = tuple(tuple(b) for b in bases)
        if ground is None:
            ground = dict.fromkeys(e for b in bases for e in b)
        return cls(
            MatroidKind.explicit_bases,
            tuple(ground),
            bases=bases,
            exchange_cap=exchange_cap,
        )

    @cached_property
    def index(self) -> Dict[str, int]:
        """Position of each ground element"""
        return order_index(self.ground)

    @cached_property
    def base_sets(self) -> Tuple[Basis, ...]:
        """Listed bases as sets (explicit_bases only)"""
        return tuple(frozenset(b) for b in self.bases)

    @cached_property
    def _base_lookup(self) -> FrozenSet[Basis]:
        return frozenset(self.base_sets)

    @cached_property
    def _block_of(self) -> Dict[str, int]:
        return {e: j for j, block in enumerate(self.blocks) for e in block}

    @cached_property
    def _ends(self) -> Dict[str, Tuple[Hashable, Hashable]]:
        return {e: (u, v) for e, u, v in self.edges}

    @cached_property
    def graph(self) -> nx.MultiGraph:
        """The multigraph of a graphic matroid, edge keys are resource ids"""
        graph = nx.MultiGraph()
        for e, u, v in self.edges:
            graph.add_edge(u, v, key=e)
        return graph

    @cached_property
    def rank(self) -> int:
        """Cardinality of every basis"""
        if self.kind == MatroidKind.uniform:
            return self.k
        if self.kind == MatroidKind.partition:
            return sum(min(r, len(b)) for r, b in zip(self.ranks, self.blocks))
        if self.kind == MatroidKind.graphic:
            if not self.edges:
                return 0
            graph = self.graph
            return len(graph) - nx.number_connected_components(graph)
        if not self.bases:
            return 0
        return len(self.base_sets[0])

    @property
    def unverified(self) -> bool:
        """True when an explicit basis list was too large to check for exchange"""
        return (
            self.kind == MatroidKind.explicit_bases
            and len(self.ground) > self.exchange_cap
        )

    def describe(self) -> str:
        """Short human readable summary"""
        return (
            f"{MatroidKind.whatis(self.kind)} matroid of rank {self.rank} "
            f"on {len(self.ground)} elements"
        )

    def violations(self) -> List[str]:
        """Broken matroid invariants, as messages"""
        problems: List[str] = []
        if len(set(self.ground)) != len(self.ground):
            problems.append("duplicate ground element")

        if self.kind == MatroidKind.uniform:
            if not 0 <= self.k <= len(self.ground):
                problems.append(f"rank {self.k} out of range")

        elif self.kind == MatroidKind.partition:
            if len(self.ranks) != len(self.blocks):
                problems.append("partition needs one rank per block")
            for block, rank in zip(self.blocks, self.ranks):
                if not 0 <= rank <= len(block):
                    problems.append(
                        f"block rank {rank} out of range for block of "
                        f"{len(block)}"
                    )

        elif self.kind == MatroidKind.graphic:
            if not self.edges:
                problems.append("graph has no edges")
            elif not nx.is_connected(self.graph):
                problems.append("graph not connected")

        else:
            problems.extend(self._basis_list_violations())
        return problems

    def _basis_list_violations(self) -> List[str]:
        problems: List[str] = []
        if not self.bases:
            return ["no bases listed"]
        known = set(self.ground)
        for basis in self.bases:
            if len(set(basis)) != len(basis):
                problems.append(f"duplicate element in basis {sorted(basis)}")
            missing = set(basis) - known
            if missing:
                problems.append(f"basis element outside ground: {sorted(missing)}")
        if len({len(b) for b in self.base_sets}) > 1:
            problems.append("bases of unequal size")
        if len(self._base_lookup) != len(self.base_sets):
            problems.append("duplicate basis")
        if problems:
            return problems

        if self.unverified:
            log.warning(
                "exchange property not checked for %d bases on %d elements",
                len(self.bases),
                len(self.ground),
            )
            return problems
        broken = basis_exchange_violation(self.base_sets)
        if broken is not None:
            first, second, elem = broken
            problems.append(
                f"exchange property fails for {sorted(first)}, "
                f"{sorted(second)} at {elem}"
            )
        return problems

    def _check_ground(self, s: Collection[str]) -> None:
        for e in s:
            if e not in self.index:
                raise GroundSetError(f"element {e!r} outside ground set")

    def is_independent(self, s: Collection[str]) -> bool:
        """Independence oracle.

        Raises:
            GroundSetError: s has an element outside the ground set.
        """
        self._check_ground(s)
        if self.kind == MatroidKind.uniform:
            return len(s) <= self.k
        if self.kind == MatroidKind.partition:
            used = [0] * len(self.blocks)
            for e in s:
                used[self._block_of[e]] += 1
            return all(u <= r for u, r in zip(used, self.ranks))
        if self.kind == MatroidKind.graphic:
            if not s:
                return True
            forest = nx.MultiGraph()
            for e in s:
                u, v = self._ends[e]
                forest.add_edge(u, v, key=e)
            return nx.is_forest(forest)
        s = frozenset(s)
        return any(s <= b for b in self.base_sets)

    def is_basis(self, s: Collection[str]) -> bool:
        """A maximal independent set"""
        if self.kind == MatroidKind.explicit_bases:
            self._check_ground(s)
            return frozenset(s) in self._base_lookup
        return len(set(s)) == self.rank and self.is_independent(s)


def is_independent(m: Matroid, s: Collection[str]) -> bool:
    """Independence oracle of m"""
    return m.is_independent(s)


def enumerate_bases(m: Matroid, cap: int = BASIS_CAP) -> List[Basis]:
    """All bases of m, lexicographic in ground order.

    Explicit basis lists are returned sorted without the cap; the other
    kinds are enumerated from their independence oracle.

    Raises:
        CapExceeded: the ground set is larger than cap.
    """
    key = lambda basis: sort_key(basis, m.index)
    if m.kind == MatroidKind.explicit_bases:
        return sorted(m.base_sets, key=key)
    if len(m.ground) > cap:
        raise CapExceeded("matroid ground set", len(m.ground), cap)
    rank = m.rank
    return [
        frozenset(c) for c in combinations(m.ground, rank) if m.is_independent(c)
    ]


def greedy_min_basis(
    m: Matroid,
    w: Mapping[str, object],
    prefer: Collection[str] = (),
) -> Basis:
    """Minimum-weight basis by the matroid greedy algorithm.

    Elements are scanned by ascending weight and added while the set
    stays independent.  Equal weights go to elements of prefer first
    and then by ground order; with prefer set to a current basis the
    result is a minimum-weight basis sharing as many elements with it as
    possible.
    """
    missing = [e for e in m.ground if e not in w]
    if missing:
        raise GroundSetError(f"no weight for {missing}")
    preferred = frozenset(prefer)
    order = sorted(
        m.ground, key=lambda e: (w[e], e not in preferred, m.index[e])  # type: ignore
    )
    rank = m.rank

    if m.kind == MatroidKind.graphic:
        # Kruskal
        forest = nx.utils.UnionFind()
        chosen: List[str] = []
        for e in order:
            u, v = m._ends[e]  # pylint: disable=protected-access
            if forest[u] != forest[v]:
                forest.union(u, v)
                chosen.append(e)
                if len(chosen) == rank:
                    break
        return frozenset(chosen)

    chosen_set: FrozenSet[str] = frozenset()
    for e in order:
        if len(chosen_set) == rank:
            break
        candidate = chosen_set | {e}
        if m.is_independent(candidate):
            chosen_set = candidate
    return chosen_set


def single_exchanges(m: Matroid, basis: Basis) -> Iterator[Tuple[str, str]]:
    """Pairs (x, y) with basis - x + y again a basis, in ground order"""
    inside = sorted(basis, key=m.index.__getitem__)
    outside = [e for e in m.ground if e not in basis]
    for x in inside:
        rest = basis - {x}
        for y in outside:
            if m.is_basis(rest | {y}):
                yield x, y


def basis_exchange_violation(
    bases: Sequence[Basis],
) -> Optional[Tuple[Basis, Basis, str]]:
    """First (B, B', x) for which no y in B' - B makes B - x + y a basis"""
    lookup = frozenset(bases)
    for first in bases:
        for second in bases:
            if first == second:
                continue
            for x in sorted(first - second):
                rest = first - {x}
                if not any(rest | {y} in lookup for y in second - first):
                    return first, second, x
    return None


class MaxWeightCheck(NamedTuple):
    """Outcome of lemma1_verify"""

    holds: bool
    witness: Optional[Basis]


def max_weight(basis: Iterable[str], w: Mapping[str, object]):
    """Largest weight in a basis, 0 for the empty basis"""
    return max((w[e] for e in basis), default=0)  # type: ignore


def lemma1_verify(
    m: Matroid, w: Mapping[str, object], cap: int = BASIS_CAP
) -> MaxWeightCheck:
    """Check that the greedy minimum-sum basis also minimises the maximum.

    Every basis is enumerated; the witness is a basis whose largest
    weight is smaller than the greedy basis's, which must never exist.
    """
    bases = enumerate_bases(m, cap)
    greedy_max = max_weight(greedy_min_basis(m, w), w)
    best = min(bases, key=lambda b: max_weight(b, w))
    if max_weight(best, w) < greedy_max:
        return MaxWeightCheck(False, best)
    return MaxWeightCheck(True, None)
