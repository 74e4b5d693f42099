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

"""Pure equilibria: enumeration, certification, solvers and approximation.

The exact solvers reduce a game to a player-specific congestion game, in
which player i pays the sum of w_i,r(n_r) over her resources, and look
for an equilibrium of that game with lazy best-response dynamics.  The
reductions are chosen so that every equilibrium of the player-specific
game is an equilibrium (or, for the approximation route, a
d-approximate equilibrium) of the mixed game.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from Mixcon.constants import (
    APPROX_MAX_STEPS,
    BASIS_CAP,
    BFS_CAP,
    DOMINANCE_CAP,
    ENUM_CAP,
    PROBE_BUDGET,
)
from Mixcon.dynamics import ResponseModel, probe_model, rank_potential, run_model
from Mixcon.exceptions import (
    CapExceeded,
    IntractableBestResponse,
    NotApplicable,
    SolverError,
)
from Mixcon.game import (
    DependencePoint,
    Game,
    Number,
    State,
    Strategy,
    check_state,
    congestion,
    first_state,
    monotone_dependence_witness,
)
from Mixcon.typing import MoveRule, PotentialKind, SolveMethod, Verdict
from Mixcon.util import Ratio, chunked, format_ratio, ratio

log = logging.getLogger(__name__)

Tables = List[Dict[str, List[Any]]]


@dataclass
class Certificate:
    """How far a state is from equilibrium.

    beta_achieved is the largest factor by which a single player could
    cut her cost.  With squared set the target is compared against
    beta_achieved squared, which keeps square-root targets rational.
    """

    state: State
    beta_achieved: Ratio
    worst_player: int
    worst_deviation: Strategy
    target: Fraction = Fraction(1)
    squared: bool = False
    steps: int = 0

    def passes(self, beta: Fraction) -> bool:
        """Whether the state is a beta-approximate equilibrium"""
        if self.beta_achieved == math.inf:
            return False
        if self.squared:
            return self.beta_achieved**2 <= beta
        return self.beta_achieved <= beta

    @property
    def passed(self) -> bool:
        """Verdict against the requested target"""
        return self.passes(self.target)

    @property
    def is_equilibrium(self) -> bool:
        """beta_achieved <= 1"""
        return self.beta_achieved <= 1

    def line(self, game: Game) -> str:
        """Export format"""
        space = game.players[self.worst_player].space
        return (
            f"beta_achieved={format_ratio(self.beta_achieved)} "
            f"worst_player={self.worst_player + 1} "
            f"worst_deviation={space.token(self.worst_deviation)} "
            f"pass={'true' if self.passed else 'false'}"
        )


class MonotoneCheck(NamedTuple):
    """Outcome of check_monotone_dependence"""

    holds: bool
    witness: Optional[Tuple[DependencePoint, DependencePoint]]


class SolveResult(NamedTuple):
    """Outcome of solve(); state is None when no equilibrium exists"""

    state: Optional[State]
    route: str
    certificate: Optional[Certificate]


class SweepResult(NamedTuple):
    """Extremes of beta_achieved over a set of states"""

    min_beta: Ratio
    argmin: Optional[State]
    max_beta: Ratio
    states: int


def check_monotone_dependence(game: Game) -> MonotoneCheck:
    """Whether bottleneck = f(latency) for a non-decreasing f"""
    witness = monotone_dependence_witness(game)
    return MonotoneCheck(witness is None, witness)


def _beta_of(model: ResponseModel, state: State, counts=None) -> Tuple[Ratio, int, Strategy]:
    if counts is None:
        counts = model.counts(state)
    worst: Tuple[Ratio, int, Strategy] = (Fraction(0), 0, state[0])
    for i in range(model.game.n):
        best_cost, best = model.best_responses(state, i, counts)
        factor = ratio(model.cost(i, state[i], counts), best_cost)
        if factor > worst[0]:
            worst = (factor, i, best[0])
    return worst


def certify(
    game: Game,
    state: State,
    beta: Any = 1,
    squared: bool = False,
    basis_cap: int = BASIS_CAP,
) -> Certificate:
    """Exact approximation factor of state, judged against beta.

    With squared=True, beta is the square of the factor, so that
    sqrt(d) is certified as beta=d.

    Raises:
        ValueError: beta < 1.
        IntractableBestResponse: a player's deviations cannot be searched.
    """
    beta = Fraction(beta)
    if beta < 1:
        raise ValueError(f"beta must be at least 1, got {beta}")
    check_state(game, state)
    factor, worst, deviation = _beta_of(ResponseModel(game, basis_cap), state)
    return Certificate(state, factor, worst, deviation, beta, squared)


# Dominance pruning and enumeration


def _all_options(model: ResponseModel) -> List[Tuple[Strategy, ...]]:
    options = []
    for i, player in enumerate(model.game.players):
        found = model.options(i)
        if found is None:
            m = player.space.matroid
            raise CapExceeded(
                f"matroid ground set of player {i + 1}",
                len(m.ground),  # type: ignore[union-attr]
                model.basis_cap,
            )
        options.append(found)
    return options


def _prune_dominated(
    model: ResponseModel, spaces: List[List[Strategy]], cap: int
) -> List[List[Strategy]]:
    """Iterated removal of strictly dominated strategies.

    Player i's strategies are compared on every profile of the opponents
    whose strategies can touch her resources; players with more than cap
    such profiles are left alone.  Equilibrium strategies are never
    removed.
    """
    n = model.game.n
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if len(spaces[i]) < 2:
                continue
            mine = set().union(*spaces[i])
            rivals = [
                j
                for j in range(n)
                if j != i and any(mine & s for s in spaces[j])
            ]
            profiles = 1
            for j in rivals:
                profiles *= len(spaces[j])
            if profiles > cap:
                continue
            vectors: List[List[Number]] = [[] for _ in spaces[i]]
            for profile in itertools.product(*(spaces[j] for j in rivals)):
                counts: Counter = Counter()
                for s in profile:
                    counts.update(s)
                for pos, s in enumerate(spaces[i]):
                    here = {r: counts[r] + 1 for r in s}
                    vectors[pos].append(model.cost(i, s, here))
            keep = [
                s
                for pos, s in enumerate(spaces[i])
                if not any(
                    other != pos
                    and all(a < b for a, b in zip(vectors[other], vectors[pos]))
                    for other in range(len(spaces[i]))
                )
            ]
            if len(keep) < len(spaces[i]):
                log.debug(
                    "player %d: %d of %d strategies dominated",
                    i + 1,
                    len(spaces[i]) - len(keep),
                    len(spaces[i]),
                )
                spaces[i] = keep
                changed = True
    return spaces


def _is_pne(model: ResponseModel, options, state: State) -> bool:
    counts = model.counts(state)
    for i, current in enumerate(state):
        cost = model.cost(i, current, counts)
        for candidate in options[i]:
            if candidate != current and model.deviation_cost(
                i, current, candidate, counts
            ) < cost:
                return False
    return True


_WORKER: Dict[str, Any] = {}


def _init_worker(game: Game, basis_cap: int) -> None:
    model = ResponseModel(game, basis_cap)
    _WORKER["model"] = model
    _WORKER["options"] = _all_options(model)


def _pne_task(
    task: Tuple[List[Tuple[int, ...]], List[List[int]]], limit: int = 0
) -> List[Tuple[int, ...]]:
    prefixes, rest = task
    model = _WORKER["model"]
    options = _WORKER["options"]
    found = []
    for prefix in prefixes:
        for tail in itertools.product(*rest):
            picks = prefix + tail
            state = State(tuple(options[i][k] for i, k in enumerate(picks)))
            if _is_pne(model, options, state):
                found.append(picks)
                if len(found) == limit:
                    return found
    return found


def _split(
    sizes: List[List[int]], workers: int, chunk_size: int
) -> List[Tuple[List[Tuple[int, ...]], List[List[int]]]]:
    """Tasks over index prefixes long enough to feed the workers"""
    depth = 0
    prefixes = 1
    while depth < len(sizes) and prefixes < 4 * workers:
        prefixes *= len(sizes[depth])
        depth += 1
    heads = list(itertools.product(*sizes[:depth]))
    per_task = max(1, min(chunk_size, len(heads) // (4 * workers) or 1))
    return [(list(part), sizes[depth:]) for part in chunked(heads, per_task)]


def enumerate_pne(
    game: Game,
    cap: int = ENUM_CAP,
    prune: bool = True,
    dominance_cap: int = DOMINANCE_CAP,
    workers: int = 1,
    chunk_size: int = 4096,
    basis_cap: int = BASIS_CAP,
    limit: int = 0,
) -> List[State]:
    """All pure Nash equilibria, in lexicographic state order.

    A positive limit stops after that many have been found.

    Raises:
        CapExceeded: a matroid space or the (pruned) state product is
            too large.
    """
    model = ResponseModel(game, basis_cap)
    options = _all_options(model)
    spaces = [list(o) for o in options]
    if prune:
        spaces = _prune_dominated(model, spaces, dominance_cap)
    total = 1
    for space in spaces:
        total *= len(space)
    if total > cap:
        raise CapExceeded("state space", total, cap)
    log.info("enumerating %d states", total)

    positions = [[options[i].index(s) for s in space] for i, space in enumerate(spaces)]
    if workers > 1 and total > chunk_size:
        tasks = _split(positions, workers, chunk_size)
        with Pool(workers, initializer=_init_worker, initargs=(game, basis_cap)) as pool:
            found = [picks for part in pool.map(_pne_task, tasks) for picks in part]
            found.sort()
            if limit:
                found = found[:limit]
    else:
        _init_worker(game, basis_cap)
        found = _pne_task(([()], positions), limit)
    found.sort()
    return [
        State(tuple(options[i][k] for i, k in enumerate(picks))) for picks in found
    ]


def _sweep_task(
    task: Tuple[List[Tuple[int, ...]], List[List[int]]]
) -> Tuple[Ratio, Optional[Tuple[int, ...]], Ratio, int]:
    prefixes, rest = task
    model = _WORKER["model"]
    options = _WORKER["options"]
    low: Ratio = math.inf
    argmin = None
    high: Ratio = Fraction(0)
    count = 0
    for prefix in prefixes:
        for tail in itertools.product(*rest):
            picks = prefix + tail
            state = State(tuple(options[i][k] for i, k in enumerate(picks)))
            factor = _beta_of(model, state)[0]
            count += 1
            if factor < low:
                low, argmin = factor, picks
            if factor > high:
                high = factor
    return low, argmin, high, count


def beta_sweep(
    game: Game,
    workers: int = 1,
    chunk_size: int = 4096,
    cap: int = ENUM_CAP,
    basis_cap: int = BASIS_CAP,
) -> SweepResult:
    """beta_achieved over every state: minimum, a minimising state and maximum"""
    model = ResponseModel(game, basis_cap)
    options = _all_options(model)
    total = 1
    for o in options:
        total *= len(o)
    if total > cap:
        raise CapExceeded("state space", total, cap)
    positions = [list(range(len(o))) for o in options]
    tasks = _split(positions, max(1, workers), chunk_size)
    log.info("sweeping %d states in %d tasks", total, len(tasks))
    if workers > 1:
        with Pool(workers, initializer=_init_worker, initargs=(game, basis_cap)) as pool:
            parts = pool.map(_sweep_task, tasks)
    else:
        _init_worker(game, basis_cap)
        parts = [_sweep_task(task) for task in tasks]

    low: Ratio = math.inf
    argmin: Optional[Tuple[int, ...]] = None
    high: Ratio = Fraction(0)
    count = 0
    for part_low, part_arg, part_high, part_count in parts:
        count += part_count
        high = max(high, part_high)
        if part_arg is not None and (
            argmin is None
            or part_low < low
            or (part_low == low and part_arg < argmin)
        ):
            low, argmin = part_low, part_arg
    state = None
    if argmin is not None:
        state = State(tuple(options[i][k] for i, k in enumerate(argmin)))
    return SweepResult(low, state, high, count)


# Player-specific reductions


class PlayerSpecificModel(ResponseModel):
    """Player i pays sum of tables[i][r][n_r] over her resources"""

    def __init__(self, game: Game, tables: Tables, basis_cap: int = BASIS_CAP):
        super().__init__(game, basis_cap)
        self.tables = tables

    def cost(self, i: int, strategy: Strategy, counts) -> Number:
        table = self.tables[i]
        return sum(table[r][counts[r]] for r in strategy)

    def greedy_weights(self, i: int, current: Strategy, counts) -> Dict[str, Number]:
        table = self.tables[i]
        return {
            r: table[r][counts[r] + (r not in current)]
            for r in self.game.players[i].space.resources
        }

    def default_rule(self) -> int:
        return MoveRule.lazy_best_response


def mixed_tables(game: Game) -> Tables:
    """alpha_i * latency + (1 - alpha_i) * bottleneck, per player"""
    evaluator = ResponseModel(game).evaluator
    tables = []
    for i in range(game.n):
        alpha, weight = evaluator.alpha[i], evaluator.weight[i]
        tables.append(
            {
                r: [None]
                + [
                    alpha * lat + weight * bot
                    for lat, bot in zip(
                        evaluator.latency[r][1:], evaluator.bottleneck[r][1:]
                    )
                ]
                for r in evaluator.latency
            }
        )
    return tables


def pure_tables(game: Game) -> Tables:
    """Latency for alpha 1 players, bottleneck for alpha 0 players"""
    evaluator = ResponseModel(game).evaluator
    return [
        evaluator.latency if p.alpha == 1 else evaluator.bottleneck
        for p in game.players
    ]


def latency_tables(game: Game) -> Tables:
    """Latency for everybody: the classic congestion game"""
    evaluator = ResponseModel(game).evaluator
    return [evaluator.latency for _ in game.players]


def _require(game: Game, what: str, *flags: str) -> None:
    for flag in flags:
        if not getattr(game, flag):
            raise NotApplicable(what, flag)


def _specific_equilibrium(
    model: PlayerSpecificModel,
    start: State,
    cap: int,
    budget: int,
    bfs_cap: int,
    enum_cap: int = ENUM_CAP,
) -> State:
    """An equilibrium of a player-specific matroid game.

    Lazy best-response dynamics first; when they cycle or hit the cap,
    a best-response search from where they stopped, and finally
    exhaustive enumeration of the player-specific game.

    Raises:
        CapExceeded: the enumeration would pass enum_cap states.
    """
    game = model.game
    trace = run_model(model, start, MoveRule.lazy_best_response, max_steps=cap)
    if trace.verdict == Verdict.converged:
        return trace.final  # type: ignore[return-value]
    log.warning(
        "player-specific dynamics ended with %s after %d steps; searching",
        trace.verdict_text(),
        len(trace.steps),
    )
    probe = probe_model(model, trace.final, budget, bfs_cap, cap)  # type: ignore
    if probe.path is not None:
        return probe.path[-1]

    options = _all_options(model)
    total = 1
    for o in options:
        total *= len(o)
    if total > enum_cap:
        raise CapExceeded("player-specific state space", total, enum_cap)
    for state in itertools.product(*options):
        candidate = State(state)
        if model.is_equilibrium(candidate):
            return candidate
    raise SolverError(f"no player-specific equilibrium found for {game.name or 'game'}")


def _step_cap(game: Game) -> int:
    return 2 * game.n**2 * game.m**2


def _certified(game: Game, state: State, basis_cap: int) -> State:
    certificate = certify(game, state, 1, basis_cap=basis_cap)
    if not certificate.passed:
        raise SolverError(
            f"solver output is not an equilibrium: player "
            f"{certificate.worst_player + 1} improves by "
            f"{format_ratio(certificate.beta_achieved)}"
        )
    return state


def solve_singleton(game: Game, basis_cap: int = BASIS_CAP) -> State:
    """Equilibrium of a singleton game by inserting players one at a time.

    Each new player takes her cheapest resource; afterwards players who
    can improve move to their cheapest resource until nobody can.  Each
    insertion settles within n*m moves.
    """
    _require(game, "singleton solver", "is_singleton")
    tables = mixed_tables(game)
    options: List[List[str]] = []
    for player in game.players:
        space = player.space
        if space.matroid is None:
            options.append([next(iter(s)) for s in space.strategies])
        else:
            m = space.matroid
            options.append([e for e in m.ground if m.is_basis({e})])

    choice: Dict[int, str] = {}
    counts: Counter = Counter()

    def cheapest(i: int) -> Tuple[Number, str]:
        here = choice.get(i)
        best: Optional[Tuple[Number, str]] = None
        for r in options[i]:
            cost = tables[i][r][counts[r] + (r != here)]
            if best is None or cost < best[0]:
                best = (cost, r)
        return best  # type: ignore[return-value]

    bound = game.n * game.m
    for i in range(game.n):
        choice[i] = cheapest(i)[1]
        counts[choice[i]] += 1
        moves = 0
        while True:
            unhappy = None
            for j, r in choice.items():
                cost, target = cheapest(j)
                if cost < tables[j][r][counts[r]]:
                    unhappy = (j, target)
                    break
            if unhappy is None:
                break
            moves += 1
            if moves > bound:
                raise SolverError(f"insertion of player {i + 1} did not settle")
            j, target = unhappy
            counts[choice[j]] -= 1
            choice[j] = target
            counts[target] += 1

    state = State(tuple(frozenset({choice[i]}) for i in range(game.n)))
    return _certified(game, state, basis_cap)


def solve_pure_preferences(
    game: Game,
    basis_cap: int = BASIS_CAP,
    budget: int = PROBE_BUDGET,
    bfs_cap: int = BFS_CAP,
    enum_cap: int = ENUM_CAP,
) -> State:
    """Equilibrium of a matroid game whose players have alpha 0 or 1.

    alpha 0 players minimise the sum of their bottleneck costs, which
    on a matroid also minimises the maximum.
    """
    _require(game, "pure-preference solver", "is_matroid", "has_pure_preferences")
    model = PlayerSpecificModel(game, pure_tables(game), basis_cap)
    state = _specific_equilibrium(
        model, first_state(game), _step_cap(game), budget, bfs_cap, enum_cap
    )
    return _certified(game, state, basis_cap)


def solve_monotone_dependence(
    game: Game,
    basis_cap: int = BASIS_CAP,
    budget: int = PROBE_BUDGET,
    bfs_cap: int = BFS_CAP,
    enum_cap: int = ENUM_CAP,
) -> State:
    """Equilibrium of the latency-only game, which is one of the mixed game"""
    _require(game, "monotone solver", "is_matroid", "has_monotone_dependence")
    model = PlayerSpecificModel(game, latency_tables(game), basis_cap)
    state = _specific_equilibrium(
        model, first_state(game), _step_cap(game), budget, bfs_cap, enum_cap
    )
    return _certified(game, state, basis_cap)


def solve(
    game: Game,
    method: int = SolveMethod.auto,
    cap: int = ENUM_CAP,
    dominance_cap: int = DOMINANCE_CAP,
    workers: int = 1,
    basis_cap: int = BASIS_CAP,
    chunk_size: int = 4096,
) -> SolveResult:
    """Pick a solver (auto: first specialised one that applies, else enumeration)"""
    if method == SolveMethod.auto:
        if game.is_singleton:
            method = SolveMethod.singleton
        elif game.is_matroid and game.has_pure_preferences:
            method = SolveMethod.pure_pref
        elif game.is_matroid and game.has_monotone_dependence:
            method = SolveMethod.monotone
        else:
            method = SolveMethod.enumerate
    route = SolveMethod.whatis(method)
    log.info("solving %s by %s", game.name or "game", route)

    if method == SolveMethod.enumerate:
        found = enumerate_pne(
            game,
            cap,
            dominance_cap=dominance_cap,
            workers=workers,
            chunk_size=chunk_size,
            basis_cap=basis_cap,
        )
        if not found:
            return SolveResult(None, route, None)
        state = found[0]
    elif method == SolveMethod.singleton:
        state = solve_singleton(game, basis_cap)
    elif method == SolveMethod.pure_pref:
        state = solve_pure_preferences(game, basis_cap, enum_cap=cap)
    else:
        state = solve_monotone_dependence(game, basis_cap, enum_cap=cap)
    return SolveResult(state, route, certify(game, state, 1, basis_cap=basis_cap))


# Approximation


def potential(game: Game, state: State, kind: int) -> Any:
    """Value of the potential of the given kind.

    Raises:
        NotApplicable: the game lacks what the potential needs.
    """
    if kind == PotentialKind.rank:
        return rank_potential(game, state)
    if kind == PotentialKind.mixed:
        _require(game, "mixed potential", "is_alpha_uniform")
        alpha = game.players[0].alpha

        def term(res, x):
            return alpha * res.latency(x, res.id) + (1 - alpha) * res.bottleneck(
                x, res.id
            )

    elif kind == PotentialKind.square:
        _require(game, "square potential", "has_identical_costs")

        def term(res, x):
            return res.latency(x, res.id) ** 2

    elif kind == PotentialKind.sum:
        _require(game, "sum potential", "has_identical_costs")

        def term(res, x):
            return res.latency(x, res.id)

    else:
        raise NotApplicable("potential", "a potential kind other than matroid")

    counts = congestion(game, state)
    return sum(
        (term(res, x) for res in game.resources for x in range(1, counts[res.id] + 1)),
        Fraction(0),
    )


def approximation_target(game: Game, kind: int) -> Tuple[Fraction, bool]:
    """The guaranteed factor for a route, and whether it is squared"""
    d = Fraction(game.d)
    if kind == PotentialKind.mixed:
        _require(game, "mixed potential", "is_alpha_uniform")
        return d, False
    if kind == PotentialKind.square:
        _require(game, "square potential", "has_identical_costs")
        return d, True
    if kind == PotentialKind.sum:
        _require(game, "sum potential", "has_identical_costs", "is_alpha_uniform")
        alpha = game.players[0].alpha
        return d / (alpha * (d - 1) + 1), False
    if kind == PotentialKind.rank:
        _require(game, "rank potential", "is_matroid", "has_monotone_dependence")
        return Fraction(1), False
    _require(game, "matroid route", "is_matroid")
    return d, False


def _descend(
    game: Game,
    start: State,
    target: Fraction,
    squared: bool,
    max_steps: int,
    basis_cap: int,
) -> Tuple[State, int]:
    """Take target-improving steps until none is left.

    Players are scanned round-robin from the one after the last mover and
    deviations in strategy order; the first qualifying one is taken.
    """
    model = ResponseModel(game, basis_cap)
    options = []
    for i in range(game.n):
        found = model.options(i)
        if found is None:
            raise IntractableBestResponse(i)
        options.append(found)

    def qualifies(cost, alternative) -> bool:
        if squared:
            return cost * cost > target * alternative * alternative
        return cost > target * alternative

    state = start
    steps = 0
    pointer = 0
    while True:
        counts = model.counts(state)
        move = None
        for offset in range(game.n):
            i = (pointer + offset) % game.n
            current = state[i]
            cost = model.cost(i, current, counts)
            for candidate in options[i]:
                if candidate != current and qualifies(
                    cost, model.deviation_cost(i, current, candidate, counts)
                ):
                    move = (i, candidate)
                    break
            if move is not None:
                break
        if move is None:
            return state, steps
        steps += 1
        if steps > max_steps:
            raise SolverError(f"approximate descent exceeded {max_steps} steps")
        state = state.replace(*move)
        pointer = (move[0] + 1) % game.n


def approx_solve(
    game: Game,
    kind: int,
    start: Optional[State] = None,
    max_steps: int = APPROX_MAX_STEPS,
    basis_cap: int = BASIS_CAP,
    budget: int = PROBE_BUDGET,
    bfs_cap: int = BFS_CAP,
    enum_cap: int = ENUM_CAP,
) -> Certificate:
    """Approximate equilibrium with the factor guaranteed for kind.

    mixed, square and sum descend their potential by improvement steps
    that beat the factor; rank runs lazy best responses to an exact
    equilibrium; matroid solves the player-specific game with costs
    alpha*latency + (1-alpha)*bottleneck.

    Raises:
        NotApplicable: naming the flag the route needs.
    """
    target, squared = approximation_target(game, kind)
    if start is None:
        start = first_state(game)
    check_state(game, start)

    steps = 0
    if kind == PotentialKind.matroid:
        model = PlayerSpecificModel(game, mixed_tables(game), basis_cap)
        state = _specific_equilibrium(
            model, start, _step_cap(game), budget, bfs_cap, enum_cap
        )
    elif kind == PotentialKind.rank:
        trace = run_model(
            ResponseModel(game, basis_cap),
            start,
            MoveRule.lazy_best_response,
            max_steps=max_steps,
        )
        if trace.verdict != Verdict.converged:
            raise SolverError(f"lazy dynamics ended with {trace.verdict_text()}")
        state, steps = trace.final, len(trace.steps)  # type: ignore[assignment]
    else:
        state, steps = _descend(game, start, target, squared, max_steps, basis_cap)

    certificate = certify(game, state, target, squared, basis_cap)  # type: ignore
    certificate.steps = steps
    return certificate
