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

"""Best responses, improvement dynamics and the rank potential"""

import logging
from collections import deque
from dataclasses import dataclass, field
from random import Random
from typing import Dict, List, NamedTuple, Optional, Tuple

from Mixcon import matroid
from Mixcon.constants import BASIS_CAP, BFS_CAP, MAX_STEPS, PROBE_BUDGET
from Mixcon.exceptions import IntractableBestResponse, NotApplicable
from Mixcon.game import (
    CostEvaluator,
    Game,
    Number,
    State,
    Strategy,
    check_state,
    congestion,
)
from Mixcon.typing import MoveRule, SchedulerKind, Verdict
from Mixcon.util import format_fraction, ratio

log = logging.getLogger(__name__)


class ResponseModel:
    """Costs and best responses of the players of one game.

    This base class evaluates the game's own mixed costs.  Search loops
    (dynamics, BFS, solvers) only talk to a model, so the same loops run
    on derived player-specific games.
    """

    def __init__(self, game: Game, basis_cap: int = BASIS_CAP):
        self.game = game
        self.basis_cap = basis_cap
        self.evaluator = CostEvaluator(game)
        self._options: Dict[int, Optional[Tuple[Strategy, ...]]] = {}

    def counts(self, state: State):
        """Congestion of the used resources"""
        return self.evaluator.counts(state)

    def cost(self, i: int, strategy: Strategy, counts) -> Number:
        """Cost of player i on strategy; counts include her"""
        return self.evaluator.cost(i, strategy, counts)

    def deviation_cost(self, i: int, current: Strategy, candidate: Strategy, counts):
        """Cost of player i after switching from current to candidate"""
        if candidate == current:
            return self.cost(i, candidate, counts)
        shifted = {r: counts[r] + (r not in current) for r in candidate}
        return self.cost(i, candidate, shifted)

    def options(self, i: int) -> Optional[Tuple[Strategy, ...]]:
        """Expanded strategies of player i, None above the basis cap"""
        if i not in self._options:
            space = self.game.players[i].space
            if space.can_expand(self.basis_cap):
                self._options[i] = space.expand(self.basis_cap)
            else:
                self._options[i] = None
        return self._options[i]

    def greedy_weights(self, i: int, current: Strategy, counts) -> Dict[str, Number]:
        """Resource weights whose minimum-sum basis is a best response.

        Raises:
            IntractableBestResponse: no such weights exist for player i.
        """
        game = self.game
        alpha = game.players[i].alpha
        if alpha == 0:
            # a minimum-sum basis also minimises the maximum
            return self.evaluator.weights(i, current, counts, "bottleneck")
        if alpha == 1 or game.has_monotone_dependence:
            return self.evaluator.weights(i, current, counts, "latency")
        raise IntractableBestResponse(i)

    def best_responses(
        self, state: State, i: int, counts=None
    ) -> Tuple[Number, List[Strategy]]:
        """Least cost of player i and every strategy achieving it.

        Above the basis cap the list holds the single greedy basis,
        chosen to share as many resources with the current one as
        possible.
        """
        if counts is None:
            counts = self.counts(state)
        current = state[i]
        options = self.options(i)
        if options is None:
            m = self.game.players[i].space.matroid
            weights = self.greedy_weights(i, current, counts)
            basis = matroid.greedy_min_basis(m, weights, prefer=current)  # type: ignore
            best_cost = self.deviation_cost(i, current, basis, counts)
            basis = self._keep_current(i, current, basis, best_cost, counts)
            return best_cost, [basis]

        best_cost = None
        best: List[Strategy] = []
        for candidate in options:
            cost = self.deviation_cost(i, current, candidate, counts)
            if best_cost is None or cost < best_cost:
                best_cost, best = cost, [candidate]
            elif cost == best_cost:
                best.append(candidate)
        return best_cost, best  # type: ignore[return-value]

    def _keep_current(
        self, i: int, current: Strategy, basis: Strategy, best_cost: Number, counts
    ) -> Strategy:
        """Swap resources of basis for current ones while the cost stays best.

        Overlap is linear on the bases of the best-response matroid, so
        the basis no single exchange improves shares the most resources
        with current.
        """
        m = self.game.players[i].space.matroid
        swapped = True
        while swapped:
            swapped = False
            for x, y in matroid.single_exchanges(m, basis):  # type: ignore[arg-type]
                if x in current or y not in current:
                    continue
                candidate = (basis - {x}) | {y}
                if self.deviation_cost(i, current, candidate, counts) == best_cost:
                    basis, swapped = candidate, True
                    break
        return basis

    def lazy_best_response(self, state: State, i: int, counts=None) -> Strategy:
        """Best response sharing the most resources with the current strategy"""
        _, best = self.best_responses(state, i, counts)
        current = state[i]
        if current in best:
            return current
        return max(best, key=lambda s: len(s & current))

    def move(self, rule: int, state: State, i: int, counts) -> Optional["Move"]:
        """Player i's move under rule, or None when she cannot improve"""
        current = state[i]
        before = self.cost(i, current, counts)
        options = self.options(i)
        if rule == MoveRule.better_response and options is not None:
            for candidate in options:
                if candidate == current:
                    continue
                after = self.deviation_cost(i, current, candidate, counts)
                if after < before:
                    return Move(i, current, candidate, before, after)
            return None

        best_cost, best = self.best_responses(state, i, counts)
        if best_cost >= before:
            return None
        if rule == MoveRule.best_response:
            return Move(i, current, best[0], before, best_cost)
        choice = max(best, key=lambda s: len(s & current))
        return Move(i, current, choice, before, best_cost)

    def is_improving(self, state: State, i: int, counts=None) -> bool:
        """Player i has a strictly cheaper strategy"""
        if counts is None:
            counts = self.counts(state)
        best_cost, _ = self.best_responses(state, i, counts)
        return best_cost < self.cost(i, state[i], counts)

    def is_equilibrium(self, state: State) -> bool:
        """No player can improve"""
        counts = self.counts(state)
        return not any(
            self.is_improving(state, i, counts) for i in range(self.game.n)
        )

    def default_rule(self) -> int:
        """Lazy best responses when a player has alpha 0, else best responses"""
        if any(p.alpha == 0 for p in self.game.players):
            return MoveRule.lazy_best_response
        return MoveRule.best_response


class Move(NamedTuple):
    """A player's switch with her costs before and after"""

    mover: int
    before: Strategy
    after: Strategy
    cost_before: Number
    cost_after: Number


class Step(NamedTuple):
    """One recorded improvement step; state is the state before it"""

    state: State
    mover: int
    before: Strategy
    after: Strategy
    cost_before: Number
    cost_after: Number


@dataclass(frozen=True)
class Scheduler:
    """Which improving player moves next"""

    kind: int = SchedulerKind.round_robin
    seed: int = 0

    @classmethod
    def round_robin(cls) -> "Scheduler":
        """Players in index order, continuing after the last mover"""
        return cls(SchedulerKind.round_robin)

    @classmethod
    def random(cls, seed: int) -> "Scheduler":
        """A uniformly random improving player, reproducible from seed"""
        return cls(SchedulerKind.random, seed)

    @classmethod
    def max_gain(cls) -> "Scheduler":
        """The player with the largest cost ratio before/after"""
        return cls(SchedulerKind.max_gain)


@dataclass
class DynamicsTrace:
    """Recorded improvement steps and how the run ended"""

    start: State
    steps: List[Step] = field(default_factory=list)
    verdict: int = Verdict.converged
    final: Optional[State] = None
    cycle_start: Optional[int] = None

    def states(self) -> List[State]:
        """Visited states, start first"""
        visited = [self.start]
        for step in self.steps:
            visited.append(step.state.replace(step.mover, step.after))
        return visited

    @property
    def cycle_length(self) -> Optional[int]:
        """Number of steps on the detected cycle"""
        if self.cycle_start is None:
            return None
        return len(self.steps) - self.cycle_start

    def verdict_text(self) -> str:
        """converged, cycle@k or step_cap"""
        if self.verdict == Verdict.cycle:
            return f"cycle@{self.cycle_start}"
        return Verdict.whatis(self.verdict)

    def lines(self, game: Game) -> List[str]:
        """Export format, one step per line, then the verdict"""
        out = []
        for k, step in enumerate(self.steps, start=1):
            space = game.players[step.mover].space
            out.append(
                f"step={k} player={step.mover + 1} "
                f"from={space.token(step.before)} to={space.token(step.after)} "
                f"cost_before={format_fraction(step.cost_before)} "
                f"cost_after={format_fraction(step.cost_after)}"
            )
        out.append("verdict=" + self.verdict_text())
        return out


def _pick_move(
    model: ResponseModel,
    state: State,
    rule: int,
    scheduler: Scheduler,
    pointer: int,
    rng: Random,
) -> Optional[Move]:
    n = model.game.n
    counts = model.counts(state)
    if scheduler.kind == SchedulerKind.round_robin:
        for offset in range(n):
            found = model.move(rule, state, (pointer + offset) % n, counts)
            if found is not None:
                return found
        return None

    moves = [model.move(rule, state, i, counts) for i in range(n)]
    candidates = [mv for mv in moves if mv is not None]
    if not candidates:
        return None
    if scheduler.kind == SchedulerKind.random:
        return candidates[rng.randrange(len(candidates))]
    return max(candidates, key=lambda mv: ratio(mv.cost_before, mv.cost_after))


def run_model(
    model: ResponseModel,
    start: State,
    rule: Optional[int] = None,
    scheduler: Scheduler = Scheduler(),
    max_steps: int = MAX_STEPS,
) -> DynamicsTrace:
    """run_dynamics on any response model"""
    if rule is None:
        rule = model.default_rule()
    rng = Random(scheduler.seed)
    trace = DynamicsTrace(start)
    seen = {start: 0}
    state = start
    pointer = 0
    while True:
        if len(trace.steps) >= max_steps:
            trace.verdict = Verdict.step_cap
            break
        move = _pick_move(model, state, rule, scheduler, pointer, rng)
        if move is None:
            trace.verdict = Verdict.converged
            break
        trace.steps.append(Step(state, *move))
        state = state.replace(move.mover, move.after)
        pointer = (move.mover + 1) % model.game.n
        log.debug(
            "step %d: player %d %s -> %s",
            len(trace.steps),
            move.mover + 1,
            move.cost_before,
            move.cost_after,
        )
        if state in seen:
            trace.verdict = Verdict.cycle
            trace.cycle_start = seen[state]
            break
        seen[state] = len(trace.steps)
    trace.final = state
    return trace


def run_dynamics(
    game: Game,
    start: State,
    rule: Optional[int] = None,
    sched: Scheduler = Scheduler(),
    max_steps: int = MAX_STEPS,
    basis_cap: int = BASIS_CAP,
) -> DynamicsTrace:
    """Improvement dynamics from start until equilibrium, revisit or step cap.

    Args:
        rule: a MoveRule; by default lazy best responses when any player
            has alpha 0 and best responses otherwise.
        sched: picks the moving player among the improving ones.

    Returns:
        The trace; a cycle verdict records the index of the revisited state.
    """
    check_state(game, start)
    model = ResponseModel(game, basis_cap)
    if rule == MoveRule.best_response and any(p.alpha == 0 for p in game.players):
        log.warning(
            "best responses of alpha 0 players need not descend the potential; "
            "lazy best responses are the safe rule"
        )
    return run_model(model, start, rule, sched, max_steps)


def replay(game: Game, trace: DynamicsTrace) -> bool:
    """Re-apply the recorded moves and check costs and the verdict"""
    evaluator = CostEvaluator(game)
    state = trace.start
    for step in trace.steps:
        if step.state != state or state[step.mover] != step.before:
            return False
        before = evaluator.costs(state)[step.mover]
        state = state.replace(step.mover, step.after)
        after = evaluator.costs(state)[step.mover]
        if (before, after) != (step.cost_before, step.cost_after) or after >= before:
            return False
    if state != trace.final:
        return False
    if trace.verdict == Verdict.cycle:
        return trace.states()[trace.cycle_start] == state  # type: ignore[index]
    return True


def best_responses(
    game: Game, state: State, i: int, basis_cap: int = BASIS_CAP
) -> List[Strategy]:
    """All cost-minimising strategies of player i against the others"""
    check_state(game, state)
    return ResponseModel(game, basis_cap).best_responses(state, i)[1]


def lazy_best_response(
    game: Game, state: State, i: int, basis_cap: int = BASIS_CAP
) -> Strategy:
    """A best response with the largest overlap with the current strategy"""
    check_state(game, state)
    return ResponseModel(game, basis_cap).lazy_best_response(state, i)


def is_improving(game: Game, state: State, i: int, basis_cap: int = BASIS_CAP) -> bool:
    """Player i can strictly lower her cost"""
    check_state(game, state)
    return ResponseModel(game, basis_cap).is_improving(state, i)


def improving_players(game: Game, state: State, basis_cap: int = BASIS_CAP) -> List[int]:
    """Indices of the players who can strictly lower their cost"""
    check_state(game, state)
    model = ResponseModel(game, basis_cap)
    counts = model.counts(state)
    return [i for i in range(game.n) if model.is_improving(state, i, counts)]


class ProbeResult(NamedTuple):
    """Outcome of weakly_acyclic_probe.

    path: states from the start to an equilibrium, or None.
    exhaustive: breadth-first search was used, so a missing path proves
        that no best-response path from the start exists.
    explored: states visited (BFS) or runs made (restarts).
    """

    path: Optional[List[State]]
    exhaustive: bool
    explored: int


def best_response_bfs(model: ResponseModel, start: State) -> ProbeResult:
    """Shortest best-response path from start to an equilibrium"""
    parent: Dict[State, Optional[State]] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        counts = model.counts(state)
        successors = []
        for i in range(model.game.n):
            best_cost, best = model.best_responses(state, i, counts)
            if best_cost < model.cost(i, state[i], counts):
                successors.extend(state.replace(i, s) for s in best)
        if not successors:
            path = [state]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])  # type: ignore[arg-type]
            return ProbeResult(path[::-1], True, len(parent))
        for nxt in successors:
            if nxt not in parent:
                parent[nxt] = state
                queue.append(nxt)
    return ProbeResult(None, True, len(parent))


def probe_model(
    model: ResponseModel,
    start: State,
    budget: int = PROBE_BUDGET,
    cap: int = BFS_CAP,
    max_steps: int = MAX_STEPS,
) -> ProbeResult:
    """weakly_acyclic_probe on any response model"""
    game = model.game
    if all(model.options(i) is not None for i in range(game.n)):
        total = 1
        for i in range(game.n):
            total *= len(model.options(i))  # type: ignore[arg-type]
        if total <= cap:
            return best_response_bfs(model, start)
    for seed in range(budget):
        trace = run_model(model, start, None, Scheduler.random(seed), max_steps)
        if trace.verdict == Verdict.converged:
            return ProbeResult(trace.states(), False, seed + 1)
    return ProbeResult(None, False, budget)


def weakly_acyclic_probe(
    game: Game,
    start: State,
    budget: int = PROBE_BUDGET,
    cap: int = BFS_CAP,
    max_steps: int = MAX_STEPS,
    basis_cap: int = BASIS_CAP,
) -> ProbeResult:
    """Look for some best-response path from start to a pure equilibrium.

    Up to cap states the best-response graph is searched breadth first,
    which finds a shortest path or proves that none exists from start.
    Larger games get up to budget randomized runs; failing those proves
    nothing.
    """
    check_state(game, start)
    return probe_model(ResponseModel(game, basis_cap), start, budget, cap, max_steps)


def latency_ranks(game: Game) -> Dict:
    """Dense 1-based rank of every latency value at congestion 1..n"""
    values = sorted({v for r in game.resources for v in r.latency.upto(game.n)})
    return {v: pos for pos, v in enumerate(values, start=1)}


def rank_potential(game: Game, state: State) -> int:
    """Rosenthal-style potential over dense latency ranks.

    Raises:
        NotApplicable: the game is not a matroid game with monotone
            dependence.
    """
    if not game.is_matroid:
        raise NotApplicable("rank potential", "is_matroid")
    if not game.has_monotone_dependence:
        raise NotApplicable("rank potential", "has_monotone_dependence")
    ranks = latency_ranks(game)
    counts = congestion(game, state)
    total = 0
    for res in game.resources:
        values = res.latency.upto(counts[res.id])
        total += sum(ranks[v] for v in values)
    return total
