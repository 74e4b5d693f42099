"""A library containing the document types and tags used in Mixcon"""

from typing import Dict, List, TypedDict, Union
from Mixcon.enumeration import Enumeration


class CostDocument(TypedDict, total=False):
    """Cost function as written in a game document"""

    kind: str  # "linear" or "table"
    a: str
    b: str
    values: List[str]


class ResourceDocument(TypedDict):
    """Resource Dictionary Type"""

    latency: CostDocument
    bottleneck: CostDocument


class MatroidDocument(TypedDict, total=False):
    """Matroid strategy space Dictionary Type"""

    kind: str
    ground: List[str]
    rank: int  # uniform
    blocks: List[List[str]]  # partition
    ranks: List[int]  # partition
    edges: List[List[Union[str, int]]]  # graphic: [resource id, u, v]
    bases: List[List[str]]  # explicit_bases


class PlayerDocument(TypedDict, total=False):
    """Player Dictionary Type"""

    alpha: Union[str, int]
    strategies: List[List[str]]
    matroid: MatroidDocument


class GameDocument(TypedDict, total=False):
    """Game Dictionary Type"""

    name: str
    singleton: bool
    resources: Dict[str, ResourceDocument]
    players: List[PlayerDocument]


CostKind = Enumeration("cost kind", ["linear", "table"])

MatroidKind = Enumeration(
    "matroid kind", ["uniform", "partition", "graphic", "explicit_bases"]
)

MoveRule = Enumeration(
    "move rule", ["better_response", "best_response", "lazy_best_response"]
)

SchedulerKind = Enumeration("scheduler", ["round_robin", "random", "max_gain"])

Verdict = Enumeration("verdict", ["converged", "cycle", "step_cap"])

# "matroid" is the player-specific route, the other four are potentials.
PotentialKind = Enumeration("potential", ["mixed", "square", "sum", "rank", "matroid"])

SolveMethod = Enumeration(
    "method", ["auto", "enumerate", "singleton", "pure_pref", "monotone"]
)

ExitCode = Enumeration(
    "exit code",
    [
        ("ok", 0),
        ("fail", 1),
        ("no_equilibrium", 2),
        ("inconclusive", 3),
        ("cycle", 4),
        ("step_cap", 5),
    ],
)
