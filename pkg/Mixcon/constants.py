"""Constants used by multiple files """
from typing import Any, Dict


# Enumeration limits.  Every search that expands strategy spaces checks
# one of these before it starts.
ENUM_CAP = 10**7
BASIS_CAP = 16
EXCHANGE_CAP = 10
BFS_CAP = 10**6
DOMINANCE_CAP = 20000

# Explicit strategy lists with more entries than this are never tested
# for the basis exchange property when deriving the matroid flag.
EXCHANGE_SCAN_LIMIT = 512

PROBE_BUDGET = 64
MAX_STEPS = 10000
APPROX_MAX_STEPS = 10**6

CONFIG_DEFAULTS: Dict[str, Any] = {
    "enum_cap": ENUM_CAP,
    "basis_cap": BASIS_CAP,
    "exchange_cap": EXCHANGE_CAP,
    "bfs_cap": BFS_CAP,
    "dominance_cap": DOMINANCE_CAP,
    "probe_budget": PROBE_BUDGET,
    "max_steps": MAX_STEPS,
    "approx_max_steps": APPROX_MAX_STEPS,
    "workers": 1,
    "chunk_size": 4096,
    "seed": 0,
    "debug": None,
    "logging": None,
}

# Separator between resource ids of a matroid strategy in state strings.
STRATEGY_SEP = "+"

INFINITY_TEXT = "inf"
