"""Specific Exceptions used in Mixcon."""


class MixconError(Exception):
    """Base class of every error raised by Mixcon"""


class EnumException(MixconError):
    """C-like Enumeration Exception"""


class DocumentError(MixconError):
    """Thrown when there's a problem parsing or serializing a game document"""


class InvalidGame(MixconError):
    """A loaded game breaks its invariants"""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__()

    def __str__(self):
        return f"invalid game: {len(self.violations)} rule violation(s)"


class InvalidState(MixconError):
    """A state does not fit the game it is evaluated in."""

    def __init__(self, player: int, reason: str):
        self.player = player
        self.reason = reason
        super().__init__()

    def __str__(self):
        return f"invalid state for player {self.player + 1}: {self.reason}"


class CostTableOverflow(MixconError):
    """Congestion beyond the last entry of a tabulated cost function"""

    def __init__(self, resource: str, congestion: int, length: int):
        self.resource = resource
        self.congestion = congestion
        self.length = length
        super().__init__()

    def __str__(self):
        return (
            f"congestion {self.congestion} on {self.resource} exceeds "
            f"table length {self.length}"
        )


class GroundSetError(MixconError, ValueError):
    """Element outside a matroid's ground set"""


class CapExceeded(MixconError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__()

    def __str__(self):
        return f"{self.what}: {self.size} exceeds cap {self.cap}"


class IntractableBestResponse(MixconError):
    """No exact best-response route exists for a player"""

    def __init__(self, player: int):
        self.player = player
        super().__init__()

    def __str__(self):
        return (
            f"intractable best response for player {self.player + 1}: "
            "matroid too large to enumerate and no greedy route applies"
        )


class NotApplicable(MixconError):
    """A solver or potential was used on a game lacking a required flag"""

    def __init__(self, what: str, flag: str):
        self.what = what
        self.flag = flag
        super().__init__()

    def __str__(self):
        return f"{self.what} requires {self.flag}"


class SolverError(MixconError):
    """An internal bound that existence guarantees keep was exceeded"""


class ReductionError(MixconError, ValueError):
    """Graph does not satisfy the reduction's assumptions"""
