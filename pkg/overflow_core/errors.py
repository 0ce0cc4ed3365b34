"""
Exception hierarchy for the overflow core library
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple


class OverflowCoreError(Exception):
    """Base class for every error raised by overflow_core."""


class InvalidInputError(OverflowCoreError, ValueError):
    """Raised when an argument or a configuration value is out of its domain."""


class CapacityNotUniformError(OverflowCoreError):
    """
    Raised when the per-context cost capacities disagree.

    Attributes:
        roots: Mapping context -> root for every solved context
        offending: Contexts whose root is away from the common value
    """

    def __init__(self, roots: Dict[Tuple[int, ...], float], offending: List[Tuple[int, ...]], tolerance: float):
        self.roots = dict(roots)
        self.offending = list(offending)
        self.tolerance = tolerance
        listing = ", ".join(f"'{_context_label(ctx)}'={roots[ctx]:.12f}" for ctx in offending)
        super().__init__(
            f"cost capacity is not uniform across contexts (tolerance {tolerance:g}): {listing}"
        )


class EnumerationTooLargeError(OverflowCoreError):
    """Raised when |X|^n exceeds the enumeration budget."""

    def __init__(self, size: int, budget: int):
        self.size = size
        self.budget = budget
        super().__init__(
            f"enumeration of {size} strings exceeds the budget of {budget}; "
            f"use the Monte Carlo path (method='mc') instead"
        )


class UnencodableInputError(OverflowCoreError):
    """Raised when a string with zero probability is passed to an encoder."""


class DecodeFailureError(OverflowCoreError):
    """Raised when a symbol sequence is not a codeword of the encoder."""


class CostBoundViolationError(OverflowCoreError):
    """
    Raised when a codeword breaks the pointwise cost guarantee.

    Attributes:
        worst_x: String with the largest slack
        max_slack: Largest observed c(phi(x)) + log_K P(x) / alpha_c
        bound: Guaranteed slack log_K 2 / alpha_c + c_max
    """

    def __init__(self, worst_x: Sequence[int], max_slack: float, bound: float):
        self.worst_x = tuple(worst_x)
        self.max_slack = max_slack
        self.bound = bound
        super().__init__(
            f"codeword cost bound violated at x={_context_label(self.worst_x)}: "
            f"slack {max_slack:.12f} > bound {bound:.12f}"
        )


class BracketNotFoundError(OverflowCoreError):
    """Raised when a spectrum curve does not cross epsilon inside the grid."""


class DegenerateSourceError(OverflowCoreError):
    """Raised when a closed form needs a positive self-information variance."""


class BoundViolationError(OverflowCoreError):
    """Raised when a verified inequality fails; always an implementation bug."""

    def __init__(self, message: str, rows: Optional[List[Any]] = None):
        self.rows = list(rows or [])
        super().__init__(message)


def _context_label(symbols: Sequence[int]) -> str:
    return "".join(str(s) for s in symbols)
