"""
Conditional cost functions over a K-ary code alphabet
"""
import itertools
import json
import logging
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, Iterator, Mapping, Sequence, Tuple, Union

from overflow_core.errors import InvalidInputError

logger = logging.getLogger("overflow_core.costs")

Context = Tuple[int, ...]
Number = Union[int, float, str, Decimal, Fraction]


def to_fraction(value: Number) -> Fraction:
    """
    Convert a numeric literal to an exact rational.

    Floats go through their shortest repr so that 0.1 means one tenth,
    the same value a decimal literal in a config file would carry.
    """
    if isinstance(value, bool):
        raise InvalidInputError(f"boolean is not a numeric value: {value!r}")
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"not a numeric literal: {value!r}") from e


def context_label(context: Sequence[int]) -> str:
    """Render a context as the digit string used in config files."""
    return "".join(str(s) for s in context)


class CostFunction:
    """
    Conditional per-symbol cost table c(u | context) with bounded memory.

    The cost of symbol u_i depends on the most recent min(i - 1, depth)
    symbols. Entries must exist for every context of every length
    0..depth so that strings shorter than the memory are covered.
    """

    def __init__(self, K: int, depth: int, table: Mapping[Context, Sequence[Number]]):
        """
        Initialize and validate the cost table.

        Args:
            K: Code-alphabet size (>= 2)
            depth: Context length d (0 = memoryless)
            table: Mapping context tuple -> K costs, one per code symbol
        """
        if not isinstance(K, int) or K < 2:
            raise InvalidInputError(f"code alphabet size K must be an integer >= 2, got {K!r}")
        if not isinstance(depth, int) or depth < 0:
            raise InvalidInputError(f"context depth must be an integer >= 0, got {depth!r}")

        entries: Dict[Context, Tuple[Fraction, ...]] = {}
        for context, costs in table.items():
            context = tuple(int(s) for s in context)
            if len(context) > depth or any(s < 0 or s >= K for s in context):
                raise InvalidInputError(
                    f"context '{context_label(context)}' is not a string of length <= {depth} over 0..{K - 1}"
                )
            if len(costs) != K:
                raise InvalidInputError(
                    f"context '{context_label(context)}' lists {len(costs)} costs, expected {K}"
                )
            exact = tuple(to_fraction(c) for c in costs)
            if any(c <= 0 for c in exact):
                raise InvalidInputError(
                    f"costs must be strictly positive, context '{context_label(context)}' has {costs}"
                )
            entries[context] = exact

        missing = [ctx for ctx in self._all_contexts(K, depth) if ctx not in entries]
        if missing:
            labels = ", ".join(f"'{context_label(ctx)}'" for ctx in missing[:8])
            raise InvalidInputError(f"cost table is not total, missing contexts: {labels}")

        self._K = K
        self._depth = depth
        self._table = MappingProxyType(entries)
        self._c_max = max(max(costs) for costs in entries.values())

    @staticmethod
    def _all_contexts(K: int, depth: int) -> Iterator[Context]:
        for length in range(depth + 1):
            yield from itertools.product(range(K), repeat=length)

    @classmethod
    def memoryless(cls, costs: Sequence[Number]) -> "CostFunction":
        """Build a depth-0 cost function from one cost per symbol."""
        return cls(K=len(costs), depth=0, table={(): tuple(costs)})

    @classmethod
    def unit(cls, K: int = 2) -> "CostFunction":
        """Equal unit costs: codeword cost equals codeword length."""
        return cls.memoryless([1] * K)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "CostFunction":
        """
        Build from the key-value config layout.

        Args:
            data: {"K": int, "depth": int, "costs": {context string: [costs]}}

        Returns:
            CostFunction: Validated cost function
        """
        try:
            K = int(data["K"])
            depth = int(data.get("depth", 0))
            raw = data["costs"]
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"cost config needs 'K', 'depth' and 'costs': {e}") from e
        if K > 10:
            raise InvalidInputError("context strings use single digits, so K must be <= 10")

        table: Dict[Context, Sequence[Number]] = {}
        for label, costs in raw.items():
            if any(ch not in "0123456789" for ch in label):
                raise InvalidInputError(f"context key '{label}' must be a string of digits")
            table[tuple(int(ch) for ch in label)] = costs
        return cls(K=K, depth=depth, table=table)

    @property
    def K(self) -> int:
        return self._K

    @property
    def depth(self) -> int:
        return self._depth

    @property
    def table(self) -> Mapping[Context, Tuple[Fraction, ...]]:
        return self._table

    @property
    def c_max(self) -> float:
        return float(self._c_max)

    @property
    def c_max_exact(self) -> Fraction:
        return self._c_max

    def contexts(self) -> Iterator[Context]:
        """Iterate every context of length 0..depth in lexicographic order."""
        return self._all_contexts(self._K, self._depth)

    def context_of(self, prefix: Sequence[int]) -> Context:
        """Context seen by the symbol that follows ``prefix``."""
        if self._depth == 0:
            return ()
        return tuple(prefix[-self._depth:])

    def costs_for(self, context: Sequence[int]) -> Tuple[Fraction, ...]:
        return self._table[tuple(context)]

    def cost(self, symbol: int, context: Sequence[int] = ()) -> Fraction:
        """Exact cost of ``symbol`` given the (already truncated) context."""
        if symbol < 0 or symbol >= self._K:
            raise InvalidInputError(f"code symbol {symbol} outside 0..{self._K - 1}")
        return self._table[tuple(context)][symbol]

    def cheapest_symbol(self, context: Sequence[int] = ()) -> int:
        """Lowest-cost symbol in a context; ties go to the lowest index."""
        costs = self._table[tuple(context)]
        return min(range(self._K), key=lambda u: (costs[u], u))

    def string_cost_exact(self, u: Sequence[int]) -> Fraction:
        """
        Exact cost of a code string as a rational.

        Args:
            u: Non-empty code-symbol sequence

        Returns:
            Fraction: Sum of the conditional costs along the string
        """
        if len(u) == 0:
            raise InvalidInputError("cost is defined for non-empty code strings only")
        total = Fraction(0)
        for i, symbol in enumerate(u):
            symbol = int(symbol)
            if symbol < 0 or symbol >= self._K:
                raise InvalidInputError(f"code symbol {symbol} at position {i} outside 0..{self._K - 1}")
            start = max(0, i - self._depth)
            total += self._table[tuple(int(s) for s in u[start:i])][symbol]
        return total

    def string_cost(self, u: Sequence[int]) -> float:
        return float(self.string_cost_exact(u))

    def to_mapping(self) -> Dict[str, Any]:
        """Inverse of from_mapping; costs rendered as decimal strings when exact."""
        return {
            "K": self._K,
            "depth": self._depth,
            "costs": {context_label(ctx): [_render(c) for c in costs] for ctx, costs in self._table.items()},
        }

    def __repr__(self) -> str:
        return f"CostFunction(K={self._K}, depth={self._depth}, c_max={self.c_max:g})"


def _render(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value))


def string_cost(cost_fn: CostFunction, u: Sequence[int]) -> float:
    """Total cost of a code string: sum of conditional costs along it."""
    return cost_fn.string_cost(u)


def load_cost_function(source: Union[str, Path, Mapping[str, Any]]) -> CostFunction:
    """
    Load a cost function from a JSON document or an already parsed mapping.

    Args:
        source: Path to a JSON file, or a mapping with the cost layout

    Returns:
        CostFunction: Validated cost function
    """
    if isinstance(source, Mapping):
        return CostFunction.from_mapping(source)
    path = Path(source)
    try:
        data = json.loads(path.read_text(encoding="utf-8"), parse_float=Decimal)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read cost config {path}: {e}") from e
    if "cost" in data and "costs" not in data:
        data = data["cost"]
    cost_fn = CostFunction.from_mapping(data)
    logger.info(f"Loaded {cost_fn!r} from {path}")
    return cost_fn
