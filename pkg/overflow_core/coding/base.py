"""
Abstract variable-length block encoder and the codeword type
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from overflow_core.costs import CostFunction
from overflow_core.errors import DecodeFailureError, InvalidInputError
from overflow_core.sources import SourceModel

logger = logging.getLogger("overflow_core.coding")

SourceString = Tuple[int, ...]


def format_symbols(symbols: Sequence[int], alphabet_size: int) -> str:
    """Digits for alphabets up to 10 symbols, dot-separated indices above."""
    if alphabet_size <= 10:
        return "".join(str(s) for s in symbols)
    return ".".join(str(s) for s in symbols)


@dataclass(frozen=True)
class Codeword:
    """
    Code string over 0..K-1 with its cached total cost.

    Attributes:
        symbols: Code symbols
        cost_exact: string_cost(cost_fn, symbols) as a rational
    """
    symbols: Tuple[int, ...]
    cost_exact: Fraction = field(repr=False)

    @classmethod
    def from_symbols(cls, cost_fn: CostFunction, symbols: Sequence[int]) -> "Codeword":
        symbols = tuple(int(s) for s in symbols)
        return cls(symbols=symbols, cost_exact=cost_fn.string_cost_exact(symbols))

    @property
    def cost(self) -> float:
        return float(self.cost_exact)

    def __len__(self) -> int:
        return len(self.symbols)


class VariableLengthEncoder(ABC):
    """
    Abstract base class for prefix-free block codes phi: X^n -> U*.

    Subclasses provide encode/decode. Encoders with a materialized
    codebook also expose it, which the audits and the exact overflow
    computations iterate over.
    """

    def __init__(self, source: SourceModel, n: int, cost_fn: CostFunction, alpha_c: float):
        if n < 1:
            raise InvalidInputError(f"block length must be >= 1, got {n}")
        if not alpha_c > 0:
            raise InvalidInputError(f"cost capacity must be positive, got {alpha_c}")
        self._source = source
        self._n = n
        self._cost_fn = cost_fn
        self._alpha_c = float(alpha_c)
        self._decode_table: Dict[Tuple[int, ...], SourceString] = {}
        self._max_length = 0

    @property
    def source(self) -> SourceModel:
        return self._source

    @property
    def n(self) -> int:
        return self._n

    @property
    def cost_fn(self) -> CostFunction:
        return self._cost_fn

    @property
    def alpha_c(self) -> float:
        return self._alpha_c

    @property
    def K(self) -> int:
        return self._cost_fn.K

    @property
    @abstractmethod
    def materialized(self) -> bool:
        """True when every codeword is held in memory."""

    @abstractmethod
    def encode(self, x: Sequence[int]) -> Codeword:
        """Codeword of a length-n source string with positive probability."""

    @abstractmethod
    def decode(self, w) -> SourceString:
        """Source string whose codeword is ``w`` (Codeword or symbol sequence)."""

    @abstractmethod
    def codebook(self) -> Dict[SourceString, Codeword]:
        """Materialized map x -> codeword over strings with P(x) > 0."""

    def check_block(self, x: Sequence[int]) -> SourceString:
        x = self._source.validate_string(x)
        if len(x) != self._n:
            raise InvalidInputError(f"expected a block of length {self._n}, got {len(x)}")
        return x

    def require_materialized(self, what: str):
        if not self.materialized:
            raise InvalidInputError(f"{what} needs a materialized codebook (block length {self._n} is streaming)")

    def items(self) -> Iterator[Tuple[SourceString, Fraction, Codeword]]:
        """
        Iterate (x, exact P(x), codeword) over the codebook in lexicographic order.
        """
        self.require_materialized("iterating codewords")
        book = self.codebook()
        for x in sorted(book):
            yield x, self._source.probability_exact(x), book[x]

    def max_codeword_length(self) -> int:
        self.require_materialized("the longest codeword")
        return self._max_length

    def _index(self, book: Dict[SourceString, Codeword]):
        """Build the inverse table once the codebook is final."""
        self._decode_table = {w.symbols: x for x, w in book.items()}
        self._max_length = max((len(w) for w in book.values()), default=0)

    # -- concatenated streams --

    def encode_stream(self, blocks: Iterable[Sequence[int]]) -> List[int]:
        """Concatenate the codewords of consecutive blocks."""
        out: List[int] = []
        for x in blocks:
            out.extend(self.encode(x).symbols)
        return out

    def decode_stream(self, symbols: Sequence[int], count: Optional[int] = None) -> List[SourceString]:
        """
        Split a concatenation of codewords back into blocks.

        Args:
            symbols: Code-symbol stream
            count: Number of blocks to read (everything when None)

        Raises:
            DecodeFailureError: If the stream is not a concatenation of codewords
        """
        blocks, consumed = self.decode_prefix(symbols, count)
        if count is None and consumed != len(symbols):
            raise DecodeFailureError(f"{len(symbols) - consumed} trailing code symbols")
        return blocks

    def decode_prefix(self, symbols: Sequence[int], count: Optional[int] = None) -> Tuple[List[SourceString], int]:
        """
        Decode up to ``count`` blocks from the front of a stream.

        Returns:
            Tuple[List[SourceString], int]: (blocks, code symbols consumed)
        """
        symbols = tuple(int(s) for s in symbols)
        blocks: List[SourceString] = []
        pos = 0
        while pos < len(symbols) and (count is None or len(blocks) < count):
            x, used = self.parse_one(symbols, pos)
            blocks.append(x)
            pos += used
        if count is not None and len(blocks) < count:
            raise DecodeFailureError(f"stream ended after {len(blocks)} of {count} blocks")
        return blocks, pos

    def parse_one(self, symbols: Tuple[int, ...], start: int) -> Tuple[SourceString, int]:
        """
        Read the codeword starting at ``start``.

        Returns:
            Tuple[SourceString, int]: (decoded block, code symbols consumed)
        """
        self.require_materialized("prefix parsing")
        inverse = self._decode_table
        limit = min(len(symbols), start + self.max_codeword_length())
        for stop in range(start + 1, limit + 1):
            x = inverse.get(symbols[start:stop])
            if x is not None:
                return x, stop - start
        raise DecodeFailureError(f"no codeword starts at stream position {start}")

