"""
Cost-aware interval code: Shannon-Fano-Elias intervals matched against a cost-weighted channel
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from overflow_core.coding.base import Codeword, SourceString, VariableLengthEncoder
from overflow_core.costs import CostCapacity, CostFunction
from overflow_core.costs.capacity import precise_kraft_excess
from overflow_core.costs.cost_function import Context
from overflow_core.errors import DecodeFailureError, InvalidInputError, UnencodableInputError
from overflow_core.precision import get_context, power_exact, to_mpf, upper_dyadic
from overflow_core.sources import DEFAULT_ENUMERATION_BUDGET, SourceModel, check_budget

logger = logging.getLogger("overflow_core.coding")

# comparisons closer than this fraction of the channel width are counted as near ties
NEAR_TIE = Fraction(1, 10 ** 20)
# largest Kraft excess at alpha_c accepted as solver noise
CAPACITY_FIT_TOL = 1e-9

ENCODER_MODES = ("auto", "materialized", "streaming")


def channel_distribution(cost_fn: CostFunction, alpha_c: float) -> Dict[Context, Tuple[Fraction, ...]]:
    """
    Channel probabilities q(u | ctx) = K^(-alpha_c c(u | ctx)) as exact rationals.

    Entries are exact when alpha_c * c is an integer. Otherwise they are
    rounded up to a fine dyadic rational, and the last symbol of each
    context takes the remaining mass so every row sums to exactly 1.

    Args:
        cost_fn: Cost function
        alpha_c: Cost capacity solved for cost_fn

    Returns:
        Dict[Context, Tuple[Fraction, ...]]: One row per context of length 0..depth
    """
    ctx = get_context()
    alpha = to_mpf(ctx, alpha_c)
    K = cost_fn.K
    table: Dict[Context, Tuple[Fraction, ...]] = {}
    for context in cost_fn.contexts():
        row: List[Fraction] = []
        for cost in cost_fn.costs_for(context)[:-1]:
            exact = power_exact(K, alpha_c, cost)
            row.append(exact if exact is not None else upper_dyadic(ctx, ctx.power(K, -alpha * to_mpf(ctx, cost))))
        last = 1 - sum(row, Fraction(0))
        if last <= 0:
            raise InvalidInputError(
                f"channel row for context {context} leaves no mass for the last symbol; "
                f"alpha_c={alpha_c} does not fit this cost function"
            )
        table[context] = tuple(row + [last])
    return table


class IntervalEncoder(VariableLengthEncoder):
    """
    Prefix-free block code whose codeword costs track self-information.

    Source strings are ordered lexicographically and x owns the interval
    [F(x), F(x) + P(x)). Code strings own nested channel intervals whose
    widths are products of q(u | ctx) = K^(-alpha_c c(u | ctx)). Encoding
    follows the child interval holding the midpoint F(x) + P(x)/2 (left
    child on a boundary) and stops as soon as the channel interval fits
    inside the source interval. Each step shrinks the width by at least
    K^(-alpha_c c_max), so

        c(phi(x)) <= -log_K P(x) / alpha_c + log_K 2 / alpha_c + c_max.

    All interval arithmetic is exact (fractions.Fraction).
    """

    def __init__(self, source: SourceModel, n: int, cost_fn: CostFunction, capacity: CostCapacity,
                 materialize: bool = True, budget: int = DEFAULT_ENUMERATION_BUDGET):
        """
        Initialize the encoder and, in materialized mode, build the codebook.

        Args:
            source: Source model
            n: Block length
            cost_fn: Cost function of the code alphabet
            capacity: Solved cost capacity of cost_fn
            materialize: Build and keep every codeword
            budget: Largest |X|^n that may be materialized
        """
        super().__init__(source, n, cost_fn, capacity.alpha_c)
        for context in cost_fn.contexts():
            excess = precise_kraft_excess(cost_fn.K, capacity.alpha_c, cost_fn.costs_for(context))
            if excess > CAPACITY_FIT_TOL:
                raise InvalidInputError(
                    f"alpha_c={capacity.alpha_c} is below the capacity of {cost_fn!r} (Kraft excess {excess:g})"
                )
        self._q = channel_distribution(cost_fn, capacity.alpha_c)
        self._cheapest = cost_fn.cheapest_symbol(())
        self._near_ties = 0
        self._book: Optional[Dict[SourceString, Codeword]] = None
        if materialize:
            check_budget(source.alphabet_size, n, budget)
            self._book = self._build_codebook()
            self._index(self._book)

    @property
    def materialized(self) -> bool:
        return self._book is not None

    @property
    def near_ties(self) -> int:
        """Interval comparisons that were within 1e-20 of the channel width during construction."""
        return self._near_ties

    @property
    def channel(self) -> Dict[Context, Tuple[Fraction, ...]]:
        return dict(self._q)

    def codebook(self) -> Dict[SourceString, Codeword]:
        self.require_materialized("the codebook")
        return dict(self._book)

    def _build_codebook(self) -> Dict[SourceString, Codeword]:
        book: Dict[SourceString, Codeword] = {}
        lower = Fraction(0)
        for x, mass in self._source.enumerate(self._n, budget=self._source.alphabet_size ** self._n, exact=True):
            if mass > 0:
                symbols, ties = self._encode_interval(lower, mass)
                self._near_ties += ties
                book[x] = Codeword.from_symbols(self._cost_fn, symbols)
            lower += mass
        if self._near_ties:
            logger.warning(f"{self._near_ties} near-tie interval comparisons while building n={self._n}")
        logger.info(f"Built interval codebook: n={self._n}, {len(book)} codewords, "
                    f"longest {max((len(w) for w in book.values()), default=0)} symbols")
        return book

    def _encode_interval(self, lower: Fraction, mass: Fraction) -> Tuple[Tuple[int, ...], int]:
        """Code symbols for the source interval [lower, lower + mass) and the near-tie count."""
        if mass == 1:
            return (self._cheapest,), 0
        mid = lower + mass / 2
        upper = lower + mass
        last = self._cost_fn.K - 1
        lo, width = Fraction(0), Fraction(1)
        symbols: List[int] = []
        ties = 0
        while True:
            row = self._q[self._cost_fn.context_of(symbols)]
            acc = lo
            for u, q in enumerate(row):
                nxt = acc + width * q
                gap = nxt - mid
                if gap != 0 and abs(gap) < NEAR_TIE * width:
                    ties += 1
                if mid <= nxt or u == last:
                    break
                acc = nxt
            lo, width = acc, width * q
            symbols.append(u)
            if lo >= lower and lo + width <= upper:
                return tuple(symbols), ties

    def encode(self, x: Sequence[int]) -> Codeword:
        """
        Codeword of x.

        Raises:
            UnencodableInputError: If P(x) = 0
        """
        x = self.check_block(x)
        if self._book is not None:
            w = self._book.get(x)
            if w is None:
                raise UnencodableInputError(f"string {x} has probability 0 and no codeword")
            return w
        lower, mass = self._source.cumulative_interval(x)
        if mass == 0:
            raise UnencodableInputError(f"string {x} has probability 0 and no codeword")
        symbols, ties = self._encode_interval(lower, mass)
        if ties:
            logger.debug(f"{ties} near-tie comparisons while encoding {x}")
        return Codeword.from_symbols(self._cost_fn, symbols)

    def decode(self, w: Union[Codeword, Sequence[int]]) -> SourceString:
        """
        Inverse of encode.

        Raises:
            DecodeFailureError: If w is not a codeword of this encoder
        """
        symbols = w.symbols if isinstance(w, Codeword) else tuple(int(s) for s in w)
        if len(symbols) == 0:
            raise DecodeFailureError("empty code string")
        if self._book is not None:
            x = self._decode_table.get(symbols)
            if x is None:
                raise DecodeFailureError(f"{symbols} is not a codeword")
            return x
        x = self._locate(self._channel_lower(symbols))
        if self.encode(x).symbols != symbols:
            raise DecodeFailureError(f"{symbols} is not a codeword")
        return x

    def parse_one(self, symbols: Tuple[int, ...], start: int) -> Tuple[SourceString, int]:
        if self._book is not None:
            return super().parse_one(symbols, start)
        # any window that extends the true codeword points into its source interval;
        # a re-encoded match is unique by prefix-freeness
        remaining = len(symbols) - start
        window = 1
        while True:
            window = min(window, remaining)
            x = self._locate(self._channel_lower(symbols[start:start + window]))
            w = self.encode(x).symbols
            if symbols[start:start + len(w)] == w:
                return x, len(w)
            if window >= remaining:
                raise DecodeFailureError(f"no codeword starts at stream position {start}")
            window *= 2

    def _channel_lower(self, symbols: Sequence[int]) -> Fraction:
        """Lower end of the channel interval of a code string."""
        lo, width = Fraction(0), Fraction(1)
        prefix: List[int] = []
        for u in symbols:
            if u < 0 or u >= self._cost_fn.K:
                raise DecodeFailureError(f"code symbol {u} outside 0..{self._cost_fn.K - 1}")
            row = self._q[self._cost_fn.context_of(prefix)]
            lo += width * sum(row[:u], Fraction(0))
            width *= row[u]
            prefix.append(u)
        return lo

    def _locate(self, point: Fraction) -> SourceString:
        """Source string whose interval holds ``point`` in [0, 1)."""
        state = self._source.root_state()
        lower = Fraction(0)
        x: List[int] = []
        for _ in range(self._n):
            masses = self._source.children_masses(state)
            for a, m in enumerate(masses):
                if m > 0 and lower <= point < lower + m:
                    break
                lower += m
            else:
                raise DecodeFailureError(f"point {float(point)} lies outside the source intervals")
            x.append(a)
            state = self._source.extend(state, a)
        return tuple(x)


def build_encoder(source: SourceModel, n: int, cost_fn: CostFunction, capacity: CostCapacity,
                  mode: str = "auto", budget: int = DEFAULT_ENUMERATION_BUDGET) -> IntervalEncoder:
    """
    Construct the interval encoder for block length n.

    Args:
        source: Source model
        n: Block length
        cost_fn: Cost function
        capacity: Cost capacity solved for cost_fn
        mode: 'materialized', 'streaming', or 'auto' (materialized when |X|^n <= budget)
        budget: Enumeration budget

    Returns:
        IntervalEncoder: Ready to encode and decode
    """
    if mode not in ENCODER_MODES:
        raise InvalidInputError(f"unknown encoder mode {mode!r}; expected one of {ENCODER_MODES}")
    if mode == "auto":
        materialize = source.alphabet_size ** n <= budget
    else:
        materialize = mode == "materialized"
    logger.debug(f"Building encoder n={n} ({'materialized' if materialize else 'streaming'})")
    return IntervalEncoder(source, n, cost_fn, capacity, materialize=materialize, budget=budget)


def encode(enc: VariableLengthEncoder, x: Sequence[int]) -> Codeword:
    return enc.encode(x)


def decode(enc: VariableLengthEncoder, w: Union[Codeword, Sequence[int]]) -> SourceString:
    return enc.decode(w)
