"""
Explicit codebooks: adversarial variants, fixed-length codes, export and bit packing
"""
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Dict, Mapping, Sequence, TextIO, Tuple, Union

import numpy as np

from overflow_core.coding.audit import cost_bound, is_prefix_free
from overflow_core.coding.base import Codeword, SourceString, VariableLengthEncoder, format_symbols
from overflow_core.costs import CostCapacity, CostFunction
from overflow_core.errors import DecodeFailureError, InvalidInputError, UnencodableInputError
from overflow_core.sources import DEFAULT_ENUMERATION_BUDGET, SourceModel

logger = logging.getLogger("overflow_core.coding")

CORRUPTION_MODES = ("permute", "pad")


class CodebookEncoder(VariableLengthEncoder):
    """
    Prefix-free code given by an explicit table x -> code string.

    Used for codes that are not interval codes: shuffled or padded
    versions of a constructed code and plain fixed-length codes.
    """

    def __init__(self, source: SourceModel, n: int, cost_fn: CostFunction, alpha_c: float,
                 table: Mapping[Sequence[int], Sequence[int]], label: str = "explicit"):
        """
        Args:
            source: Source model the code is evaluated against
            n: Block length
            cost_fn: Cost function of the code alphabet
            alpha_c: Cost capacity used in Kraft sums
            table: Mapping source string -> code string
            label: Short description carried into reports
        """
        super().__init__(source, n, cost_fn, alpha_c)
        book: Dict[SourceString, Codeword] = {}
        for x, w in table.items():
            x = self.check_block(x)
            if len(w) == 0:
                raise InvalidInputError(f"empty codeword for {x}")
            book[x] = Codeword.from_symbols(cost_fn, w)
        if not is_prefix_free(w.symbols for w in book.values()):
            raise InvalidInputError("codebook is not prefix-free")
        self._book = book
        self._label = label
        self._index(book)

    @property
    def materialized(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return self._label

    def codebook(self) -> Dict[SourceString, Codeword]:
        return dict(self._book)

    def encode(self, x: Sequence[int]) -> Codeword:
        x = self.check_block(x)
        w = self._book.get(x)
        if w is None:
            raise UnencodableInputError(f"string {x} has no codeword in the '{self._label}' codebook")
        return w

    def decode(self, w: Union[Codeword, Sequence[int]]) -> SourceString:
        symbols = w.symbols if isinstance(w, Codeword) else tuple(int(s) for s in w)
        x = self._decode_table.get(symbols)
        if x is None:
            raise DecodeFailureError(f"{symbols} is not a codeword of the '{self._label}' codebook")
        return x


def corrupt_codebook(enc: VariableLengthEncoder, mode: str = "permute", seed: int = 0) -> CodebookEncoder:
    """
    Deliberately suboptimal copy of a materialized code.

    'permute' shuffles the codewords among the source strings. 'pad' appends
    the same run of cheapest symbols to every codeword, long enough that the
    pointwise cost guarantee is broken. Both keep the code prefix-free and the
    generalized Kraft sum at or below its original value.

    Args:
        enc: Materialized encoder
        mode: 'permute' or 'pad'
        seed: Seed for the shuffle

    Returns:
        CodebookEncoder: Corrupted code over the same strings
    """
    if mode not in CORRUPTION_MODES:
        raise InvalidInputError(f"unknown corruption mode {mode!r}; expected one of {CORRUPTION_MODES}")
    enc.require_materialized("corrupting a code")
    book = enc.codebook()
    strings = sorted(book)
    if mode == "permute":
        rng = np.random.default_rng(seed)
        order = rng.permutation(len(strings))
        table = {x: book[strings[j]].symbols for x, j in zip(strings, order)}
    else:
        cost_fn = enc.cost_fn
        c_min = min(min(costs) for costs in cost_fn.table.values())
        bound = cost_bound(enc.alpha_c, cost_fn.c_max, cost_fn.K)
        repeats = math.ceil((Fraction(bound) + 1) / c_min)
        suffix = (cost_fn.cheapest_symbol(()),) * repeats
        table = {x: book[x].symbols + suffix for x in strings}
    logger.info(f"Corrupted n={enc.n} codebook with mode={mode} seed={seed}")
    return CodebookEncoder(enc.source, enc.n, enc.cost_fn, enc.alpha_c, table, label=f"{mode}:{seed}")


def fixed_length_codebook(source: SourceModel, n: int, cost_fn: CostFunction, capacity: CostCapacity,
                          budget: int = DEFAULT_ENUMERATION_BUDGET) -> CodebookEncoder:
    """
    Equal-length code: the i-th positive-probability string (lexicographic)
    gets i written in base K with ceil(log_K(count)) digits, at least one.
    """
    strings = [x for x, p in source.enumerate(n, budget=budget, exact=True) if p > 0]
    K = cost_fn.K
    length = 1
    while K ** length < len(strings):
        length += 1
    table = {}
    for index, x in enumerate(strings):
        digits = []
        for _ in range(length):
            index, digit = divmod(index, K)
            digits.append(digit)
        table[x] = tuple(reversed(digits))
    return CodebookEncoder(source, n, cost_fn, capacity.alpha_c, table, label=f"fixed:{length}")


def export_codebook(enc: VariableLengthEncoder, target: Union[str, Path, TextIO]) -> int:
    """
    Write one line per string: '<x digits> <codeword digits> <cost to 12 decimals>'.

    Returns:
        int: Number of lines written
    """
    enc.require_materialized("exporting a codebook")
    lines = [
        f"{format_symbols(x, enc.source.alphabet_size)} {format_symbols(w.symbols, enc.K)} {w.cost:.12f}\n"
        for x, w in sorted(enc.codebook().items())
    ]
    if isinstance(target, (str, Path)):
        Path(target).write_text("".join(lines), encoding="utf-8")
    else:
        target.writelines(lines)
    logger.info(f"Exported {len(lines)} codewords")
    return len(lines)


def pack_symbols(symbols: Sequence[int]) -> bytes:
    """Pack a binary code stream into bytes, most significant bit first."""
    bits = np.asarray(symbols, dtype=np.uint8)
    if bits.size and bits.max() > 1:
        raise InvalidInputError("bit packing needs a binary code alphabet")
    return np.packbits(bits).tobytes()


def unpack_symbols(data: bytes, count: int) -> Tuple[int, ...]:
    """Inverse of pack_symbols for the first ``count`` bits."""
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if count > bits.size:
        raise DecodeFailureError(f"packed stream holds {bits.size} bits, {count} requested")
    return tuple(int(b) for b in bits[:count])
