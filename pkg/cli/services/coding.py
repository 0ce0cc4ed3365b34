"""
encode and decode subcommands: files of source symbols through the interval code
"""
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence, Tuple

from tqdm import tqdm

from cli.schemas.experiment import ExperimentConfig
from cli.schemas.reports import CodingSummary, StreamHeader
from cli.services.base import ExperimentService
from overflow_core import __version__
from overflow_core.coding import (
    IntervalEncoder,
    build_encoder,
    certify_cost_bound,
    format_symbols,
    pack_symbols,
    unpack_symbols,
)
from overflow_core.errors import DecodeFailureError, InvalidInputError
from overflow_core.sources import SourceModel

logger = logging.getLogger("overflowaudit")


def read_source_symbols(path: Path, alphabet_size: int) -> List[int]:
    """
    Parse a symbol file: one digit per symbol for alphabets up to 10 (whitespace
    ignored), whitespace- or comma-separated integers above.

    Raises:
        InvalidInputError: If the file is empty or holds a non-symbol
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read input {path}: {e}") from e
    if alphabet_size <= 10:
        tokens = [ch for ch in text if not ch.isspace()]
    else:
        tokens = [t for t in re.split(r"[\s,]+", text) if t]
    if not tokens:
        raise InvalidInputError(f"input {path} holds no source symbols")
    symbols = []
    for token in tokens:
        if not token.isdigit() or int(token) >= alphabet_size:
            raise InvalidInputError(f"'{token}' is not a symbol of the {alphabet_size}-letter source alphabet")
        symbols.append(int(token))
    return symbols


def write_source_symbols(path: Path, symbols: Sequence[int], alphabet_size: int):
    body = format_symbols(symbols, alphabet_size)
    if alphabet_size > 10:
        body = body.replace(".", " ")
    Path(path).write_text(body + "\n", encoding="utf-8")


def _require_output(config: ExperimentConfig, command: str) -> Path:
    if not config.output:
        raise InvalidInputError(f"{command} needs an output path (--out)")
    target = Path(config.output)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


class _CodingService(ExperimentService):

    def __init__(self, config: ExperimentConfig, input_path: str, quiet: bool = False):
        super().__init__(config, quiet)
        self.input_path = Path(input_path)

    def encoder(self, src: SourceModel, n: int) -> IntervalEncoder:
        return build_encoder(src, n, self.cost_fn, self.capacity, mode="auto", budget=self.config.budget)


class EncodeService(_CodingService):
    """
    Encode a symbol file block by block.

    Full blocks use the length-n code; a shorter final block uses the code
    for its own length. Each codeword is costed from the root context, so
    the reported blockwise cost is the sum of codeword costs. With context
    depth > 0 it differs from the cost of the concatenated stream.
    """

    command = "encode"

    def run(self) -> int:
        src = self.source()
        target = _require_output(self.config, self.command)
        symbols = read_source_symbols(self.input_path, src.alphabet_size)
        n = self.config.block_length
        full, tail = divmod(len(symbols), n)

        stream: List[int] = []
        total = Fraction(0)
        max_slack = None
        if full:
            encoder = self.encoder(src, n)
            if encoder.materialized:
                max_slack = certify_cost_bound(encoder).max_slack
            for i in tqdm(range(full), desc="encode", unit="block", disable=self.quiet):
                w = encoder.encode(symbols[i * n:(i + 1) * n])
                stream.extend(w.symbols)
                total += w.cost_exact
        if tail:
            w = self.encoder(src, tail).encode(symbols[full * n:])
            stream.extend(w.symbols)
            total += w.cost_exact

        header = StreamHeader(version=__version__, block_length=n, symbols=len(symbols),
                              code_symbols=len(stream), K=self.cost_fn.K, packed=self.config.packed)
        if self.config.packed:
            if self.cost_fn.K != 2:
                raise InvalidInputError("packed output needs a binary code alphabet")
            target.write_bytes(header.model_dump_json().encode("utf-8") + b"\n" + pack_symbols(stream))
        else:
            target.write_text(header.model_dump_json() + "\n" + format_symbols(stream, self.cost_fn.K) + "\n",
                              encoding="utf-8")

        summary = CodingSummary(
            symbols=len(symbols), blocks=full, tail=tail, block_length=n, code_symbols=len(stream),
            blockwise_cost=float(total), cost_per_symbol=float(total) / len(symbols),
            alpha_c=self.capacity.alpha_c, max_slack=max_slack,
        )
        logger.info(f"Encoded {len(symbols)} symbols into {len(stream)} code symbols, cost {float(total):.6f}")
        print(summary.model_dump_json(indent=2))
        return 0


class DecodeService(_CodingService):
    """
    Decode a file written by encode with the same source and cost config.
    """

    command = "decode"

    def read_stream(self) -> Tuple[StreamHeader, Tuple[int, ...]]:
        try:
            raw = self.input_path.read_bytes()
        except OSError as e:
            raise InvalidInputError(f"cannot read input {self.input_path}: {e}") from e
        head, _, body = raw.partition(b"\n")
        if not head.strip():
            raise InvalidInputError(f"input {self.input_path} is empty")
        header = StreamHeader.model_validate_json(head)
        if header.K != self.cost_fn.K:
            raise InvalidInputError(f"stream uses a {header.K}-ary code, config has K={self.cost_fn.K}")
        if header.packed:
            code = unpack_symbols(body, header.code_symbols)
        else:
            text = body.decode("utf-8").strip()
            if not text.isdigit() and text:
                raise DecodeFailureError("code stream holds non-digit characters")
            code = tuple(int(ch) for ch in text)
        if len(code) != header.code_symbols:
            raise DecodeFailureError(f"header announces {header.code_symbols} code symbols, stream has {len(code)}")
        return header, code

    def run(self) -> int:
        src = self.source()
        target = _require_output(self.config, self.command)
        header, code = self.read_stream()

        symbols: List[int] = []
        total = Fraction(0)
        used = 0
        if header.full_blocks:
            encoder = self.encoder(src, header.block_length)
            blocks, used = encoder.decode_prefix(code, header.full_blocks)
            for block in tqdm(blocks, desc="decode", unit="block", disable=self.quiet):
                symbols.extend(block)
                total += encoder.encode(block).cost_exact
        if header.tail:
            encoder = self.encoder(src, header.tail)
            blocks, tail_used = encoder.decode_prefix(code[used:], 1)
            symbols.extend(blocks[0])
            total += encoder.encode(blocks[0]).cost_exact
            used += tail_used
        if used != len(code):
            raise DecodeFailureError(f"{len(code) - used} trailing code symbols")

        write_source_symbols(target, symbols, src.alphabet_size)
        summary = CodingSummary(
            symbols=len(symbols), blocks=header.full_blocks, tail=header.tail,
            block_length=header.block_length, code_symbols=len(code),
            blockwise_cost=float(total), cost_per_symbol=float(total) / len(symbols),
            alpha_c=self.capacity.alpha_c,
        )
        logger.info(f"Decoded {len(code)} code symbols into {len(symbols)} source symbols")
        print(summary.model_dump_json(indent=2))
        return 0
