"""
Cost-aware prefix-free block codes and their audits
"""
from overflow_core.coding.audit import (
    CostBoundReport,
    certify_cost_bound,
    cost_bound,
    is_prefix_free,
    kraft_sum,
)
from overflow_core.coding.base import Codeword, VariableLengthEncoder, format_symbols
from overflow_core.coding.codebook import (
    CodebookEncoder,
    corrupt_codebook,
    export_codebook,
    fixed_length_codebook,
    pack_symbols,
    unpack_symbols,
)
from overflow_core.coding.interval import (
    IntervalEncoder,
    build_encoder,
    channel_distribution,
    decode,
    encode,
)

__all__ = [
    "Codeword",
    "CodebookEncoder",
    "CostBoundReport",
    "IntervalEncoder",
    "VariableLengthEncoder",
    "build_encoder",
    "certify_cost_bound",
    "channel_distribution",
    "corrupt_codebook",
    "cost_bound",
    "decode",
    "encode",
    "export_codebook",
    "fixed_length_codebook",
    "format_symbols",
    "is_prefix_free",
    "kraft_sum",
    "pack_symbols",
    "unpack_symbols",
]
