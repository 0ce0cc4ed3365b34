"""
Report schemas printed or embedded by the CLI
"""
from typing import Dict, Optional

from pydantic import BaseModel, Field


class CapacityReport(BaseModel):
    """
    Solved cost capacity of a cost config.
    """
    K: int = Field(..., description="Code-alphabet size")
    depth: int = Field(..., description="Context length")
    c_max: float = Field(..., description="Largest cost entry")
    alpha_c: float = Field(..., description="Cost capacity")
    per_context_roots: Dict[str, float] = Field(..., description="Root per context digit string")
    residuals: Dict[str, float] = Field(..., description="Kraft excess at alpha_c per context")
    tolerance: float = Field(..., description="Root-finder tolerance")
    uniformity_tol: float = Field(..., description="Uniformity tolerance")


class StreamHeader(BaseModel):
    """
    First line of an encoded file; decode reads everything it needs from it and the config.
    """
    version: str = Field(..., description="Package version that wrote the stream")
    block_length: int = Field(..., ge=1, description="Block length n")
    symbols: int = Field(..., ge=1, description="Source symbols encoded")
    code_symbols: int = Field(..., ge=0, description="Code symbols in the stream")
    K: int = Field(..., description="Code-alphabet size")
    packed: bool = Field(False, description="Binary stream packed into bytes")

    @property
    def full_blocks(self) -> int:
        return self.symbols // self.block_length

    @property
    def tail(self) -> int:
        return self.symbols % self.block_length


class CodingSummary(BaseModel):
    """
    Cost summary of an encode or decode run.
    """
    symbols: int = Field(..., description="Source symbols")
    blocks: int = Field(..., description="Blocks of length block_length")
    tail: int = Field(0, description="Length of the final short block, 0 when none")
    block_length: int = Field(..., description="Block length n")
    code_symbols: int = Field(..., description="Total code symbols")
    blockwise_cost: float = Field(..., description="Sum of codeword costs, each costed from the root context")
    cost_per_symbol: float = Field(..., description="Blockwise cost per source symbol")
    alpha_c: float = Field(..., description="Cost capacity")
    max_slack: Optional[float] = Field(None, description="Largest pointwise cost slack of the full-block code")
