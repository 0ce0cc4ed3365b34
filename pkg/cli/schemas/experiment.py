"""
Experiment configuration schema
"""
import json
import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cli.config import settings
from overflow_core.costs import CostFunction
from overflow_core.errors import InvalidInputError
from overflow_core.overflow import ThresholdSchedule, ZRule
from overflow_core.sources import SourceModel, source_from_mapping

# fields that never change a result and stay out of the report header
NON_RESULT_FIELDS = {"output", "workers"}


class CostSpec(BaseModel):
    """
    Conditional cost table.
    """
    model_config = ConfigDict(extra="forbid")

    K: int = Field(..., ge=2, le=10, description="Code-alphabet size", examples=[2])
    depth: int = Field(0, ge=0, description="Context length d, 0 for memoryless costs")
    costs: Dict[str, List[float]] = Field(
        ...,
        description="Costs keyed by context digit string ('' is the root context)",
        examples=[{"": [1, 2]}],
    )

    def build(self) -> CostFunction:
        return CostFunction.from_mapping(self.model_dump())


class IIDSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["iid"]
    pmf: List[float] = Field(..., min_length=1, description="Symbol probabilities")


class MarkovSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["markov"]
    initial: List[float] = Field(..., min_length=1, description="Initial distribution")
    transition: List[List[float]] = Field(..., min_length=1, description="Row-stochastic transition matrix")


class MixtureComponentSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weight: float = Field(..., ge=0, le=1, description="Mixture weight")
    source: "SourceSpec"


class MixtureSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["mixture"]
    components: List[MixtureComponentSpec] = Field(..., min_length=1, description="(weight, source) pairs")


SourceSpec = Annotated[Union[IIDSpec, MarkovSpec, MixtureSpec], Field(discriminator="type")]
MixtureComponentSpec.model_rebuild()


class ScheduleSpec(BaseModel):
    """
    Cost threshold eta_n per block length.
    """
    model_config = ConfigDict(extra="forbid")

    kind: Literal["first", "second", "explicit"] = Field("first", description="Schedule family")
    rate: Optional[float] = Field(None, description="R for eta_n = n R")
    a: Optional[float] = Field(None, description="a for eta_n = n a + sqrt(n) L")
    L: Optional[float] = Field(None, description="L for eta_n = n a + sqrt(n) L")
    table: Dict[int, float] = Field(default_factory=dict, description="Explicit n -> eta_n")

    def build(self) -> ThresholdSchedule:
        if self.kind == "explicit":
            ns = sorted(self.table)
            return ThresholdSchedule.explicit(ns, [self.table[n] for n in ns])
        return ThresholdSchedule(kind=self.kind, rate=self.rate, a=self.a, L=self.L)


class ZRuleSpec(BaseModel):
    """
    Free parameter z_n of the overflow bounds.
    """
    model_config = ConfigDict(extra="forbid")

    kind: Literal["direct", "converse", "constant"] = Field("direct", description="z_n family")
    gamma: float = Field(settings.DEFAULT_GAMMA, description="Exponent scale for direct/converse rules")
    value: Optional[float] = Field(None, description="z_n for the constant rule")

    @field_validator("value")
    @classmethod
    def positive_value(cls, v):
        if v is not None and not (math.isfinite(v) and v > 0):
            raise ValueError(f"z must be positive and finite, got {v}")
        return v

    @model_validator(mode="after")
    def constant_needs_value(self):
        if self.kind == "constant" and self.value is None:
            raise ValueError("constant z rule needs a value")
        return self

    def build(self) -> ZRule:
        return ZRule(kind=self.kind, gamma=self.gamma, value=self.value)


class GridSpec(BaseModel):
    """
    Abscissa grid: an arithmetic progression or explicit values.
    """
    model_config = ConfigDict(extra="forbid")

    start: Optional[float] = None
    stop: Optional[float] = None
    step: Optional[float] = Field(None, gt=0)
    values: Optional[List[float]] = Field(None, min_length=1)

    @model_validator(mode="after")
    def one_form(self):
        progression = (self.start, self.stop, self.step)
        if self.values is None and any(v is None for v in progression):
            raise ValueError("grid needs either 'values' or all of 'start', 'stop' and 'step'")
        if self.values is None and self.stop < self.start:
            raise ValueError("grid stop must not be below start")
        return self

    def points(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # rounding keeps abscissas like 0.3 printable without float residue
        return np.round(self.start + self.step * np.arange(count), 12)


DEFAULT_GRIDS = {
    "first": GridSpec(start=0.0, stop=4.0, step=0.01),
    "second": GridSpec(start=-4.0, stop=4.0, step=0.01),
}


class ExperimentConfig(BaseModel):
    """
    Everything a subcommand needs; validated before any computation.
    """
    model_config = ConfigDict(extra="forbid")

    source: Optional[SourceSpec] = Field(None, description="Source model")
    cost: CostSpec = Field(
        default_factory=lambda: CostSpec(K=2, depth=0, costs={"": [1, 1]}),
        description="Cost function (unit binary costs by default)",
    )

    n: Optional[List[int]] = Field(None, description="Block lengths (threshold: the n schedule)")
    block_length: int = Field(settings.BLOCK_LENGTH, ge=1, description="Block length for encode/decode")
    epsilon: Optional[List[float]] = Field(None, description="Overflow levels for thresholds")
    a: Optional[float] = Field(None, description="Second-order centre a; H/alpha_c when omitted")
    delta: float = Field(settings.DEFAULT_DELTA, gt=0, lt=1, description="Tail mass for the sup-entropy estimate")
    kind: Literal["first", "second"] = Field("first", description="Spectrum/threshold order")
    grid: Optional[GridSpec] = Field(None, description="Abscissa grid for spectrum and threshold")

    schedule: List[ScheduleSpec] = Field(default_factory=list, description="Threshold schedules for sweeps")
    z_rule: List[ZRuleSpec] = Field(default_factory=lambda: [ZRuleSpec()], min_length=1, description="z_n rules")
    corrupt: Optional[Literal["permute", "pad"]] = Field(None, description="Corrupt each constructed code")

    method: Literal["exact", "mc"] = Field("exact", description="Exact enumeration or Monte Carlo")
    trials: int = Field(settings.DEFAULT_TRIALS, ge=1, description="Monte Carlo draws")
    seed: int = Field(settings.DEFAULT_SEED, ge=0, description="Base seed")
    budget: int = Field(settings.ENUMERATION_BUDGET, ge=1, description="Enumeration budget")
    uniformity_tol: float = Field(settings.UNIFORMITY_TOL, gt=0, description="Capacity uniformity tolerance")
    solver_tol: float = Field(settings.SOLVER_TOL, gt=0, description="Capacity root tolerance")
    packed: bool = Field(False, description="Write encoded binary streams packed into bytes")

    output: Optional[str] = Field(None, description="Output path (stdout when omitted)")
    workers: int = Field(settings.WORKERS, ge=1, description="Threads for sweeps")

    @field_validator("n", "epsilon", "z_rule", "schedule", mode="before")
    @classmethod
    def listify(cls, v):
        if v is None or isinstance(v, list):
            return v
        return [v]

    @field_validator("n")
    @classmethod
    def positive_lengths(cls, v):
        if v is not None:
            if not v or min(v) < 1:
                raise ValueError(f"block lengths must be >= 1, got {v}")
            v = sorted(set(v))
        return v

    @field_validator("epsilon")
    @classmethod
    def epsilon_range(cls, v):
        if v is not None and any(not 0 <= e < 1 for e in v):
            raise ValueError(f"epsilon values must lie in [0, 1), got {v}")
        return v

    def build_source(self) -> SourceModel:
        if self.source is None:
            raise InvalidInputError("this command needs a 'source' block in the config")
        return source_from_mapping(self.source.model_dump())

    def build_cost(self) -> CostFunction:
        return self.cost.build()

    def grid_points(self) -> np.ndarray:
        return (self.grid or DEFAULT_GRIDS[self.kind]).points()

    def echo(self) -> str:
        """Sorted JSON of every result-relevant field, defaults included."""
        data = self.model_dump(mode="json", exclude=NON_RESULT_FIELDS)
        data["grid"] = (self.grid or DEFAULT_GRIDS[self.kind]).model_dump(mode="json")
        return json.dumps(data, sort_keys=True, separators=(",", ":"))


def load_experiment(path: Optional[Union[str, Path]] = None,
                    overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Read a JSON config and apply flag overrides; flags win.

    Args:
        path: JSON config file, or None for an empty config
        overrides: Field values from the command line; None entries are ignored

    Returns:
        ExperimentConfig: Validated config

    Raises:
        InvalidInputError: If the file cannot be read
        pydantic.ValidationError: If a value is out of its domain
    """
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidInputError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise InvalidInputError(f"config {path} must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return ExperimentConfig.model_validate(data)
