"""
Base class for CLI experiment services and the CSV report writer
"""
import logging
import sys
from abc import ABC, abstractmethod
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional, TextIO

import pandas as pd

from cli.schemas.experiment import ExperimentConfig
from overflow_core import __version__
from overflow_core.costs import CostCapacity, CostFunction, solve_cost_capacity
from overflow_core.sources import SourceModel

logger = logging.getLogger("overflowaudit")


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Text handle on ``path``, or stdout when it is None."""
    if path is None:
        yield sys.stdout
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        yield handle


def write_report(frame: pd.DataFrame, command: str, config: ExperimentConfig,
                 extra: Optional[List[str]] = None) -> None:
    """
    Write a CSV with a '#'-prefixed header holding the version and the config echo.

    Args:
        frame: Report rows
        command: Subcommand name
        config: Validated config, echoed with every default
        extra: Further header lines (without the leading '#')
    """
    header = [f"overflowaudit {__version__}", f"command: {command}", f"config: {config.echo()}"]
    header.extend(extra or [])
    with open_output(config.output) as handle:
        for line in header:
            handle.write(f"# {line}\n")
        frame.to_csv(handle, index=False, lineterminator="\n")
    if config.output:
        logger.info(f"Wrote {len(frame)} rows to {config.output}")


class ExperimentService(ABC):
    """
    Abstract base class for subcommands.
    """

    command: str = ""

    def __init__(self, config: ExperimentConfig, quiet: bool = False):
        """
        Args:
            config: Validated experiment config
            quiet: Hide progress bars
        """
        self.config = config
        self.quiet = quiet
        self._cost_fn: Optional[CostFunction] = None
        self._capacity: Optional[CostCapacity] = None

    @property
    def cost_fn(self) -> CostFunction:
        if self._cost_fn is None:
            self._cost_fn = self.config.build_cost()
        return self._cost_fn

    @property
    def capacity(self) -> CostCapacity:
        if self._capacity is None:
            self._capacity = solve_cost_capacity(self.cost_fn, self.config.uniformity_tol, self.config.solver_tol)
        return self._capacity

    def source(self) -> SourceModel:
        return self.config.build_source()

    @abstractmethod
    def run(self) -> int:
        """
        Execute the subcommand.

        Returns:
            int: Exit status (0 success, 2 failed self-check)
        """
        raise NotImplementedError("Subclasses must implement the run method.")
