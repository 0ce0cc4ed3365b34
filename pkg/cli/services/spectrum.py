"""
spectrum and threshold subcommands
"""
import logging
import math
from typing import Optional

import pandas as pd
from tqdm import tqdm

from cli.services.base import ExperimentService, write_report
from overflow_core.errors import InvalidInputError
from overflow_core.sources import IIDSource, MarkovSource, SourceModel
from overflow_core.spectrum import (
    DEFAULT_N_SCHEDULE,
    THRESHOLD_COLUMNS,
    curves_to_frame,
    spectrum_first_order,
    spectrum_second_order,
    sup_entropy_rate_estimate,
    threshold_first_order,
    threshold_second_order,
    thresholds_to_frame,
)

logger = logging.getLogger("overflowaudit")


class _SpectrumService(ExperimentService):

    def centre(self, src: SourceModel) -> Optional[float]:
        """Second-order centre a; H/alpha_c from the entropy rate when not configured."""
        if self.config.kind != "second":
            return None
        if self.config.a is not None:
            return self.config.a
        rate = src.entropy_rate(self.cost_fn.K) if isinstance(src, (IIDSource, MarkovSource)) else None
        if rate is None:
            raise InvalidInputError("second-order runs need 'a' unless the source has a known entropy rate")
        a = rate / self.capacity.alpha_c
        logger.info(f"Using a = H/alpha_c = {a:.12f}")
        return a


class SpectrumService(_SpectrumService):
    """
    One curve per block length on the configured grid.
    """

    command = "spectrum"

    def run(self) -> int:
        config = self.config
        if not config.n:
            raise InvalidInputError("spectrum needs block lengths (--n)")
        src = self.source()
        alpha_c, K = self.capacity.alpha_c, self.cost_fn.K
        a = self.centre(src)
        grid = config.grid_points()
        curves = []
        for index, n in enumerate(tqdm(config.n, desc="spectrum", unit="n", disable=self.quiet)):
            seed = config.seed + index
            if config.kind == "first":
                curve = spectrum_first_order(src, alpha_c, n, grid, config.method, K, config.trials, seed,
                                             config.budget)
            else:
                curve = spectrum_second_order(src, alpha_c, a, n, grid, config.method, K, config.trials, seed,
                                              config.budget)
            curves.append(curve)
        frame = curves_to_frame(curves)
        frame["trials"] = frame["trials"].astype("Int64")
        frame["seed"] = frame["seed"].astype("Int64")
        write_report(frame, self.command, config, extra=[f"alpha_c: {alpha_c!r}"])
        return 0


class ThresholdService(_SpectrumService):
    """
    Threshold brackets for every epsilon at the largest block length of the schedule.

    First-order runs add a 'sup_entropy' row: the (1 - delta)-quantile
    surrogate of the spectral sup-entropy rate divided by alpha_c, the
    epsilon -> 0 limit of the first-order threshold.
    """

    command = "threshold"

    def run(self) -> int:
        config = self.config
        if not config.epsilon:
            raise InvalidInputError("threshold needs at least one epsilon (--epsilon)")
        src = self.source()
        alpha_c, K = self.capacity.alpha_c, self.cost_fn.K
        a = self.centre(src)
        grid = config.grid_points()
        n_schedule = config.n or list(DEFAULT_N_SCHEDULE)
        estimates = []
        for epsilon in tqdm(config.epsilon, desc="threshold", unit="eps", disable=self.quiet):
            if config.kind == "first":
                estimate = threshold_first_order(src, alpha_c, epsilon, n_schedule, grid, config.method, K,
                                                 config.trials, config.seed, config.budget, config.workers)
            else:
                estimate = threshold_second_order(src, alpha_c, a, epsilon, n_schedule, grid, config.method, K,
                                                  config.trials, config.seed, config.budget, config.workers)
            estimates.append(estimate)
        frame = thresholds_to_frame(estimates)

        if config.kind == "first":
            sup = sup_entropy_rate_estimate(src, n_schedule, config.delta, K, config.method, config.trials,
                                            config.seed, config.budget)
            row = {
                "kind": "sup_entropy", "epsilon": config.delta, "a": None, "n": sup.n,
                "lower": math.nan, "upper": math.nan, "value": sup.value / alpha_c,
                "analytic": sup.analytic / alpha_c if sup.analytic is not None else None,
            }
            frame = pd.concat([frame, pd.DataFrame([row], columns=THRESHOLD_COLUMNS)], ignore_index=True)
        write_report(frame, self.command, config, extra=[f"alpha_c: {alpha_c!r}"])
        return 0
