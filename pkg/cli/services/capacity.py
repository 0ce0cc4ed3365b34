"""
capacity subcommand
"""
import logging

import pandas as pd

from cli.schemas.reports import CapacityReport
from cli.services.base import ExperimentService, write_report
from overflow_core.costs import context_label

logger = logging.getLogger("overflowaudit")


class CapacityService(ExperimentService):
    """
    Solve the cost capacity of the configured cost function.

    The JSON report goes to stdout; with an output path the per-context
    roots are also written as CSV.
    """

    command = "capacity"

    def report(self) -> CapacityReport:
        capacity = self.capacity
        return CapacityReport(
            K=self.cost_fn.K,
            depth=self.cost_fn.depth,
            c_max=self.cost_fn.c_max,
            alpha_c=capacity.alpha_c,
            per_context_roots={context_label(ctx): r for ctx, r in capacity.per_context_roots.items()},
            residuals={context_label(ctx): r for ctx, r in capacity.residuals.items()},
            tolerance=capacity.tolerance,
            uniformity_tol=capacity.uniformity_tol,
        )

    def run(self) -> int:
        report = self.report()
        print(report.model_dump_json(indent=2))
        if self.config.output:
            frame = pd.DataFrame(
                [{"context": ctx, "root": root, "residual": report.residuals[ctx]}
                 for ctx, root in report.per_context_roots.items()],
                columns=["context", "root", "residual"],
            )
            write_report(frame, self.command, self.config, extra=[f"alpha_c: {report.alpha_c!r}"])
        return 0
