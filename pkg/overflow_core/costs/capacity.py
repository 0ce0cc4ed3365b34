"""
Cost capacity: the positive root of sum_u K^(-alpha c(u|context)) = 1
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from overflow_core.costs.cost_function import Context, CostFunction, context_label
from overflow_core.errors import CapacityNotUniformError, InvalidInputError
from overflow_core.precision import get_context, to_mpf

logger = logging.getLogger("overflow_core.costs")

DEFAULT_SOLVER_TOL = 1e-12
DEFAULT_UNIFORMITY_TOL = 1e-9
# excess below this is working-precision noise
KRAFT_EXCESS_FLOOR = 1e-40


@dataclass(frozen=True)
class CostCapacity:
    """
    Solved cost capacity shared by every context.

    alpha_c is the largest per-context root, so sum_u K^(-alpha_c c(u|ctx)) <= 1
    holds in every context.
    """
    alpha_c: float
    per_context_roots: Mapping[Context, float]
    tolerance: float
    uniformity_tol: float = DEFAULT_UNIFORMITY_TOL
    residuals: Mapping[Context, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.alpha_c > 0:
            raise InvalidInputError(f"cost capacity must be positive, got {self.alpha_c}")
        spread = max(abs(r - self.alpha_c) for r in self.per_context_roots.values())
        if spread > self.uniformity_tol:
            raise InvalidInputError(f"per-context roots spread {spread:g} beyond {self.uniformity_tol:g}")


def _kraft_excess(costs: np.ndarray, K: int):
    # strictly decreasing in alpha: K - 1 at 0, -> -1 as alpha -> inf
    return lambda alpha: float(np.sum(np.power(float(K), -alpha * costs)) - 1.0)


def solve_context_capacity(cost_fn: CostFunction, context: Sequence[int] = (),
                           tol: float = DEFAULT_SOLVER_TOL) -> float:
    """
    Solve the capacity equation for a single context.

    The bracket starts at [0, 1] and its upper end doubles until the sum
    drops to 1 or below. The returned root is on the upper side of the
    bracket: sum_u K^(-alpha c(u|context)) <= 1.

    Args:
        cost_fn: Cost function
        context: Context of length <= depth
        tol: Absolute tolerance on alpha

    Returns:
        float: alpha > 0
    """
    context = tuple(context)
    if len(context) > cost_fn.depth:
        raise InvalidInputError(
            f"context '{context_label(context)}' is longer than the cost depth {cost_fn.depth}"
        )
    exact_costs = cost_fn.costs_for(context)
    if len(set(exact_costs)) == 1:
        # K K^(-alpha c) = 1 has the closed-form root 1/c
        return float(1 / exact_costs[0])
    costs = np.array([float(c) for c in exact_costs])
    excess = _kraft_excess(costs, cost_fn.K)

    hi = 1.0
    while excess(hi) > 0:
        hi *= 2.0
    root = brentq(excess, 0.0, hi, xtol=tol, maxiter=500)

    # step to the side where the generalized Kraft sum is <= 1, checked at high precision
    steps = 0
    while precise_kraft_excess(cost_fn.K, root, cost_fn.costs_for(context)) > KRAFT_EXCESS_FLOOR and steps < 64:
        root = min(root + tol, hi)
        steps += 1
    return float(root)


def precise_kraft_excess(K: int, alpha: float, costs: Sequence[Fraction]) -> float:
    """sum_u K^(-alpha c_u) - 1 evaluated with 50 significant digits."""
    ctx = get_context()
    total = ctx.fsum(ctx.power(K, -to_mpf(ctx, alpha) * to_mpf(ctx, c)) for c in costs)
    return float(total - 1)


def solve_cost_capacity(cost_fn: CostFunction, uniformity_tol: float = DEFAULT_UNIFORMITY_TOL,
                        tol: float = DEFAULT_SOLVER_TOL) -> CostCapacity:
    """
    Solve the capacity equation in every context of length 0..depth and check uniformity.

    Args:
        cost_fn: Cost function
        uniformity_tol: Largest allowed spread between per-context roots
        tol: Root-finder tolerance

    Returns:
        CostCapacity: Common capacity with per-context roots and residuals

    Raises:
        CapacityNotUniformError: If the roots disagree by more than uniformity_tol
    """
    if not uniformity_tol > 0:
        raise InvalidInputError(f"uniformity tolerance must be positive, got {uniformity_tol}")

    roots: Dict[Context, float] = {ctx: solve_context_capacity(cost_fn, ctx, tol) for ctx in cost_fn.contexts()}
    values = np.array(list(roots.values()))
    if values.max() - values.min() > uniformity_tol:
        reference = roots[()]
        offending = [ctx for ctx, r in roots.items() if abs(r - reference) > uniformity_tol]
        if not offending:
            offending = [max(roots, key=roots.get), min(roots, key=roots.get)]
        logger.error(f"Non-uniform cost capacity: {len(offending)} of {len(roots)} contexts disagree")
        raise CapacityNotUniformError(roots, offending, uniformity_tol)

    alpha_c = float(values.max())
    residuals = {ctx: precise_kraft_excess(cost_fn.K, alpha_c, cost_fn.costs_for(ctx)) for ctx in roots}
    logger.info(f"Cost capacity alpha_c={alpha_c:.12f} over {len(roots)} contexts")
    return CostCapacity(
        alpha_c=alpha_c,
        per_context_roots=roots,
        tolerance=tol,
        uniformity_tol=uniformity_tol,
        residuals=residuals,
    )
