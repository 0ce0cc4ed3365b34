"""
Conditional cost functions and cost capacity
"""
from overflow_core.costs.cost_function import (
    CostFunction,
    context_label,
    load_cost_function,
    string_cost,
    to_fraction,
)
from overflow_core.costs.capacity import (
    DEFAULT_SOLVER_TOL,
    DEFAULT_UNIFORMITY_TOL,
    CostCapacity,
    solve_context_capacity,
    solve_cost_capacity,
)

__all__ = [
    "CostFunction",
    "CostCapacity",
    "context_label",
    "load_cost_function",
    "string_cost",
    "to_fraction",
    "solve_context_capacity",
    "solve_cost_capacity",
    "DEFAULT_SOLVER_TOL",
    "DEFAULT_UNIFORMITY_TOL",
]
