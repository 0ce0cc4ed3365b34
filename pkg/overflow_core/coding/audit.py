"""
Code audits: generalized Kraft sum, prefix condition, pointwise cost bound
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from overflow_core.errors import CostBoundViolationError
from overflow_core.precision import get_context, power_exact, to_mpf

logger = logging.getLogger("overflow_core.coding")

# float rounding allowance on the certified slack
CERTIFY_TOL = 1e-9


def cost_bound(alpha_c: float, c_max: float, K: int) -> float:
    """Guaranteed slack of the interval code: log_K 2 / alpha_c + c_max."""
    return math.log(2, K) / alpha_c + float(c_max)


def kraft_sum(enc) -> float:
    """
    Generalized Kraft sum  sum_x K^(-alpha_c c(phi(x))).

    Exact rational summation when every alpha_c * cost is an integer,
    50-digit summation otherwise.

    Args:
        enc: Materialized encoder

    Returns:
        float: Kraft sum
    """
    enc.require_materialized("the Kraft sum")
    costs = [w.cost_exact for w in enc.codebook().values()]
    exact = [power_exact(enc.K, enc.alpha_c, c) for c in costs]
    if all(term is not None for term in exact):
        total = float(sum(exact, Fraction(0)))
    else:
        ctx = get_context()
        alpha = to_mpf(ctx, enc.alpha_c)
        total = float(ctx.fsum(ctx.power(enc.K, -alpha * to_mpf(ctx, c)) for c in costs))
    logger.debug(f"Kraft sum n={enc.n}: {total:.15f}")
    return total


def is_prefix_free(codewords: Iterable[Sequence[int]]) -> bool:
    """
    True when no codeword is a prefix of another (duplicates included).

    After sorting, a word that prefixes another sorts directly before some
    word it prefixes, so adjacent pairs suffice.
    """
    words = sorted(tuple(w) for w in codewords)
    for a, b in zip(words, words[1:]):
        if b[:len(a)] == a:
            return False
    return True


@dataclass(frozen=True)
class CostBoundReport:
    """
    Largest pointwise slack c(phi(x)) + log_K P(x) / alpha_c over a codebook.
    """
    max_slack: float
    worst_x: Tuple[int, ...]
    bound: float
    checked: int

    @property
    def passed(self) -> bool:
        return self.max_slack <= self.bound + CERTIFY_TOL


def log_fraction(p: Fraction) -> float:
    """Natural log of a positive rational without underflow."""
    return math.log(p.numerator) - math.log(p.denominator)


def certify_cost_bound(enc, raise_on_violation: bool = True) -> CostBoundReport:
    """
    Check c(phi(x)) <= -log_K P(x) / alpha_c + log_K 2 / alpha_c + c_max for every codeword.

    Args:
        enc: Materialized encoder
        raise_on_violation: Raise instead of returning a failing report

    Returns:
        CostBoundReport: Worst string and its slack

    Raises:
        CostBoundViolationError: If the bound fails and raise_on_violation is set
    """
    enc.require_materialized("cost-bound certification")
    scale = math.log(enc.K) * enc.alpha_c
    worst_x: Tuple[int, ...] = ()
    max_slack = -math.inf
    checked = 0
    for x, p, w in enc.items():
        if p == 0:
            continue
        slack = w.cost + log_fraction(p) / scale
        checked += 1
        if slack > max_slack:
            max_slack, worst_x = slack, x
    report = CostBoundReport(
        max_slack=max_slack,
        worst_x=worst_x,
        bound=cost_bound(enc.alpha_c, enc.cost_fn.c_max, enc.K),
        checked=checked,
    )
    if not report.passed:
        logger.error(f"Cost bound violated at n={enc.n}: slack {report.max_slack:.12f} > {report.bound:.12f}")
        if raise_on_violation:
            raise CostBoundViolationError(report.worst_x, report.max_slack, report.bound)
    return report
