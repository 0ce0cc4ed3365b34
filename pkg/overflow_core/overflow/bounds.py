"""
Achievability and converse bounds on the overflow probability, and the sweep that checks them
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from overflow_core.coding import (
    VariableLengthEncoder,
    build_encoder,
    certify_cost_bound,
    corrupt_codebook,
)
from overflow_core.coding.audit import log_fraction
from overflow_core.costs import CostCapacity, CostFunction
from overflow_core.errors import BoundViolationError, EnumerationTooLargeError, InvalidInputError
from overflow_core.overflow.measure import binomial_ci95, overflow_mass, overflow_mc
from overflow_core.overflow.schedule import ThresholdSchedule, ZRule
from overflow_core.precision import get_context, power_exact, to_mpf
from overflow_core.sources import DEFAULT_ENUMERATION_BUDGET, SourceModel, self_information_distribution

logger = logging.getLogger("overflow_core.overflow")

METHODS = ("exact", "mc", "auto")
REPORT_COLUMNS = ["n", "eta", "measured", "ci95", "lemma1_rhs", "lemma2_rhs", "z", "pass1", "pass2"]
EXTRA_COLUMNS = ["code", "method", "lemma1_tight_rhs", "max_slack", "slack_bound", "cost_bound_ok"]
# float log-probabilities closer than this to a threshold are re-checked at 50 digits
LOG_GUARD = 1e-9

Mass = Union[Fraction, float]


@dataclass(frozen=True)
class SpectralMass:
    """Pr{ln P(X^n) <= bound}; exact rational when enumerated."""
    value: Mass
    method: str
    ci95: float = 0.0

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)


def spectral_mass(src: SourceModel, n: int, log_bound, method: str = "exact",
                  budget: int = DEFAULT_ENUMERATION_BUDGET, trials: int = 100_000, seed: int = 0,
                  exact_bound: Optional[Fraction] = None) -> SpectralMass:
    """
    Probability that the block probability is at most e^log_bound.

    Args:
        src: Source model
        n: Block length
        log_bound: Natural-log threshold (mpmath number or float)
        method: 'exact' (enumeration, then type classes), 'mc', or 'auto' (exact, falling back to mc)
        budget: Enumeration budget
        trials: Monte Carlo draws
        seed: Monte Carlo seed
        exact_bound: e^log_bound as a rational, when it is one; enumeration then compares exactly

    Returns:
        SpectralMass: Probability of the event
    """
    if method not in METHODS:
        raise InvalidInputError(f"unknown method {method!r}; expected one of {METHODS}")
    bound_f = float(log_bound)
    if method in ("exact", "auto"):
        if src.alphabet_size ** n <= budget:
            ctx = get_context()
            total = Fraction(0)
            for _, p in src.enumerate(n, budget=budget, exact=True):
                if p == 0:
                    continue
                if exact_bound is not None:
                    if p <= exact_bound:
                        total += p
                    continue
                lp = log_fraction(p)
                if lp < bound_f - LOG_GUARD or (lp <= bound_f + LOG_GUARD and ctx.log(to_mpf(ctx, p)) <= log_bound):
                    total += p
            return SpectralMass(value=total, method="exact")
        try:
            law = self_information_distribution(src, n, base=math.e, budget=budget)
            guard = LOG_GUARD * max(1.0, abs(bound_f))
            return SpectralMass(value=float(law.masses[law.values >= -bound_f - guard].sum()), method="exact")
        except EnumerationTooLargeError:
            if method == "exact":
                raise
    info = src.sample_self_information(n, trials, seed, base=math.e)
    p = float(np.mean(info >= -bound_f))
    return SpectralMass(value=p, method="mc", ci95=binomial_ci95(p, trials))


@dataclass(frozen=True)
class BoundValue:
    """
    Right-hand side of an overflow bound: spectral mass plus a z-dependent term.

    Attributes:
        mass: Probability term
        term: Additive term at 50 digits (penalty for achievability, -z for the converse)
    """
    mass: SpectralMass
    term: Any

    @property
    def rhs(self) -> float:
        ctx = get_context()
        return float(_mass_mp(ctx, self.mass.value) + self.term)


def _mass_mp(ctx, value: Mass):
    return to_mpf(ctx, value) if isinstance(value, Fraction) else ctx.mpf(value)


def _check_z(z_n: float):
    if not (math.isfinite(z_n) and z_n > 0):
        raise InvalidInputError(f"z_n must be positive and finite, got {z_n}")


def lemma1_value(src: SourceModel, eta_n: float, z_n: float, alpha_c: float, c_max: float, n: int, K: int = 2,
                 method: str = "exact", budget: int = DEFAULT_ENUMERATION_BUDGET, trials: int = 100_000,
                 seed: int = 0, tight: bool = False) -> BoundValue:
    """
    Pr{z_n P(X^n) <= K^(-alpha_c eta_n)} + z_n K^(alpha_c c_max + 1).

    With tight=True the penalty is z_n 2 K^(alpha_c c_max), the diagnostic
    variant that uses log_K 2 in place of 1 in the exponent.
    """
    _check_z(z_n)
    ctx = get_context()
    log_K = ctx.log(K)
    alpha = to_mpf(ctx, alpha_c)
    log_bound = -alpha * to_mpf(ctx, eta_n) * log_K - ctx.log(to_mpf(ctx, z_n))
    power = power_exact(K, alpha_c, Fraction(eta_n))
    exact_bound = power / Fraction(z_n) if power is not None else None
    mass = spectral_mass(src, n, log_bound, method, budget, trials, seed, exact_bound)
    exponent = alpha * to_mpf(ctx, c_max)
    if tight:
        term = to_mpf(ctx, z_n) * 2 * ctx.power(K, exponent)
    else:
        term = to_mpf(ctx, z_n) * ctx.power(K, exponent + 1)
    return BoundValue(mass=mass, term=term)


def lemma1_rhs(src: SourceModel, eta_n: float, z_n: float, alpha_c: float, c_max: float, n: int, K: int = 2,
               method: str = "exact", budget: int = DEFAULT_ENUMERATION_BUDGET, trials: int = 100_000,
               seed: int = 0) -> float:
    """
    Achievability bound on the constructed code's overflow probability.

    Args:
        src: Source model
        eta_n: Cost threshold
        z_n: Free parameter, > 0
        alpha_c: Cost capacity
        c_max: Largest cost entry
        n: Block length
        K: Code-alphabet size
        method: 'exact', 'mc' or 'auto'

    Returns:
        float: Unclamped bound value (may exceed 1)
    """
    return lemma1_value(src, eta_n, z_n, alpha_c, c_max, n, K, method, budget, trials, seed).rhs


def lemma1_tight_rhs(src: SourceModel, eta_n: float, z_n: float, alpha_c: float, c_max: float, n: int,
                     K: int = 2, method: str = "exact", budget: int = DEFAULT_ENUMERATION_BUDGET,
                     trials: int = 100_000, seed: int = 0) -> float:
    """Achievability bound with penalty z_n 2 K^(alpha_c c_max); diagnostic only."""
    return lemma1_value(src, eta_n, z_n, alpha_c, c_max, n, K, method, budget, trials, seed, tight=True).rhs


def lemma2_value(src: SourceModel, eta_n: float, z_n: float, alpha_c: float, n: int, K: int = 2,
                 method: str = "exact", budget: int = DEFAULT_ENUMERATION_BUDGET, trials: int = 100_000,
                 seed: int = 0) -> BoundValue:
    """Pr{P(X^n) <= z_n K^(-alpha_c eta_n)} - z_n."""
    _check_z(z_n)
    ctx = get_context()
    log_bound = ctx.log(to_mpf(ctx, z_n)) - to_mpf(ctx, alpha_c) * to_mpf(ctx, eta_n) * ctx.log(K)
    power = power_exact(K, alpha_c, Fraction(eta_n))
    exact_bound = Fraction(z_n) * power if power is not None else None
    mass = spectral_mass(src, n, log_bound, method, budget, trials, seed, exact_bound)
    return BoundValue(mass=mass, term=-to_mpf(ctx, z_n))


def lemma2_rhs(src: SourceModel, eta_n: float, z_n: float, alpha_c: float, n: int, K: int = 2,
               method: str = "exact", budget: int = DEFAULT_ENUMERATION_BUDGET, trials: int = 100_000,
               seed: int = 0) -> float:
    """
    Converse bound: no prefix code has a smaller overflow probability.

    Returns:
        float: Unclamped bound value (may be negative)
    """
    return lemma2_value(src, eta_n, z_n, alpha_c, n, K, method, budget, trials, seed).rhs


@dataclass(frozen=True)
class BoundReport:
    """
    Measured overflow next to both bounds at one (n, eta_n, z_n) point.

    pass1: measured < lemma1_rhs (the constructed code's guarantee)
    pass2: measured >= lemma2_rhs (holds for every prefix code)
    """
    n: int
    eta: float
    measured: float
    ci95: float
    lemma1_rhs: float
    lemma2_rhs: float
    z: float
    pass1: bool
    pass2: bool
    code: str = "interval"
    method: str = "exact"
    lemma1_tight_rhs: float = math.nan
    max_slack: float = math.nan
    slack_bound: float = math.nan
    cost_bound_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.pass1 and self.pass2 and self.cost_bound_ok

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)


def evaluate_point(code: VariableLengthEncoder, src: SourceModel, capacity: CostCapacity, eta_n: float,
                   z_n: float, method: str = "exact", budget: int = DEFAULT_ENUMERATION_BUDGET,
                   trials: int = 100_000, seed: int = 0, label: str = "interval") -> BoundReport:
    """
    Measure one code at one (eta_n, z_n) point and compare with both bounds.

    In exact mode both comparisons are exact (rationals, or 50 digits for the
    irrational penalty). In Monte Carlo mode the comparison allows the
    confidence half widths of every estimated term.
    """
    n, K, c_max = code.n, code.K, code.cost_fn.c_max
    alpha_c = capacity.alpha_c
    lemma_method = "exact" if method == "exact" else "auto"
    l1 = lemma1_value(src, eta_n, z_n, alpha_c, c_max, n, K, lemma_method, budget, trials, seed)
    l1_tight = lemma1_value(src, eta_n, z_n, alpha_c, c_max, n, K, lemma_method, budget, trials, seed, tight=True)
    l2 = lemma2_value(src, eta_n, z_n, alpha_c, n, K, lemma_method, budget, trials, seed)
    ctx = get_context()

    if method == "exact":
        measured = overflow_mass(code, src, eta_n)
        ci95 = 0.0
        if l2.mass.exact:
            pass2 = measured >= l2.mass.value - Fraction(z_n)
        else:
            pass2 = float(measured) >= l2.rhs - 1e-12
        pass1 = to_mpf(ctx, measured) < _mass_mp(ctx, l1.mass.value) + l1.term
        measured = float(measured)
    else:
        estimate = overflow_mc(code, src, eta_n, trials, seed)
        measured, ci95 = estimate.estimate, estimate.ci95
        pass2 = measured + ci95 + l2.mass.ci95 >= l2.rhs
        pass1 = measured - ci95 - l1.mass.ci95 < l1.rhs

    return BoundReport(
        n=n, eta=float(eta_n), measured=measured, ci95=ci95,
        lemma1_rhs=l1.rhs, lemma2_rhs=l2.rhs, z=float(z_n),
        pass1=bool(pass1), pass2=bool(pass2),
        code=label, method=method, lemma1_tight_rhs=l1_tight.rhs,
    )


def verify_bounds(src: SourceModel, cost_fn: CostFunction, capacity: CostCapacity,
                  schedule: Union[ThresholdSchedule, Sequence[ThresholdSchedule]],
                  n_list: Sequence[int], z_rule: Union[ZRule, Sequence[ZRule]] = ZRule(),
                  method: str = "exact", trials: int = 100_000, seed: int = 0,
                  budget: int = DEFAULT_ENUMERATION_BUDGET, workers: int = 1,
                  corrupt: Optional[str] = None) -> List[BoundReport]:
    """
    Build the interval code for each n and check both bounds on every (schedule, z rule) pair.

    Block lengths run concurrently; each uses seed + its index in the sorted
    n list, and the reports come back sorted by (n, eta, z).

    Args:
        src: Source model
        cost_fn: Cost function
        capacity: Solved cost capacity
        schedule: One or more threshold schedules
        n_list: Block lengths
        z_rule: One or more z_n rules
        method: 'exact' (materialized codes, exact sums) or 'mc'
        trials: Monte Carlo draws per point
        seed: Base seed
        budget: Enumeration budget
        workers: Thread count
        corrupt: Optional corruption mode ('permute' or 'pad') applied to each code

    Returns:
        List[BoundReport]: One row per (n, schedule, z rule)
    """
    if method not in ("exact", "mc"):
        raise InvalidInputError(f"unknown method {method!r}; expected 'exact' or 'mc'")
    schedules = [schedule] if isinstance(schedule, ThresholdSchedule) else list(schedule)
    rules = [z_rule] if isinstance(z_rule, ZRule) else list(z_rule)
    ns = sorted(set(int(n) for n in n_list))
    if not ns or ns[0] < 1:
        raise InvalidInputError(f"block lengths must be >= 1, got {list(n_list)}")

    def run(index: int, n: int) -> List[BoundReport]:
        point_seed = seed + index
        mode = "materialized" if method == "exact" else "auto"
        code = build_encoder(src, n, cost_fn, capacity, mode=mode, budget=budget)
        label = "interval"
        if corrupt:
            code = corrupt_codebook(code, corrupt, point_seed)
            label = code.label
        certificate = certify_cost_bound(code, raise_on_violation=False) if code.materialized else None
        rows = []
        for sched in schedules:
            eta = sched.eta(n)
            for rule in rules:
                report = evaluate_point(code, src, capacity, eta, rule.z(n, cost_fn.K), method,
                                        budget, trials, point_seed, label)
                if certificate is not None:
                    report = _with_certificate(report, certificate)
                rows.append(report)
        logger.info(f"n={n}: {sum(r.passed for r in rows)}/{len(rows)} points pass")
        return rows

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(lambda item: run(*item), enumerate(ns)))
    else:
        batches = [run(index, n) for index, n in enumerate(ns)]
    reports = sorted((r for batch in batches for r in batch), key=lambda r: (r.n, r.eta, r.z))
    failing = [r for r in reports if not r.pass2]
    if failing:
        logger.error(f"Converse bound failed on {len(failing)} rows; this is an implementation bug")
    return reports


def _with_certificate(report: BoundReport, certificate) -> BoundReport:
    row = report.to_row()
    row.update(max_slack=certificate.max_slack, slack_bound=certificate.bound, cost_bound_ok=certificate.passed)
    return BoundReport(**row)


def reports_to_frame(reports: Sequence[BoundReport]) -> pd.DataFrame:
    """Report rows with the fixed CSV columns first."""
    frame = pd.DataFrame([r.to_row() for r in reports], columns=REPORT_COLUMNS + EXTRA_COLUMNS)
    return frame


def raise_on_violation(reports: Sequence[BoundReport]):
    """
    Raises:
        BoundViolationError: If any report row fails a bound or the cost certification
    """
    failing = [r for r in reports if not r.passed]
    if failing:
        first = failing[0]
        raise BoundViolationError(
            f"{len(failing)} of {len(reports)} report rows failed "
            f"(first: n={first.n}, eta={first.eta:g}, z={first.z:g}, "
            f"pass1={first.pass1}, pass2={first.pass2}, cost_bound_ok={first.cost_bound_ok})",
            rows=failing,
        )
