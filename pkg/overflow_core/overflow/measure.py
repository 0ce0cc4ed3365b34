"""
Overflow probability of codeword cost: exact, Monte Carlo and self-information sandwich
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from overflow_core.coding import VariableLengthEncoder, cost_bound
from overflow_core.errors import InvalidInputError, UnencodableInputError
from overflow_core.sources import DEFAULT_ENUMERATION_BUDGET, SourceModel, self_information_distribution

logger = logging.getLogger("overflow_core.overflow")

Z95 = 1.96
# relative guard on float threshold comparisons
FLOAT_GUARD = 1e-12


@dataclass(frozen=True)
class OverflowEstimate:
    """Monte Carlo overflow estimate with its 95% normal-approximation half width."""
    estimate: float
    ci95: float
    trials: int
    seed: int


@dataclass(frozen=True)
class OverflowSandwich:
    """
    Bracket on the interval code's overflow from the self-information law.

    lower <= Pr{c(phi(X^n)) > eta_n} <= upper.
    """
    lower: float
    upper: float
    method: str
    ci95: float = 0.0


def binomial_ci95(p: float, trials: int) -> float:
    return Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def overflow_mass(enc: VariableLengthEncoder, src: SourceModel, eta_n: float) -> Fraction:
    """
    Exact Pr{c(phi(X^n)) > eta_n} as a rational.

    Strings without a codeword (probability 0 under the encoder's source)
    never count as overflow.
    """
    enc.require_materialized("exact overflow")
    threshold = Fraction(eta_n)
    total = Fraction(0)
    for x, w in enc.codebook().items():
        if w.cost_exact > threshold:
            total += src.probability_exact(x)
    return total


def overflow_exact(enc: VariableLengthEncoder, src: SourceModel, eta_n: float) -> float:
    """
    Exact overflow probability of codeword cost, strict '>' against eta_n.

    Args:
        enc: Materialized encoder
        src: Source the strings are drawn from
        eta_n: Cost threshold

    Returns:
        float: Sum of P(x) over codewords costing more than eta_n
    """
    return float(overflow_mass(enc, src, eta_n))


def overflow_length_exact(enc: VariableLengthEncoder, src: SourceModel, eta_n: float) -> float:
    """Exact Pr{length(phi(X^n)) > eta_n}, computed from codeword lengths alone."""
    enc.require_materialized("exact length overflow")
    total = Fraction(0)
    for x, w in enc.codebook().items():
        if len(w) > eta_n:
            total += src.probability_exact(x)
    return float(total)


def overflow_mc(enc: VariableLengthEncoder, src: SourceModel, eta_n: float,
                trials: int, seed: int) -> OverflowEstimate:
    """
    Fraction of sampled strings whose codeword costs more than eta_n.

    Args:
        enc: Encoder (materialized or streaming)
        src: Source to sample from
        eta_n: Cost threshold
        trials: Number of sampled blocks
        seed: Generator seed

    Returns:
        OverflowEstimate: Estimate and ci95 = 1.96 sqrt(p(1-p)/trials)
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    X = src.sample_batch(enc.n, trials, seed)
    rows, counts = np.unique(X, axis=0, return_counts=True)
    threshold = Fraction(eta_n)
    hits = 0
    for row, count in zip(rows, counts):
        try:
            w = enc.encode(tuple(int(s) for s in row))
        except UnencodableInputError as e:
            # a sampled string always has positive probability
            raise AssertionError(f"sampled an unencodable string: {e}") from e
        if w.cost_exact > threshold:
            hits += int(count)
    p = hits / trials
    logger.debug(f"MC overflow n={enc.n} eta={eta_n:g}: {p:.6f} over {trials} trials ({len(rows)} distinct)")
    return OverflowEstimate(estimate=p, ci95=binomial_ci95(p, trials), trials=trials, seed=seed)


def overflow_sandwich(src: SourceModel, alpha_c: float, c_max: float, eta_n: float, n: int, K: int,
                      method: str = "exact", trials: int = 100_000, seed: int = 0,
                      budget: int = DEFAULT_ENUMERATION_BUDGET) -> OverflowSandwich:
    """
    Overflow of the interval code at block lengths too large to build.

    The interval code satisfies I(x)/alpha_c <= c(phi(x)) <= I(x)/alpha_c + s with
    I(x) = -log_K P(x) and s = log_K 2 / alpha_c + c_max, so

        Pr{I > alpha_c eta_n} <= overflow <= Pr{I > alpha_c (eta_n - s)}.

    Args:
        src: Source model
        alpha_c: Cost capacity
        c_max: Largest cost entry
        eta_n: Cost threshold
        n: Block length
        K: Code-alphabet size
        method: 'exact' (type classes or enumeration) or 'mc'
        trials: Monte Carlo draws
        seed: Monte Carlo seed
        budget: Atom budget for the exact law

    Returns:
        OverflowSandwich: (lower, upper) bracket
    """
    slack = cost_bound(alpha_c, c_max, K)
    low_cut = alpha_c * eta_n
    high_cut = alpha_c * (eta_n - slack)
    if method == "exact":
        law = self_information_distribution(src, n, base=K, budget=budget)
        lower = float(law.masses[law.values > low_cut + FLOAT_GUARD * max(1.0, abs(low_cut))].sum())
        upper = float(law.masses[law.values > high_cut - FLOAT_GUARD * max(1.0, abs(high_cut))].sum())
        return OverflowSandwich(lower=min(lower, 1.0), upper=min(upper, 1.0), method="exact")
    if method == "mc":
        info = src.sample_self_information(n, trials, seed, base=K)
        lower = float(np.mean(info > low_cut))
        upper = float(np.mean(info > high_cut))
        return OverflowSandwich(lower=lower, upper=upper, method="mc", ci95=binomial_ci95(max(lower, upper), trials))
    raise InvalidInputError(f"unknown method {method!r}; expected 'exact' or 'mc'")


def first_order_overflow(src: SourceModel, alpha_c: float, c_max: float, rate: float, n: int, K: int,
                         method: str = "exact", trials: int = 100_000, seed: int = 0,
                         budget: int = DEFAULT_ENUMERATION_BUDGET) -> OverflowSandwich:
    """Sandwich at eta_n = n R."""
    return overflow_sandwich(src, alpha_c, c_max, n * rate, n, K, method, trials, seed, budget)


def second_order_overflow(src: SourceModel, alpha_c: float, c_max: float, a: float, L: float, n: int, K: int,
                          method: str = "exact", trials: int = 100_000, seed: int = 0,
                          budget: int = DEFAULT_ENUMERATION_BUDGET) -> OverflowSandwich:
    """Sandwich at eta_n = n a + sqrt(n) L."""
    eta = n * a + math.sqrt(n) * L
    return overflow_sandwich(src, alpha_c, c_max, eta, n, K, method, trials, seed, budget)
