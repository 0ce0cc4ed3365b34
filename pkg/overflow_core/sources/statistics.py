"""
Self-information statistics and exact self-information distributions
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy.special import comb, gammaln, logsumexp, xlogy

from overflow_core.errors import EnumerationTooLargeError, InvalidInputError
from overflow_core.sources.base import (
    DEFAULT_ENUMERATION_BUDGET,
    Probability,
    SourceModel,
    check_budget,
)

logger = logging.getLogger("overflow_core.sources")


@dataclass(frozen=True)
class SelfInfoStats:
    """Entropy and self-information variance of one letter, in base-K units."""
    entropy: float
    sigma2: float


def self_info_stats(pmf: Sequence[float], base_K: int = 2) -> SelfInfoStats:
    """
    Entropy H = E[-log_K p(X)] and variance sigma^2 = Var[-log_K p(X)].

    Args:
        pmf: Letter probabilities; zero-mass symbols are skipped
        base_K: Logarithm base (the code-alphabet size)

    Returns:
        SelfInfoStats: (H, sigma^2)
    """
    if base_K < 2:
        raise InvalidInputError(f"logarithm base must be >= 2, got {base_K}")
    p = np.asarray([float(v) for v in pmf])
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise InvalidInputError(f"not a probability vector: {p.tolist()}")
    support = p[p > 0]
    info = -np.log(support) / math.log(base_K)
    entropy = float(np.dot(support, info))
    if np.all(support == support[0]):
        return SelfInfoStats(entropy=entropy, sigma2=0.0)
    sigma2 = float(np.dot(support, (info - entropy) ** 2))
    return SelfInfoStats(entropy=entropy, sigma2=max(sigma2, 0.0))


@dataclass(frozen=True)
class SelfInfoDistribution:
    """
    Exact law of -log_K P_{X^n}(X^n): distinct atoms sorted ascending with masses.
    """
    n: int
    base: float
    values: np.ndarray
    masses: np.ndarray

    def tail(self, thresholds: Sequence[float], tol: float = 1e-9) -> np.ndarray:
        """
        Pr{value >= t} for each threshold (values within tol of t count as equal).
        """
        t = np.asarray(thresholds, dtype=float)
        upper_mass = np.concatenate([np.cumsum(self.masses[::-1])[::-1], [0.0]])
        index = np.searchsorted(self.values, t - tol * np.maximum(1.0, np.abs(t)), side="left")
        return np.clip(upper_mass[index], 0.0, 1.0)

    def quantile(self, q: float) -> float:
        """Smallest atom whose cumulative mass reaches q."""
        cum = np.cumsum(self.masses)
        index = int(np.searchsorted(cum, q * cum[-1] - 1e-15, side="left"))
        return float(self.values[min(index, len(self.values) - 1)])


def compositions(n: int, k: int) -> np.ndarray:
    """All count vectors of k non-negative integers summing to n."""
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    if k == 2:
        first = np.arange(n + 1, dtype=np.int64)
        return np.column_stack([first, n - first])
    blocks = []
    for first in range(n + 1):
        rest = compositions(n - first, k - 1)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def type_log_probability(counts: np.ndarray, components: List[Tuple[float, SourceModel]]) -> np.ndarray:
    """
    Natural-log probability of any single string with the given symbol counts
    under a mixture of i.i.d. components.
    """
    terms = []
    for weight, src in components:
        log_weight = math.log(weight) if weight > 0 else -np.inf
        terms.append(log_weight + xlogy(counts, src.pmf[None, :]).sum(axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        return logsumexp(np.stack(terms), axis=0)


def sample_type_counts(rng: np.random.Generator, components: List[Tuple[float, SourceModel]],
                       n: int, trials: int) -> np.ndarray:
    """Symbol counts of strings drawn from a mixture of i.i.d. components."""
    weights = np.array([w for w, _ in components])
    weights = weights / weights.sum()
    k = components[0][1].alphabet_size
    picks = rng.choice(len(components), size=trials, p=weights) if len(components) > 1 else np.zeros(trials, dtype=np.int64)
    counts = np.zeros((trials, k), dtype=np.int64)
    for index, (_, src) in enumerate(components):
        rows = picks == index
        if rows.any():
            counts[rows] = rng.multinomial(n, src.pmf, size=int(rows.sum()))
    return counts


def self_information_distribution(src: SourceModel, n: int, base: float = 2,
                                  budget: int = DEFAULT_ENUMERATION_BUDGET) -> SelfInfoDistribution:
    """
    Exact distribution of the block self-information.

    Sources built from i.i.d. pieces are handled through type classes
    (every string with the same symbol counts has the same probability), so
    binary sources need only n + 1 atoms at any n. Other sources are
    enumerated string by string within the budget.

    Args:
        src: Source model
        n: Block length
        base: Logarithm base
        budget: Largest number of atoms (type classes or strings)

    Returns:
        SelfInfoDistribution: Sorted atoms and their masses
    """
    if n < 1:
        raise InvalidInputError(f"block length must be >= 1, got {n}")
    components = src.iid_components()
    if components is not None:
        k = src.alphabet_size
        n_classes = int(comb(n + k - 1, k - 1, exact=True))
        if n_classes > budget:
            raise EnumerationTooLargeError(n_classes, budget)
        counts = compositions(n, k)
        log_string = type_log_probability(counts, components)
        log_mass = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1) + log_string
    else:
        check_budget(src.alphabet_size, n, budget)
        log_string = src.log_probabilities(n)
        log_mass = log_string

    keep = np.isfinite(log_string)
    values = -log_string[keep] / math.log(base)
    masses = np.exp(log_mass[keep])
    order = np.argsort(values, kind="stable")
    logger.debug(f"Self-information law at n={n}: {keep.sum()} atoms, total mass {masses.sum():.15f}")
    return SelfInfoDistribution(n=n, base=base, values=values[order], masses=masses[order])


def probability(src: SourceModel, x: Sequence[int]) -> float:
    """Exact P_{X^n}(x) rounded to float."""
    return src.probability(x)


def enumerate_strings(src: SourceModel, n: int, budget: int = DEFAULT_ENUMERATION_BUDGET,
                      exact: bool = False) -> Iterator[Tuple[Tuple[int, ...], Probability]]:
    """Every length-n string with its probability, lexicographic order."""
    return src.enumerate(n, budget=budget, exact=exact)


def sample(src: SourceModel, n: int, seed: int) -> np.ndarray:
    """One seeded length-n draw."""
    return src.sample(n, seed)
