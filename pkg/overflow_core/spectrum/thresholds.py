"""
First- and second-order overflow thresholds, spectral sup-entropy rate and analytic predictions
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from overflow_core.errors import BracketNotFoundError, DegenerateSourceError, InvalidInputError
from overflow_core.sources import (
    DEFAULT_ENUMERATION_BUDGET,
    IIDSource,
    MarkovSource,
    MixtureSource,
    SourceModel,
    self_info_stats,
    self_information_distribution,
)
from overflow_core.spectrum.curves import SpectrumCurve, spectrum_first_order, spectrum_second_order
from overflow_core.spectrum.gaussian import gaussian_quantile

logger = logging.getLogger("overflow_core.spectrum")

# geometric block-length schedule 2^6 .. 2^14
DEFAULT_N_SCHEDULE: Tuple[int, ...] = tuple(2 ** k for k in range(6, 15))
DEGENERATE_VARIANCE = 1e-15
THRESHOLD_COLUMNS = ["kind", "epsilon", "a", "n", "lower", "upper", "value", "analytic"]


@dataclass(frozen=True, eq=False)
class ThresholdEstimate:
    """
    Crossing of a spectrum curve with epsilon at the largest block length.

    curve(lower) > epsilon >= curve(upper); value is the bracket midpoint,
    which sits half a grid step inside either end.
    """
    kind: str
    epsilon: float
    value: float
    bracket: Tuple[float, float]
    n_schedule: Tuple[int, ...]
    analytic: Optional[float] = None
    a: Optional[float] = None
    curves: Tuple[SpectrumCurve, ...] = ()

    @property
    def n(self) -> int:
        return self.n_schedule[-1]

    def contains(self, x: float) -> bool:
        return self.bracket[0] <= x <= self.bracket[1]

    def to_row(self) -> dict:
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "a": self.a,
            "n": self.n,
            "lower": self.bracket[0],
            "upper": self.bracket[1],
            "value": self.value,
            "analytic": self.analytic,
        }


@dataclass(frozen=True)
class EntropyRateEstimate:
    """(1 - delta)-quantile of the normalized self-information at the largest n."""
    value: float
    n: int
    delta: float
    analytic: Optional[float] = None

    def __float__(self) -> float:
        return self.value


def _check_epsilon(epsilon: float, allow_zero: bool):
    low_ok = epsilon >= 0 if allow_zero else epsilon > 0
    if not (low_ok and epsilon < 1):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise InvalidInputError(f"epsilon must lie in {interval}, got {epsilon}")


def _schedule(n_schedule: Sequence[int]) -> Tuple[int, ...]:
    ns = tuple(sorted(set(int(n) for n in n_schedule)))
    if not ns or ns[0] < 1:
        raise InvalidInputError(f"block lengths must be >= 1, got {list(n_schedule)}")
    return ns


def bracket_crossing(curve: SpectrumCurve, epsilon: float) -> Tuple[float, float]:
    """
    Adjacent grid points with curve(lower) > epsilon >= curve(upper).

    Raises:
        BracketNotFoundError: If the curve does not cross epsilon inside the grid
    """
    below = np.flatnonzero(curve.values <= epsilon)
    if below.size == 0:
        raise BracketNotFoundError(
            f"curve at n={curve.n} stays above epsilon={epsilon} on [{curve.grid[0]:g}, {curve.grid[-1]:g}]; "
            f"extend the grid upward"
        )
    index = int(below[0])
    if index == 0:
        raise BracketNotFoundError(
            f"curve at n={curve.n} is already <= epsilon={epsilon} at {curve.grid[0]:g}; extend the grid downward"
        )
    return float(curve.grid[index - 1]), float(curve.grid[index])


def _curves(build, n_schedule: Tuple[int, ...], seed: int, workers: int) -> Tuple[SpectrumCurve, ...]:
    # seed + index keeps Monte Carlo streams independent per block length
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            curves = list(executor.map(lambda item: build(item[1], seed + item[0]), enumerate(n_schedule)))
    else:
        curves = [build(n, seed + index) for index, n in enumerate(n_schedule)]
    return tuple(sorted(curves, key=lambda c: c.n))


def threshold_first_order(src: SourceModel, alpha_c: float, epsilon: float, n_schedule: Sequence[int],
                          grid: Sequence[float], method: str = "exact", K: int = 2, trials: int = 100_000,
                          seed: int = 0, budget: int = DEFAULT_ENUMERATION_BUDGET,
                          workers: int = 1) -> ThresholdEstimate:
    """
    Estimate inf{R : F(R) <= epsilon} from F_n at the largest n of the schedule.

    Args:
        src: Source model
        alpha_c: Cost capacity
        epsilon: Overflow level in [0, 1)
        n_schedule: Block lengths; every curve is kept so convergence is visible
        grid: Strictly increasing rates
        method: 'exact' or 'mc'
        K: Code-alphabet size
        trials: Monte Carlo draws per curve
        seed: Base seed
        budget: Atom budget for exact laws
        workers: Thread count across block lengths

    Returns:
        ThresholdEstimate: Bracket, midpoint and the analytic value where one is known
    """
    _check_epsilon(epsilon, allow_zero=True)
    ns = _schedule(n_schedule)
    curves = _curves(
        lambda n, s: spectrum_first_order(src, alpha_c, n, grid, method, K, trials, s, budget), ns, seed, workers
    )
    lower, upper = bracket_crossing(curves[-1], epsilon)
    analytic = analytic_first_order_threshold(src, epsilon, K, alpha_c)
    logger.info(f"First-order threshold eps={epsilon}: [{lower:g}, {upper:g}] at n={ns[-1]}"
                + (f", analytic {analytic:.6f}" if analytic is not None else ""))
    return ThresholdEstimate(kind="first", epsilon=epsilon, value=(lower + upper) / 2, bracket=(lower, upper),
                             n_schedule=ns, analytic=analytic, curves=curves)


def threshold_second_order(src: SourceModel, alpha_c: float, a: float, epsilon: float, n_schedule: Sequence[int],
                           grid: Sequence[float], method: str = "exact", K: int = 2, trials: int = 100_000,
                           seed: int = 0, budget: int = DEFAULT_ENUMERATION_BUDGET,
                           workers: int = 1) -> ThresholdEstimate:
    """
    Estimate inf{L : F_a(L) <= epsilon} from the second-order curve at the largest n.

    The analytic value is attached for i.i.d. sources evaluated at a = H/alpha_c.
    """
    _check_epsilon(epsilon, allow_zero=True)
    ns = _schedule(n_schedule)
    curves = _curves(
        lambda n, s: spectrum_second_order(src, alpha_c, a, n, grid, method, K, trials, s, budget), ns, seed, workers
    )
    lower, upper = bracket_crossing(curves[-1], epsilon)
    analytic = None
    if isinstance(src, IIDSource) and 0 < epsilon:
        stats = self_info_stats(src.pmf, K)
        if math.isclose(a, stats.entropy / alpha_c, rel_tol=1e-9, abs_tol=1e-12) and stats.sigma2 > DEGENERATE_VARIANCE:
            analytic = threshold_second_order_iid(src.pmf, alpha_c, epsilon, K)
    logger.info(f"Second-order threshold eps={epsilon}, a={a:g}: [{lower:g}, {upper:g}] at n={ns[-1]}")
    return ThresholdEstimate(kind="second", epsilon=epsilon, value=(lower + upper) / 2, bracket=(lower, upper),
                             n_schedule=ns, analytic=analytic, a=float(a), curves=curves)


def threshold_second_order_iid(pmf: Sequence[float], alpha_c: float, epsilon: float, base_K: int = 2) -> float:
    """
    Closed-form second-order threshold of an i.i.d. source at a = H/alpha_c:

        L = sqrt(sigma^2) Phi^-1(1 - epsilon) / alpha_c

    Raises:
        DegenerateSourceError: If the self-information variance is zero
    """
    _check_epsilon(epsilon, allow_zero=False)
    if not alpha_c > 0:
        raise InvalidInputError(f"cost capacity must be positive, got {alpha_c}")
    stats = self_info_stats(pmf, base_K)
    if stats.sigma2 <= DEGENERATE_VARIANCE:
        raise DegenerateSourceError(
            f"self-information variance is {stats.sigma2:g}; the Gaussian threshold collapses for this pmf"
        )
    return math.sqrt(stats.sigma2) * gaussian_quantile(1.0 - epsilon) / alpha_c


def _component_rates(src: SourceModel, base: float) -> Optional[List[Tuple[float, float]]]:
    """(weight, entropy rate) pairs with positive weight, or None if some rate is unknown."""
    if isinstance(src, MixtureSource):
        pairs = src.component_rates(base)
    elif isinstance(src, (IIDSource, MarkovSource)):
        pairs = [(1.0, src.entropy_rate(base))]
    else:
        return None
    if any(rate is None for _, rate in pairs):
        return None
    return [(w, rate) for w, rate in pairs if w > 0]


def analytic_first_order_threshold(src: SourceModel, epsilon: float, base: float = 2,
                                   alpha_c: float = 1.0) -> Optional[float]:
    """
    Limit threshold R(epsilon) for sources with a known limiting spectrum.

    The limiting F(R) of a finite mixture of ergodic components is a step
    function: the total weight of components whose entropy rate is >= R.
    With rates sorted descending, the threshold is the k-th rate where k is
    the first index whose cumulative weight exceeds epsilon.

    Returns:
        float or None: Threshold divided by alpha_c, None when no rate is known
    """
    pairs = _component_rates(src, base)
    if not pairs:
        return None
    cumulative = 0.0
    for weight, rate in sorted(pairs, key=lambda p: -p[1]):
        cumulative += weight
        if cumulative > epsilon + 1e-12:
            return rate / alpha_c
    return min(rate for _, rate in pairs) / alpha_c


def analytic_sup_entropy_rate(src: SourceModel, base: float = 2) -> Optional[float]:
    """Largest entropy rate among components carrying mass, None when unknown."""
    pairs = _component_rates(src, base)
    if not pairs:
        return None
    return max(rate for _, rate in pairs)


def sup_entropy_rate_estimate(src: SourceModel, n_schedule: Sequence[int], delta: float, K: int = 2,
                              method: str = "exact", trials: int = 100_000, seed: int = 0,
                              budget: int = DEFAULT_ENUMERATION_BUDGET) -> EntropyRateEstimate:
    """
    Finite-n surrogate of the spectral sup-entropy rate.

    Args:
        src: Source model
        n_schedule: Block lengths; the largest one is used
        delta: Upper tail mass left out, in (0, 1)
        K: Logarithm base
        method: 'exact' or 'mc'

    Returns:
        EntropyRateEstimate: (1 - delta)-quantile of -log_K P(X^n) / n, with the analytic value when known
    """
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")
    n = _schedule(n_schedule)[-1]
    if method == "exact":
        value = self_information_distribution(src, n, base=K, budget=budget).quantile(1.0 - delta) / n
    elif method == "mc":
        value = float(np.quantile(src.sample_self_information(n, trials, seed, base=K), 1.0 - delta)) / n
    else:
        raise InvalidInputError(f"unknown method {method!r}; expected 'exact' or 'mc'")
    return EntropyRateEstimate(value=max(float(value), 0.0), n=n, delta=delta, analytic=analytic_sup_entropy_rate(src, K))


def thresholds_to_frame(estimates: Sequence[ThresholdEstimate]) -> pd.DataFrame:
    """Summary rows with bracket endpoints."""
    frame = pd.DataFrame([e.to_row() for e in estimates], columns=THRESHOLD_COLUMNS)
    return frame.sort_values(["kind", "epsilon"], kind="stable").reset_index(drop=True)
