"""
Abstract general-source model
"""
import itertools
import logging
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from overflow_core.errors import EnumerationTooLargeError, InvalidInputError

logger = logging.getLogger("overflow_core.sources")

DEFAULT_ENUMERATION_BUDGET = 2 ** 22
SUM_TOLERANCE = 1e-12
# rows * columns of a sampled block held in memory at once
SAMPLE_CHUNK_CELLS = 4_000_000

Probability = Union[float, Fraction]


def check_budget(alphabet_size: int, n: int, budget: int) -> int:
    """
    Check |X|^n against the enumeration budget.

    Returns:
        int: |X|^n
    """
    if n < 1:
        raise InvalidInputError(f"block length must be >= 1, got {n}")
    size = alphabet_size ** n
    if size > budget:
        raise EnumerationTooLargeError(size, budget)
    return size


class SourceModel(ABC):
    """
    Abstract base class for block sources P_{X^n} over a finite alphabet.

    Exact probabilities are tracked incrementally through an opaque
    per-prefix state so that the coder can walk the source tree one symbol
    at a time. Float log-probabilities are vectorized with numpy.
    """

    def __init__(self, alphabet_size: int):
        if alphabet_size < 1:
            raise InvalidInputError(f"alphabet must contain at least one symbol, got {alphabet_size}")
        self._alphabet_size = alphabet_size

    @property
    def alphabet_size(self) -> int:
        return self._alphabet_size

    @property
    @abstractmethod
    def kind(self) -> str:
        """Variant tag: 'iid', 'markov' or 'mixture'."""

    # -- exact prefix tree --

    @abstractmethod
    def root_state(self) -> Any:
        """State of the empty prefix."""

    @abstractmethod
    def extend(self, state: Any, symbol: int) -> Any:
        """State of prefix + symbol."""

    @abstractmethod
    def state_mass(self, state: Any) -> Fraction:
        """Exact probability of the prefix the state describes."""

    def children_masses(self, state: Any) -> List[Fraction]:
        """Exact probabilities of every one-symbol extension of a prefix."""
        return [self.state_mass(self.extend(state, a)) for a in range(self._alphabet_size)]

    # -- float side --

    @abstractmethod
    def log_probabilities(self, n: int) -> np.ndarray:
        """Natural-log probabilities of all |X|^n strings in lexicographic order."""

    @abstractmethod
    def log_probability_batch(self, X: np.ndarray) -> np.ndarray:
        """Natural-log probabilities of each row of a (trials, n) array."""

    @abstractmethod
    def sample_with(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw one length-n string with a caller-owned generator."""

    @abstractmethod
    def sample_batch_with(self, rng: np.random.Generator, n: int, trials: int) -> np.ndarray:
        """Draw a (trials, n) block of independent strings."""

    def iid_components(self) -> Optional[List[Tuple[float, Any]]]:
        """
        Flatten into (weight, i.i.d. source) pairs when possible.

        Returns:
            List of pairs, or None if a Markov component is involved
        """
        return None

    # -- public operations --

    def validate_string(self, x: Sequence[int]) -> Tuple[int, ...]:
        x = tuple(int(s) for s in x)
        if len(x) == 0:
            raise InvalidInputError("source strings must have length >= 1")
        bad = [s for s in x if s < 0 or s >= self._alphabet_size]
        if bad:
            raise InvalidInputError(f"source symbols {bad[:5]} outside 0..{self._alphabet_size - 1}")
        return x

    def probability_exact(self, x: Sequence[int]) -> Fraction:
        """Exact P_{X^n}(x) as a rational."""
        x = self.validate_string(x)
        state = self.root_state()
        for symbol in x:
            state = self.extend(state, symbol)
        return self.state_mass(state)

    def probability(self, x: Sequence[int]) -> float:
        return float(self.probability_exact(x))

    def prefix_probability(self, prefix: Sequence[int]) -> Fraction:
        """Marginal probability that a block starts with ``prefix``."""
        state = self.root_state()
        for symbol in prefix:
            state = self.extend(state, int(symbol))
        return self.state_mass(state)

    def log_probability(self, x: Sequence[int], base: Optional[float] = None) -> float:
        """
        log P_{X^n}(x) without underflow.

        Args:
            x: Source string
            base: Logarithm base (natural log when None)
        """
        x = self.validate_string(x)
        value = float(self.log_probability_batch(np.asarray([x], dtype=np.int64))[0])
        return value / math.log(base) if base else value

    def cumulative_interval(self, x: Sequence[int]) -> Tuple[Fraction, Fraction]:
        """
        Exact source interval [F(x), F(x) + P(x)) under lexicographic order.

        F(x) is the total probability of the length-n strings that precede x.
        """
        x = self.validate_string(x)
        state = self.root_state()
        lower = Fraction(0)
        for symbol in x:
            masses = self.children_masses(state)
            lower += sum(masses[:symbol], Fraction(0))
            state = self.extend(state, symbol)
        return lower, self.state_mass(state)

    def enumerate(self, n: int, budget: int = DEFAULT_ENUMERATION_BUDGET,
                  exact: bool = False) -> Iterator[Tuple[Tuple[int, ...], Probability]]:
        """
        Yield every length-n string once with its probability.

        Args:
            n: Block length
            budget: Largest |X|^n that may be enumerated
            exact: Yield Fractions instead of floats

        Raises:
            EnumerationTooLargeError: If |X|^n exceeds the budget
        """
        check_budget(self._alphabet_size, n, budget)
        if exact:
            return self._enumerate_exact(n)
        return self._enumerate_float(n)

    def _enumerate_float(self, n: int) -> Iterator[Tuple[Tuple[int, ...], float]]:
        strings = itertools.product(range(self._alphabet_size), repeat=n)
        probs = np.exp(self.log_probabilities(n))
        for x, p in zip(strings, probs):
            yield x, float(p)

    def _enumerate_exact(self, n: int) -> Iterator[Tuple[Tuple[int, ...], Fraction]]:
        # depth-first over the prefix tree, lexicographic order
        stack = [((), self.root_state())]
        while stack:
            prefix, state = stack.pop()
            if len(prefix) == n:
                yield prefix, self.state_mass(state)
                continue
            for symbol in reversed(range(self._alphabet_size)):
                stack.append((prefix + (symbol,), self.extend(state, symbol)))

    def sample(self, n: int, seed: int) -> np.ndarray:
        """
        Draw one length-n string; identical output for identical seeds.

        Args:
            n: Block length (>= 1)
            seed: Seed of a fresh PCG64 generator
        """
        if n < 1:
            raise InvalidInputError(f"block length must be >= 1, got {n}")
        return self.sample_with(np.random.default_rng(seed), n)

    def sample_batch(self, n: int, trials: int, seed: int) -> np.ndarray:
        if n < 1 or trials < 1:
            raise InvalidInputError(f"need n >= 1 and trials >= 1, got n={n}, trials={trials}")
        return self.sample_batch_with(np.random.default_rng(seed), n, trials)

    def sample_self_information(self, n: int, trials: int, seed: int, base: float = 2) -> np.ndarray:
        """
        Self-information -log_base P_{X^n}(X^n) of independently drawn strings.

        Sources made of i.i.d. pieces only draw type counts (multinomial),
        others simulate whole strings in memory-bounded chunks.
        """
        if n < 1 or trials < 1:
            raise InvalidInputError(f"need n >= 1 and trials >= 1, got n={n}, trials={trials}")
        rng = np.random.default_rng(seed)
        components = self.iid_components()
        if components is not None:
            from overflow_core.sources.statistics import sample_type_counts, type_log_probability
            counts = sample_type_counts(rng, components, n, trials)
            return -type_log_probability(counts, components) / math.log(base)

        chunk = max(1, SAMPLE_CHUNK_CELLS // n)
        out = np.empty(trials)
        for start in range(0, trials, chunk):
            stop = min(trials, start + chunk)
            X = self.sample_batch_with(rng, n, stop - start)
            out[start:stop] = -self.log_probability_batch(X)
        return out / math.log(base)
