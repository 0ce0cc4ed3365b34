"""
Concrete source models: i.i.d., Markov and finite mixtures of block distributions
"""
import json
import logging
import math
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import entr, logsumexp

from overflow_core.costs.cost_function import to_fraction
from overflow_core.errors import InvalidInputError
from overflow_core.sources.base import SUM_TOLERANCE, SourceModel

logger = logging.getLogger("overflow_core.sources")


def _exact_distribution(values: Sequence[Any], what: str) -> Tuple[Fraction, ...]:
    """Validate a probability vector and renormalize it exactly."""
    exact = tuple(to_fraction(v) for v in values)
    if len(exact) == 0:
        raise InvalidInputError(f"{what} is empty")
    if any(p < 0 or p > 1 for p in exact):
        raise InvalidInputError(f"{what} has entries outside [0, 1]: {list(values)}")
    total = sum(exact, Fraction(0))
    if abs(total - 1) > Fraction(SUM_TOLERANCE):
        raise InvalidInputError(f"{what} sums to {float(total)!r}, not 1")
    return tuple(p / total for p in exact)


def _safe_log(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def _cumulative(rows: np.ndarray) -> np.ndarray:
    """Row-wise cumulative sums, pinned to 1.0 from the last positive-mass symbol on."""
    rows = np.asarray(rows, dtype=float)
    cum = np.cumsum(rows, axis=-1)
    K = rows.shape[-1]
    last = K - 1 - np.argmax(rows[..., ::-1] > 0, axis=-1)
    cum[np.arange(K) >= np.expand_dims(last, -1)] = 1.0
    return cum


def _draw(cum_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    # index of the first cumulative entry above u; zero-mass symbols are never hit
    return np.minimum((cum_rows <= u[..., None]).sum(axis=-1), cum_rows.shape[-1] - 1)


class IIDSource(SourceModel):
    """
    Memoryless source: P(x) = prod_i p(x_i).
    """

    def __init__(self, pmf: Sequence[Any]):
        """
        Args:
            pmf: Symbol probabilities (decimal literals stay exact)
        """
        exact = _exact_distribution(pmf, "pmf")
        super().__init__(len(exact))
        self._pmf_exact = exact
        self._pmf = np.array([float(p) for p in exact])
        self._log_pmf = _safe_log(self._pmf)
        self._cum = _cumulative(self._pmf)

    @property
    def kind(self) -> str:
        return "iid"

    @property
    def pmf(self) -> np.ndarray:
        return self._pmf.copy()

    @property
    def pmf_exact(self) -> Tuple[Fraction, ...]:
        return self._pmf_exact

    def root_state(self) -> Fraction:
        return Fraction(1)

    def extend(self, state: Fraction, symbol: int) -> Fraction:
        return state * self._pmf_exact[symbol]

    def state_mass(self, state: Fraction) -> Fraction:
        return state

    def children_masses(self, state: Fraction) -> List[Fraction]:
        return [state * p for p in self._pmf_exact]

    def log_probabilities(self, n: int) -> np.ndarray:
        out = self._log_pmf.copy()
        for _ in range(n - 1):
            out = (out[:, None] + self._log_pmf[None, :]).ravel()
        return out

    def log_probability_batch(self, X: np.ndarray) -> np.ndarray:
        return self._log_pmf[X].sum(axis=1)

    def sample_with(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return _draw(self._cum, rng.random(n))

    def sample_batch_with(self, rng: np.random.Generator, n: int, trials: int) -> np.ndarray:
        return _draw(self._cum, rng.random((trials, n)))

    def iid_components(self) -> List[Tuple[float, "IIDSource"]]:
        return [(1.0, self)]

    def entropy_rate(self, base: float = 2) -> float:
        return float(entr(self._pmf).sum() / math.log(base))

    def __repr__(self) -> str:
        return f"IIDSource(pmf={[float(p) for p in self._pmf_exact]})"


class MarkovSource(SourceModel):
    """
    First-order Markov chain with an explicit initial distribution.
    """

    def __init__(self, initial: Sequence[Any], transition: Sequence[Sequence[Any]]):
        """
        Args:
            initial: Distribution of the first symbol
            transition: Row-stochastic matrix, transition[a][b] = P(b | a)
        """
        init = _exact_distribution(initial, "initial distribution")
        k = len(init)
        if len(transition) != k:
            raise InvalidInputError(f"transition matrix has {len(transition)} rows, expected {k}")
        rows = []
        for a, row in enumerate(transition):
            if len(row) != k:
                raise InvalidInputError(f"transition row {a} has {len(row)} entries, expected {k}")
            rows.append(_exact_distribution(row, f"transition row {a}"))
        super().__init__(k)
        self._init_exact = init
        self._rows_exact = tuple(rows)
        self._init = np.array([float(p) for p in init])
        self._T = np.array([[float(p) for p in row] for row in rows])
        self._log_init = _safe_log(self._init)
        self._log_T = _safe_log(self._T)
        self._cum_init = _cumulative(self._init)
        self._cum_T = _cumulative(self._T)

    @property
    def kind(self) -> str:
        return "markov"

    @property
    def initial(self) -> np.ndarray:
        return self._init.copy()

    @property
    def transition(self) -> np.ndarray:
        return self._T.copy()

    def root_state(self) -> Tuple[Fraction, Optional[int]]:
        return Fraction(1), None

    def _row(self, last: Optional[int]) -> Tuple[Fraction, ...]:
        return self._init_exact if last is None else self._rows_exact[last]

    def extend(self, state, symbol: int):
        mass, last = state
        return mass * self._row(last)[symbol], symbol

    def state_mass(self, state) -> Fraction:
        return state[0]

    def children_masses(self, state) -> List[Fraction]:
        mass, last = state
        return [mass * p for p in self._row(last)]

    def log_probabilities(self, n: int) -> np.ndarray:
        k = self._alphabet_size
        out = self._log_init.copy()
        last = np.arange(k)
        for _ in range(n - 1):
            out = (out[:, None] + self._log_T[last]).ravel()
            last = np.tile(np.arange(k), len(last))
        return out

    def log_probability_batch(self, X: np.ndarray) -> np.ndarray:
        out = self._log_init[X[:, 0]]
        if X.shape[1] > 1:
            out = out + self._log_T[X[:, :-1], X[:, 1:]].sum(axis=1)
        return out

    def sample_with(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.sample_batch_with(rng, n, 1)[0]

    def sample_batch_with(self, rng: np.random.Generator, n: int, trials: int) -> np.ndarray:
        X = np.empty((trials, n), dtype=np.int64)
        X[:, 0] = _draw(self._cum_init, rng.random(trials))
        for i in range(1, n):
            X[:, i] = _draw(self._cum_T[X[:, i - 1]], rng.random(trials))
        return X

    def entropy_rate(self, base: float = 2) -> Optional[float]:
        """
        Entropy rate of an irreducible chain, None when the chain is reducible.
        """
        k = self._alphabet_size
        n_components, _ = connected_components(csr_matrix(self._T > 0), directed=True, connection="strong")
        if n_components != 1:
            return None
        A = np.vstack([self._T.T - np.eye(k), np.ones((1, k))])
        b = np.concatenate([np.zeros(k), [1.0]])
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
        return float(pi @ entr(self._T).sum(axis=1) / math.log(base))

    def __repr__(self) -> str:
        return f"MarkovSource(initial={self._init.tolist()}, transition={self._T.tolist()})"


class MixtureSource(SourceModel):
    """
    Finite mixture of block distributions: one component is drawn per string.
    """

    def __init__(self, components: Sequence[Tuple[Any, SourceModel]]):
        """
        Args:
            components: (weight, source) pairs over a common alphabet
        """
        if len(components) == 0:
            raise InvalidInputError("mixture needs at least one component")
        weights = _exact_distribution([w for w, _ in components], "mixture weights")
        sizes = {src.alphabet_size for _, src in components}
        if len(sizes) != 1:
            raise InvalidInputError(f"mixture components use different alphabets: {sorted(sizes)}")
        super().__init__(sizes.pop())
        self._weights_exact = weights
        self._weights = np.array([float(w) for w in weights])
        self._log_weights = _safe_log(self._weights)
        self._components = tuple(src for _, src in components)

    @property
    def kind(self) -> str:
        return "mixture"

    @property
    def weights(self) -> np.ndarray:
        return self._weights.copy()

    @property
    def components(self) -> Tuple[SourceModel, ...]:
        return self._components

    def root_state(self):
        return tuple(c.root_state() for c in self._components)

    def extend(self, state, symbol: int):
        return tuple(c.extend(s, symbol) for c, s in zip(self._components, state))

    def state_mass(self, state) -> Fraction:
        return sum((w * c.state_mass(s) for w, c, s in zip(self._weights_exact, self._components, state)), Fraction(0))

    def children_masses(self, state) -> List[Fraction]:
        totals = [Fraction(0)] * self._alphabet_size
        for w, c, s in zip(self._weights_exact, self._components, state):
            if w == 0:
                continue
            for a, m in enumerate(c.children_masses(s)):
                totals[a] += w * m
        return totals

    def log_probabilities(self, n: int) -> np.ndarray:
        stacked = np.stack([lw + c.log_probabilities(n) for lw, c in zip(self._log_weights, self._components)])
        with np.errstate(divide="ignore"):
            return logsumexp(stacked, axis=0)

    def log_probability_batch(self, X: np.ndarray) -> np.ndarray:
        stacked = np.stack([lw + c.log_probability_batch(X) for lw, c in zip(self._log_weights, self._components)])
        with np.errstate(divide="ignore"):
            return logsumexp(stacked, axis=0)

    def sample_with(self, rng: np.random.Generator, n: int) -> np.ndarray:
        index = int(rng.choice(len(self._components), p=self._weights))
        return self._components[index].sample_with(rng, n)

    def sample_batch_with(self, rng: np.random.Generator, n: int, trials: int) -> np.ndarray:
        picks = rng.choice(len(self._components), size=trials, p=self._weights)
        X = np.empty((trials, n), dtype=np.int64)
        for index, component in enumerate(self._components):
            rows = picks == index
            count = int(rows.sum())
            if count:
                X[rows] = component.sample_batch_with(rng, n, count)
        return X

    def iid_components(self) -> Optional[List[Tuple[float, IIDSource]]]:
        flat = []
        for w, component in zip(self._weights, self._components):
            inner = component.iid_components()
            if inner is None:
                return None
            flat.extend((float(w) * v, src) for v, src in inner)
        return flat

    def component_rates(self, base: float = 2) -> List[Tuple[float, Optional[float]]]:
        """(weight, entropy rate) per component; None where no rate exists."""
        rates = []
        for w, component in zip(self._weights, self._components):
            if isinstance(component, MixtureSource):
                rates.extend((float(w) * v, r) for v, r in component.component_rates(base))
            else:
                rates.append((float(w), component.entropy_rate(base)))
        return rates

    def __repr__(self) -> str:
        parts = ", ".join(f"{float(w):g}: {c!r}" for w, c in zip(self._weights_exact, self._components))
        return f"MixtureSource({{{parts}}})"


def source_from_mapping(data: Mapping[str, Any]) -> SourceModel:
    """
    Build a source from the key-value config layout.

    Args:
        data: {"type": "iid", "pmf": [...]} |
              {"type": "markov", "initial": [...], "transition": [[...], ...]} |
              {"type": "mixture", "components": [{"weight": w, "source": {...}}, ...]}
    """
    kind = str(data.get("type", "")).lower()
    try:
        if kind == "iid":
            return IIDSource(data["pmf"])
        if kind == "markov":
            return MarkovSource(data["initial"], data["transition"])
        if kind == "mixture":
            return MixtureSource([(c["weight"], source_from_mapping(c["source"])) for c in data["components"]])
    except (KeyError, TypeError) as e:
        raise InvalidInputError(f"malformed '{kind}' source config: {e}") from e
    raise InvalidInputError(f"unknown source type {data.get('type')!r}; expected iid, markov or mixture")


def load_source_model(source: Union[str, Path, Mapping[str, Any]]) -> SourceModel:
    """Load a source from a JSON file (top-level or under 'source') or a mapping."""
    if isinstance(source, Mapping):
        return source_from_mapping(source)
    path = Path(source)
    try:
        data = json.loads(path.read_text(encoding="utf-8"), parse_float=Decimal)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read source config {path}: {e}") from e
    model = source_from_mapping(data.get("source", data))
    logger.info(f"Loaded {model!r} from {path}")
    return model
