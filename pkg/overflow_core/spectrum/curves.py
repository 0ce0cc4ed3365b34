"""
Finite-n information-spectrum curves
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from overflow_core.errors import InvalidInputError
from overflow_core.sources import DEFAULT_ENUMERATION_BUDGET, SourceModel, self_information_distribution

logger = logging.getLogger("overflow_core.spectrum")

CURVE_KINDS = ("first", "second")
CURVE_COLUMNS = ["n", "kind", "a", "abscissa", "value", "method", "trials", "seed"]
# relative tolerance for self-information atoms sitting on a threshold
TIE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    """
    Upper tail of the normalized self-information at one block length.

    first:  F_n(R) = Pr{ -log_K P(X^n) / (n alpha_c) >= R }
    second: F_n(L) = Pr{ (-log_K P(X^n) - n alpha_c a) / (sqrt(n) alpha_c) >= L }
    """
    n: int
    kind: str
    grid: np.ndarray
    values: np.ndarray
    method: str
    alpha_c: float
    a: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise InvalidInputError(f"unknown curve kind {self.kind!r}")
        if len(self.grid) != len(self.values):
            raise InvalidInputError("grid and values differ in length")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise InvalidInputError("spectrum values must lie in [0, 1]")
        if np.any(np.diff(self.values) > 1e-12):
            raise InvalidInputError("spectrum values must be non-increasing along the grid")

    def value_at(self, abscissa: float) -> float:
        """Curve value at a grid point."""
        index = int(np.searchsorted(self.grid, abscissa))
        if index >= len(self.grid) or not math.isclose(self.grid[index], abscissa, rel_tol=0, abs_tol=1e-12):
            raise InvalidInputError(f"{abscissa} is not a grid point")
        return float(self.values[index])


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidInputError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    return grid


def _info_thresholds(kind: str, grid: np.ndarray, n: int, alpha_c: float, a: Optional[float]) -> np.ndarray:
    """Map abscissas to thresholds on -log_K P(X^n)."""
    if kind == "first":
        return n * alpha_c * grid
    return n * alpha_c * a + math.sqrt(n) * alpha_c * grid


def _curve(src: SourceModel, alpha_c: float, n: int, grid: Sequence[float], kind: str, a: Optional[float],
           method: str, K: int, trials: int, seed: int, budget: int) -> SpectrumCurve:
    if not alpha_c > 0:
        raise InvalidInputError(f"cost capacity must be positive, got {alpha_c}")
    grid = _check_grid(grid)
    thresholds = _info_thresholds(kind, grid, n, alpha_c, a)
    if method == "exact":
        law = self_information_distribution(src, n, base=K, budget=budget)
        values = law.tail(thresholds, tol=TIE_TOL)
        return SpectrumCurve(n=n, kind=kind, grid=grid, values=values, method="exact", alpha_c=alpha_c, a=a)
    if method == "mc":
        info = np.sort(src.sample_self_information(n, trials, seed, base=K))
        cut = thresholds - TIE_TOL * np.maximum(1.0, np.abs(thresholds))
        values = 1.0 - np.searchsorted(info, cut, side="left") / trials
        logger.debug(f"MC spectrum n={n} kind={kind}: {trials} draws, seed {seed}")
        return SpectrumCurve(n=n, kind=kind, grid=grid, values=values, method="mc", alpha_c=alpha_c, a=a,
                             trials=trials, seed=seed)
    raise InvalidInputError(f"unknown method {method!r}; expected 'exact' or 'mc'")


def spectrum_first_order(src: SourceModel, alpha_c: float, n: int, grid: Sequence[float], method: str = "exact",
                         K: int = 2, trials: int = 100_000, seed: int = 0,
                         budget: int = DEFAULT_ENUMERATION_BUDGET) -> SpectrumCurve:
    """
    F_n(R) = Pr{ -log_K P(X^n) / (n alpha_c) >= R } on a grid of rates.

    Args:
        src: Source model
        alpha_c: Cost capacity
        n: Block length
        grid: Strictly increasing rates R
        method: 'exact' (type classes or enumeration) or 'mc'
        K: Code-alphabet size (logarithm base)
        trials: Monte Carlo draws
        seed: Monte Carlo seed
        budget: Atom budget for the exact law

    Returns:
        SpectrumCurve: Non-increasing values in [0, 1]
    """
    return _curve(src, alpha_c, n, grid, "first", None, method, K, trials, seed, budget)


def spectrum_second_order(src: SourceModel, alpha_c: float, a: float, n: int, grid: Sequence[float],
                          method: str = "exact", K: int = 2, trials: int = 100_000, seed: int = 0,
                          budget: int = DEFAULT_ENUMERATION_BUDGET) -> SpectrumCurve:
    """
    F_n(L) = Pr{ (-log_K P(X^n) - n alpha_c a) / (sqrt(n) alpha_c) >= L } on a grid of L.

    For binary i.i.d. sources the exact method is the binomial law of the
    ones-count, so no sampling noise enters.
    """
    return _curve(src, alpha_c, n, grid, "second", float(a), method, K, trials, seed, budget)


def curves_to_frame(curves: Sequence[SpectrumCurve]) -> pd.DataFrame:
    """One row per (curve, grid point), sorted by n then abscissa."""
    rows = []
    for curve in curves:
        for abscissa, value in zip(curve.grid, curve.values):
            rows.append({
                "n": curve.n,
                "kind": curve.kind,
                "a": curve.a,
                "abscissa": float(abscissa),
                "value": float(value),
                "method": curve.method,
                "trials": curve.trials,
                "seed": curve.seed,
            })
    frame = pd.DataFrame(rows, columns=CURVE_COLUMNS)
    return frame.sort_values(["n", "kind", "abscissa"], kind="stable").reset_index(drop=True)
