"""
Standard Gaussian CDF and quantile
"""
import math

from scipy.stats import norm

from overflow_core.errors import InvalidInputError


def gaussian_cdf(T: float) -> float:
    """Phi(T) = integral_{-inf}^{T} e^(-y^2/2) / sqrt(2 pi) dy."""
    return float(norm.cdf(T))


def gaussian_quantile(p: float) -> float:
    """
    Phi^-1(p), refined by one Newton step against gaussian_cdf.

    The step works on the lower tail below 1/2 and on the upper tail above
    it so the residual keeps full relative precision near 0 and 1.

    Raises:
        InvalidInputError: If p is not strictly between 0 and 1
    """
    if not (0.0 < p < 1.0) or math.isnan(p):
        raise InvalidInputError(f"gaussian quantile is defined on (0, 1), got {p}")
    x = float(norm.ppf(p))
    density = float(norm.pdf(x))
    if density == 0.0:
        return x
    if p <= 0.5:
        residual = float(norm.cdf(x)) - p
    else:
        residual = (1.0 - p) - float(norm.sf(x))
    return x - residual / density
