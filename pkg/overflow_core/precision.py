"""
High-precision helpers shared by the coder and the bound evaluators
"""
import threading
from fractions import Fraction
from typing import Union

from mpmath.ctx_mp import MPContext

DEFAULT_WORKING_DIGITS = 50
# dyadic resolution of the channel probabilities handed to the exact interval coder
CHANNEL_BITS = 160

_local = threading.local()


def get_context(dps: int = DEFAULT_WORKING_DIGITS) -> MPContext:
    """
    Thread-local mpmath context with ``dps`` decimal digits.

    Each thread owns its contexts, so precision settings never leak
    between concurrent sweeps.
    """
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(dps)
    if ctx is None:
        ctx = MPContext()
        ctx.dps = dps
        cache[dps] = ctx
    return ctx


def to_mpf(ctx: MPContext, value: Union[int, float, Fraction]):
    """Exact conversion of ints, floats and rationals into ``ctx``."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def power_exact(K: int, alpha: float, cost: Fraction):
    """
    K^(-alpha * cost) as an exact Fraction when alpha * cost is an integer.

    Returns:
        Fraction or None
    """
    exponent = Fraction(alpha) * cost
    if exponent.denominator == 1 and exponent >= 0:
        return Fraction(1, K ** exponent.numerator)
    return None


def upper_dyadic(ctx: MPContext, value, bits: int = CHANNEL_BITS) -> Fraction:
    """Dyadic rational >= value with denominator 2^bits."""
    scaled = value * ctx.mpf(2) ** bits
    return Fraction(int(ctx.ceil(scaled)) + 1, 2 ** bits)
