"""
Information-spectrum curves, overflow thresholds and Gaussian numerics
"""
from overflow_core.spectrum.curves import (
    CURVE_COLUMNS,
    SpectrumCurve,
    curves_to_frame,
    spectrum_first_order,
    spectrum_second_order,
)
from overflow_core.spectrum.gaussian import gaussian_cdf, gaussian_quantile
from overflow_core.spectrum.thresholds import (
    DEFAULT_N_SCHEDULE,
    THRESHOLD_COLUMNS,
    EntropyRateEstimate,
    ThresholdEstimate,
    analytic_first_order_threshold,
    analytic_sup_entropy_rate,
    bracket_crossing,
    sup_entropy_rate_estimate,
    threshold_first_order,
    threshold_second_order,
    threshold_second_order_iid,
    thresholds_to_frame,
)

__all__ = [
    "CURVE_COLUMNS",
    "DEFAULT_N_SCHEDULE",
    "EntropyRateEstimate",
    "SpectrumCurve",
    "THRESHOLD_COLUMNS",
    "ThresholdEstimate",
    "analytic_first_order_threshold",
    "analytic_sup_entropy_rate",
    "bracket_crossing",
    "curves_to_frame",
    "gaussian_cdf",
    "gaussian_quantile",
    "spectrum_first_order",
    "spectrum_second_order",
    "sup_entropy_rate_estimate",
    "threshold_first_order",
    "threshold_second_order",
    "threshold_second_order_iid",
    "thresholds_to_frame",
]
