"""
Overflow probability of codeword cost and its achievability/converse bounds
"""
from overflow_core.overflow.bounds import (
    EXTRA_COLUMNS,
    REPORT_COLUMNS,
    BoundReport,
    BoundValue,
    SpectralMass,
    evaluate_point,
    lemma1_rhs,
    lemma1_tight_rhs,
    lemma1_value,
    lemma2_rhs,
    lemma2_value,
    raise_on_violation,
    reports_to_frame,
    spectral_mass,
    verify_bounds,
)
from overflow_core.overflow.measure import (
    OverflowEstimate,
    OverflowSandwich,
    first_order_overflow,
    overflow_exact,
    overflow_length_exact,
    overflow_mass,
    overflow_mc,
    overflow_sandwich,
    second_order_overflow,
)
from overflow_core.overflow.schedule import ThresholdSchedule, ZRule

__all__ = [
    "BoundReport",
    "BoundValue",
    "EXTRA_COLUMNS",
    "OverflowEstimate",
    "OverflowSandwich",
    "REPORT_COLUMNS",
    "SpectralMass",
    "ThresholdSchedule",
    "ZRule",
    "evaluate_point",
    "first_order_overflow",
    "lemma1_rhs",
    "lemma1_tight_rhs",
    "lemma1_value",
    "lemma2_rhs",
    "lemma2_value",
    "overflow_exact",
    "overflow_length_exact",
    "overflow_mass",
    "overflow_mc",
    "overflow_sandwich",
    "raise_on_violation",
    "reports_to_frame",
    "second_order_overflow",
    "spectral_mass",
    "verify_bounds",
]
