"""
Closed-form reference values used across the suite
"""
import math

# log2 of the golden ratio: root of y + y^2 = 1 with y = 2^-alpha
GOLDEN_ALPHA = math.log2((1 + math.sqrt(5)) / 2)
H_QUARTER = 0.811278124459133
SIGMA2_QUARTER = 0.1875 * math.log2(3) ** 2
H_TENTH = 0.468995593589281
H_FOUR_TENTHS = 0.970950594454669
