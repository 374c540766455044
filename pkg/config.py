"""
Configuration file for the Newton polyhedra / oscillatory integral toolkit
Contains all constant values, numeric tolerances and environment overrides
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Toolkit name and version
NAME = "newton-osc"
VERSION = "1.1.0"

# Logging
LOG_LEVEL = os.getenv("NEWTON_OSC_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("NEWTON_OSC_LOG_FILE", "newton_osc.log")

# Exact geometry limits
MAX_DIMENSION = 4  # supported ambient dimension n
MAX_GENERATORS = 64  # generators per polyhedron
MAX_RATIONAL_BITS = 4096  # numerator/denominator size before Overflow is raised

# Fan machine
UNIMODULAR_SUBDIVISION_CAP = 10**6  # stellar subdivisions before giving up

# Nondegeneracy sampling (n >= 3)
NONDEG_GRID_SIZE = 41  # log-spaced magnitudes per axis
NONDEG_LOG_RANGE = (-3.0, 3.0)  # decades covered by the grid
NONDEG_NEWTON_STEPS = 20
NONDEG_THRESHOLD = 1e-10  # |grad f_gamma| below this is a critical point
NONDEG_CANDIDATES = 12  # best grid points handed to the Newton refinement

# Sign verdicts
SIGN_SAMPLES_PER_ORTHANT = 10**4
SIGN_LOG_RANGE = (-3.0, 3.0)
SIGN_LOCAL_LOG_RANGE = (-3.0, -0.5)  # magnitudes for sign tests on a neighbourhood of 0

# Arbitrary precision for Gamma and phase factors
MPMATH_DIGITS = 50

# Quadrature
QUAD_BUDGET = int(os.getenv("NEWTON_OSC_QUAD_BUDGET", "20000000"))  # integrand evaluations per call
GAUSS_ORDER = 16  # nodes per panel
PHASE_VARIATION_SWITCH = 20.0  # t * phase variation above which panels use the Filon rule
OSC_RELATIVE_TOL = 1e-8  # absolute error target relative to the integral of |g phi|
OSC_MAX_DEPTH = 40  # panel bisection depth
ZETA_PANELS = 8  # geometrically graded panels per chart axis below the uniform part
ZETA_UNIFORM_PANELS = 8  # uniform panels on [1/8, 1]
ZETA_GRADING = 0.3  # ratio between consecutive panels towards y = 0
ZETA_GAUSS_ORDER = (16, 12, 8)  # nodes per panel for n = 1, 2, 3
FILON_NEWTON_STEPS = 40  # phase inversion steps on Filon panels
OSC_OUTER_LIMIT = 2000  # subintervals of the outer adaptive integral
SIGMA_AGREEMENT = 0.01  # relative spread allowed between charts of one orbit
CHART_INTEGRAL_PANELS = 24  # panels of the unbounded chart integrals
DEFAULT_BUMP_RADIUS = 0.5

# Fitting
FIT_RESIDUAL_THRESHOLD = 0.05  # relative residual above which a fit is flagged poor
FIT_CONDITION_LIMIT = 1e6  # conditioning above which the log power is indeterminate
DECAY_EXPONENT_TOLERANCE = 0.05
MIN_POLE_SAMPLES = 8
MIN_DECAY_SAMPLES = 12

# Zeta report
NEGATIVE_INTEGER_DEPTH = 4  # how many negative integers get an order bound
ASYMPTOTIC_EXPONENT_COUNT = 8

# Reproducibility
RANDOM_SEED = 20131107
