"""
Constants and default configuration values for the matrix-mech toolkit.
"""

# Version information
VERSION = "1.0.0"
TOOL_DESCRIPTION = "Dynamic mechanisms with interdependent valuations"

# Solver defaults
DEFAULT_SOLVER_TOLERANCE = 1e-9
DEFAULT_ITERATION_CAP = 1_000_000

# Canonically-first allocation wins among candidates this close to the maximum
TIE_TOLERANCE = 1e-12

# Incentive checks are looser than the solver
DEFAULT_CHECK_TOLERANCE = 1e-7

# Stage-2 gaps must match g to this fraction of g when g is large
STRICTNESS_RELATIVE_TOLERANCE = 1e-9

# Truthful utility computed two ways (W - W_-i and policy evaluation)
IDENTITY_TOLERANCE = 4e-9

# Stage-2 deviation grid: consistent value + k * step, k in -GRID_STEPS..GRID_STEPS
DEFAULT_GRID_STEPS = 5

# Transition rows
ROW_SUM_REJECT_TOLERANCE = 1e-9
ROW_SUM_STORE_TOLERANCE = 1e-12

# Monte-Carlo defaults
DEFAULT_TRUNCATION_TARGET = 1e-3
DEFAULT_EPISODES = 1000
DEFAULT_SEED = 42
MAX_DEFAULT_HORIZON = 10_000

# DPM counterexample search
DPM_SEARCH_BUDGET = 1000
DPM_GAIN_THRESHOLD = 1e-6
MATRIX_GAIN_THRESHOLD = 1e-7
DPM_SEARCH_AGENTS = (2, 3)
DPM_SEARCH_TYPE_SIZE = 2

# Random scenario generator
RANDOM_VALUE_RANGE = (-1.0, 1.0)
RANDOM_VALUE_DECIMALS = 3
RANDOM_DELTA_RANGE = (0.3, 0.9)

# Desk-scale limits (joint profiles, agents)
MAX_JOINT_PROFILES = 10_000
MAX_AGENTS = 10

# Built-in penalties g(x, l)
PENALTY_KINDS = ('quadratic', 'absolute', 'scaled')
DEFAULT_PENALTY = 'quadratic'

# Mechanisms
MECHANISMS = ('matrix', 'dpm', 'const')
DEFAULT_MECHANISM = 'matrix'
DEFAULT_FIXED_PRICE = 1.0

# Agent roles (CONST baseline)
ROLE_OWNER = 'owner'
ROLE_WORKER = 'worker'

# Scenario file grammar
SCENARIO_SECTIONS = ('agents', 'types', 'valuations', 'transitions', 'params')
SCENARIO_PARAM_KEYS = ('name', 'delta', 'penalty', 'bound', 'fixed_price')
TRANSITION_SHORTHANDS = ('selected', 'unselected')

# Task-outsourcing example: type labels and numeric codes
OUTSOURCING_TYPES = (('H', 1.0), ('M', 0.7), ('L', 0.4))

# CSV output: 17 significant digits round-trips a double exactly
FLOAT_FORMAT = '.17g'

FILE_NAMES = {
    'WELFARE': 'welfare.csv',
    'MARGINAL': 'marginal_welfare_{agent}.csv',
    'POLICY': 'policy.csv',
    'CONVERGENCE': 'convergence.csv',
    'TRAJECTORY': 'trajectory.csv',
    'UTILITY': 'utility_estimates.csv',
    'VERDICTS': 'verdicts.csv',
    'COMPARISON': 'comparison.csv',
    'BUDGET': 'budget.csv',
    'WITNESS': 'dpm_witness.scenario',
}

SCENARIO_SUFFIX = '.scenario'

# Exit codes
EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NON_CONVERGENCE = 2
EXIT_PROPERTY_FAILED = 3

# CLI symbols
CLI_SYMBOLS = {
    'SUCCESS': '✅',
    'WARNING': '⚠️',
    'ERROR': '❌',
    'PROCESSING': '🔄',
    'QUALITY': '📊',
    'REPORT': '📋',
}
