"""
Centralized configuration for the uncertainty toolkit.
"""

# --- Numerical Tolerances ---
TOL_HERM = 1e-12  # max |M - M^dagger| entrywise for Hermitian inputs
TOL_PSD = 1e-9  # eigenvalue slack for positive semi-definiteness
TOL_INEQ = 1e-9  # absolute slack on inequality margins
TOL_IMAG = 1e-10  # imaginary residue allowed on real expectation values
TOL_NORM = 1e-12  # pure-state normalization
TOL_MIXED_EIG = 1e-10  # most negative eigenvalue accepted in a density matrix
TOL_SYM = 1e-10  # symmetry / antisymmetry of X and Y
TOL_TAIL = 1e-8  # Fock truncation weight left in the top levels

# --- Physical Defaults ---
DEFAULT_HBAR = 1.0
MAX_TUPLE_SIZE = 8
DEFAULT_FOCK_DIM = 40
FOCK_TAIL_LEVELS = 8  # top levels inspected by the truncation check

# --- Search Configuration ---
SEARCH_MIN_STARTS = 32  # low-discrepancy grid never smaller than this
SEARCH_STARTS = 64
SEARCH_RESTARTS = 8  # local descents launched from the best grid points
SEARCH_MAX_EVALUATIONS = 20000
SEARCH_SIMPLEX_TOL = 1e-8
SEARCH_RATIO_FLOOR = 1e-12  # rhs below this makes the ratio objective +inf
SWEEP_MAX_POINTS = 1_000_000

# --- Output Configuration ---
SIGNIFICANT_DIGITS = 12
VERBOSE = False

# --- CLI Exit Codes ---
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VIOLATION = 2  # a correct inequality failed: numerical red flag
EXIT_SELF_TEST_FAILED = 3

# --- Counterexample Reproduction ---
COUNTEREXAMPLE_SIGMA = 0.5773502691896258  # 1/sqrt(3), units of hbar
COUNTEREXAMPLE_R = -0.5
COUNTEREXAMPLE_RATIO = 2.25
COUNTEREXAMPLE_TOL = 1e-9
COUNTEREXAMPLE_FOCK_TOL = 1e-6

# --- Console Colors ---
GRAY = "\033[90m"
RESET = "\033[0m"
CYAN = "\033[36m"
GREEN = "\033[32m"
YELLOW = "\033[33m"
