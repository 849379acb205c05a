"""Numerical tolerances shared across the package."""

HERMITICITY_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-10
EQUALITY_TOL = 1e-9

# Pairs of eigenvalues with q_n + q_m below this are dropped from the QFI sum.
QFI_CUTOFF = 1e-12
# An order is considered populated when its intensity exceeds this.
MQI_EPS = 1e-12
# Trace / positivity slack when validating user supplied states.
STATE_TOL = 1e-8

# Multiply the QFI returned here by this to get the 4*Var(H) convention.
GHR_QFI_FACTOR = 4.0

JACOBI_MAX_SWEEPS = 100
MAX_QUBITS = 10
