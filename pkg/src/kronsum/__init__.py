"""Direct solvers for linear systems built from Kronecker sums of 2 or 3 factors."""
from .errors import (
    CapacityError,
    ConvergenceError,
    DimensionError,
    KronSumError,
    PreconditionError,
    SingularityError,
    SingularMatrixError,
    UndefinedMetricError,
)
from .oracle import DenseLU, lu_factor, lu_solve, oracle_solve_kron
from .pde import (
    ConvDiffProblem,
    Grid1D,
    PoissonProblem,
    fromm_factor,
    laplacian_1d,
    relative_error,
    solve_convdiff_2d,
    solve_poisson_2d,
    solve_poisson_3d,
)
from .solve import (
    EigKronSolver,
    SchurKronSolver,
    Solvability,
    SolveOptions,
    SolveReport,
    build_cauchy,
    nilpotency_bound,
    solvability_check,
    solve_general_2d,
    solve_general_3d,
    solve_normal_2d,
    solve_normal_3d,
)
from .spectral import (
    EigenDecomposition,
    SchurDecomposition,
    closed_form_laplacian_eig,
    complex_schur,
    hermitian_eig,
)
from .tensor import (
    apply_kron_sum,
    hadamard,
    kronecker_product,
    kronecker_sum,
    kronecker_sum2,
    kronecker_sum3,
    mode_product,
    outer_product,
    unvec,
    unvec_tensor,
    vec,
    vec_matrix,
    vec_tensor,
)

__version__ = "0.1.0"
