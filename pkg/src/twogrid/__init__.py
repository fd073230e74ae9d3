"""Two-level preconditioning with closed-form relaxation schedules.

The package builds 2x2 block partitions of invertible matrices, the
ideal two-level components derived from them, and the relaxation
schedules that collapse the preconditioned spectrum to two points.
Problem builders cover finite-difference, discontinuous Galerkin and
nonsymmetric random test matrices; the CLI exposes every experiment as
a reproducible run.
"""

from .linalg import (
    FovBoundary,
    GmresOutcome,
    LuFactors,
    NoConvergenceError,
    NotHermitianError,
    SingularMatrixError,
    eigenvalues,
    fov_boundary,
    gmres,
    hermitian_extreme_eig,
    hull_distance,
    kron,
    lu_factor,
    lu_solve,
    materialize,
)
from .relaxation import (
    DegenerateXError,
    InvalidMError,
    RelaxationSchedule,
    ResponseSample,
    clustered_eigenvalue,
    constant_schedule,
    scalar_response_closed,
    scalar_response_oracle,
    schedule_from_alphas,
    theorem_schedule,
    trig_identity_check,
)
from .twolevel import (
    BlockSystem,
    CoarsePolicy,
    CouplingAnalysis,
    CycleConfig,
    DiagnosabilityWarning,
    InvalidPartitionError,
    RecursionDepthError,
    SingularBlockError,
    SpectralReport,
    TwoLevelComponents,
    coarse_error,
    coupling_analysis,
    error_operator,
    exact_components,
    invariant_check,
    preconditioned_spectrum,
    smoother_error,
    split,
    two_block_inverse_apply,
    unsplit,
    vcycle_apply,
)

__all__ = [name for name in dir() if not name.startswith("_")]
