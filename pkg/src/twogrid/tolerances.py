"""Default numerical tolerances, collected in one place.

Every magic threshold used by the solvers lives here so that the test
suite and the CLI agree on what "verified" means.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Package-wide tolerance defaults.

    Attributes
    ----------
    lu_pivot_rel : float
        A pivot below this fraction of the inf-norm of the matrix is
        treated as a singularity.
    hermitian_rel : float
        Allowed relative asymmetry for matrices passed to the Hermitian
        eigensolver.
    jacobi_offdiag_rel : float
        Target relative off-diagonal Frobenius norm for the cyclic
        Jacobi diagonalization.
    gmres_breakdown : float
        Arnoldi vectors below this norm (relative to the first residual)
        terminate the Krylov recurrence.
    exact_identity_rel : float
        Budget for internal algebraic identities (Galerkin coarse
        operator versus the Schur complement, projector form of the
        coarse error operator).
    eig_residual_rel : float
        Accepted relative residual for coupling-operator eigenpairs.
    diagonalizability_cond : float
        Eigenvector condition number above which a system is flagged
        as numerically non-diagonalizable.
    cluster_deviation : float
        Library-level verification threshold for two-point clustering.
    cli_cluster_deviation : float
        CLI-level clustering threshold, slightly looser to absorb
        eigensolver variance on the largest desk-scale operators.
    """

    lu_pivot_rel: float = 1e-14
    hermitian_rel: float = 1e-12
    jacobi_offdiag_rel: float = 1e-12
    gmres_breakdown: float = 1e-14
    exact_identity_rel: float = 1e-10
    eig_residual_rel: float = 1e-8
    diagonalizability_cond: float = 1e8
    cluster_deviation: float = 1e-8
    cli_cluster_deviation: float = 1e-7


DEFAULT = Tolerances()
