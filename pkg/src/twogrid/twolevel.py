"""Two-level block machinery: exact components, cycles and spectra.

A square system is partitioned into 2x2 blocks [[A, B], [C, D]] with
invertible diagonal blocks.  The ideal transfer operators
P = [-A^-1 B; I] and R = [-C A^-1, I] together with the block-Jacobi
smoother give a symmetric V-cycle whose preconditioned spectrum, for
the closed-form relaxation schedule, consists of exactly two values.
This module builds those components, applies the cycle, assembles the
error operators, and verifies the invariant-subspace structure that
drives the clustering.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import relaxation
from .linalg import (
    LuFactors,
    SingularMatrixError,
    eigenvalues,
    gmres,
    lu_factor,
    lu_solve,
    _jacobi_hermitian,
)
from .rng import SplitMix64
from .tolerances import DEFAULT


class SingularBlockError(SingularMatrixError):
    """A diagonal block (or the coarse operator) is not invertible."""


class InvalidPartitionError(ValueError):
    """The requested block partition is malformed."""


class RecursionDepthError(RuntimeError):
    """The recursive coarse solve exceeded the level guard."""


class NumericalConsistencyError(ArithmeticError):
    """An algebraic identity failed beyond its numerical budget."""


class DiagnosabilityWarning(UserWarning):
    """Coupling eigenvectors are too ill-conditioned to trust clustering."""


MAX_RECURSION_DEPTH = 64


# ---------------------------------------------------------------------------
# Block systems
# ---------------------------------------------------------------------------


@dataclass
class BlockSystem:
    """2x2 block partition of an invertible matrix.

    ``permutation`` (when present) maps positions in the permuted
    ordering back to the original indices, so ``unsplit`` can undo a
    ``split``.  Both diagonal blocks are LU-factored on construction,
    which doubles as the invertibility check.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    permutation: Optional[np.ndarray] = None
    _lu_a: LuFactors = field(init=False, repr=False)
    _lu_d: LuFactors = field(init=False, repr=False)
    _matrix: Optional[np.ndarray] = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)
        self.c = np.asarray(self.c, dtype=complex)
        self.d = np.asarray(self.d, dtype=complex)
        n1, n2 = self.a.shape[0], self.d.shape[0]
        if self.a.shape != (n1, n1) or self.d.shape != (n2, n2):
            raise InvalidPartitionError("diagonal blocks must be square")
        if self.b.shape != (n1, n2) or self.c.shape != (n2, n1):
            raise InvalidPartitionError("off-diagonal block shapes are inconsistent")
        try:
            self._lu_a = lu_factor(self.a)
            self._lu_d = lu_factor(self.d)
        except SingularMatrixError as exc:
            raise SingularBlockError(f"diagonal block is singular: {exc}") from exc

    @property
    def n1(self) -> int:
        return self.a.shape[0]

    @property
    def n2(self) -> int:
        return self.d.shape[0]

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    def matrix(self) -> np.ndarray:
        """The assembled (permuted) matrix [[A, B], [C, D]]."""
        if self._matrix is None:
            self._matrix = np.block([[self.a, self.b], [self.c, self.d]])
        return self._matrix


def split(matrix, first_block_indices) -> BlockSystem:
    """Partition ``matrix`` so the listed indices form the first block.

    The remaining indices keep their relative order; the permutation is
    recorded on the returned system for ``unsplit``.
    """
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise InvalidPartitionError("matrix must be square")
    first = np.asarray(list(first_block_indices), dtype=int)
    if first.size == 0 or first.size >= n:
        raise InvalidPartitionError("first block must be a proper nonempty subset")
    if len(np.unique(first)) != len(first):
        raise InvalidPartitionError("duplicate indices in partition")
    if first.min() < 0 or first.max() >= n:
        raise InvalidPartitionError("partition index out of range")
    mask = np.ones(n, dtype=bool)
    mask[first] = False
    rest = np.nonzero(mask)[0]
    perm = np.concatenate([first, rest])
    permuted = matrix[np.ix_(perm, perm)]
    k = len(first)
    return BlockSystem(
        a=permuted[:k, :k],
        b=permuted[:k, k:],
        c=permuted[k:, :k],
        d=permuted[k:, k:],
        permutation=perm,
    )


def unsplit(sys: BlockSystem) -> np.ndarray:
    """Reassemble the original matrix, undoing the split permutation."""
    m = sys.matrix()
    if sys.permutation is None:
        return m.copy()
    out = np.empty_like(m)
    out[np.ix_(sys.permutation, sys.permutation)] = m
    return out


# ---------------------------------------------------------------------------
# Components and cycle configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoarsePolicy:
    """How the coarse system M0 y = r is solved inside the cycle.

    "direct" factors M0 once; "recursive" runs ``inner_iterations``
    preconditioned GMRES steps per level, recursing on the 2x2 block
    structure of M0 until the dimension drops to ``direct_threshold``
    (the W-cycle arrangement).
    """

    kind: str = "direct"
    inner_iterations: int = 2
    direct_threshold: int = 8

    def __post_init__(self):
        if self.kind not in ("direct", "recursive"):
            raise ValueError(f"unknown coarse policy {self.kind!r}")


@dataclass
class TwoLevelComponents:
    """Smoother inverse, transfer operators and inherited coarse matrix.

    ``smoother_inverse`` acts on vectors or on matrices column-wise.
    ``exact`` marks components produced by :func:`exact_components`,
    for which M0 equals the Schur complement and clustering is claimed.
    """

    smoother_inverse: Callable
    p: np.ndarray
    r: np.ndarray
    m0: np.ndarray
    coarse_policy: CoarsePolicy = CoarsePolicy()
    exact: bool = False
    _m0_lu: Optional[LuFactors] = field(init=False, repr=False, default=None)
    _recursive_cache: dict = field(init=False, repr=False, default_factory=dict)

    def m0_factors(self) -> LuFactors:
        if self._m0_lu is None:
            try:
                self._m0_lu = lu_factor(self.m0)
            except SingularMatrixError as exc:
                raise SingularBlockError(f"coarse operator singular: {exc}") from exc
        return self._m0_lu


@dataclass(frozen=True)
class CycleConfig:
    """Relaxation schedule plus an optional coarse-policy override."""

    schedule: relaxation.RelaxationSchedule
    coarse_policy: Optional[CoarsePolicy] = None


def exact_components(sys: BlockSystem,
                     coarse_policy: CoarsePolicy = CoarsePolicy()) -> TwoLevelComponents:
    """The ideal components S^-1 = blockdiag(A^-1, D^-1), P, R, M0 = R A P.

    The Galerkin coarse operator is checked against the Schur
    complement D - C A^-1 B, which it must equal algebraically.
    """
    a_inv_b = lu_solve(sys._lu_a, sys.b)
    c_a_inv = lu_solve(lu_factor(sys.a.conj().T), sys.c.conj().T).conj().T
    eye2 = np.eye(sys.n2, dtype=complex)
    p = np.vstack([-a_inv_b, eye2])
    r = np.hstack([-c_a_inv, eye2])
    m0 = r @ sys.matrix() @ p
    schur = sys.d - sys.c @ a_inv_b
    scale = max(np.linalg.norm(schur), 1e-300)
    if np.linalg.norm(m0 - schur) > DEFAULT.exact_identity_rel * scale:
        raise NumericalConsistencyError("R A P does not match the Schur complement")
    lu_a, lu_d, n1 = sys._lu_a, sys._lu_d, sys.n1

    def smoother_inverse(x):
        x = np.asarray(x)
        return np.concatenate([lu_solve(lu_a, x[:n1]), lu_solve(lu_d, x[n1:])], axis=0)

    return TwoLevelComponents(
        smoother_inverse=smoother_inverse,
        p=p,
        r=r,
        m0=m0,
        coarse_policy=coarse_policy,
        exact=True,
    )


# ---------------------------------------------------------------------------
# Cycle application
# ---------------------------------------------------------------------------


def _coarse_solve(comp: TwoLevelComponents, cfg: CycleConfig, rc, depth: int):
    policy = cfg.coarse_policy if cfg.coarse_policy is not None else comp.coarse_policy
    nc = comp.m0.shape[0]
    if policy.kind == "direct" or nc <= policy.direct_threshold:
        return lu_solve(comp.m0_factors(), rc)
    if depth >= MAX_RECURSION_DEPTH:
        raise RecursionDepthError(f"coarse recursion exceeded {MAX_RECURSION_DEPTH} levels")
    key = (policy.kind, policy.inner_iterations, policy.direct_threshold)
    if key not in comp._recursive_cache:
        inner_first = np.arange(0, nc, 2)
        inner_sys = split(comp.m0, inner_first)
        inner_comp = exact_components(inner_sys, coarse_policy=policy)
        comp._recursive_cache[key] = (inner_sys, inner_comp)
    inner_sys, inner_comp = comp._recursive_cache[key]
    inner_cfg = CycleConfig(schedule=cfg.schedule, coarse_policy=policy)
    inner_matrix = inner_sys.matrix()
    perm = inner_sys.permutation

    def precondition(res):
        return vcycle_apply(inner_sys, inner_comp, inner_cfg, res, _depth=depth + 1)

    rc = np.asarray(rc, dtype=complex)
    single = rc.ndim == 1
    cols = rc[:, None] if single else rc
    out = np.empty_like(cols)
    for j in range(cols.shape[1]):
        # GMRES runs in the permuted ordering of the inner split
        outcome = gmres(
            lambda y: inner_matrix @ y,
            precondition,
            cols[perm, j],
            tol=1e-300,
            max_iter=policy.inner_iterations,
        )
        out[perm, j] = outcome.solution
    return out[:, 0] if single else out


def vcycle_apply(sys: BlockSystem, comp: TwoLevelComponents, cfg: CycleConfig,
                 f, _depth: int = 0):
    """One application u = M^-1 f of the symmetric two-level V-cycle.

    Runs the pre-smoothing loop x <- x + a_i S^-1 (f - A x) for
    i = 1..m, the coarse correction x <- x + P M0^-1 R (f - A x), and
    the post-smoothing loop with the same index order.  ``f`` may be a
    vector or a matrix of columns.
    """
    atil = sys.matrix()
    f = np.asarray(f, dtype=complex)
    x = np.zeros_like(f)
    for alpha in cfg.schedule.alphas:
        x = x + alpha * comp.smoother_inverse(f - atil @ x)
    rc = comp.r @ (f - atil @ x)
    x = x + comp.p @ _coarse_solve(comp, cfg, rc, _depth)
    for alpha in cfg.schedule.alphas:
        x = x + alpha * comp.smoother_inverse(f - atil @ x)
    return x


def two_block_inverse_apply(sys: BlockSystem, f):
    """Exact solve of A_tilde u = f by the one-presmoothing scheme.

    Uses S^-1 = blockdiag(A^-1, 0), R = [0, I] and the Schur
    complement M0 = D - C A^-1 B; a single pass reproduces the block
    LDU inverse, so the result solves the system to LU accuracy.
    """
    f = np.asarray(f, dtype=complex)
    n1 = sys.n1
    a_inv_b = lu_solve(sys._lu_a, sys.b)
    schur = sys.d - sys.c @ a_inv_b
    try:
        schur_lu = lu_factor(schur)
    except SingularMatrixError as exc:
        raise SingularBlockError(f"Schur complement singular: {exc}") from exc
    x1 = lu_solve(sys._lu_a, f[:n1])
    residual_2 = f[n1:] - sys.c @ x1
    y = lu_solve(schur_lu, residual_2)
    return np.concatenate([x1 - a_inv_b @ y, y], axis=0)


# ---------------------------------------------------------------------------
# Error operators
# ---------------------------------------------------------------------------


def smoother_error(sys: BlockSystem, comp: TwoLevelComponents, alpha: float) -> np.ndarray:
    """E_s(alpha) = I - alpha S^-1 A as a dense matrix."""
    atil = sys.matrix()
    return np.eye(sys.n, dtype=complex) - alpha * comp.smoother_inverse(atil)


def coarse_error(sys: BlockSystem, comp: TwoLevelComponents) -> np.ndarray:
    """E_c = I - P M0^-1 R A, checked to be the expected projector.

    Idempotence holds for any Galerkin M0 = R A P; the explicit block
    form [[I, A^-1 B], [0, 0]] additionally requires exact components.
    """
    atil = sys.matrix()
    e_c = np.eye(sys.n, dtype=complex) - comp.p @ lu_solve(comp.m0_factors(), comp.r @ atil)
    scale = max(np.linalg.norm(e_c), 1.0)
    if np.linalg.norm(e_c @ e_c - e_c) > DEFAULT.exact_identity_rel * scale:
        raise NumericalConsistencyError("coarse error operator is not idempotent")
    if comp.exact:
        n1 = sys.n1
        expected = np.zeros_like(e_c)
        expected[:n1, :n1] = np.eye(n1)
        expected[:n1, n1:] = lu_solve(sys._lu_a, sys.b)
        if np.linalg.norm(e_c - expected) > DEFAULT.exact_identity_rel * scale:
            raise NumericalConsistencyError("coarse error block form violated")
    return e_c


def error_operator(sys: BlockSystem, comp: TwoLevelComponents, cfg: CycleConfig) -> np.ndarray:
    """E_m = (prod_{i=m..1} E_s(a_i)) E_c (prod_{i=1..m} E_s(a_i)).

    Assembled by explicit products in the written order; the empty
    schedule gives the bare coarse correction.
    """
    factors = [smoother_error(sys, comp, a) for a in cfg.schedule.alphas]
    e_c = coarse_error(sys, comp)
    left = np.eye(sys.n, dtype=complex)
    for e_s in factors[::-1]:
        left = left @ e_s
    right = np.eye(sys.n, dtype=complex)
    for e_s in factors:
        right = right @ e_s
    return left @ e_c @ right


# ---------------------------------------------------------------------------
# Coupling analysis and invariant subspaces
# ---------------------------------------------------------------------------


@dataclass
class CouplingAnalysis:
    """Coupling operator T = A^-1 B D^-1 C with its eigenstructure.

    ``v1[:, k] = (w_k; 0)`` and ``v2[:, k] = (0; D^-1 C w_k)`` span the
    2D invariant subspace attached to eigenpair (w_k, lam_k).
    """

    t: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    eigvec_condition: float
    v1: np.ndarray
    v2: np.ndarray

    @property
    def eigenpairs(self):
        return [(self.eigenvalues[k], self.eigenvectors[:, k])
                for k in range(len(self.eigenvalues))]


def coupling_analysis(sys: BlockSystem) -> CouplingAnalysis:
    """Eigen-decompose the coupling operator and build the subspace bases.

    Eigenvalues come from the dense solver; eigenvectors from shifted
    inverse iteration, re-orthogonalized against previously accepted
    vectors of near-multiple eigenvalues.  A DiagnosabilityWarning is
    issued when the eigenvector condition number exceeds the
    diagonalizability threshold.
    """
    dinv_c = lu_solve(sys._lu_d, sys.c)
    t = lu_solve(sys._lu_a, sys.b @ dinv_c)
    n1 = sys.n1
    eigs = eigenvalues(t)
    scale = max(np.linalg.norm(t), 1e-300)
    group_tol = 1e-8 * max(scale, 1.0)
    gen = SplitMix64(0x7C09)
    vectors = np.zeros((n1, n1), dtype=complex)
    worst_residual = 0.0
    for k, lam in enumerate(eigs):
        shift = lam
        fact = None
        bump = 1e-12 * max(scale, 1.0)
        for _ in range(5):
            try:
                fact = lu_factor(t - shift * np.eye(n1))
                break
            except SingularMatrixError:
                shift = shift + bump * (1.0 + 1.0j)
                bump *= 10.0
        if fact is None:
            fact = lu_factor(t - (lam + 1e-6 * max(scale, 1.0)) * np.eye(n1))
        siblings = [j for j in range(k) if abs(eigs[j] - lam) <= group_tol]
        w = gen.normals(n1) + 1j * gen.normals(n1)
        w /= np.linalg.norm(w)
        for _ in range(50):
            w = lu_solve(fact, w)
            for j in siblings:
                w = w - np.vdot(vectors[:, j], w) * vectors[:, j]
            norm = np.linalg.norm(w)
            if norm == 0.0:
                w = gen.normals(n1) + 1j * gen.normals(n1)
                norm = np.linalg.norm(w)
            w = w / norm
            if np.linalg.norm(t @ w - lam * w) <= 1e-10 * scale:
                break
        vectors[:, k] = w
        worst_residual = max(worst_residual, float(np.linalg.norm(t @ w - lam * w)))
    gram = vectors.conj().T @ vectors
    gram_eigs, _ = _jacobi_hermitian(gram, 1e-12)
    top = max(gram_eigs[-1], 1e-300)
    bottom = max(gram_eigs[0], np.finfo(float).eps * top)
    cond = float(np.sqrt(top / bottom))
    if cond > DEFAULT.diagonalizability_cond or \
            worst_residual > DEFAULT.eig_residual_rel * scale:
        warnings.warn(
            f"coupling eigensystem numerically doubtful (eigenvector condition "
            f"{cond:.2e}, worst residual {worst_residual:.2e}); "
            f"clustering not guaranteed",
            DiagnosabilityWarning,
        )
    v1 = np.vstack([vectors, np.zeros((sys.n2, n1), dtype=complex)])
    v2 = np.vstack([np.zeros((n1, n1), dtype=complex), dinv_c @ vectors])
    return CouplingAnalysis(
        t=t,
        eigenvalues=eigs,
        eigenvectors=vectors,
        eigvec_condition=cond,
        v1=v1,
        v2=v2,
    )


def invariant_check(sys: BlockSystem, analysis: CouplingAnalysis, alpha: float) -> float:
    """Largest residual of the four invariant-subspace mapping identities.

    Checks, with the full-size operators,
        E_s v1 = (1-a) v1 - a v2,          E_s v2 = -a lam v1 + (1-a) v2,
        E_c v1 = v1,                       E_c v2 = lam v1,
    for every eigenpair; residuals are normalized per pair by the basis
    scale max(||v1||, ||v2||, |lam| ||v1||).
    """
    comp = exact_components(sys)
    e_s = smoother_error(sys, comp, alpha)
    e_c = coarse_error(sys, comp)
    lam = analysis.eigenvalues
    v1, v2 = analysis.v1, analysis.v2
    res = np.stack([
        np.linalg.norm(e_s @ v1 - ((1 - alpha) * v1 - alpha * v2), axis=0),
        np.linalg.norm(e_s @ v2 - (-alpha * (v1 * lam) + (1 - alpha) * v2), axis=0),
        np.linalg.norm(e_c @ v1 - v1, axis=0),
        np.linalg.norm(e_c @ v2 - v1 * lam, axis=0),
    ])
    scale = np.maximum.reduce([
        np.linalg.norm(v1, axis=0),
        np.linalg.norm(v2, axis=0),
        np.abs(lam) * np.linalg.norm(v1, axis=0),
        np.full(len(lam), 1e-300),
    ])
    return float((res / scale).max())


# ---------------------------------------------------------------------------
# Spectrum verification
# ---------------------------------------------------------------------------


@dataclass
class SpectralReport:
    """Eigenvalues of the preconditioned operator and their clusters.

    ``max_deviation`` is the largest distance from any eigenvalue to
    its nearest cluster center, reported as measured.
    """

    eigenvalues: np.ndarray
    cluster_centers: list
    max_deviation: float
    multiplicity_per_center: list


def _two_means(eigs: np.ndarray):
    spread = np.abs(eigs - eigs.mean()).max()
    if spread <= 1e-12 * max(1.0, np.abs(eigs).max()):
        return [complex(eigs.mean())]
    c1 = eigs[np.argmax(np.abs(eigs - eigs.mean()))]
    c2 = eigs[np.argmax(np.abs(eigs - c1))]
    centers = np.array([c1, c2])
    for _ in range(64):
        assign = np.argmin(np.abs(eigs[:, None] - centers[None, :]), axis=1)
        updated = centers.copy()
        for i in range(2):
            if np.any(assign == i):
                updated[i] = eigs[assign == i].mean()
        if np.allclose(updated, centers, rtol=0, atol=1e-15):
            break
        centers = updated
    return [complex(c) for c in centers]


def _generic_lu_solve(a, b):
    """Dtype-generic pivoted LU solve (used for extended precision)."""
    n = a.shape[0]
    lu = a.copy()
    piv = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        if k + 1 < n:
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    x = b[piv].copy()
    for k in range(n):
        x[k + 1:] -= np.outer(lu[k + 1:, k], x[k])
    for k in range(n - 1, -1, -1):
        x[k] /= lu[k, k]
        if k:
            x[:k] -= np.outer(lu[:k, k], x[k])
    return x


_EXTENDED_COMPLEX = getattr(np, "complex256", np.complex128)
_EXTENDED_REAL = getattr(np, "float128", np.float64)


def _assemble_preconditioned_extended(sys: BlockSystem, cfg: CycleConfig) -> np.ndarray:
    """M^-1 A with exact components, in extended precision."""
    dt = _EXTENDED_COMPLEX
    atil = sys.matrix().astype(dt)
    n1, n = sys.n1, sys.n
    a = atil[:n1, :n1]
    b = atil[:n1, n1:]
    c = atil[n1:, :n1]
    d = atil[n1:, n1:]
    eye1 = np.eye(n1, dtype=dt)
    eye2 = np.eye(n - n1, dtype=dt)
    a_inv = _generic_lu_solve(a, eye1)
    d_inv = _generic_lu_solve(d, eye2)
    s_inv = np.zeros((n, n), dtype=dt)
    s_inv[:n1, :n1] = a_inv
    s_inv[n1:, n1:] = d_inv
    p = np.vstack([-a_inv @ b, eye2])
    r = np.hstack([-c @ a_inv, eye2])
    m0_inv = _generic_lu_solve(r @ atil @ p, eye2)
    if cfg.schedule.source == "theorem":
        m = cfg.schedule.m
        pi = _EXTENDED_REAL(np.pi)
        one = _EXTENDED_REAL(1.0)
        alphas = [one / (one - np.cos(2 * pi * j / (2 * m + 1))) for j in range(1, m + 1)]
    else:
        alphas = [_EXTENDED_REAL(a) for a in cfg.schedule.alphas]
    eye = np.eye(n, dtype=dt)
    x = np.zeros((n, n), dtype=dt)
    for alpha in alphas:
        x = x + alpha * (s_inv @ (eye - atil @ x))
    x = x + p @ (m0_inv @ (r @ (eye - atil @ x)))
    for alpha in alphas:
        x = x + alpha * (s_inv @ (eye - atil @ x))
    return x @ atil


def _refined_eigenvalues(m_double: np.ndarray, m_extended: np.ndarray) -> np.ndarray:
    """Polish LAPACK eigenvalues by two-sided Rayleigh quotients.

    Right and left eigenvectors are computed in double precision; the
    quotients are evaluated against the extended-precision assembly,
    which removes the double-precision assembly error from the report.
    """
    lam, right = np.linalg.eig(m_double)
    lam_left, left = np.linalg.eig(m_double.conj().T)
    pairing = np.argmin(np.abs(lam_left[None, :].conj() - lam[:, None]), axis=1)
    refined = lam.astype(complex).copy()
    for k in range(len(lam)):
        v = right[:, k].astype(_EXTENDED_COMPLEX)
        w = left[:, pairing[k]].astype(_EXTENDED_COMPLEX)
        denom = w.conj() @ v
        if abs(complex(denom)) < 1e-8:
            continue
        refined[k] = complex((w.conj() @ (m_extended @ v)) / denom)
    return refined


def preconditioned_spectrum(sys: BlockSystem, comp: TwoLevelComponents,
                            cfg: CycleConfig, refine: bool = False) -> SpectralReport:
    """Spectrum of M^-1 A with cluster centers and deviations.

    The preconditioned operator is materialized by applying the cycle
    to the columns of A.  For theorem schedules the clusters are the
    theoretical centers {1, 1 - 1/(2m+1)^2}; otherwise a two-means gap
    heuristic is used.  With ``refine=True`` (exact components, direct
    coarse solve) the eigenvalues are polished against an
    extended-precision assembly, which is needed to certify strongly
    non-normal systems at tight tolerances.
    """
    if sys.n > 1024:
        raise ValueError("dimension exceeds the desk-scale cap")
    m_double = vcycle_apply(sys, comp, cfg, sys.matrix())
    if refine:
        policy = cfg.coarse_policy if cfg.coarse_policy is not None else comp.coarse_policy
        if not comp.exact or policy.kind != "direct":
            raise ValueError("refine requires exact components and a direct coarse solve")
        m_extended = _assemble_preconditioned_extended(sys, cfg)
        eigs = _refined_eigenvalues(m_double, m_extended)
    else:
        eigs = eigenvalues(m_double)
    if cfg.schedule.source == "theorem":
        centers = [1.0 + 0.0j, complex(relaxation.clustered_eigenvalue(cfg.schedule.m))]
    else:
        centers = _two_means(eigs)
    carr = np.array(centers)
    assign = np.argmin(np.abs(eigs[:, None] - carr[None, :]), axis=1)
    deviation = float(np.abs(eigs - carr[assign]).max())
    multiplicities = [int((assign == i).sum()) for i in range(len(centers))]
    return SpectralReport(
        eigenvalues=eigs,
        cluster_centers=centers,
        max_deviation=deviation,
        multiplicity_per_center=multiplicities,
    )
