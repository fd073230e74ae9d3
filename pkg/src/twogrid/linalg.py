"""Dense complex linear algebra kernels for desk-scale verification.

Matrices are plain ``numpy`` arrays in row-major order.  The kernels
here are sized for dimensions up to about 1024: pivoted LU, Hermitian
Jacobi diagonalization, unrestarted GMRES, Kronecker products and the
numerical-range boundary are implemented directly; the general dense
eigensolver delegates to LAPACK through ``numpy.linalg``.
"""

from dataclasses import dataclass

import numpy as np

from .tolerances import DEFAULT


class SingularMatrixError(ArithmeticError):
    """A pivot fell below the singularity threshold."""


class NoConvergenceError(ArithmeticError):
    """An iterative eigenvalue computation did not converge."""


class NotHermitianError(ValueError):
    """Input to a Hermitian-only routine failed the symmetry check."""


def _as_square(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


# ---------------------------------------------------------------------------
# Pivoted LU
# ---------------------------------------------------------------------------


@dataclass
class LuFactors:
    """Combined L/U storage with partial pivoting (PA = LU).

    ``lu`` holds the strictly lower unit-triangular factor below the
    diagonal and U on and above it; ``piv`` maps factored row k to the
    original row ``piv[k]``; ``sign`` is the permutation parity.
    """

    lu: np.ndarray
    piv: np.ndarray
    sign: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def det(self) -> complex:
        """Determinant from the pivots and permutation parity."""
        return self.sign * np.prod(np.diag(self.lu))

    def solve(self, b):
        return lu_solve(self, b)


def lu_factor(a, pivot_tol: float = DEFAULT.lu_pivot_rel) -> LuFactors:
    """Factor PA = LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        When a pivot magnitude falls below ``pivot_tol`` times the
        inf-norm of the input, which signals a non-invertible matrix.
    """
    a = _as_square(a)
    n = a.shape[0]
    lu = a.astype(complex).copy()
    piv = np.arange(n)
    sign = 1.0
    norm = np.abs(a).sum(axis=1).max() if n else 0.0
    threshold = pivot_tol * norm
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= threshold:
            raise SingularMatrixError(
                f"pivot {abs(lu[p, k]):.3e} at column {k} below "
                f"{pivot_tol:g} * ||A||_inf = {threshold:.3e}"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            sign = -sign
        lu[k + 1:, k] /= lu[k, k]
        if k + 1 < n:
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LuFactors(lu=lu, piv=piv, sign=sign)


def lu_solve(factors: LuFactors, b):
    """Solve A x = b for one right-hand side or a matrix of them."""
    lu, piv = factors.lu, factors.piv
    b = np.asarray(b)
    vector = b.ndim == 1
    x = b[piv].astype(complex)
    if vector:
        x = x[:, None]
    n = factors.n
    for k in range(n):
        x[k + 1:] -= np.outer(lu[k + 1:, k], x[k])
    for k in range(n - 1, -1, -1):
        x[k] /= lu[k, k]
        if k:
            x[:k] -= np.outer(lu[:k, k], x[k])
    return x[:, 0] if vector else x


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------

MAX_EIG_DIM = 1024


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a general square matrix, with multiplicity.

    Delegates the balanced Hessenberg/QR iteration to LAPACK via
    ``numpy.linalg.eigvals``; the desk-scale dimension cap keeps the
    dense storage honest.
    """
    a = _as_square(a)
    if a.shape[0] > MAX_EIG_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds cap {MAX_EIG_DIM}")
    if a.shape[0] == 0:
        return np.array([], dtype=complex)
    try:
        return np.linalg.eigvals(a.astype(complex))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological
        raise NoConvergenceError(str(exc)) from exc


def _jacobi_hermitian(h, tol_rel: float, max_sweeps: int = 64):
    """Cyclic threshold Jacobi diagonalization of a Hermitian matrix.

    Returns (eigenvalues ascending, unitary eigenvector columns).
    """
    a = 0.5 * (h + h.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v
    target = tol_rel * norm
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        # rotating only entries above off/n still guarantees progress:
        # the skipped mass alone cannot reach the current off-norm
        thresh = off / n
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absq = abs(apq)
                if absq <= thresh:
                    continue
                tau = (a[q, q].real - a[p, p].real) / (2.0 * absq)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sc = (t * c) * (apq / absq)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - np.conj(sc) * col_q
                a[:, q] = sc * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sc * row_q
                a[q, :] = np.conj(sc) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - np.conj(sc) * vec_q
                v[:, q] = sc * vec_p + c * vec_q
    else:
        raise NoConvergenceError("Jacobi sweeps exhausted before off-diagonal target")
    order = np.argsort(np.diag(a).real)
    return np.diag(a).real[order], v[:, order]


def hermitian_extreme_eig(h, tol_rel: float = DEFAULT.hermitian_rel):
    """Largest eigenvalue and a unit eigenvector of a Hermitian matrix.

    Uses cyclic Jacobi diagonalization; the off-diagonal Frobenius norm
    is driven below ``jacobi_offdiag_rel`` times the matrix norm.
    """
    h = _as_square(h)
    norm = np.linalg.norm(h)
    if np.linalg.norm(h - h.conj().T) > tol_rel * max(norm, 1e-300):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    eigs, vecs = _jacobi_hermitian(h, DEFAULT.jacobi_offdiag_rel)
    vec = vecs[:, -1]
    return float(eigs[-1]), vec / np.linalg.norm(vec)


# ---------------------------------------------------------------------------
# GMRES
# ---------------------------------------------------------------------------


@dataclass
class GmresOutcome:
    """Result of an unrestarted left-preconditioned GMRES solve.

    ``residual_history`` holds the preconditioned least-squares
    residual norms, starting with the initial one, so ``iterations``
    equals ``len(residual_history) - 1``.  ``true_residual`` is the
    unpreconditioned ||b - A x||.
    """

    solution: np.ndarray
    residual_history: list
    true_residual: float
    iterations: int
    converged: bool
    stagnated: bool = False


def _as_operator(op):
    if op is None:
        return lambda x: x
    if callable(op):
        return op
    mat = np.asarray(op)
    return lambda x: mat @ x


def gmres(apply_a, apply_m_inv, b, tol: float = 1e-10, max_iter: int | None = None,
          breakdown_tol: float = DEFAULT.gmres_breakdown) -> GmresOutcome:
    """Full GMRES on the left-preconditioned system M^-1 A x = M^-1 b.

    Parameters
    ----------
    apply_a, apply_m_inv : callable, matrix or None
        Actions of the operator and of the preconditioner inverse;
        ``None`` for the preconditioner means identity.
    tol : float
        Convergence is declared when the preconditioned residual drops
        below ``tol`` times ||M^-1 b||.
    max_iter : int, optional
        Defaults to the problem dimension.

    Notes
    -----
    An Arnoldi vector with norm below ``breakdown_tol`` (relative to
    the first residual) ends the recurrence.  If the least-squares
    residual has not converged at that point the outcome is flagged as
    stagnated and the best solution in the current Krylov space is
    returned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    apply_a = _as_operator(apply_a)
    apply_m = _as_operator(apply_m_inv)
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    if max_iter is None:
        max_iter = n
    r0 = apply_m(b)
    beta = np.linalg.norm(r0)
    history = [float(beta)]
    if beta == 0.0:
        return GmresOutcome(np.zeros(n, dtype=complex), history, 0.0, 0, True)
    v = np.zeros((n, max_iter + 1), dtype=complex)
    hess = np.zeros((max_iter + 1, max_iter), dtype=complex)
    cs = np.zeros(max_iter, dtype=complex)
    sn = np.zeros(max_iter, dtype=complex)
    g = np.zeros(max_iter + 1, dtype=complex)
    g[0] = beta
    v[:, 0] = r0 / beta
    converged = False
    stagnated = False
    k = 0
    for j in range(max_iter):
        w = apply_m(apply_a(v[:, j]))
        for i in range(j + 1):
            hess[i, j] = np.vdot(v[:, i], w)
            w = w - hess[i, j] * v[:, i]
        for i in range(j + 1):  # one re-orthogonalization pass
            corr = np.vdot(v[:, i], w)
            hess[i, j] += corr
            w = w - corr * v[:, i]
        hnorm = np.linalg.norm(w)
        hess[j + 1, j] = hnorm
        breakdown = hnorm < breakdown_tol * beta
        if not breakdown:
            v[:, j + 1] = w / hnorm
        for i in range(j):
            t = cs[i] * hess[i, j] + sn[i] * hess[i + 1, j]
            hess[i + 1, j] = -np.conj(sn[i]) * hess[i, j] + np.conj(cs[i]) * hess[i + 1, j]
            hess[i, j] = t
        denom = np.hypot(abs(hess[j, j]), abs(hess[j + 1, j]))
        if denom == 0.0:
            # the reduced column vanished: no progress is possible along
            # this direction, so drop it and keep the previous residual
            history.append(float(abs(g[j])))
            if history[-1] <= tol * beta:
                converged = True
            else:
                stagnated = True
            break
        cs[j] = np.conj(hess[j, j]) / denom
        sn[j] = np.conj(hess[j + 1, j]) / denom
        hess[j, j] = cs[j] * hess[j, j] + sn[j] * hess[j + 1, j]
        hess[j + 1, j] = 0.0
        g[j + 1] = -np.conj(sn[j]) * g[j]
        g[j] = cs[j] * g[j]
        k = j + 1
        history.append(float(abs(g[j + 1])))
        if history[-1] <= tol * beta:
            converged = True
            break
        if breakdown:
            stagnated = True
            break
    y = np.zeros(k, dtype=complex)
    for i in range(k - 1, -1, -1):
        y[i] = (g[i] - hess[i, i + 1:k] @ y[i + 1:]) / hess[i, i]
    x = v[:, :k] @ y
    true_res = float(np.linalg.norm(b - apply_a(x)))
    return GmresOutcome(
        solution=x,
        residual_history=history,
        true_residual=true_res,
        iterations=len(history) - 1,
        converged=converged,
        stagnated=stagnated,
    )


# ---------------------------------------------------------------------------
# Kronecker products and operator materialization
# ---------------------------------------------------------------------------


def kron(a, b) -> np.ndarray:
    """Kronecker product, dims (ra*rb) x (ca*cb)."""
    return np.kron(np.asarray(a), np.asarray(b))


def materialize(op, dim: int, dtype=complex) -> np.ndarray:
    """Assemble a linear operator as a dense matrix, column by column."""
    out = np.empty((dim, dim), dtype=dtype)
    e = np.zeros(dim, dtype=dtype)
    for j in range(dim):
        e[j] = 1.0
        out[:, j] = op(e)
        e[j] = 0.0
    return out


# ---------------------------------------------------------------------------
# Field of values
# ---------------------------------------------------------------------------


@dataclass
class FovBoundary:
    """Sampled boundary of the numerical range {v^H M v : ||v|| = 1}.

    ``points[k]`` is v^H M v for the top eigenvector v of the rotated
    Hermitian part at ``angles[k]``; ``support_values[k]`` is the
    corresponding largest eigenvalue (the support function of the
    range in direction ``exp(-i angle)``).
    """

    angles: np.ndarray
    points: np.ndarray
    support_values: np.ndarray

    @property
    def samples(self):
        return list(zip(self.angles, self.points, self.support_values))

    def numerical_radius(self) -> float:
        return float(np.abs(self.points).max())


def fov_boundary(m, num_angles: int = 256) -> FovBoundary:
    """Boundary points of the field of values by angle sweep.

    For each angle theta the top eigenpair of the Hermitian part of
    ``exp(i theta) M`` supplies one boundary point ``v^H M v``; the
    convex hull of the points approximates the numerical range from
    inside.
    """
    m = _as_square(m).astype(complex)
    if num_angles < 8:
        raise ValueError("num_angles must be at least 8")
    angles = 2.0 * np.pi * np.arange(num_angles) / num_angles
    points = np.empty(num_angles, dtype=complex)
    support = np.empty(num_angles)
    for k, theta in enumerate(angles):
        rotated = np.exp(1j * theta) * m
        h_theta = 0.5 * (rotated + rotated.conj().T)
        lam, vec = hermitian_extreme_eig(h_theta)
        points[k] = np.vdot(vec, m @ vec)
        support[k] = lam
    return FovBoundary(angles=angles, points=points, support_values=support)


def convex_hull(points) -> np.ndarray:
    """Convex hull of complex points, counter-clockwise (monotone chain)."""
    pts = np.unique(np.asarray(points, dtype=complex))
    pts = pts[np.lexsort((pts.imag, pts.real))]
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return ((a - o).real * (b - o).imag - (a - o).imag * (b - o).real)

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def hull_distance(points, queries) -> float:
    """Largest distance from any query point to the hull of ``points``.

    Returns 0 when every query lies inside (or on) the convex hull of
    the sample points, otherwise the worst exterior distance.  Used to
    check that a spectrum is enclosed by a sampled numerical range.
    """
    hull = convex_hull(points)
    queries = np.atleast_1d(np.asarray(queries, dtype=complex))
    if len(hull) == 1:
        return float(np.abs(queries - hull[0]).max())

    def seg_dist(z, a, b):
        ab = b - a
        denom = (ab.real ** 2 + ab.imag ** 2)
        if denom == 0.0:
            return abs(z - a)
        t = ((z - a).real * ab.real + (z - a).imag * ab.imag) / denom
        t = min(max(t, 0.0), 1.0)
        return abs(z - (a + t * ab))

    worst = 0.0
    k = len(hull)
    for z in queries:
        if k > 2:
            inside = True
            for i in range(k):
                a, b = hull[i], hull[(i + 1) % k]
                crossv = (b - a).real * (z - a).imag - (b - a).imag * (z - a).real
                if crossv < 0.0:
                    inside = False
                    break
            if inside:
                continue
            dist = min(seg_dist(z, hull[i], hull[(i + 1) % k]) for i in range(k))
        else:
            dist = seg_dist(z, hull[0], hull[-1])
        worst = max(worst, dist)
    return worst
