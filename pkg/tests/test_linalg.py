"""Kernel tests: LU, eigenvalues, Hermitian Jacobi, GMRES, Kronecker, FOV."""

import numpy as np
import pytest

from twogrid import linalg
from twogrid.rng import SplitMix64


def random_complex(seed, rows, cols):
    return SplitMix64(seed).complex_matrix(rows, cols)


# ---------------------------------------------------------------------------
# LU
# ---------------------------------------------------------------------------


def test_lu_identity():
    f = linalg.lu_factor(np.eye(3))
    x = linalg.lu_solve(f, np.array([1.0, 2.0, 3.0]))
    assert np.allclose(x, [1, 2, 3], atol=0, rtol=0)


def test_lu_symmetric_2x2_by_hand():
    f = linalg.lu_factor(np.array([[2.0, 1.0], [1.0, 2.0]]))
    x = linalg.lu_solve(f, np.array([3.0, 3.0]))
    assert np.allclose(x, [1.0, 1.0], atol=1e-14)


def test_lu_roundtrip_seeded():
    a = random_complex(17, 20, 20)
    x_star = np.ones(20, dtype=complex)
    x = linalg.lu_solve(linalg.lu_factor(a), a @ x_star)
    assert np.abs(x - x_star).max() <= 1e-10


@pytest.mark.parametrize("n", [4, 32, 128, 256])
def test_lu_residual_invariant(n):
    a = random_complex(n, n, n)
    b = SplitMix64(n + 1).complex_matrix(n, 1)[:, 0]
    x = linalg.lu_solve(linalg.lu_factor(a), b)
    bound = 1e-9 * np.linalg.norm(a) * np.linalg.norm(b)
    assert np.linalg.norm(a @ x - b) <= bound


def test_lu_matrix_rhs():
    a = random_complex(5, 8, 8)
    b = random_complex(6, 8, 3)
    x = linalg.lu_solve(linalg.lu_factor(a), b)
    assert np.abs(a @ x - b).max() <= 1e-10


def test_lu_singular_raises():
    singular = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(linalg.SingularMatrixError):
        linalg.lu_factor(singular)
    with pytest.raises(linalg.SingularMatrixError):
        linalg.lu_factor(np.zeros((3, 3)))


def test_lu_det_matches_numpy():
    a = random_complex(23, 12, 12)
    det = linalg.lu_factor(a).det()
    assert abs(det - np.linalg.det(a)) <= 1e-9 * abs(det)


# ---------------------------------------------------------------------------
# Eigenvalues
# ---------------------------------------------------------------------------


def sorted_complex(values):
    return np.array(sorted(values, key=lambda z: (z.real, z.imag)))


def test_eigenvalues_diagonal():
    eigs = sorted_complex(linalg.eigenvalues(np.diag([1.0, 2.0, 3.0])))
    assert np.allclose(eigs, [1, 2, 3], atol=1e-13)


def test_eigenvalues_nilpotent():
    eigs = linalg.eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.abs(eigs).max() <= 1e-12


def test_eigenvalues_symmetric_2x2():
    eigs = sorted_complex(linalg.eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]])))
    assert np.allclose(eigs, [1.0, 3.0], atol=1e-13)


def test_eigenvalues_trace_and_det_consistency():
    for n in (8, 40, 64):
        a = random_complex(3 * n, n, n)
        eigs = linalg.eigenvalues(a)
        assert abs(eigs.sum() - np.trace(a)) <= 1e-8 * np.linalg.norm(a)
        det = linalg.lu_factor(a).det()
        assert abs(np.prod(eigs) - det) <= 1e-6 * abs(det)


def test_eigenvalues_dimension_cap():
    with pytest.raises(ValueError):
        linalg.eigenvalues(np.zeros((1025, 1025)))


# ---------------------------------------------------------------------------
# Hermitian extreme eigenpair
# ---------------------------------------------------------------------------


def test_hermitian_extreme_diag():
    value, vector = linalg.hermitian_extreme_eig(np.diag([-1.0, 5.0]))
    assert abs(value - 5.0) <= 1e-12
    assert abs(abs(vector[1]) - 1.0) <= 1e-12 and abs(vector[0]) <= 1e-12


def test_hermitian_extreme_2x2():
    value, vector = linalg.hermitian_extreme_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert abs(value - 3.0) <= 1e-12
    expected = np.ones(2) / np.sqrt(2.0)
    phase = vector[0] / abs(vector[0])
    assert np.abs(vector / phase - expected).max() <= 1e-10


def test_hermitian_extreme_cross_solver():
    g = random_complex(77, 30, 30)
    h = 0.5 * (g + g.conj().T)
    value, vector = linalg.hermitian_extreme_eig(h)
    reference = linalg.eigenvalues(h).real.max()
    assert abs(value - reference) <= 1e-9
    assert np.linalg.norm(h @ vector - value * vector) <= 1e-10 * np.linalg.norm(h)
    assert abs(np.linalg.norm(vector) - 1.0) <= 1e-12


def test_not_hermitian_raises():
    with pytest.raises(linalg.NotHermitianError):
        linalg.hermitian_extreme_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


# ---------------------------------------------------------------------------
# GMRES
# ---------------------------------------------------------------------------


def test_gmres_identity_one_iteration():
    b = np.array([1.0, -2.0, 0.5])
    out = linalg.gmres(np.eye(3), None, b, tol=1e-12)
    assert out.converged and out.iterations == 1
    assert np.abs(out.solution - b).max() <= 1e-12


def test_gmres_two_distinct_eigenvalues_two_iterations():
    # diagonalizable with spectrum {1, 8/9}: minimal polynomial degree 2
    gen = SplitMix64(5)
    v = gen.complex_matrix(12, 12)
    d = np.diag([1.0] * 6 + [8.0 / 9.0] * 6)
    a = v @ d @ np.linalg.inv(v)
    b = gen.complex_matrix(12, 1)[:, 0]
    out = linalg.gmres(a, None, b, tol=1e-10)
    assert out.converged and out.iterations <= 2
    assert out.residual_history[2] <= 1e-10 * out.residual_history[0]


def test_gmres_fd1d_dimension_bound():
    n = 15
    a = np.zeros((n, n))
    np.fill_diagonal(a, 2.0)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = -1.0
    a[idx + 1, idx] = -1.0
    b = np.ones(n)
    out = linalg.gmres(a, None, b, tol=1e-10)
    assert out.converged and out.iterations <= n
    assert out.true_residual <= 1e-9 * np.linalg.norm(b)


def test_gmres_history_nonincreasing():
    a = random_complex(9, 20, 20)
    b = np.ones(20, dtype=complex)
    out = linalg.gmres(a, None, b, tol=1e-12, max_iter=20)
    hist = np.array(out.residual_history)
    assert np.all(np.diff(hist) <= 1e-12 * hist[0])


def test_gmres_stagnation_reported_not_fatal():
    # singular operator, right-hand side outside the range: the Arnoldi
    # recurrence breaks down with the residual still large
    a = np.diag([1.0, 0.0])
    b = np.array([0.0, 1.0])
    out = linalg.gmres(a, None, b, tol=1e-12)
    assert out.stagnated and not out.converged
    assert out.solution.shape == (2,)
    assert np.all(np.isfinite(out.solution))


def test_gmres_left_preconditioning_convergence_measure():
    a = random_complex(31, 10, 10) + 4 * np.eye(10)
    m_inv = np.linalg.inv(a) @ (np.eye(10) * 0.5)  # some preconditioner
    b = np.ones(10, dtype=complex)
    out = linalg.gmres(a, m_inv, b, tol=1e-11)
    assert out.converged
    assert out.true_residual <= 1e-8 * np.linalg.norm(b)


# ---------------------------------------------------------------------------
# Kronecker and materialize
# ---------------------------------------------------------------------------


def test_kron_identities():
    assert np.array_equal(linalg.kron(np.eye(2), np.eye(3)), np.eye(6))
    n = np.array([[0.0, 1.0], [0.0, 0.0]])
    k = linalg.kron(n, np.eye(2))
    assert np.array_equal(k[:2, 2:], np.eye(2))
    assert np.abs(k[2:, :]).max() == 0.0


def test_kron_mixed_product():
    gen = SplitMix64(12)
    a, b = gen.complex_matrix(3, 3), gen.complex_matrix(3, 3)
    x, y = gen.complex_matrix(3, 1)[:, 0], gen.complex_matrix(3, 1)[:, 0]
    left = linalg.kron(a, b) @ np.kron(x, y)
    right = np.kron(a @ x, b @ y)
    assert np.abs(left - right).max() <= 1e-12 * max(1.0, np.abs(right).max())


def test_materialize():
    assert np.array_equal(linalg.materialize(lambda x: x, 4), np.eye(4))
    assert np.array_equal(linalg.materialize(lambda x: 2.0 * x, 2), 2.0 * np.eye(2))


# ---------------------------------------------------------------------------
# Field of values
# ---------------------------------------------------------------------------


def test_fov_hermitian_interval():
    boundary = linalg.fov_boundary(np.diag([0.0, 1.0]), 16)
    assert np.abs(boundary.points.imag).max() <= 1e-9
    assert boundary.points.real.min() >= -1e-9
    assert boundary.points.real.max() <= 1.0 + 1e-9


def test_fov_nilpotent_disc():
    boundary = linalg.fov_boundary(np.array([[0.0, 1.0], [0.0, 0.0]]), 64)
    assert np.abs(np.abs(boundary.points) - 0.5).max() <= 1e-6


def test_fov_normal_hull_of_spectrum():
    m = np.diag([1.0 + 0.0j, 1.0j, -1.0 + 0.0j])
    boundary = linalg.fov_boundary(m, 96)
    spectrum = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j])
    # boundary points inside the spectral triangle, vertices attained
    assert linalg.hull_distance(spectrum, boundary.points) <= 1e-6
    assert linalg.hull_distance(boundary.points, spectrum) <= 1e-6


def test_fov_contains_spectrum_seeded():
    m = random_complex(41, 24, 24)
    boundary = linalg.fov_boundary(m, 64)
    eigs = linalg.eigenvalues(m)
    norm = np.linalg.norm(m, 2)
    assert linalg.hull_distance(boundary.points, eigs) <= 1e-6 * norm


def test_fov_angle_validation():
    with pytest.raises(ValueError):
        linalg.fov_boundary(np.eye(2), 4)
