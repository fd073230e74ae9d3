"""Builders for the experiment families.

Covers the finite-difference Laplacians with red/black-derived tensor
transfer operators, the 1D discontinuous Galerkin stencils and their
overlapping assembly, an SIPG stand-in fine operator, and the seeded
nonsymmetric random matrix with a Hermitian positive-definite part and
a skew-Hermitian part.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import kron, lu_solve, _jacobi_hermitian
from .rng import SplitMix64
from .twolevel import BlockSystem, split


class ZeroDiagonalError(ValueError):
    """Diagonal Jacobi requires a zero-free diagonal."""


class DegenerateDeltaError(ValueError):
    """The penalty parameter hits a pole of the printed stencil."""


class SizeMismatchError(ValueError):
    """Element count incompatible with the requested pairing."""


class NotSpdWarning(UserWarning):
    """The assembled operator failed the positive-definiteness check."""


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------


@dataclass
class Fd1dSpec:
    """1D Laplacian with stencil [-1 2 -1]/h^2 on N interior points."""

    N: int
    h: Optional[float] = None

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.h is None:
            self.h = 1.0 / (self.N + 1)
        if self.h <= 0:
            raise ValueError("h must be positive")


def fd1d_matrix(spec: Fd1dSpec) -> np.ndarray:
    n, h = spec.N, spec.h
    a = np.zeros((n, n))
    np.fill_diagonal(a, 2.0 / h ** 2)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = -1.0 / h ** 2
    a[idx + 1, idx] = -1.0 / h ** 2
    return a


def redblack_permutation(N: int) -> np.ndarray:
    """Red points (odd 1-based positions) first, then black."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return np.concatenate([np.arange(0, N, 2), np.arange(1, N, 2)])


def transfers_1d(spec: Fd1dSpec):
    """Ideal 1D transfers (P1, R1 = P1^T) from the red/black block form.

    P_rb = [-A^-1 B; I] is built on the reordered system and the rows
    are scattered back to the natural ordering, so interior red points
    interpolate with weight 1/2 from each black neighbor and black
    points carry identity rows.
    """
    a1 = fd1d_matrix(spec)
    red = np.arange(0, spec.N, 2)
    sys = split(a1, red)
    a_inv_b = lu_solve(sys._lu_a, sys.b)
    p_rb = np.vstack([-a_inv_b, np.eye(sys.n2)])
    p1 = np.empty((spec.N, sys.n2))
    p1[sys.permutation, :] = p_rb.real
    return p1, p1.T.copy()


@dataclass
class Fd2dSpec:
    """Tensor-product Laplacian on an N x N interior grid."""

    N: int = 16

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")

    @property
    def h(self) -> float:
        return 1.0 / (self.N + 1)


def fd2d_matrix(spec: Fd2dSpec) -> np.ndarray:
    """A2 = A1 (x) I + I (x) A1, capped at 1024 unknowns."""
    if spec.N ** 2 > 1024:
        raise ValueError("N^2 exceeds the desk-scale cap of 1024")
    a1 = fd1d_matrix(Fd1dSpec(N=spec.N, h=spec.h))
    eye = np.eye(spec.N)
    return kron(a1, eye) + kron(eye, a1)


def tensor_lift(p1: np.ndarray, r1: np.ndarray):
    """2D transfers P = P1 (x) P1 and R = R1 (x) R1.

    For the tensor-product grid these reproduce standard bilinear
    interpolation and full-weighting restriction.
    """
    if p1.shape != r1.T.shape:
        raise ValueError("R1 must have the transposed shape of P1")
    return kron(p1, p1), kron(r1, r1)


def diag_jacobi_inverse(a):
    """Smoother inverse S^-1 = diag(A)^-1 as an operator."""
    d = np.diag(np.asarray(a)).copy()
    if np.any(d == 0):
        raise ZeroDiagonalError("matrix has zero diagonal entries")

    def apply(x):
        x = np.asarray(x)
        return x / d if x.ndim == 1 else x / d[:, None]

    return apply


# ---------------------------------------------------------------------------
# Discontinuous Galerkin stencils
# ---------------------------------------------------------------------------


@dataclass
class DgSpec:
    """1D DG setting: fine element count, penalty delta, pairing kind."""

    num_elements: int = 8
    delta: float = 2.0
    permutation_kind: str = "element"

    def __post_init__(self):
        if self.permutation_kind not in ("element", "interface"):
            raise ValueError("permutation_kind must be 'element' or 'interface'")
        if self.num_elements < 2 or self.num_elements % 2:
            raise SizeMismatchError("num_elements must be even and at least 2")
        if self.delta <= 0.5:
            raise ValueError("penalty delta must exceed 1/2")


def dg_local_prolongation(kind: str, delta: float) -> np.ndarray:
    """The printed 8x4 local prolongation block (fine 8 DoFs from 4 coarse).

    Element-wise entries come from {d/(4d-2), (d-1)/(4d-2), 0, 1};
    interface-wise entries from {(d-1)/d, 1/(2d), 0, 1}, in the printed
    row and column layout.
    """
    if kind == "element":
        if abs(4.0 * delta - 2.0) < 1e-14:
            raise DegenerateDeltaError("element stencil has a pole at delta = 1/2")
        u = delta / (4.0 * delta - 2.0)
        v = (delta - 1.0) / (4.0 * delta - 2.0)
        return np.array([
            [u, v, 0, 0],
            [v, u, 0, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [u, v, u, v],
            [v, u, v, u],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ])
    if kind == "interface":
        if abs(delta) < 1e-14:
            raise DegenerateDeltaError("interface stencil has a pole at delta = 0")
        g = (delta - 1.0) / delta
        w = 1.0 / (2.0 * delta)
        return np.array([
            [g, w, 0, 0],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [w, g, w, 0],
            [0, w, g, w],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [0, 0, w, g],
        ])
    raise ValueError("kind must be 'element' or 'interface'")


def dg_local_smoother(kind: str, delta: float) -> np.ndarray:
    """The printed 2x2 local Jacobi smoother blocks."""
    if kind == "element":
        if abs(2.0 * delta - 1.0) < 1e-14:
            raise DegenerateDeltaError("element smoother has a pole at delta = 1/2")
        return np.array([[delta, delta - 1.0], [delta - 1.0, delta]]) / (2.0 * delta - 1.0)
    if kind == "interface":
        if abs(delta) < 1e-14:
            raise DegenerateDeltaError("interface smoother has a pole at delta = 0")
        return np.eye(2) / delta
    raise ValueError("kind must be 'element' or 'interface'")


def dg_assemble(spec: DgSpec):
    """Tile the local stencils into global (P, smoother inverse).

    Element-wise: red (odd) elements interpolate with the 2x2 block
    Q = [[d, d-1], [d-1, d]]/(4d-2) from each black neighbor, black
    elements carry identity rows, and the boundary red element reuses
    the printed block truncated to its single neighbor.  Interface-wise
    follows the printed alternating-trace template.  Both overlap, so
    the global P is not block diagonal.
    """
    k_el = spec.num_elements
    nf = 2 * k_el
    delta = spec.delta
    if spec.permutation_kind == "element":
        q = dg_local_prolongation("element", delta)[:2, :2]
        nc = k_el
        p = np.zeros((nf, nc))
        for j in range(1, k_el + 1):
            rows = slice(2 * (j - 1), 2 * j)
            if j % 2 == 0:
                pblk = j // 2 - 1
                p[rows, 2 * pblk:2 * pblk + 2] = np.eye(2)
            else:
                p_right = (j - 1) // 2
                p[rows, 2 * p_right:2 * p_right + 2] = q
                if j >= 3:
                    p_left = p_right - 1
                    p[rows, 2 * p_left:2 * p_left + 2] = q
        s_loc = dg_local_smoother("element", delta)
        s_full = np.kron(np.eye(k_el), s_loc)
    else:
        # colors repeat [red, black, black, red] per two elements
        color_red = np.array([i % 4 in (0, 3) for i in range(nf)])
        reds = np.nonzero(color_red)[0]
        blacks = np.nonzero(~color_red)[0]
        nc = len(blacks)
        p = np.zeros((nf, nc))
        g = (delta - 1.0) / delta
        w = 1.0 / (2.0 * delta)
        for q_idx, i in enumerate(blacks):
            p[i, q_idx] = 1.0
        for q_idx, i in enumerate(reds):
            p[i, q_idx] = g
            if q_idx > 0:
                p[i, q_idx - 1] = w
            if q_idx + 1 < nc:
                p[i, q_idx + 1] = w
        s_full = np.eye(nf) / delta

    def smoother_inverse(x):
        x = np.asarray(x)
        return s_full @ x

    return p, smoother_inverse


def sipg_1d_matrix(num_elements: int, delta: float) -> np.ndarray:
    """Symmetric interior-penalty DG matrix for -u'' on [0, 1].

    Piecewise-linear elements with nodal values at the element ends,
    face penalty delta/h, and weakly imposed homogeneous Dirichlet
    conditions.  Positive definiteness is checked and a NotSpdWarning
    is issued when it fails.
    """
    if num_elements < 2:
        raise ValueError("need at least 2 elements")
    k_el = num_elements
    h = 1.0 / k_el
    n = 2 * k_el
    a = np.zeros((n, n))
    cell = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
    for e in range(k_el):
        a[2 * e:2 * e + 2, 2 * e:2 * e + 2] += cell
    for e in range(k_el - 1):
        jump = np.zeros(n)
        jump[2 * e + 1] = 1.0
        jump[2 * e + 2] = -1.0
        grad = np.zeros(n)
        grad[2 * e] = -0.5 / h
        grad[2 * e + 1] = 0.5 / h
        grad[2 * e + 2] = -0.5 / h
        grad[2 * e + 3] = 0.5 / h
        a -= np.outer(grad, jump) + np.outer(jump, grad)
        a += (delta / h) * np.outer(jump, jump)
    # boundary faces: [u] is the trace itself, flux uses the one-sided gradient
    trace0 = np.zeros(n)
    trace0[0] = 1.0
    grad0 = np.zeros(n)
    grad0[0] = -1.0 / h
    grad0[1] = 1.0 / h
    a += np.outer(grad0, trace0) + np.outer(trace0, grad0)
    a += (delta / h) * np.outer(trace0, trace0)
    trace1 = np.zeros(n)
    trace1[-1] = 1.0
    grad1 = np.zeros(n)
    grad1[-2] = -1.0 / h
    grad1[-1] = 1.0 / h
    a -= np.outer(grad1, trace1) + np.outer(trace1, grad1)
    a += (delta / h) * np.outer(trace1, trace1)
    eigs, _ = _jacobi_hermitian(a.astype(complex), 1e-12)
    if eigs[0] <= 0:
        warnings.warn(
            f"SIPG matrix not positive definite (min eig {eigs[0]:.3e}) "
            f"for delta = {delta}",
            NotSpdWarning,
        )
    return a


def dg_element_redblack_split(matrix: np.ndarray) -> BlockSystem:
    """Split a 2-DoF-per-element operator with odd elements first."""
    n = matrix.shape[0]
    if n % 4:
        raise SizeMismatchError("element-wise red/black needs an even element count")
    red_elements = np.arange(0, n // 2, 2)
    red_dofs = np.concatenate([[2 * e, 2 * e + 1] for e in red_elements])
    return split(matrix, red_dofs)


# ---------------------------------------------------------------------------
# Nonsymmetric random matrix
# ---------------------------------------------------------------------------


@dataclass
class RandomNonnormalSpec:
    """B = H/1000 + gamma K with H = W^H W + eta I, K = (X - X^H)/2.

    W and X have independent standard normal real and imaginary
    entries from the pinned SplitMix64/Box-Muller stream, so a given
    seed reproduces B bit for bit.
    """

    n: int = 64
    eta: float = 1.0
    gamma: float = 0.5
    seed: int = 42

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.eta <= 0:
            raise ValueError("eta must be positive")


def random_nonnormal(spec: RandomNonnormalSpec) -> np.ndarray:
    gen = SplitMix64(spec.seed)
    w = gen.complex_matrix(spec.n, spec.n)
    x = gen.complex_matrix(spec.n, spec.n)
    h = w.conj().T @ w + spec.eta * np.eye(spec.n)
    k = 0.5 * (x - x.conj().T)
    return h / 1000.0 + spec.gamma * k


def alternating_split(matrix: np.ndarray) -> BlockSystem:
    """Even indices first; the generic 2x2 partition for unstructured matrices."""
    return split(matrix, np.arange(0, matrix.shape[0], 2))


def random_block_system(n1: int, n2: int, seed: int) -> BlockSystem:
    """Seeded random complex block system with contiguous partition.

    The base matrix is I + G / (2 sqrt(n)) with G complex Gaussian:
    the identity shift keeps both diagonal blocks comfortably
    invertible and the coupling spectral radius below one, so the
    clustering tolerances are dominated by the theorem rather than by
    conditioning of the draw.
    """
    n = n1 + n2
    gen = SplitMix64(seed)
    g = gen.complex_matrix(n, n)
    atil = np.eye(n) + g / (2.0 * np.sqrt(n))
    return split(atil, np.arange(n1))
