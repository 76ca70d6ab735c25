"""Nearest self-adjoint and unitary matrices in the normalized rank
distance, and a matrix that almost commutes with diag(lambda) but is far
from its commutant.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy import linalg

from .errors import (
    CertificateError,
    DimensionMismatch,
    DuplicateEigenvalue,
    IsometryCheckFailed,
    NodeCollision,
    TooSmall,
)
from .mats import DEFAULT_TOL, _square, normalized_distance, numeric_rank

__all__ = [
    "CommutingWitness",
    "selfadjoint_defect",
    "nearest_selfadjoint",
    "unitary_defect",
    "nearest_unitary_rank",
    "checkerboard_witness",
    "cauchy_matrix",
    "cauchy_nonsingular",
    "cauchy_det_elimination",
    "cauchy_solve",
]

ELIM_DPS = 50
ELIM_REL_TOL = 1e-10


def selfadjoint_defect(A, tol: float = DEFAULT_TOL) -> Fraction:
    """d_r(A, A^*)."""
    A = _square(A)
    return normalized_distance(A, A.conj().T, tol)


def nearest_selfadjoint(A) -> np.ndarray:
    """(A + A^*) / 2. Its distance to A equals the self-adjoint defect."""
    A = _square(A)
    return (A + A.conj().T) / 2


def unitary_defect(A, tol: float = DEFAULT_TOL) -> Fraction:
    """d_r(A^* A, E)."""
    A = _square(A)
    return normalized_distance(A.conj().T @ A, np.eye(A.shape[0]), tol)


def nearest_unitary_rank(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unitary U with rank(A - U) <= rank(A^* A - E).

    U agrees with A on the subspace X where A is an isometry (eigenvectors of
    A^* A with eigenvalue 1) and maps an orthonormal basis of the complement
    of X onto one of the complement of A(X), in order.
    """
    A = _square(A)
    n = A.shape[0]
    G = A.conj().T @ A
    w, V = linalg.eigh((G + G.conj().T) / 2)
    band = tol * max(1.0, linalg.norm(A, 2) ** 2)
    on = np.abs(w - 1) <= band
    X, Xp = V[:, on], V[:, ~on]
    Y = A @ X
    iso = float(np.max(np.abs(Y.conj().T @ Y - np.eye(X.shape[1])), initial=0.0))
    back = float(np.max(np.abs(A.conj().T @ Y - X), initial=0.0))
    if iso > 10 * tol or back > 10 * tol * max(1.0, linalg.norm(A, 2) ** 2):
        raise IsometryCheckFailed(f"A is not an isometry on X (residuals {iso:.3g}, {back:.3g})")
    if X.shape[1] == 0:
        Yp = np.eye(n, dtype=complex)
    elif X.shape[1] == n:
        Yp = np.zeros((n, 0), dtype=complex)
    else:
        Yp = linalg.null_space(Y.conj().T)
    return Y @ X.conj().T + Yp @ Xp.conj().T


@dataclass(frozen=True)
class CommutingWitness:
    lambdas: np.ndarray
    X: np.ndarray
    commutator_rank: int
    commutator_error: float
    rows: tuple
    cols: tuple
    determinant: complex
    lower_bound: int

    @property
    def commutator_distance(self) -> Fraction:
        return Fraction(self.commutator_rank, len(self.lambdas))


def checkerboard_witness(lambdas, tol: float = DEFAULT_TOL) -> CommutingWitness:
    """X with x_ij = ((i + j) mod 2) / (lambda_i - lambda_j), 1-based indices.

    A X - X A is the checkerboard of ones (rank 2), while the block of X
    with odd rows and even columns is a Cauchy matrix untouched by any
    diagonal B, so rank(X - B) >= floor(n/2).
    """
    lam = np.asarray(lambdas, dtype=complex).ravel()
    n = len(lam)
    if n < 4:
        raise TooSmall("need n >= 4")
    if len(np.unique(lam)) != n:
        raise DuplicateEigenvalue("lambdas must be distinct")
    i = np.arange(1, n + 1)
    C = ((i[:, None] + i[None, :]) % 2).astype(float)
    D = lam[:, None] - lam[None, :]
    np.fill_diagonal(D, 1.0)
    X = C / D
    comm = lam[:, None] * X - X * lam[None, :]
    err = float(np.max(np.abs(comm - C)))
    if err > 1e-9:
        raise CertificateError(f"commutator differs from the checkerboard by {err:.3g}")
    rank = numeric_rank(comm, tol)
    rows = tuple(range(1, n + 1, 2))[: n // 2]
    cols = tuple(range(2, n + 1, 2))[: n // 2]
    det, ok = cauchy_nonsingular(lam[np.array(rows) - 1], lam[np.array(cols) - 1])
    return CommutingWitness(lam, X, rank, err, rows, cols, det, n // 2 if ok else 0)


def _nodes(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if len(a) != len(b):
        raise DimensionMismatch("node sequences must have equal length")
    if np.any(a[:, None] == b[None, :]):
        raise NodeCollision("a and b share a node")
    return a, b


def cauchy_matrix(a, b) -> np.ndarray:
    a, b = _nodes(a, b)
    return 1.0 / (a[:, None] - b[None, :])


def _cauchy_logdet(a: np.ndarray, b: np.ndarray) -> tuple[complex, float]:
    """(phase, log|det|) from the product formula."""
    iu = np.triu_indices(len(a), 1)
    num = np.concatenate([(a[iu[1]] - a[iu[0]]), (b[iu[0]] - b[iu[1]])])
    den = (a[:, None] - b[None, :]).ravel()
    phase = np.prod(num / np.abs(num)) / np.prod(den / np.abs(den))
    return complex(phase), float(np.sum(np.log(np.abs(num))) - np.sum(np.log(np.abs(den))))


def cauchy_det_elimination(a, b, dps: int = ELIM_DPS) -> tuple[complex, float]:
    """(phase, log|det|) by LU in extended precision.

    Double-precision LU of a Cauchy matrix loses most digits already for
    moderate n, so the independent check runs in mpmath.
    """
    a, b = _nodes(a, b)
    with mpmath.workdps(dps):
        M = mpmath.matrix([[1 / (mpmath.mpc(x) - mpmath.mpc(y)) for y in b] for x in a])
        d = mpmath.det(M)
        if d == 0:
            return 0j, float("-inf")
        return complex(d / abs(d)), float(mpmath.log(abs(d)))


def cauchy_nonsingular(a, b, check: bool = True) -> tuple[complex, bool]:
    """Determinant of [1/(a_i - b_j)] by the product formula.

    det = prod_{i<j} (a_j - a_i)(b_i - b_j) / prod_{i,j} (a_i - b_j). With
    `check`, the value is compared against extended-precision elimination
    (phase and log-modulus to 1e-10).
    """
    a, b = _nodes(a, b)
    phase, logabs = _cauchy_logdet(a, b)
    if check:
        ph2, la2 = cauchy_det_elimination(a, b)
        if abs(ph2 - phase) > ELIM_REL_TOL or abs(la2 - logabs) > ELIM_REL_TOL * max(1.0, abs(logabs)):
            raise CertificateError("product formula and elimination disagree")
    with np.errstate(over="ignore", under="ignore"):
        det = phase * np.exp(logabs)
    return complex(det), bool(np.isfinite(logabs))


def cauchy_solve(a, b, rhs) -> np.ndarray:
    """Solve sum_j w_j / (a_i - b_j) = rhs_i.

    Lagrange interpolation: sum_j w_j / (x - b_j) = N(x) / P(x) with
    P(x) = prod (x - b_j) and deg N < n, so N is the interpolant of
    rhs_i P(a_i) at the nodes a_i and w_j is read off from N(b_j).
    """
    a, b = _nodes(a, b)
    f = np.asarray(rhs, dtype=complex).ravel()
    n = len(a)
    if len(f) != n:
        raise DimensionMismatch("rhs length differs from node count")
    # Numerator N(x) = sum_j w_j prod_{k != j}(x - b_k) takes value f_i P(a_i) at a_i.
    # Interpolate N at the a nodes, then w_j = N(b_j) / prod_{k != j}(b_j - b_k).
    Pa = np.array([np.prod(ai - b) for ai in a])
    vals = f * Pa
    out = np.empty(n, dtype=complex)
    for j, bj in enumerate(b):
        # Lagrange basis at a evaluated at bj
        L = np.array([np.prod((bj - np.delete(a, i)) / (a[i] - np.delete(a, i))) for i in range(n)])
        out[j] = np.dot(L, vals) / np.prod(bj - np.delete(b, j))
    return out
