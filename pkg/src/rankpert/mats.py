"""Dense complex matrices under the rank (arithmetic) distance.

Matrices are plain 2-D ``numpy`` arrays; every function here is pure and
returns new arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch, NotUnitary, PoleOnSpectrum

DEFAULT_TOL = 1e-9

__all__ = [
    "DEFAULT_TOL",
    "MobiusMap",
    "as_matrix",
    "is_hermitian",
    "is_unitary",
    "is_normal",
    "numeric_rank",
    "null_dim",
    "arithmetic_distance",
    "normalized_distance",
    "mobius_apply_matrix",
    "rank1_chain",
    "unitary_chain",
]


def as_matrix(A) -> np.ndarray:
    """Return `A` as a finite 2-D complex array (a copy)."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or 0 in M.shape:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return M


def _same_shape(A, B) -> tuple[np.ndarray, np.ndarray]:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return A, B


def _maxabs(A) -> float:
    return float(np.max(np.abs(A))) if A.size else 0.0


def is_hermitian(A, tol: float = DEFAULT_TOL) -> bool:
    A = _square(A)
    return _maxabs(A - A.conj().T) <= tol * _maxabs(A)


def is_unitary(A, tol: float = DEFAULT_TOL) -> bool:
    A = _square(A)
    return _maxabs(A.conj().T @ A - np.eye(A.shape[0])) <= tol


def is_normal(A, tol: float = DEFAULT_TOL) -> bool:
    A = _square(A)
    Ah = A.conj().T
    return _maxabs(A @ Ah - Ah @ A) <= tol * _maxabs(A) ** 2


def numeric_rank(A, tol: float = DEFAULT_TOL, scale: float | None = None) -> int:
    """Number of singular values above ``tol * max(sigma_max, scale)``.

    `scale` lets callers measure a difference ``A - B`` against the size of
    the operands instead of the (possibly round-off sized) difference itself.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s = linalg.svd(as_matrix(A), compute_uv=False)
    ref = float(s[0]) if s.size else 0.0
    if scale is not None:
        ref = max(ref, float(scale))
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * ref))


def null_dim(A, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the numerical null space, at the same threshold as `numeric_rank`."""
    A = as_matrix(A)
    s = linalg.svd(A, compute_uv=False)
    n = A.shape[1]
    if not s.size or s[0] == 0.0:
        return n
    return n - int(np.count_nonzero(s > tol * s[0]))


def _operand_scale(A: np.ndarray, B: np.ndarray) -> float:
    return max(linalg.norm(A, 2), linalg.norm(B, 2))


def arithmetic_distance(A, B, tol: float = DEFAULT_TOL) -> int:
    """rank(A - B), thresholded relative to the larger operand."""
    A, B = _same_shape(A, B)
    return numeric_rank(A - B, tol, scale=_operand_scale(A, B))


def normalized_distance(A, B, tol: float = DEFAULT_TOL) -> Fraction:
    A, B = _same_shape(A, B)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch("normalized distance needs square matrices")
    return Fraction(arithmetic_distance(A, B, tol), A.shape[0])


@dataclass(frozen=True)
class MobiusMap:
    """x -> (a x + b)^{-1} (c x + d).

    The same convention is used for scalars, multisets and matrices, so the
    pole of the map is ``-b / a``.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Mobius map: ad - bc = 0")

    @property
    def pole(self) -> complex | None:
        return None if self.a == 0 else -self.b / self.a

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return (self.c * x + self.d) / (self.a * x + self.b)

    def inverse(self) -> "MobiusMap":
        # y (a x + b) = c x + d  =>  x = (a y - c)^{-1} (d - b y)
        return MobiusMap(self.a, -self.c, -self.b, self.d)


def mobius_apply_matrix(m: MobiusMap, A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(aA + bE)^{-1} (cA + dE)."""
    A = _square(A)
    E = np.eye(A.shape[0])
    den = m.a * A + m.b * E
    if numeric_rank(den, tol) < A.shape[0]:
        raise PoleOnSpectrum(f"pole {m.pole} lies on the spectrum")
    return linalg.solve(den, m.c * A + m.d * E)


def _chain_from_terms(A: np.ndarray, B: np.ndarray, terms: list[np.ndarray]) -> list[np.ndarray]:
    chain = [A.copy()]
    C = A.copy()
    for T in terms[:-1]:
        C = C + T
        chain.append(C)
    if terms:
        chain.append(B.copy())
    return chain


def rank1_chain(A, B, tol: float = DEFAULT_TOL, hermitian: bool | None = None) -> list[np.ndarray]:
    """A = C_0, ..., C_k = B with rank(C_i - C_{i+1}) = 1 and k = rank(B - A).

    Hermitian endpoints (detected automatically unless `hermitian` is given)
    are joined through Hermitian matrices using the eigendecomposition of
    ``B - A``; otherwise singular triplets are used. Terms are added in
    descending magnitude.
    """
    A, B = _same_shape(A, B)
    k = arithmetic_distance(A, B, tol)
    if k == 0:
        return [A.copy()]
    D = B - A
    if hermitian is None:
        hermitian = A.shape[0] == A.shape[1] and is_hermitian(A, tol) and is_hermitian(B, tol)
    if hermitian:
        w, V = linalg.eigh((D + D.conj().T) / 2)
        order = np.argsort(-np.abs(w), kind="stable")[:k]
        terms = [w[i] * np.outer(V[:, i], V[:, i].conj()) for i in order]
    else:
        U, s, Vh = linalg.svd(D)
        terms = [s[i] * np.outer(U[:, i], Vh[i]) for i in range(k)]
    return _chain_from_terms(A, B, terms)


def unitary_chain(U1, U2, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Unitary geodesic from U1 to U2, inserting one eigenvalue of U1^{-1} U2 per step."""
    U1, U2 = _same_shape(U1, U2)
    for name, U in (("U1", U1), ("U2", U2)):
        if not is_unitary(U, tol * 10):
            raise NotUnitary(f"{name} is not unitary within tolerance")
    k = arithmetic_distance(U1, U2, tol)
    if k == 0:
        return [U1.copy()]
    W = U1.conj().T @ U2
    # W is normal, so its complex Schur form is diagonal up to round-off.
    T, Z = linalg.schur(W, output="complex")
    lam = np.diag(T).copy()
    lam /= np.abs(lam)
    order = np.argsort(-np.abs(lam - 1), kind="stable")[:k]
    chain = [U1.copy()]
    d = np.ones(len(lam), dtype=complex)
    for i in order[:-1]:
        d[i] = lam[i]
        chain.append(U1 @ (Z * d) @ Z.conj().T)
    chain.append(U2.copy())
    return chain
