"""Minimal-rank spectrum assignment for self-adjoint, unitary and
normal-on-a-curve matrices.

The building block is the rank-one step between interlacing spectra: with
``diag(alpha) X - X diag(beta) = y z^T`` and ``X`` unitary, the matrix
``B = X diag(beta) X^*`` differs from ``diag(alpha)`` by a rank-one matrix.
Larger moves are chained along a multiset geodesic on the real line; circles
and general lines are first carried to the real line by a Mobius map.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import (
    CertificateError,
    DuplicateNode,
    NotHermitian,
    NotInterlacing,
    NotNormal,
    NotOnCurve,
    NotUnitary,
    NumericalLossOfUnitarity,
    PoleOnSpectrum,
    PreconditionViolated,
    TargetNotReal,
    ZeroCoefficient,
)
from .mats import (
    DEFAULT_TOL,
    MobiusMap,
    as_matrix,
    is_hermitian,
    is_normal,
    is_unitary,
    mobius_apply_matrix,
)
from .multiset import (
    DEFAULT_MERGE_REL,
    ComplexMultiset,
    Curve,
    geodesic_chain_on_curve,
    mobius_apply_multiset,
    ms_difference,
)

GAP_REL_TOL = 1e-10
GRAM_LIMIT = 1e-7

__all__ = [
    "InterpolationCoeffs",
    "Rank1Update",
    "CurveSpec",
    "AssignReport",
    "interpolation_coeffs",
    "sign_uniform",
    "hermitian_rank1_update",
    "hermitian_assign_spectrum",
    "curve_spec",
    "normal_on_curve_assign_spectrum",
    "unitary_assign_spectrum",
]


def _poly_at(x: float, nodes: np.ndarray) -> float:
    return float(np.prod(x - nodes))


@dataclass(frozen=True)
class InterpolationCoeffs:
    """x_alpha with P_B = P_A - sum_alpha x_alpha P_{A minus alpha}."""

    alphas: tuple
    betas: tuple
    x: tuple
    residual: float

    def as_dict(self) -> dict:
        return dict(zip(self.alphas, self.x))


def interpolation_coeffs(A_set, B_set) -> InterpolationCoeffs:
    """Coefficients of P_B in the basis {P_A} and {P_{A minus alpha}}.

    Evaluating the identity at alpha gives ``x_alpha = -P_B(alpha) /
    P_{A minus alpha}(alpha)``. `residual` is the largest coefficient
    mismatch of the identity relative to the largest coefficient of P_B.
    """
    a = np.asarray(A_set, dtype=float).ravel()
    b = np.asarray(B_set, dtype=float).ravel()
    if len(a) != len(b):
        raise PreconditionViolated("node sets must have equal size")
    allv = np.concatenate([a, b])
    if len(np.unique(allv)) != len(allv):
        raise DuplicateNode("all 2n nodes must be distinct")
    x = np.array([-_poly_at(al, b) / _poly_at(al, np.delete(a, i)) for i, al in enumerate(a)])

    rhs = np.poly(a).astype(float)
    for i, xi in enumerate(x):
        rhs[1:] -= xi * np.poly(np.delete(a, i))
    pb = np.poly(b)
    residual = float(np.max(np.abs(rhs - pb)) / np.max(np.abs(pb)))
    return InterpolationCoeffs(tuple(map(float, a)), tuple(map(float, b)), tuple(float(v) for v in x), residual)


def sign_uniform(c: InterpolationCoeffs) -> str:
    """'positive', 'negative' or 'mixed'."""
    x = np.asarray(c.x)
    if np.any(x == 0):
        raise ZeroCoefficient("a coefficient vanishes: a node of B coincides with a node of A")
    if np.all(x > 0):
        return "positive"
    if np.all(x < 0):
        return "negative"
    return "mixed"


@dataclass(frozen=True)
class Rank1Update:
    alphas: np.ndarray
    betas: np.ndarray
    y: np.ndarray
    z: np.ndarray
    c: int
    X: np.ndarray
    B: np.ndarray
    R: np.ndarray
    gram_residual: float
    spectrum_error: float
    rank_gap: float


def _check_interlacing(a: np.ndarray, b: np.ndarray) -> None:
    if len(a) != len(b) or len(a) == 0:
        raise NotInterlacing("need two non-empty sets of equal size")
    if np.any(np.diff(a) <= 0) or np.any(np.diff(b) <= 0):
        raise NotInterlacing("nodes must be sorted and distinct")
    merged = np.concatenate([a, b])
    order = np.argsort(merged, kind="stable")
    side = order < len(a)
    if np.any(side[1:] == side[:-1]):
        raise NotInterlacing("sets do not strictly alternate")
    s = np.sort(merged)
    scale = max(float(np.max(np.abs(s))), float(s[-1] - s[0]))
    if np.min(np.diff(s)) <= GAP_REL_TOL * scale:
        raise NotInterlacing("interlacing gap below resolution")


def hermitian_rank1_update(alphas, betas) -> Rank1Update:
    """Unitary X and rank-one R with diag(alphas) X - X diag(betas) = R.

    ``|y_i|^2 = P_B(alpha_i) / (c P_{A minus alpha_i}(alpha_i))`` with the sign
    c making these positive, ``|z_j|^{-2} = sum_i |y_i|^2 / (alpha_i - beta_j)^2``
    (unit columns), ``x_ij = y_i z_j / (alpha_i - beta_j)``. Phases of y and z
    are taken real and positive.
    """
    a = np.asarray(alphas, dtype=float).ravel()
    b = np.asarray(betas, dtype=float).ravel()
    _check_interlacing(a, b)
    ratio = np.array([_poly_at(al, b) / _poly_at(al, np.delete(a, i)) for i, al in enumerate(a)])
    c = 1 if ratio[0] > 0 else -1
    y2 = ratio / c
    if np.any(y2 <= 0):
        raise NotInterlacing("interpolation coefficients are not of one sign")
    y = np.sqrt(y2)
    D = a[:, None] - b[None, :]
    z = 1.0 / np.sqrt(np.sum(y2[:, None] / D ** 2, axis=0))
    X = (y[:, None] * z[None, :] / D).astype(complex)

    gram = X.conj().T @ X - np.eye(len(a))
    gram_residual = float(np.max(np.abs(gram)))
    if gram_residual > GRAM_LIMIT:
        raise NumericalLossOfUnitarity(f"X^*X - E residual {gram_residual:.3g}")
    B = (X * b) @ X.conj().T
    B = (B + B.conj().T) / 2
    R = a[:, None] * X - X * b[None, :]
    spectrum_error = float(np.max(np.abs(linalg.eigvalsh(B) - b)))
    s = linalg.svd(np.diag(a) - B, compute_uv=False)
    rank_gap = float(s[1] / s[0]) if len(s) > 1 else 0.0
    return Rank1Update(a, b, y, z, c, X, B, R, gram_residual, spectrum_error, rank_gap)


@dataclass(frozen=True)
class AssignReport:
    """Certificate data of a spectrum assignment."""

    steps: int
    spectrum_error: float
    structure_residual: float
    max_gram_residual: float


def _pick_indices(vals: np.ndarray, free: np.ndarray, points, tol: float) -> list[int]:
    """Distinct indices i with vals[i] near each point, nearest first."""
    chosen = []
    for p in points:
        cand = np.flatnonzero(free & (np.abs(vals - p) <= tol))
        if not len(cand):
            raise CertificateError(f"no eigenvalue left near {p}")
        i = int(cand[np.argmin(np.abs(vals[cand] - p))])
        free[i] = False
        chosen.append(i)
    return chosen


def _real_points(ms: ComplexMultiset, tol: float) -> ComplexMultiset:
    pts = ms.support
    if np.any(np.abs(pts.imag) > tol):
        raise TargetNotReal("target has non-real points")
    return ComplexMultiset(tuple(pts.real.astype(complex)), ms.counts, ms.merge_tol)


def _assign_diagonal(alpha: np.ndarray, target: ComplexMultiset, merge_tol: float):
    """Unitary W and values v with W diag(v) W^* at rank distance dc from diag(alpha)."""
    n = len(alpha)
    start = ComplexMultiset.from_values(alpha.astype(complex), merge_tol)
    chain = geodesic_chain_on_curve(start, target.with_tol(merge_tol), Curve.real_line())
    vals = alpha.astype(float).copy()
    W = np.eye(n, dtype=complex)
    worst_gram = 0.0
    for cur, nxt in zip(chain[:-1], chain[1:]):
        out = ms_difference(cur, nxt)
        inn = ms_difference(nxt, cur)
        if any(c > 1 for c in out.counts + inn.counts):
            raise CertificateError("geodesic step is not an interlacing move")
        idx = _pick_indices(vals, np.ones(n, bool), out.support.real, merge_tol)
        idx = sorted(idx, key=lambda i: vals[i])
        upd = hermitian_rank1_update(vals[idx], np.sort(inn.support.real))
        worst_gram = max(worst_gram, upd.gram_residual)
        W[:, idx] = W[:, idx] @ upd.X
        vals[idx] = upd.betas
    return W, vals, len(chain) - 1, worst_gram


def _default_merge_tol(*arrays) -> float:
    ref = max((float(np.max(np.abs(a))) for a in arrays if len(a)), default=0.0)
    return DEFAULT_MERGE_REL * ref


def hermitian_assign_spectrum(A, target: ComplexMultiset, tol: float = DEFAULT_TOL,
                              merge_tol: float | None = None, full_output: bool = False):
    """Hermitian B with sp(B) = target and rank(A - B) = dc(sp(A), target).

    With ``full_output=True`` returns ``(B, AssignReport)``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n) or not is_hermitian(A, tol):
        raise NotHermitian("A is not Hermitian within tolerance")
    if len(target) != n:
        raise PreconditionViolated(f"|target| = {len(target)} but n = {n}")
    alpha, V = linalg.eigh((A + A.conj().T) / 2)
    scale = max(float(np.max(np.abs(alpha))), float(np.max(np.abs(target.support))), 1e-300)
    target = _real_points(target, tol * scale)
    if merge_tol is None:
        merge_tol = _default_merge_tol(alpha, target.support)
    W, vals, steps, gram = _assign_diagonal(alpha, target, merge_tol)
    Q = V @ W
    B = (Q * vals) @ Q.conj().T
    B = (B + B.conj().T) / 2
    if not full_output:
        return B
    got = np.sort(linalg.eigvalsh(B))
    want = np.sort(target.values().real)
    report = AssignReport(
        steps=steps,
        spectrum_error=float(np.max(np.abs(got - want))),
        structure_residual=float(np.max(np.abs(B - B.conj().T))),
        max_gram_residual=gram,
    )
    return B, report


@dataclass(frozen=True)
class CurveSpec:
    """A line or circle together with a Mobius map sending it to the real line."""

    curve: Curve
    mobius: MobiusMap


def curve_spec(curve: Curve, points=()) -> CurveSpec:
    """Choose the map for `curve`.

    Lines use an affine map (pole at infinity). For circles the pole is the
    midpoint of the widest angular gap between `points`, i.e. the point of
    the circle farthest from all of them.
    """
    if curve.kind == "line":
        # x -> (x - point) / direction
        return CurveSpec(curve, MobiusMap(0, curve.direction, 1, -curve.point))
    pts = np.asarray(points, dtype=complex).ravel()
    if len(pts):
        t = np.sort(curve.param(pts))
        gaps = np.diff(np.concatenate([t, [t[0] + 2 * np.pi]]))
        j = int(np.argmax(gaps))
        theta = t[j] + gaps[j] / 2
    else:
        theta = 0.0
    ru = curve.radius * np.exp(1j * theta)
    c0 = curve.center
    # w = (x - c0) / ru sits on the unit circle with the pole at w = 1;
    # w -> i (1 + w) / (1 - w) is real there.
    return CurveSpec(curve, MobiusMap(-1, ru + c0, 1j, 1j * (ru - c0)))


def normal_on_curve_assign_spectrum(A, target: ComplexMultiset, curve: Curve | CurveSpec,
                                    tol: float = DEFAULT_TOL, merge_tol: float | None = None,
                                    full_output: bool = False):
    """Normal B with sp(B) = target and rank(A - B) = dc(sp(A), target),
    for normal A whose spectrum and the target lie on one line or circle."""
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n) or not is_normal(A, tol):
        raise NotNormal("A is not normal within tolerance")
    if len(target) != n:
        raise PreconditionViolated(f"|target| = {len(target)} but n = {n}")
    ev = linalg.eigvals(A)
    crv = curve.curve if isinstance(curve, CurveSpec) else curve
    pts = np.concatenate([ev, target.support])
    if np.any(crv.offset(pts) > crv.tolerance(pts, target.merge_tol)):
        raise NotOnCurve("spectrum or target is off the curve")
    cs = curve if isinstance(curve, CurveSpec) else curve_spec(crv, pts)
    m = cs.mobius
    if m.pole is not None and np.min(np.abs(pts - m.pole)) <= 1e-12 * max(1.0, np.max(np.abs(pts))):
        raise PoleOnSpectrum("the chosen pole hits the spectrum or the target")

    H = mobius_apply_matrix(m, A, tol)
    H = (H + H.conj().T) / 2
    img = mobius_apply_multiset(m, target, merge_tol=0.0)
    himg = np.abs(img.support)
    img = _real_points(img, 1e-7 * max(1.0, float(np.max(himg))))
    Bh, rep = hermitian_assign_spectrum(H, img, tol=max(tol, 1e-12), merge_tol=merge_tol,
                                        full_output=True)
    B = mobius_apply_matrix(m.inverse(), Bh, tol)
    if not full_output:
        return B
    got = linalg.eigvals(B)
    want = target.values()
    err = max(float(np.min(np.abs(want - g))) for g in got) if n else 0.0
    report = AssignReport(
        steps=rep.steps,
        spectrum_error=err,
        structure_residual=float(np.max(np.abs(B @ B.conj().T - B.conj().T @ B))),
        max_gram_residual=rep.max_gram_residual,
    )
    return B, report


def unitary_assign_spectrum(U, target: ComplexMultiset, tol: float = DEFAULT_TOL,
                            merge_tol: float | None = None, full_output: bool = False):
    """Unitary B with sp(B) = target (on the unit circle) and rank(U - B) = dc."""
    U = as_matrix(U)
    if U.shape[0] != U.shape[1] or not is_unitary(U, 10 * tol):
        raise NotUnitary("U is not unitary within tolerance")
    B, rep = normal_on_curve_assign_spectrum(U, target, Curve.unit_circle(), tol,
                                             merge_tol, full_output=True)
    res = float(np.max(np.abs(B.conj().T @ B - np.eye(B.shape[0]))))
    if res > 10 * tol:
        raise NumericalLossOfUnitarity(f"B^*B - E residual {res:.3g}")
    rep = AssignReport(rep.steps, rep.spectrum_error, res, rep.max_gram_residual)
    return (B, rep) if full_output else B
