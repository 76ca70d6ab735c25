"""Checks of the disk-dimension bound for normal matrices.

For normal A and B, the number of eigenvalues in any closed disk can change
by at most rank(A - B). This module evaluates that inequality on grids of
disks, verifies the projection lower bound behind it, and runs seeded
randomized trials over commuting normal pairs.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from .errors import HypothesisViolated, NotNormal, PreconditionViolated
from .mats import DEFAULT_TOL, _same_shape, _square, arithmetic_distance, is_normal
from .multiset import ComplexMultiset, dc_distance

GEOM_NUDGE = 1e-12

__all__ = [
    "RegionDimQuery",
    "DiskBoundReport",
    "ProjectionReport",
    "TrialSummary",
    "region_dim",
    "disk_bound_check",
    "projection_bound_check",
    "random_normal_pair",
    "run_disk_bound_trials",
]


@dataclass(frozen=True)
class RegionDimQuery:
    lam: complex
    epsilon: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise PreconditionViolated("epsilon must be nonnegative")


def _normal_eigvals(A, tol: float) -> np.ndarray:
    A = _square(A)
    if not is_normal(A, tol):
        raise NotNormal("matrix is not normal within tolerance")
    return linalg.eigvals(A)


def region_dim(A, q: RegionDimQuery, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the span of eigenvectors with |alpha - lam| <= epsilon."""
    ev = _normal_eigvals(A, tol)
    return int(np.count_nonzero(np.abs(ev - q.lam) <= q.epsilon))


@dataclass(frozen=True)
class DiskBoundReport:
    rank: int
    max_dim_gap: int
    queries: int
    dc: int

    @property
    def slack(self) -> int:
        return self.rank - self.max_dim_gap

    @property
    def holds(self) -> bool:
        return self.max_dim_gap <= self.rank and self.dc <= self.rank


def _max_disk_gap(ea: np.ndarray, eb: np.ndarray) -> tuple[int, int]:
    """Largest count difference over disks centred at eigenvalues with radii
    at every eigenvalue distance, nudged inwards and outwards."""
    pts = np.concatenate([ea, eb])
    diam = float(np.max(np.abs(pts[:, None] - pts[None, :])))
    nudge = GEOM_NUDGE * max(diam, float(np.max(np.abs(pts))), 1.0)
    dA = np.abs(ea[None, :] - pts[:, None])
    dB = np.abs(eb[None, :] - pts[:, None])
    base = np.abs(pts[None, :] - pts[:, None])
    # counts only change at these distances; sample just inside and outside.
    # A radius below the nudge would split numerically separated copies of
    # one eigenvalue, so those become the nudge itself.
    inner = base - nudge
    radii = np.concatenate([np.where(inner > 0, inner, nudge), base + nudge], axis=1)
    ca = np.count_nonzero(dA[:, None, :] <= radii[:, :, None], axis=2)
    cb = np.count_nonzero(dB[:, None, :] <= radii[:, :, None], axis=2)
    return int(np.max(np.abs(ca - cb))), radii.size


def disk_bound_check(A, B, tol: float = DEFAULT_TOL) -> DiskBoundReport:
    """Compare eigenvalue counts of A and B over a grid of disks.

    Centres are all eigenvalues of A and B, radii are all distances from
    the centre to an eigenvalue, each moved by a tiny relative amount to
    either side. Also reports dc of the spectra.
    """
    A, B = _same_shape(A, B)
    ea, eb = _normal_eigvals(A, tol), _normal_eigvals(B, tol)
    gap, queries = _max_disk_gap(ea, eb)
    rank = arithmetic_distance(A, B, tol)
    ref = float(np.max(np.abs(np.concatenate([ea, eb]))))
    mt = 1e-8 * ref
    dc = dc_distance(ComplexMultiset.from_values(ea, mt), ComplexMultiset.from_values(eb, mt))
    return DiskBoundReport(rank, gap, queries, dc)


@dataclass(frozen=True)
class ProjectionReport:
    bound: float
    min_ratio: float
    vectors: int

    @property
    def margin(self) -> float:
        return self.min_ratio - self.bound


def projection_bound_check(N, X_basis, lam: complex, epsilon: float, a: float,
                           tol: float = DEFAULT_TOL, samples: int = 16,
                           seed: int = 0) -> ProjectionReport:
    """Check ||P x|| >= sqrt(1 - 1/a^2) ||x|| for P the spectral projection of
    N onto eigenvalues within a*epsilon of lam.

    The hypothesis ||(N - lam) x|| <= epsilon ||x|| is required of the whole
    span of `X_basis`, since random vectors from the span are tested too.
    """
    if not a > 1:
        raise PreconditionViolated("a must exceed 1")
    N = _square(N)
    if not is_normal(N, tol):
        raise NotNormal("N is not normal within tolerance")
    X = np.asarray(X_basis, dtype=complex)
    if X.ndim == 1:
        X = X[:, None]
    Q = linalg.orth(X)
    n = N.shape[0]
    Nl = N - lam * np.eye(n)
    worst = linalg.norm(Nl @ Q, 2)
    if worst > epsilon + tol * max(1.0, linalg.norm(N, 2)):
        raise HypothesisViolated(f"||(N - lam) x|| reaches {worst:.6g} > epsilon = {epsilon:.6g}")
    T, Z = linalg.schur(N, output="complex")
    inside = np.abs(np.diag(T) - lam) <= a * epsilon
    Zr = Z[:, inside]
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=(Q.shape[1], samples)) + 1j * rng.normal(size=(Q.shape[1], samples))
    V = np.concatenate([X, Q @ coeffs], axis=1)
    V = V / linalg.norm(V, axis=0)
    ratios = linalg.norm(Zr.conj().T @ V, axis=0)
    return ProjectionReport(float(np.sqrt(1 - 1 / a ** 2)), float(np.min(ratios)), V.shape[1])


def random_normal_pair(rng: np.random.Generator, n: int, k: int):
    """U D1 U^*, U D2 U^* with D1, D2 differing in exactly k diagonal entries.

    Half of the draws take eigenvalues from a small integer grid so that
    repeated eigenvalues and boundary-touching disks occur.
    """
    def draw(size):
        if grid:
            return rng.integers(-2, 3, size) + 1j * rng.integers(-2, 3, size)
        return rng.normal(size=size) + 1j * rng.normal(size=size)

    grid = bool(rng.integers(2))
    d1 = draw(n)
    d2 = d1.copy()
    idx = rng.choice(n, size=k, replace=False)
    new = draw(k)
    same = new == d1[idx]
    new[same] += 1  # keep exactly k changed entries
    d2[idx] = new
    U = unitary_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1))
    return (U * d1) @ U.conj().T, (U * d2) @ U.conj().T


def _one_trial(args) -> tuple[int, int, int]:
    seq, n_max, k_max = args
    rng = np.random.default_rng(seq)
    n = int(rng.integers(1, n_max + 1))
    k = int(rng.integers(0, min(k_max, n) + 1))
    A, B = random_normal_pair(rng, n, k)
    rep = disk_bound_check(A, B, tol=1e-8)
    return rep.slack, rep.rank - rep.dc, int(not rep.holds)


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    violations: int
    worst_slack: int
    worst_dc_slack: int
    seed: int


def run_disk_bound_trials(trials: int, n_max: int = 32, k_max: int = 4, seed: int = 0,
                          workers: int | None = None) -> TrialSummary:
    """Seeded randomized trials; each trial gets its own spawned seed, so
    serial and parallel runs give the same summary."""
    seqs = np.random.SeedSequence(seed).spawn(trials)
    jobs = [(s, n_max, k_max) for s in seqs]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            res = list(ex.map(_one_trial, jobs, chunksize=max(1, trials // (8 * workers))))
    else:
        res = [_one_trial(j) for j in jobs]
    r = np.array(res, dtype=int).reshape(-1, 3)
    if not len(r):
        return TrialSummary(0, 0, 0, 0, seed)
    return TrialSummary(trials, int(r[:, 2].sum()), int(r[:, 0].min()), int(r[:, 1].min()), seed)
