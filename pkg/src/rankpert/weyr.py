"""Weyr and Segre characteristics, their metric, and rank-one reachability.

A Weyr characteristic maps each eigenvalue to the nonincreasing tuple
``(eta_1, eta_2, ...)`` where ``eta_i`` counts Jordan blocks of size at least
``i``. The Segre characteristic lists the block sizes; the two are conjugate
partitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import linalg

from .errors import (
    CyclicVectorFailure,
    Derogatory,
    DistanceTooSmall,
    IllConditioned,
    IllConditionedKrylov,
    PreconditionViolated,
)
from .mats import DEFAULT_TOL, as_matrix
from .multiset import ComplexMultiset, _cluster_labels

__all__ = [
    "WeyrChar",
    "SegreChar",
    "conjugate_partition",
    "weyr_from_matrix",
    "weyr_to_segre",
    "segre_to_weyr",
    "weyr_distance",
    "weyr_geodesic_step",
    "weyr_geodesic_chain",
    "weyr_pad",
    "thompson_reachable",
    "segre_interlace_check",
    "rank1_assign_spectrum",
    "ferrers",
    "jordan_matrix",
]


def conjugate_partition(parts) -> tuple[int, ...]:
    """Transpose of a Ferrers diagram."""
    parts = [p for p in parts if p > 0]
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p > j) for j in range(max(parts)))


def _clean(table: Mapping[complex, tuple]) -> dict[complex, tuple[int, ...]]:
    out = {}
    for lam, seq in table.items():
        seq = tuple(int(v) for v in seq)
        while seq and seq[-1] == 0:
            seq = seq[:-1]
        if not seq:
            continue
        if any(v < 0 for v in seq):
            raise ValueError(f"negative entry at eigenvalue {lam}")
        if any(seq[i] < seq[i + 1] for i in range(len(seq) - 1)):
            raise ValueError(f"sequence at eigenvalue {lam} is not nonincreasing: {seq}")
        out[complex(lam)] = seq
    return dict(sorted(out.items(), key=lambda kv: (kv[0].real, kv[0].imag)))


@dataclass(frozen=True)
class WeyrChar:
    """eigenvalue -> (eta_1, eta_2, ...), nonincreasing and positive."""

    table: Mapping[complex, tuple[int, ...]] = field(default_factory=dict)
    merge_tol: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "table", _clean(self.table))

    @property
    def n(self) -> int:
        return sum(sum(seq) for seq in self.table.values())

    def eta(self, i: int, lam: complex) -> int:
        """eta_i(lam), 1-based `i`; zero outside the support."""
        for mu, seq in self.table.items():
            if abs(mu - lam) <= self.merge_tol:
                return seq[i - 1] if 0 < i <= len(seq) else 0
        return 0

    def __repr__(self) -> str:
        body = ", ".join(f"{lam:g}: {seq}" for lam, seq in self.table.items())
        return f"WeyrChar({{{body}}})"


@dataclass(frozen=True)
class SegreChar:
    """eigenvalue -> Jordan block sizes, nonincreasing."""

    table: Mapping[complex, tuple[int, ...]] = field(default_factory=dict)
    merge_tol: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "table", _clean(self.table))

    @property
    def n(self) -> int:
        return sum(sum(seq) for seq in self.table.values())


def weyr_to_segre(w: WeyrChar) -> SegreChar:
    return SegreChar({lam: conjugate_partition(seq) for lam, seq in w.table.items()}, w.merge_tol)


def segre_to_weyr(s: SegreChar) -> WeyrChar:
    return WeyrChar({lam: conjugate_partition(seq) for lam, seq in s.table.items()}, s.merge_tol)


def jordan_matrix(segre: Mapping[complex, tuple[int, ...]] | SegreChar) -> np.ndarray:
    """Block diagonal Jordan form with ones on the superdiagonal."""
    table = segre.table if isinstance(segre, SegreChar) else segre
    blocks = [(lam, q) for lam, qs in table.items() for q in qs]
    n = sum(q for _, q in blocks)
    J = np.zeros((n, n), dtype=complex)
    pos = 0
    for lam, q in blocks:
        J[pos:pos + q, pos:pos + q] = lam * np.eye(q) + np.eye(q, k=1)
        pos += q
    return J


def ferrers(w: WeyrChar) -> str:
    """Ferrers diagrams of the Segre characteristic, one per eigenvalue.

    Row i has q_i dots; column j then holds eta_j dots.
    """
    lines = []
    for lam, seq in w.table.items():
        lines.append(f"lambda = {lam.real:.12g}{lam.imag:+.12g}i   eta = {list(seq)}")
        for q in conjugate_partition(seq):
            lines.append("  " + " ".join("*" * q))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# extraction from a matrix

def _staircase(M: np.ndarray, thresh: float, cap: int) -> list[int]:
    """Nullities of the nested compressions of M (one per Jordan level)."""
    nus = []
    while M.shape[0] and len(nus) < cap:
        U, s, Vh = linalg.svd(M)
        nu = int(np.count_nonzero(s <= thresh))
        if nu == 0:
            break
        nus.append(nu)
        # basis with the kernel first: W^* M W = [[0, *], [0, M22]]
        W = Vh.conj().T[:, ::-1]
        M = (W.conj().T @ M @ W)[nu:, nu:]
    return nus


def weyr_from_matrix(A, tol: float = DEFAULT_TOL, merge_tol: float | None = None) -> WeyrChar:
    """Numerical Weyr characteristic of a square matrix.

    Eigenvalues are grouped by single linkage. Starting at `merge_tol`
    (default ``1e-8 * ||A||``) the grouping tolerance is widened by decades
    until every group's staircase nullities add up to the group size and the
    groups are at least ten tolerances apart. A computed defective eigenvalue
    of index m is smeared over a radius of order ``eps**(1/m)``, so a fixed
    grouping tolerance cannot work. Nullities use the absolute threshold
    ``tol * ||A||``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise PreconditionViolated("Weyr characteristic needs a square matrix")
    scale = float(linalg.norm(A, 2))
    ev = linalg.eigvals(A)
    if scale == 0.0:
        return WeyrChar({0j: (n,)}, 0.0 if merge_tol is None else merge_tol)
    thresh = tol * scale
    t0 = 1e-8 * scale if merge_tol is None else merge_tol
    ladder = [t0 * 10 ** j for j in range(8)]
    for t in ladder:
        labels = _cluster_labels(ev, t)
        table = {}
        ok = True
        for j in range(labels.max() + 1):
            group = ev[labels == j]
            lam = complex(group.mean())
            nus = _staircase(A - lam * np.eye(n), thresh, cap=n)
            eta = tuple(nus)
            if sum(eta) != len(group) or any(eta[i] < eta[i + 1] for i in range(len(eta) - 1)):
                ok = False
                break
            table[lam] = eta
        if not ok:
            continue
        keys = np.array(list(table), dtype=complex)
        if len(keys) > 1:
            sep = np.abs(keys[:, None] - keys[None, :]) + np.diag(np.full(len(keys), np.inf))
            if sep.min() < 10 * t:
                # too close to call at this tolerance; try a coarser grouping
                continue
        return WeyrChar(table, t)
    raise IllConditioned(
        f"no consistent Jordan structure with clusters 10x apart for grouping tolerances "
        f"{ladder[0]:.3g}..{ladder[-1]:.3g}")


# --------------------------------------------------------------------------
# metric space of Weyr characteristics

def _aligned_tables(eta: WeyrChar, mu: WeyrChar):
    """Pairs of sequences over the joint eigenvalue support."""
    tol = max(eta.merge_tol, mu.merge_tol)
    keys_e = list(eta.table)
    keys_m = list(mu.table)
    used = set()
    out = []
    for lam in keys_e:
        match = None
        for j, nu in enumerate(keys_m):
            if j not in used and abs(nu - lam) <= tol:
                match = j
                break
        if match is None:
            out.append((lam, eta.table[lam], ()))
        else:
            used.add(match)
            out.append((lam, eta.table[lam], mu.table[keys_m[match]]))
    for j, nu in enumerate(keys_m):
        if j not in used:
            out.append((nu, (), mu.table[nu]))
    return out


def _pad(seq, length):
    return list(seq) + [0] * (length - len(seq))


def weyr_distance(eta: WeyrChar, mu: WeyrChar) -> int:
    """max over (i, lambda) of |eta_i(lambda) - mu_i(lambda)|."""
    best = 0
    for _, a, b in _aligned_tables(eta, mu):
        m = max(len(a), len(b))
        best = max(best, max((abs(x - y) for x, y in zip(_pad(a, m), _pad(b, m))), default=0))
    return best


def weyr_pad(mu: WeyrChar, n: int) -> WeyrChar:
    """Extend mu (size m) to size n by a tail of ones under one eigenvalue.

    The eigenvalue is the one with the largest eta_1, ties going to the
    smallest (re, im); an empty characteristic is padded at 0.
    """
    m = mu.n
    if n < m:
        raise PreconditionViolated(f"cannot pad size {m} down to {n}")
    if n == m:
        return mu
    table = dict(mu.table)
    if not table:
        return WeyrChar({0j: (1,) * n}, mu.merge_tol)
    lam0 = max(table, key=lambda lam: (table[lam][0], -lam.real, -lam.imag))
    table[lam0] = table[lam0] + (1,) * (n - m)
    return WeyrChar(table, mu.merge_tol)


def weyr_geodesic_step(eta: WeyrChar, mu: WeyrChar) -> WeyrChar:
    """A characteristic at distance 1 from one endpoint and k - 1 from the other.

    Entries where ``eta - mu`` reaches +k are lowered by one and entries
    where it reaches -k are raised by one. The endpoints are swapped first
    when that would make the result larger than ``eta``, so the result has
    size at most ``eta.n`` and lies next to whichever endpoint played the
    role of ``eta``.
    """
    k = weyr_distance(eta, mu)
    if k < 2:
        raise DistanceTooSmall(f"distance {k} < 2")
    rows = _aligned_tables(eta, mu)

    def extremes(sign):
        plus, minus = [], []
        for lam, a, b in rows:
            m = max(len(a), len(b))
            for i, (x, y) in enumerate(zip(_pad(a, m), _pad(b, m))):
                d = sign * (x - y)
                if d == k:
                    plus.append((lam, i))
                elif d == -k:
                    minus.append((lam, i))
        return plus, minus

    sign = 1
    s_plus, s_minus = extremes(1)
    if len(s_plus) < len(s_minus):
        sign = -1
        s_plus, s_minus = extremes(-1)
    base = {lam: _pad(a if sign == 1 else b, max(len(a), len(b))) for lam, a, b in rows}
    for lam, i in s_plus:
        base[lam][i] -= 1
    for lam, i in s_minus:
        base[lam][i] += 1
    return WeyrChar(base, max(eta.merge_tol, mu.merge_tol))


def weyr_geodesic_chain(eta: WeyrChar, mu: WeyrChar) -> list[WeyrChar]:
    """eta = nu_0, ..., nu_k = mu inside one space Im_n, consecutive distances 1."""
    if eta.n != mu.n:
        raise PreconditionViolated("chain endpoints must have the same size")
    n = eta.n
    head, tail = [eta], [mu]
    while True:
        a, b = head[-1], tail[-1]
        k = weyr_distance(a, b)
        if k < 2:
            break
        nu = weyr_pad(weyr_geodesic_step(a, b), n)
        if weyr_distance(a, nu) == 1 and weyr_distance(nu, b) == k - 1:
            head.append(nu)
        elif weyr_distance(b, nu) == 1 and weyr_distance(nu, a) == k - 1:
            tail.append(nu)
        else:
            raise AssertionError("geodesic step left the geodesic")
    if weyr_distance(head[-1], tail[-1]) == 0:
        tail.pop()
    return head + tail[::-1]


def thompson_reachable(eta_a: WeyrChar, eta_b: WeyrChar, k: int) -> bool:
    """Whether a rank <= k perturbation can turn Weyr structure eta_a into eta_b."""
    return eta_b.n == eta_a.n and weyr_distance(eta_a, eta_b) <= k


def segre_interlace_check(s_a: SegreChar, s_b: SegreChar) -> bool:
    """q_i(B) >= q_{i+1}(A) and q_i(A) >= q_{i+1}(B) at every eigenvalue."""
    if s_a.n != s_b.n:
        raise PreconditionViolated("Segre characteristics of different sizes")
    rows = _aligned_tables(WeyrChar(s_a.table, s_a.merge_tol), WeyrChar(s_b.table, s_b.merge_tol))
    for _, qa, qb in rows:
        m = max(len(qa), len(qb)) + 1
        qa, qb = _pad(qa, m), _pad(qb, m)
        for i in range(m - 1):
            if qb[i] < qa[i + 1] or qa[i] < qb[i + 1]:
                return False
    return True


# --------------------------------------------------------------------------
# rank-one spectrum assignment for nonderogatory matrices

KRYLOV_COND_LIMIT = 1e12


def rank1_assign_spectrum(A, M: ComplexMultiset, tol: float = DEFAULT_TOL,
                          seed: int = 0, attempts: int = 8) -> np.ndarray:
    """A' with spectrum M and rank(A - A') <= 1, for nonderogatory A.

    In the Krylov basis ``T = [v, Av, ..., A^{n-1} v]`` of a cyclic vector v,
    A is a companion matrix; only its last column (the characteristic
    polynomial) changes, which is a rank-one update ``(T delta) e_n^T T^{-1}``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise PreconditionViolated("square matrix required")
    if len(M) != n:
        raise PreconditionViolated(f"|M| = {len(M)} but n = {n}")
    w = weyr_from_matrix(A, tol)
    if any(seq[0] != 1 for seq in w.table.values()):
        raise Derogatory("an eigenvalue has geometric multiplicity > 1")

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(attempts):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= linalg.norm(v)
        T = np.empty((n, n), dtype=complex)
        T[:, 0] = v
        for j in range(1, n):
            T[:, j] = A @ T[:, j - 1]
        c = np.linalg.cond(T)
        if np.isfinite(c) and (best is None or c < best[0]):
            best = (c, T)
    if best is None:
        raise CyclicVectorFailure(f"no cyclic vector found in {attempts} attempts")
    cond, T = best
    if cond > KRYLOV_COND_LIMIT:
        raise IllConditionedKrylov(f"Krylov basis condition number {cond:.3g}")

    # companion last column: A^n v = T @ last
    last = linalg.solve(T, A @ T[:, -1])
    target = np.poly(M.values())[::-1][:-1]   # x^n + ... : low-order coefficients
    delta = -target - last
    if linalg.norm(delta) <= tol * max(1.0, linalg.norm(last)):
        return A.copy()
    row = linalg.solve(T.T, np.eye(n)[:, -1])   # e_n^T T^{-1}
    return A + np.outer(T @ delta, row)
