"""Finite complex multisets and the disk-count distances between them.

``dc(A, B)`` is the largest discrepancy ``| |A ∩ S| - |B ∩ S| |`` over closed
disks ``S``; ``tilde_dc`` also allows closed disk complements and closed
half-planes. Both only depend on the signed weight ``chi_A - chi_B``.

The planar computation lifts points to the paraboloid ``(x, |x|^2)``, where
disks become half-spaces. Every disk-cut subset is then found next to a
circle through three non-collinear support points: its strict interior plus
a cyclically contiguous run of the points lying on that circle.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    CertificateError,
    DistanceTooSmall,
    IncompatibleTolerance,
    NotOnCurve,
    PoleOnSupport,
    PreconditionViolated,
)
from .mats import MobiusMap

# relative tolerances for "on the circle / on the line" decisions
GEOM_REL_TOL = 1e-9
CURVE_REL_TOL = 1e-9
DEFAULT_MERGE_REL = 1e-8

__all__ = [
    "ComplexMultiset",
    "Region",
    "Curve",
    "ms_difference",
    "ms_union",
    "ms_common",
    "ms_intersect_region",
    "dc_distance",
    "tilde_dc_distance",
    "mobius_apply_multiset",
    "interval_dc",
    "interlacing_check",
    "geodesic_step_on_curve",
    "geodesic_chain_on_curve",
]


def _cluster_labels(points: np.ndarray, tol: float) -> np.ndarray:
    """Single-linkage clusters at distance ``<= tol``, labelled in input order."""
    n = len(points)
    if n == 0:
        return np.zeros(0, dtype=int)
    if tol <= 0:
        _, labels = np.unique(points, return_inverse=True)
        return labels.ravel()
    close = np.abs(points[:, None] - points[None, :]) <= tol
    if np.count_nonzero(close) == n:
        return np.arange(n)
    _, labels = connected_components(csr_matrix(close), directed=False)
    return labels


def _lex_order(values: np.ndarray) -> np.ndarray:
    return np.lexsort((values.imag, values.real))


@dataclass(frozen=True)
class ComplexMultiset:
    """Support points with positive multiplicities.

    Support points closer than `merge_tol` are identified (single linkage,
    count-weighted mean as the representative); points are kept sorted by
    ``(re, im)``.
    """

    points: tuple = ()
    counts: tuple = ()
    merge_tol: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        cnt = np.asarray(self.counts, dtype=int).ravel()
        if pts.shape != cnt.shape:
            raise ValueError("points and counts must have equal length")
        if np.any(cnt < 1):
            raise ValueError("counts must be positive")
        if not np.all(np.isfinite(pts)):
            raise ValueError("multiset points must be finite")
        if self.merge_tol < 0:
            raise ValueError("merge_tol must be nonnegative")
        labels = _cluster_labels(pts, self.merge_tol)
        k = labels.max() + 1 if len(labels) else 0
        tot = np.bincount(labels, weights=cnt, minlength=k).astype(int)
        rep = (np.bincount(labels, weights=cnt * pts.real, minlength=k)
               + 1j * np.bincount(labels, weights=cnt * pts.imag, minlength=k)) / np.maximum(tot, 1)
        if k and self.merge_tol <= 0:
            rep = np.array([pts[labels == j][0] for j in range(k)], dtype=complex)
        order = _lex_order(rep)
        object.__setattr__(self, "points", tuple(complex(v) for v in rep[order]))
        object.__setattr__(self, "counts", tuple(int(c) for c in tot[order]))
        object.__setattr__(self, "merge_tol", float(self.merge_tol))

    @classmethod
    def from_values(cls, values: Iterable[complex], merge_tol: float | None = None) -> "ComplexMultiset":
        """Multiset of a list of (numerical) values, e.g. a spectrum.

        Default `merge_tol` is ``1e-8 * max |value|``.
        """
        vals = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                          dtype=complex).ravel()
        if merge_tol is None:
            merge_tol = DEFAULT_MERGE_REL * (float(np.max(np.abs(vals))) if vals.size else 0.0)
        return cls(tuple(vals), (1,) * len(vals), merge_tol)

    @classmethod
    def from_counts(cls, pairs, merge_tol: float = 0.0) -> "ComplexMultiset":
        pairs = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        return cls(tuple(p for p, _ in pairs), tuple(c for _, c in pairs), merge_tol)

    @classmethod
    def spectrum(cls, A, merge_tol: float | None = None) -> "ComplexMultiset":
        return cls.from_values(np.linalg.eigvals(np.asarray(A, dtype=complex)), merge_tol)

    def __len__(self) -> int:
        return sum(self.counts)

    @property
    def support(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    def values(self) -> np.ndarray:
        """All elements, repeated by multiplicity."""
        return np.repeat(self.support, self.counts)

    def count(self, x: complex) -> int:
        for p, c in zip(self.points, self.counts):
            if abs(p - x) <= self.merge_tol:
                return c
        return 0

    def with_tol(self, merge_tol: float) -> "ComplexMultiset":
        return ComplexMultiset(self.points, self.counts, merge_tol)

    def same_as(self, other: "ComplexMultiset") -> bool:
        """Equality up to the identification tolerance."""
        _, ca, cb = _align(self, other)
        return bool(np.array_equal(ca, cb))

    def __repr__(self) -> str:
        body = ", ".join(f"{p:g}" + (f"x{c}" if c > 1 else "") for p, c in zip(self.points, self.counts))
        return f"ComplexMultiset({{{body}}})"


def _align(A: ComplexMultiset, B: ComplexMultiset):
    """Common support of A and B with both count vectors."""
    if A.merge_tol != B.merge_tol:
        raise IncompatibleTolerance(f"merge_tol differs: {A.merge_tol} vs {B.merge_tol}")
    pa, pb = A.support, B.support
    pts = np.concatenate([pa, pb])
    cnt = np.concatenate([A.counts, B.counts]).astype(int)
    from_a = np.arange(len(pts)) < len(pa)
    labels = _cluster_labels(pts, A.merge_tol)
    k = labels.max() + 1 if len(labels) else 0
    vals = np.empty(k, dtype=complex)
    ca = np.zeros(k, dtype=int)
    cb = np.zeros(k, dtype=int)
    for j in range(k):
        sel = labels == j
        src = sel & from_a if np.any(sel & from_a) else sel
        vals[j] = np.average(pts[src], weights=cnt[src])
        ca[j] = cnt[sel & from_a].sum()
        cb[j] = cnt[sel & ~from_a].sum()
    order = _lex_order(vals)
    return vals[order], ca[order], cb[order]


def _from_aligned(vals, counts, merge_tol) -> ComplexMultiset:
    keep = counts > 0
    return ComplexMultiset(tuple(vals[keep]), tuple(counts[keep]), merge_tol)


def ms_difference(A: ComplexMultiset, B: ComplexMultiset) -> ComplexMultiset:
    vals, ca, cb = _align(A, B)
    return _from_aligned(vals, np.maximum(0, ca - cb), A.merge_tol)


def ms_union(A: ComplexMultiset, B: ComplexMultiset) -> ComplexMultiset:
    vals, ca, cb = _align(A, B)
    return _from_aligned(vals, ca + cb, A.merge_tol)


def ms_common(A: ComplexMultiset, B: ComplexMultiset) -> ComplexMultiset:
    """A minus (A minus B), i.e. the pointwise minimum of multiplicities."""
    vals, ca, cb = _align(A, B)
    return _from_aligned(vals, np.minimum(ca, cb), A.merge_tol)


@dataclass(frozen=True)
class Region:
    """Closed disk ``|x - center| <= radius``, its complement ``>= radius``, or
    the closed half-plane ``Im((x - b) / a) >= 0``."""

    kind: str
    center: complex = 0j
    radius: float = 0.0
    a: complex = 1.0
    b: complex = 0j

    def __post_init__(self):
        if self.kind not in ("disk", "disk-complement", "half-plane"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.kind == "half-plane" and self.a == 0:
            raise ValueError("half-plane needs a != 0")

    @classmethod
    def disk(cls, center, radius):
        return cls("disk", complex(center), float(radius))

    @classmethod
    def disk_complement(cls, center, radius):
        return cls("disk-complement", complex(center), float(radius))

    @classmethod
    def half_plane(cls, a, b):
        return cls("half-plane", a=complex(a), b=complex(b))

    def contains(self, x, tol: float = 0.0):
        x = np.asarray(x, dtype=complex)
        if self.kind == "disk":
            return np.abs(x - self.center) <= self.radius + tol
        if self.kind == "disk-complement":
            return np.abs(x - self.center) >= self.radius - tol
        return ((x - self.b) / self.a).imag >= -tol


def ms_intersect_region(A: ComplexMultiset, S: Region, tol: float = 0.0) -> ComplexMultiset:
    pts = A.support
    inside = S.contains(pts, tol) if len(pts) else np.zeros(0, bool)
    return _from_aligned(pts, np.where(inside, np.array(A.counts, dtype=int), 0), A.merge_tol)


# --------------------------------------------------------------------------
# planar discrepancy

def _signed_support(A: ComplexMultiset, B: ComplexMultiset):
    vals, ca, cb = _align(A, B)
    w = ca - cb
    keep = w != 0
    return vals[keep], w[keep]


def _diameter(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    return float(np.max(np.abs(pts[:, None] - pts[None, :])))


def _run_sums(w: np.ndarray, cyclic: bool) -> tuple[int, int]:
    """(min, max) over sums of contiguous runs of `w` (empty run included)."""
    m = len(w)
    lo = hi = 0
    ww = np.concatenate([w, w]) if cyclic else w
    csum = np.concatenate([[0], np.cumsum(ww)])
    for i in range(m):
        top = i + m if cyclic else m
        s = csum[i + 1: top + 1] - csum[i]
        if len(s):
            lo, hi = min(lo, int(s.min())), max(hi, int(s.max()))
    return lo, hi


def _collinear_frame(pts: np.ndarray, diam: float):
    """Coordinates along the line through the support, or None if not collinear."""
    D = np.abs(pts[:, None] - pts[None, :])
    i, j = np.unravel_index(np.argmax(D), D.shape)
    u = (pts[j] - pts[i]) / abs(pts[j] - pts[i])
    rel = (pts - pts[i]) * np.conj(u)
    if np.all(np.abs(rel.imag) <= GEOM_REL_TOL * diam):
        return rel.real
    return None


def _disk_range(pts: np.ndarray, w: np.ndarray) -> tuple[int, int]:
    """(min, max) of the signed count over subsets cut out by closed disks."""
    n = len(pts)
    if n == 0:
        return 0, 0
    lo, hi = min(0, int(w.min())), max(0, int(w.max()))
    if n == 1:
        return lo, hi
    diam = _diameter(pts)
    t = _collinear_frame(pts, diam)
    if t is not None:
        # a disk meets a line in a segment
        slo, shi = _run_sums(w[np.argsort(t)], cyclic=False)
        return min(lo, slo), max(hi, shi)

    z = (pts - pts.mean()) / diam
    tri = np.array(list(combinations(range(n), 3)))
    a, b, c = z[tri[:, 0]], z[tri[:, 1]], z[tri[:, 2]]
    cross = ((b - a).conjugate() * (c - a)).imag
    ok = np.abs(cross) > GEOM_REL_TOL
    tri, a, b, c, cross = tri[ok], a[ok], b[ok], c[ok], cross[ok]
    if len(tri):
        # circumcentre of a, b, c
        aa, bb, cc = np.abs(a) ** 2, np.abs(b) ** 2, np.abs(c) ** 2
        d = 2 * cross
        ux = (aa * (b.imag - c.imag) + bb * (c.imag - a.imag) + cc * (a.imag - b.imag)) / d
        uy = (aa * (c.real - b.real) + bb * (a.real - c.real) + cc * (b.real - a.real)) / d
        centre = ux + 1j * uy
        r = np.abs(a - centre)
        gap = np.abs(z[None, :] - centre[:, None]) - r[:, None]
        eps = GEOM_REL_TOL * np.maximum(1.0, r)[:, None]
        inside = gap < -eps
        on = np.abs(gap) <= eps
        base = inside @ w
        n_on = on.sum(axis=1)
        simple = n_on <= 3
        # up to three points on a circle: every subset is cyclically contiguous
        hi_t = base + on @ np.maximum(w, 0)
        lo_t = base + on @ np.minimum(w, 0)
        if np.any(simple):
            lo, hi = min(lo, int(lo_t[simple].min())), max(hi, int(hi_t[simple].max()))
        seen = set()
        for idx in np.flatnonzero(~simple):
            key = (frozenset(np.flatnonzero(on[idx])), int(base[idx]))
            if key in seen:
                continue
            seen.add(key)
            members = np.flatnonzero(on[idx])
            ang = np.angle(z[members] - centre[idx])
            rlo, rhi = _run_sums(w[members][np.argsort(ang)], cyclic=True)
            lo, hi = min(lo, int(base[idx]) + rlo), max(hi, int(base[idx]) + rhi)
    return lo, hi


def _halfplane_range(pts: np.ndarray, w: np.ndarray) -> tuple[int, int]:
    """(min, max) of the signed count over closed half-planes."""
    total = int(w.sum())
    lo, hi = min(0, total), max(0, total)
    n = len(pts)
    if n == 0:
        return lo, hi
    if n == 1:
        return min(lo, int(w[0])), max(hi, int(w[0]))
    diam = _diameter(pts)
    for i, j in combinations(range(n), 2):
        u = (pts[j] - pts[i]) / abs(pts[j] - pts[i])
        rel = (pts - pts[i]) * np.conj(u)
        on = np.abs(rel.imag) <= GEOM_REL_TOL * diam
        left = int(w[(rel.imag > 0) & ~on].sum())
        right = int(w[(rel.imag < 0) & ~on].sum())
        wl = w[on][np.argsort(rel.real[on])]
        ends = np.concatenate([np.cumsum(np.concatenate([[0], wl])),
                               np.cumsum(np.concatenate([[0], wl[::-1]]))])
        for side in (left, right):
            lo, hi = min(lo, side + int(ends.min())), max(hi, side + int(ends.max()))
    return lo, hi


def dc_distance(A: ComplexMultiset, B: ComplexMultiset) -> int:
    pts, w = _signed_support(A, B)
    lo, hi = _disk_range(pts, w)
    return max(-lo, hi)


def tilde_dc_distance(A: ComplexMultiset, B: ComplexMultiset) -> int:
    pts, w = _signed_support(A, B)
    total = int(w.sum())
    dlo, dhi = _disk_range(pts, w)
    hlo, hhi = _halfplane_range(pts, w)
    # closed complement of a disk = everything minus an open disk
    return max(-dlo, dhi, abs(total - dlo), abs(total - dhi), -hlo, hhi)


def mobius_apply_multiset(m: MobiusMap, A: ComplexMultiset, merge_tol: float | None = None) -> ComplexMultiset:
    pts = A.support
    den = m.a * pts + m.b
    if np.any(np.abs(den) <= 1e-14 * (abs(m.a) * np.abs(pts) + abs(m.b))):
        raise PoleOnSupport(f"pole {m.pole} is a support point")
    img = (m.c * pts + m.d) / den
    return ComplexMultiset(tuple(img), A.counts, A.merge_tol if merge_tol is None else merge_tol)


# --------------------------------------------------------------------------
# multisets on a line or circle

@dataclass(frozen=True)
class Curve:
    """A straight line ``point + t * direction`` or a circle ``|x - center| = radius``."""

    kind: str
    point: complex = 0j
    direction: complex = 1.0
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in ("line", "circle"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == "line" and self.direction == 0:
            raise ValueError("line direction must be nonzero")
        if self.kind == "circle" and not self.radius > 0:
            raise ValueError("circle radius must be positive")

    @classmethod
    def line(cls, point=0j, direction=1.0):
        return cls("line", complex(point), complex(direction))

    @classmethod
    def circle(cls, center=0j, radius=1.0):
        return cls("circle", complex(center), radius=float(radius))

    @classmethod
    def real_line(cls):
        return cls.line(0j, 1.0)

    @classmethod
    def unit_circle(cls):
        return cls.circle(0j, 1.0)

    @property
    def center(self) -> complex:
        return self.point

    def param(self, x) -> np.ndarray:
        """Line coordinate, or anticlockwise angle in [0, 2*pi)."""
        x = np.asarray(x, dtype=complex)
        if self.kind == "line":
            return ((x - self.point) * np.conj(self.direction)).real / abs(self.direction) ** 2
        return np.mod(np.angle(x - self.point), 2 * np.pi)

    def at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return self.point + t * self.direction
        return self.point + self.radius * np.exp(1j * t)

    def offset(self, x) -> np.ndarray:
        """Distance of `x` from the curve."""
        x = np.asarray(x, dtype=complex)
        if self.kind == "line":
            return np.abs(((x - self.point) * np.conj(self.direction)).imag) / abs(self.direction)
        return np.abs(np.abs(x - self.point) - self.radius)

    def tolerance(self, x, merge_tol: float = 0.0) -> float:
        x = np.asarray(x, dtype=complex)
        if self.kind == "circle":
            ref = self.radius
        else:
            ref = float(np.max(np.abs(x - self.point))) if x.size else 0.0
        return max(merge_tol, CURVE_REL_TOL * max(ref, 1e-300))


def _cyclic_support(A: ComplexMultiset, B: ComplexMultiset, curve: Curve):
    """Joint support ordered along the curve, with both count vectors."""
    vals, ca, cb = _align(A, B)
    if len(vals) and np.any(curve.offset(vals) > curve.tolerance(vals, A.merge_tol)):
        raise NotOnCurve("a support point is off the curve")
    order = np.argsort(curve.param(vals), kind="stable")
    return vals[order], ca[order], cb[order]


def interval_dc(A: ComplexMultiset, B: ComplexMultiset, curve: Curve) -> int:
    """tilde-dc of co-curve multisets by brute force over closed arcs.

    Arcs run between joint support points in the curve's cyclic order; on a
    line the order wraps through infinity, which adds rays and complements
    of segments.
    """
    vals, ca, cb = _cyclic_support(A, B, curve)
    w = ca - cb
    r = len(w)
    best = 0
    for i in range(r):
        for length in range(1, r + 1):
            idx = [(i + s) % r for s in range(length)]
            best = max(best, abs(int(w[idx].sum())))
    return best


def interlacing_check(A: ComplexMultiset, B: ComplexMultiset, curve: Curve) -> bool:
    """Strict alternation of two equal-size, disjoint, simple multisets along `curve`."""
    if len(A) != len(B):
        raise PreconditionViolated("interlacing needs |A| = |B|")
    if any(c > 1 for c in A.counts + B.counts):
        raise PreconditionViolated("interlacing needs multiplicity-one sets")
    vals, ca, cb = _cyclic_support(A, B, curve)
    if np.any((ca > 0) & (cb > 0)):
        raise PreconditionViolated("A and B share a point")
    labels = ca > 0
    return bool(np.all(labels[1:] != labels[:-1]))


def geodesic_step_on_curve(A: ComplexMultiset, B: ComplexMultiset, curve: Curve) -> ComplexMultiset:
    """C on the curve with tilde-dc(A, C) = 1 and tilde-dc(C, B) = k - 1.

    Each point of ``A \\ B`` moves to its successor in the cyclic order of the
    joint support of the two differences; the common part is kept.
    """
    if len(A) != len(B):
        raise PreconditionViolated("geodesic step needs |A| = |B|")
    k = interval_dc(A, B, curve)
    if k < 2:
        raise DistanceTooSmall(f"distance {k} < 2")
    vals, ca, cb = _cyclic_support(A, B, curve)
    common = np.minimum(ca, cb)
    a, b = ca - common, cb - common
    gamma = np.flatnonzero((a > 0) | (b > 0))
    t = curve.param(vals[gamma])
    span = 2 * np.pi if curve.kind == "circle" else max(float(np.ptp(t)), 1e-300)
    if len(t) > 1 and np.min(np.diff(t)) <= CURVE_REL_TOL * span:
        raise PreconditionViolated("ambiguous cyclic order: two support points coincide along the curve")
    ag = a[gamma]
    in_a = ag > 0
    prev_in_a = np.roll(in_a, 1)
    cg = np.maximum(0, ag - 1) + prev_in_a.astype(int)
    counts = common.copy()
    counts[gamma] += cg
    C = _from_aligned(vals, counts, A.merge_tol)
    if interval_dc(A, C, curve) != 1 or interval_dc(C, B, curve) != k - 1:
        raise CertificateError("geodesic step failed its distance check")
    return C


def geodesic_chain_on_curve(A: ComplexMultiset, B: ComplexMultiset, curve: Curve) -> list[ComplexMultiset]:
    if len(A) != len(B):
        raise PreconditionViolated("geodesic chain needs |A| = |B|")
    k = interval_dc(A, B, curve)
    chain = [A]
    while k >= 2:
        chain.append(geodesic_step_on_curve(chain[-1], B, curve))
        k -= 1
    if k == 1:
        chain.append(B)
    return chain
