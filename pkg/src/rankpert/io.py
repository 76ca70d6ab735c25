"""Plain-text formats for matrices, multisets and Weyr characteristics.

Matrix:   first line ``rows cols``, then rows*cols lines ``re im`` in row-major order.
Multiset: one line ``re im count`` per support point.
Weyr:     one line ``re im i eta`` per eigenvalue and 1-based index i.

Blank lines and lines starting with ``#`` are ignored. Floats are written
with 17 significant digits, so files round-trip exactly.
"""
from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import numpy as np

from .errors import ParseError
from .multiset import ComplexMultiset
from .weyr import WeyrChar

__all__ = [
    "parse_matrix",
    "format_matrix",
    "read_matrix",
    "parse_multiset",
    "format_multiset",
    "read_multiset",
    "parse_weyr",
    "format_weyr",
    "read_weyr",
    "fmt_float",
]


def fmt_float(x: float) -> str:
    x = float(x)
    return "0" if x == 0 else "%.17g" % x


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s and not s.startswith("#"):
            out.append((no, s.split()))
    return out


def _num(tok: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"line {no}: not a number: {tok!r}") from None
    if not math.isfinite(v):
        raise ParseError(f"line {no}: non-finite value {tok!r}")
    return v


def _int(tok: str, no: int, lo: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"line {no}: not an integer: {tok!r}") from None
    if v < lo:
        raise ParseError(f"line {no}: expected an integer >= {lo}, got {v}")
    return v


def _fields(no: int, toks: list[str], k: int) -> None:
    if len(toks) != k:
        raise ParseError(f"line {no}: expected {k} fields, got {len(toks)}")


def parse_matrix(text: str) -> np.ndarray:
    rows = _lines(text)
    if not rows:
        raise ParseError("empty matrix file")
    no, head = rows[0]
    _fields(no, head, 2)
    r, c = _int(head[0], no, 1), _int(head[1], no, 1)
    body = rows[1:]
    if len(body) != r * c:
        raise ParseError(f"expected {r * c} entries, got {len(body)}")
    vals = []
    for no, toks in body:
        _fields(no, toks, 2)
        vals.append(complex(_num(toks[0], no), _num(toks[1], no)))
    return np.array(vals, dtype=complex).reshape(r, c)


def format_matrix(A) -> str:
    A = np.asarray(A, dtype=complex)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines += [f"{fmt_float(z.real)} {fmt_float(z.imag)}" for z in A.ravel()]
    return "\n".join(lines) + "\n"


def parse_multiset(text: str, merge_tol: float = 0.0) -> ComplexMultiset:
    pairs = []
    for no, toks in _lines(text):
        _fields(no, toks, 3)
        pairs.append((complex(_num(toks[0], no), _num(toks[1], no)), _int(toks[2], no, 1)))
    if not pairs:
        raise ParseError("empty multiset file")
    return ComplexMultiset.from_counts(pairs, merge_tol)


def format_multiset(m: ComplexMultiset) -> str:
    return "".join(f"{fmt_float(p.real)} {fmt_float(p.imag)} {c}\n" for p, c in zip(m.support, m.counts))


def parse_weyr(text: str, merge_tol: float = 0.0) -> WeyrChar:
    table: dict[complex, dict[int, int]] = defaultdict(dict)
    for no, toks in _lines(text):
        _fields(no, toks, 4)
        lam = complex(_num(toks[0], no), _num(toks[1], no))
        i = _int(toks[2], no, 1)
        if i in table[lam]:
            raise ParseError(f"line {no}: duplicate entry for index {i}")
        table[lam][i] = _int(toks[3], no, 0)
    out = {}
    for lam, entries in table.items():
        m = max(entries)
        if sorted(entries) != list(range(1, m + 1)):
            raise ParseError(f"eigenvalue {lam}: indices must run 1..{m} without gaps")
        out[lam] = tuple(entries[i] for i in range(1, m + 1))
    try:
        return WeyrChar(out, merge_tol)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_weyr(w: WeyrChar) -> str:
    return "".join(
        f"{fmt_float(lam.real)} {fmt_float(lam.imag)} {i} {eta}\n"
        for lam, seq in w.table.items()
        for i, eta in enumerate(seq, 1)
    )


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def read_matrix(path) -> np.ndarray:
    return parse_matrix(_read(path))


def read_multiset(path, merge_tol: float = 0.0) -> ComplexMultiset:
    return parse_multiset(_read(path), merge_tol)


def read_weyr(path, merge_tol: float = 0.0) -> WeyrChar:
    return parse_weyr(_read(path), merge_tol)
