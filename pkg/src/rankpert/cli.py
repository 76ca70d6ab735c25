"""Command-line interface: ``rankpert <verb> [options] files...``.

Exit status: 0 success, 1 precondition failure, 2 numerical certificate
failure, 64 usage error, 65 unreadable input.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg

from . import almost, interlace, mats, multiset, normalcheck, weyr
from .errors import CertificateError, ParseError, PreconditionError
from .io import fmt_float, format_matrix, format_multiset, format_weyr, read_matrix, read_multiset, read_weyr

EX_OK, EX_PRECONDITION, EX_CERTIFICATE, EX_USAGE, EX_DATAERR = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


@dataclass
class Report:
    items: list = field(default_factory=list)
    blocks: list = field(default_factory=list)

    def add(self, key: str, value) -> None:
        self.items.append((key, _show(value)))

    def block(self, name: str, text: str) -> None:
        self.blocks.append((name, text))

    def render(self, fmt: str) -> str:
        out = []
        if fmt == "kv":
            out += [f"{k}={v}" for k, v in self.items]
            for name, text in self.blocks:
                out += [f"{name}[{i}]={line}" for i, line in enumerate(text.splitlines())]
        else:
            width = max((len(k) for k, _ in self.items), default=0)
            out += [f"{k.ljust(width)}  {v}" for k, v in self.items]
            for name, text in self.blocks:
                out += ["", f"[{name}]", text.rstrip("\n")]
        return "\n".join(out) + "\n"


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer, Fraction, str)):
        return str(v)
    if isinstance(v, (complex, np.complexfloating)):
        return f"{fmt_float(v.real)} {fmt_float(v.imag)}"
    if isinstance(v, (float, np.floating)):
        return "%.6e" % v
    if isinstance(v, (list, tuple)):
        return ",".join(_show(x) for x in v)
    raise TypeError(type(v))


def _emit_matrix(rep: Report, name: str, M, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(format_matrix(M))
        rep.add(f"{name}_file", out)
    else:
        rep.block(name, format_matrix(M))


def _rank_gap(D: np.ndarray, r: int) -> float:
    s = linalg.svd(D, compute_uv=False)
    if r == 0 or r >= len(s):
        return 0.0
    return float(s[r] / s[r - 1])


def _curve(args) -> multiset.Curve | None:
    if args.line is not None:
        p, d = complex(*args.line[:2]), complex(*args.line[2:])
        if d == 0:
            raise UsageError("--line direction must be nonzero")
        return multiset.Curve.line(p, d)
    if args.circle is not None:
        if args.circle[2] <= 0:
            raise UsageError("--circle radius must be positive")
        return multiset.Curve.circle(complex(*args.circle[:2]), args.circle[2])
    return None


# --------------------------------------------------------------------------
# verbs


def cmd_rank_distance(args, rep):
    A, B = read_matrix(args.A), read_matrix(args.B)
    r = mats.arithmetic_distance(A, B, args.tol)
    rep.add("rank", r)
    if A.shape[0] == A.shape[1]:
        rep.add("normalized", mats.normalized_distance(A, B, args.tol))
    s = linalg.svd(A - B, compute_uv=False) if A.shape == B.shape else []
    rep.add("threshold", args.tol * max(linalg.norm(A, 2), linalg.norm(B, 2)))
    rep.add("sigma_last_kept", float(s[r - 1]) if r else 0.0)
    rep.add("sigma_first_dropped", float(s[r]) if r < len(s) else 0.0)


def cmd_chain(args, rep):
    A, B = read_matrix(args.A), read_matrix(args.B)
    chain = (mats.unitary_chain if args.unitary else mats.rank1_chain)(A, B, args.tol)
    steps = [mats.arithmetic_distance(X, Y, args.tol) for X, Y in zip(chain, chain[1:])]
    rep.add("distance", mats.arithmetic_distance(A, B, args.tol))
    rep.add("steps", len(chain) - 1)
    rep.add("step_ranks", steps or "none")
    if args.unitary:
        rep.add("max_unitarity_residual",
                max(float(np.max(np.abs(C.conj().T @ C - np.eye(len(C))))) for C in chain))
    for i, C in enumerate(chain):
        _emit_matrix(rep, f"C{i}", C, f"{args.out_prefix}{i}.mat" if args.out_prefix else None)


def cmd_weyr(args, rep):
    A = read_matrix(args.A)
    w = weyr.weyr_from_matrix(A, args.tol)
    s = weyr.weyr_to_segre(w)
    rep.add("n", w.n)
    for lam, seq in w.table.items():
        rep.add(f"weyr[{_show(lam)}]", list(seq))
        rep.add(f"segre[{_show(lam)}]", list(s.table[lam]))
    rep.block("weyr", format_weyr(w))
    if args.format == "text":
        rep.block("ferrers", weyr.ferrers(w))


def cmd_weyr_dist(args, rep):
    a, b = read_weyr(args.wA, args.merge_tol), read_weyr(args.wB, args.merge_tol)
    rep.add("n_a", a.n)
    rep.add("n_b", b.n)
    rep.add("distance", weyr.weyr_distance(a, b))


def cmd_thompson(args, rep):
    a, b = read_weyr(args.wA, args.merge_tol), read_weyr(args.wB, args.merge_tol)
    d = weyr.weyr_distance(a, b)
    rep.add("k", args.k)
    rep.add("distance", d)
    rep.add("same_size", a.n == b.n)
    rep.add("reachable", weyr.thompson_reachable(a, b, args.k))
    if a.n == b.n:
        rep.add("segre_interlace", weyr.segre_interlace_check(weyr.weyr_to_segre(a), weyr.weyr_to_segre(b)))


def _assign_report(rep, args, A, B, r, target, curve):
    sp = multiset.ComplexMultiset.from_values(linalg.eigvals(A), args.merge_tol)
    rank = mats.arithmetic_distance(A, B, args.tol)
    rep.add("n", A.shape[0])
    rep.add("dc", multiset.interval_dc(sp, target.with_tol(args.merge_tol), curve))
    rep.add("steps", r.steps)
    rep.add("rank", rank)
    rep.add("spectrum_error", r.spectrum_error)
    rep.add("structure_residual", r.structure_residual)
    rep.add("gram_residual", r.max_gram_residual)
    rep.add("rank_gap", _rank_gap(A - B, rank))
    _emit_matrix(rep, "B", B, args.out)


def cmd_assign_hermitian(args, rep):
    A, target = read_matrix(args.A), read_multiset(args.target, args.merge_tol)
    B, r = interlace.hermitian_assign_spectrum(A, target, args.tol, full_output=True)
    _assign_report(rep, args, A, B, r, target, multiset.Curve.real_line())


def cmd_assign_unitary(args, rep):
    U, target = read_matrix(args.A), read_multiset(args.target, args.merge_tol)
    B, r = interlace.unitary_assign_spectrum(U, target, args.tol, full_output=True)
    _assign_report(rep, args, U, B, r, target, multiset.Curve.unit_circle())


def cmd_assign_normal(args, rep):
    crv = _curve(args)
    if crv is None:
        raise UsageError("assign-normal-curve needs --line or --circle")
    A, target = read_matrix(args.A), read_multiset(args.target, args.merge_tol)
    B, r = interlace.normal_on_curve_assign_spectrum(A, target, crv, args.tol, full_output=True)
    _assign_report(rep, args, A, B, r, target, crv)


def cmd_dc(args, rep):
    a, b = read_multiset(args.msA, args.merge_tol), read_multiset(args.msB, args.merge_tol)
    rep.add("dc", multiset.dc_distance(a, b))
    rep.add("tilde_dc", multiset.tilde_dc_distance(a, b))
    crv = _curve(args)
    if crv is not None:
        rep.add("interval_dc", multiset.interval_dc(a, b, crv))


def cmd_geodesic(args, rep):
    crv = _curve(args) or multiset.Curve.real_line()
    a, b = read_multiset(args.msA, args.merge_tol), read_multiset(args.msB, args.merge_tol)
    chain = multiset.geodesic_chain_on_curve(a, b, crv)
    rep.add("distance", multiset.interval_dc(a, b, crv))
    rep.add("length", len(chain) - 1)
    rep.add("step_distances", [multiset.interval_dc(x, y, crv) for x, y in zip(chain, chain[1:])] or "none")
    for i, m in enumerate(chain):
        rep.block(f"M{i}", format_multiset(m))


def cmd_nearest_hermitian(args, rep):
    A = read_matrix(args.A)
    S = almost.nearest_selfadjoint(A)
    rep.add("defect", almost.selfadjoint_defect(A, args.tol))
    rep.add("distance", mats.normalized_distance(A, S, args.tol))
    rep.add("hermitian_residual", float(np.max(np.abs(S - S.conj().T))))
    _emit_matrix(rep, "S", S, args.out)


def cmd_nearest_unitary(args, rep):
    A = read_matrix(args.A)
    U = almost.nearest_unitary_rank(A, args.tol)
    n = A.shape[0]
    rep.add("unitary_defect", almost.unitary_defect(A, args.tol))
    rep.add("rank_AhA_minus_E", mats.arithmetic_distance(A.conj().T @ A, np.eye(n), args.tol))
    rep.add("rank_A_minus_U", mats.arithmetic_distance(A, U, args.tol))
    res = float(np.max(np.abs(U.conj().T @ U - np.eye(n))))
    rep.add("unitarity_residual", res)
    if res > 10 * args.tol:
        raise CertificateError(f"U^*U - E residual {res:.3g}")
    _emit_matrix(rep, "U", U, args.out)


def cmd_almost_commuting(args, rep):
    if args.lambdas:
        lam = np.array([complex(t.replace("i", "j")) for t in args.lambdas.split(",")])
    else:
        if args.n is None:
            raise UsageError("almost-commuting needs --n or --lambdas")
        lam = np.sort(np.random.default_rng(args.seed).uniform(-1, 1, args.n))
    w = almost.checkerboard_witness(lam, args.tol)
    rep.add("n", len(lam))
    rep.add("commutator_rank", w.commutator_rank)
    rep.add("commutator_distance", w.commutator_distance)
    rep.add("commutator_error", w.commutator_error)
    rep.add("certificate_rows", list(w.rows))
    rep.add("certificate_cols", list(w.cols))
    rep.add("determinant", w.determinant)
    rep.add("lower_bound", w.lower_bound)
    rep.add("distance_lower_bound", Fraction(w.lower_bound, len(lam)))
    rep.block("lambdas", "".join(f"{fmt_float(z.real)} {fmt_float(z.imag)}\n" for z in lam))
    if args.out:
        _emit_matrix(rep, "X", w.X, args.out)


def cmd_verify_normal(args, rep):
    if args.n < 1 or args.trials < 0 or args.k < 0:
        raise UsageError("--n must be positive, --trials and --k nonnegative")
    s = normalcheck.run_disk_bound_trials(args.trials, args.n, args.k, args.seed, args.workers)
    rep.add("trials", s.trials)
    rep.add("n_max", args.n)
    rep.add("k_max", args.k)
    rep.add("violations", s.violations)
    rep.add("worst_slack", s.worst_slack)
    rep.add("worst_dc_slack", s.worst_dc_slack)


VERBS = {
    "rank-distance": (cmd_rank_distance, "rank(A - B) of two matrix files"),
    "chain": (cmd_chain, "chain of rank-one steps from A to B"),
    "weyr": (cmd_weyr, "Weyr and Segre characteristics of a matrix"),
    "weyr-dist": (cmd_weyr_dist, "distance between two Weyr characteristics"),
    "thompson-check": (cmd_thompson, "whether a rank-k perturbation links two Weyr structures"),
    "assign-hermitian": (cmd_assign_hermitian, "Hermitian B with given spectrum, minimal rank(A - B)"),
    "assign-unitary": (cmd_assign_unitary, "unitary B with given spectrum, minimal rank(U - B)"),
    "assign-normal-curve": (cmd_assign_normal, "normal B with spectrum on a line or circle"),
    "dc": (cmd_dc, "disk discrepancy distance between two multisets"),
    "geodesic-multiset": (cmd_geodesic, "unit-step chain between multisets on a curve"),
    "nearest-hermitian": (cmd_nearest_hermitian, "(A + A^*)/2 and the self-adjoint defect"),
    "nearest-unitary": (cmd_nearest_unitary, "unitary U with rank(A - U) <= rank(A^*A - E)"),
    "almost-commuting": (cmd_almost_commuting, "checkerboard witness and its Cauchy certificate"),
    "verify-normal-bound": (cmd_verify_normal, "randomized check of the disk-dimension bound"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=mats.DEFAULT_TOL)
    common.add_argument("--merge-tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "kv"), default="text")

    p = _Parser(prog="rankpert", description="Rank perturbations of matrices and their spectra.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    sp = {name: sub.add_parser(name, parents=[common], help=h, description=h) for name, (_, h) in VERBS.items()}

    def curve_opts(q):
        g = q.add_mutually_exclusive_group()
        g.add_argument("--line", type=float, nargs=4, metavar=("RE", "IM", "DRE", "DIM"))
        g.add_argument("--circle", type=float, nargs=3, metavar=("RE", "IM", "R"))

    for name in ("rank-distance", "chain"):
        sp[name].add_argument("A")
        sp[name].add_argument("B")
    sp["chain"].add_argument("--unitary", action="store_true")
    sp["chain"].add_argument("--out-prefix")
    sp["weyr"].add_argument("A")
    for name in ("weyr-dist", "thompson-check"):
        sp[name].add_argument("wA")
        sp[name].add_argument("wB")
    sp["thompson-check"].add_argument("--k", type=int, default=1)
    for name in ("assign-hermitian", "assign-unitary", "assign-normal-curve"):
        sp[name].add_argument("A")
        sp[name].add_argument("target")
        sp[name].add_argument("--out")
    curve_opts(sp["assign-normal-curve"])
    for name in ("dc", "geodesic-multiset"):
        sp[name].add_argument("msA")
        sp[name].add_argument("msB")
        curve_opts(sp[name])
    for name in ("nearest-hermitian", "nearest-unitary"):
        sp[name].add_argument("A")
        sp[name].add_argument("--out")
    ac = sp["almost-commuting"]
    ac.add_argument("--n", type=int)
    ac.add_argument("--lambdas", help="comma-separated values, e.g. 1,2,3+1i,4")
    ac.add_argument("--out")
    vn = sp["verify-normal-bound"]
    vn.add_argument("--n", type=int, default=8)
    vn.add_argument("--trials", type=int, default=1000)
    vn.add_argument("--k", type=int, default=2)
    vn.add_argument("--workers", type=int, default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not (args.tol > 0 and args.merge_tol > 0):
        print("rankpert: error: tolerances must be positive", file=sys.stderr)
        return EX_USAGE
    rep = Report()
    rep.add("verb", args.verb)
    rep.add("seed", args.seed)
    status = EX_OK
    try:
        VERBS[args.verb][0](args, rep)
    except UsageError as exc:
        print(f"rankpert: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except ParseError as exc:
        print(f"rankpert: input error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except CertificateError as exc:
        rep.add("error", f"{type(exc).__name__}: {exc}")
        status = EX_CERTIFICATE
    except (PreconditionError, ValueError) as exc:
        rep.add("error", f"{type(exc).__name__}: {exc}")
        status = EX_PRECONDITION
    rep.add("status", status)
    sys.stdout.write(rep.render(args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
