"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import os
import subprocess
import sys

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from rankpert.almost import (
    cauchy_det_elimination,
    checkerboard_witness,
    nearest_selfadjoint,
    nearest_unitary_rank,
)
from rankpert.cli import main
from rankpert.interlace import hermitian_assign_spectrum, hermitian_rank1_update, unitary_assign_spectrum
from rankpert.io import format_matrix
from rankpert.mats import arithmetic_distance, numeric_rank
from rankpert.multiset import (
    ComplexMultiset,
    Curve,
    dc_distance,
    geodesic_chain_on_curve,
    interval_dc,
    tilde_dc_distance,
)
from rankpert.normalcheck import run_disk_bound_trials
from rankpert.weyr import (
    SegreChar,
    WeyrChar,
    jordan_matrix,
    segre_interlace_check,
    segre_to_weyr,
    weyr_distance,
    weyr_from_matrix,
    weyr_geodesic_chain,
)
from oracles import partitions
from randmat import crandn, random_hermitian, random_unitary

SEED = 1234


def matched_error(got, want):
    """Largest distance under the best one-to-one matching of two value lists."""
    D = np.abs(np.asarray(got)[:, None] - np.asarray(want)[None, :])
    r, c = linear_sum_assignment(D)
    return float(D[r, c].max())


def test_criterion_1_rank1_update(criterion):
    rng = np.random.default_rng(SEED)
    worst = [0.0, 0.0, 0.0]
    for _ in range(200):
        n = int(rng.integers(2, 13))
        v = np.sort(rng.uniform(-10, 10, 2 * n))
        a, b = (v[0::2], v[1::2]) if rng.integers(2) else (v[1::2], v[0::2])
        u = hermitian_rank1_update(a, b)
        s = linalg.svd(np.diag(a) - u.B, compute_uv=False)
        worst[0] = max(worst[0], np.max(np.abs(u.X.conj().T @ u.X - np.eye(n))))
        worst[1] = max(worst[1], np.max(np.abs(np.sort(linalg.eigvalsh(u.B)) - b)) / np.max(np.abs(b)))
        worst[2] = max(worst[2], s[1] / s[0])
    ok = worst[0] < 1e-9 and worst[1] < 1e-8 and worst[2] < 1e-9
    criterion(1, "rank-one Hermitian update on 200 interlacing pairs", ok,
              "gram %.1e, spectrum %.1e, sigma2/sigma1 %.1e" % tuple(worst))


def test_criterion_2_assignment_end_to_end(criterion):
    rng = np.random.default_rng(SEED)
    bad, worst = 0, 0.0
    line = Curve.real_line()
    for _ in range(100):
        n = int(rng.integers(1, 11))
        A = random_hermitian(rng, n)
        ev = linalg.eigvalsh(A)
        keep = int(rng.integers(0, n + 1))
        vals = np.concatenate([rng.choice(ev, keep, replace=False), rng.integers(-3, 4, n - keep)])
        target = ComplexMultiset.from_values(vals.astype(complex))
        B = hermitian_assign_spectrum(A, target)
        sp = ComplexMultiset.from_values(ev.astype(complex))
        scale = max(1.0, np.max(np.abs(vals)), np.max(np.abs(ev)))
        merge = max(sp.merge_tol, target.merge_tol)
        d = interval_dc(sp.with_tol(merge), target.with_tol(merge), line)
        err = matched_error(linalg.eigvalsh(B), vals) / scale
        worst = max(worst, err)
        bad += arithmetic_distance(A, B) != d or err > 1e-7

    circle = Curve.unit_circle()
    for _ in range(100):
        n = int(rng.integers(1, 11))
        U = random_unitary(rng, n)
        ev = linalg.eigvals(U)
        keep = int(rng.integers(0, n + 1))
        vals = np.concatenate([rng.choice(ev, keep, replace=False),
                               np.exp(2j * np.pi * rng.integers(0, 8, n - keep) / 8)])
        target = ComplexMultiset.from_values(vals)
        B = unitary_assign_spectrum(U, target)
        sp = ComplexMultiset.from_values(ev)
        merge = max(sp.merge_tol, target.merge_tol)
        d = interval_dc(sp.with_tol(merge), target.with_tol(merge), circle)
        err = matched_error(linalg.eigvals(B), vals)
        worst = max(worst, err)
        bad += arithmetic_distance(U, B) != d or err > 1e-7
    criterion(2, "Hermitian and unitary assignment reach rank = dc", bad == 0,
              f"{bad} failures of 200, worst spectrum error {worst:.1e}")


def test_criterion_3_thompson_brute_force(criterion):
    rng = np.random.default_rng(SEED)
    structures = [p for n in (3, 4) for p in partitions(n)]
    violations = 0
    for segre in structures:
        J = jordan_matrix({0: segre})
        source = weyr_from_matrix(J)
        n = len(J)
        for t in range(1000):
            if t % 2:
                u, v = crandn(rng, n), crandn(rng, n)
            else:  # sparse integer directions reach the degenerate structures
                u, v = rng.integers(-1, 2, n), rng.integers(-1, 2, n)
            w = weyr_from_matrix(J + np.outer(u, v))
            violations += weyr_distance(source, w) > 1
    mismatches = 0
    for n in range(1, 7):
        for p, q in itertools.product(partitions(n), repeat=2):
            sa, sb = SegreChar({0: p}), SegreChar({0: q})
            mismatches += segre_interlace_check(sa, sb) != (weyr_distance(segre_to_weyr(sa), segre_to_weyr(sb)) <= 1)
    criterion(3, "rank-one perturbations stay within Weyr distance 1", violations == 0 and mismatches == 0,
              f"{len(structures)} structures x 1000, {violations} violations, {mismatches} interlace mismatches")


def _curve_pair(rng):
    if rng.integers(2):
        curve = Curve.circle(complex(*rng.normal(size=2)), float(rng.uniform(0.5, 3)))
        t = rng.uniform(0, 2 * np.pi, 10)
    else:
        curve = Curve.line(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
        t = rng.uniform(-3, 3, 10)
    slots = curve.at(np.sort(t)[: int(rng.integers(2, 11))])
    n = int(rng.integers(1, 9))
    a = ComplexMultiset.from_values(slots[rng.integers(0, len(slots), n)], 1e-9)
    b = ComplexMultiset.from_values(slots[rng.integers(0, len(slots), n)], 1e-9)
    return curve, a, b


def test_criterion_4_dc_oracle(criterion):
    rng = np.random.default_rng(SEED)
    mismatch = 0
    for _ in range(200):
        curve, a, b = _curve_pair(rng)
        mismatch += interval_dc(a, b, curve) != tilde_dc_distance(a, b)
    broken = 0
    for _ in range(500):
        vals = rng.integers(-2, 3, (3, 5)) + 1j * rng.integers(-2, 3, (3, 5))
        A, B, C = (ComplexMultiset.from_values(v, 0.0) for v in vals)
        for f in (dc_distance, tilde_dc_distance):
            broken += not (f(A, A) == 0 and f(A, B) == f(B, A) and f(A, C) <= f(A, B) + f(B, C)
                           and (f(A, B) == 0) == A.same_as(B))
    criterion(4, "interval discrepancy equals disk enumeration; metric axioms", mismatch == 0 and broken == 0,
              f"{mismatch} mismatches of 200, {broken} axiom failures of 1000")


def _random_weyr(rng, n):
    eigs = rng.choice(3, int(rng.integers(1, 4)), replace=False)
    cuts = np.sort(rng.integers(0, n + 1, len(eigs) - 1))
    sizes = np.diff(np.concatenate([[0], cuts, [n]]))
    table = {}
    for lam, m in zip(eigs, sizes):
        if m:
            parts = list(partitions(int(m)))
            table[complex(lam)] = parts[int(rng.integers(len(parts)))]
    return WeyrChar(table)


def test_criterion_5_geodesics(criterion):
    rng = np.random.default_rng(SEED)
    bad = 0
    for _ in range(200):
        curve, a, b = _curve_pair(rng)
        chain = geodesic_chain_on_curve(a, b, curve)
        steps = [interval_dc(x, y, curve) for x, y in zip(chain, chain[1:])]
        bad += len(steps) != interval_dc(a, b, curve) or any(s != 1 for s in steps)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        a, b = _random_weyr(rng, n), _random_weyr(rng, n)
        chain = weyr_geodesic_chain(a, b)
        steps = [weyr_distance(x, y) for x, y in zip(chain, chain[1:])]
        bad += len(steps) != weyr_distance(a, b) or any(s != 1 for s in steps)
    criterion(5, "multiset and Weyr chains take unit steps", bad == 0, f"{bad} failures of 400")


def test_criterion_6_nearest_structured(criterion):
    rng = np.random.default_rng(SEED)
    bad_sa = 0
    for _ in range(500):
        n = int(rng.integers(1, 9))
        r = int(rng.integers(0, n + 1))
        A = random_hermitian(rng, n) + crandn(rng, n, r) @ crandn(rng, r, n)
        S = nearest_selfadjoint(A)
        bad_sa += arithmetic_distance(A, S) > arithmetic_distance(A, A.conj().T)
    bad_u, worst = 0, 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        r = int(rng.integers(0, n + 1))
        s = np.ones(n)
        s[:r] = rng.uniform(0.1, 3, r)
        A = random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)
        U = nearest_unitary_rank(A)
        res = float(np.max(np.abs(U.conj().T @ U - np.eye(n))))
        worst = max(worst, res)
        bad_u += res >= 1e-9 or arithmetic_distance(A, U) > arithmetic_distance(A.conj().T @ A, np.eye(n))
    J = np.eye(5, k=-1)
    jordan = arithmetic_distance(J, nearest_unitary_rank(J))
    ok = bad_sa == 0 and bad_u == 0 and jordan <= 1
    criterion(6, "nearest self-adjoint and unitary bounds", ok,
              f"{bad_sa}/500, {bad_u}/200 failures, unitarity {worst:.1e}, Jordan-5 rank {jordan}")


def test_criterion_7_almost_commuting(criterion):
    rng = np.random.default_rng(SEED)
    parts = []
    ok = True
    for n in (4, 8, 16, 64):
        lam = rng.uniform(-1, 1, n)
        w = checkerboard_witness(lam)
        A = np.diag(lam)
        rank = numeric_rank(A @ w.X - w.X @ A)
        a, b = lam[np.array(w.rows) - 1], lam[np.array(w.cols) - 1]
        phase, logabs = cauchy_det_elimination(a, b)
        agree = abs(w.determinant / abs(w.determinant) - phase) < 1e-10 and \
            abs(np.log(abs(w.determinant)) - logabs) < 1e-10 * max(1, abs(logabs))
        good = rank == 2 and w.determinant != 0 and agree and w.lower_bound == n // 2
        ok &= good
        parts.append(f"n={n}: rank {rank}, log|det| {logabs:.2f}")
    criterion(7, "checkerboard witness and Cauchy certificate", ok, "; ".join(parts))


def test_criterion_8_normal_bound(criterion):
    s = run_disk_bound_trials(10_000, n_max=32, k_max=4, seed=SEED, workers=os.cpu_count())
    criterion(8, "disk-dimension and dc bounds over 10^4 commuting normal pairs",
              s.trials == 10_000 and s.violations == 0,
              f"{s.violations} violations, worst slack {s.worst_slack}, worst dc slack {s.worst_dc_slack}")


def _cli_inputs(tmp):
    rng = np.random.default_rng(SEED)
    H = random_hermitian(rng, 4)
    U = random_unitary(rng, 4)
    N = rng.normal(size=(4, 4))
    files = {
        "h.mat": format_matrix(H),
        "u.mat": format_matrix(U),
        "n.mat": format_matrix(N),
        "j.mat": format_matrix(jordan_matrix({0: (2, 1), 1: (1,)})),
        "rt.ms": "-1 0 2\n0.5 0 1\n3 0 1\n",
        "ct.ms": "1 0 1\n0 1 1\n-1 0 1\n0 -1 1\n",
        "a.ms": "0 0 2\n1 1 1\n",
        "b.ms": "5 0 1\n6 0 1\n0 0 1\n",
        "la.ms": "0 0 1\n1 0 1\n2 0 1\n",
        "lb.ms": "5 0 1\n6 0 1\n7 0 1\n",
        "wa.weyr": "0 0 1 2\n0 0 2 1\n",
        "wb.weyr": "0 0 1 1\n1 0 1 1\n2 0 1 1\n",
    }
    for name, text in files.items():
        (tmp / name).write_text(text)
    p = lambda name: str(tmp / name)  # noqa: E731
    return [
        ["rank-distance", p("h.mat"), p("n.mat")],
        ["chain", p("h.mat"), p("n.mat")],
        ["weyr", p("j.mat")],
        ["weyr-dist", p("wa.weyr"), p("wb.weyr")],
        ["thompson-check", p("wa.weyr"), p("wb.weyr"), "--k", "2"],
        ["assign-hermitian", p("h.mat"), p("rt.ms")],
        ["assign-unitary", p("u.mat"), p("ct.ms")],
        ["assign-normal-curve", p("u.mat"), p("ct.ms"), "--circle", "0", "0", "1"],
        ["dc", p("a.ms"), p("b.ms")],
        ["geodesic-multiset", p("la.ms"), p("lb.ms")],
        ["nearest-hermitian", p("n.mat")],
        ["nearest-unitary", p("n.mat")],
        ["almost-commuting", "--n", "8"],
        ["verify-normal-bound", "--trials", "50", "--n", "10", "--k", "3"],
    ]


def test_criterion_9_cli_determinism(criterion, tmp_path, capsys):
    differing = []
    for argv in _cli_inputs(tmp_path):
        outs = []
        for fmt in ("text", "kv"):
            full = argv + ["--seed", "99", "--format", fmt]
            runs = []
            for _ in range(2):
                code = main(full)
                runs.append((code, capsys.readouterr().out))
            proc = subprocess.run([sys.executable, "-m", "rankpert", *full], capture_output=True, text=True)
            runs.append((proc.returncode, proc.stdout))
            outs.append(len(set(runs)) == 1 and runs[0][0] == 0 and "seed" in runs[0][1])
        if not all(outs):
            differing.append(argv[0])
    criterion(9, "CLI reports are byte-identical across runs for all 14 verbs", not differing,
              "differing: " + ",".join(differing) if differing else "3 runs x 2 formats each")
