from fractions import Fraction

import numpy as np
import pytest
from scipy import linalg

from rankpert.almost import (
    cauchy_det_elimination,
    cauchy_matrix,
    cauchy_nonsingular,
    cauchy_solve,
    checkerboard_witness,
    nearest_selfadjoint,
    nearest_unitary_rank,
    selfadjoint_defect,
    unitary_defect,
)
from rankpert.errors import DuplicateEigenvalue, NodeCollision, TooSmall
from rankpert.mats import arithmetic_distance, is_hermitian, normalized_distance, numeric_rank
from oracles import matrix_rank_exact
from randmat import crandn, random_hermitian, random_unitary


def lower_shift(n):
    return np.eye(n, k=-1)


def test_selfadjoint_examples(rng):
    H = random_hermitian(rng, 4)
    assert selfadjoint_defect(H) == 0
    assert np.allclose(nearest_selfadjoint(H), H)
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    S = nearest_selfadjoint(A)
    assert np.allclose(S, [[0, 0.5], [0.5, 0]])
    assert selfadjoint_defect(A) == 1
    assert normalized_distance(A, S) == 1


def test_selfadjoint_bound_random(rng):
    for _ in range(100):
        n = int(rng.integers(1, 8))
        r = int(rng.integers(0, n + 1))
        A = random_hermitian(rng, n) + crandn(rng, n, r) @ crandn(rng, r, n)
        S = nearest_selfadjoint(A)
        assert is_hermitian(S)
        assert normalized_distance(A, S) <= selfadjoint_defect(A)


def test_unitary_defect_examples(rng):
    assert unitary_defect(random_unitary(rng, 4)) == 0
    for n in range(2, 7):
        assert unitary_defect(lower_shift(n)) == Fraction(1, n)
    assert unitary_defect(np.diag([2.0, 1.0])) == Fraction(1, 2)


def test_nearest_unitary_examples(rng):
    U0 = random_unitary(rng, 4)
    assert arithmetic_distance(U0, nearest_unitary_rank(U0)) == 0
    for n in range(2, 8):
        J = lower_shift(n)
        U = nearest_unitary_rank(J)
        assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-12)
        assert arithmetic_distance(J, U) <= 1
    # the cyclic permutation is one such unitary
    P = lower_shift(5)
    P[0, -1] = 1
    assert arithmetic_distance(lower_shift(5), P) == 1
    U = nearest_unitary_rank(np.diag([2.0, 1.0]))
    assert arithmetic_distance(np.diag([2.0, 1.0]), U) <= 1


def test_nearest_unitary_structured(rng):
    for _ in range(60):
        n = int(rng.integers(1, 9))
        r = int(rng.integers(0, n + 1))
        s = np.ones(n)
        s[:r] = rng.uniform(0.1, 3, r)
        A = random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)
        U = nearest_unitary_rank(A)
        assert np.max(np.abs(U.conj().T @ U - np.eye(n))) < 1e-9
        assert arithmetic_distance(A, U) <= arithmetic_distance(A.conj().T @ A, np.eye(n))


def test_witness_small_example():
    w = checkerboard_witness([1, 2, 3, 4])
    assert w.commutator_rank == 2
    assert w.rows == (1, 3) and w.cols == (2, 4)
    sub = w.X[np.ix_([0, 2], [1, 3])]
    assert np.allclose(sub, [[-1, -1 / 3], [1, -1]])
    assert abs(w.determinant - 4 / 3) < 1e-14
    assert w.lower_bound == 2


def test_witness_errors():
    with pytest.raises(TooSmall):
        checkerboard_witness([1, 2, 3])
    with pytest.raises(DuplicateEigenvalue):
        checkerboard_witness([1, 2, 2, 4])


def test_witness_commutator_is_exact_checkerboard():
    from fractions import Fraction as F

    lam = [F(k * k + 1, k + 2) for k in range(6)]
    n = len(lam)
    X = [[F((i + j) % 2) / (lam[i] - lam[j]) if (i + j) % 2 else F(0) for j in range(n)] for i in range(n)]
    comm = [[lam[i] * X[i][j] - X[i][j] * lam[j] for j in range(n)] for i in range(n)]
    assert all(comm[i][j] == (i + j) % 2 for i in range(n) for j in range(n))
    assert matrix_rank_exact(comm) == 2
    w = checkerboard_witness([float(v) for v in lam])
    assert w.commutator_rank == 2


def test_certificate_block_ignores_diagonal(rng):
    lam = rng.normal(size=6)
    w = checkerboard_witness(lam)
    B = np.diag(rng.normal(size=6))
    rows, cols = np.array(w.rows) - 1, np.array(w.cols) - 1
    assert np.array_equal((w.X - B)[np.ix_(rows, cols)], w.X[np.ix_(rows, cols)])
    assert numeric_rank(w.X - B) >= w.lower_bound


def test_cauchy_examples():
    det, ok = cauchy_nonsingular([0], [1])
    assert det == -1 and ok
    det, ok = cauchy_nonsingular([1, 3], [2, 4])
    assert abs(det - 4 / 3) < 1e-12 and ok
    assert abs(det - linalg.det(cauchy_matrix([1, 3], [2, 4]))) < 1e-12
    with pytest.raises(NodeCollision):
        cauchy_nonsingular([0], [0])


def test_cauchy_formula_vs_elimination(rng):
    for _ in range(20):
        n = int(rng.integers(1, 17))
        a, b = crandn(rng, n), crandn(rng, n)
        det, ok = cauchy_nonsingular(a, b, check=False)
        phase, logabs = cauchy_det_elimination(a, b)
        assert ok
        assert abs(det / abs(det) - phase) < 1e-10
        assert abs(np.log(abs(det)) - logabs) < 1e-10 * max(1, abs(logabs))


def test_cauchy_solve(rng):
    for n in (1, 3, 8):
        a, b, f = crandn(rng, n), crandn(rng, n), crandn(rng, n)
        x = cauchy_solve(a, b, f)
        assert np.allclose(cauchy_matrix(a, b) @ x, f)
