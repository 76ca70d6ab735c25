# How far is a matrix from self-adjoint, unitary, or commuting?
#
# The shift matrix is one rank-one change away from the cyclic permutation.
# A diagonal matrix and the checkerboard witness commute up to rank two,
# yet every commuting partner of the diagonal differs from the witness in
# rank at least n/2.
import numpy as np

from rankpert import (
    arithmetic_distance,
    checkerboard_witness,
    nearest_selfadjoint,
    nearest_unitary_rank,
    normalized_distance,
    selfadjoint_defect,
    unitary_defect,
)

n = 6
J = np.eye(n, k=-1)
print("shift: unitary defect", unitary_defect(J))
U = nearest_unitary_rank(J)
print("rank(J - U) =", arithmetic_distance(J, U))

A = np.triu(np.ones((4, 4)))
print("upper triangle: self-adjoint defect", selfadjoint_defect(A),
      "distance to (A + A*)/2", normalized_distance(A, nearest_selfadjoint(A)))

# %% almost commuting but far from commuting
for n in (4, 8, 16):
    w = checkerboard_witness(np.arange(1, n + 1, dtype=float))
    print(f"n={n:2d}: rank [A, X] = {w.commutator_rank}, "
          f"certificate det = {w.determinant:.4g}, "
          f"rank distance to commuting >= {w.lower_bound}")
