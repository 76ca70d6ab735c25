# Moving the spectrum of a Hermitian matrix with as few rank-one steps as possible.
#
# The number of steps needed equals the largest imbalance of eigenvalue
# counts over intervals of the real line. We build a random Hermitian A,
# pick an integer target spectrum, and watch the construction hit it.
import numpy as np
from scipy import linalg

from rankpert import (
    ComplexMultiset,
    Curve,
    arithmetic_distance,
    hermitian_assign_spectrum,
    hermitian_rank1_update,
    interval_dc,
)

rng = np.random.default_rng(7)

n = 6
G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
A = (G + G.conj().T) / 2
print("spectrum of A:", np.round(linalg.eigvalsh(A), 3))

# %% a single rank-one step: interlacing spectra
alphas = np.array([-2.0, 0.0, 1.5])
betas = np.array([-1.0, 0.5, 3.0])
u = hermitian_rank1_update(alphas, betas)
print("rank-one update, eigenvalues of B:", np.round(linalg.eigvalsh(u.B), 12))
print("X unitary to", f"{np.max(np.abs(u.X.conj().T @ u.X - np.eye(3))):.1e}")

# %% many steps: an arbitrary real target
target = ComplexMultiset.from_values(rng.integers(-3, 4, n).astype(complex))
B, rep = hermitian_assign_spectrum(A, target, full_output=True)
sp = ComplexMultiset.from_values(linalg.eigvalsh(A).astype(complex))
needed = interval_dc(sp, target.with_tol(sp.merge_tol), Curve.real_line())

print("target:", np.sort(target.values().real))
print("spectrum of B:", np.round(linalg.eigvalsh(B), 9))
print("interval discrepancy:", needed)
print("rank(A - B):", arithmetic_distance(A, B), "in", rep.steps, "steps")
