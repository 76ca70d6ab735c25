# Jordan structure under low-rank perturbations.
#
# Weyr characteristics record, for each eigenvalue, how the nullity of
# (A - lambda)^j grows. A rank-k perturbation changes every entry of that
# table by at most k, and the converse also holds.
import numpy as np

from rankpert import (
    SegreChar,
    arithmetic_distance,
    ferrers,
    jordan_matrix,
    segre_to_weyr,
    thompson_reachable,
    weyr_distance,
    weyr_from_matrix,
    weyr_geodesic_chain,
)

rng = np.random.default_rng(3)

segre = {0: (3, 1), 2: (2,)}
J = jordan_matrix(segre)
Q = np.linalg.qr(rng.normal(size=(6, 6)))[0]
A = Q @ J @ Q.T
w = weyr_from_matrix(A)
print("Weyr characteristic recovered from a similar matrix:")
print(ferrers(w))

# %% a random rank-one perturbation moves the table by at most one
u, v = rng.normal(size=6), rng.normal(size=6)
B = A + 1e-1 * np.outer(u, v)
print("rank(A - B) =", arithmetic_distance(A, B))
wb = weyr_from_matrix(B)
print("distance between characteristics:", weyr_distance(w, wb))

# %% geodesics between structures
eta = segre_to_weyr(SegreChar({0: (1, 1, 1, 1)}))
mu = segre_to_weyr(SegreChar({0: (4,)}))
print("distance", weyr_distance(eta, mu))
for step in weyr_geodesic_chain(eta, mu):
    print("  ", step.table)
print("reachable with rank 2?", thompson_reachable(eta, mu, 2))
print("reachable with rank 3?", thompson_reachable(eta, mu, 3))
