import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankpert.errors import Derogatory, DistanceTooSmall
from rankpert.mats import arithmetic_distance
from rankpert.multiset import ComplexMultiset
from rankpert.weyr import (
    SegreChar,
    WeyrChar,
    conjugate_partition,
    ferrers,
    jordan_matrix,
    rank1_assign_spectrum,
    segre_interlace_check,
    segre_to_weyr,
    thompson_reachable,
    weyr_distance,
    weyr_from_matrix,
    weyr_geodesic_chain,
    weyr_geodesic_step,
    weyr_pad,
    weyr_to_segre,
)
from oracles import partitions
from randmat import crandn, random_unitary


def characteristics(n, eigs):
    """Every Segre table of total size n supported on `eigs`."""
    for split in itertools.product(range(n + 1), repeat=len(eigs)):
        if sum(split) != n:
            continue
        for parts in itertools.product(*(list(partitions(m)) for m in split)):
            yield {lam: p for lam, p in zip(eigs, parts) if p}


def W(table):
    return WeyrChar({complex(k): v for k, v in table.items()})


def similar(J, rng):
    U = random_unitary(rng, len(J))
    return U @ J @ U.conj().T


def test_weyr_from_matrix_examples():
    assert weyr_from_matrix(np.zeros((3, 3))).table == {0j: (3,)}
    assert weyr_from_matrix(jordan_matrix({0: (3,)})).table == {0j: (1, 1, 1)}
    assert weyr_from_matrix(jordan_matrix({0: (2, 1)})).table == {0j: (2, 1)}


def test_weyr_from_matrix_under_similarity(rng):
    for segre in ({0: (3, 1)}, {1: (2, 2), -1: (1,)}, {2j: (2,), 0.5: (1, 1, 1)}, {0: (1,), 3: (4,)}):
        J = jordan_matrix(segre)
        got = weyr_from_matrix(similar(J, rng))
        want = segre_to_weyr(SegreChar(segre)).table
        assert len(got.table) == len(want)
        for lam, eta in want.items():
            key = min(got.table, key=lambda mu: abs(mu - lam))
            assert abs(key - lam) < 1e-4
            assert got.table[key] == eta


def test_conjugate_examples():
    assert weyr_to_segre(W({0: (3,)})).table == {0j: (1, 1, 1)}
    assert weyr_to_segre(W({0: (1, 1, 1)})).table == {0j: (3,)}
    assert weyr_to_segre(W({0: (2, 1)})).table == {0j: (2, 1)}


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.sampled_from(list(partitions(n)))))
def test_conjugation_round_trip(p):
    assert conjugate_partition(conjugate_partition(p)) == p
    s = SegreChar({0: p, 1: conjugate_partition(p)})
    assert weyr_to_segre(segre_to_weyr(s)).table == s.table


def test_invalid_weyr_rejected():
    with pytest.raises(ValueError):
        W({0: (1, 2)})


def test_distance_examples():
    eta = W({0: (2, 1)})
    assert weyr_distance(eta, eta) == 0
    for n in range(1, 6):
        assert weyr_distance(W({0: (1,) * n}), W({0: (n,)})) == n - 1
    assert weyr_distance(W({0: (2, 1)}), W({1: (3,)})) == 3


def test_distance_is_a_metric():
    chars = [W(t) for n in (3, 4) for t in characteristics(n, (0, 1))]
    rng = np.random.default_rng(0)
    for _ in range(500):
        a, b, c = (chars[i] for i in rng.integers(0, len(chars), 3))
        assert weyr_distance(a, b) == weyr_distance(b, a)
        assert weyr_distance(a, c) <= weyr_distance(a, b) + weyr_distance(b, c)
        assert (weyr_distance(a, b) == 0) == (a.table == b.table)


def test_geodesic_step_example():
    eta, mu = W({0: (1, 1, 1)}), W({0: (3,)})
    nu = weyr_geodesic_step(eta, mu)
    assert weyr_distance(eta, nu) == 1 and weyr_distance(nu, mu) == 1
    with pytest.raises(DistanceTooSmall):
        weyr_geodesic_step(W({0: (2, 1)}), W({0: (3,)}))


def test_pad_examples():
    assert weyr_pad(W({0: (1,)}), 3).table == {0j: (1, 1, 1)}
    assert weyr_pad(W({0: (2,)}), 3).table == {0j: (2, 1)}
    mu = W({0: (2,)})
    assert weyr_pad(mu, 2) is mu


def test_pad_never_increases_distance():
    eigs = (0, 1)
    for n in range(2, 7):
        targets = [W(t) for t in characteristics(n, eigs + (2,))]
        for m in range(1, n):
            for mt in characteristics(m, eigs):
                mu = W(mt)
                nu = weyr_pad(mu, n)
                assert nu.n == n
                for eta in targets:
                    assert weyr_distance(mu, eta) >= weyr_distance(nu, eta)


def test_geodesic_chains_exhaustive_small():
    for n in range(1, 6):
        chars = [W(t) for t in characteristics(n, (0, 1))]
        for a, b in itertools.product(chars, repeat=2):
            chain = weyr_geodesic_chain(a, b)
            assert len(chain) - 1 == weyr_distance(a, b)
            assert all(weyr_distance(x, y) == 1 for x, y in zip(chain, chain[1:]))
            assert all(c.n == n for c in chain)


def test_thompson_examples():
    eta = W({0: (2, 1)})
    assert thompson_reachable(eta, eta, 0)
    assert thompson_reachable(W({0: (1, 1)}), W({1: (1,), 2: (1,)}), 1)
    assert not thompson_reachable(W({0: (3,)}), W({0: (1, 1, 1)}), 1)
    assert not thompson_reachable(W({0: (1,)}), W({0: (1, 1)}), 5)


def test_segre_interlace_matches_distance_exhaustively():
    for n in range(1, 7):
        chars = list(characteristics(n, (0, 1, 2)))
        for ta, tb in itertools.product(chars, repeat=2):
            sa, sb = SegreChar(ta), SegreChar(tb)
            assert segre_interlace_check(sa, sb) == (weyr_distance(segre_to_weyr(sa), segre_to_weyr(sb)) <= 1)


def test_ferrers_has_one_row_per_block():
    text = ferrers(W({0: (2, 1)}))
    assert text.count("*") == 3


def test_rank1_assign_example():
    A = jordan_matrix({0: (2,)})
    B = rank1_assign_spectrum(A, ComplexMultiset.from_values([1, 2]))
    assert np.allclose(np.sort(np.linalg.eigvals(B).real), [1, 2])
    assert arithmetic_distance(A, B) == 1


def test_rank1_assign_rejects_derogatory():
    with pytest.raises(Derogatory):
        rank1_assign_spectrum(np.zeros((2, 2)), ComplexMultiset.from_values([1, 2]))


def test_rank1_assign_hits_distinct_targets(rng):
    for _ in range(50):
        n = int(rng.integers(2, 6))
        A = crandn(rng, n, n)
        target = crandn(rng, n)
        B = rank1_assign_spectrum(A, ComplexMultiset.from_values(target))
        got = np.linalg.eigvals(B)
        assert arithmetic_distance(A, B) <= 1
        assert max(np.min(np.abs(got - t)) for t in target) < 1e-6 * max(1, np.max(np.abs(target)))
