from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdev import BudgetExceeded, Hypergraph, build_kap, deviation, expected_partial
from hyperdev.io import format_edge_list, read_edge_list

from conftest import random_hypergraph


def test_count_induced_and_partial_small():
    H = Hypergraph(5, [(0, 1, 2), (1, 2, 3), (2, 3, 4)])
    B = [1, 2, 3]
    assert H.count_induced(B) == 1
    # intersections 2, 3, 2
    assert H.partial_counts(B) == [3, 7, 5, 1]
    assert H.count_partial(B, 2) == 1 + 3 + 1
    assert H.count_induced([]) == 0


def test_multiedges_are_counted():
    H = Hypergraph(3, [(0, 1, 2), (0, 1, 2)])
    assert H.h == 2
    assert H.count_induced([0, 1, 2]) == 2
    assert H.multiplicity((2, 1, 0)) == 2
    assert H.degree([0, 1]) == 2


def test_mask_and_iterable_agree(rng):
    H = random_hypergraph(rng, 12, 3, 30)
    B = [0, 3, 5, 7, 11]
    mask = np.zeros(12, dtype=bool)
    mask[B] = True
    assert H.count_induced(B) == H.count_induced(mask)
    assert H.count_induced_batch(mask[None, :])[0] == H.count_induced(B)


def test_bad_inputs():
    with pytest.raises(ValueError):
        Hypergraph(3, [(0, 0, 1)])
    with pytest.raises(ValueError):
        Hypergraph(3, [(0, 1, 3)])
    H = Hypergraph(4, [(0, 1, 2)])
    with pytest.raises(ValueError):
        H.count_induced([5])
    with pytest.raises(ValueError):
        H.degree([0, 1, 2, 3])


def test_expected_partial_values():
    assert expected_partial(7, 3, 21, 3, 3) == Fraction(21 * 6, 210)
    assert expected_partial(10, 3, 5, 0, 4) == 5
    assert expected_partial(10, 3, 5, 2, 10) == 5 * 3
    assert expected_partial(10, 3, 5, 3, 2) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 9), st.integers(2, 4), st.integers(0, 10**6))
def test_expected_partial_is_the_exhaustive_mean(N, k, seed):
    if k > N:
        return
    rng = np.random.default_rng(seed)
    H = random_hypergraph(rng, N, k, int(rng.integers(1, 8)))
    m = int(rng.integers(0, N + 1))
    for j in range(k + 1):
        total = sum(H.count_partial(list(B), j) for B in combinations(range(N), m))
        assert Fraction(total, comb(N, m)) == expected_partial(N, k, H.h, j, m)


def test_degree_matches_scan(rng):
    H = random_hypergraph(rng, 10, 4, 40)
    for A in [(), (3,), (1, 2), (0, 5, 9)]:
        assert H.degree(A) == sum(1 for e in H.edges if set(A) <= set(e))
    assert H.degree(()) == H.h


def test_regularity_report_kap():
    rep = build_kap(13, 3).regularity_report(2)
    assert rep.max_degree == rep.min_degree == 3
    assert rep.eta == 0 and rep.is_regular and rep.exact


def test_regularity_report_counts_missing_sets():
    H = Hypergraph(5, [(0, 1, 2)])
    rep = H.regularity_report(1)
    assert rep.min_degree == 0 and rep.max_degree == 1
    assert rep.avg_degree == Fraction(3, 5)
    assert rep.eta == 1  # max(5/3 - 1, 1 - 0)


def test_regularity_budget_and_sampling():
    H = build_kap(31, 3)
    with pytest.raises(BudgetExceeded):
        H.regularity_report(2, mode="exact", budget=10)
    rep = H.regularity_report(2, mode="sample", n_samples=200, seed=1)
    assert not rep.exact and rep.max_degree == rep.min_degree == 3
    assert rep == H.regularity_report(2, mode="sample", n_samples=200, seed=1)


def test_link_relabels_and_keeps_labels():
    H = Hypergraph(4, [(0, 1, 2), (1, 2, 3), (0, 2, 3)])
    L = H.link(2)
    assert L.N == 3 and L.k == 2
    assert sorted(L.edges) == [(0, 1), (0, 2), (1, 2)]
    assert L.labels == (0, 1, 3)


def test_link_inherits_regularity():
    # an r-tuple-regular hypergraph has (r-1)-tuple-regular links
    H = build_kap(11, 3)
    L = H.link(4)
    rep = L.regularity_report(1)
    assert rep.eta == 0 and rep.max_degree == 3


def test_deviation_sign():
    H = build_kap(7, 3)
    assert deviation(H, range(7)) == 0
    assert deviation(H, []) == 0
    assert deviation(H, [0, 1, 2]) == 1 - Fraction(21 * 6, 210)


def test_edge_list_round_trip(tmp_path, rng):
    H = random_hypergraph(rng, 9, 3, 12)
    p = tmp_path / "h.txt"
    p.write_text(format_edge_list(H))
    G = read_edge_list(p)
    assert G.edges == H.edges and G.N == H.N and G.k == H.k


def test_edge_list_rejects_bad_header(tmp_path):
    from hyperdev import InvalidInput

    p = tmp_path / "bad.txt"
    p.write_text("3 5 2\n0 1 2\n")
    with pytest.raises(InvalidInput):
        read_edge_list(p)
