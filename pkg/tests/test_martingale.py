from fractions import Fraction

import numpy as np
import pytest

from hyperdev import Hypergraph, InvalidInput, build_kap, build_schur, expected_partial
from hyperdev.martingale import (
    Trajectory,
    brute_conditional_mean,
    check_increment_bound,
    check_recursion,
    conditional_increment_mean,
    direct_deviation,
    martingale_reconstruct,
    random_trajectory,
    representation_coefficient,
    verify_trajectory,
)

from conftest import random_hypergraph


def test_trajectory_counts_match_direct(rng):
    H = random_hypergraph(rng, 10, 3, 25)
    traj = random_trajectory(H, rng)
    for i in range(H.N + 1):
        assert traj.counts[i] == H.partial_counts(traj.prefix(i))


def test_conditional_mean_matches_brute_force(rng):
    H = random_hypergraph(rng, 9, 4, 20)
    traj = random_trajectory(H, rng)
    for i in range(1, H.N + 1):
        for j in range(H.k + 1):
            assert conditional_increment_mean(traj, i, j) == brute_conditional_mean(H, traj.prefix(i - 1), j)


@pytest.mark.parametrize("seed", range(8))
def test_reconstruction_is_exact(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(3, 14))
    k = int(rng.integers(1, min(N, 5) + 1))
    H = random_hypergraph(rng, N, k)
    traj = random_trajectory(H, rng)
    assert verify_trajectory(traj) == []


def test_reconstruction_on_families(rng):
    for H in (build_kap(11, 3), build_schur(11), build_kap(7, 5)):
        assert verify_trajectory(random_trajectory(H, rng)) == []


def test_reconstruction_endpoint_uses_limit():
    # at m = N every D_j vanishes; the i = m, l = j coefficient must be 1
    assert representation_coefficient(10, 3, 2, 2, 10, 10) == 1
    assert representation_coefficient(10, 3, 2, 1, 10, 10) == 0
    assert representation_coefficient(10, 3, 2, 2, 9, 9) == 1
    H = Hypergraph(4, [(0, 1, 2), (1, 2, 3)])
    traj = Trajectory(H, [3, 0, 2, 1])
    for j in (1, 2, 3):
        assert martingale_reconstruct(traj, j, 4) == 0


def test_one_step_recursion(rng):
    H = random_hypergraph(rng, 12, 4, 30)
    traj = random_trajectory(H, rng)
    for j in range(1, 5):
        assert check_recursion(traj, j) == []


def test_direct_deviation_agrees_with_trajectory(rng):
    H = build_kap(13, 3)
    traj = random_trajectory(H, rng)
    for m in (0, 4, 13):
        assert direct_deviation(H, traj.prefix(m), 3) == traj.deviation(3, m)
        assert traj.deviation(3, m) == H.count_induced(traj.prefix(m)) - expected_partial(13, 3, H.h, 3, m)


def test_regular_family_has_no_fluctuation_below_r(rng):
    H = build_kap(13, 3)
    for _ in range(5):
        traj = random_trajectory(H, rng)
        for i in range(1, H.N + 1):
            assert traj.X(i, 1) == 0 and traj.X(i, 2) == 0


def test_increment_bound_on_perturbed_instance(rng):
    base = list(build_kap(13, 3).edges)
    drop = set(rng.choice(len(base), size=4, replace=False).tolist())
    H = Hypergraph(13, [e for t, e in enumerate(base) if t not in drop], 3)
    eta = H.regularity_report(2).eta
    assert eta > 0
    for _ in range(10):
        rep = check_increment_bound(random_trajectory(H, rng), 2)
        assert rep.ok and rep.eta == eta and rep.max_ratio <= 1


def test_bad_permutation():
    with pytest.raises(InvalidInput):
        Trajectory(Hypergraph(3, [(0, 1, 2)]), [0, 1, 1])


def test_values_are_fractions(rng):
    H = random_hypergraph(rng, 8, 3, 10)
    traj = random_trajectory(H, rng)
    assert isinstance(traj.X(3, 2), Fraction)
    assert isinstance(martingale_reconstruct(traj, 2, 5), Fraction)
