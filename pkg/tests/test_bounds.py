import math
from fractions import Fraction

import numpy as np
import pytest

from hyperdev import InvalidInput, build_kap
from hyperdev.bounds import (
    BoundQuery,
    ConstantsPack,
    ap3_explicit_bound,
    azuma,
    azuma_truncated,
    binom_log_tail,
    binom_pmf,
    binom_tail,
    evaluate,
    nearreg_bound,
    nearreg_bound_min,
    nearreg_log_threshold,
    pmodel_rate,
    pmodel_transfer,
    regular_variant_bound,
    regular_variant_log_threshold,
    stirling_log_tail,
    stirling_point,
)
from hyperdev.lab import m_model_tails

PACK = ConstantsPack(1.0, 0.5)


def test_ap3_explicit_value_and_a_star():
    # mpmath at 30 digits: 5051 e^{-80/9} = 0.696597599958974504937...
    res = ap3_explicit_bound(101, 50, 4000)
    assert res.value == pytest.approx(0.6965975999589745, rel=1e-12)
    # 450 ln 5051 = 3837.3036851106...
    assert res.details["a_star"] == pytest.approx(3837.3036851106237, rel=1e-12)
    assert res.valid and res.nontrivial
    assert ap3_explicit_bound(101, 50, 1e-12).value == pytest.approx(101 * 50 + 1)


def test_ap3_bound_nonincreasing_in_a():
    vals = [ap3_explicit_bound(101, 30, a).value for a in np.linspace(1, 20000, 50)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_nearreg_threshold_cases():
    assert nearreg_log_threshold(100, 3, 2, 50, 4950, 0.0) == -math.inf
    assert nearreg_log_threshold(100, 3, 1, 50, 4950, 0.1) == -math.inf
    res = nearreg_bound(100, 3, 2, 50, 10.0, 3, 4950, 0.0, PACK)
    assert res.conditions["a_threshold"]
    expect = math.log(100) - 0.5 * 10.0 / (50 * 3)
    assert res.log_value == pytest.approx(expect)


def test_nearreg_r1_specialization():
    res = nearreg_bound(100, 3, 1, 50, 20.0, 49, 4950, 0.0, PACK)
    assert res.log_value == pytest.approx(math.log(100) - 0.5 * 400 / (50 * 49**2))


def test_nearreg_needs_constants_and_flags_eta():
    with pytest.raises(InvalidInput):
        nearreg_bound(100, 3, 2, 50, 10.0, 3, 4950, 0.0, None)
    assert not nearreg_bound(100, 3, 2, 50, 10.0, 3, 4950, 0.5, PACK).conditions["eta_range"]


def test_regular_variant_same_value_weaker_threshold():
    for m in (10, 40, 90):
        for eta in (1e-3, 0.05):
            a = nearreg_bound(100, 4, 3, m, 500.0, 6, 1000, eta, PACK)
            b = regular_variant_bound(100, 4, 3, m, 500.0, 6, 1000, eta, PACK)
            assert a.value == b.value
            assert regular_variant_log_threshold(100, 4, 3, m, 1000, eta) <= nearreg_log_threshold(100, 4, 3, m, 1000, eta)
    with pytest.raises(InvalidInput):
        regular_variant_bound(100, 4, 2, 50, 1.0, 1, 1, 0.0, PACK)


def test_min_over_r_reports_argmin():
    H = build_kap(31, 4)
    deltas = {r: H.regularity_report(r).max_degree for r in (1, 2, 3, 4)}
    res = nearreg_bound_min(31, 4, 15, 200.0, deltas, H.h, 0.0, PACK)
    logs = res.details["log_values"]
    assert res.details["argmin_r"] == min(logs, key=logs.get)
    assert res.log_value == min(logs.values())


def test_azuma():
    assert azuma([1.0] * 100, 20).value == pytest.approx(math.exp(-2))
    assert azuma([1.0] * 5, 0).value == 1.0
    zero = azuma([0.0, 0.0], 1.0)
    assert zero.value == 0.0 and zero.details["certain"]
    with pytest.raises(InvalidInput):
        azuma([-1.0], 1.0)
    t = azuma_truncated([1.0] * 100, 20, [1e-4] * 10, 50)
    assert t.value == pytest.approx(math.exp(-2) + 50 * 1e-3)


def test_azuma_dominates_coin_flips():
    rng = np.random.default_rng(5)
    walks = (2 * rng.integers(0, 2, size=(200_000, 100), dtype=np.int8) - 1).sum(axis=1)
    for a in range(0, 50, 4):
        assert np.mean(walks > a) <= azuma([1.0] * 100, a).value


def test_pmodel_rate_examples():
    assert pmodel_rate(3, 0.1, 0.5, 1000, "ap3").value == pytest.approx(0.01 * 500 / 9)
    assert pmodel_rate(4, 0.1, 0.5, 1000, "sidon").value == pytest.approx(pmodel_rate(4, 0.1, 0.5, 1000, "kap").value)
    assert pmodel_rate(3, 0.0, 0.5, 1000, "ap3").value == 0
    with pytest.raises(InvalidInput):
        pmodel_rate(3, 0.1, 1.0, 1000, "ap3")


def test_pmodel_window_flags():
    inside = pmodel_rate(3, 0.05, 0.5, 10**7, "ap3", rho=2)
    assert inside.valid
    assert not pmodel_rate(3, 0.45, 0.5, 10**7, "ap3", rho=2).conditions["window_upper"]


def test_binomial_exact_and_float():
    assert binom_pmf(4, Fraction(1, 2), 2) == Fraction(3, 8)
    assert binom_pmf(4, 0.5, 2) == pytest.approx(0.375)
    assert binom_tail(10, Fraction(1, 3), 0) == 1
    total = sum(binom_pmf(12, Fraction(1, 5), m) for m in range(13))
    assert total == 1


def test_log_tail_matches_exact_fraction_sum():
    exact = binom_tail(1000, Fraction(1, 2), 560)
    assert binom_log_tail(1000, 0.5, 560) == pytest.approx(math.log(exact), rel=1e-10)


def test_stirling_gap_shrinks_as_x_grows_with_N():
    gaps = []
    for N in (10**3, 10**4, 10**5):
        x = N ** (1 / 6)
        lv = binom_log_tail(N, 0.5, stirling_point(N, 0.5, x))
        gaps.append(abs(lv - stirling_log_tail(N, 0.5, x)) / abs(lv))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.12


def test_transfer_trivial_cases():
    H = build_kap(7, 3)
    p = Fraction(1, 2)
    over_max = m_model_tails(H, H.h + 1)
    assert pmodel_transfer(7, p, over_max) == 0
    below = m_model_tails(H, -1)
    assert pmodel_transfer(7, p, below) == 1
    with pytest.raises(InvalidInput):
        pmodel_transfer(7, p, below[:-1])


def test_m_model_tail_nondecreasing_in_m():
    H = build_kap(11, 3)
    for cut in (0, 3, 10, 30):
        tails = m_model_tails(H, cut)
        assert all(x <= y for x, y in zip(tails, tails[1:]))


def test_evaluate_dispatch():
    res = evaluate(BoundQuery("thm5.2", {"N": 101, "m": 50, "a": 4000}))
    assert res.value == pytest.approx(0.6966, abs=1e-4)
    res = evaluate(BoundQuery("azuma", {"c_i": 1, "m": 100, "a": 20}))
    assert res.value == pytest.approx(math.exp(-2))
    res = evaluate(BoundQuery("binom-tail", {"N": 1000, "p": 0.5, "m": 560}))
    assert res.log_value < 0
    with pytest.raises(InvalidInput):
        evaluate(BoundQuery("thm5.2", {"N": 101}))
    with pytest.raises(InvalidInput):
        evaluate(BoundQuery("nope", {}))


def test_default_pack_is_labelled():
    pack = ConstantsPack.default(3, 2)
    assert pack.c1 == 9 and not pack.canonical
    assert math.log(pack.c2) == pytest.approx(-100 * math.log(60))
