"""Sampling B_m and B_p, Monte Carlo deviation tails and exact small-N laws.

Monte Carlo runs are split into fixed-size chunks, each with its own
substream spawned from the master seed, so results do not depend on the
number of worker threads. Exceedance tests are done in exact integer
arithmetic: for an integer count and a rational cut, ``count > cut`` is
``count >= floor(cut) + 1``.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from ._exact import BudgetExceeded, InvalidInput, as_fraction, comb, default_budget, is_prime
from .bounds import ap3_explicit_bound, pmodel_rate, pmodel_transfer
from .hypergraph import Hypergraph, expected_partial
from .ntt import ap3_fast_count, ap3_fast_count_batch

__all__ = [
    "sample_m",
    "sample_p",
    "sample_m_masks",
    "sample_p_masks",
    "sample_occupancy_masks",
    "SampleStats",
    "tail_estimate",
    "clopper_pearson",
    "normal_interval",
    "ExactLaw",
    "exact_distribution",
    "all_subset_counts",
    "m_model_tails",
    "pmodel_exact_tail",
    "transfer_tail",
    "counter_for",
    "reference_bound",
    "ap3_fast_count",
    "SIDES",
]

SIDES = ("+", "-", "abs")
CHUNK = 4096


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# samplers

def sample_m(N: int, m: int, seed=None) -> np.ndarray:
    """Uniform m-subset of 0..N-1 by a partial Fisher-Yates shuffle."""
    if not 0 <= m <= N:
        raise InvalidInput(f"m={m} outside 0..{N}")
    rng = _rng(seed)
    a = np.arange(N)
    for i in range(m):
        j = int(rng.integers(i, N))
        a[i], a[j] = a[j], a[i]
    return np.sort(a[:m])


def sample_p(N: int, p: float, seed=None) -> np.ndarray:
    """Each vertex kept independently with probability p."""
    if not 0 <= p <= 1:
        raise InvalidInput(f"p={p} outside [0, 1]")
    return np.flatnonzero(_rng(seed).random(N) < float(p))


def sample_m_masks(N: int, m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent uniform m-subsets as an (n, N) boolean array.

    The m smallest of N iid uniform keys form a uniform m-subset.
    """
    if not 0 <= m <= N:
        raise InvalidInput(f"m={m} outside 0..{N}")
    masks = np.zeros((n, N), dtype=bool)
    if m == 0 or n == 0:
        return masks
    if m == N:
        masks[:] = True
        return masks
    keys = rng.random((n, N))
    idx = np.argpartition(keys, m - 1, axis=1)[:, :m]
    np.put_along_axis(masks, idx, True, axis=1)
    return masks


def sample_p_masks(N: int, p: float, n: int, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= p <= 1:
        raise InvalidInput(f"p={p} outside [0, 1]")
    return rng.random((n, N)) < float(p)


def sample_occupancy_masks(s: int, occupancies: Sequence[int], n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sets with exactly ``occupancies[i]`` vertices in part i
    (parts are consecutive blocks of size s)."""
    occ = [int(c) for c in occupancies]
    if any(not 0 <= c <= s for c in occ):
        raise InvalidInput("occupancy outside 0..s")
    return np.concatenate([sample_m_masks(s, c, n, rng) for c in occ], axis=1)


# counting

def counter_for(H: Hypergraph) -> Callable[[np.ndarray], np.ndarray]:
    """Batch induced-count function; the convolution kernel for 3-APs.

    Monte Carlo batches use the checked float transform, which is the fast
    path; the exact NTT stays available through :func:`ap3_fast_count`.
    """
    if H.meta.get("family") == "kap" and H.k == 3 and is_prime(H.N) and H.N > 3:
        N = H.N
        return lambda masks: ap3_fast_count_batch(masks, N, "fft")
    return H.count_induced_batch


# confidence intervals

def clopper_pearson(x: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Exact two-sided binomial interval."""
    if n <= 0:
        return (0.0, 1.0)
    alpha = 1 - confidence
    lo = 0.0 if x == 0 else float(stats.beta.ppf(alpha / 2, x, n - x + 1))
    hi = 1.0 if x == n else float(stats.beta.ppf(1 - alpha / 2, x + 1, n - x))
    return lo, hi


def normal_interval(x: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wald interval; refused when fewer than 10 successes or failures."""
    if x < 10 or n - x < 10:
        raise InvalidInput("normal interval needs at least 10 successes and 10 failures")
    z = float(stats.norm.ppf(1 - (1 - confidence) / 2))
    est = x / n
    half = z * math.sqrt(est * (1 - est) / n)
    return max(0.0, est - half), min(1.0, est + half)


_CI = {"clopper-pearson": clopper_pearson, "normal": normal_interval}


@dataclass
class SampleStats:
    """Exceedance counts of D > a, -D > a and |D| > a per threshold."""

    model: str
    params: dict
    thresholds: list
    exceedances: dict
    n_samples: int
    seed: int | None
    ci_method: str = "clopper-pearson"
    confidence: float = 0.95
    center: Fraction = Fraction(0)
    count_hist: Counter = field(default_factory=Counter, repr=False)

    def estimate(self, side: str = "abs") -> list[float]:
        return [x / self.n_samples if self.n_samples else 0.0 for x in self.exceedances[side]]

    def ci(self, side: str = "abs") -> list[tuple[float, float]]:
        f = _CI[self.ci_method]
        return [f(x, self.n_samples, self.confidence) for x in self.exceedances[side]]

    def rows(self) -> list[dict]:
        out = []
        for side in SIDES:
            for a, x, (lo, hi) in zip(self.thresholds, self.exceedances[side], self.ci(side)):
                out.append(
                    {
                        "threshold": a,
                        "side": side,
                        "exceedances": x,
                        "samples": self.n_samples,
                        "estimate": x / self.n_samples if self.n_samples else 0.0,
                        "ci_lo": lo,
                        "ci_hi": hi,
                    }
                )
        return out

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "params": self.params,
            "thresholds": [str(a) if isinstance(a, Fraction) else a for a in self.thresholds],
            "exceedances": {s: list(v) for s, v in self.exceedances.items()},
            "n_samples": self.n_samples,
            "seed": self.seed,
            "ci_method": self.ci_method,
            "confidence": self.confidence,
            "center": str(self.center),
        }


def _center(H: Hypergraph, model: str, param) -> Fraction:
    if model == "m":
        return expected_partial(H.N, H.k, H.h, H.k, int(param))
    if model == "p":
        return as_fraction(param) ** H.k * H.h
    raise InvalidInput(f"model must be 'm' or 'p', got {model!r}")


def _cuts(center: Fraction, thresholds: Sequence[Fraction]) -> tuple[np.ndarray, np.ndarray]:
    """Integer cuts: D > a  <=>  count >= hi;  -D > a  <=>  count <= lo."""
    hi = np.array([math.floor(center + a) + 1 for a in thresholds], dtype=np.int64)
    lo = np.array([math.ceil(center - a) - 1 for a in thresholds], dtype=np.int64)
    return hi, lo


def tail_estimate(
    H: Hypergraph,
    model: str,
    param,
    thresholds: Sequence,
    n_samples: int,
    seed: int = 0,
    *,
    threads: int = 1,
    confidence: float = 0.95,
    ci_method: str = "clopper-pearson",
    chunk: int = CHUNK,
    counter: Callable | None = None,
) -> SampleStats:
    """Monte Carlo estimate of P(D > a), P(-D > a) and P(|D| > a).

    ``model`` is "m" (param = m, D centred at L_k(m)) or "p" (param = p,
    D centred at p^k h). Chunk i uses the i-th child of
    SeedSequence(seed), so the result is the same for any ``threads``.
    """
    if ci_method not in _CI:
        raise InvalidInput(f"unknown CI method {ci_method!r}")
    ths = [as_fraction(a) for a in thresholds]
    if any(b < a for a, b in zip(ths, ths[1:])):
        raise InvalidInput("thresholds must be sorted ascending")
    if n_samples < 0:
        raise InvalidInput("n_samples must be nonnegative")
    N = H.N
    if model == "m":
        m = int(param)
        if not 0 <= m <= N:
            raise InvalidInput(f"m={m} outside 0..{N}")
        draw = lambda n, rng: sample_m_masks(N, m, n, rng)  # noqa: E731
    else:
        p = float(param)
        if not 0 <= p <= 1:
            raise InvalidInput(f"p={p} outside [0, 1]")
        draw = lambda n, rng: sample_p_masks(N, p, n, rng)  # noqa: E731
    center = _center(H, model, param)
    hi, lo = _cuts(center, ths)
    count = counter or counter_for(H)
    sizes = [chunk] * (n_samples // chunk) + ([n_samples % chunk] if n_samples % chunk else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(args):
        n, ss = args
        counts = np.asarray(count(draw(n, np.random.default_rng(ss))), dtype=np.int64)
        return Counter(counts.tolist())

    jobs = list(zip(sizes, children))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]
    hist: Counter = Counter()
    for part in parts:
        hist.update(part)
    vals = np.array(sorted(hist), dtype=np.int64)
    freq = np.array([hist[v] for v in vals], dtype=np.int64)
    up = [int(freq[vals >= c].sum()) for c in hi]
    down = [int(freq[vals <= c].sum()) for c in lo]
    both = [u + d if c_hi > c_lo else int(freq.sum()) for u, d, c_hi, c_lo in zip(up, down, hi, lo)]
    return SampleStats(
        model=model,
        params={"N": N, "k": H.k, "h": H.h, model: param, **{k: v for k, v in H.meta.items() if k in ("family",)}},
        thresholds=list(thresholds),
        exceedances={"+": up, "-": down, "abs": both},
        n_samples=n_samples,
        seed=seed,
        ci_method=ci_method,
        confidence=confidence,
        center=center,
        count_hist=hist,
    )


# exact laws

def _combination_masks(N: int, m: int, batch: int = 1 << 15):
    it = combinations(range(N), m)
    while True:
        rows = [c for _, c in zip(range(batch), it)]
        if not rows:
            return
        masks = np.zeros((len(rows), N), dtype=bool)
        if m:
            idx = np.array(rows, dtype=np.int64)
            np.put_along_axis(masks, idx, True, axis=1)
        yield masks


@dataclass
class ExactLaw:
    """Exact distribution of N(B_m): count value -> probability."""

    N: int
    m: int
    mass: dict
    center: Fraction

    @property
    def mean(self) -> Fraction:
        return sum((Fraction(c) * p for c, p in self.mass.items()), Fraction(0))

    @property
    def total(self) -> Fraction:
        return sum(self.mass.values(), Fraction(0))

    def tail_gt(self, c) -> Fraction:
        """P(N(B_m) > c)."""
        c = as_fraction(c)
        return sum((p for v, p in self.mass.items() if v > c), Fraction(0))

    def deviation_tail(self, a, side: str = "abs") -> Fraction:
        a = as_fraction(a)
        out = Fraction(0)
        for v, p in self.mass.items():
            d = v - self.center
            if (side == "+" and d > a) or (side == "-" and -d > a) or (side == "abs" and abs(d) > a):
                out += p
        return out

    def as_dict(self) -> dict:
        return {"N": self.N, "m": self.m, "mass": {str(v): str(p) for v, p in sorted(self.mass.items())}, "center": str(self.center)}


def exact_distribution(H: Hypergraph, m: int, budget: int | None = None) -> ExactLaw:
    """Law of the induced count over all C(N, m) subsets."""
    N = H.N
    if not 0 <= m <= N:
        raise InvalidInput(f"m={m} outside 0..{N}")
    budget = default_budget() if budget is None else budget
    total = comb(N, m)
    if total > budget:
        raise BudgetExceeded(f"C({N},{m}) = {total} subsets exceed budget {budget}")
    hist: Counter = Counter()
    for masks in _combination_masks(N, m):
        hist.update(np.asarray(H.count_induced_batch(masks)).tolist())
    mass = {int(v): Fraction(c, total) for v, c in sorted(hist.items())}
    return ExactLaw(N, m, mass, expected_partial(N, H.k, H.h, H.k, m))


def all_subset_counts(H: Hypergraph, budget: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Induced counts and sizes of all 2^N subsets, indexed by bitmask."""
    N = H.N
    budget = default_budget() if budget is None else budget
    if 2**N > budget:
        raise BudgetExceeded(f"2^{N} subsets exceed budget {budget}")
    codes = np.arange(2**N, dtype=np.int64)
    counts = np.empty(2**N, dtype=np.int64)
    step = 1 << 15
    for lo in range(0, 2**N, step):
        block = codes[lo : lo + step]
        masks = ((block[:, None] >> np.arange(N)) & 1).astype(bool)
        counts[lo : lo + step] = H.count_induced_batch(masks)
    sizes = np.array([bin(c).count("1") for c in range(2**N)], dtype=np.int64)
    return counts, sizes


def m_model_tails(H: Hypergraph, cut, budget: int | None = None) -> list[Fraction]:
    """P(N(B_m) > cut) for every m in 0..N, exact."""
    counts, sizes = all_subset_counts(H, budget)
    cut = as_fraction(cut)
    over = counts > math.floor(cut)
    return [Fraction(int(over[sizes == m].sum()), comb(H.N, m)) for m in range(H.N + 1)]


def pmodel_exact_tail(H: Hypergraph, p, a, budget: int | None = None):
    """P(N(B_p) - p^k h > a) by direct enumeration of all 2^N subsets,
    each weighted p^|B| (1-p)^(N-|B|). Exact for rational p."""
    counts, sizes = all_subset_counts(H, budget)
    cut = _center(H, "p", p) + as_fraction(a)
    exact = isinstance(p, (int, Fraction))
    pf = Fraction(p) if exact else float(p)
    over = counts > math.floor(cut)
    total = Fraction(0) if exact else 0.0
    weights = {}
    for size in sizes[over].tolist():
        if size not in weights:
            weights[size] = pf**size * (1 - pf) ** (H.N - size)
        total += weights[size]
    return total


def transfer_tail(H: Hypergraph, p, a, budget: int | None = None):
    """The same probability assembled as sum_m b_{N,p}(m) P(N(B_m) > p^k h + a)."""
    cut = _center(H, "p", p) + as_fraction(a)
    return pmodel_transfer(H.N, p, m_model_tails(H, cut, budget))


# reference bounds for reports

def reference_bound(H: Hypergraph, model: str, param, a) -> tuple[float | None, bool]:
    """A bound to print next to an estimate of P(|D| > a): the explicit 3-AP
    bound in the m-model, the p-model rate exp(-rate) (validity from its
    window) for k-AP and Sidon families. ``(None, False)`` otherwise."""
    fam = H.meta.get("family")
    a = float(a)
    if model == "m" and fam == "kap" and H.k == 3:
        if a <= 0:
            return None, False
        res = ap3_explicit_bound(H.N, int(param), a)
        return res.value, res.valid
    if model == "p" and fam in ("kap", "sidon"):
        p = float(param)
        center = float(_center(H, "p", param))
        if center <= 0 or a <= 0 or not 0 < p < 1:
            return None, False
        variant = "sidon" if fam == "sidon" else ("ap3" if H.k == 3 else "kap")
        res = pmodel_rate(H.k, a / center, p, H.N, variant)
        return math.exp(-res.value), res.valid
    return None, False
