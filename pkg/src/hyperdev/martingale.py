"""Insertion trajectories and the exact martingale representation of D_j.

Along b_1, ..., b_N the step increase of N_l is A_l(B_i), the sum over edges
f through b_i of C(|f & B_{i-1}|, l-1). Its conditional mean given B_{i-1}
depends only on N_{l-1}(B_{i-1}) and N_l(B_{i-1}), and X_l = A_l - mean is a
martingale difference. D_j(B_m) is a fixed linear combination of the X_l.
Everything here is exact integer / Fraction arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._exact import InvalidInput, comb, falling
from .hypergraph import Hypergraph, expected_partial

__all__ = [
    "Trajectory",
    "run_trajectory",
    "random_trajectory",
    "conditional_increment_mean",
    "martingale_reconstruct",
    "representation_coefficient",
    "direct_deviation",
    "check_recursion",
    "check_increment_bound",
    "brute_conditional_mean",
    "verify_trajectory",
    "IncrementBoundReport",
]


class Trajectory:
    """Nested sets B_0 c B_1 c ... c B_N with cached N_l(B_i) and A_l(B_i).

    ``counts[i][l]`` is N_l(B_i) and ``increments[i][l]`` is A_l(B_i)
    (row 0 is all zeros except N_0 = h).
    """

    def __init__(self, H: Hypergraph, perm: Sequence[int]):
        perm = [int(v) for v in perm]
        if sorted(perm) != list(range(H.N)):
            raise InvalidInput(f"perm is not a permutation of 0..{H.N - 1}")
        self.H = H
        self.perm = tuple(perm)
        k = H.k
        binom = [[comb(c, l - 1) if l >= 1 else 0 for l in range(k + 1)] for c in range(k + 1)]
        inside = np.zeros(H.h, dtype=np.int64)
        row = [H.h] + [0] * k
        self.counts: list[list[int]] = [row[:]]
        self.increments: list[list[int]] = [[0] * (k + 1)]
        for b in perm:
            idx = np.asarray(H.incidence(b), dtype=np.int64)
            hist = np.bincount(inside[idx], minlength=k).tolist() if idx.size else [0] * k
            inc = [0] * (k + 1)
            for c, cnt in enumerate(hist):
                if cnt:
                    for l in range(1, k + 1):
                        inc[l] += cnt * binom[c][l]
            inside[idx] += 1
            row = [row[l] + inc[l] for l in range(k + 1)]
            self.counts.append(row)
            self.increments.append(inc)

    @property
    def N(self) -> int:
        return self.H.N

    @property
    def k(self) -> int:
        return self.H.k

    def density(self, i: int) -> Fraction:
        """s = i/N."""
        return Fraction(i, self.N)

    def prefix(self, i: int) -> tuple[int, ...]:
        return self.perm[:i]

    def N_l(self, i: int, l: int) -> int:
        return self.counts[i][l]

    def A(self, i: int, l: int) -> int:
        return self.increments[i][l]

    def X(self, i: int, l: int) -> Fraction:
        return self.A(i, l) - conditional_increment_mean(self, i, l)

    def deviation(self, j: int, m: int) -> Fraction:
        return self.counts[m][j] - expected_partial(self.N, self.k, self.H.h, j, m)


def run_trajectory(H: Hypergraph, perm: Sequence[int]) -> Trajectory:
    return Trajectory(H, perm)


def random_trajectory(H: Hypergraph, rng: np.random.Generator) -> Trajectory:
    return Trajectory(H, rng.permutation(H.N).tolist())


def _mean_numerator(traj: Trajectory, i: int, j: int) -> int:
    # (k-j+1) N_{j-1}(B_{i-1}) - j N_j(B_{i-1}), to be divided by N-i+1
    prev = traj.counts[i - 1]
    return (traj.k - j + 1) * prev[j - 1] - j * prev[j]


def conditional_increment_mean(traj: Trajectory, i: int, j: int) -> Fraction:
    """E[A_j(B_i) | B_{i-1}] as an exact rational; 0 for j = 0."""
    if not 1 <= i <= traj.N:
        raise InvalidInput(f"i={i} outside 1..{traj.N}")
    if not 0 <= j <= traj.k:
        raise InvalidInput(f"j={j} outside 0..{traj.k}")
    if j == 0:
        return Fraction(0)
    return Fraction(_mean_numerator(traj, i, j), traj.N - i + 1)


def brute_conditional_mean(H: Hypergraph, prefix: Sequence[int], j: int) -> Fraction:
    """Average of A_j over every possible next vertex; oracle for the formula."""
    inside = set(prefix)
    rest = [v for v in range(H.N) if v not in inside]
    if not rest:
        raise InvalidInput("prefix already covers every vertex")
    if j == 0:
        return Fraction(0)
    total = 0
    for v in rest:
        for idx in H.incidence(v):
            c = sum(1 for u in H.edges[idx] if u in inside)
            total += comb(c, j - 1)
    return Fraction(total, len(rest))


def direct_deviation(H: Hypergraph, B, j: int) -> Fraction:
    mask = H._mask(B)
    return H.count_partial(mask, j) - expected_partial(H.N, H.k, H.h, j, int(mask.sum()))


def _falling_parts(x: int, j: int) -> tuple[int, int]:
    """(x)_j split as (product of nonzero factors, number of zero factors)."""
    prod, zeros = 1, 0
    for t in range(j):
        if x - t == 0:
            zeros += 1
        else:
            prod *= x - t
    return prod, zeros


def representation_coefficient(N: int, k: int, j: int, l: int, m: int, i: int) -> Fraction:
    """(N-m)_l (m-i)_{j-l} / (N-i)_j * C(k-l, k-j).

    When (N-i)_j vanishes the quotient is read as its limit under
    N -> N + eps (i, m fixed). Both falling factorials then lose exactly
    one factor to zero and the limit is the ratio of the remaining ones;
    this matches the one-step recursion, which has no singularity.
    """
    const = falling(m - i, j - l) * comb(k - l, k - j)
    if const == 0:
        return Fraction(0)
    num, zn = _falling_parts(N - m, l)
    den, zd = _falling_parts(N - i, j)
    if zn > zd:
        return Fraction(0)
    if zn < zd:
        raise ArithmeticError("pole in representation coefficient")
    return Fraction(const * num, den)


def martingale_reconstruct(traj: Trajectory, j: int, m: int) -> Fraction:
    """Right-hand side of the martingale representation of D_j(B_m).

    Sum over i <= m, l <= j of (N-m)_l (m-i)_{j-l} / (N-i)_j * C(k-l, k-j)
    * X_l(B_i). Each X_l(B_i) has denominator N-i+1, so when (N-i)_j is
    nonzero the inner sum over l is one integer over (N-i)_j (N-i+1).
    Steps with (N-i)_j = 0 use :func:`representation_coefficient`.
    """
    N, k = traj.N, traj.k
    if not 1 <= j <= k:
        raise InvalidInput(f"j={j} outside 1..{k}")
    if not 0 <= m <= N:
        raise InvalidInput(f"m={m} outside 0..{N}")
    total = Fraction(0)
    for i in range(1, m + 1):
        d = N - i + 1
        den = falling(N - i, j)
        if den == 0:
            for l in range(1, j + 1):
                c = representation_coefficient(N, k, j, l, m, i)
                if c:
                    total += c * traj.X(i, l)
            continue
        num = 0
        for l in range(1, j + 1):
            coef = falling(N - m, l) * falling(m - i, j - l) * comb(k - l, k - j)
            if coef:
                num += coef * (traj.increments[i][l] * d - _mean_numerator(traj, i, l))
        total += Fraction(num, den * d)
    return total


def check_recursion(traj: Trajectory, j: int) -> list[int]:
    """Steps m where the one-step recursion for D_j fails (empty if none).

    D_j(B_m) = (N-m-j+1)/(N-m+1) D_j(B_{m-1})
             + (k-j+1)/(N-m+1) D_{j-1}(B_{m-1}) + X_j(B_m).
    """
    N, k = traj.N, traj.k
    bad = []
    for m in range(1, N + 1):
        d = N - m + 1
        rhs = (
            Fraction(N - m - j + 1, d) * traj.deviation(j, m - 1)
            + Fraction(k - j + 1, d) * traj.deviation(j - 1, m - 1)
            + traj.X(m, j)
        )
        if rhs != traj.deviation(j, m):
            bad.append(m)
    return bad


def verify_trajectory(traj: Trajectory, js: Sequence[int] | None = None) -> list[tuple[int, int]]:
    """All (j, m) where the reconstruction differs from the direct deviation.

    The direct side recounts N_j(B_m) from scratch on the hypergraph rather
    than reading the trajectory cache.
    """
    H = traj.H
    js = range(1, traj.k + 1) if js is None else js
    bad = []
    for m in range(traj.N + 1):
        B = traj.prefix(m)
        counts = H.partial_counts(B)
        for j in js:
            direct = counts[j] - expected_partial(H.N, H.k, H.h, j, m)
            if martingale_reconstruct(traj, j, m) != direct:
                bad.append((j, m))
    return bad


@dataclass
class IncrementBoundReport:
    """Deterministic increment bound |X_l(B_i)| <= 2 l C(k,l) eta s^{l-1} h / N."""

    r: int
    eta: Fraction
    n_checked: int = 0
    violations: list = field(default_factory=list)
    max_ratio: float = 0.0
    max_ratio_by_l: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "eta": str(self.eta),
            "n_checked": self.n_checked,
            "n_violations": len(self.violations),
            "max_ratio": self.max_ratio,
            "max_ratio_by_l": {str(k): v for k, v in self.max_ratio_by_l.items()},
            "ok": self.ok,
        }


def check_increment_bound(traj: Trajectory, r: int, eta=None) -> IncrementBoundReport:
    """Check the increment bound at every step i and every 1 <= l <= r.

    ``eta`` defaults to the exact eta_r of the hypergraph. Ratios are
    |X| / bound; a zero bound with X = 0 counts as ratio 0.
    """
    H = traj.H
    if not 1 <= r <= H.k:
        raise InvalidInput(f"r={r} outside 1..{H.k}")
    eta = H.regularity_report(r).eta if eta is None else Fraction(eta)
    rep = IncrementBoundReport(r, eta)
    N, h, k = traj.N, H.h, traj.k
    for l in range(1, r + 1):
        worst = 0.0
        for i in range(1, N + 1):
            x = abs(traj.X(i, l))
            bound = 2 * l * comb(k, l) * eta * Fraction(i, N) ** (l - 1) * Fraction(h, N)
            rep.n_checked += 1
            if x > bound:
                rep.violations.append((i, l, x, bound))
            if bound > 0:
                worst = max(worst, float(x / bound))
            elif x > 0:
                worst = float("inf")
        rep.max_ratio_by_l[l] = worst
        rep.max_ratio = max(rep.max_ratio, worst)
    return rep
