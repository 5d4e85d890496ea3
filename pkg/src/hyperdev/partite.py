"""l-part hypergraphs built from alpha-good edges of prescribed types.

Vertices are pairs (i, j) with part i in 0..l-1 and label j in 1..s, stored
as the index i*s + (j-1). Part 0 plays the role of the overloaded part and
parts 1, 2 the underloaded ones in the occupancy event.

A tuple is alpha-good when its label sum is congruent mod s to one of
1..floor(alpha*s). The hypergraph H^alpha keeps the alpha_x-good sets of
type x+ for every partition x of r-1, where (r-1)+ = (r+1) and otherwise
x+ = (x, 1, 1).

Everything that depends only on types (edge counts, degrees, coefficients
of Q) is computed from label-sum residue counts, so nothing needs to be
materialized; edges are generated lazily when asked for.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._exact import InvalidInput, comb, falling
from .families import build_kap
from .hypergraph import Hypergraph

__all__ = [
    "PartiteSpec",
    "WeightVector",
    "PartiteHypergraph",
    "partitions",
    "extend_type",
    "type_of",
    "alpha_good",
    "window",
    "build_weights",
    "abstract_degree",
    "build_partite",
    "simple_construction",
    "q_coefficients",
    "niceness_check",
    "occupancy_vector",
    "occupancy_probability",
    "conditional_expectation",
    "check_part_symmetry",
    "degree_sandwich",
]


# types and goodness

def partitions(n: int) -> list[tuple[int, ...]]:
    """Partitions of n as weakly decreasing tuples, fewest parts first."""
    out: list[tuple[int, ...]] = []

    def rec(rem, cap, acc):
        if rem == 0:
            out.append(tuple(acc))
            return
        for p in range(min(rem, cap), 0, -1):
            rec(rem - p, p, acc + [p])

    rec(n, n, [])
    return sorted(out, key=lambda t: (len(t), [-v for v in t]))


def extend_type(x: tuple[int, ...], r: int) -> tuple[int, ...]:
    """x+ : (r+1) for x = (r-1), else (x, 1, 1)."""
    if tuple(x) == (r - 1,):
        return (r + 1,)
    return tuple(sorted(tuple(x) + (1, 1), reverse=True))


def _occupancy(vertices: Iterable[int], s: int) -> Counter:
    return Counter(int(v) // s for v in vertices)


def type_of(e: Iterable, s: int) -> tuple[int, ...]:
    """Sorted nonzero part occupancies of e (indices or (i, j) pairs)."""
    parts = Counter(v[0] if isinstance(v, tuple) else int(v) // s for v in e)
    return tuple(sorted(parts.values(), reverse=True))


def window(alpha, s: int) -> int:
    """Number of good residues, min(floor(alpha*s), s)."""
    return max(0, min(math.floor(Fraction(alpha) * s), s))


def _good(total: int, W: int, s: int) -> bool:
    return (total - 1) % s < W


def alpha_good(tuple_, alpha, s: int) -> bool:
    """Label sum mod s lies in {1, ..., floor(alpha*s)}. Accepts (i, j)
    pairs or bare labels j."""
    total = sum(v[1] if isinstance(v, tuple) else int(v) for v in tuple_)
    return _good(total, window(alpha, s), s)


# residue-count machinery

def _fold(full: np.ndarray, s: int) -> np.ndarray:
    out = np.zeros(s, dtype=full.dtype)
    for start in range(0, full.shape[0], s):
        chunk = full[start : start + s]
        out[: chunk.shape[0]] += chunk
    return out


def _cconv(a: np.ndarray, b: np.ndarray, s: int) -> np.ndarray:
    return _fold(np.convolve(a, b), s)


def _subset_sum_counts(labels: Sequence[int], c: int, s: int) -> np.ndarray:
    """counts[t] = number of c-subsets of ``labels`` with sum = t mod s."""
    dp = np.zeros((c + 1, s), dtype=object if s ** max(c, 1) > 2**62 else np.int64)
    dp[0, 0] = 1
    for j in labels:
        for size in range(c, 0, -1):
            dp[size] += np.roll(dp[size - 1], j % s)
    return dp[c]


@lru_cache(maxsize=None)
def _full_counts(c: int, s: int) -> tuple[int, ...]:
    return tuple(int(v) for v in _subset_sum_counts(range(1, s + 1), c, s))


def _good_mask(W: int, s: int, shift: int = 0) -> np.ndarray:
    t = np.arange(s)
    return ((t + shift - 1) % s) < W


def _multiset_groups(y: Sequence[int]) -> list[tuple[int, int]]:
    cnt = Counter(y)
    return sorted(cnt.items(), reverse=True)


def _placements(n_slots: int, y: Sequence[int]) -> int:
    """Ways to put the entries of y into distinct slots out of n_slots,
    entries with equal value being interchangeable."""
    if len(y) > n_slots:
        return 0
    out = falling(n_slots, len(y))
    for _, m in _multiset_groups(y):
        out //= math.factorial(m)
    return out


def _remove(multiset: tuple[int, ...], v: int) -> tuple[int, ...]:
    lst = list(multiset)
    lst.remove(v)
    return tuple(lst)


# specs and weights

@dataclass(frozen=True)
class PartiteSpec:
    """Parameters (r, l, s, gamma). ``relaxed`` allows any l >= r+1 and
    small s, warning when the strict regime l = 4(r+1)!, gamma >= 10 l^2/s
    is not met."""

    r: int
    l: int  # noqa: E741
    s: int
    gamma: Fraction
    relaxed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma).limit_denominator(10**9) if isinstance(self.gamma, float) else Fraction(self.gamma))
        self.validate()

    @property
    def N(self) -> int:
        return self.s * self.l

    @property
    def strict_ok(self) -> bool:
        return (
            self.l == 4 * math.factorial(self.r + 1)
            and Fraction(10 * self.l**2, self.s) <= self.gamma <= Fraction(1, 2)
        )

    def validate(self) -> None:
        if self.r < 1:
            raise InvalidInput("r must be >= 1")
        if self.s < 1:
            raise InvalidInput("s must be >= 1")
        if not 0 < self.gamma <= Fraction(1, 2):
            raise InvalidInput(f"gamma={self.gamma} outside (0, 1/2]")
        if self.relaxed:
            if self.l < self.r + 1:
                raise InvalidInput(f"need l >= r+1 = {self.r + 1}, got l={self.l}")
            return
        if self.l != 4 * math.factorial(self.r + 1):
            raise InvalidInput(f"strict mode needs l = 4(r+1)! = {4 * math.factorial(self.r + 1)}")
        if self.gamma < Fraction(10 * self.l**2, self.s):
            raise InvalidInput(
                f"strict mode needs gamma >= 10 l^2 / s = {Fraction(10 * self.l**2, self.s)}; use relaxed mode"
            )

    def as_dict(self) -> dict:
        return {"r": self.r, "l": self.l, "s": self.s, "gamma": str(self.gamma), "relaxed": self.relaxed, "N": self.N}


@dataclass
class WeightVector:
    """alpha_x for each partition x of r-1, with the residuals gamma_x used
    to set them and any notes from relaxed mode."""

    spec: PartiteSpec
    alpha: dict
    residual: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __getitem__(self, x) -> Fraction:
        return self.alpha[tuple(x)]

    def items(self):
        return self.alpha.items()

    @property
    def within_bounds(self) -> bool:
        """alpha_(r-1) = 2 gamma and 0 <= alpha_x <= 4 gamma / l^2 otherwise."""
        sp = self.spec
        cap = 4 * sp.gamma / sp.l**2
        top = (sp.r - 1,)
        return self.alpha[top] == 2 * sp.gamma and all(
            0 <= a <= cap for x, a in self.alpha.items() if x != top
        )

    def as_dict(self) -> dict:
        return {
            "alpha": {",".join(map(str, x)): str(a) for x, a in self.alpha.items()},
            "residual": {",".join(map(str, x)): str(g) for x, g in self.residual.items()},
            "within_bounds": self.within_bounds,
            "notes": list(self.notes),
        }


def _snap(a: Fraction, s: int) -> Fraction:
    """Nearest multiple of 1/s (half up), at least 1/s when a > 0."""
    if a <= 0:
        return Fraction(0)
    k = math.floor(a * s + Fraction(1, 2))
    return Fraction(max(k, 1), s)


def build_weights(spec: PartiteSpec) -> WeightVector:
    """Weights by induction on the number of parts |x|.

    alpha_(r-1) = 2 gamma, alpha_x = gamma / C(l-2, 2) for |x| = 2, and for
    |x| >= 3 alpha_x = gamma_x / C(l-|x|, 2), where gamma_x s^2 is gamma s^2
    minus the abstract degree of x from the weights already assigned.
    In relaxed mode every weight is snapped to a multiple of 1/s before it
    is used, so floor(alpha s) = alpha s exactly, and a negative residual is
    clamped to 0 with a note; in strict mode it is an error.
    """
    r, l, s, g = spec.r, spec.l, spec.s, spec.gamma
    if r < 2:
        raise InvalidInput("the weighted construction needs r >= 2")
    if spec.relaxed and not spec.strict_ok:
        warnings.warn("partite spec outside the strict regime; inequalities are reported, not guaranteed", stacklevel=2)
    types = partitions(r - 1)
    alpha: dict = {x: Fraction(0) for x in types}
    wv = WeightVector(spec, alpha)
    fix = (lambda a: _snap(a, s)) if spec.relaxed else (lambda a: a)
    for x in types:
        if len(x) == 1:
            alpha[x] = fix(2 * g)
            wv.residual[x] = g
        elif len(x) == 2:
            alpha[x] = fix(Fraction(g) / comb(l - 2, 2)) if comb(l - 2, 2) else Fraction(0)
            wv.residual[x] = g
    for size in range(3, r):
        level = [x for x in types if len(x) == size]
        base = dict(alpha)
        for x in level:
            contrib = abstract_degree(x, WeightVector(spec, base), spec)
            gx = Fraction(g * s * s - contrib, s * s)
            if gx < 0:
                if not spec.relaxed:
                    raise InvalidInput(f"negative residual gamma_x = {gx} for type {x}")
                wv.notes.append(f"residual for {x} was {gx}; clamped to 0")
                gx = Fraction(0)
            wv.residual[x] = gx
            denom = comb(l - size, 2)
            alpha[x] = fix(gx / denom) if denom else Fraction(0)
    return wv


def _admitted(spec: PartiteSpec, weights: WeightVector) -> dict:
    """Admitted edge type y -> window W_y."""
    out = {}
    for x, a in weights.items():
        out[extend_type(x, spec.r)] = window(a, spec.s)
    return out


def abstract_degree(x: Sequence[int], weights: WeightVector, spec: PartiteSpec) -> int:
    """Number of unordered pairs {u, u'} (u = u' allowed, and u, u' may repeat
    vertices of the prototype) such that the multiset A0_x + u + u' is good
    for its admitted type. A0_x has labels 1..x_i in part i.

    Counted in closed form: a pair spread over two distinct parts has exactly
    s label pairs per residue, a pair inside one part is counted by residue
    directly.
    """
    x = tuple(x)
    r, l, s = spec.r, spec.l, spec.s
    if sum(x) != r - 1:
        raise InvalidInput(f"type {x} is not a partition of r-1 = {r - 1}")
    adm = _admitted(spec, weights)
    a = len(x)
    sigma = sum(v * (v + 1) // 2 for v in x)
    # same-part multiset pairs by residue: (ordered + diagonal) / 2
    diag = np.zeros(s, dtype=np.int64)
    for j in range(1, s + 1):
        diag[(2 * j) % s] += 1
    same = (s + diag) // 2

    def typ(occ):
        return tuple(sorted((v for v in occ if v), reverse=True))

    def same_part(occ):
        W = adm.get(typ(occ), 0)
        return int(same[_good_mask(W, s, sigma)].sum()) if W else 0

    def split(occ):
        return s * adm.get(typ(occ), 0)

    total = 0
    base = list(x)
    free = l - a
    for i in range(a):  # both in touched part i
        occ = base.copy()
        occ[i] += 2
        total += same_part(occ)
    if free >= 1:  # both in one untouched part
        total += free * same_part(base + [2])
    for i, i2 in combinations(range(a), 2):  # two touched parts
        occ = base.copy()
        occ[i] += 1
        occ[i2] += 1
        total += split(occ)
    for i in range(a):  # touched part and untouched part
        if free >= 1:
            occ = base.copy()
            occ[i] += 1
            total += free * split(occ + [1])
    if free >= 2:  # two untouched parts
        total += comb(free, 2) * split(base + [1, 1])
    return total


# the hypergraph

class PartiteHypergraph(Hypergraph):
    """Generator-backed H^alpha. ``h``, ``degree``, ``has_edge`` and the
    coefficients of Q are exact without building the edge list."""

    def __init__(self, spec: PartiteSpec, weights: WeightVector | None = None):
        self.spec = spec
        self.weights = build_weights(spec) if weights is None else weights
        self.admitted = {y: W for y, W in _admitted(spec, self.weights).items() if W > 0}
        super().__init__(
            spec.N,
            (),
            spec.r + 1,
            part_size=spec.s,
            meta={"family": "partite", **spec.as_dict()},
        )
        self._h_cache: int | None = None

    def _is_lazy(self) -> bool:
        return True

    @property
    def l(self) -> int:  # noqa: E743
        return self.spec.l

    # counting by type
    def good_choices(self, y: Sequence[int]) -> int:
        """Label choices for one fixed placement of type y that are good."""
        s = self.spec.s
        W = self.admitted.get(tuple(y), 0)
        if not W:
            return 0
        dist = np.zeros(s, dtype=object)
        dist[0] = 1
        for c in y:
            dist = _cconv(dist, np.array(_full_counts(c, s), dtype=object), s)
        return int(dist[_good_mask(W, s)].sum())

    def type_counts(self) -> dict:
        """Edges per admitted type."""
        return {y: _placements(self.l, y) * self.good_choices(y) for y in self.admitted}

    @property
    def h(self) -> int:
        if self._edges is not None:
            return len(self._edges)
        if self._h_cache is None:
            self._h_cache = sum(self.type_counts().values())
        return self._h_cache

    # membership
    def has_edge(self, e) -> bool:
        e = tuple(sorted(int(v) for v in e))
        if len(e) != self.k or len(set(e)) != self.k:
            return False
        if e[0] < 0 or e[-1] >= self.N:
            return False
        s = self.spec.s
        W = self.admitted.get(type_of(e, s), 0)
        return W > 0 and _good(sum(v % s + 1 for v in e), W, s)

    def multiplicity(self, e) -> int:
        return int(self.has_edge(e))

    def degree(self, A) -> int:
        """Exact degree via residue counts over placements of each type."""
        A = tuple(sorted(set(int(v) for v in A)))
        if len(A) > self.k:
            raise ValueError(f"|A|={len(A)} exceeds k={self.k}")
        self._check_vertices(A)
        s, l = self.spec.s, self.l
        by_part: dict[int, list[int]] = {}
        for v in A:
            by_part.setdefault(v // s, []).append(v % s + 1)
        touched = sorted(by_part)
        sigma = sum(sum(js) for js in by_part.values())
        free = l - len(touched)
        excl_cache: dict = {}

        def excl_counts(part, c):
            key = (part, c)
            if key not in excl_cache:
                used = set(by_part[part])
                labels = [j for j in range(1, s + 1) if j not in used]
                excl_cache[key] = np.array(_subset_sum_counts(labels, c, s), dtype=object)
            return excl_cache[key]

        total = 0
        for y, W in self.admitted.items():
            good = _good_mask(W, s, sigma)

            def rec(idx, remaining, dist):
                nonlocal total
                if idx == len(touched):
                    ways = _placements(free, remaining)
                    if not ways:
                        return
                    d = dist
                    for c in remaining:
                        d = _cconv(d, np.array(_full_counts(c, s), dtype=object), s)
                    total += ways * int(d[good].sum())
                    return
                part = touched[idx]
                have = len(by_part[part])
                for v in sorted(set(remaining)):
                    if v >= have:
                        rec(idx + 1, _remove(remaining, v), _cconv(dist, excl_counts(part, v - have), s))

            start = np.zeros(s, dtype=object)
            start[0] = 1
            rec(0, tuple(y), start)
        return total

    # lazy edge list
    def _generate(self) -> Iterator[tuple[int, ...]]:
        s, l = self.spec.s, self.l
        subsets = {}
        for y in self.admitted:
            for c in set(y):
                if c not in subsets:
                    lst = [(sum(js) % s, js) for js in combinations(range(1, s + 1), c)]
                    by_res: dict[int, list] = {}
                    for res, js in lst:
                        by_res.setdefault(res, []).append(js)
                    subsets[c] = (lst, by_res)
        for y, W in self.admitted.items():
            for assign in _part_assignments(l, y):
                head, (last_part, last_c) = assign[:-1], assign[-1]
                for combo in product(*(subsets[c][0] for _, c in head)):
                    partial = sum(res for res, _ in combo)
                    verts = [p * s + j - 1 for (p, _), (_, js) in zip(head, combo) for j in js]
                    for t in range(1, W + 1):
                        res = (t - partial) % s
                        for js in subsets[last_c][1].get(res, ()):
                            yield tuple(sorted(verts + [last_part * s + j - 1 for j in js]))


def _part_assignments(l: int, y: Sequence[int]) -> list[list[tuple[int, int]]]:
    """All ways to give each entry of y its own part (equal entries
    interchangeable), as lists of (part, size)."""
    groups = _multiset_groups(y)
    out = []

    def rec(gi, used, acc):
        if gi == len(groups):
            out.append(list(acc))
            return
        c, m = groups[gi]
        avail = [p for p in range(l) if p not in used]
        for ps in combinations(avail, m):
            rec(gi + 1, used | set(ps), acc + [(p, c) for p in ps])

    rec(0, frozenset(), [])
    return out


def build_partite(spec: PartiteSpec, weights: WeightVector | None = None) -> PartiteHypergraph:
    return PartiteHypergraph(spec, weights)


# small explicit constructions

def simple_construction(r: int, **size) -> Hypergraph:
    """The small-r examples.

    r=1: ``n`` vertices, a ``d``-regular circulant graph on the first half
         and the second half isolated.
    r=2: two disjoint copies of the 3-AP hypergraph on Z/qZ (``q`` prime),
         parts of size q.
    r=3: N = 3s (``s``), 4-sets with two vertices in each of two parts.
    """
    if r == 1:
        n, d = int(size["n"]), int(size["d"])
        half = n // 2
        if n % 2 or d >= half or d < 1 or (d * half) % 2:
            raise InvalidInput(f"no {d}-regular graph on {half} vertices fits n={n}")
        offsets = list(range(1, d // 2 + 1))
        edges = {tuple(sorted((v, (v + o) % half))) for v in range(half) for o in offsets}
        if d % 2:
            edges |= {tuple(sorted((v, v + half // 2))) for v in range(half // 2)}
        return Hypergraph(n, sorted(edges), 2, part_size=half, meta={"family": "simple", "r": 1, "n": n, "d": d})
    if r == 2:
        q = int(size["q"])
        base = build_kap(q, 3)
        edges = list(base.edges) + [tuple(v + q for v in e) for e in base.edges]
        return Hypergraph(2 * q, edges, 3, part_size=q, meta={"family": "simple", "r": 2, "q": q})
    if r == 3:
        s = int(size["s"])
        if s < 2:
            raise InvalidInput("r=3 needs s >= 2")
        pairs = [list(combinations(range(p * s, (p + 1) * s), 2)) for p in range(3)]
        edges = [
            tuple(sorted(a + b)) for p, p2 in combinations(range(3), 2) for a in pairs[p] for b in pairs[p2]
        ]
        return Hypergraph(3 * s, edges, 4, part_size=s, meta={"family": "simple", "r": 3, "s": s})
    raise InvalidInput("simple constructions exist for r in {1, 2, 3}")


# the polynomial Q

def _q_poly(e1: int, e23: int) -> list[int]:
    """Coefficients of (1+2x)^e1 (1-x)^e23."""
    a = [comb(e1, t) * 2**t for t in range(e1 + 1)]
    b = [comb(e23, t) * (-1) ** t for t in range(e23 + 1)]
    out = [0] * (e1 + e23 + 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return out


def q_coefficients(H: Hypergraph, method: str = "auto") -> list[int]:
    """c_0..c_k of Q(x) = sum_e (1+2x)^{e_1} (1-x)^{e_2+e_3}.

    ``method="closed"`` (default for :class:`PartiteHypergraph`) sums over
    placements of each admitted type on the three special parts;
    ``method="enumerate"`` walks the edges and is the oracle.
    """
    s = H.part_size
    if s is None:
        raise InvalidInput("q_coefficients needs a hypergraph with parts")
    k = H.k
    out = [0] * (k + 1)
    if method == "auto":
        method = "closed" if isinstance(H, PartiteHypergraph) else "enumerate"
    if method == "closed":
        if not isinstance(H, PartiteHypergraph):
            raise InvalidInput("closed form needs a PartiteHypergraph")
        l = H.l
        for y in H.admitted:
            G = H.good_choices(y)
            if not G:
                continue
            # entries (or nothing) landing on parts 0, 1, 2; rest elsewhere
            for v0, v1, v2 in _special_assignments(y):
                rest = list(y)
                for v in (v0, v1, v2):
                    if v:
                        rest.remove(v)
                ways = _placements(l - 3, rest)
                if not ways:
                    continue
                for t, c in enumerate(_q_poly(v0, v1 + v2)):
                    out[t] += G * ways * c
        return out
    if method != "enumerate":
        raise InvalidInput(f"unknown method {method!r}")
    hist: Counter = Counter()
    for e in H.iter_edges():
        occ = _occupancy(e, s)
        hist[(occ.get(0, 0), occ.get(1, 0) + occ.get(2, 0))] += 1
    for (e1, e23), cnt in hist.items():
        for t, c in enumerate(_q_poly(e1, e23)):
            out[t] += cnt * c
    return out


def _special_assignments(y: Sequence[int]) -> list[tuple[int, int, int]]:
    """Distinct (v0, v1, v2) with each v either 0 or an unused entry of y."""
    seen = set()
    out = []

    def rec(idx, remaining, acc):
        if idx == 3:
            t = tuple(acc)
            if t not in seen:
                seen.add(t)
                out.append(t)
            return
        rec(idx + 1, remaining, acc + [0])
        for v in sorted(set(remaining)):
            rec(idx + 1, _remove(remaining, v), acc + [v])

    rec(0, tuple(y), [])
    return out


# niceness

def niceness_check(
    H: Hypergraph,
    r: int,
    l: int,
    gamma,
    eta_max=None,
    budget: int | None = None,
    n_samples: int = 2000,
    seed: int = 0,
) -> dict:
    """Measure the four nice conditions for an (r+1)-uniform l-part H.

    (i) eta_{r-1} <= eta_max (default 10 / (gamma s)); (ii) density in
    [gamma/l^2, 3 gamma/l^2]; (iii) Delta_r <= gamma N; (iv) c_r >=
    gamma N^{r+1}/l^{r+1}. Also reports the weaker target
    gamma s^{r+1} / r!.
    """
    gamma = Fraction(gamma)
    if H.k != r + 1:
        raise InvalidInput(f"expected an (r+1)-uniform hypergraph, got k={H.k}")
    s = H.part_size
    if s is None or s * l != H.N:
        raise InvalidInput("hypergraph parts do not match l")
    N, h = H.N, H.h
    eta_max = Fraction(10) / (gamma * s) if eta_max is None else Fraction(eta_max)
    rep_eta = H.regularity_report(r - 1, budget=budget, n_samples=n_samples, seed=seed)
    rep_delta = H.regularity_report(r, budget=budget, n_samples=n_samples, seed=seed)
    density = Fraction(h, comb(N, r + 1))
    coeffs = q_coefficients(H)
    c_r = coeffs[r]
    target = gamma * Fraction(N ** (r + 1), l ** (r + 1))
    weak = gamma * Fraction(s ** (r + 1), math.factorial(r))
    conds = {
        "i_near_regular": h > 0 and rep_eta.eta <= eta_max,
        "ii_density": gamma / l**2 <= density <= 3 * gamma / l**2,
        "iii_max_degree": h > 0 and rep_delta.max_degree <= gamma * N,
        "iv_coefficient": h > 0 and c_r >= target,
    }
    return {
        "conditions": conds,
        "nice": all(conds.values()),
        "eta": rep_eta.eta,
        "eta_exact": rep_eta.exact,
        "eta_max": eta_max,
        "density": density,
        "density_window": (gamma / l**2, 3 * gamma / l**2),
        "delta_r": rep_delta.max_degree,
        "delta_r_exact": rep_delta.exact,
        "gamma_N": gamma * N,
        "c": coeffs,
        "c_r": c_r,
        "c_r_target": target,
        "c_r_weak_target": weak,
        "c_r_weak_ok": c_r >= weak,
        "h": h,
        "N": N,
    }


# occupancy event

def occupancy_vector(l: int, s: int, m: int, eps) -> list[int]:
    """Integer occupancies for the uneven event: part 0 at (1+2 eps) m/l,
    parts 1, 2 at (1-eps) m/l, the rest at m/l. Each target is rounded half
    up, then parts are nudged by one (last parts first, never leaving the
    +-1 slack) until the total is m."""
    if l < 3:
        raise InvalidInput("the uneven event needs l >= 3")
    eps = Fraction(eps)
    base = Fraction(m, l)
    targets = [(1 + 2 * eps) * base, (1 - eps) * base, (1 - eps) * base] + [base] * (l - 3)
    occ = [math.floor(t + Fraction(1, 2)) for t in targets]
    diff = m - sum(occ)
    order = list(range(l - 1, 2, -1)) + [2, 1, 0]
    step = 1 if diff > 0 else -1
    while diff:
        moved = False
        for i in order:
            cand = occ[i] + step
            if abs(cand - targets[i]) <= 1 and 0 <= cand <= s:
                occ[i] = cand
                diff -= step
                moved = True
                if not diff:
                    break
        if not moved:
            raise InvalidInput(f"no occupancy within +-1 of the targets sums to m={m}")
    if any(not 0 <= n <= s for n in occ):
        raise InvalidInput(f"occupancy {occ} exceeds the part size {s}")
    return occ


def _entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log(x) - (1 - x) * math.log(1 - x)


def occupancy_probability(
    l: int,
    s: int,
    m: int,
    eps=0,
    mode: str = "exact",
    occupancies: Sequence[int] | None = None,
):
    """Probability that a uniform m-subset has the given part occupancies.

    ``mode="exact"`` returns prod C(s, n_i) / C(sl, m) as a Fraction
    (occupancies default to :func:`occupancy_vector`). ``mode="entropy"``
    returns the log-scale estimate s [H((1+2e)t) + 2H((1-e)t) - 3H(t)],
    t = m/N, which drops polynomial factors.
    """
    if mode == "entropy":
        t = m / (s * l)
        e = float(eps)
        return s * (_entropy((1 + 2 * e) * t) + 2 * _entropy((1 - e) * t) - 3 * _entropy(t))
    if mode != "exact":
        raise InvalidInput(f"unknown mode {mode!r}")
    occ = list(occupancies) if occupancies is not None else occupancy_vector(l, s, m, eps)
    if len(occ) != l or sum(occ) != m:
        raise InvalidInput("occupancies must have one entry per part and sum to m")
    if any(not 0 <= n <= s for n in occ):
        raise InvalidInput("occupancy outside 0..s")
    num = 1
    for n in occ:
        num *= comb(s, n)
    return Fraction(num, comb(s * l, m))


def conditional_expectation(H: Hypergraph, occupancies: Sequence[int]) -> Fraction:
    """E[N(B) | |B & V_i| = n_i for all i] = sum_e prod_i C(n_i, e_i)/C(s, e_i)."""
    s = H.part_size
    if s is None:
        raise InvalidInput("hypergraph has no part structure")
    l = H.N // s
    occ = [int(n) for n in occupancies]
    if len(occ) != l:
        raise InvalidInput(f"need {l} occupancies")
    if any(not 0 <= n <= s for n in occ):
        raise InvalidInput("occupancy exceeds the part size")
    ratio = [[Fraction(comb(n, c), comb(s, c)) if c <= s else Fraction(0) for c in range(H.k + 1)] for n in occ]
    if isinstance(H, PartiteHypergraph):
        total = Fraction(0)
        for y in H.admitted:
            G = H.good_choices(y)
            for assign in _part_assignments(l, y):
                term = Fraction(G)
                for p, c in assign:
                    term *= ratio[p][c]
                total += term
        return total
    hist: Counter = Counter()
    for e in H.iter_edges():
        hist[tuple(sorted(_occupancy(e, s).items()))] += 1
    total = Fraction(0)
    for pattern, cnt in hist.items():
        term = Fraction(cnt)
        for p, c in pattern:
            term *= ratio[p][c]
        total += term
    return total


def check_part_symmetry(H: Hypergraph, n_samples: int = 500, seed: int = 0) -> int:
    """Number of sampled (set, part permutation) pairs where membership
    changes; 0 for an l-part hypergraph. Half the samples are edges."""
    s = H.part_size
    if s is None:
        raise InvalidInput("hypergraph has no part structure")
    l = H.N // s
    rng = np.random.default_rng(seed)
    edges = H.edges
    bad = 0
    for t in range(n_samples):
        if t % 2 == 0 and edges:
            e = edges[int(rng.integers(len(edges)))]
        else:
            e = tuple(rng.choice(H.N, size=H.k, replace=False).tolist())
        pi = rng.permutation(l)
        moved = tuple(int(pi[v // s]) * s + v % s for v in e)
        if H.has_edge(e) != H.has_edge(moved):
            bad += 1
    return bad


def degree_sandwich(H: PartiteHypergraph, n_samples: int = 200, seed: int = 0) -> dict:
    """Compare (r-1)-set degrees with their main terms, per type x.

    Main term: floor(alpha s^2)/2 for x = (r-1) and C(l-|x|, 2) alpha_x s^2
    otherwise. Reports the abstract degree of the prototype, sampled real
    degrees of (r-1)-sets of type x, and the fitted constant
    C = max |d - main| / s over both.
    """
    sp = H.spec
    l, s = sp.l, sp.s
    rng = np.random.default_rng(seed)
    out: dict = {"types": {}, "fitted_constant": 0.0}
    for x, a in H.weights.items():
        if len(x) == 1:
            main = Fraction(math.floor(a * s * s), 2)
        else:
            main = comb(l - len(x), 2) * a * s * s
        ad = abstract_degree(x, H.weights, sp)
        real = []
        for _ in range(n_samples):
            parts = rng.choice(l, size=len(x), replace=False)
            A = [int(p) * s + int(j) for p, c in zip(parts, x) for j in rng.choice(s, size=c, replace=False)]
            real.append(H.degree(A))
        worst = max([abs(ad - main)] + [abs(d - main) for d in real])
        C = float(Fraction(worst) / s)
        out["types"][x] = {
            "main": main,
            "abstract": ad,
            "real_min": min(real),
            "real_max": max(real),
            "constant": C,
        }
        out["fitted_constant"] = max(out["fitted_constant"], C)
    return out
