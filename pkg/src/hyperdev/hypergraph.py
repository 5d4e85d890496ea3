"""k-uniform hypergraphs on {0, ..., N-1} with induced and partial edge counts.

Edges form a *parametrized family*: two parametrizations that produce the
same vertex set are two edges. All expectations and degree statistics are
exact (``int`` / ``Fraction``); floats only appear in Monte Carlo summaries.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._exact import BudgetExceeded, comb, default_budget, falling

__all__ = [
    "Hypergraph",
    "RegularityReport",
    "expected_partial",
    "deviation",
]


def expected_partial(N: int, k: int, h: int, j: int, m: int) -> Fraction:
    """Mean of the partial count N_j(B_m) over uniform m-subsets.

    Equals ``h * C(k, j) * (m)_j / (N)_j``.
    """
    if not 0 <= j <= k:
        raise ValueError(f"j={j} outside 0..{k}")
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    return Fraction(h * comb(k, j) * falling(m, j), falling(N, j))


@dataclass(frozen=True)
class RegularityReport:
    """Degree statistics of r-sets.

    ``eta`` is the smallest value such that every r-set degree lies in
    ``(1 +/- eta) * avg_degree``. In sampled mode ``max_degree``,
    ``min_degree`` and ``eta`` only cover the sampled sets.
    """

    r: int
    avg_degree: Fraction
    max_degree: int
    min_degree: int
    eta: Fraction
    exact: bool = True
    n_sets: int = 0
    seed: int | None = None

    @property
    def is_regular(self) -> bool:
        return self.exact and self.eta == 0

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "avg_degree": str(self.avg_degree),
            "avg_degree_float": float(self.avg_degree),
            "max_degree": self.max_degree,
            "min_degree": self.min_degree,
            "eta": str(self.eta),
            "eta_float": float(self.eta),
            "exact": self.exact,
            "n_sets": self.n_sets,
            "seed": self.seed,
        }


class Hypergraph:
    """A k-uniform (multi-)hypergraph on vertices ``0..N-1``.

    Parameters
    ----------
    n_vertices : int
        Number of vertices N.
    edges : iterable of iterables
        Each edge is k distinct vertices. Repeated edges are kept.
    k : int, optional
        Uniformity; inferred from the first edge when omitted.
    labels : sequence, optional
        Original label of every vertex (e.g. residues for Schur triples).
    part_size : int, optional
        Size s of the parts V_i = {i*s, ..., (i+1)*s - 1} for part-structured
        hypergraphs.
    meta : dict, optional
        Free-form description (family name and parameters).

    Instances are treated as immutable; lazily built caches do not change
    any observable value.
    """

    def __init__(
        self,
        n_vertices: int,
        edges: Iterable[Iterable[int]] = (),
        k: int | None = None,
        *,
        labels: Sequence | None = None,
        part_size: int | None = None,
        meta: dict | None = None,
    ) -> None:
        self._N = int(n_vertices)
        if self._N < 0:
            raise ValueError("n_vertices must be nonnegative")
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self._N:
            raise ValueError("labels must have one entry per vertex")
        self.part_size = part_size
        self.meta = dict(meta or {})
        self._edges: tuple[tuple[int, ...], ...] | None = None
        self._array: np.ndarray | None = None
        self._incidence: list[list[int]] | None = None
        self._multiset: Counter | None = None
        self._label_index: dict | None = None
        if k is None and self._is_lazy():
            raise ValueError("generator-backed hypergraphs must give k")
        if self._is_lazy():
            self._k = int(k)
            return
        edge_list = [tuple(sorted(int(v) for v in e)) for e in edges]
        if k is None:
            if not edge_list:
                raise ValueError("cannot infer k from an empty edge list")
            k = len(edge_list[0])
        self._k = int(k)
        for e in edge_list:
            self._check_edge(e)
        self._edges = tuple(edge_list)

    # hooks for generator-backed subclasses
    def _is_lazy(self) -> bool:
        return False

    def _generate(self) -> Iterator[tuple[int, ...]]:
        raise NotImplementedError

    def _check_edge(self, e: tuple[int, ...]) -> None:
        if len(e) != self._k:
            raise ValueError(f"edge {e} does not have {self._k} vertices")
        if len(set(e)) != len(e):
            raise ValueError(f"edge {e} repeats a vertex")
        if e and (e[0] < 0 or e[-1] >= self._N):
            raise ValueError(f"edge {e} has a vertex outside 0..{self._N - 1}")

    # basic attributes
    @property
    def N(self) -> int:
        return self._N

    @property
    def k(self) -> int:
        return self._k

    @property
    def h(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return self.h

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        if self._edges is None:
            self._edges = tuple(tuple(sorted(e)) for e in self._generate())
        return self._edges

    def iter_edges(self) -> Iterator[tuple[int, ...]]:
        return iter(self.edges)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return self.iter_edges()

    def __repr__(self) -> str:
        name = self.meta.get("family", "Hypergraph")
        return f"<{name} N={self.N} k={self.k} h={self.h}>"

    @property
    def edge_array(self) -> np.ndarray:
        """Edges as an ``(h, k)`` int64 array."""
        if self._array is None:
            arr = np.array(self.edges, dtype=np.int64)
            self._array = arr.reshape(len(self.edges), self.k)
        return self._array

    def incidence(self, v: int) -> list[int]:
        """Indices (into ``edges``) of the edges containing vertex v."""
        if self._incidence is None:
            inc: list[list[int]] = [[] for _ in range(self.N)]
            for idx, e in enumerate(self.edges):
                for u in e:
                    inc[u].append(idx)
            self._incidence = inc
        return self._incidence[v]

    def vertex_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_array.ravel(), minlength=self.N)

    # labels
    def index_of(self, label) -> int:
        if self.labels is None:
            return int(label)
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        return self._label_index[label]

    def vertices_of(self, labels: Iterable) -> tuple[int, ...]:
        """Map original labels to vertex indices."""
        return tuple(sorted(self.index_of(x) for x in labels))

    # membership and degrees
    def multiplicity(self, e: Iterable[int]) -> int:
        """Number of edges whose vertex set equals ``e``."""
        if self._multiset is None:
            self._multiset = Counter(self.edges)
        return self._multiset.get(tuple(sorted(e)), 0)

    def has_edge(self, e: Iterable[int]) -> bool:
        return self.multiplicity(e) > 0

    def __contains__(self, e) -> bool:
        return self.has_edge(e)

    def degree(self, A: Iterable[int]) -> int:
        """Number of edges (with multiplicity) containing the vertex set A."""
        A = tuple(sorted(set(int(v) for v in A)))
        if len(A) > self.k:
            raise ValueError(f"|A|={len(A)} exceeds k={self.k}")
        self._check_vertices(A)
        if not A:
            return self.h
        pivot = min(A, key=lambda v: len(self.incidence(v)))
        rest = set(A)
        return sum(1 for idx in self.incidence(pivot) if rest.issubset(self.edges[idx]))

    # counting
    def _check_vertices(self, vs: Iterable[int]) -> None:
        for v in vs:
            if not 0 <= v < self.N:
                raise ValueError(f"vertex {v} outside 0..{self.N - 1}")

    def _mask(self, B) -> np.ndarray:
        if isinstance(B, np.ndarray) and B.dtype == bool:
            if B.shape != (self.N,):
                raise ValueError(f"mask must have shape ({self.N},)")
            return B
        idx = np.fromiter((int(v) for v in B), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.N):
            bad = idx[(idx < 0) | (idx >= self.N)][0]
            raise ValueError(f"vertex {bad} outside 0..{self.N - 1}")
        mask = np.zeros(self.N, dtype=bool)
        mask[idx] = True
        return mask

    def intersection_profile(self, B) -> np.ndarray:
        """``profile[c]`` = number of edges f with |f & B| = c, c = 0..k."""
        mask = self._mask(B)
        if self.h == 0:
            return np.zeros(self.k + 1, dtype=np.int64)
        sizes = mask[self.edge_array].sum(axis=1)
        return np.bincount(sizes, minlength=self.k + 1)

    def count_induced(self, B) -> int:
        """Edges entirely inside B (with multiplicity)."""
        return int(self.intersection_profile(B)[self.k])

    def count_partial(self, B, j: int) -> int:
        """Sum over edges f of C(|f & B|, j)."""
        if not 0 <= j <= self.k:
            raise ValueError(f"j={j} outside 0..{self.k}")
        prof = self.intersection_profile(B)
        return sum(int(prof[c]) * comb(c, j) for c in range(j, self.k + 1))

    def partial_counts(self, B) -> list[int]:
        """``[N_0(B), ..., N_k(B)]``."""
        prof = self.intersection_profile(B)
        return [
            sum(int(prof[c]) * comb(c, j) for c in range(j, self.k + 1))
            for j in range(self.k + 1)
        ]

    def count_induced_batch(self, masks: np.ndarray, max_cells: int = 2**24) -> np.ndarray:
        """Induced counts for a stack of boolean masks of shape ``(n, N)``."""
        masks = np.asarray(masks, dtype=bool)
        n = masks.shape[0]
        out = np.zeros(n, dtype=np.int64)
        if self.h == 0 or n == 0:
            return out
        arr = self.edge_array
        step = max(1, max_cells // max(1, arr.size))
        for lo in range(0, n, step):
            block = masks[lo : lo + step]
            inside = block[:, arr[:, 0]].copy()
            for c in range(1, self.k):
                inside &= block[:, arr[:, c]]
            out[lo : lo + step] = inside.sum(axis=1)
        return out

    # derived hypergraphs
    def link(self, x: int) -> "Hypergraph":
        """The (k-1)-uniform link of x on the N-1 other vertices.

        Vertices above x are shifted down by one; ``labels`` keeps the
        original labels.
        """
        self._check_vertices([x])
        relabel = lambda v: v if v < x else v - 1  # noqa: E731
        edges = [
            tuple(relabel(v) for v in self.edges[idx] if v != x) for idx in self.incidence(x)
        ]
        old = self.labels if self.labels is not None else tuple(range(self.N))
        labels = old[:x] + old[x + 1 :]
        return Hypergraph(
            self.N - 1,
            edges,
            self.k - 1,
            labels=labels,
            meta={"family": "link", "of": self.meta.get("family"), "vertex": x},
        )

    # regularity
    def regularity_report(
        self,
        r: int,
        *,
        mode: str = "auto",
        budget: int | None = None,
        n_samples: int = 10_000,
        seed: int = 0,
    ) -> RegularityReport:
        """Average, max and min degree of r-sets and the near-regularity eta.

        ``mode="exact"`` scans every r-subset of every edge and raises
        :class:`BudgetExceeded` when that exceeds ``budget``;
        ``mode="sample"`` draws ``n_samples`` uniform r-sets with ``seed``;
        ``mode="auto"`` picks exact when affordable.
        """
        if not 0 <= r <= self.k:
            raise ValueError(f"r={r} outside 0..{self.k}")
        budget = default_budget() if budget is None else budget
        avg = Fraction(self.h * comb(self.k, r), comb(self.N, r))
        cost = self.h * comb(self.k, r)
        if mode not in ("auto", "exact", "sample"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "exact" and cost > budget:
            raise BudgetExceeded(f"{cost} r-subsets exceed budget {budget}")
        if mode == "exact" or (mode == "auto" and cost <= budget):
            counts = Counter()
            for e in self.edges:
                counts.update(combinations(e, r))
            n_sets = comb(self.N, r)
            mx = max(counts.values(), default=0)
            mn = 0 if len(counts) < n_sets else min(counts.values())
            return RegularityReport(r, avg, mx, mn, _eta(avg, mx, mn), True, n_sets, None)
        rng = np.random.default_rng(seed)
        degs = [
            self.degree(rng.choice(self.N, size=r, replace=False).tolist())
            for _ in range(n_samples)
        ]
        mx, mn = max(degs), min(degs)
        return RegularityReport(r, avg, mx, mn, _eta(avg, mx, mn), False, n_samples, seed)


def _eta(avg: Fraction, mx: int, mn: int) -> Fraction:
    if avg == 0:
        return Fraction(0)
    return max(Fraction(mx) / avg - 1, 1 - Fraction(mn) / avg, Fraction(0))


def deviation(H: Hypergraph, B, j: int | None = None) -> Fraction:
    """D_j(B) = N_j(B) - L_j(|B|); j defaults to k (the induced count)."""
    j = H.k if j is None else j
    mask = H._mask(B)
    m = int(mask.sum())
    return H.count_partial(mask, j) - expected_partial(H.N, H.k, H.h, j, m)
