"""Additive families over Z/NZ: k-APs, Schur triples, Sidon quadruples and
solution sets of linear systems Ax = 0."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._exact import BudgetExceeded, InvalidInput, default_budget, is_prime
from .hypergraph import Hypergraph

__all__ = [
    "build_kap",
    "build_schur",
    "build_sidon",
    "build_linear_system",
    "build_family",
    "LinearSystemSpec",
    "FAMILIES",
]


def _require_prime(N: int) -> None:
    if not is_prime(N):
        raise InvalidInput(f"N={N} is not prime")


def build_kap(N: int, k: int = 3) -> Hypergraph:
    """Nontrivial k-term progressions {x, x+d, ..., x+(k-1)d} in Z/NZ.

    One edge per pair (x, d) with d in 1..(N-1)/2, so h = N(N-1)/2 and
    every pair of residues lies in exactly C(k, 2) edges.
    """
    _require_prime(N)
    if k < 3 or N <= k:
        raise InvalidInput(f"need N prime > k >= 3, got N={N}, k={k}")
    x = np.arange(N, dtype=np.int64)[:, None, None]
    d = np.arange(1, (N - 1) // 2 + 1, dtype=np.int64)[None, :, None]
    steps = np.arange(k, dtype=np.int64)[None, None, :]
    edges = np.sort((x + steps * d) % N, axis=2).reshape(-1, k)
    return Hypergraph(N, edges.tolist(), k, meta={"family": "kap", "N": N, "k": k})


def build_schur(N: int) -> Hypergraph:
    """Schur triples {x, y, x+y} of distinct nonzero residues.

    Vertex v stands for residue v+1; ``labels`` holds the residues.
    """
    _require_prime(N)
    if N < 7:
        raise InvalidInput(f"Schur family needs N >= 7, got {N}")
    triples = set()
    for x in range(1, N):
        for y in range(x + 1, N):
            z = (x + y) % N
            if z != 0 and z != x and z != y:
                triples.add(tuple(sorted((x - 1, y - 1, z - 1))))
    return Hypergraph(
        N - 1,
        sorted(triples),
        3,
        labels=list(range(1, N)),
        meta={"family": "schur", "N": N, "k": 3},
    )


def build_sidon(N: int) -> Hypergraph:
    """4-sets {x, y, z, t} of distinct residues with x + y = z + t.

    A 4-set admits at most one such pairing (two would force a repeated
    element), so edges are distinct sets.
    """
    _require_prime(N)
    if N < 11:
        raise InvalidInput(f"Sidon family needs N >= 11, got {N}")
    by_sum: dict[int, list[tuple[int, int]]] = {}
    for x in range(N):
        for y in range(x + 1, N):
            by_sum.setdefault((x + y) % N, []).append((x, y))
    quads = set()
    for pairs in by_sum.values():
        # pairs with a common sum are automatically disjoint
        for (a, b), (c, d) in combinations(pairs, 2):
            quads.add(tuple(sorted((a, b, c, d))))
    return Hypergraph(N, sorted(quads), 4, meta={"family": "sidon", "N": N, "k": 4})


# linear systems

def _rank_mod(rows: list[list[int]], p: int) -> int:
    M = [[v % p for v in r] for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [v * inv % p for v in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def _inverse_mod(M: list[list[int]], p: int) -> list[list[int]]:
    n = len(M)
    aug = [[v % p for v in row] + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col]), None)
        if piv is None:
            raise InvalidInput("singular matrix mod p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [v * inv % p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [(a - f * b) % p for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class LinearSystemSpec:
    """An l x k integer system Ax = 0 over Z/NZ.

    ``exclude_zero`` restricts solutions to nonzero residues (vertex v is
    then residue v+1), which is how Schur triples arise from x + y = z.
    """

    A: tuple[tuple[int, ...], ...]
    N: int
    exclude_zero: bool = False
    _validated: bool = field(default=False, repr=False, compare=False)

    def __init__(self, A, N: int, exclude_zero: bool = False):
        rows = [list(map(int, r)) for r in (A if np.ndim(A) == 2 else [A])]
        object.__setattr__(self, "A", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "exclude_zero", bool(exclude_zero))
        object.__setattr__(self, "_validated", False)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.A)

    @property
    def k(self) -> int:
        return len(self.A[0])

    def validate(self) -> "LinearSystemSpec":
        """Check primality, l <= k-2, nonsingular minors and irredundancy."""
        _require_prime(self.N)
        l, k, p = self.l, self.k, self.N
        if any(len(r) != k for r in self.A):
            raise InvalidInput("matrix rows have unequal length")
        if l > k - 2:
            raise InvalidInput(f"need l <= k-2, got l={l}, k={k}")
        rows = [list(r) for r in self.A]
        for cols in combinations(range(k), l):
            minor = [[r[c] for c in cols] for r in rows]
            if _rank_mod(minor, p) < l:
                raise InvalidInput(f"minor on columns {cols} is singular mod {p}")
        base = _rank_mod(rows, p)
        for i, j in combinations(range(k), 2):
            diff = [0] * k
            diff[i], diff[j] = 1, -1
            if _rank_mod(rows + [diff], p) == base:
                raise InvalidInput(f"redundant pair ({i}, {j}): x_{i} = x_{j} follows from A")
        object.__setattr__(self, "_validated", True)
        return self


def build_linear_system(spec: LinearSystemSpec, budget: int | None = None) -> Hypergraph:
    """Vertex sets of solutions of Ax = 0 with pairwise distinct entries.

    The last l coordinates are solved from the first k-l through the
    inverse of the trailing l x l minor. Solutions with repeated entries
    are dropped, and solutions giving the same vertex set are merged, so
    the family is comparable with the dedicated builders.
    """
    spec.validate()
    l, k, p = spec.l, spec.k, spec.N
    free = k - l
    budget = default_budget() if budget is None else budget
    if p**free > budget:
        raise BudgetExceeded(f"{p}^{free} candidate solutions exceed budget {budget}")
    A = np.array(spec.A, dtype=np.int64) % p
    Minv = np.array(_inverse_mod(A[:, free:].tolist(), p), dtype=np.int64)
    grid = np.indices((p,) * free, dtype=np.int64).reshape(free, -1)
    rhs = (-(A[:, :free] @ grid)) % p
    tail = (Minv @ rhs) % p
    sols = np.concatenate([grid, tail], axis=0).T
    sols = np.sort(sols, axis=1)
    ok = np.all(sols[:, 1:] != sols[:, :-1], axis=1)
    if spec.exclude_zero:
        ok &= sols[:, 0] != 0
    sols = np.unique(sols[ok], axis=0)
    meta = {"family": "linsys", "N": p, "k": k, "A": [list(r) for r in spec.A]}
    if spec.exclude_zero:
        return Hypergraph(p - 1, (sols - 1).tolist(), k, labels=list(range(1, p)), meta=meta)
    return Hypergraph(p, sols.tolist(), k, meta=meta)


FAMILIES = ("kap", "schur", "sidon", "linsys")


def build_family(family: str, N: int, k: int | None = None, matrix=None, exclude_zero=False) -> Hypergraph:
    """Dispatch by family name, as used by the CLI."""
    if family == "kap":
        return build_kap(N, 3 if k is None else k)
    if family == "schur":
        return build_schur(N)
    if family == "sidon":
        return build_sidon(N)
    if family == "linsys":
        if matrix is None:
            raise InvalidInput("linsys needs a matrix")
        return build_linear_system(LinearSystemSpec(matrix, N, exclude_zero))
    raise InvalidInput(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
