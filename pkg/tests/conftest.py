import warnings
from math import comb

import numpy as np
import pytest

from hyperdev import Hypergraph


def random_hypergraph(rng, N, k, h=None):
    """Random k-uniform simple hypergraph with h distinct edges."""
    h = int(rng.integers(1, 2 * N)) if h is None else h
    h = min(h, comb(N, k))
    edges = set()
    while len(edges) < h:
        edges.add(tuple(sorted(rng.choice(N, size=k, replace=False).tolist())))
    return Hypergraph(N, sorted(edges), k, meta={"family": "random"})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _quiet_relaxed():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="partite spec outside the strict regime")
        yield
