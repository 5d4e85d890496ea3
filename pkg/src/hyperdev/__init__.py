"""Edge-count deviations of random subsets of near-regular hypergraphs.

Exact martingale verification, additive families over Z/NZ, the l-part
lower-bound construction, closed-form bounds and Monte Carlo tails.
"""

from ._exact import BudgetExceeded, HyperdevError, InvalidInput
from .families import LinearSystemSpec, build_family, build_kap, build_linear_system, build_schur, build_sidon
from .hypergraph import Hypergraph, RegularityReport, deviation, expected_partial
from .martingale import (
    Trajectory,
    check_increment_bound,
    conditional_increment_mean,
    martingale_reconstruct,
    run_trajectory,
)
from .ntt import ap3_fast_count

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "HyperdevError",
    "InvalidInput",
    "Hypergraph",
    "RegularityReport",
    "deviation",
    "expected_partial",
    "LinearSystemSpec",
    "build_family",
    "build_kap",
    "build_linear_system",
    "build_schur",
    "build_sidon",
    "Trajectory",
    "run_trajectory",
    "conditional_increment_mean",
    "martingale_reconstruct",
    "check_increment_bound",
    "ap3_fast_count",
    "__version__",
]
