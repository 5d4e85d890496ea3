"""Exact integer/rational helpers shared across the package."""

from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational

DEFAULT_BUDGET = 10**7


class HyperdevError(Exception):
    """Base class for package errors."""


class BudgetExceeded(HyperdevError):
    """An exact enumeration would exceed the configured work budget."""


class InvalidInput(HyperdevError, ValueError):
    """Parameters violate a precondition (bad prime, singular minor, ...)."""


def default_budget() -> int:
    """Budget from ``HYPERDEV_BUDGET`` if set, else 10**7."""
    raw = os.environ.get("HYPERDEV_BUDGET")
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            pass
    return DEFAULT_BUDGET


def falling(n: int, j: int) -> int:
    """Falling factorial (n)_j = n(n-1)...(n-j+1); zero when 0 <= n < j."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    out = 1
    for t in range(j):
        out *= n - t
        if out == 0:
            return 0
    return out


def comb(n: int, j: int) -> int:
    if j < 0 or n < 0 or j > n:
        return 0
    return math.comb(n, j)


def ratio(num: int, den: int) -> Fraction:
    """num/den with the convention 0/0 = 0."""
    if den == 0:
        if num != 0:
            raise ZeroDivisionError(f"{num}/0")
        return Fraction(0)
    return Fraction(num, den)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def as_fraction(x) -> Fraction:
    """Exact rational view of an int, Fraction, float or numeric string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)
