"""Exact circular convolution over Z/NZ and the fast 3-AP counter.

The transform is a radix-2 number-theoretic transform modulo the prime
998244353 (= 119 * 2^23 + 1, primitive root 3), vectorized over a leading
batch axis. Inputs are zero padded to a power of two >= 2N - 1 and the
linear convolution is folded mod N, so any N works. Products of two
residues stay below 2^60 and fit in int64.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._exact import InvalidInput, is_prime

__all__ = [
    "MOD",
    "ntt",
    "circular_convolution",
    "ap3_fast_count",
    "ap3_fast_count_batch",
    "ap3_naive_count",
]

MOD = 998_244_353
ROOT = 3
MAX_LOG = 23


@lru_cache(maxsize=None)
def _bitrev(L: int) -> np.ndarray:
    bits = L.bit_length() - 1
    idx = np.arange(L)
    rev = np.zeros(L, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=None)
def _twiddles(L: int, inverse: bool) -> tuple[np.ndarray, ...]:
    out = []
    length = 2
    while length <= L:
        w = pow(ROOT, (MOD - 1) // length, MOD)
        if inverse:
            w = pow(w, MOD - 2, MOD)
        half = length // 2
        tw = np.empty(half, dtype=np.int64)
        cur = 1
        for t in range(half):
            tw[t] = cur
            cur = cur * w % MOD
        out.append(tw)
        length *= 2
    return tuple(out)


def ntt(a: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Transform along the last axis, whose length must be a power of two."""
    a = np.asarray(a, dtype=np.int64) % MOD
    L = a.shape[-1]
    if L & (L - 1) or L.bit_length() - 1 > MAX_LOG:
        raise InvalidInput(f"length {L} is not a power of two <= 2^{MAX_LOG}")
    lead = a.shape[:-1]
    a = a[..., _bitrev(L)]
    length = 2
    for tw in _twiddles(L, inverse):
        half = length // 2
        blocks = a.reshape(*lead, L // length, length)
        u = blocks[..., :half]
        v = blocks[..., half:] * tw % MOD
        a = np.concatenate(((u + v) % MOD, (u - v) % MOD), axis=-1).reshape(*lead, L)
        length *= 2
    if inverse:
        a = a * pow(L, MOD - 2, MOD) % MOD
    return a


def _pad_len(n: int) -> int:
    L = 1
    while L < 2 * n - 1:
        L *= 2
    return L


def circular_convolution(a, b, n: int | None = None, method: str = "ntt") -> np.ndarray:
    """Exact (a * b)[t] = sum_u a[u] b[t - u mod n] for nonnegative int arrays.

    Batched along leading axes. With ``method="ntt"`` the NTT is used when
    every output entry is provably below the modulus, otherwise a float FFT
    whose rounded result is checked against direct sums on a few entries;
    if float precision is not enough either, falls back to exact Python
    integers. ``method="fft"`` goes straight to the checked float FFT, which
    is much faster on large batches; it also requires every output to sit
    within 1e-6 of an integer before rounding.
    """
    if method not in ("ntt", "fft"):
        raise InvalidInput(f"unknown method {method!r}")
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = a.shape[-1] if n is None else n
    if a.shape[-1] != n or b.shape[-1] != n:
        raise InvalidInput("inputs must have length n")
    if (a < 0).any() or (b < 0).any():
        raise InvalidInput("inputs must be nonnegative")
    bound = int(a.max(initial=0)) * int(b.max(initial=0)) * n
    L = _pad_len(n)
    same = a is b or (a.shape == b.shape and np.array_equal(a, b))
    if method == "ntt" and bound < MOD and L.bit_length() - 1 <= MAX_LOG:
        fa = ntt(_pad(a, L))
        fb = fa if same else ntt(_pad(b, L))
        lin = ntt(fa * fb % MOD, inverse=True)
        return _fold(lin, n)
    if bound < 2**50:
        ra = np.fft.rfft(a, L)
        lin = np.fft.irfft(ra * (ra if same else np.fft.rfft(b, L)), L)
        near = np.rint(lin)
        if np.abs(lin - near).max(initial=0.0) > 1e-6:
            raise ArithmeticError("float convolution is not within rounding distance of integers")
        out = _fold(near.astype(np.int64), n)
        _spot_check(a, b, out, n)
        return out
    av, bv = a.reshape(-1, n).tolist(), b.reshape(-1, n).tolist()
    rows = [[sum(x[u] * y[(t - u) % n] for u in range(n)) for t in range(n)] for x, y in zip(av, bv)]
    return np.array(rows, dtype=object).reshape(a.shape)


def _pad(a: np.ndarray, L: int) -> np.ndarray:
    out = np.zeros(a.shape[:-1] + (L,), dtype=np.int64)
    out[..., : a.shape[-1]] = a
    return out


def _fold(lin: np.ndarray, n: int) -> np.ndarray:
    out = lin[..., :n].copy()
    tail = lin[..., n : 2 * n - 1]
    out[..., : tail.shape[-1]] += tail
    return out


def _spot_check(a, b, out, n, n_checks: int = 8) -> None:
    rng = np.random.default_rng(0)
    av, bv, ov = a.reshape(-1, n), b.reshape(-1, n), out.reshape(-1, n)
    for _ in range(n_checks):
        row = int(rng.integers(av.shape[0]))
        t = int(rng.integers(n))
        direct = sum(int(av[row, u]) * int(bv[row, (t - u) % n]) for u in range(n))
        if direct != int(ov[row, t]):
            raise ArithmeticError("float convolution failed exact verification")


def _indicator(B, N: int) -> np.ndarray:
    B = np.asarray(B)
    if B.dtype == bool:
        if B.shape[-1] != N:
            raise InvalidInput(f"mask length {B.shape[-1]} != N={N}")
        return B.astype(np.int64)
    f = np.zeros(N, dtype=np.int64)
    idx = B.astype(np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= N):
        raise InvalidInput(f"vertex outside 0..{N - 1}")
    f[idx] = 1
    return f


def ap3_fast_count_batch(masks: np.ndarray, N: int, method: str = "ntt") -> np.ndarray:
    """3-AP counts for a stack of boolean masks, shape ``(n, N)``.

    ``method`` is passed to :func:`circular_convolution`."""
    if not is_prime(N) or N <= 3:
        raise InvalidInput(f"N={N} must be a prime > 3")
    f = np.atleast_2d(_indicator(masks, N))
    conv = circular_convolution(f, f, N, method)
    doubled = (2 * np.arange(N)) % N
    T = (conv[:, doubled] * f).sum(axis=1)
    size = f.sum(axis=1)
    return (T - size) // 2


def ap3_fast_count(B, N: int) -> int:
    """Parametrized 3-APs inside B via (T - |B|)/2, T = sum_{z in B} (f*f)(2z)."""
    return int(ap3_fast_count_batch(_indicator(B, N).astype(bool)[None, :], N)[0])


def ap3_naive_count(B, N: int) -> int:
    """Direct scan over all (x, d), d in 1..(N-1)/2; the oracle for the kernel."""
    f = _indicator(B, N).astype(bool)
    x = np.arange(N)
    total = 0
    for d in range(1, (N - 1) // 2 + 1):
        total += int(np.count_nonzero(f & f[(x + d) % N] & f[(x + 2 * d) % N]))
    return total
