"""Closed-form tail bounds, p-model rates and binomial helpers.

Bounds stated with unspecified O_k(1) / Omega_k(1) constants are evaluated
through a :class:`ConstantsPack`; the default pack is a documented stand-in,
not a value fixed by theory. Side conditions never raise: they come back as
flags on the :class:`BoundResult`. Asymptotic "much smaller than" conditions
are read as inequalities with a slack factor ``rho``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from scipy import stats

from ._exact import InvalidInput, comb, is_prime

__all__ = [
    "ConstantsPack",
    "BoundQuery",
    "BoundResult",
    "nearreg_bound",
    "nearreg_bound_min",
    "regular_variant_bound",
    "nearreg_log_threshold",
    "regular_variant_log_threshold",
    "ap3_explicit_bound",
    "azuma",
    "azuma_truncated",
    "pmodel_rate",
    "pmodel_window",
    "binom_pmf",
    "binom_tail",
    "binom_log_tail",
    "stirling_log_tail",
    "stirling_point",
    "pmodel_transfer",
    "evaluate",
    "THEOREMS",
]

_MAX_LOG = 709.0  # exp overflows beyond this


def _exp(x: float) -> float:
    if x == -math.inf:
        return 0.0
    return math.exp(min(x, _MAX_LOG)) if x < _MAX_LOG else math.inf


@dataclass(frozen=True)
class ConstantsPack:
    """Finite stand-ins for the polynomial prefactor N^{c1} and the
    exponential constant c2."""

    c1: float
    c2: float
    canonical: bool = False
    label: str = "user"

    @classmethod
    def default(cls, k: int, r: int) -> "ConstantsPack":
        """c1 = k^2, c2 = (10 k!)^(-10^r). Not canonical: the theory only
        guarantees that some constants exist."""
        log_c2 = -(10**r) * math.log(10 * math.factorial(k))
        return cls(float(k * k), math.exp(log_c2), False, "default")

    @classmethod
    def from_mapping(cls, d: Mapping) -> "ConstantsPack":
        try:
            return cls(float(d["c1"]), float(d["c2"]), bool(d.get("canonical", False)), str(d.get("label", "user")))
        except KeyError as exc:
            raise InvalidInput(f"constants pack is missing {exc}") from None

    @classmethod
    def from_file(cls, path) -> "ConstantsPack":
        return cls.from_mapping(json.loads(Path(path).read_text()))

    def as_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "canonical": self.canonical, "label": self.label}


@dataclass
class BoundResult:
    theorem: str
    value: float
    log_value: float
    conditions: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.conditions.values())

    @property
    def nontrivial(self) -> bool:
        return self.value < 1

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "value": self.value,
            "log_value": self.log_value,
            "valid": self.valid,
            "nontrivial": self.nontrivial,
            "conditions": dict(self.conditions),
            "details": dict(self.details),
            "params": dict(self.params),
        }


@dataclass
class BoundQuery:
    theorem: str
    params: dict
    constants: ConstantsPack | None = None
    rho: float = 10.0


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


# m-model bounds

def nearreg_log_threshold(N, k, r, m, h, eta) -> float:
    """log of (10 k!)^(10^r) h (eta m^{k-1}/N^{k-1})^{r/(r-1)}; -inf when the
    threshold is 0 (eta = 0, h = 0, m = 0 or r = 1)."""
    if r == 1 or eta == 0 or h == 0 or m == 0:
        return -math.inf
    return (
        10**r * math.log(10 * math.factorial(k))
        + math.log(h)
        + r / (r - 1) * (math.log(eta) + (k - 1) * math.log(m / N))
    )


def regular_variant_log_threshold(N, k, r, m, h, eta) -> float:
    """Same with exponent r/(r-2) and m^{k-2}/N^{k-2}; needs r >= 3."""
    if r < 3:
        raise InvalidInput("the regular variant needs r >= 3")
    if eta == 0 or h == 0:
        return -math.inf
    if k == 2:
        return 10**r * math.log(10 * math.factorial(k)) + math.log(h) + r / (r - 2) * math.log(eta)
    if m == 0:
        return -math.inf
    return (
        10**r * math.log(10 * math.factorial(k))
        + math.log(h)
        + r / (r - 2) * (math.log(eta) + (k - 2) * math.log(m / N))
    )


def _exponential_form(N, r, m, a, delta_r, c: ConstantsPack) -> float:
    """log of N^{c1} exp(-c2 a^{2/r} / (m Delta_r^{2/r}))."""
    if m <= 0:
        raise InvalidInput("m must be positive")
    if a <= 0:
        return c.c1 * math.log(N)
    if delta_r == 0:
        return -math.inf
    return c.c1 * math.log(N) - c.c2 * a ** (2 / r) / (m * delta_r ** (2 / r))


def _common(N, k, r, m, a, delta_r, h, eta, constants, theorem, log_thr):
    if constants is None:
        raise InvalidInput(f"{theorem} needs a constants pack")
    if not 1 <= r <= k:
        raise InvalidInput(f"r={r} outside 1..{k}")
    logv = _exponential_form(N, r, m, a, delta_r, constants)
    conds = {
        "a_positive": a > 0,
        "eta_range": 0 <= eta <= 3.0 ** (-r + 1),
        "a_threshold": a > 0 and (log_thr == -math.inf or math.log(a) >= log_thr),
    }
    details = {
        "log_threshold": log_thr,
        "threshold": _exp(log_thr),
        "constants": constants.as_dict(),
    }
    params = {"N": N, "k": k, "r": r, "m": m, "a": a, "delta_r": delta_r, "h": h, "eta": float(eta)}
    return BoundResult(theorem, _exp(logv), logv, conds, details, params)


def nearreg_bound(N, k, r, m, a, delta_r, h, eta=0.0, constants: ConstantsPack | None = None) -> BoundResult:
    """N^{c1} exp(-c2 a^{2/r}/(m Delta_r^{2/r})) for (r-1, eta)-near-regular H."""
    thr = nearreg_log_threshold(N, k, r, m, h, eta)
    return _common(N, k, r, m, a, delta_r, h, eta, constants, "thm1.2", thr)


def regular_variant_bound(N, k, r, m, a, delta_r, h, eta=0.0, constants: ConstantsPack | None = None) -> BoundResult:
    """Same display formula; weaker threshold for regular H, r >= 3."""
    if r < 3:
        raise InvalidInput("the regular variant needs r >= 3")
    thr = regular_variant_log_threshold(N, k, r, m, h, eta)
    res = _common(N, k, r, m, a, delta_r, h, eta, constants, "prop3.1", thr)
    return res


def nearreg_bound_min(
    N,
    k,
    m,
    a,
    deltas: Mapping[int, float],
    h,
    etas: Mapping[int, float] | float = 0.0,
    constants: ConstantsPack | Callable[[int], ConstantsPack] | None = None,
) -> BoundResult:
    """Minimum of the near-regular bound over the available r'.

    ``deltas[r']`` is Delta_{r'} and ``etas[r']`` the near-regularity of
    (r'-1)-sets. ``constants`` may be a pack or a function of r'.
    """
    if constants is None:
        raise InvalidInput("thm1.2 needs a constants pack")
    per = {}
    for rp in sorted(int(x) for x in deltas):
        eta = etas if not isinstance(etas, Mapping) else etas.get(rp, etas.get(str(rp), 0.0))
        pack = constants(rp) if callable(constants) else constants
        per[rp] = nearreg_bound(N, k, rp, m, a, deltas[rp] if rp in deltas else deltas[str(rp)], h, eta, pack)
    best = min(per, key=lambda rp: per[rp].log_value)
    out = per[best]
    res = BoundResult(
        "thm1.2-min",
        out.value,
        out.log_value,
        dict(out.conditions),
        {"argmin_r": best, "log_values": {rp: per[rp].log_value for rp in per}},
        {"N": N, "k": k, "m": m, "a": a, "h": h},
    )
    return res


def ap3_explicit_bound(N: int, m: int, a) -> BoundResult:
    """(Nm + 1) exp(-a/(9m)) for 3-APs in Z/NZ; also a* = 9m ln(Nm+1)."""
    if m <= 0:
        raise InvalidInput("m must be positive")
    a = float(a)
    logv = math.log(N * m + 1) - max(a, 0.0) / (9 * m)
    a_star = 9 * m * math.log(N * m + 1)
    return BoundResult(
        "thm5.2",
        _exp(logv),
        logv,
        {"a_positive": a > 0, "N_prime": is_prime(N)},
        {"a_star": a_star},
        {"N": N, "m": m, "a": a},
    )


def azuma(c: Iterable[float], a: float) -> BoundResult:
    """exp(-a^2 / (2 sum c_i^2)). With all c_i = 0 and a > 0 the event is
    impossible and the value is 0 (flagged ``certain``)."""
    c = [float(x) for x in c]
    if any(x < 0 for x in c):
        raise InvalidInput("increment bounds must be nonnegative")
    a = float(a)
    S = sum(x * x for x in c)
    if a <= 0:
        return BoundResult("azuma", 1.0, 0.0, {"a_positive": False}, {"sum_c2": S}, {"a": a, "m": len(c)})
    if S == 0:
        return BoundResult("azuma", 0.0, -math.inf, {"a_positive": True}, {"sum_c2": 0.0, "certain": True}, {"a": a, "m": len(c)})
    logv = -a * a / (2 * S)
    return BoundResult("azuma", math.exp(logv), logv, {"a_positive": True}, {"sum_c2": S}, {"a": a, "m": len(c)})


def azuma_truncated(c: Iterable[float], a: float, exceed: Iterable[float], N: int) -> BoundResult:
    """Azuma plus N * sum_i P(|X_i| > c_i)."""
    base = azuma(c, a)
    extra = N * sum(float(x) for x in exceed)
    value = base.value + extra
    return BoundResult(
        "azuma-truncated",
        value,
        _log(value),
        dict(base.conditions),
        {**base.details, "azuma": base.value, "truncation": extra},
        {**base.params, "N": N},
    )


# p-model

_RATE_DENOM = {"ap3": 18, "sidon": 32}


def pmodel_window(variant: str, N, p, k=None, r=None, delta_r=None, h=None, eta=0.0, l=None, regular=False):
    """(lower, upper) limits for delta in the p-model theorems."""
    logN = math.log(N)
    root = 1 / math.sqrt(p * N)
    if variant == "ap3":
        return max(logN / (p * p * N), root), p
    if variant == "kap":
        return max(logN / (p ** (k - 1) * N * N), root), p ** (k - 2)
    if variant == "sidon":
        return max(p ** -2.5 * (logN / N) ** 1.5, root), math.sqrt(p)
    if variant == "linsys":
        lower = max(p ** (-(k + l) / 2) * (logN / N) ** ((k - l) / 2), root)
        upper = p ** (l / (k - l - 1)) if k - l - 1 > 0 else math.inf
        return lower, upper
    if variant == "generic":
        if None in (k, r, delta_r, h):
            raise InvalidInput("generic window needs k, r, delta_r and h")
        if r < 2:
            raise InvalidInput("the p-model theorem needs r >= 2")
        t1 = delta_r * (N * logN) ** (r / 2) / (p ** (k - r / 2) * h)
        if regular and r >= 3:
            t2 = (eta**r * p ** (2 * k - 2 * r)) ** (1 / (r - 2)) if eta > 0 else 0.0
        else:
            t2 = (eta**r * p ** (k - r)) ** (1 / (r - 1)) if eta > 0 else 0.0
        upper = (p ** (k - r) * h / (N**r * delta_r)) ** (1 / (r - 1)) if delta_r > 0 else math.inf
        return max(t1, t2, root), upper
    raise InvalidInput(f"unknown p-model variant {variant!r}")


def pmodel_rate(k: int, delta: float, p: float, N: int, variant: str = "generic", rho: float = 10.0, **window) -> BoundResult:
    """Exponent delta^2 p N / (2 k^2 (1-p)); the 3-AP and Sidon variants
    use denominators 18 and 32, which agree with 2k^2 at k = 3 and 4."""
    p = float(p)
    if not 0 < p < 1:
        raise InvalidInput(f"p={p} outside (0, 1)")
    delta = float(delta)
    denom = _RATE_DENOM.get(variant, 2 * k * k)
    rate = delta * delta * p * N / (denom * (1 - p))
    conds: dict = {}
    details = {"denominator": denom * (1 - p), "probability": math.exp(-rate)}
    try:
        lo, hi = pmodel_window(variant, N, p, k=k, **window)
        conds["window_lower"] = rho * lo <= delta
        conds["window_upper"] = delta * rho <= hi
        details.update(window_lower=lo, window_upper=hi, rho=rho)
    except InvalidInput as exc:
        details["window"] = f"unchecked: {exc}"
        conds["window_checked"] = False
    return BoundResult("pmodel-rate", rate, _log(rate), conds, details, {"k": k, "delta": delta, "p": p, "N": N, "variant": variant})


# binomial

def _exact_p(p) -> bool:
    return isinstance(p, (Fraction, int)) and not isinstance(p, bool)


def binom_pmf(N: int, p, m: int):
    """b_{N,p}(m). Exact Fraction when p is a Fraction or int."""
    if not 0 <= m <= N:
        return Fraction(0) if _exact_p(p) else 0.0
    if _exact_p(p):
        p = Fraction(p)
        return comb(N, m) * p**m * (1 - p) ** (N - m)
    return float(stats.binom.pmf(m, N, float(p)))


def binom_tail(N: int, p, m: int):
    """B_{N,p}(m) = P(Bin(N, p) >= m)."""
    if m <= 0:
        return Fraction(1) if _exact_p(p) else 1.0
    if m > N:
        return Fraction(0) if _exact_p(p) else 0.0
    if _exact_p(p):
        return sum((binom_pmf(N, p, t) for t in range(m, N + 1)), Fraction(0))
    return float(stats.binom.sf(m - 1, N, float(p)))


def binom_log_tail(N: int, p: float, m: int) -> float:
    """log B_{N,p}(m) without underflow."""
    if m <= 0:
        return 0.0
    if m > N:
        return -math.inf
    return float(stats.binom.logsf(m - 1, N, float(p)))


def stirling_point(N: int, p: float, x: float) -> int:
    """floor(pN + x sqrt(Npq))."""
    return math.floor(p * N + x * math.sqrt(N * p * (1 - p)))


def stirling_log_tail(N: int, p: float, x: float) -> float:
    """Leading-order prediction -x^2/2 for log B_{N,p}(floor(pN + x sqrt(Npq)))."""
    return -x * x / 2


def pmodel_transfer(N: int, p, m_tail: Callable[[int], object] | Sequence) -> object:
    """Sum over m of b_{N,p}(m) * P(N(B_m) > p^k h + a).

    ``m_tail`` gives, for each m in 0..N, the m-model probability of the
    event (callable or sequence). Exact when p and all tails are exact.
    """
    get = m_tail if callable(m_tail) else (lambda m: m_tail[m])
    if not callable(m_tail) and len(m_tail) != N + 1:
        raise InvalidInput(f"need m-model tails for every m in 0..{N}")
    total = Fraction(0) if _exact_p(p) else 0.0
    for m in range(N + 1):
        t = get(m)
        if t is None:
            raise InvalidInput(f"missing m-model tail for m={m}")
        if t:
            total += binom_pmf(N, p, m) * t
    return total


# dispatcher

THEOREMS = ("thm1.2", "prop3.1", "thm5.2", "azuma", "azuma-truncated", "pmodel-rate", "binom-tail")


def _need(params: Mapping, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise InvalidInput(f"missing parameter(s): {', '.join(missing)}")
    return [params[k] for k in keys]


def evaluate(query: BoundQuery) -> BoundResult:
    """Evaluate a :class:`BoundQuery` by theorem id."""
    t, P = query.theorem, dict(query.params)
    if t in ("thm1.2", "prop3.1"):
        N, k, m, a, h = _need(P, "N", "k", "m", "a", "h")
        eta = float(P.get("eta", 0.0))
        pack = query.constants
        if P.get("min_over_r"):
            deltas = {int(x): v for x, v in _need(P, "deltas")[0].items()}
            etas = P.get("etas", eta)
            if isinstance(etas, Mapping):
                etas = {int(x): float(v) for x, v in etas.items()}
            chooser = pack if pack is not None else (lambda rp: ConstantsPack.default(k, rp))
            return nearreg_bound_min(N, k, m, a, deltas, h, etas, chooser)
        r, delta_r = _need(P, "r", "delta_r")
        pack = pack if pack is not None else ConstantsPack.default(k, r)
        fn = nearreg_bound if t == "thm1.2" else regular_variant_bound
        return fn(N, k, r, m, a, delta_r, h, eta, pack)
    if t == "thm5.2":
        N, m, a = _need(P, "N", "m", "a")
        return ap3_explicit_bound(int(N), int(m), a)
    if t == "azuma":
        if "c" in P:
            c = P["c"]
        else:
            ci, m = _need(P, "c_i", "m")
            c = [ci] * int(m)
        return azuma(c, _need(P, "a")[0])
    if t == "azuma-truncated":
        c, a, exceed, N = _need(P, "c", "a", "exceed", "N")
        return azuma_truncated(c, a, exceed, N)
    if t == "pmodel-rate":
        k, delta, p, N = _need(P, "k", "delta", "p", "N")
        window = {x: P[x] for x in ("r", "delta_r", "h", "eta", "l", "regular") if x in P}
        return pmodel_rate(int(k), delta, p, int(N), P.get("variant", "generic"), query.rho, **window)
    if t == "binom-tail":
        N, p = _need(P, "N", "p")
        N = int(N)
        if "x" in P:
            x = float(P["x"])
            m = stirling_point(N, float(p), x)
            logv = binom_log_tail(N, float(p), m)
            pred = stirling_log_tail(N, float(p), x)
            rel = abs(logv - pred) / abs(logv) if logv not in (0.0, -math.inf) else math.nan
            return BoundResult("binom-tail", _exp(logv), logv, {}, {"m": m, "stirling": pred, "relative_gap": rel}, {"N": N, "p": p, "x": x})
        m = int(_need(P, "m")[0])
        logv = binom_log_tail(N, float(p), m)
        return BoundResult(
            "binom-tail", _exp(logv), logv, {}, {"pmf": binom_pmf(N, float(p), m)}, {"N": N, "p": p, "m": m}
        )
    raise InvalidInput(f"unknown theorem {t!r}; choose from {', '.join(THEOREMS)}")
