"""Closed-form and quadrature evaluation of the limit laws.

The kernel of everything here is

    V(a) = (4/pi^2) * integral over {x >= 0, 0 <= y <= a x} of
           dx dy / ((1 + x^2)(1 + y^2)),

the probability that ``|Y| <= a |X|`` for independent standard Cauchy ``X, Y``.
Integrating out ``y`` gives ``(4/pi^2) * int_0^inf arctan(a x) / (1 + x^2) dx``
and ``x = tan(phi)`` turns that into a proper integral over ``[0, pi/2]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidFamilyError

__all__ = [
    "adaptive_simpson",
    "v_of",
    "maxtime_cdf",
    "maxtime_density",
    "v_prime",
    "cauchy_cdf",
    "q_prob",
    "spitzer_cdf",
    "AlphaFamily",
    "Verdict",
    "IntegralTestVerdict",
    "integral_test",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10

# |u - 1/2| and |c - 1| below which the removable singularities are
# evaluated from their series instead of the quotient.
_SERIES_SWITCH = 1e-4

# V(0) = 0 and V(inf) = 1 fix this normalisation; it carries through to V'
# and to the density of log M_t / log t.
NORM = 4.0 / math.pi**2


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_depth: int = 60,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Classic Lyness recursion with Richardson correction, written with an
    explicit stack so deep refinement does not hit the recursion limit.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    return total


def _check_tol(tol: float) -> None:
    if not (0.0 < tol <= 1e-6):
        raise DomainError(f"tol must lie in (0, 1e-6], got {tol!r}")


def v_of(a: float, tol: float = DEFAULT_TOL) -> float:
    """Evaluate V(a) for ``a >= 0`` to absolute tolerance ``tol``."""
    a = float(a)
    if not math.isfinite(a):
        raise DomainError(f"V(a) needs a finite argument, got {a!r}")
    if a < 0.0:
        raise DomainError(f"V(a) is defined for a >= 0, got {a!r}")
    _check_tol(tol)
    if a == 0.0:
        return 0.0

    def integrand(phi: float) -> float:
        return math.atan(a * math.tan(phi))

    # the outer 4/pi^2 would also scale the quadrature error
    value = NORM * adaptive_simpson(
        integrand, 0.0, 0.5 * math.pi, tol * math.pi**2 / 4.0
    )
    return min(max(value, 0.0), 1.0)


def maxtime_cdf(u: float, tol: float = DEFAULT_TOL) -> float:
    """Limit CDF of ``log M_t / log t``, i.e. ``V(u / (1 - u))`` on [0, 1]."""
    u = float(u)
    if not (0.0 <= u <= 1.0):
        raise DomainError(f"maxtime_cdf needs 0 <= u <= 1, got {u!r}")
    if u == 0.0:
        return 0.0
    if u == 1.0:
        return 1.0
    return v_of(u / (1.0 - u), tol)


def _artanh_ratio(w: float) -> float:
    # artanh(w) / w, five terms; |w| is tiny wherever this is used
    w2 = w * w
    return 1.0 + w2 * (1.0 / 3.0 + w2 * (1.0 / 5.0 + w2 * (1.0 / 7.0 + w2 / 9.0)))


def maxtime_density(u: float) -> float:
    """Density ``(4/pi^2) log(u/(1-u)) / (2u - 1)`` of the limit law on (0, 1).

    Equals ``8/pi^2`` at ``u = 1/2`` and integrates to 1.
    """
    u = float(u)
    if not (0.0 < u < 1.0):
        raise DomainError(f"maxtime_density needs 0 < u < 1, got {u!r}")
    w = 2.0 * u - 1.0
    if abs(w) < 2.0 * _SERIES_SWITCH:
        # log(u/(1-u)) = 2 artanh(w)
        return NORM * 2.0 * _artanh_ratio(w)
    return NORM * (math.log(u) - math.log1p(-u)) / w


def v_prime(c: float) -> float:
    """Derivative ``V'(c) = (4/pi^2) log(c) / (c^2 - 1)``, with ``V'(1) = 2/pi^2``."""
    c = float(c)
    if not (c > 0.0) or not math.isfinite(c):
        raise DomainError(f"v_prime needs a finite c > 0, got {c!r}")
    if abs(c - 1.0) < _SERIES_SWITCH:
        # with w = (c-1)/(c+1): log c = 2 artanh w, c^2 - 1 = 4w/(1-w)^2
        w = (c - 1.0) / (c + 1.0)
        return NORM * 0.5 * (1.0 - w) ** 2 * _artanh_ratio(w)
    return NORM * math.log(c) / (c * c - 1.0)


def cauchy_cdf(x, gamma: float = 1.0):
    """Cauchy(0, gamma) distribution function; accepts scalars or arrays."""
    if not (gamma > 0.0):
        raise DomainError(f"Cauchy scale must be positive, got {gamma!r}")
    if np.ndim(x) == 0:
        return 0.5 + math.atan(float(x) / gamma) / math.pi
    return 0.5 + np.arctan(np.asarray(x, dtype=float) / gamma) / np.pi


def spitzer_cdf(x):
    """Limit law of ``2 theta(t) / log t``: the standard Cauchy CDF."""
    return cauchy_cdf(x, 1.0)


def q_prob(a: float, b: float, tol: float = DEFAULT_TOL) -> float:
    """P(|theta(T_a)| > |theta'(T'_b)|) for independent windings = V(log a / log b)."""
    if not (a > 1.0 and b > 1.0):
        raise DomainError(f"hitting radii must exceed 1, got a={a!r}, b={b!r}")
    return v_of(math.log(a) / math.log(b), tol)


# ---------------------------------------------------------------------------
# integral test
# ---------------------------------------------------------------------------


class Verdict(str, enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class AlphaFamily:
    """A candidate rate function alpha(t), parametrised on ``s = log log t``.

    ``start`` is ``log log t0`` for the lower end ``t0`` of the domain; it has
    to exceed 1 (``t0 > e^e``). Working in ``s`` avoids ever forming ``t``,
    which overflows long before the interesting range.
    """

    kind: str
    params: tuple = ()
    start: float = 3.0
    table_s: tuple = field(default=(), repr=False)
    table_alpha: tuple = field(default=(), repr=False)

    @classmethod
    def inv_loglog_pow(cls, c: float, p: float, start: float = 3.0) -> "AlphaFamily":
        """alpha(t) = c (log log t)^(-p)"""
        return cls("InvLogLogPow", (float(c), float(p)), start)

    @classmethod
    def inv_log_pow(cls, c: float, q: float, start: float = 3.0) -> "AlphaFamily":
        """alpha(t) = c (log t)^(-q)"""
        return cls("InvLogPow", (float(c), float(q)), start)

    @classmethod
    def custom(cls, log_t: Sequence[float], alpha: Sequence[float],
               start: float | None = None) -> "AlphaFamily":
        """Tabulated ``(log t, alpha)`` pairs, interpolated linearly in log log t."""
        log_t = np.asarray(log_t, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        if log_t.ndim != 1 or log_t.shape != alpha.shape or log_t.size < 2:
            raise InvalidFamilyError("custom table needs two equal-length 1-d columns")
        if np.any(log_t <= 0) or np.any(np.diff(log_t) <= 0):
            raise InvalidFamilyError("custom table log t values must be positive and increasing")
        s = np.log(log_t)
        if start is None:
            start = float(s[0])
        return cls("Custom", (), float(start), tuple(s), tuple(alpha))

    @property
    def label(self) -> str:
        if self.kind == "Custom":
            return f"Custom({len(self.table_s)} nodes)"
        return f"{self.kind}({self.params[0]:g}, {self.params[1]:g})"

    def log_alpha(self, s):
        """log alpha as a function of ``s = log log t``; never underflows."""
        s = np.asarray(s, dtype=float)
        if self.kind == "InvLogLogPow":
            c, p = self.params
            out = math.log(c) - p * np.log(s)
        elif self.kind == "InvLogPow":
            c, q = self.params
            out = math.log(c) - q * s
        elif self.kind == "Custom":
            ts = np.asarray(self.table_s)
            if np.any(s < ts[0] - 1e-12) or np.any(s > ts[-1] + 1e-12):
                raise DomainError("custom alpha evaluated outside its table")
            with np.errstate(divide="ignore"):
                out = np.log(np.interp(s, ts, np.asarray(self.table_alpha)))
        else:
            raise InvalidFamilyError(f"unknown family kind {self.kind!r}")
        return out if out.ndim else float(out)

    def __call__(self, s):
        """alpha as a function of ``s = log log t``."""
        return np.exp(self.log_alpha(s))

    def validate(self, s_max: float, n: int = 2001) -> None:
        if not (self.start > 1.0):
            raise InvalidFamilyError("domain must start beyond t0 = e^e (log log t0 > 1)")
        if self.kind in ("InvLogLogPow", "InvLogPow"):
            c, k = self.params
            if not (c > 0 and k > 0):
                raise InvalidFamilyError(f"{self.label}: need positive scale and exponent")
        if self.kind == "Custom" and np.any(np.asarray(self.table_alpha) <= 0):
            raise InvalidFamilyError(f"{self.label}: alpha must be positive")
        grid = np.linspace(self.start, s_max, n)
        values = self.log_alpha(grid)
        if not np.all(np.isfinite(values)):
            raise InvalidFamilyError(f"{self.label}: alpha must be positive")
        if np.any(np.diff(values) > 0):
            raise InvalidFamilyError(f"{self.label}: alpha must be non-increasing")
        if not values[-1] < values[0]:
            raise InvalidFamilyError(f"{self.label}: alpha does not decay on the grid")


@dataclass
class IntegralTestVerdict:
    classification: Verdict
    tail_estimates: list[tuple[float, float]]
    assumption_holds: bool

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "tail_estimates": [list(p) for p in self.tail_estimates],
            "assumption_holds": self.assumption_holds,
        }


DEFAULT_LIMITS = tuple(10.0**k for k in range(1, 10))
CONVERGE_TAIL = 1e-6
DIVERGE_TOTAL = 1e3


def _integrand(family: AlphaFamily, s: float) -> float:
    la = family.log_alpha(s)
    return math.exp(la) * abs(la)


def _assumption_holds(family: AlphaFamily, s_max: float, n: int = 2001) -> bool:
    # t -> t^e is s -> s + 1 in log log coordinates
    hi = s_max - 1.0
    if family.kind == "Custom":
        hi = min(hi, family.table_s[-1] - 1.0)
    if hi <= family.start:
        return False
    s = np.linspace(family.start, hi, n)
    slack = math.log(2.0) + 1e-12
    return bool(np.all(family.log_alpha(s + 1.0) + slack >= family.log_alpha(s)))


def integral_test(
    family: AlphaFamily,
    limits: Sequence[float] = DEFAULT_LIMITS,
    tol: float = 1e-13,
) -> IntegralTestVerdict:
    """Numerically classify ``int alpha(t) |log alpha(t)| / (t log t) dt``.

    After ``s = log log t`` the integrand is ``alpha |log alpha|`` in ``s``.
    Partial integrals run from ``family.start`` to each entry of ``limits``;
    each segment is integrated in ``log s`` so decade-spaced limits stay cheap.
    """
    limits = [float(x) for x in limits]
    if not limits:
        raise DomainError("integral_test needs at least one upper limit")
    if any(x <= 1.0 for x in limits) or any(b <= a for a, b in zip(limits, limits[1:])):
        raise DomainError("limits must be increasing and exceed 1")
    if limits[0] <= family.start:
        raise DomainError("first limit must lie beyond the domain start")
    family.validate(limits[-1])

    def in_log(v: float) -> float:
        s = math.exp(v)
        return _integrand(family, s) * s

    partial = 0.0
    lo = family.start
    tails: list[tuple[float, float]] = []
    increments: list[float] = []
    for hi in limits:
        inc = max(adaptive_simpson(in_log, math.log(lo), math.log(hi), tol), 0.0)
        partial += inc
        increments.append(inc)
        tails.append((hi, partial))
        lo = hi

    verdict = Verdict.INCONCLUSIVE
    if len(increments) >= 3:
        d1, d2, d3 = increments[-3:]
        shrinking = d2 <= 0.5 * d1 and d3 <= 0.5 * d2
        growing = d3 >= d2 >= d1 and d3 > 0.0
        if d3 < CONVERGE_TAIL and shrinking:
            verdict = Verdict.CONVERGES
        elif growing:
            verdict = Verdict.DIVERGES
    if verdict is Verdict.INCONCLUSIVE and partial > DIVERGE_TOTAL:
        verdict = Verdict.DIVERGES

    return IntegralTestVerdict(verdict, tails, _assumption_holds(family, limits[-1]))
