"""Empirical distribution functions, Kolmogorov-Smirnov tests, proportion tests."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, DataError, DomainError

__all__ = [
    "EmpiricalCdf",
    "KsReport",
    "ProportionReport",
    "ecdf",
    "kolmogorov_sf",
    "ks_one_sample",
    "ks_two_sample",
    "sup_distance",
    "proportion_check",
    "dkw_band",
]

DEFAULT_LEVEL = 1e-3


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_samples: np.ndarray

    @property
    def n(self) -> int:
        return len(self.sorted_samples)

    def __call__(self, x):
        """Fraction of samples ``<= x`` (right-continuous)."""
        counts = np.searchsorted(self.sorted_samples, x, side="right")
        return counts / self.n

    def left_limit(self, x):
        """Fraction of samples ``< x``."""
        return np.searchsorted(self.sorted_samples, x, side="left") / self.n


@dataclass
class KsReport:
    statistic: float
    n1: int
    n2: Optional[int]
    p_value: float
    passed: bool
    level: float

    def to_dict(self) -> dict:
        return asdict(self)


def ecdf(samples) -> EmpiricalCdf:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DataError("ecdf of an empty sample")
    if not np.all(np.isfinite(x)):
        raise DataError("ecdf needs finite samples")
    return EmpiricalCdf(np.sort(x, kind="stable"))


def kolmogorov_sf(lam: float) -> float:
    """P(K > lam) for the Kolmogorov distribution.

    Uses ``2 sum (-1)^(k-1) exp(-2 k^2 lam^2)`` for ``lam >= 1`` and the
    Jacobi-transformed theta series below that, where the alternating
    series converges too slowly.
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.0:
        c = math.pi**2 / (8.0 * lam * lam)
        s = sum(math.exp(-((2 * k - 1) ** 2) * c) for k in range(1, 8))
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    total = 0.0
    for k in range(1, 101):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < 1e-300:
            break
    return min(1.0, max(0.0, 2.0 * total))


def _check_level(level: float) -> None:
    if not (0.0 < level < 1.0):
        raise DomainError(f"test level must lie in (0, 1), got {level!r}")


def ks_one_sample(
    e: EmpiricalCdf,
    cdf: Callable,
    level: float = DEFAULT_LEVEL,
) -> KsReport:
    """One-sample KS test of ``e`` against a continuous ``cdf``.

    ``cdf`` is called once with the array of sorted samples; scalar-only
    callables are detected and evaluated point by point.
    """
    _check_level(level)
    if e.n < 10:
        raise DataError(f"KS needs at least 10 samples, got {e.n}")
    x = e.sorted_samples
    try:
        f = np.asarray(cdf(x), dtype=float)
    except (TypeError, ValueError):
        f = None
    if f is None or f.shape != x.shape:
        f = np.array([float(cdf(float(v))) for v in x])
    if np.any(~np.isfinite(f)) or np.any(f < 0.0) or np.any(f > 1.0):
        raise ContractError("cdf returned values outside [0, 1]")
    d = max(np.max(np.abs(e(x) - f)), np.max(np.abs(e.left_limit(x) - f)))
    d = float(min(d, 1.0))
    p = kolmogorov_sf(math.sqrt(e.n) * d)
    return KsReport(d, e.n, None, p, p > level, level)


def ks_two_sample(e1: EmpiricalCdf, e2: EmpiricalCdf, level: float = DEFAULT_LEVEL) -> KsReport:
    _check_level(level)
    if e1.n < 10 or e2.n < 10:
        raise DataError("two-sample KS needs at least 10 samples on each side")
    support = np.concatenate([e1.sorted_samples, e2.sorted_samples])
    d = float(np.max(np.abs(e1(support) - e2(support))))
    n_eff = e1.n * e2.n / (e1.n + e2.n)
    p = kolmogorov_sf(math.sqrt(n_eff) * d)
    return KsReport(d, e1.n, e2.n, p, p > level, level)


def sup_distance(e: EmpiricalCdf, cdf: Callable) -> float:
    """Kolmogorov distance between an empirical and a reference CDF."""
    return ks_one_sample(e, cdf).statistic


@dataclass
class ProportionReport:
    z: float
    z_abs: Optional[float]
    p1: float
    p2: float
    p3: Optional[float]
    passed: bool
    degenerate: bool
    sigmas: float

    def to_dict(self) -> dict:
        return asdict(self)


def _counts(k: int, n: int) -> None:
    if n <= 0:
        raise DataError(f"sample size must be positive, got {n}")
    if k < 0 or k > n:
        raise DataError(f"count {k} outside [0, {n}]")


def proportion_check(
    k1: int,
    n1: int,
    k2: int,
    n2: int,
    k3: Optional[int] = None,
    n3: Optional[int] = None,
    sigmas: float = 3.0,
) -> ProportionReport:
    """Test ``p1 = 2 p2`` (and optionally ``p1 = p3``) by normal approximation.

    Written for the reflection identity P(N > a) = 2 P(theta > a) = P(|theta| > a):
    ``k1/n1`` counts N > a, ``k2/n2`` counts theta > a, ``k3/n3`` counts |theta| > a.
    Under the null ``E[k1 + k2] = p (2 n1 + n2)`` which gives the pooled ``p``.
    """
    _counts(k1, n1)
    _counts(k2, n2)
    p1, p2 = k1 / n1, k2 / n2
    pooled = (k1 + k2) / (2 * n1 + n2)
    q = min(pooled, 0.5)
    var = 2.0 * q * (1.0 - 2.0 * q) / n1 + 4.0 * q * (1.0 - q) / n2
    degenerate = var <= 0.0
    z = 0.0 if degenerate else (p1 - 2.0 * p2) / math.sqrt(var)
    passed = abs(z) <= sigmas

    z_abs = p3 = None
    if k3 is not None:
        if n3 is None:
            raise DataError("k3 given without n3")
        _counts(k3, n3)
        p3 = k3 / n3
        pool = (k1 + k3) / (n1 + n3)
        var3 = pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n3)
        if var3 <= 0.0:
            degenerate = True
            z_abs = 0.0
        else:
            z_abs = (p1 - p3) / math.sqrt(var3)
        passed = passed and abs(z_abs) <= sigmas
    return ProportionReport(z, z_abs, p1, p2, p3, passed, degenerate, sigmas)


def dkw_band(n: int, confidence: float) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band at ``confidence``."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not (0.0 < confidence < 1.0):
        raise DomainError(f"confidence must lie in (0, 1), got {confidence!r}")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n))
