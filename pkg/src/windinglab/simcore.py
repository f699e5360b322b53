"""Skew-product simulation of the planar winding number.

The planar motion started at (1, 0) is written as ``exp(R(H(t)) + i B(H(t)))``
with ``R`` (radial driver) and ``B`` (angular driver) independent linear
Brownian motions on an internal clock ``u``. Real time is recovered from the
inverse clock ``A(u) = int_0^u exp(2 R(s)) ds`` and ``H(t) = inf{u: A(u) > t}``.

``A`` overflows doubles near ``log t ~ 700`` so it is carried as
``A = S * exp(2 m)`` with ``m`` the running maximum of ``R`` -- a streaming
log-sum-exp -- and only ``log A`` is ever reported.

Fast-forward
    The first passage of ``R`` to the level needed for horizon ``log t`` has
    an infinite mean, so a fixed grid spends almost all of its work in deep
    excursions of ``R`` far below its running maximum, where ``exp(2R)`` adds
    nothing measurable to ``A``. When ``R`` sits more than ``DEEP_GAP`` below
    its maximum the engine takes coarse steps of size ``((depth - DEEP_GAP)/8)^2``
    (an 8-sigma move would be needed to climb back into the fine band) and
    resolves the angular driver on those steps exactly: its maximum from the
    Brownian-bridge maximum law, zero crossings from the bridge crossing
    probability ``exp(-2 b0 b1 / h)``. Inside the band the grid is uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import CensoredSampleError, ConfigError, InconsistentPathError
from .rng import SeedStream

__all__ = [
    "ClockPath",
    "WindingObservables",
    "simulate_clock_path",
    "observables_at",
    "sample_theta_at_hit",
    "sample_hits",
    "simulate_observables",
    "default_u_cap",
    "DEEP_GAP",
]

# log-clock gap 2 * DEEP_GAP = 30 nats: exp(-30) ~ 1e-13 per unit of clock
DEEP_GAP = 15.0
COARSE_SIGMAS = 8.0
# fine band below a hitting level for the Cauchy-hit sampler
HIT_BAND = 1.0

_NEG_INF = -np.inf

# columns of the per-horizon output rows
_THETA, _N, _LOG_M, _LOG_L, _H, _CENSORED = range(6)
N_COLUMNS = 6


def default_u_cap(log_t: float, factor: float = 1.0) -> float:
    """Internal-clock cap ``factor * 400 * (log_t / 2)^2``."""
    return factor * 400.0 * (0.5 * max(log_t, 1.0)) ** 2


@dataclass
class ClockPath:
    step: float
    b_hat: np.ndarray
    b: np.ndarray
    log_clock: np.ndarray
    censored: bool

    def __len__(self):
        return len(self.log_clock)


@dataclass(frozen=True)
class WindingObservables:
    log_t: float
    theta_t: float
    n_t: float
    log_m_t: float
    log_l_t: float
    h_t: float
    censored: bool

    @classmethod
    def from_row(cls, log_t: float, row) -> "WindingObservables":
        return cls(float(log_t), float(row[_THETA]), float(row[_N]), float(row[_LOG_M]),
                   float(row[_LOG_L]), float(row[_H]), bool(row[_CENSORED]))


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@nb.njit(cache=True, inline="always")
def _clock_step(x, m, s_acc, e_prev, dx, h):
    # one trapezoid step of A in the scaled representation A = s_acc * exp(2 m)
    x1 = x + dx
    if x1 > m:
        r = math.exp(2.0 * (m - x1))
        s_acc *= r
        e_prev *= r
        m = x1
    e1 = math.exp(2.0 * (x1 - m))
    s_acc += 0.5 * h * (e_prev + e1)
    return x1, m, s_acc, e1, 2.0 * m + math.log(s_acc)


@nb.njit(cache=True, inline="always")
def _lerp_log(lc0, lc1, g):
    # log clock at fraction g of a segment; A is linear on the first segment
    if lc0 == _NEG_INF:
        if g <= 0.0:
            return _NEG_INF
        return math.log(g) + lc1
    return lc0 + g * (lc1 - lc0)


@nb.njit(cache=True)
def _finalize(row, log_t, lc0, lc1, b0, b1, u0, h, nmax, lc_nmax, lc_zero):
    # horizon log_t falls inside the segment (lc0, lc1]; running state covers
    # every point up to and including the left end
    if lc0 == _NEG_INF:
        f = math.exp(log_t - lc1)
    else:
        f = (log_t - lc0) / (lc1 - lc0)
    theta = b0 + f * (b1 - b0)
    if theta > nmax:
        n_t = theta
        log_m = log_t
    else:
        n_t = nmax
        log_m = lc_nmax
    if theta == 0.0:
        log_l = log_t
    elif b0 * theta < 0.0:
        log_l = _lerp_log(lc0, lc1, f * b0 / (b0 - theta))
    else:
        log_l = lc_zero
    row[_THETA] = theta
    row[_N] = n_t
    row[_LOG_M] = min(log_m, log_t)
    row[_LOG_L] = min(log_l, log_t)
    row[_H] = u0 + f * h
    row[_CENSORED] = 0.0


@nb.njit(cache=True)
def _censor_rows(out, start):
    for i in range(start, out.shape[0]):
        for j in range(N_COLUMNS - 1):
            out[i, j] = np.nan
        out[i, _CENSORED] = 1.0


@nb.njit(cache=True)
def _run_path(rng, delta, log_ts, u_cap, radial_scale, fast_forward, out):
    """Stream one path through every horizon in ``log_ts`` (ascending)."""
    n_h = log_ts.shape[0]
    sd = math.sqrt(delta)
    deep = DEEP_GAP + COARSE_SIGMAS * sd
    x = 0.0
    m = 0.0
    s_acc = 0.0
    e = 1.0
    lc = _NEG_INF
    b = 0.0
    n_fine = 0
    coarse_time = 0.0
    u = 0.0
    nmax = 0.0
    lc_nmax = _NEG_INF
    lc_zero = _NEG_INF
    hi = 0
    while hi < n_h:
        if u >= u_cap:
            break
        coarse = fast_forward and (m - x) > deep
        if coarse:
            s = (m - x - DEEP_GAP) / COARSE_SIGMAS
            h = s * s
        else:
            s = sd
            h = delta
        z_r = rng.standard_normal()
        z_b = rng.standard_normal()
        x, m, s_acc, e, lc1 = _clock_step(x, m, s_acc, e, radial_scale * s * z_r, h)
        b1 = b + s * z_b
        while hi < n_h and lc1 > log_ts[hi]:
            _finalize(out[hi], log_ts[hi], lc, lc1, b, b1, u, h, nmax, lc_nmax, lc_zero)
            hi += 1
        if coarse:
            v_max = 1.0 - rng.random()
            v_zero = rng.random()
            d = b1 - b
            bridge_max = 0.5 * (b + b1 + math.sqrt(d * d - 2.0 * h * math.log(v_max)))
            if bridge_max > nmax:
                nmax = bridge_max
                lc_nmax = lc
            prod = b * b1
            if b1 == 0.0 or prod < 0.0 or (prod > 0.0 and v_zero < math.exp(-2.0 * prod / h)):
                lc_zero = lc1
            coarse_time += h
        else:
            if b1 > nmax:
                nmax = b1
                lc_nmax = lc1
            if b1 == 0.0:
                lc_zero = lc1
            elif b * b1 < 0.0:
                lc_zero = _lerp_log(lc, lc1, b / (b - b1))
            n_fine += 1
        b = b1
        lc = lc1
        u = n_fine * delta + coarse_time
    _censor_rows(out, hi)


@nb.njit(cache=True)
def _clock_path_kernel(rng, delta, target, u_cap, radial_scale):
    cap = 1024
    xs = np.empty(cap)
    bs = np.empty(cap)
    lcs = np.empty(cap)
    xs[0] = 0.0
    bs[0] = 0.0
    lcs[0] = _NEG_INF
    n = 1
    sd = math.sqrt(delta)
    x = 0.0
    m = 0.0
    s_acc = 0.0
    e = 1.0
    lc = _NEG_INF
    b = 0.0
    u = 0.0
    censored = False
    while n < 2 or lc <= target:
        if u >= u_cap:
            censored = True
            break
        z_r = rng.standard_normal()
        z_b = rng.standard_normal()
        x, m, s_acc, e, lc = _clock_step(x, m, s_acc, e, radial_scale * sd * z_r, delta)
        b = b + sd * z_b
        if n == cap:
            cap *= 2
            xs2 = np.empty(cap)
            bs2 = np.empty(cap)
            lcs2 = np.empty(cap)
            xs2[:n] = xs[:n]
            bs2[:n] = bs[:n]
            lcs2[:n] = lcs[:n]
            xs, bs, lcs = xs2, bs2, lcs2
        xs[n] = x
        bs[n] = b
        lcs[n] = lc
        n += 1
        u = (n - 1) * delta
    return xs[:n].copy(), bs[:n].copy(), lcs[:n].copy(), censored


@nb.njit(cache=True)
def _observables_kernel(b, lcs, delta, log_t, k, out):
    # grid points 0..k lie at or below the horizon, point k+1 beyond it
    nmax = 0.0
    lc_nmax = _NEG_INF
    lc_zero = _NEG_INF
    for j in range(1, k + 1):
        if b[j] > nmax:
            nmax = b[j]
            lc_nmax = lcs[j]
        if b[j] == 0.0:
            lc_zero = lcs[j]
        elif b[j - 1] * b[j] < 0.0:
            lc_zero = _lerp_log(lcs[j - 1], lcs[j], b[j - 1] / (b[j - 1] - b[j]))
    _finalize(out, log_t, lcs[k], lcs[k + 1], b[k], b[k + 1], k * delta, delta,
              nmax, lc_nmax, lc_zero)


@nb.njit(cache=True)
def _hit_kernel(rng, delta, level, u_cap, fast_forward):
    sd = math.sqrt(delta)
    deep = HIT_BAND + COARSE_SIGMAS * sd
    x = 0.0
    n_fine = 0
    coarse_time = 0.0
    u = 0.0
    while u < u_cap:
        gap = level - x
        coarse = fast_forward and gap > deep
        if coarse:
            s = (gap - HIT_BAND) / COARSE_SIGMAS
            h = s * s
        else:
            s = sd
            h = delta
        x1 = x + s * rng.standard_normal()
        if x1 >= level:
            tau = u + h * (level - x) / (x1 - x)
            # the angular driver is independent of the radial one, so its
            # value at the hitting clock is exactly N(0, tau)
            return math.sqrt(tau) * rng.standard_normal(), tau, False
        x = x1
        if coarse:
            coarse_time += h
        else:
            n_fine += 1
        u = n_fine * delta + coarse_time
    return np.nan, u, True


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def _check_step(delta: float, u_cap: float) -> None:
    if not (delta > 0.0) or not math.isfinite(delta):
        raise ConfigError(f"delta must be positive, got {delta!r}")
    if not (u_cap > 0.0):
        raise ConfigError(f"u_cap must be positive, got {u_cap!r}")


def simulate_clock_path(
    seed: SeedStream,
    delta: float,
    target_log_clock: float,
    u_cap: float | None = None,
    *,
    freeze_radial: bool = False,
) -> ClockPath:
    """Materialise both drivers and ``log A`` on the uniform grid ``k * delta``.

    The path runs until ``log A`` exceeds ``target_log_clock`` or the clock
    reaches ``u_cap`` (then ``censored`` is set). ``freeze_radial`` zeroes the
    radial increments, which turns the clock into the identity. Meant for
    small horizons; batches go through :func:`simulate_observables`.
    """
    if u_cap is None:
        u_cap = default_u_cap(target_log_clock if math.isfinite(target_log_clock) else 1.0)
    _check_step(delta, u_cap)
    if delta > 0.01:
        raise ConfigError(f"delta must not exceed 0.01, got {delta!r}")
    if math.isnan(target_log_clock) or target_log_clock == math.inf:
        raise ConfigError("target_log_clock must be finite or -inf")
    xs, bs, lcs, censored = _clock_path_kernel(
        seed.generator(), float(delta), float(target_log_clock), float(u_cap),
        0.0 if freeze_radial else 1.0,
    )
    return ClockPath(float(delta), xs, bs, lcs, bool(censored))


def observables_at(path: ClockPath, log_t: float) -> WindingObservables:
    """Extract theta, N, log M, log L and H at horizon ``log_t`` from a path."""
    lcs = path.log_clock
    k = int(np.searchsorted(lcs, log_t, side="right")) - 1
    out = np.empty(N_COLUMNS)
    if k >= len(lcs) - 1:
        if not path.censored:
            raise InconsistentPathError(
                f"path ends at log clock {lcs[-1]:.6g} below horizon {log_t:.6g}")
        _censor_rows(out.reshape(1, -1), 0)
        return WindingObservables.from_row(log_t, out)
    if k < 0:
        raise InconsistentPathError("horizon precedes the start of the path")
    _observables_kernel(path.b, lcs, path.step, float(log_t), k, out)
    return WindingObservables.from_row(log_t, out)


def simulate_observables(
    seed: SeedStream,
    delta: float,
    log_horizons,
    u_cap: float,
    *,
    fast_forward: bool = True,
    freeze_radial: bool = False,
) -> np.ndarray:
    """Run one path through all horizons without storing it.

    Returns an array of shape ``(len(log_horizons), 6)`` with columns
    theta, N, log M, log L, H, censored. With ``fast_forward=False`` the rows
    equal ``observables_at(simulate_clock_path(...), log_t)`` bit for bit.
    """
    _check_step(delta, u_cap)
    log_ts = np.asarray(log_horizons, dtype=float)
    if log_ts.ndim != 1 or np.any(np.diff(log_ts) <= 0):
        raise ConfigError("horizons must be a strictly increasing 1-d sequence")
    out = np.empty((len(log_ts), N_COLUMNS))
    _run_path(seed.generator(), float(delta), log_ts, float(u_cap),
              0.0 if freeze_radial else 1.0, bool(fast_forward), out)
    return out


def sample_theta_at_hit(
    seed: SeedStream,
    r: float,
    delta: float,
    u_cap: float,
    *,
    fast_forward: bool = True,
) -> float:
    """Winding angle at the first time ``|W|`` reaches radius ``r > 1``.

    The radial driver is stepped until it first crosses ``log r`` on the
    grid (crossing clock refined linearly). Raises CensoredSampleError if the
    clock cap is reached first.
    """
    if not (r > 1.0):
        raise ConfigError(f"hitting radius must exceed 1, got {r!r}")
    _check_step(delta, u_cap)
    theta, tau, censored = _hit_kernel(seed.generator(), float(delta), math.log(r),
                                       float(u_cap), bool(fast_forward))
    if censored:
        raise CensoredSampleError(
            f"radius {r:g} not reached within internal clock {u_cap:g}")
    return float(theta)


def sample_hits(
    master_seed: int,
    r: float,
    n: int,
    delta: float,
    u_cap: float,
    *,
    first_index: int = 0,
    fast_forward: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """``n`` hitting-angle draws from path indices ``first_index ...``.

    Returns ``(theta, censored)``; censored draws carry NaN.
    """
    if not (r > 1.0):
        raise ConfigError(f"hitting radius must exceed 1, got {r!r}")
    _check_step(delta, u_cap)
    level = math.log(r)
    theta = np.empty(n)
    censored = np.zeros(n, dtype=bool)
    for i in range(n):
        rng = SeedStream(master_seed, first_index + i).generator()
        theta[i], _, censored[i] = _hit_kernel(rng, float(delta), level, float(u_cap),
                                               bool(fast_forward))
    return theta, censored
