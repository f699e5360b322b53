"""Direct planar sampler used to cross-check the skew-product engine.

Steps both coordinates with exact Gaussian increments on real time, with
step ``h = min(h0, h0 |W|^2)`` so every step sweeps roughly the same angle,
and unwinds the argument from the rotation between successive positions.
Cost grows with ``t`` and with the time spent near the origin; keep it to
small horizons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import ConfigError, PathAbortError
from .rng import SeedStream
from .simcore import N_COLUMNS, WindingObservables

__all__ = ["PlanarState", "simulate_direct", "direct_observables", "DEFAULT_MAX_STEPS"]

MIN_RADIUS = 1e-6
MAX_HALVINGS = 60
DEFAULT_MAX_STEPS = 20_000_000

_ABORT_NONE, _ABORT_HALVINGS, _ABORT_STEPS = 0, 1, 2


@dataclass(frozen=True)
class PlanarState:
    x: float
    y: float
    theta_unwound: float
    t: float


@nb.njit(cache=True)
def _direct_kernel(rng, t_ends, h0, max_steps, out, state):
    n_h = t_ends.shape[0]
    x = 1.0
    y = 0.0
    th = 0.0
    t = 0.0
    clock = 0.0
    nmax = 0.0
    t_nmax = 0.0
    t_zero = 0.0
    steps = 0
    hi = 0
    r_min2 = MIN_RADIUS * MIN_RADIUS
    while hi < n_h:
        r2 = x * x + y * y
        h = min(h0, h0 * r2)
        target = t_ends[hi]
        last = False
        if t + h >= target:
            h = target - t
            last = True
        halvings = 0
        while True:
            s = math.sqrt(h)
            nx = x + s * rng.standard_normal()
            ny = y + s * rng.standard_normal()
            dth = math.atan2(x * ny - y * nx, x * nx + y * ny)
            if nx * nx + ny * ny >= r_min2 and abs(dth) < 0.5 * math.pi:
                break
            halvings += 1
            if halvings >= MAX_HALVINGS:
                state[0] = x
                state[1] = y
                state[2] = th
                state[3] = t
                return _ABORT_HALVINGS
            h *= 0.5
            last = False
        steps += 1
        if steps > max_steps:
            state[0] = x
            state[1] = y
            state[2] = th
            state[3] = t
            return _ABORT_STEPS
        th1 = th + dth
        t1 = target if last else t + h
        clock += h / r2
        if th1 > nmax:
            nmax = th1
            t_nmax = t1
        if th1 == 0.0:
            t_zero = t1
        elif th * th1 < 0.0:
            t_zero = t + (t1 - t) * th / (th - th1)
        x = nx
        y = ny
        th = th1
        t = t1
        if last:
            row = out[hi]
            row[0] = th
            row[1] = nmax
            row[2] = math.log(t_nmax) if t_nmax > 0.0 else -np.inf
            row[3] = math.log(t_zero) if t_zero > 0.0 else -np.inf
            row[4] = clock
            row[5] = 0.0
            hi += 1
    state[0] = x
    state[1] = y
    state[2] = th
    state[3] = t
    return _ABORT_NONE


def _check(t_ends: np.ndarray, h0: float) -> None:
    if t_ends.ndim != 1 or t_ends.size == 0 or np.any(t_ends <= 0) or np.any(np.diff(t_ends) <= 0):
        raise ConfigError("real-time horizons must be positive and strictly increasing")
    if t_ends[-1] > 1e3:
        raise ConfigError("the direct sampler is limited to t <= 1e3")
    if not (0.0 < h0 <= 1e-3):
        raise ConfigError(f"h0 must lie in (0, 1e-3], got {h0!r}")


def direct_observables(
    seed: SeedStream,
    t_ends,
    h0: float = 1e-3,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> tuple[np.ndarray, PlanarState]:
    """Rows (theta, N, log M, log L, clock, censored) at each real-time horizon.

    Raises PathAbortError after ``MAX_HALVINGS`` consecutive step rejections
    or ``max_steps`` accepted steps.
    """
    t_ends = np.atleast_1d(np.asarray(t_ends, dtype=float))
    _check(t_ends, h0)
    out = np.empty((len(t_ends), N_COLUMNS))
    state = np.empty(4)
    code = _direct_kernel(seed.generator(), t_ends, float(h0), int(max_steps), out, state)
    final = PlanarState(*map(float, state))
    if code == _ABORT_HALVINGS:
        raise PathAbortError(f"path {seed.path_index}: {MAX_HALVINGS} consecutive halvings")
    if code == _ABORT_STEPS:
        raise PathAbortError(f"path {seed.path_index}: exceeded {max_steps} steps")
    return out, final


def simulate_direct(
    seed: SeedStream,
    t_end: float,
    h0: float = 1e-3,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> WindingObservables:
    """Winding observables at real time ``t_end`` from direct planar stepping."""
    out, _ = direct_observables(seed, [t_end], h0, max_steps)
    return WindingObservables.from_row(math.log(t_end), out[0])
