"""Deterministic multi-process batches of winding paths.

Path ``i`` of a batch always uses ``SeedStream(master_seed, first_index + i)``.
Workers receive contiguous index blocks and the blocks are concatenated in
index order, so the output is identical for any worker count.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .errors import CensoringError, PathAbortError
from .euler import direct_observables
from .rng import SeedStream
from .simcore import N_COLUMNS, WindingObservables, default_u_cap, simulate_observables

log = logging.getLogger(__name__)

CENSOR_WARN = 0.01
CENSOR_FAIL = 0.05
# aborted direct paths are redrawn from index + k * RETRY_STRIDE
RETRY_STRIDE = 2**40
MAX_RETRIES = 16


@dataclass
class BatchResult:
    log_horizons: np.ndarray
    path_index: np.ndarray
    # shape (horizons, paths, 6): theta, N, log M, log L, H, censored
    rows: np.ndarray
    retries: int = 0
    warnings: list = field(default_factory=list)

    @property
    def paths(self) -> int:
        return len(self.path_index)

    def censored(self, h: int = -1) -> np.ndarray:
        return self.rows[h, :, 5] != 0.0

    def censored_fraction(self, h: int = -1) -> float:
        if self.paths == 0:
            return 0.0
        return float(np.mean(self.censored(h)))

    def column(self, name: str, h: int = -1) -> np.ndarray:
        """Uncensored values of one observable at horizon index ``h``."""
        j = {"theta": 0, "n": 1, "log_m": 2, "log_l": 3, "h": 4}[name]
        return self.rows[h, ~self.censored(h), j]

    def observables(self, h: int = -1) -> list[WindingObservables]:
        log_t = float(self.log_horizons[h])
        return [WindingObservables.from_row(log_t, r) for r in self.rows[h]]


def _skew_block(args):
    seed, start, stop, delta, log_ts, u_cap, fast_forward = args
    out = np.empty((len(log_ts), stop - start, N_COLUMNS))
    for k, idx in enumerate(range(start, stop)):
        out[:, k, :] = simulate_observables(SeedStream(seed, idx), delta, log_ts, u_cap,
                                            fast_forward=fast_forward)
    return out, 0


def _direct_block(args):
    seed, start, stop, t_ends, h0, max_steps = args
    out = np.empty((len(t_ends), stop - start, N_COLUMNS))
    retries = 0
    for k, idx in enumerate(range(start, stop)):
        for attempt in range(MAX_RETRIES):
            try:
                rows, _ = direct_observables(SeedStream(seed, idx + attempt * RETRY_STRIDE),
                                             t_ends, h0, max_steps)
                break
            except PathAbortError:
                retries += 1
        else:
            raise PathAbortError(f"path {idx}: {MAX_RETRIES} consecutive aborted attempts")
        out[:, k, :] = rows
    return out, retries


def _blocks(first: int, n: int, workers: int) -> list[tuple[int, int]]:
    if n == 0:
        return []
    k = min(workers, n)
    edges = [first + (n * i) // k for i in range(k + 1)]
    return list(zip(edges[:-1], edges[1:]))


def batch_run(config: ExperimentConfig, *, check_censoring: bool = True) -> BatchResult:
    """Simulate ``config.paths`` paths starting at ``config.first_index``.

    Censored fractions above 1% are logged and recorded in ``warnings``;
    above 5% a CensoringError is raised unless ``check_censoring`` is off.
    """
    config.validate(allow_empty=True)
    log_ts = np.asarray(config.log_horizons, dtype=float)
    n = config.paths
    blocks = _blocks(config.first_index, n, config.resolved_workers())

    if config.sampler == "SkewProduct":
        u_cap = default_u_cap(log_ts[-1], config.u_cap_factor)
        fn = _skew_block
        jobs = [(config.master_seed, a, b, config.delta, log_ts, u_cap, config.fast_forward)
                for a, b in blocks]
    else:
        fn = _direct_block
        jobs = [(config.master_seed, a, b, np.exp(log_ts), config.h0, config.max_steps)
                for a, b in blocks]

    if len(jobs) <= 1:
        parts = [fn(j) for j in jobs]
    else:
        with ProcessPoolExecutor(len(jobs), mp_context=mp.get_context("fork")) as pool:
            parts = list(pool.map(fn, jobs))

    if parts:
        rows = np.concatenate([p[0] for p in parts], axis=1)
    else:
        rows = np.empty((len(log_ts), 0, N_COLUMNS))
    result = BatchResult(
        log_ts,
        np.arange(config.first_index, config.first_index + n, dtype=np.int64),
        rows,
        retries=sum(p[1] for p in parts),
    )

    for h, log_t in enumerate(log_ts):
        frac = result.censored_fraction(h)
        if frac > CENSOR_FAIL and check_censoring:
            raise CensoringError(
                f"{frac:.1%} of paths censored at log t = {log_t:g}; raise u_cap_factor")
        if frac > CENSOR_WARN:
            msg = f"{frac:.2%} of paths censored at log t = {log_t:g}"
            log.warning(msg)
            result.warnings.append(msg)
    return result


def u_values(log_x: np.ndarray, log_t: float) -> np.ndarray:
    """``log X / log t`` clipped to [0, 1]; ``X < 1`` (including X = 0) maps to 0."""
    with np.errstate(invalid="ignore"):
        return np.clip(log_x / log_t, 0.0, 1.0)


def scaled_times(log_x: np.ndarray, log_t: float) -> np.ndarray:
    """``X / t`` in [0, 1]: strictly monotone in ``log X``, finite at ``X = 0``."""
    return np.exp(np.asarray(log_x) - log_t)
