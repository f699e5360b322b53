"""Claim experiments, sample files and machine-readable reports.

Each claim draws the batches it needs, compares them with the analytic law
and returns a :class:`ClaimReport`. Two samples that must be independent
come from disjoint path-index ranges: ``[first, first + paths)`` and
``[first + paths, first + 2 paths)``.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analytic
from .batch import BatchResult, batch_run, scaled_times, u_values
from .config import ExperimentConfig
from .errors import ConfigError
from .simcore import default_u_cap, sample_hits
from .stats import ecdf, ks_one_sample, ks_two_sample, proportion_check

__all__ = [
    "ClaimId",
    "ClaimReport",
    "BatchCache",
    "run_claim",
    "emit_samples",
    "file_checksums",
    "CSV_HEADER",
    "EXIT_PASS",
    "EXIT_FAIL",
    "EXIT_USAGE",
    "EXIT_INTEGRITY",
]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTEGRITY = 0, 1, 2, 3

CSV_HEADER = "path_index,log_t,theta_t,n_t,log_m_t,log_l_t,censored"


class ClaimId(str, enum.Enum):
    MaxtimeLaw = "MaxtimeLaw"
    LastzeroEqualsMaxtime = "LastzeroEqualsMaxtime"
    SpitzerLaw = "SpitzerLaw"
    CauchyHit = "CauchyHit"
    LemmaReflection = "LemmaReflection"
    LemmaLevy = "LemmaLevy"
    SamplerCross = "SamplerCross"
    IntegralTest = "IntegralTest"

    @classmethod
    def parse(cls, name: str) -> "ClaimId":
        key = name.strip().lower().replace("_", "-")
        for alias, claim in _ALIASES.items():
            if key == alias:
                return claim
        for claim in cls:
            if key == claim.value.lower():
                return claim
        raise ConfigError(f"unknown claim {name!r}; choose from {sorted(_ALIASES)}")


_ALIASES = {
    "law-maxtime": ClaimId.MaxtimeLaw,
    "law-lastzero": ClaimId.LastzeroEqualsMaxtime,
    "spitzer": ClaimId.SpitzerLaw,
    "cauchy-hit": ClaimId.CauchyHit,
    "lemma-reflection": ClaimId.LemmaReflection,
    "lemma-levy": ClaimId.LemmaLevy,
    "sampler-cross": ClaimId.SamplerCross,
    "integral-test": ClaimId.IntegralTest,
}


@dataclass
class ClaimReport:
    claim_id: ClaimId
    inputs: dict
    result: dict
    passed: bool
    censored_fraction: float
    wall_time_s: float
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id.value,
            "inputs": self.inputs,
            "result": self.result,
            "passed": self.passed,
            "censored_fraction": self.censored_fraction,
            "wall_time_s": self.wall_time_s,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    raise TypeError(f"not JSON serialisable: {type(obj)}")


class BatchCache:
    """Memoises batches within one process so claims can share simulations."""

    def __init__(self):
        self._store: dict = {}

    def get(self, config: ExperimentConfig) -> BatchResult:
        key = (config.master_seed, config.paths, config.log_horizons, config.delta,
               config.u_cap_factor, config.sampler, config.first_index, config.fast_forward,
               config.h0, config.max_steps)
        if key not in self._store:
            self._store[key] = batch_run(config)
        return self._store[key]


def _pair(config: ExperimentConfig, cache: BatchCache, **changes):
    base = config.with_(**changes)
    first = cache.get(base)
    second = cache.get(base.with_(first_index=base.first_index + base.paths))
    return first, second


def _maxtime_reference(u):
    return np.array([analytic.maxtime_cdf(float(v)) for v in np.atleast_1d(u)])


def _horizon_rows(batches: tuple, fn) -> list[dict]:
    rows = []
    for h, log_t in enumerate(batches[0].log_horizons):
        entry = {"log_t": float(log_t)}
        entry.update(fn(h, float(log_t)))
        rows.append(entry)
    return rows


def _claim_maxtime(config, cache):
    batch = cache.get(config)

    def at(h, log_t):
        report = ks_one_sample(ecdf(u_values(batch.column("log_m", h), log_t)),
                               _maxtime_reference, config.ks_level)
        return {"ks": report.to_dict(), "sup_distance": report.statistic}

    rows = _horizon_rows((batch,), at)
    passed = rows[-1]["sup_distance"] <= config.maxtime_tolerance
    gate = {"kind": "sup_distance", "threshold": config.maxtime_tolerance}
    return {"horizons": rows, "gate": gate}, passed, [batch]


def _claim_lastzero(config, cache):
    bm, bl = _pair(config, cache)

    def at(h, log_t):
        report = ks_two_sample(ecdf(scaled_times(bm.column("log_m", h), log_t)),
                               ecdf(scaled_times(bl.column("log_l", h), log_t)),
                               config.ks_level)
        return {"ks": report.to_dict()}

    rows = _horizon_rows((bm, bl), at)
    gate = {"kind": "p_value", "level": config.ks_level}
    return {"horizons": rows, "gate": gate}, rows[-1]["ks"]["passed"], [bm, bl]


def _claim_spitzer(config, cache):
    batch = cache.get(config)

    def at(h, log_t):
        report = ks_one_sample(ecdf(2.0 * batch.column("theta", h) / log_t),
                               analytic.spitzer_cdf, config.ks_level)
        return {"ks": report.to_dict(), "sup_distance": report.statistic}

    rows = _horizon_rows((batch,), at)
    passed = rows[-1]["sup_distance"] <= config.spitzer_tolerance
    gate = {"kind": "sup_distance", "threshold": config.spitzer_tolerance}
    return {"horizons": rows, "gate": gate}, passed, [batch]


def _claim_reflection(config, cache):
    bn, bt = _pair(config, cache)

    def at(h, log_t):
        n_t = bn.column("n", h)
        theta = bt.column("theta", h)
        checks = []
        for a in (log_t / 4.0, log_t / 2.0, log_t):
            rep = proportion_check(int(np.sum(n_t > a)), len(n_t),
                                   int(np.sum(theta > a)), len(theta),
                                   int(np.sum(np.abs(theta) > a)), len(theta))
            checks.append({"a": a, **rep.to_dict()})
        return {"thresholds": checks, "passed": all(c["passed"] for c in checks)}

    rows = _horizon_rows((bn, bt), at)
    gate = {"kind": "proportion", "sigmas": 3.0}
    return {"horizons": rows, "gate": gate}, rows[-1]["passed"], [bn, bt]


def _claim_levy(config, cache):
    bd, ba = _pair(config, cache)

    def at(h, log_t):
        report = ks_two_sample(ecdf(bd.column("n", h) - bd.column("theta", h)),
                               ecdf(np.abs(ba.column("theta", h))), config.ks_level)
        return {"ks": report.to_dict()}

    rows = _horizon_rows((bd, ba), at)
    gate = {"kind": "p_value", "level": config.ks_level}
    return {"horizons": rows, "gate": gate}, rows[-1]["ks"]["passed"], [bd, ba]


def _claim_cross(config, cache):
    horizons = (config.cross_log_t,)
    skew = cache.get(config.with_(log_horizons=horizons, sampler="SkewProduct"))
    direct = cache.get(config.with_(log_horizons=horizons, sampler="DirectEuler",
                                    first_index=config.first_index + config.paths))
    report = ks_two_sample(ecdf(skew.column("theta")), ecdf(direct.column("theta")),
                           config.ks_level)
    result = {
        "log_t": config.cross_log_t,
        "ks": report.to_dict(),
        "direct_retries": direct.retries,
        "gate": {"kind": "p_value", "level": config.ks_level},
    }
    return result, report.passed, [skew, direct]


def _claim_hit(config, cache):
    level = config.hit_log_radius
    u_cap = default_u_cap(2.0 * level, config.u_cap_factor)
    theta, censored = sample_hits(config.master_seed, math.exp(level), config.paths,
                                  config.delta, u_cap, first_index=config.first_index,
                                  fast_forward=config.fast_forward)
    frac = float(np.mean(censored)) if len(censored) else 0.0
    report = ks_one_sample(ecdf(theta[~censored]),
                           lambda x: analytic.cauchy_cdf(x, level), config.ks_level)
    result = {
        "radius_log": level,
        "u_cap": u_cap,
        "ks": report.to_dict(),
        "gate": {"kind": "p_value", "level": config.ks_level, "max_censored": 0.01},
    }
    return result, report.passed and frac < 0.01, frac


BUILTIN_FAMILIES = (
    (analytic.AlphaFamily.inv_loglog_pow(1.0, 2.0), analytic.Verdict.CONVERGES),
    (analytic.AlphaFamily.inv_loglog_pow(1.0, 1.0), analytic.Verdict.DIVERGES),
    (analytic.AlphaFamily.inv_log_pow(1.0, 1.0), analytic.Verdict.CONVERGES),
)


def _claim_integral(config, cache):
    entries = []
    for family, expected in BUILTIN_FAMILIES:
        verdict = analytic.integral_test(family)
        entries.append({
            "family": family.label,
            "expected": expected.value,
            **verdict.to_dict(),
            "matches": verdict.classification is expected,
        })
    result = {"families": entries,
              "gate": {"kind": "verdicts"},
              "assumption_holds_all": all(e["assumption_holds"] for e in entries)}
    return result, all(e["matches"] for e in entries), []


_HANDLERS = {
    ClaimId.MaxtimeLaw: _claim_maxtime,
    ClaimId.LastzeroEqualsMaxtime: _claim_lastzero,
    ClaimId.SpitzerLaw: _claim_spitzer,
    ClaimId.LemmaReflection: _claim_reflection,
    ClaimId.LemmaLevy: _claim_levy,
    ClaimId.SamplerCross: _claim_cross,
    ClaimId.CauchyHit: _claim_hit,
    ClaimId.IntegralTest: _claim_integral,
}


def run_claim(claim_id, config: ExperimentConfig,
              cache: Optional[BatchCache] = None) -> ClaimReport:
    """Run one claim experiment and return its report."""
    claim = claim_id if isinstance(claim_id, ClaimId) else ClaimId.parse(str(claim_id))
    config.validate()
    cache = cache or BatchCache()
    start = time.perf_counter()
    result, passed, used = _HANDLERS[claim](config, cache)
    if isinstance(used, float):
        censored, warnings = used, []
    else:
        censored = max((b.censored_fraction(h) for b in used
                        for h in range(len(b.log_horizons))), default=0.0)
        warnings = [w for b in used for w in b.warnings]
    return ClaimReport(claim, config.to_dict(), result, bool(passed), censored,
                       time.perf_counter() - start, warnings)


def _fmt(v: float) -> str:
    return repr(float(v))


def emit_samples(config: ExperimentConfig, batch: Optional[BatchResult] = None) -> list[str]:
    """Write one CSV of per-path observables per horizon; returns the file paths."""
    config.validate()
    if batch is None:
        batch = batch_run(config)
    try:
        os.makedirs(config.output_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {config.output_dir}: {exc}") from exc
    files = []
    for h, log_t in enumerate(batch.log_horizons):
        path = os.path.join(config.output_dir, f"samples_h{h}_logt_{float(log_t):g}.csv")
        lines = [CSV_HEADER]
        for idx, row in zip(batch.path_index, batch.rows[h]):
            lines.append(",".join([str(int(idx)), _fmt(log_t), _fmt(row[0]), _fmt(row[1]),
                                   _fmt(row[2]), _fmt(row[3]), str(int(row[5]))]))
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        files.append(path)
    return files


def file_checksums(paths) -> dict:
    out = {}
    for p in paths:
        with open(p, "rb") as fh:
            out[os.path.basename(p)] = hashlib.sha256(fh.read()).hexdigest()
    return out
