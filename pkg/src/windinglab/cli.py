"""``windinglab`` command-line entry point.

    windinglab claim law-maxtime --paths 10000 --log-t 50
    windinglab samples --paths 3 --out out/
    windinglab analytic v_of 2
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analytic
from .config import ExperimentConfig
from .errors import (
    CensoredSampleError,
    CensoringError,
    ConfigError,
    DomainError,
    InconsistentPathError,
    PathAbortError,
)
from .runner import (
    EXIT_FAIL,
    EXIT_INTEGRITY,
    EXIT_PASS,
    EXIT_USAGE,
    ClaimId,
    emit_samples,
    file_checksums,
    run_claim,
)

INTEGRITY_ERRORS = (CensoringError, CensoredSampleError, InconsistentPathError, PathAbortError)

ANALYTIC_FUNCTIONS = {
    "v_of": (analytic.v_of, 1),
    "maxtime_cdf": (analytic.maxtime_cdf, 1),
    "density": (analytic.maxtime_density, 1),
    "v_prime": (analytic.v_prime, 1),
    "q_prob": (analytic.q_prob, 2),
    "cauchy_cdf": (analytic.cauchy_cdf, 2),
    "spitzer_cdf": (analytic.spitzer_cdf, 1),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags below override its fields")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--paths", type=int, help="paths per sample")
    p.add_argument("--log-t", type=float, action="append", dest="log_t",
                   help="log horizon (repeat for several)")
    p.add_argument("--delta", type=float, help="internal-clock step")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", help="worker processes or 'auto'")
    p.add_argument("--sampler", choices=["SkewProduct", "DirectEuler"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="windinglab", description="Winding of planar Brownian motion.")
    sub = parser.add_subparsers(dest="command")

    claim = sub.add_parser("claim", help="run one claim experiment and print a JSON report")
    claim.add_argument("claim_id", nargs="?", help=", ".join(
        ["law-maxtime", "law-lastzero", "spitzer", "cauchy-hit", "lemma-reflection",
         "lemma-levy", "sampler-cross", "integral-test"]))
    claim.add_argument("--claim", dest="claim_flag", help="same as the positional id")
    _config_flags(claim)

    samples = sub.add_parser("samples", help="write per-path observables as CSV")
    _config_flags(samples)

    an = sub.add_parser("analytic", help="evaluate a closed-form function")
    an.add_argument("fn", choices=sorted(ANALYTIC_FUNCTIONS))
    an.add_argument("args", nargs="+", type=float)
    return parser


def _load_config(ns) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(ns.config) if ns.config else ExperimentConfig()
    changes = {}
    if ns.seed is not None:
        changes["master_seed"] = ns.seed
    if ns.paths is not None:
        changes["paths"] = ns.paths
    if ns.log_t:
        changes["log_horizons"] = tuple(ns.log_t)
    if ns.delta is not None:
        changes["delta"] = ns.delta
    if ns.out is not None:
        changes["output_dir"] = ns.out
    if ns.sampler is not None:
        changes["sampler"] = ns.sampler
    if ns.workers is not None:
        changes["workers"] = ns.workers if ns.workers == "auto" else _int(ns.workers, "--workers")
    return cfg.with_(**changes).validate()


def _int(text: str, flag: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{flag} expects an integer or 'auto', got {text!r}") from None


def _cmd_claim(ns) -> int:
    name = ns.claim_flag or ns.claim_id
    if not name:
        raise _UsageError("claim needs an id")
    claim = ClaimId.parse(name)
    config = _load_config(ns)
    report = run_claim(claim, config)
    text = report.to_json()
    print(text)
    os.makedirs(config.output_dir, exist_ok=True)
    with open(os.path.join(config.output_dir, f"report_{claim.value}.json"), "w") as fh:
        fh.write(text + "\n")
    return report.exit_code


def _cmd_samples(ns) -> int:
    config = _load_config(ns)
    files = emit_samples(config)
    print(json.dumps({"files": files, "sha256": file_checksums(files)}, indent=2))
    return EXIT_PASS


def _cmd_analytic(ns) -> int:
    fn, arity = ANALYTIC_FUNCTIONS[ns.fn]
    if len(ns.args) != arity:
        raise _UsageError(f"{ns.fn} takes {arity} argument(s), got {len(ns.args)}")
    print(repr(float(fn(*ns.args))))
    return EXIT_PASS


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        if ns.command is None:
            raise _UsageError("choose a subcommand: claim, samples, analytic")
        handler = {"claim": _cmd_claim, "samples": _cmd_samples, "analytic": _cmd_analytic}
        return handler[ns.command](ns)
    except (_UsageError, ConfigError, DomainError) as exc:
        print(f"windinglab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INTEGRITY_ERRORS as exc:
        print(f"windinglab: simulation integrity: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except OSError as exc:
        print(f"windinglab: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY


if __name__ == "__main__":
    sys.exit(main())
