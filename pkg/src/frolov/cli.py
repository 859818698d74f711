"""Command-line front end: matrix building, verification, estimates, studies.

Commands
--------
matrix    build a generator matrix and print/serialize it
verify    run the empirical lattice-property checks
estimate  replicate one randomized estimator at a fixed scale or budget
study     run a convergence study; writes CSV + JSON and a log-log figure

Every run prints a one-line summary including the seed actually used, so
any result can be reproduced by passing that seed explicitly.  Output
files are written atomically (temp file + rename).  Exit status: 0 on
success, 2 for configuration errors, 1 for numerical failures; failures
also emit a machine-readable JSON error record on stderr.

The default output directory is the FROLOV_OUT_DIR environment variable,
falling back to the current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from dataclasses import dataclass, field

import numpy as np

from . import integrands, plotting, study
from .matrices import (
    build_chebyshev_matrix,
    build_general_poly_matrix,
    verify_property_b,
    verify_property_c,
)
from .randomized import deterministic_draw, draw, m_estimate, replicate
from .study import atomic_write_text, run_convergence
from .transform import choose_a_for_budget, transformed_estimate

__all__ = ["RunConfig", "run", "main"]

OUT_DIR_ENV = "FROLOV_OUT_DIR"

_CONSTRUCTIONS = ("general", "chebyshev")
_ESTIMATE_METHODS = ("frolov_rand", "frolov_rand_transformed")


class UsageError(ValueError):
    """Invalid configuration; maps to exit status 2."""


@dataclass
class RunConfig:
    """Parsed command configuration."""

    command: str
    d: int = 2
    construction: str = "general"
    method: str = "frolov_rand_transformed"
    integrand: str = "product_sine"
    a: float | None = None
    budgets: list[int] = field(default_factory=list)
    K: int = 100
    seed: int = 0
    output: str | None = None
    out_format: str = "json"
    deterministic: bool = False
    workers: int = 0
    radius: int = 30
    trials: int = 200
    no_figure: bool = False

    def validate(self) -> None:
        if self.command not in ("matrix", "verify", "estimate", "study"):
            raise UsageError(f"unknown command {self.command!r}")
        if self.construction not in _CONSTRUCTIONS:
            raise UsageError(f"construction must be one of {_CONSTRUCTIONS}")
        if self.construction == "chebyshev" and (self.d < 1 or self.d & (self.d - 1)):
            raise UsageError("chebyshev construction requires d to be a power of two")
        if self.out_format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.command == "estimate":
            if self.method not in _ESTIMATE_METHODS:
                raise UsageError(f"estimate method must be one of {_ESTIMATE_METHODS}")
            if self.a is None and not self.budgets:
                raise UsageError("estimate needs --a or --budget")
            if self.K < 2:
                raise UsageError("estimate needs K >= 2")
        if self.command == "study":
            if self.method not in study.METHODS:
                raise UsageError(f"study method must be one of {study.METHODS}")
            if not self.budgets:
                raise UsageError("study needs a nonempty budget list")


def _default_output(config: RunConfig, ext: str) -> str:
    out_dir = os.environ.get(OUT_DIR_ENV, ".")
    name = f"frolov_{config.command}_{config.method}_d{config.d}_seed{config.seed}.{ext}"
    return os.path.join(out_dir, name)


def _build_matrix(config: RunConfig):
    if config.construction == "general":
        return build_general_poly_matrix(config.d)
    return build_chebyshev_matrix(config.d)


def _cmd_matrix(config: RunConfig) -> int:
    B = _build_matrix(config)
    for row in B.entries:
        print("  ".join(f"{c:.12f}" for c in row))
    payload = json.dumps(B.to_json_dict(), indent=2, sort_keys=True) + "\n"
    target = config.output or _default_output(config, "json")
    atomic_write_text(target, payload)
    print(
        f"matrix construction={B.construction} d={B.dim} |det|={B.abs_det:.12g} "
        f"one_norm={B.one_norm:.12g} -> {target}"
    )
    return 0


def _cmd_verify(config: RunConfig) -> int:
    B = _build_matrix(config)
    rb = verify_property_b(B, radius=config.radius)
    rc = verify_property_c(B, trials=config.trials, rng_seed=config.seed)
    record = {
        "construction": B.construction,
        "d": B.dim,
        "seed": config.seed,
        "lattice_product": {
            "radius": rb.radius,
            "min_abs_product": rb.min_abs_product,
            "passed": rb.passed,
        },
        "box_counts": {
            "trials": rc.box_trials,
            "max_count_excess": rc.max_count_excess,
            "passed": rc.passed,
        },
    }
    target = config.output or _default_output(config, "json")
    atomic_write_text(target, json.dumps(record, indent=2, sort_keys=True) + "\n")
    ok = rb.passed and rc.passed
    print(
        f"verify d={config.d} construction={config.construction} seed={config.seed} "
        f"min_product={rb.min_abs_product:.9f} max_excess={rc.max_count_excess:.3e} "
        f"{'PASS' if ok else 'FAIL'} -> {target}"
    )
    return 0 if ok else 1


def _cmd_estimate(config: RunConfig) -> int:
    f = integrands.corpus_by_name(config.d).get(config.integrand)
    if f is None:
        raise UsageError(f"unknown integrand {config.integrand!r} for d={config.d}")
    B = _build_matrix(config)
    if config.a is not None:
        a = config.a
    else:
        a = choose_a_for_budget(config.budgets[0], B, float(np.max(f.support.edge_lengths)))

    single = transformed_estimate if config.method == "frolov_rand_transformed" else m_estimate

    def estimator(seed: int, k: int):
        rnd = deterministic_draw(config.d, seed) if config.deterministic else draw(seed, k, config.d)
        return single(a, B, f, rnd)

    batch = replicate(estimator, config.K, config.seed, method=config.method)
    payload = batch.to_json_dict(a=a, d=config.d)
    payload["integrand"] = config.integrand
    payload["deterministic"] = config.deterministic
    target = config.output or _default_output(config, "json")
    atomic_write_text(target, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(
        f"estimate method={config.method} integrand={config.integrand} d={config.d} "
        f"a={a:.6g} K={config.K} seed={config.seed} mean={batch.mean:.12g} "
        f"stderr={batch.stderr:.3e} nodes~{int(np.mean(batch.node_counts))} -> {target}"
    )
    return 0


def _cmd_study(config: RunConfig) -> int:
    f = integrands.corpus_by_name(config.d).get(config.integrand)
    if f is None:
        raise UsageError(f"unknown integrand {config.integrand!r} for d={config.d}")
    report = run_convergence(
        config.method,
        f,
        config.budgets,
        config.K,
        config.seed,
        construction=config.construction,
        workers=config.workers,
    )
    base = config.output or _default_output(config, config.out_format)
    root, ext = os.path.splitext(base)
    csv_path = root + ".csv"
    json_path = root + ".json"
    report.write_csv(csv_path)
    report.write_json(json_path)
    written = [csv_path, json_path]
    if not config.no_figure:
        fig_path = plotting.render_figure(
            csv_path,
            root + ".png",
            title=f"{config.integrand} d={config.d} seed={config.seed}",
        )
        written.append(fig_path)
    print(
        f"study method={config.method} integrand={config.integrand} d={config.d} "
        f"K={report.K} seed={config.seed} slope={report.fitted_slope:.3f} "
        f"r2={report.fit_r2:.3f} nodes~{[round(c) for c in report.node_means]} "
        f"-> {', '.join(written)}"
    )
    return 0


def run(config: RunConfig) -> int:
    """Execute one validated command; returns the process exit status."""
    config.validate()
    handler = {
        "matrix": _cmd_matrix,
        "verify": _cmd_verify,
        "estimate": _cmd_estimate,
        "study": _cmd_study,
    }[config.command]
    return handler(config)


def _parse_budgets(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise UsageError(f"budgets must be comma-separated integers, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frolov",
        description="Randomized Frolov lattice cubature toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_seed=True):
        p.add_argument("--d", type=int, default=2, help="dimension")
        p.add_argument(
            "--construction", choices=_CONSTRUCTIONS, default="general",
            help="matrix root system",
        )
        if with_seed:
            p.add_argument("--seed", type=int, default=None, help="explicit RNG seed")
        p.add_argument("--output", default=None, help="output file path")

    p_matrix = sub.add_parser("matrix", help="build and print a generator matrix")
    common(p_matrix, with_seed=False)

    p_verify = sub.add_parser("verify", help="empirical lattice-property checks")
    common(p_verify)
    p_verify.add_argument("--radius", type=int, default=30, help="scan radius")
    p_verify.add_argument("--trials", type=int, default=200, help="random boxes")

    p_est = sub.add_parser("estimate", help="replicate a randomized estimate")
    common(p_est)
    p_est.add_argument("--method", choices=_ESTIMATE_METHODS, default="frolov_rand_transformed")
    p_est.add_argument("--integrand", default="product_sine")
    p_est.add_argument("--a", type=float, default=None, help="dilation scale")
    p_est.add_argument("--budget", default="", help="function-value budget (maps to a)")
    p_est.add_argument("--K", type=int, default=100, help="replications")
    p_est.add_argument("--deterministic", action="store_true", help="pin u=1, v=0")

    p_study = sub.add_parser("study", help="convergence study over a budget grid")
    common(p_study)
    p_study.add_argument("--method", choices=study.METHODS, default="frolov_rand_transformed")
    p_study.add_argument("--integrand", default="product_sine")
    p_study.add_argument("--budgets", default="", help="comma-separated budget list")
    p_study.add_argument("--K", type=int, default=50, help="replications per budget")
    p_study.add_argument("--format", choices=("csv", "json"), default="csv")
    p_study.add_argument("--workers", type=int, default=0, help="0/1 = reference mode")
    p_study.add_argument("--no-figure", action="store_true", help="skip the PNG figure")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if hasattr(args, "seed"):
        seed = args.seed
        if seed is None:
            seed = secrets.randbits(32)
            print(f"seed not given; using seed={seed}")
    else:
        seed = 0  # seedless command (matrix construction is deterministic)
    config = RunConfig(command=args.command, seed=int(seed))
    config.d = args.d
    config.construction = args.construction
    config.output = args.output
    if args.command == "verify":
        config.radius = args.radius
        config.trials = args.trials
    if args.command == "estimate":
        config.method = args.method
        config.integrand = args.integrand
        config.a = args.a
        config.budgets = _parse_budgets(args.budget)
        config.K = args.K
        config.deterministic = args.deterministic
    if args.command == "study":
        config.method = args.method
        config.integrand = args.integrand
        config.budgets = _parse_budgets(args.budgets)
        config.K = args.K
        config.out_format = args.format
        config.workers = args.workers
        config.no_figure = args.no_figure
    return config


def _error_record(status: int, kind: str, message: str) -> None:
    print(
        json.dumps({"error": kind, "message": message, "status": status}, sort_keys=True),
        file=sys.stderr,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return run(config)
    except UsageError as exc:
        _error_record(2, "usage", str(exc))
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _error_record(1, type(exc).__name__, str(exc))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
