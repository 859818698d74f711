"""Convergence-study harness: budget grids, error statistics, slope fits.

A study runs one method over a strictly increasing budget grid, records
per-budget error statistics over K replications, and fits a log-log slope
to the mean absolute errors.  The error metric is mean |estimate - exact|
over replications (not RMSE), matching the expected-absolute-error
criterion the rate claims are stated in.

Budgets are function-value budgets: the lattice methods map a budget n to
a dilation scale a(n) whose node count never exceeds n.  Reports are
bitwise reproducible from (method, integrand, budgets, K, seed) in the
single-threaded reference mode; the parallel path farms replicate ranges
out to worker processes and reassembles them in replicate order, so it
returns the same numbers.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .integrands import Integrand, corpus_by_name
from .matrices import FrolovMatrix, build_chebyshev_matrix, build_general_poly_matrix
from .randomized import DOMAIN_MC, deterministic_draw, draw, keyed_rng, m_estimate
from .transform import choose_a_for_budget, transformed_estimate

__all__ = [
    "METHODS",
    "ConvergenceReport",
    "CSV_COLUMNS",
    "mc_baseline",
    "run_convergence",
    "fit_slope",
    "atomic_write_text",
]

METHODS = ("mc", "frolov_det", "frolov_rand", "frolov_rand_transformed")

CSV_COLUMNS = (
    "method",
    "integrand",
    "d",
    "n_budget",
    "n_nodes_mean",
    "mean_abs_error",
    "stderr",
    "estimate_mean",
    "seed",
)

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Per-budget error statistics plus the fitted log-log slope.

    max_abs_errors is the maximum error among the K sampled realizations,
    reported as a proxy for the worst case over realizations (only a
    sample maximum, and labeled as such in the JSON output).
    """

    method: str
    integrand: str
    d: int
    budgets: list[int]
    node_means: list[float]
    mean_abs_errors: list[float]
    stderrs: list[float]
    estimate_means: list[float]
    max_abs_errors: list[float]
    fitted_slope: float
    fit_r2: float
    seed: int
    K: int
    construction: str
    noise_floor: float

    def csv_text(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for i, n in enumerate(self.budgets):
            lines.append(
                ",".join(
                    [
                        self.method,
                        self.integrand,
                        repr(self.d),
                        repr(n),
                        repr(self.node_means[i]),
                        repr(self.mean_abs_errors[i]),
                        repr(self.stderrs[i]),
                        repr(self.estimate_means[i]),
                        repr(self.seed),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def json_dict(self) -> dict:
        return {
            "method": self.method,
            "integrand": self.integrand,
            "d": self.d,
            "seed": self.seed,
            "K": self.K,
            "construction": self.construction,
            "fitted_slope": self.fitted_slope,
            "fit_r2": self.fit_r2,
            "noise_floor": self.noise_floor,
            "rows": [
                {
                    "n_budget": n,
                    "n_nodes_mean": self.node_means[i],
                    "mean_abs_error": self.mean_abs_errors[i],
                    "stderr": self.stderrs[i],
                    "estimate_mean": self.estimate_means[i],
                    "max_abs_error_sampled": self.max_abs_errors[i],
                }
                for i, n in enumerate(self.budgets)
            ],
        }

    def json_text(self) -> str:
        return json.dumps(self.json_dict(), indent=2, sort_keys=True) + "\n"

    def write_csv(self, path) -> None:
        atomic_write_text(path, self.csv_text())

    def write_json(self, path) -> None:
        atomic_write_text(path, self.json_text())


def atomic_write_text(path, text: str) -> None:
    """Write text through a temp file and rename, so readers never see partials."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def mc_baseline(f: Integrand, n: int, seed: int, replicate_index: int = 0) -> float:
    """Plain Monte Carlo: mean of f over n seeded uniform points."""
    if n < 1:
        raise ValueError("sample count must be at least 1")
    rng = keyed_rng(seed, replicate_index, DOMAIN_MC)
    points = rng.random((n, f.dim))
    return math.fsum(np.asarray(f(points), dtype=float).tolist()) / n


def fit_slope(points) -> tuple[float, float]:
    """Ordinary least squares slope and r^2 on (log n, log err).

    Points with err <= 0 are dropped; fewer than 3 usable points is an
    error.
    """
    usable = [(n, e) for n, e in points if e > 0.0]
    if len(usable) < 3:
        raise ValueError(f"slope fit needs at least 3 points with positive error, got {len(usable)}")
    x = np.log([n for n, _ in usable])
    y = np.log([e for _, e in usable])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)


def _matrix_for(construction: str, d: int) -> FrolovMatrix:
    if construction == "general":
        return build_general_poly_matrix(d)
    if construction == "chebyshev":
        return build_chebyshev_matrix(d)
    raise ValueError(f"unknown construction {construction!r}")


def _one_replicate(
    method: str,
    f: Integrand,
    B: FrolovMatrix | None,
    budget: int,
    a: float,
    seed: int,
    k: int,
) -> tuple[float, float]:
    if method == "mc":
        return mc_baseline(f, budget, seed, k), float(budget)
    rnd = draw(seed, k, f.dim)
    if method == "frolov_rand":
        value, count = m_estimate(a, B, f, rnd)
    elif method == "frolov_rand_transformed":
        value, count = transformed_estimate(a, B, f, rnd)
    else:
        raise ValueError(f"unknown method {method!r}")
    return value, float(count)


def _replicate_chunk(args) -> list[tuple[float, float]]:
    """Worker task: one contiguous replicate range for one budget."""
    method, name, d, construction, budget, a, seed, k0, k1 = args
    f = corpus_by_name(d)[name]
    B = None if method == "mc" else _matrix_for(construction, d)
    return [_one_replicate(method, f, B, budget, a, seed, k) for k in range(k0, k1)]


def run_convergence(
    method: str,
    f: Integrand,
    budgets,
    K: int,
    seed: int,
    construction: str = "general",
    workers: int = 0,
) -> ConvergenceReport:
    """Run one method over the budget grid and fit the error slope.

    K is the replication count for the randomized methods and is ignored
    for frolov_det (a single deterministic run per budget).  workers > 1
    fans replicate ranges out to processes; this is only available for
    corpus integrands (tasks are reconstructed by name in the workers) and
    returns numbers identical to the reference mode.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    budgets = [int(n) for n in budgets]
    if not budgets:
        raise ValueError("budget list must not be empty")
    if any(b <= a for a, b in zip(budgets, budgets[1:])):
        raise ValueError("budgets must be strictly increasing")
    if K < 1:
        raise ValueError("replication count must be at least 1")

    d = f.dim
    B = None if method == "mc" else _matrix_for(construction, d)
    edge = float(np.max(f.support.edge_lengths)) if method != "mc" else 1.0

    pool = None
    pool_size = 0
    if workers and workers > 1 and method != "frolov_det":
        try:
            parallelizable = f.name in corpus_by_name(d)
        except ValueError:
            parallelizable = False
        if parallelizable:
            pool_size = int(workers)
            pool = ProcessPoolExecutor(max_workers=pool_size)

    node_means = []
    mean_abs_errors = []
    stderrs = []
    estimate_means = []
    max_abs_errors = []
    exact = f.exact_integral
    try:
        for n in budgets:
            a = 0.0 if method == "mc" else choose_a_for_budget(n, B, edge)
            if method == "frolov_det":
                value, count = m_estimate(a, B, f, deterministic_draw(d, seed))
                results = [(value, float(count))]
            elif pool is not None:
                chunk = max(1, math.ceil(K / (4 * pool_size)))
                tasks = [
                    (method, f.name, d, construction, n, a, seed, k0, min(k0 + chunk, K))
                    for k0 in range(0, K, chunk)
                ]
                results = [r for part in pool.map(_replicate_chunk, tasks) for r in part]
            else:
                results = [_one_replicate(method, f, B, n, a, seed, k) for k in range(K)]

            ests = [r[0] for r in results]
            counts = [r[1] for r in results]
            errs = [abs(e - exact) for e in ests]
            kk = len(results)
            mae = math.fsum(errs) / kk
            if kk > 1:
                var = math.fsum((e - mae) ** 2 for e in errs) / (kk - 1)
                se = math.sqrt(var / kk)
            else:
                se = 0.0
            node_means.append(math.fsum(counts) / kk)
            mean_abs_errors.append(mae)
            stderrs.append(se)
            estimate_means.append(math.fsum(ests) / kk)
            max_abs_errors.append(max(errs))
    finally:
        if pool is not None:
            pool.shutdown()

    # Mean absolute errors at or below a few ulps of the exact integral are
    # double-precision artifacts, not rate measurements; keep them in the
    # report but out of the slope fit.
    noise_floor = 4.0 * _EPS * abs(exact)
    usable = [
        (n, e)
        for n, e in zip(budgets, mean_abs_errors)
        if e > noise_floor
    ]
    slope, r2 = fit_slope(usable)

    return ConvergenceReport(
        method=method,
        integrand=f.name,
        d=d,
        budgets=budgets,
        node_means=node_means,
        mean_abs_errors=mean_abs_errors,
        stderrs=stderrs,
        estimate_means=estimate_means,
        max_abs_errors=max_abs_errors,
        fitted_slope=slope,
        fit_r2=r2,
        seed=seed,
        K=1 if method == "frolov_det" else K,
        construction="" if method == "mc" else construction,
        noise_floor=noise_floor,
    )
