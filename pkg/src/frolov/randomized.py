"""Randomized dilated-shifted lattice estimates and replication machinery.

One estimate draws a dilation vector u (uniform on [1, 2^(1/d)] per
coordinate) and a shift v (uniform on [0, 1) per coordinate), builds the
generator S = a diag(u) B from a Frolov matrix B, and evaluates the
equal-weight rule over the integrand's support box.  The random shift
makes the estimate unbiased for any integrable f; the random dilation is
what buys the improved convergence rate, and neither effect needs the
other.

Draws come from a counter-based generator (Philox) keyed on
(seed, replicate_index), so replicate k is reproducible bit for bit
without generating replicates 0..k-1 first and replications can be run
in any order or in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lattice import apply_rule, enumerate_nodes
from .matrices import FrolovMatrix

__all__ = [
    "RandomDraw",
    "EstimateBatch",
    "draw",
    "deterministic_draw",
    "keyed_rng",
    "m_estimate",
    "replicate",
]

_MASK64 = (1 << 64) - 1

# Domain tags keep independent consumers of the same (seed, replicate)
# pair on disjoint Philox keys.
DOMAIN_DILATION_SHIFT = 0
DOMAIN_MC = 0x9E3779B97F4A7C15


def keyed_rng(seed: int, replicate_index: int, domain: int = 0) -> np.random.Generator:
    """Counter-based generator for one (seed, replicate, domain) triple."""
    hi = ((seed & _MASK64) ^ (domain & _MASK64)) & _MASK64
    lo = replicate_index & _MASK64
    return np.random.Generator(np.random.Philox(key=(hi << 64) | lo))


@dataclass(frozen=True, eq=False)
class RandomDraw:
    """One realization (u, v) of the dilation and shift vectors."""

    u: np.ndarray
    v: np.ndarray
    seed: int
    replicate_index: int

    @property
    def dim(self) -> int:
        return self.u.size


def draw(seed: int, replicate_index: int, d: int) -> RandomDraw:
    """Independent u in [1, 2^(1/d)]^d and v in [0, 1)^d for replicate k.

    Identical (seed, replicate_index, d) always reproduces identical
    vectors bit for bit.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = keyed_rng(seed, replicate_index, DOMAIN_DILATION_SHIFT)
    u = rng.uniform(1.0, 2.0 ** (1.0 / d), size=d)
    v = rng.random(d)
    return RandomDraw(u=u, v=v, seed=seed, replicate_index=replicate_index)


def deterministic_draw(d: int, seed: int = 0) -> RandomDraw:
    """The pinned draw u = (1,..,1), v = 0 that recovers the plain rule."""
    return RandomDraw(u=np.ones(d), v=np.zeros(d), seed=seed, replicate_index=0)


def m_estimate(a: float, B: FrolovMatrix, f, rnd: RandomDraw) -> tuple[float, int]:
    """One randomized estimate of the integral of f and its node count.

    Builds S = a diag(u) B, enumerates the nodes S^-T(m + v) inside f's
    declared support box, and returns the equal-weight rule value together
    with the number of nodes used.  With the pinned draw (u = 1, v = 0)
    this is exactly the deterministic rule generated by aB.
    """
    if a <= 0.0:
        raise ValueError("dilation scale a must be positive")
    if rnd.dim != B.dim:
        raise ValueError("draw dimension does not match the matrix")
    S = a * rnd.u[:, None] * B.entries  # a * diag(u) @ B
    nodes = enumerate_nodes(S, rnd.v, f.support)
    return apply_rule(nodes, f), len(nodes)


@dataclass(frozen=True, eq=False)
class EstimateBatch:
    """K independent replications of one estimator, with summary stats."""

    method: str
    estimates: list[float]
    mean: float
    stderr: float
    node_counts: list[int]
    seed: int

    @property
    def k(self) -> int:
        return len(self.estimates)

    def to_json_dict(self, a: float | None = None, d: int | None = None) -> dict:
        out = {
            "method": self.method,
            "K": self.k,
            "seed": self.seed,
            "mean": self.mean,
            "stderr": self.stderr,
            "node_counts": self.node_counts,
        }
        if a is not None:
            out["a"] = a
        if d is not None:
            out["d"] = d
        return out


class ReplicationError(RuntimeError):
    def __init__(self, replicate_index: int, cause: BaseException):
        super().__init__(f"estimator failed at replicate {replicate_index}: {cause!r}")
        self.replicate_index = replicate_index


def replicate(
    estimator: Callable[[int, int], tuple[float, int]],
    K: int,
    seed: int,
    method: str = "estimator",
) -> EstimateBatch:
    """Run estimator(seed, k) for k = 0..K-1 and summarize.

    The estimator must be a pure function of (seed, replicate_index), so
    the resulting multiset of estimates does not depend on execution
    order; estimates are stored in replicate order and the mean uses exact
    summation.  stderr is the sample standard deviation over sqrt(K).
    """
    if K < 2:
        raise ValueError("replication needs K >= 2")
    estimates: list[float] = []
    counts: list[int] = []
    for k in range(K):
        try:
            value, count = estimator(seed, k)
        except Exception as exc:  # noqa: BLE001 - annotate the failing replicate
            raise ReplicationError(k, exc) from exc
        estimates.append(float(value))
        counts.append(int(count))
    mean = math.fsum(estimates) / K
    var = math.fsum((e - mean) ** 2 for e in estimates) / (K - 1)
    stderr = math.sqrt(var / K)
    return EstimateBatch(
        method=method,
        estimates=estimates,
        mean=mean,
        stderr=stderr,
        node_counts=counts,
        seed=seed,
    )
