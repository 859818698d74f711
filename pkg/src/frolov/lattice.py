"""Lattice-rule node enumeration and the equal-weight quadrature evaluator.

The rule evaluated here places a node at S^{-T}(m + v) for every integer
vector m that lands inside a support box, all with the common weight
1/|det S|.  Enumeration generates integer candidates from the bounding box
of the image S^T(box) - v (computed from the 2^d corners of the box) and
keeps exactly the candidates whose node lies in the closed box.

Everything in this module is single-threaded and deterministic: candidates
are visited in lexicographic order of m and sums are accumulated with
exact (error-free-transformation) summation via math.fsum, so results are
bit-identical across runs.  This is the reference mode required for the
reproducibility contract; callers that parallelize must reassemble results
in this order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SupportBox",
    "NodeSet",
    "SingularGeneratorError",
    "CandidateBudgetError",
    "determinant",
    "enumerate_nodes",
    "lattice_points_in_box",
    "iter_integer_vectors",
    "apply_rule",
    "fourier_error_bound",
]

DEFAULT_CANDIDATE_CAP = 10**8

# Block size for chunked candidate generation; bounds peak memory at
# roughly block * d * 8 bytes per array.
_BLOCK = 1 << 18


class SingularGeneratorError(ValueError):
    """Generator matrix is singular (or numerically indistinguishable from it)."""


class CandidateBudgetError(RuntimeError):
    """Candidate enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class SupportBox:
    """Axis-aligned closed box [lower, upper] in R^d."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("box bounds must be 1-d vectors of equal length")
        if np.any(lower > upper):
            raise ValueError("box requires lower[j] <= upper[j] for all j")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit_cube(cls, dim: int) -> "SupportBox":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def edge_lengths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def volume(self) -> float:
        return float(np.prod(self.edge_lengths))

    def corners(self) -> np.ndarray:
        """All 2^d corners, one per row."""
        bounds = np.stack([self.lower, self.upper])
        idx = np.array(list(itertools.product((0, 1), repeat=self.dim)))
        return bounds[idx, np.arange(self.dim)]

    def contains_mask(self, points: np.ndarray) -> np.ndarray:
        """Closed-box membership for an (n, d) array of points."""
        points = np.atleast_2d(points)
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Enumerated nodes of one rule instance.

    ms holds the integer vectors m (n, d), xs the nodes S^{-T}(m + v)
    (n, d) in the same row order, and weight the common weight 1/|det S|.
    """

    generator: np.ndarray
    shift: np.ndarray
    ms: np.ndarray
    xs: np.ndarray
    weight: float

    def __len__(self) -> int:
        return self.ms.shape[0]

    def to_csv(self, path) -> None:
        """Write nodes as CSV with columns m_1..m_d, x_1..x_d."""
        d = self.generator.shape[0]
        header = ",".join([f"m_{j + 1}" for j in range(d)] + [f"x_{j + 1}" for j in range(d)])
        lines = [header]
        for m, x in zip(self.ms, self.xs):
            lines.append(",".join([repr(int(c)) for c in m] + [repr(float(c)) for c in x]))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _integer_ranges(images: np.ndarray, shift: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integer bounding box of the image points minus shift.

    A slack proportional to the coordinate magnitude keeps boundary
    candidates inside the range; the exact membership filter decides.
    """
    lo = images.min(axis=0) - shift
    hi = images.max(axis=0) - shift
    slack = 1e-9 * np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
    mlo = np.ceil(lo - slack).astype(np.int64)
    mhi = np.floor(hi + slack).astype(np.int64)
    return mlo, mhi


def _range_sizes(mlo: np.ndarray, mhi: np.ndarray) -> list[int]:
    return [max(0, int(h) - int(l) + 1) for l, h in zip(mlo, mhi)]


def iter_integer_vectors(mlo, mhi, block: int = _BLOCK):
    """Yield all integer vectors in [mlo, mhi] as (k, d) blocks.

    Blocks appear in lexicographic order and each holds at most ``block``
    vectors, so peak memory stays bounded for large boxes.
    """
    mlo = np.asarray(mlo, dtype=np.int64)
    mhi = np.asarray(mhi, dtype=np.int64)
    d = mlo.size
    sizes = _range_sizes(mlo, mhi)
    if any(s == 0 for s in sizes):
        return

    # Split axes into a leading part iterated in Python and a trailing
    # part expanded with meshgrid, keeping the trailing product <= block.
    t = d
    prod = 1
    while t > 0 and prod * sizes[t - 1] <= block:
        prod *= sizes[t - 1]
        t -= 1

    if t == d:
        # Even the final axis alone exceeds the block size: slice it.
        last = np.arange(mlo[d - 1], mhi[d - 1] + 1, dtype=np.int64)
        heads = itertools.product(*[range(int(mlo[j]), int(mhi[j]) + 1) for j in range(d - 1)])
        for head in heads:
            for s in range(0, last.size, block):
                chunk = last[s:s + block]
                out = np.empty((chunk.size, d), dtype=np.int64)
                out[:, : d - 1] = head
                out[:, d - 1] = chunk
                yield out
        return

    tail_axes = [np.arange(mlo[j], mhi[j] + 1, dtype=np.int64) for j in range(t, d)]
    grids = np.meshgrid(*tail_axes, indexing="ij")
    tail = np.stack([g.ravel() for g in grids], axis=1)
    if t == 0:
        yield tail
        return
    for head in itertools.product(*[range(int(mlo[j]), int(mhi[j]) + 1) for j in range(t)]):
        out = np.empty((tail.shape[0], d), dtype=np.int64)
        out[:, :t] = head
        out[:, t:] = tail
        yield out


def determinant(S) -> float:
    """Determinant by partial-pivot elimination.

    numpy's det goes through log space and returns 3.0000000000000004 for
    [[3.0]]; the rule weight 1/|det S| must be the exact reciprocal of an
    exactly represented determinant whenever the matrix allows it (the
    1-d rectangle-rule equivalence is bitwise), so eliminate directly.
    """
    A = np.array(S, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("determinant needs a square matrix")
    d = A.shape[0]
    det = 1.0
    for i in range(d):
        p = int(np.argmax(np.abs(A[i:, i]))) + i
        if A[p, i] == 0.0:
            return 0.0
        if p != i:
            A[[i, p]] = A[[p, i]]
            det = -det
        det *= A[i, i]
        if i + 1 < d:
            A[i + 1 :, i:] -= np.outer(A[i + 1 :, i] / A[i, i], A[i, i:])
    return det


def _check_generator(S: np.ndarray) -> float:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("generator must be a square matrix")
    det = determinant(S)
    if not np.isfinite(det) or abs(det) <= 1e-300:
        raise SingularGeneratorError(f"generator determinant {det!r} is not usable")
    return det


def _candidate_total(mlo, mhi) -> int:
    return math.prod(_range_sizes(mlo, mhi))


def enumerate_nodes(
    S,
    v,
    box: SupportBox,
    candidate_cap: int = DEFAULT_CANDIDATE_CAP,
) -> NodeSet:
    """All nodes S^{-T}(m + v) inside the closed box, with their m vectors.

    Nodes are solved from S^T x = m + v (one batched linear solve per
    candidate block) rather than multiplied by a precomputed inverse; the
    d = 1 case is computed as an exact IEEE division and so matches a
    hand-rolled shifted rectangle rule bit for bit.
    """
    S = np.asarray(S, dtype=float)
    det = _check_generator(S)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    d = S.shape[0]
    if v.size != d or box.dim != d:
        raise ValueError("shift and box dimensions must match the generator")

    images = box.corners() @ S  # rows are S^T c over the corners c
    mlo, mhi = _integer_ranges(images, v)
    total = _candidate_total(mlo, mhi)
    if total > candidate_cap:
        raise CandidateBudgetError(
            f"{total} candidate lattice vectors exceed the cap {candidate_cap}"
        )

    St = np.ascontiguousarray(S.T)
    kept_m = []
    kept_x = []
    for block in iter_integer_vectors(mlo, mhi):
        if d == 1:
            # scalar case is one exact IEEE division per node; LAPACK's
            # triangular solve would multiply by a rounded reciprocal
            xs = (block + v) / St[0, 0]
        else:
            xs = np.linalg.solve(St, (block + v).T).T
        mask = box.contains_mask(xs)
        if mask.any():
            kept_m.append(block[mask])
            kept_x.append(xs[mask])

    if kept_m:
        ms = np.vstack(kept_m)
        xs = np.vstack(kept_x)
    else:
        ms = np.empty((0, d), dtype=np.int64)
        xs = np.empty((0, d), dtype=float)
    return NodeSet(generator=S, shift=v, ms=ms, xs=xs, weight=1.0 / abs(det))


def lattice_points_in_box(
    A,
    box: SupportBox,
    candidate_cap: int = DEFAULT_CANDIDATE_CAP,
) -> np.ndarray:
    """Integer vectors m with A m inside the closed box.

    Candidates come from the bounding box of the corner preimages A^{-1} c;
    membership is decided on the exactly recomputed image A m.
    """
    A = np.asarray(A, dtype=float)
    _check_generator(A)
    if box.dim != A.shape[0]:
        raise ValueError("box dimension must match the matrix")

    pre = np.linalg.solve(A, box.corners().T).T
    mlo, mhi = _integer_ranges(pre, np.zeros(A.shape[0]))
    total = _candidate_total(mlo, mhi)
    if total > candidate_cap:
        raise CandidateBudgetError(
            f"{total} candidate lattice vectors exceed the cap {candidate_cap}"
        )

    kept = []
    At = np.ascontiguousarray(A.T)
    for block in iter_integer_vectors(mlo, mhi):
        ys = block @ At
        mask = box.contains_mask(ys)
        if mask.any():
            kept.append(block[mask])
    if kept:
        return np.vstack(kept)
    return np.empty((0, A.shape[0]), dtype=np.int64)


def apply_rule(nodes: NodeSet, f) -> float:
    """Evaluate the equal-weight rule: weight * sum of f over the nodes.

    f must map an (n, d) array of points to an (n,) array of values.
    The sum is exact (math.fsum), so the result does not depend on node
    order and reruns are bit-identical.
    """
    if len(nodes) == 0:
        return 0.0
    values = np.asarray(f(nodes.xs), dtype=float)
    if values.shape != (len(nodes),):
        raise ValueError("integrand returned a wrongly shaped value array")
    return nodes.weight * math.fsum(values.tolist())


def fourier_error_bound(S, fhat, trunc: int) -> float:
    """Sum of fhat(S m) over the nonzero integer vectors with ||m||_inf <= trunc.

    fhat must be the absolute Fourier transform |f^| of the integrand,
    callable on (n, d) arrays of frequency vectors.  The returned value is
    the truncation of the spectral error bound for the rule generated by S;
    callers add their own analytic bound for the discarded terms.
    """
    S = np.asarray(S, dtype=float)
    _check_generator(S)
    if trunc < 1:
        raise ValueError("truncation radius must be at least 1")
    d = S.shape[0]
    mlo = np.full(d, -trunc, dtype=np.int64)
    mhi = np.full(d, trunc, dtype=np.int64)
    St = np.ascontiguousarray(S.T)
    partials = []
    for block in iter_integer_vectors(mlo, mhi):
        nz = ~np.all(block == 0, axis=1)
        if not nz.any():
            continue
        ys = block[nz] @ St  # rows are S m
        vals = np.asarray(fhat(ys), dtype=float)
        partials.append(math.fsum(vals.tolist()))
    return math.fsum(partials)
