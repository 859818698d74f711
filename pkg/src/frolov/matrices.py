"""Construction and empirical verification of Frolov generator matrices.

A Frolov matrix B is an invertible d x d matrix whose integer lattice
B Z^d avoids the region |prod_j x_j| < 1 except at the origin and meets
any axis-aligned box in at most volume + 1 points.  Both constructions
here follow the classical recipe: take a degree-d monic integer polynomial
that is irreducible over the rationals with d distinct real roots
zeta_1..zeta_d, and set B[i][j] = zeta_i ** j (a Vandermonde matrix of the
roots).

Two root systems are provided:

* general_poly: p(x) = (x - 1)(x - 3)...(x - 2d + 1) - 1, any 1 <= d <= 12.
  Roots are found by a sign-change scan over [-2, 2d] with step 0.01,
  bisection of each bracket to width 1e-12, and two Newton polish steps.
  The polynomial is always evaluated in factored form; expanding the
  coefficients would lose accuracy to cancellation for moderate d.
* chebyshev: for d a power of two, the roots 2 cos((2j - 1) pi / (2d)) of
  twice the rescaled degree-d Chebyshev polynomial, in closed form.

The lattice properties are verified empirically (finite scan radius,
sampled boxes).  They hold exactly by the classical theory; the checks
exist to catch implementation mistakes, not to prove the theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import SupportBox, determinant, iter_integer_vectors, lattice_points_in_box

__all__ = [
    "MAX_DIMENSION",
    "FrolovMatrix",
    "LatticePropertyReport",
    "MatrixConstructionError",
    "build_general_poly_matrix",
    "build_chebyshev_matrix",
    "verify_property_b",
    "verify_property_c",
]

# Beyond d ~ 12 the Vandermonde of these roots is too ill-conditioned for
# double precision to certify the lattice properties, so refuse early.
MAX_DIMENSION = 12

_SCAN_STEP = 0.01
_BISECT_WIDTH = 1e-12
_IDENTITY_TOL = 1e-10
_MIN_ROOT_GAP = 1e-8


class MatrixConstructionError(RuntimeError):
    """Root finding or matrix assembly failed its own sanity checks."""


@dataclass(frozen=True, eq=False)
class FrolovMatrix:
    """A generator matrix B = (zeta_i^(j-1)) with cached derived quantities.

    entries is B itself, inv_transpose is (B^-1)^T (the builder for node
    maps S^-T with S = a diag(u) B), abs_det is |det B| and one_norm the
    maximum absolute column sum ||B||_1.
    """

    dim: int
    roots: np.ndarray
    entries: np.ndarray
    inv_transpose: np.ndarray
    abs_det: float
    one_norm: float
    construction: str

    def __post_init__(self):
        recon = self.entries @ self.inv_transpose.T
        err = float(np.max(np.abs(recon - np.eye(self.dim))))
        if err > _IDENTITY_TOL:
            raise MatrixConstructionError(
                f"inverse reconstruction error {err:.3e} exceeds {_IDENTITY_TOL}"
            )
        if self.dim > 1:
            gap = float(np.min(np.diff(np.sort(self.roots))))
            if gap <= _MIN_ROOT_GAP:
                raise MatrixConstructionError(f"root gap {gap:.3e} too small")
        if not self.abs_det > 0.0:
            raise MatrixConstructionError("determinant must be nonzero")

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "roots": [float(r) for r in self.roots],
            "entries": [[float(c) for c in row] for row in self.entries],
            "construction": self.construction,
        }


@dataclass(frozen=True)
class LatticePropertyReport:
    """Outcome of one empirical lattice-property check."""

    radius: int = 0
    min_abs_product: float = math.inf
    box_trials: int = 0
    max_count_excess: float = -math.inf
    tol: float = 0.0
    passed: bool = False


def _odd_targets(d: int) -> np.ndarray:
    return np.arange(1, 2 * d, 2, dtype=float)


def _poly(x, targets) -> np.ndarray:
    """p(x) = prod (x - (2k - 1)) - 1 in factored form, vectorized."""
    x = np.asarray(x, dtype=float)
    return np.prod(x[..., None] - targets, axis=-1) - 1.0


def _poly_scalar(x: float, targets) -> float:
    acc = 1.0
    for t in targets:
        acc *= x - t
    return acc - 1.0


def _poly_derivative_scalar(x: float, targets) -> float:
    total = 0.0
    for skip in range(targets.size):
        acc = 1.0
        for k, t in enumerate(targets):
            if k != skip:
                acc *= x - t
        total += acc
    return total


def _from_roots(roots: np.ndarray, construction: str) -> FrolovMatrix:
    d = roots.size
    entries = np.vander(roots, increasing=True)
    det = determinant(entries)
    return FrolovMatrix(
        dim=d,
        roots=roots,
        entries=entries,
        inv_transpose=np.linalg.inv(entries).T,
        abs_det=abs(det),
        one_norm=float(np.linalg.norm(entries, 1)),
        construction=construction,
    )


def build_general_poly_matrix(d: int) -> FrolovMatrix:
    """Frolov matrix from the roots of (x-1)(x-3)...(x-2d+1) - 1.

    Roots are returned in ascending order, each accurate to well under
    1e-13 relative error (bisection bracket of width 1e-12 followed by two
    Newton steps).  Raises if d is outside [1, 12] or the scan does not
    produce exactly d simple roots.
    """
    if not isinstance(d, int) or not 1 <= d <= MAX_DIMENSION:
        raise ValueError(f"dimension must be an integer in [1, {MAX_DIMENSION}], got {d!r}")
    targets = _odd_targets(d)

    # linspace pins both scan endpoints exactly; d = 1 has its root at 2d.
    steps = round((2.0 * d + 2.0) / _SCAN_STEP)
    grid = np.linspace(-2.0, 2.0 * d, steps + 1)
    values = _poly(grid, targets)
    roots = []
    for i in range(grid.size - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            bracket = (a, a)
        elif fb == 0.0 and i == grid.size - 2:
            bracket = (b, b)  # interior exact zeros handled as the left end
        elif fa * fb < 0.0:
            bracket = (a, b)
        else:
            continue

        lo, hi = bracket
        flo = _poly_scalar(lo, targets)
        while hi - lo > _BISECT_WIDTH:
            mid = 0.5 * (lo + hi)
            fmid = _poly_scalar(mid, targets)
            if fmid == 0.0:
                lo = hi = mid
                break
            if flo * fmid < 0.0:
                hi = mid
            else:
                lo, flo = mid, fmid
        x = 0.5 * (lo + hi)
        for _ in range(2):
            deriv = _poly_derivative_scalar(x, targets)
            if deriv == 0.0:
                raise MatrixConstructionError(f"Newton polish stalled near x={x!r}")
            x -= _poly_scalar(x, targets) / deriv
        roots.append(x)

    if len(roots) != d:
        raise MatrixConstructionError(
            f"expected {d} real roots in [-2, {2 * d}], scan found {len(roots)}"
        )
    return _from_roots(np.array(roots, dtype=float), "general_poly")


def build_chebyshev_matrix(d: int) -> FrolovMatrix:
    """Frolov matrix from the closed-form roots 2 cos((2j-1) pi / (2d)).

    Only powers of two are admissible for d; no iterative root finding is
    involved.
    """
    if not isinstance(d, int) or d < 1 or (d & (d - 1)) != 0:
        raise ValueError(f"chebyshev construction needs d a power of two, got {d!r}")
    if d > MAX_DIMENSION:
        raise ValueError(f"dimension must be at most {MAX_DIMENSION}, got {d}")
    j = np.arange(1, d + 1, dtype=float)
    roots = 2.0 * np.cos((2.0 * j - 1.0) / (2.0 * d) * np.pi)
    return _from_roots(roots, "chebyshev")


def _entries_of(B) -> np.ndarray:
    if isinstance(B, FrolovMatrix):
        return B.entries
    return np.asarray(B, dtype=float)


def verify_property_b(B, radius: int, tol: float = 1e-9) -> LatticePropertyReport:
    """Scan min |prod_j (B m)_j| over the nonzero m with ||m||_inf <= radius.

    A valid Frolov matrix keeps this minimum at 1 or above; the check
    passes when the scanned minimum is >= 1 - tol.  Accepts a FrolovMatrix
    or a plain matrix (so degenerate controls like the identity can be
    checked too).
    """
    entries = _entries_of(B)
    if radius < 1:
        raise ValueError("radius must be at least 1")
    d = entries.shape[0]
    Bt = np.ascontiguousarray(entries.T)
    mlo = np.full(d, -radius, dtype=np.int64)
    mhi = np.full(d, radius, dtype=np.int64)
    best = math.inf
    for block in iter_integer_vectors(mlo, mhi):
        nz = ~np.all(block == 0, axis=1)
        if not nz.any():
            continue
        prods = np.abs(np.prod(block[nz] @ Bt, axis=1))
        best = min(best, float(prods.min()))
    return LatticePropertyReport(
        radius=radius,
        min_abs_product=best,
        tol=tol,
        passed=best >= 1.0 - tol,
    )


def verify_property_c(
    B,
    trials: int,
    rng_seed: int,
    tol: float = 1e-9,
    edge_range: tuple[float, float] = (0.1, 20.0),
    center_range: tuple[float, float] = (-10.0, 10.0),
) -> LatticePropertyReport:
    """Sample random boxes and compare their lattice-point count to volume + 1.

    Each trial draws edge lengths uniformly from edge_range and a center
    uniformly from center_range, counts the lattice points B m inside by
    candidate enumeration, and records count - volume.  Passes when the
    maximum excess stays at or below 1 + tol.
    """
    entries = _entries_of(B)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    d = entries.shape[0]
    rng = np.random.default_rng(rng_seed)
    worst = -math.inf
    for _ in range(trials):
        edges = rng.uniform(edge_range[0], edge_range[1], size=d)
        center = rng.uniform(center_range[0], center_range[1], size=d)
        box = SupportBox(center - edges / 2.0, center + edges / 2.0)
        count = lattice_points_in_box(entries, box).shape[0]
        worst = max(worst, count - box.volume)
    return LatticePropertyReport(
        box_trials=trials,
        max_count_excess=worst,
        tol=tol,
        passed=worst <= 1.0 + tol,
    )
