"""Periodizing change of variables and the transformed lattice estimate.

The map psi integrates the smooth compactly supported weight

    h(x) = exp(1 / ((2x - 1)^2 - 1))   on (0, 1),  0 elsewhere,

normalized to total mass 1, and clamps to 0 below 0 and 1 above 1.  All
derivatives of psi vanish at the endpoints, so composing an integrand on
the unit cube with Psi(x) = (psi(x_1), .., psi(x_d)) and weighting by the
Jacobian prod_j psi'(x_j) produces a compactly supported function with the
same integral.  That turns the compact-support estimate into one that
handles any integrable function on the cube without losing unbiasedness.

The cumulative of h is precomputed once as a 2048-piece composite
Gauss-Legendre prefix table; a psi evaluation adds the exact partial-piece
quadrature on top of the stored prefix, which keeps every value consistent
with the stored total mass (psi(1) is exactly 1.0).  Adaptive quadrature
re-derivations serve as the independent oracle in the tests.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .lattice import SupportBox, enumerate_nodes
from .matrices import FrolovMatrix
from .randomized import RandomDraw

__all__ = [
    "PsiTransform",
    "get_transform",
    "psi",
    "psi_prime",
    "big_psi",
    "transformed_estimate",
    "choose_a_for_budget",
]

_PIECES = 2048
_GL_ORDER = 12

# Product Jacobians switch to log-space accumulation at this dimension to
# dodge gradual underflow of many small factors.
_LOG_SPACE_DIM = 8


def bump_weight(x) -> np.ndarray:
    """The endpoint-flat weight h, vectorized, h(0) = h(1) = 0 exactly."""
    x = np.asarray(x, dtype=float)
    s = (2.0 * x - 1.0) ** 2 - 1.0
    out = np.zeros_like(s)
    inside = s < 0.0
    # 1/s overflows for denormal s; exp(-inf) = 0 is the right limit
    with np.errstate(over="ignore"):
        out[inside] = np.exp(1.0 / s[inside])
    return out


class PsiTransform:
    """Immutable evaluator for psi, psi' and the product map Psi."""

    def __init__(self, pieces: int = _PIECES, gl_order: int = _GL_ORDER):
        self._pieces = pieces
        self._grid = np.linspace(0.0, 1.0, pieces + 1)
        nodes, weights = np.polynomial.legendre.leggauss(gl_order)
        # Rescale the Gauss-Legendre rule from [-1, 1] to [0, 1].
        self._gl_nodes = 0.5 * (nodes + 1.0)
        self._gl_weights = 0.5 * weights

        width = 1.0 / pieces
        t = self._grid[:-1, None] + width * self._gl_nodes[None, :]
        piece_integrals = width * (bump_weight(t) @ self._gl_weights)

        # Compensated running prefix keeps every partial sum at ~1 ulp.
        prefix = np.empty(pieces + 1)
        prefix[0] = 0.0
        acc = 0.0
        carry = 0.0
        for i, p in enumerate(piece_integrals):
            y = p + carry
            s = acc + y
            carry = (acc - s) + y
            acc = s
            prefix[i + 1] = acc
        self._prefix = prefix
        self._total = float(prefix[-1])

    @property
    def total_mass(self) -> float:
        """The unnormalized mass of h over [0, 1]."""
        return self._total

    def psi(self, x):
        """Normalized cumulative of h; 0 below 0, 1 above 1."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x)
        out = np.empty_like(xs)
        low = xs <= 0.0
        high = xs >= 1.0
        out[low] = 0.0
        out[high] = 1.0
        mid = ~(low | high)
        if mid.any():
            xm = xs[mid]
            idx = np.minimum((xm * self._pieces).astype(np.int64), self._pieces - 1)
            left = self._grid[idx]
            width = xm - left
            t = left[:, None] + width[:, None] * self._gl_nodes[None, :]
            partial = width * (bump_weight(t) @ self._gl_weights)
            out[mid] = (self._prefix[idx] + partial) / self._total
        return float(out[0]) if scalar else out

    def psi_prime(self, x):
        """Derivative h(x) / total mass; vanishes outside (0, 1)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        vals = bump_weight(np.atleast_1d(x)) / self._total
        return float(vals[0]) if scalar else vals.reshape(np.atleast_1d(x).shape)

    def big_psi(self, x) -> tuple[np.ndarray, float]:
        """Coordinate-wise image Psi(x) and the Jacobian prod psi'(x_j)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = self.psi(x)
        dp = self.psi_prime(x)
        if x.size >= _LOG_SPACE_DIM:
            if np.any(dp == 0.0):
                jac = 0.0
            else:
                jac = math.exp(math.fsum(np.log(dp).tolist()))
        else:
            jac = float(np.prod(dp))
        return y, jac

    def jacobians(self, points: np.ndarray) -> np.ndarray:
        """Row-wise Jacobians for an (n, d) array of points."""
        points = np.atleast_2d(points)
        dp = bump_weight(points) / self._total
        if points.shape[1] >= _LOG_SPACE_DIM:
            zero = np.any(dp == 0.0, axis=1)
            out = np.zeros(points.shape[0])
            ok = ~zero
            if ok.any():
                out[ok] = np.exp(np.sum(np.log(dp[ok]), axis=1))
            return out
        return np.prod(dp, axis=1)


@functools.lru_cache(maxsize=1)
def get_transform() -> PsiTransform:
    """The shared transform instance (immutable, safe to share)."""
    return PsiTransform()


def psi(x):
    return get_transform().psi(x)


def psi_prime(x):
    return get_transform().psi_prime(x)


def big_psi(x) -> tuple[np.ndarray, float]:
    return get_transform().big_psi(x)


def transformed_estimate(
    a: float,
    B: FrolovMatrix,
    f,
    rnd: RandomDraw,
    transform: PsiTransform | None = None,
) -> tuple[float, int]:
    """Randomized estimate of the integral of f over the unit cube.

    Enumerates the lattice nodes of the generator a diag(u) B against the
    unit cube, then sums f(Psi(x)) weighted by the Jacobian at each node.
    Nodes whose Jacobian is zero contribute nothing and skip the f
    evaluation.  Returns the estimate and the enumerated node count.
    """
    if a <= 0.0:
        raise ValueError("dilation scale a must be positive")
    if rnd.dim != B.dim:
        raise ValueError("draw dimension does not match the matrix")
    tr = transform if transform is not None else get_transform()
    d = B.dim
    S = a * rnd.u[:, None] * B.entries
    nodes = enumerate_nodes(S, rnd.v, SupportBox.unit_cube(d))
    if len(nodes) == 0:
        return 0.0, 0
    jac = tr.jacobians(nodes.xs)
    contributions = np.zeros(len(nodes))
    live = jac > 0.0
    if live.any():
        mapped = tr.psi(nodes.xs[live].ravel()).reshape(-1, d)
        contributions[live] = np.asarray(f(mapped), dtype=float) * jac[live]
    value = nodes.weight * math.fsum(contributions.tolist())
    return value, len(nodes)


def choose_a_for_budget(n: int, B: FrolovMatrix, l: float = 1.0) -> float:
    """Dilation scale whose node count stays at or below n for every draw.

    With c1 = (l ||B||_1 + 1)^d, budgets n >= 4 c1 get a = (n / (2 c1))^(1/d),
    which caps the randomized node count at 2 c1 a^d = n.  Smaller budgets
    get a degenerate scale so small that at most one candidate integer
    survives per coordinate, leaving at most a single node.
    """
    if n < 1:
        raise ValueError("budget must be at least 1")
    if l <= 0.0:
        raise ValueError("support edge length must be positive")
    d = B.dim
    c1 = (l * B.one_norm + 1.0) ** d
    if n >= 4.0 * c1:
        return (n / (2.0 * c1)) ** (1.0 / d)
    # Degenerate branch: per-coordinate candidate interval length
    # a * u_j * l * colsum_j <= a * 2^(1/d) * l * ||B||_1 < 1.
    return 0.99 / (2.0 ** (1.0 / d) * l * B.one_norm)
