"""Curated separable test integrands with trusted reference integrals.

Every corpus entry is a coordinate-wise product of one fixed 1-d factor,
so its exact integral over the unit cube is the d-th power of a 1-d value
that is either closed form or a frozen high-accuracy quadrature constant.
Entries evaluate to exactly zero outside their declared support box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .lattice import SupportBox

__all__ = [
    "Integrand",
    "QuadratureError",
    "corpus",
    "corpus_by_name",
    "corpus_json",
    "reference_integral_1d",
    "BUMP_INTEGRAL_1D",
]

MAX_CORPUS_DIM = 6

# int_0^1 exp(-1/(x(1-x))) dx, minted once by adaptive quadrature at
# 1e-13 and cross-checked against a second subdivision strategy; frozen
# here so every run sees the same reference value.
BUMP_INTEGRAL_1D = 0.007029858406609656239241271


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not certify the requested tolerance."""


@dataclass(frozen=True, eq=False)
class Integrand:
    """Evaluable test function with a trusted integral.

    The object is callable on an (n, d) array of points (returning (n,)
    values) or on a single d-vector (returning a float).  For compactly
    supported entries the value is exactly 0.0 outside the closed support
    box.  smoothness carries descriptive tags only; no norms are computed.
    """

    name: str
    dim: int
    support: SupportBox
    exact_integral: float
    integral_provenance: str
    smoothness: tuple[str, ...]
    factor: Callable[[np.ndarray], np.ndarray]
    fourier_abs_factor: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        pts = np.atleast_2d(points)
        if pts.shape[1] != self.dim:
            raise ValueError(f"{self.name} expects dimension {self.dim}, got {pts.shape[1]}")
        out = np.zeros(pts.shape[0])
        inside = self.support.contains_mask(pts)
        if inside.any():
            out[inside] = np.prod(self.factor(pts[inside]), axis=1)
        return float(out[0]) if single else out

    @property
    def fourier_abs(self) -> Optional[Callable[[np.ndarray], np.ndarray]]:
        """|f^| on (n, d) frequency arrays, when known in closed form."""
        if self.fourier_abs_factor is None:
            return None
        factor = self.fourier_abs_factor

        def fhat(ys: np.ndarray) -> np.ndarray:
            ys = np.atleast_2d(np.asarray(ys, dtype=float))
            return np.prod(factor(ys), axis=1)

        return fhat

    def json_entry(self) -> dict:
        return {
            "name": self.name,
            "d": self.dim,
            "exact_integral": self.exact_integral,
            "integral_provenance": self.integral_provenance,
            "smoothness": list(self.smoothness),
        }


def _poly_factor(t: np.ndarray) -> np.ndarray:
    return t


def _sine_factor(t: np.ndarray) -> np.ndarray:
    return np.sin(np.pi * t)


def _bump_factor(t: np.ndarray) -> np.ndarray:
    s = t * (1.0 - t)
    out = np.zeros_like(s)
    pos = s > 0.0
    # 1/s overflows for denormal s; exp(-inf) = 0 is the right limit
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / s[pos])
    return out


def _triangle_factor(t: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, 1.0 - np.abs(2.0 * t - 1.0))


def _triangle_abs_ft_factor(y: np.ndarray) -> np.ndarray:
    """|f^| of the unit triangle: 2 sin^2(pi y / 2) / (pi y)^2, 1/2 at 0."""
    y = np.asarray(y, dtype=float)
    out = np.full_like(y, 0.5)
    nz = y != 0.0
    s = np.sin(np.pi * y[nz] / 2.0)
    out[nz] = 2.0 * s * s / (np.pi * y[nz]) ** 2
    return out


def _cosine_factor(t: np.ndarray) -> np.ndarray:
    return np.cos(2.0 * np.pi * t)


def corpus(d: int) -> list[Integrand]:
    """The five standard test integrands on [0, 1]^d."""
    if not isinstance(d, int) or not 1 <= d <= MAX_CORPUS_DIM:
        raise ValueError(f"corpus supports dimensions 1..{MAX_CORPUS_DIM}, got {d!r}")
    cube = SupportBox.unit_cube(d)
    return [
        Integrand(
            name="product_poly",
            dim=d,
            support=cube,
            exact_integral=0.5**d,
            integral_provenance="closed-form",
            smoothness=("C0", "smooth-inside-cube"),
            factor=_poly_factor,
        ),
        Integrand(
            name="product_sine",
            dim=d,
            support=cube,
            exact_integral=(2.0 / math.pi) ** d,
            integral_provenance="closed-form",
            smoothness=("C0", "r:1", "smooth-inside-cube"),
            factor=_sine_factor,
        ),
        Integrand(
            name="bump",
            dim=d,
            support=cube,
            exact_integral=BUMP_INTEGRAL_1D**d,
            integral_provenance="reference-quadrature(1e-13)",
            smoothness=("r:inf", "s:inf", "compactly-supported"),
            factor=_bump_factor,
        ),
        Integrand(
            name="triangle",
            dim=d,
            support=cube,
            exact_integral=0.5**d,
            integral_provenance="closed-form",
            smoothness=("C0", "r:1"),
            factor=_triangle_factor,
            fourier_abs_factor=_triangle_abs_ft_factor,
        ),
        Integrand(
            name="cos_product",
            dim=d,
            support=cube,
            exact_integral=0.0,
            integral_provenance="closed-form",
            smoothness=("C0", "smooth-inside-cube", "zero-integral"),
            factor=_cosine_factor,
        ),
    ]


def corpus_by_name(d: int) -> dict[str, Integrand]:
    return {f.name: f for f in corpus(d)}


def corpus_json(d: int) -> list[dict]:
    """JSON-ready corpus listing (name, d, exact integral, smoothness)."""
    return [f.json_entry() for f in corpus(d)]


def reference_integral_1d(g, tol: float) -> float:
    """Adaptive quadrature of g over [0, 1], certified below tol.

    Only used to mint reference constants for separable integrands; the
    d-dimensional reference is the product of 1-d references.  Raises
    QuadratureError when the error estimate cannot be brought below tol
    within the subdivision cap.
    """
    if tol < 1e-14:
        raise ValueError("tolerance below 1e-14 is not certifiable in double precision")
    value, estimate = integrate.quad(g, 0.0, 1.0, epsabs=tol / 4.0, epsrel=tol / 4.0, limit=400)
    if not np.isfinite(value) or estimate > tol:
        raise QuadratureError(
            f"quadrature error estimate {estimate:.3e} exceeds tolerance {tol:.3e}"
        )
    return float(value)
