"""Tests for generator matrix construction and the lattice property checks."""

import math

import mpmath
import numpy as np
import pytest

from frolov.lattice import SupportBox, lattice_points_in_box
from frolov.matrices import (
    MAX_DIMENSION,
    FrolovMatrix,
    MatrixConstructionError,
    build_chebyshev_matrix,
    build_general_poly_matrix,
    verify_property_b,
    verify_property_c,
)

from oracles import chebyshev_recurrence, factored_poly_residual

SQRT2 = math.sqrt(2.0)


def test_general_d1_is_trivial():
    B = build_general_poly_matrix(1)
    assert B.entries.tolist() == [[1.0]]
    # p(x) = (x - 1) - 1 has its root at 2
    assert B.roots[0] == pytest.approx(2.0, abs=1e-14)


def test_general_d2_matches_closed_form():
    B = build_general_poly_matrix(2)
    expected = np.array([[1.0, 2.0 - SQRT2], [1.0, 2.0 + SQRT2]])
    assert np.max(np.abs(B.entries - expected)) < 1e-12
    assert B.roots[0] < B.roots[1]


def test_chebyshev_d2_matches_closed_form():
    B = build_chebyshev_matrix(2)
    assert abs(B.roots[0] - SQRT2) < 1e-14
    assert abs(B.roots[1] + SQRT2) < 1e-14
    assert np.max(np.abs(B.entries - np.array([[1.0, SQRT2], [1.0, -SQRT2]]))) < 1e-14


def test_chebyshev_d1_root_is_zero():
    B = build_chebyshev_matrix(1)
    assert B.entries.tolist() == [[1.0]]
    assert abs(B.roots[0]) < 1e-15


def test_chebyshev_d4_roots_kill_the_polynomial():
    B = build_chebyshev_matrix(4)
    for z in B.roots:
        assert abs(chebyshev_recurrence(4, z)) < 1e-14


def test_general_d3_residuals():
    B = build_general_poly_matrix(3)
    assert factored_poly_residual(B.roots, 3) < 1e-12


@pytest.mark.parametrize("d", range(1, 7))
def test_general_poly_residual_small_dims(d):
    # Exact-arithmetic residual |p(zeta)| at the stored double roots.  The
    # residual grows with p'(zeta), so this is only meaningful at small d;
    # by d ~ 8 a half-ulp root perturbation alone exceeds 1e-10.
    B = build_general_poly_matrix(d)
    assert factored_poly_residual(B.roots, d) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_general_poly_roots_against_mpmath(d):
    B = build_general_poly_matrix(d)
    with mpmath.workdps(40):
        for r in B.roots:
            exact = mpmath.findroot(
                lambda x: mpmath.fprod([x - (2 * k - 1) for k in range(1, d + 1)]) - 1,
                mpmath.mpf(float(r)),
            )
            assert abs(float(r) - float(exact)) <= 1e-13 * max(1.0, abs(float(exact)))


@pytest.mark.parametrize("build", [build_general_poly_matrix, build_chebyshev_matrix])
def test_vandermonde_relation_exact(build):
    B = build(4)
    assert np.array_equal(B.entries, np.vander(B.roots, increasing=True))


@pytest.mark.parametrize("d", [1, 2, 3, 4, 8])
def test_inverse_reconstruction(d):
    B = build_general_poly_matrix(d)
    err = np.max(np.abs(B.entries @ B.inv_transpose.T - np.eye(d)))
    assert err < 1e-10


def test_roots_distinct():
    for d in (2, 3, 4, 8):
        B = build_general_poly_matrix(d)
        assert np.min(np.diff(np.sort(B.roots))) > 1e-8


def test_one_norm_is_max_column_sum():
    B = build_general_poly_matrix(3)
    assert B.one_norm == pytest.approx(np.abs(B.entries).sum(axis=0).max(), abs=0.0)


def test_dimension_guards():
    with pytest.raises(ValueError):
        build_general_poly_matrix(0)
    with pytest.raises(ValueError):
        build_general_poly_matrix(MAX_DIMENSION + 1)
    with pytest.raises(ValueError):
        build_chebyshev_matrix(3)
    with pytest.raises(ValueError):
        build_chebyshev_matrix(0)


def test_json_round_trip_fields():
    B = build_chebyshev_matrix(2)
    doc = B.to_json_dict()
    assert set(doc) == {"dim", "roots", "entries", "construction"}
    assert doc["dim"] == 2
    assert doc["construction"] == "chebyshev"
    assert np.allclose(doc["entries"], B.entries)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_property_b_general(d):
    B = build_general_poly_matrix(d)
    radius = 30 if d <= 3 else 12
    report = verify_property_b(B, radius=radius)
    assert report.passed
    assert report.min_abs_product >= 1.0 - 1e-9


@pytest.mark.parametrize("d", [1, 2, 4])
def test_property_b_chebyshev(d):
    report = verify_property_b(build_chebyshev_matrix(d), radius=30 if d <= 2 else 12)
    assert report.passed


def test_property_b_identity_control_fails():
    report = verify_property_b(np.eye(2), radius=1)
    assert not report.passed
    assert report.min_abs_product == 0.0


def test_property_b_needs_positive_radius():
    with pytest.raises(ValueError):
        verify_property_b(np.eye(2), radius=0)


@pytest.mark.parametrize("d", [2, 3])
def test_property_c_general(d):
    B = build_general_poly_matrix(d)
    report = verify_property_c(B, trials=200, rng_seed=7)
    assert report.passed
    assert report.max_count_excess <= 1.0 + 1e-9
    assert report.box_trials == 200


def test_property_c_chebyshev_d2():
    report = verify_property_c(build_chebyshev_matrix(2), trials=200, rng_seed=7)
    assert report.passed


def test_degenerate_box_holds_at_most_one_point():
    B = build_general_poly_matrix(2)
    # zero-volume box centered exactly on the lattice point B(1,1)
    target = B.entries @ np.ones(2)
    pts = lattice_points_in_box(B.entries, SupportBox(target, target))
    assert pts.shape[0] <= 1


def test_both_d2_constructions_differ_but_both_pass():
    gen = build_general_poly_matrix(2)
    che = build_chebyshev_matrix(2)
    assert not np.allclose(gen.entries, che.entries)
    assert verify_property_b(gen, radius=10).passed
    assert verify_property_b(che, radius=10).passed


def test_bad_matrix_rejected_at_construction():
    with pytest.raises(MatrixConstructionError):
        FrolovMatrix(
            dim=2,
            roots=np.array([1.0, 2.0]),
            entries=np.array([[1.0, 1.0], [1.0, 2.0]]),
            inv_transpose=np.eye(2),  # wrong inverse on purpose
            abs_det=1.0,
            one_norm=3.0,
            construction="general_poly",
        )
