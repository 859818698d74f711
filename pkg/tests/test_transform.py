"""Tests for the periodizing transform and the transformed estimate."""

import math

import numpy as np
import pytest
from scipy import integrate

from frolov.integrands import Integrand, corpus_by_name
from frolov.lattice import SupportBox, apply_rule, enumerate_nodes
from frolov.matrices import build_general_poly_matrix
from frolov.randomized import deterministic_draw, draw, replicate
from frolov.transform import (
    big_psi,
    bump_weight,
    choose_a_for_budget,
    get_transform,
    psi,
    psi_prime,
    transformed_estimate,
)

from oracles import psi_inverse_bisect, quad_psi

# psi'(1/2) = e^-1 / mass with mass = int_0^1 h; frozen high-precision values
PSI_QUARTER = 0.122967283277329078085734
PSI_PRIME_HALF = 1.657137679738210303328318


def test_psi_pinned_values():
    assert psi(0.0) == 0.0
    assert psi(1.0) == 1.0
    assert abs(psi(0.5) - 0.5) < 1e-12


def test_psi_clamps_outside():
    assert psi(-3.0) == 0.0
    assert psi(7.0) == 1.0


def test_psi_quarter_regression_and_quadrature_oracle():
    val = psi(0.25)
    assert abs(val - PSI_QUARTER) < 1e-13
    assert abs(val - quad_psi(0.25)) < 1e-12


def test_psi_accuracy_on_grid_against_adaptive_quadrature():
    for x in (0.05, 0.1, 0.33, 0.6, 0.77, 0.95):
        assert abs(psi(x) - quad_psi(x)) < 1e-12


def test_psi_monotone_nondecreasing():
    xs = np.linspace(-0.1, 1.1, 2001)
    vals = psi(xs)
    assert np.all(np.diff(vals) >= 0.0)
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)


def test_psi_prime_nonnegative_and_flat_at_ends():
    assert psi_prime(0.0) == 0.0
    assert psi_prime(1.0) == 0.0
    xs = np.linspace(0.0, 1.0, 1001)
    assert np.all(psi_prime(xs) >= 0.0)
    assert abs(psi_prime(0.5) - PSI_PRIME_HALF) < 1e-13


def test_psi_prime_matches_finite_differences():
    # centered differences on a 1000-point grid; near the endpoints the
    # ratio psi'''/psi' blows up and the quotient loses all accuracy, so
    # the grid stays where the derivative is appreciable
    xs = np.linspace(0.05, 0.95, 1000)
    h = 1e-5
    fd = (psi(xs + h) - psi(xs - h)) / (2.0 * h)
    dp = psi_prime(xs)
    rel = np.abs(fd - dp) / dp
    assert rel.max() < 1e-6


def test_psi_prime_integrates_to_one():
    val, err = integrate.quad(psi_prime, 0.0, 1.0, epsabs=1e-13, limit=300)
    assert err < 1e-8  # quad's estimate is conservative
    assert abs(val - 1.0) < 1e-10


def test_total_mass_value():
    assert abs(get_transform().total_mass - 0.2219969080840397) < 1e-15


def test_big_psi_center_point():
    for d in (1, 2, 5, 9):
        y, jac = big_psi(np.full(d, 0.5))
        assert np.max(np.abs(y - 0.5)) < 1e-12
        assert abs(jac - PSI_PRIME_HALF**d) < 1e-10 * PSI_PRIME_HALF**d


def test_big_psi_zero_jacobian_outside():
    _, jac = big_psi(np.array([0.5, 1.0]))
    assert jac == 0.0
    _, jac9 = big_psi(np.array([0.5] * 8 + [-0.2]))
    assert jac9 == 0.0


def test_big_psi_reduces_to_scalar_psi_in_1d():
    y, jac = big_psi(np.array([0.37]))
    assert y[0] == psi(0.37)
    assert jac == pytest.approx(psi_prime(0.37), rel=1e-12)


def test_psi_inverse_round_trip():
    tr = get_transform()
    rng = np.random.default_rng(3)
    for y in rng.uniform(0.01, 0.99, size=20):
        x = psi_inverse_bisect(tr, y)
        assert abs(tr.psi(x) - y) < 1e-8


def test_transformed_matches_composed_plain_rule():
    # The transformed rule on f must equal the plain rule applied to
    # f(Psi(x)) * |DPsi(x)| node by node.
    d = 2
    B = build_general_poly_matrix(d)
    f = corpus_by_name(d)["product_sine"]
    tr = get_transform()

    def composed(points):
        points = np.atleast_2d(points)
        mapped = tr.psi(points.ravel()).reshape(points.shape)
        return np.asarray(f(mapped), dtype=float) * tr.jacobians(points)

    rnd = draw(31, 4, d)
    a = 3.0
    value, count = transformed_estimate(a, B, f, rnd)
    nodes = enumerate_nodes(a * rnd.u[:, None] * B.entries, rnd.v, SupportBox.unit_cube(d))
    direct = apply_rule(nodes, composed)
    assert count == len(nodes)
    assert abs(value - direct) <= 1e-12 * max(1.0, abs(direct))


def _constant_one(d: int) -> Integrand:
    return Integrand(
        name="one",
        dim=d,
        support=SupportBox.unit_cube(d),
        exact_integral=1.0,
        integral_provenance="closed-form",
        smoothness=("C0",),
        factor=lambda t: np.ones_like(t),
    )


def test_transformed_constant_deterministic_d2():
    B = build_general_poly_matrix(2)
    value, _ = transformed_estimate(8.0, B, _constant_one(2), deterministic_draw(2))
    assert abs(value - 1.0) < 1e-3


def test_transformed_constant_unbiased():
    B = build_general_poly_matrix(2)
    one = _constant_one(2)

    def estimator(seed, k):
        return transformed_estimate(2.0, B, one, draw(seed, k, 2))

    batch = replicate(estimator, 600, 17)
    assert abs(batch.mean - 1.0) <= 4.0 * batch.stderr


def test_transformed_zero_integrand():
    B = build_general_poly_matrix(2)
    zero = Integrand(
        name="zero",
        dim=2,
        support=SupportBox.unit_cube(2),
        exact_integral=0.0,
        integral_provenance="closed-form",
        smoothness=("C0",),
        factor=lambda t: np.zeros_like(t),
    )
    for k in range(5):
        value, _ = transformed_estimate(3.0, B, zero, draw(21, k, 2))
        assert value == 0.0


def test_transformed_linear_1d_unbiased():
    B = build_general_poly_matrix(1)
    lin = Integrand(
        name="linear",
        dim=1,
        support=SupportBox.unit_cube(1),
        exact_integral=0.5,
        integral_provenance="closed-form",
        smoothness=("C0",),
        factor=lambda t: t,
    )

    def estimator(seed, k):
        return transformed_estimate(4.0, B, lin, draw(seed, k, 1))

    batch = replicate(estimator, 1000, 5)
    assert abs(batch.mean - 0.5) <= 4.0 * batch.stderr


def test_choose_a_plugin_arithmetic():
    B = build_general_poly_matrix(2)
    c1 = (B.one_norm + 1.0) ** 2
    n = int(2 * c1 * 4)
    assert choose_a_for_budget(n, B) == pytest.approx(2.0, rel=1e-12)


def test_choose_a_degenerate_budget_leaves_at_most_one_node():
    B = build_general_poly_matrix(2)
    one = _constant_one(2)
    c1 = (B.one_norm + 1.0) ** 2
    n = int(4 * c1) - 1
    a = choose_a_for_budget(n, B)
    for k in range(50):
        _, count = transformed_estimate(a, B, one, draw(3, k, 2))
        assert count <= 1


def test_choose_a_budget_guarantee_d2():
    B = build_general_poly_matrix(2)
    f = corpus_by_name(2)["product_sine"]
    n = 10**4
    a = choose_a_for_budget(n, B)
    for k in range(100):
        _, count = transformed_estimate(a, B, f, draw(8, k, 2))
        assert count <= n


def test_choose_a_rejects_bad_budget():
    B = build_general_poly_matrix(2)
    with pytest.raises(ValueError):
        choose_a_for_budget(0, B)


def test_bump_weight_endpoints_zero():
    assert bump_weight(np.array([0.0, 1.0, -0.5, 1.5])).tolist() == [0.0, 0.0, 0.0, 0.0]
    assert bump_weight(np.array([0.5]))[0] == pytest.approx(math.exp(-1.0), rel=1e-15)
