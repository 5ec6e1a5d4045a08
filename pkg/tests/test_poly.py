import math
from itertools import permutations

import numpy as np
import pytest

from cylattice import (
    ExpAffine,
    MultiPoly,
    PolynomialFunction,
    SymmetricForm,
    derivative_form,
    homogeneous_indices,
    multi_indices,
    polarize,
    substitute,
    taylor,
    vandermonde,
)
from cylattice import ChungYaoLattice
from helpers import (
    brute_force_vandermonde_3x3,
    finite_difference_directional,
    random_poly_coeffs,
    spread_family,
)


def test_index_enumeration_counts():
    for n_dim in (1, 2, 3, 4):
        for d in (0, 1, 3, 5):
            assert len(multi_indices(n_dim, d)) == math.comb(n_dim + d, d)
            assert len(homogeneous_indices(n_dim, d)) == math.comb(n_dim + d - 1, d)


def test_index_order_is_strictly_graded():
    idx = multi_indices(3, 4)
    keys = [(sum(a), a) for a in idx]
    assert keys == sorted(keys)
    assert len(set(idx)) == len(idx)


def test_multipoly_evaluation_and_arithmetic():
    p = MultiPoly(2, 2, {(0, 0): 1.0, (1, 0): -2.0, (0, 2): 3.0})
    assert p.evaluate([0.5, 2.0]) == pytest.approx(1.0 - 1.0 + 12.0)
    q = MultiPoly.affine([1.0, 1.0], 1.0)  # x1 + x2 - 1
    prod = p * q
    x = np.array([0.3, -0.7])
    assert prod.evaluate(x) == pytest.approx(p.evaluate(x) * q.evaluate(x), rel=1e-14)
    assert (p + q).evaluate(x) == pytest.approx(p.evaluate(x) + q.evaluate(x), rel=1e-14)
    assert (p - 2.5 * q).evaluate(x) == pytest.approx(p.evaluate(x) - 2.5 * q.evaluate(x), rel=1e-13)


def test_multipoly_directional_matches_finite_differences():
    rng = np.random.default_rng(31)
    p = MultiPoly(3, 3, random_poly_coeffs(rng, multi_indices(3, 3)))
    f = PolynomialFunction(p)
    x = rng.uniform(-1, 1, 3)
    v, w = rng.uniform(-1, 1, (2, 3))
    exact = f.directional_derivative(x, [v, w])
    approx = finite_difference_directional(lambda z: p.evaluate(z), x, [v, w], h=1e-4)
    assert exact == pytest.approx(approx, abs=1e-6)


def test_substitute_composes_polynomials():
    rng = np.random.default_rng(37)
    p = MultiPoly(2, 3, random_poly_coeffs(rng, multi_indices(2, 3)))
    r1 = MultiPoly(2, 1, {(0, 0): 0.5, (1, 0): 1.0, (0, 1): -1.0})
    r2 = MultiPoly(2, 1, {(0, 0): -0.2, (1, 0): 2.0})
    q = substitute(p, [r1, r2])
    y = rng.uniform(-1, 1, 2)
    assert q.evaluate(y) == pytest.approx(
        p.evaluate([r1.evaluate(y), r2.evaluate(y)]), rel=1e-12)


def test_taylor_of_exponential_order_one():
    t = taylor(ExpAffine([1.0, 1.0]), [0.0, 0.0], 1)
    assert t.coefficient((0, 0)) == pytest.approx(1.0)
    assert t.coefficient((1, 0)) == pytest.approx(1.0)
    assert t.coefficient((0, 1)) == pytest.approx(1.0)


def test_taylor_fixes_polynomials():
    rng = np.random.default_rng(41)
    for n_dim, d in [(2, 3), (3, 2)]:
        p = MultiPoly(n_dim, d, random_poly_coeffs(rng, multi_indices(n_dim, d)))
        f = PolynomialFunction(p)
        center = rng.uniform(-0.5, 0.5, n_dim)
        t = taylor(f, center, d)
        assert t.coeff_distance(p) <= 1e-12 * max(1.0, p.max_abs_coeff())


def test_taylor_truncates_higher_degree():
    t = taylor(PolynomialFunction.monomial(2, (2, 0)), [0.0, 0.0], 1)
    assert t.is_zero()


def test_taylor_is_idempotent():
    rng = np.random.default_rng(43)
    f = ExpAffine([1.0, -0.5])
    t1 = taylor(f, [0.0, 0.0], 3)
    t2 = taylor(PolynomialFunction(t1), [0.0, 0.0], 3)
    assert t1.coeff_distance(t2) <= 1e-12


def test_vandermonde_unit_triangle():
    points = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    basis = [MultiPoly.monomial(2, a) for a in [(0, 0), (1, 0), (0, 1)]]
    value = vandermonde(points, basis)
    assert value == pytest.approx(1.0)
    assert value == pytest.approx(brute_force_vandermonde_3x3(points))


def test_vandermonde_repeated_point_vanishes():
    points = [(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)]
    basis = [MultiPoly.monomial(2, a) for a in [(0, 0), (1, 0), (0, 1)]]
    assert vandermonde(points, basis) == pytest.approx(0.0, abs=1e-14)


def test_vandermonde_antisymmetric_under_swap():
    rng = np.random.default_rng(47)
    points = [rng.uniform(-1, 1, 2) for _ in range(3)]
    basis = [MultiPoly.monomial(2, a) for a in [(0, 0), (1, 0), (0, 1)]]
    v1 = vandermonde(points, basis)
    v2 = vandermonde([points[1], points[0], points[2]], basis)
    assert v2 == pytest.approx(-v1, rel=1e-12)


def test_vandermonde_size_mismatch():
    with pytest.raises(ValueError):
        vandermonde([(0.0, 0.0)], [MultiPoly.monomial(2, (0, 0)),
                                   MultiPoly.monomial(2, (1, 0))])


def test_vandermonde_direction_set_nonzero():
    # the n_K set of a lattice is unisolvent for homogeneous degree d-N+1
    rng = np.random.default_rng(53)
    family = spread_family(rng, 2, 3)
    lines = ChungYaoLattice(family).line_subsets()
    basis = [MultiPoly.monomial(2, a) for a in homogeneous_indices(2, 2)]
    assert abs(vandermonde([l.direction for l in lines], basis)) > 1e-8


def test_polarize_examples():
    assert polarize(MultiPoly.monomial(2, (2, 0)), [(1, 0), (1, 0)]) == pytest.approx(1.0)
    assert polarize(MultiPoly.monomial(2, (1, 1)), [(1, 0), (0, 1)]) == pytest.approx(0.5)


def test_polarize_rejects_inhomogeneous():
    p = MultiPoly(2, 2, {(0, 0): 1.0, (2, 0): 1.0})
    with pytest.raises(ValueError):
        polarize(p, [(1, 0), (0, 1)])


def test_polarize_symmetry_and_diagonal():
    rng = np.random.default_rng(59)
    m = 3
    p = MultiPoly(2, m, random_poly_coeffs(rng, homogeneous_indices(2, m)))
    vectors = [rng.uniform(-1, 1, 2) for _ in range(m)]
    base = polarize(p, vectors)
    for perm in permutations(range(m)):
        assert polarize(p, [vectors[i] for i in perm]) == pytest.approx(base, abs=1e-14)
    v = rng.uniform(-1, 1, 2)
    diag = polarize(p, [v] * m)
    assert diag == pytest.approx(p.evaluate(v), rel=1e-12, abs=1e-12)


def test_symmetric_form_multilinearity():
    rng = np.random.default_rng(61)
    m = 3
    p = MultiPoly(3, m, random_poly_coeffs(rng, homogeneous_indices(3, m)))
    phi = SymmetricForm(m, 3, p)
    u, w, z, extra = rng.uniform(-1, 1, (4, 3))
    a, b = 0.7, -1.3
    left = phi(a * u + b * extra, w, z)
    right = a * phi(u, w, z) + b * phi(extra, w, z)
    assert left == pytest.approx(right, rel=1e-12, abs=1e-12)


def test_derivative_form_examples():
    # second derivative of x1^2 is the constant form 2 v1 w1
    phi = derivative_form(PolynomialFunction.monomial(2, (2, 0)), [0.4, -0.3], 2)
    assert phi((1, 0), (1, 0)) == pytest.approx(2.0)
    assert phi((0, 1), (0, 1)) == pytest.approx(0.0, abs=1e-15)

    # first derivative of a linear form is the form itself
    c = np.array([1.5, -2.0])
    f_lin = PolynomialFunction(MultiPoly.linear(c))
    for a in ([0.0, 0.0], [3.0, -1.0]):
        phi = derivative_form(f_lin, a, 1)
        v = np.array([0.3, 0.9])
        assert phi(v) == pytest.approx(float(c @ v))

    # third derivative of exp(<c, x>) at 0 on the diagonal is <c, v>^3
    c = np.array([0.8, -1.1])
    phi = derivative_form(ExpAffine(c), [0.0, 0.0], 3)
    v = np.array([0.4, 0.7])
    assert phi(v, v, v) == pytest.approx(float(c @ v) ** 3, rel=1e-12)
