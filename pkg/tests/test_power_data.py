from fractions import Fraction

import numpy as np
import pytest
import sympy

from conftest import poly
from errors import ArgumentOutOfRange, FaceNotOfThisPolyhedron, FlatFunction, InputFormatError
from power_data import FlatMarker, NewtonManager


def test_from_terms_drops_zero_coefficients_and_sorts():
    f = poly(2, {(0, 2): 3, (2, 0): 1, (1, 1): 0})
    assert f.terms == (((0, 2), Fraction(3)), ((2, 0), Fraction(1)))
    assert str(f) == "3*x2^2 + 1*x1^2"


@pytest.mark.parametrize("terms", [{(1, -1): 1}, {(1, 2, 3): 1}])
def test_bad_exponents(terms):
    with pytest.raises(InputFormatError):
        poly(2, terms)


def test_bad_marker_axis():
    with pytest.raises(InputFormatError):
        poly(2, {(1, 0): 1}, markers=[FlatMarker((0, 0), 2)])


def test_fractional_exponents_read_through_the_denominator_vector():
    f = poly(2, {(1, 0): 1, (0, 3): 1}, denom=(2, 3))
    assert f.exponents() == [(Fraction(0), Fraction(1)), (Fraction(1, 2), Fraction(0))]
    assert not f.is_polynomial
    assert f.evaluate(np.array([[4.0, 8.0]]))[0] == pytest.approx(2.0 + 8.0)


def test_flat_marker_is_invisible_to_the_polyhedron_but_evaluated():
    g = poly(2, {(2, 2): 1}, markers=[FlatMarker((4, 4), 1)])
    assert NewtonManager.newton_polyhedron(g) == NewtonManager.newton_polyhedron(g.nonflat())
    points = np.array([[0.5, 0.0], [0.5, 0.5]])
    values = g.evaluate(points)
    assert values[0] == 0.0
    assert values[1] == pytest.approx(0.5 ** 4 + 0.5 ** 8 * np.exp(-4.0))
    assert g.evaluate(points, include_flat=False)[1] == pytest.approx(0.5 ** 4)


def test_permuted_and_orthant():
    f = poly(2, {(3, 0): 1, (0, 1): 2}, markers=[FlatMarker((1, 0), 1)])
    swapped = f.permuted((1, 0))
    assert swapped.coefficients == {(0, 3): 1, (1, 0): 2}
    assert swapped.flat_markers == (FlatMarker((0, 1), 0),)
    reflected = f.orthant((-1, 1))
    assert reflected.coefficients == {(3, 0): -1, (0, 1): 2}
    assert reflected.flat_markers[0].scale == -1


def test_monomial_factor_includes_markers():
    g = poly(2, {(4, 2): 1, (3, 5): 1}, markers=[FlatMarker((1, 6), 1)])
    assert g.monomial_factor() == (1, 2)


def test_to_sympy():
    x1, x2 = sympy.symbols("x1:3")
    f = poly(2, {(2, 0): Fraction(1, 2), (0, 1): -1})
    assert sympy.simplify(f.to_sympy() - (x1 ** 2 / 2 - x2)) == 0


def test_flat_function_has_no_polyhedron():
    g = poly(2, {}, markers=[FlatMarker((2, 2), 1)])
    assert g.is_flat and NewtonManager.is_flat(g)
    with pytest.raises(FlatFunction):
        NewtonManager.newton_polyhedron(g)


def test_gamma_part_and_principal_part():
    f = poly(2, {(2, 0): 1, (0, 2): 1, (2, 2): 5})
    polyhedron = NewtonManager.newton_polyhedron(f)
    edge = next(face for face in polyhedron.compact_faces() if face.dim == 1)
    assert NewtonManager.gamma_part(f, edge).data.coefficients == {(2, 0): 1, (0, 2): 1}
    assert NewtonManager.principal_part(f).coefficients == {(2, 0): 1, (0, 2): 1}
    other = NewtonManager.newton_polyhedron(poly(2, {(1, 1): 1}))
    with pytest.raises(FaceNotOfThisPolyhedron):
        NewtonManager.gamma_part(f, other.whole)


def test_convenience():
    assert NewtonManager.is_convenient(poly(2, {(2, 0): 1, (0, 3): 1}))
    assert not NewtonManager.is_convenient(poly(2, {(1, 1): 1}))
    assert not NewtonManager.is_convenient(poly(2, {}, markers=[FlatMarker((0, 0), 0)]))


@pytest.mark.parametrize("p, q, c, expected", [
    (1, 2, 1, True),
    (2, 2, 1, True),
    (2, 1, 1, False),
    (1, 2, 0, False),
])
def test_hat_e_for_a_two_variable_flat_weight(first_example_weight, p, q, c, expected):
    assert NewtonManager.is_hat_e(first_example_weight(p, q, c)) is expected


@pytest.mark.parametrize("p, expected", [(0, False), (1, False), (2, True), (3, True)])
def test_hat_e_for_a_flat_term_in_the_third_variable(p, expected):
    g = poly(3, {(2, 0, 0): 1}, markers=[FlatMarker((p, 1, 0), 2)])
    assert NewtonManager.is_hat_e(g) is expected


def test_hat_e_fails_when_the_marker_undercuts_a_monomial():
    g = poly(3, {(4, 4, 2): 1}, markers=[FlatMarker((2, 2, 4), 2)])
    assert not NewtonManager.is_hat_e(g)


def test_monomial_times_shifts_terms_and_markers():
    f = poly(2, {(2, 0): 1, (0, 2): 1}, markers=[FlatMarker((0, 0), 1)])
    shifted = NewtonManager.monomial_times(f, (1, 1))
    assert shifted.coefficients == {(3, 1): 1, (1, 3): 1}
    assert shifted.flat_markers == (FlatMarker((1, 1), 1),)


def test_nondegenerate_sum_of_squares():
    certificate = NewtonManager.nondegeneracy_certificate(poly(2, {(2, 0): 1, (0, 2): 1}))
    assert certificate.verdict == "Nondegenerate"
    assert certificate.method == "Exact2D"


def test_degenerate_square_of_a_difference():
    certificate = NewtonManager.nondegeneracy_certificate(poly(2, {(2, 0): 1, (1, 1): -2, (0, 2): 1}))
    assert certificate.verdict == "Degenerate"
    x1, x2 = certificate.witness
    assert x1 == pytest.approx(x2)


def test_constant_term_counts_as_degenerate():
    assert NewtonManager.nondegeneracy_certificate(poly(2, {(0, 0): 1, (1, 0): 1})).verdict == "Degenerate"


def test_three_variable_faces_are_sampled():
    f = poly(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    certificate = NewtonManager.nondegeneracy_certificate(f)
    assert certificate.verdict == "Unknown"
    assert certificate.method == "Sampling"


def test_three_variable_critical_point_is_found():
    # (x1 - x2)^2 + x3^2 is degenerate on its two-dimensional face
    f = poly(3, {(2, 0, 0): 1, (1, 1, 0): -2, (0, 2, 0): 1, (0, 0, 2): 1})
    assert NewtonManager.nondegeneracy_certificate(f).verdict == "Degenerate"


def test_real_roots_off_zero():
    u = sympy.Symbol('u')
    assert NewtonManager.real_roots_off_zero(sympy.Poly(u ** 2 - 1, u)) == 2
    assert NewtonManager.real_roots_off_zero(sympy.Poly(u ** 2 + 1, u)) == 0
    assert NewtonManager.real_roots_off_zero(sympy.Poly(u * (u - 2), u)) == 1
    assert NewtonManager.real_roots_off_zero(sympy.Poly(u ** 3, u)) == 0


@pytest.mark.parametrize("terms, expected", [
    ({(2, 0): 1, (0, 2): 1}, "Holds"),
    ({(2, 0): 1, (0, 2): -1}, "Fails"),
    ({(2, 2): 3}, "Holds"),
    ({(3, 0): 1, (0, 3): 1}, "Fails"),
])
def test_nonvanishing_verdict(terms, expected):
    assert NewtonManager.nonvanishing_verdict(poly(2, terms)) == expected


def test_even_same_sign():
    assert NewtonManager.even_same_sign(poly(2, {(2, 0): 1, (0, 4): 2}))
    assert not NewtonManager.even_same_sign(poly(2, {(2, 0): 1, (0, 4): -2}))
    assert not NewtonManager.even_same_sign(poly(2, {(1, 0): 1}))


def test_product_support():
    product = NewtonManager.product_support(poly(2, {(1, 0): 1, (0, 1): 1}), poly(2, {(1, 0): 1, (0, 1): -1}))
    assert product.coefficients == {(2, 0): 1, (0, 2): -1}
    with pytest.raises(ArgumentOutOfRange):
        NewtonManager.product_support()
    with pytest.raises(ArgumentOutOfRange):
        NewtonManager.product_support(poly(2, {(1, 0): 1}), poly(3, {(1, 0, 0): 1}))


def test_edges_in_three_variables_are_decided_exactly():
    certificate = NewtonManager.nondegeneracy_certificate(poly(3, {(4, 0, 0): 1, (0, 4, 0): 1}))
    assert certificate.verdict == "Nondegenerate"
    assert certificate.method == "ExactLowDim"
