import cmath
import math
from fractions import Fraction

import pytest
import sympy

from conftest import poly, random_polynomial
from fan_manager import FanManager
from pair_metrics import PairManager
from power_data import FlatMarker, PowerData
from zeta_report import FAILS, HOLDS, UNKNOWN, HypothesisLedger, ZetaManager, all_verdict, any_verdict

SUM_OF_SQUARES = {(2, 0): 1, (0, 2): 1}


def test_candidate_poles_of_a_sum_of_squares():
    candidates = ZetaManager.candidate_poles(poly(2, SUM_OF_SQUARES))
    assert [(fam.base, fam.step, fam.ray) for fam in candidates.families] == [(-1, Fraction(1, 2), (1, 1))]
    assert candidates.values(4) == [-1, Fraction(-3, 2), -2, Fraction(-5, 2)]


def test_asymptotic_exponents_merge_the_negative_integers():
    exponents = ZetaManager.asymptotic_exponents(poly(2, SUM_OF_SQUARES), count=8)
    assert exponents == [Fraction(-k, 2) for k in range(2, 10)]


def test_leading_pole_with_integral_inverse_distance():
    lead = ZetaManager.leading_pole(poly(2, SUM_OF_SQUARES))
    assert lead.value == -1
    assert lead.multiplicity_cross_check == 1
    assert lead.order_bound == 2
    assert lead.achieving_rays == ((1, 1),)
    assert lead.weight_mode == "full"


def test_leading_pole_of_a_saddle_with_weight():
    lead = ZetaManager.leading_pole(PowerData.monomial((1, 1)), PowerData.monomial((0, 2)))
    assert lead.value == -1
    assert lead.order_bound == 2
    assert lead.achieving_rays == ((1, 0),)
    assert lead.monomial_point_check


def test_leading_pole_of_a_product_of_squares():
    lead = ZetaManager.leading_pole(PowerData.monomial((2, 2)))
    assert lead.value == Fraction(-1, 2)
    assert lead.order_bound == 2
    assert [sorted(c.achieving) for c in lead.principal_cones] == [[0, 1]]


def test_flat_weight_outside_the_class_is_flagged(first_example_weight):
    f = poly(2, {(4, 0): 1})
    g = first_example_weight(2, 1)
    lead = ZetaManager.leading_pole(f, g)
    assert lead.value == Fraction(-5, 4)
    assert lead.flat_marker_caveat
    fallback = ZetaManager.monomial_fallback(f, g)
    assert fallback.exponent == (2, 2)
    assert fallback.beta_bound == Fraction(-3, 4)
    verdict = ZetaManager.oscillation_index(f, g)
    assert verdict.fallback == fallback
    assert any("flat terms" in note for note in verdict.notes)


def test_only_flat_weight_uses_its_monomial_factor():
    f = poly(2, {(4, 0): 1})
    g = poly(2, {}, markers=[FlatMarker((2, 2), 1)])
    setup = ZetaManager.prepare(f, g)
    assert setup.weight_mode == "monomial"
    assert setup.pair.d == Fraction(4, 3)
    ledger = ZetaManager.hypothesis_ledger(f, g, setup)
    assert ledger.g_principal_sign == UNKNOWN
    assert ledger.weight_gate == FAILS


def test_convenient_phase_truncates_the_weight_levels():
    f = poly(2, SUM_OF_SQUARES)
    g = poly(2, {(1, 1): 1}, markers=[FlatMarker((0, 0), 1)])
    setup = ZetaManager.prepare(f, g)
    assert setup.weight_mode == "convenient"
    assert setup.weight_level((1, 0)) == 0
    assert setup.weight_level((1, 1)) == 2


def test_ledger_for_the_saddle_with_weight():
    ledger = ZetaManager.hypothesis_ledger(PowerData.monomial((1, 1)), PowerData.monomial((0, 2)))
    assert (ledger.e_condition, ledger.weight_gate, ledger.g_principal_sign) == (HOLDS, HOLDS, HOLDS)
    assert (ledger.d_gt_1, ledger.f_sign, ledger.inv_d_not_odd_and_ftau_nonvanishing) == (FAILS, FAILS, FAILS)
    assert ledger.gate_iv == FAILS
    assert ledger.status() == "PredictionOnly"


@pytest.mark.parametrize("verdicts, status", [
    ((HOLDS, HOLDS, HOLDS, FAILS, UNKNOWN, HOLDS), "ExactByThm44"),
    ((HOLDS, HOLDS, HOLDS, FAILS, UNKNOWN, FAILS), "UpperBoundByThm41"),
    ((HOLDS, HOLDS, UNKNOWN, HOLDS, HOLDS, HOLDS), "UpperBoundByThm41"),
    ((HOLDS, HOLDS, FAILS, HOLDS, HOLDS, HOLDS), "PredictionOnly"),
    ((UNKNOWN, HOLDS, HOLDS, HOLDS, HOLDS, HOLDS), "PredictionOnly"),
    ((HOLDS, FAILS, HOLDS, HOLDS, HOLDS, HOLDS), "PredictionOnly"),
])
def test_status_from_the_gates(verdicts, status):
    assert HypothesisLedger(*verdicts).status() == status


def test_three_valued_disjunction():
    assert any_verdict([FAILS, UNKNOWN, HOLDS]) == HOLDS
    assert any_verdict([FAILS, UNKNOWN]) == UNKNOWN
    assert any_verdict([FAILS, FAILS]) == FAILS


def test_three_valued_conjunction():
    assert all_verdict(HOLDS, HOLDS) == HOLDS
    assert all_verdict(HOLDS, UNKNOWN) == UNKNOWN
    assert all_verdict(UNKNOWN, FAILS) == FAILS


def test_nonvanishing_face_must_pair_with_a_one_signed_weight_face():
    # tau1 = x1^2 x2^2 - x1^6 pairs with the one-signed x1^6 x2^4 + x1^10 x2^2,
    # tau2 = x2^6 + x1^2 x2^2 pairs with the sign-changing x1^2 x2^10 - x1^4 x2^6
    f = poly(2, {(0, 6): 1, (2, 2): 1, (6, 0): -1})
    g = poly(2, {(2, 10): 1, (4, 6): -1, (6, 4): 1, (10, 2): 1})
    ledger = ZetaManager.hypothesis_ledger(f, g)
    assert ZetaManager.prepare(f, g).pair.d == Fraction(6, 17)
    assert ledger.g_principal_sign == HOLDS
    assert ledger.inv_d_not_odd_and_ftau_nonvanishing == FAILS
    assert ledger.gate_iv == FAILS
    assert ledger.status() == "PredictionOnly"


def test_one_signed_verdicts():
    assert ZetaManager.one_signed_verdict(poly(2, SUM_OF_SQUARES)) == HOLDS
    assert ZetaManager.one_signed_verdict(PowerData.monomial((1, 1))) == FAILS
    assert ZetaManager.one_signed_verdict(poly(2, {(2, 0): 1, (0, 4): -1})) == FAILS
    assert ZetaManager.one_signed_verdict(poly(2, {}, markers=[FlatMarker((0, 0), 1)])) == UNKNOWN


def test_fresnel_coefficient():
    verdict = ZetaManager.oscillation_index(PowerData.monomial((2,)))
    assert verdict.beta == Fraction(-1, 2)
    assert verdict.eta == 1
    assert verdict.status == "ExactByThm44"
    coefficient = verdict.coefficient
    assert coefficient.c_plus == pytest.approx(1.0)
    assert coefficient.c_minus == 0.0
    expected = math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4)
    assert coefficient.b == pytest.approx(expected, rel=1e-12)
    assert coefficient.re_b == pytest.approx(coefficient.b.real, rel=1e-12)
    assert coefficient.derivative_c_plus == pytest.approx(coefficient.c_plus, rel=1e-12)


def test_product_of_squares_coefficient_scales_with_the_amplitude():
    verdict = ZetaManager.oscillation_index(PowerData.monomial((2, 2)), phi0=0.25)
    assert (verdict.beta, verdict.eta) == (Fraction(-1, 2), 2)
    assert verdict.coefficient.c == pytest.approx(0.25)
    assert verdict.coefficient.rho == 2


def test_negative_phase_lands_in_the_minus_coefficient():
    verdict = ZetaManager.oscillation_index(PowerData.monomial((2,), -3))
    coefficient = verdict.coefficient
    assert coefficient.c_plus == 0.0
    assert coefficient.c_minus == pytest.approx(3 ** -0.5)
    assert coefficient.b == pytest.approx(math.sqrt(math.pi) * cmath.exp(-1j * math.pi / 4) * 3 ** -0.5)


def test_mellin_coefficient():
    b, re_b = ZetaManager.mellin_coefficient(1.0, 1.0, Fraction(1, 2), 1)
    assert b == pytest.approx(2 * math.sqrt(math.pi) * math.cos(math.pi / 4))
    assert re_b == pytest.approx(b.real)


def test_edge_principal_face_leaves_the_coefficient_to_quadrature():
    verdict = ZetaManager.oscillation_index(poly(2, SUM_OF_SQUARES))
    assert (verdict.beta, verdict.eta) == (-1, 1)
    assert verdict.status == "ExactByThm44"
    assert verdict.coefficient is None
    assert any("chart quadrature" in note for note in verdict.notes)


def test_puiseux_phase():
    f = poly(2, {(1, 0): 1, (0, 1): 1}, denom=(2, 2))
    setup = ZetaManager.prepare(f)
    assert setup.puiseux is not None
    assert setup.weight.coefficients == {(1, 1): 1}
    verdict = ZetaManager.oscillation_index(f)
    assert verdict.beta == -4
    assert verdict.coefficient is None


def test_pull_weight():
    assert ZetaManager.pull_weight(PowerData.monomial((1, 0)), (2, 1)).coefficients == {(3, 0): 1}


def test_negative_integer_orders():
    report = ZetaManager.negative_integer_orders(PowerData.monomial((2, 2)))
    assert report.orders == {-1: 1, -2: 1, -3: 1, -4: 1}
    assert report.reflection_signs == {-1: 1, -2: -1, -3: 1, -4: -1}
    assert ZetaManager.negative_integer_orders(PowerData.monomial((2,))).orders[-1] == 0


def test_elementary_oracle_all_axes_achieving():
    table = ZetaManager.elementary_pole_oracle((2, 2), (1, 1))
    assert table.leading == Fraction(-1, 2)
    assert table.order == 2
    assert table.coefficient == sympy.Rational(1, 4)


def test_elementary_oracle_integrates_the_other_axes():
    table = ZetaManager.elementary_pole_oracle((2, 1), (1, 1))
    assert table.leading == Fraction(-1, 2)
    assert table.order == 1
    assert table.achieving == (0,)
    assert table.coefficient == 1


def test_elementary_oracle_restricts_the_amplitude():
    y1, y2 = sympy.symbols("y1:3")
    table = ZetaManager.elementary_pole_oracle((1, 0), (1, 1), 3 + y1 + y2)
    assert table.leading == -1
    assert table.coefficient == sympy.Rational(7, 2)
    assert ZetaManager.elementary_pole_oracle((0, 0), (1, 1)).leading is None


def test_one_dimensional_residues():
    residues = ZetaManager.one_dimensional_residues("exp(y1)", 3)
    assert residues == [1, 1, sympy.Rational(1, 2)]


def test_leading_pole_is_independent_of_the_subdivision(rng):
    for _ in range(10):
        n = rng.choice([2, 3])
        f = random_polynomial(rng, n, max_terms=4, max_exp=5)
        g = random_polynomial(rng, n, max_terms=3, max_exp=3, allow_constant=True)
        setup = ZetaManager.prepare(f, g)
        other = FanManager.alternate_subdivision(setup.fan)
        first = ZetaManager.leading_pole(f, g)
        second = ZetaManager.leading_pole(f, g, fan=other)
        assert first.value == second.value == -1 / setup.pair.d
        assert first.order_bound == second.order_bound
        assert first.multiplicity_cross_check == second.multiplicity_cross_check == setup.pair.m


@pytest.mark.slow
def test_random_pairs_keep_the_invariants(rng):
    for _ in range(200):
        n = rng.choice([2, 3])
        f = random_polynomial(rng, n)
        g = random_polynomial(rng, n, allow_constant=True)
        setup = ZetaManager.prepare(f, g)
        first = ZetaManager.leading_pole(f, g)
        assert first.value == -1 / setup.pair.d
        assert first.multiplicity_cross_check == setup.pair.m
        second = ZetaManager.leading_pole(f, g, fan=FanManager.alternate_subdivision(setup.fan))
        assert (second.value, second.order_bound) == (first.value, first.order_bound)
        symmetry = PairManager.symmetry_check(f, g)
        assert symmetry.product >= 1
        assert symmetry.equality_case == (symmetry.scale is not None)
        if symmetry.equality_case:
            assert symmetry.eta_fg == symmetry.eta_gf == n


def model_zeta_coefficient(l, m, terms, leading, order):
    """lim (s - s*)^k of the sum over c * y^alpha of c * prod_j 1 / (l_j s + m_j + alpha_j)"""
    s = sympy.Symbol("s")
    s_star = sympy.Rational(leading.numerator, leading.denominator)
    total = sympy.Integer(0)
    for alpha, c in terms.items():
        term = sympy.Integer(c)
        for l_j, m_j, a_j in zip(l, m, alpha):
            term /= l_j * s + m_j + a_j
        total += term
    return sympy.cancel((s - s_star) ** order * total).subs(s, s_star)


def test_elementary_oracle_agrees_with_the_rational_function(rng):
    for _ in range(50):
        n = rng.choice([2, 3])
        l = [rng.randint(0, 4) for _ in range(n)]
        if not any(l):
            l[rng.randrange(n)] = rng.randint(1, 4)
        m = [rng.randint(1, 4) for _ in range(n)]
        ys = sympy.symbols(f"y1:{n + 1}")
        terms = {}
        for _ in range(rng.randint(1, 3)):
            terms[tuple(rng.randint(0, 2) for _ in range(n))] = rng.choice([-2, -1, 1, 2, 3])
        psi = sum(c * sympy.prod([y ** a for y, a in zip(ys, alpha)]) for alpha, c in terms.items())
        table = ZetaManager.elementary_pole_oracle(l, m, psi)
        leading = max(Fraction(-m_j, l_j) for l_j, m_j in zip(l, m) if l_j)
        assert table.leading == leading
        assert table.order == sum(1 for l_j, m_j in zip(l, m) if l_j and Fraction(-m_j, l_j) == leading)
        expected = model_zeta_coefficient(l, m, terms, leading, table.order)
        assert sympy.simplify(table.coefficient - expected) == 0
