"""Tail test curves and the exact relation search."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from interlace.curve import parse_curve
from interlace.errors import ExactnessRequiredError, OrderExceededError
from interlace.sat import (
    SatCurveSpec,
    build_sat_curve,
    monomial_exponents,
    relation_search,
    verify_tail_identities,
)
from interlace.series import (
    Poly,
    TruncatedSeries,
    compose,
    euler_series,
    float_mode,
    tail_T,
)


def P(*coeffs):
    return Poly.from_coeffs(coeffs)


def test_identity_polynomial_with_zero_tail_reproduces_the_series():
    e = euler_series(10)
    curve = build_sat_curve(SatCurveSpec((e,), (P(0, 1),), k=0, q=1))
    assert len(curve.components) == 2
    assert curve.components[0] == TruncatedSeries.identity(10)
    assert curve.components[1] == e


def test_tail_components_grouped_by_polynomial():
    e = euler_series(8)
    curve = build_sat_curve(SatCurveSpec((e,), (P(0, 1), P(0, 2)), k=1, q=1))
    t1e = tail_T(e, 1)  # x + 2x^2 + 6x^3 + ...
    order = curve.components[1].order
    assert curve.components[1] == t1e.truncated(order)
    assert curve.components[2] == compose(t1e.truncated(order), P(0, 2))
    assert t1e.coeffs[1:4] == (F(1), F(2), F(6))


def test_two_series_interleave_inner():
    a = TruncatedSeries.from_coeffs([0, 1], 6)
    b = TruncatedSeries.from_coeffs([0, 0, 1], 6)
    curve = build_sat_curve(SatCurveSpec((a, b), (P(0, 1), P(0, 3)), k=0, q=1))
    # layout: (x, a(P1), b(P1), a(P2), b(P2))
    assert len(curve.components) == 5
    assert curve.components[1] == a
    assert curve.components[3] == compose(a, P(0, 3))


def test_not_positive_polynomial_is_a_warning_not_an_error():
    spec = SatCurveSpec((euler_series(8),), (P(0, -1),), k=0, q=1)
    warnings = spec.warnings()
    assert any("not a positive" in w for w in warnings)
    curve = build_sat_curve(spec)
    assert len(curve.components) == 2


def test_duplicate_polynomials_warn():
    spec = SatCurveSpec((euler_series(6),), (P(0, 1), P(0, 1)), k=0, q=1)
    assert any("distinct" in w for w in spec.warnings())


def test_tail_exhaustion_errors():
    with pytest.raises(OrderExceededError):
        build_sat_curve(SatCurveSpec((euler_series(2),), (P(0, 1),), k=2, q=1))


# -- relation search ------------------------------------------------------------


def test_parabola_relation_found():
    curve = parse_curve("x, x^2", 12)
    basis = relation_search(curve, 2, 12)
    assert len(basis.basis) == 1
    terms = dict(basis.basis[0].terms)
    assert set(terms) == {(0, 1), (2, 0)}
    assert terms[(0, 1)] == -terms[(2, 0)]


def test_doubled_argument_curve_shows_no_low_degree_relation():
    curve = parse_curve("x, E(x), E(2*x)", 40)
    basis = relation_search(curve, 3, 40)
    assert basis.is_trivial
    assert basis.monomial_count == 20
    assert basis.evidence_margin == 20
    assert basis.transcendence_evidence


def test_single_series_curve_shows_no_degree_four_relation():
    curve = parse_curve("x, E(x)", 60)
    basis = relation_search(curve, 4, 60)
    assert basis.is_trivial
    assert basis.monomial_count == 15
    assert basis.transcendence_evidence


def test_float_curves_rejected():
    curve = parse_curve("x, x^2", 8, float_mode(96))
    with pytest.raises(ExactnessRequiredError):
        relation_search(curve, 2, 8)


def test_short_jet_is_flagged():
    curve = parse_curve("x, x^2", 4)
    basis = relation_search(curve, 3, 4)
    assert basis.warnings
    assert not basis.transcendence_evidence


def test_kernel_dimension_monotone_in_jet_and_degree():
    curve = parse_curve("x, x^2, x^3", 16)
    dims = {}
    for d in (1, 2, 3):
        for n in (4, 8, 16):
            dims[d, n] = len(relation_search(curve, d, n).basis)
    for d in (1, 2, 3):
        assert dims[d, 4] >= dims[d, 8] >= dims[d, 16]
    for n in (4, 8, 16):
        assert dims[1, n] <= dims[2, n] <= dims[3, n]


def test_every_relation_reverifies_to_zero_jet():
    curve = parse_curve("x, x^2, x^3", 18)
    basis = relation_search(curve, 3, 18)
    assert len(basis.basis) >= 2  # y2 - x^2 and z - x y, among others
    comps = curve.components
    for rel in basis.basis:
        acc = TruncatedSeries.zero(18)
        for exps, coeff in rel.terms:
            term = TruncatedSeries.constant(coeff, 18)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = term * comps[i]
            acc = acc + term
        assert acc.is_zero()


def test_monomial_enumeration_graded_and_complete():
    exps = monomial_exponents(2, 2)
    assert exps == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


# -- tail identities --------------------------------------------------------------


def test_tail_identities_for_euler_with_doubling():
    assert verify_tail_identities(euler_series(40), P(0, 2), k=3, order=40)


def test_tail_identities_with_identity_polynomial():
    assert verify_tail_identities(euler_series(20), P(0, 1), k=5, order=20)


def test_corrupted_tail_definition_is_caught():
    # simulate an off-by-one tail (divide by x^{k+1}): the identity must fail
    h = euler_series(20)
    k = 3
    lhs_bad = tail_T(h, k + 2)  # wrong tail index
    rhs = tail_T(tail_T(h, 1), k)
    n = min(lhs_bad.order, rhs.order)
    assert lhs_bad.truncated(n) != rhs.truncated(n)


def test_exchange_identity_bare_form_under_order_two_hypothesis():
    # with H'(0) = 0 the correction term vanishes and the bare identity holds
    h = TruncatedSeries.from_coeffs([0, 0, 1, 5, F(1, 3), 2], 14)
    p = P(0, F(1, 4), -4, -3)
    lhs = tail_T(compose(h, p.as_series(14)), 1)
    rhs = p.shift_down(1).as_series(lhs.order) * compose(tail_T(h, 1), p)
    n = min(lhs.order, rhs.order)
    assert lhs.truncated(n) == rhs.truncated(n)


def test_tail_identity_requires_vanishing_polynomial():
    with pytest.raises(ValueError):
        verify_tail_identities(euler_series(12), P(1, 1), k=1, order=12)


small_fraction = st.builds(F, st.integers(-6, 6), st.integers(1, 6))


@given(
    st.lists(small_fraction, min_size=1, max_size=10),
    st.lists(small_fraction, min_size=1, max_size=4),
    st.integers(0, 4),
)
@settings(max_examples=60, deadline=None)
def test_tail_identities_hold_for_random_series(h_coeffs, p_tail, k):
    h = TruncatedSeries.from_coeffs([F(0)] + h_coeffs, 14)
    p = Poly.from_coeffs([F(0)] + p_tail)
    if p.is_zero():
        p = Poly.from_coeffs([0, 1])
    assert verify_tail_identities(h, p, k=k, order=14)


def test_exchange_identity_on_seeded_random_batch():
    rng = random.Random(20240817)
    for _ in range(100):
        h = TruncatedSeries.from_coeffs(
            [0] + [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(12)], 12
        )
        p = Poly.from_coeffs(
            [0] + [F(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(3)]
        )
        if p.is_zero():
            p = Poly.from_coeffs([0, 1])
        assert verify_tail_identities(h, p, k=rng.randint(0, 5), order=12)
