"""Expression grammar: parse trees, printing stability, evaluation, substitution."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from interlace.errors import (
    EvaluationSingularityError,
    ExprSyntaxError,
    NonUnitDenominatorError,
    UnknownIdentifierError,
)
from interlace.expr import (
    BinOp,
    Call,
    Neg,
    Num,
    Pow,
    Var,
    evaluate,
    evaluate_mp,
    fold_constant,
    parse_expr,
    rename_vars,
    substitute_series,
    to_text,
    variables_of,
)
from interlace.series import EXACT, TruncatedSeries, euler_series

XYZ = ("x", "y", "z")


def test_product_with_power():
    assert parse_expr("2*x^2", XYZ) == BinOp("*", Num(F(2)), Pow(Var("x"), 2))


def test_rational_coefficient_quotient_tree():
    tree = parse_expr("(1+2*x)/(1+x)^2", XYZ)
    assert isinstance(tree, BinOp) and tree.op == "/"
    assert tree.lhs == BinOp("+", Num(F(1)), BinOp("*", Num(F(2)), Var("x")))
    assert tree.rhs == Pow(BinOp("+", Num(F(1)), Var("x")), 2)


def test_syntax_error_carries_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expr("x +", XYZ)
    assert err.value.offset == 3


def test_unknown_identifier_rejected():
    with pytest.raises(UnknownIdentifierError):
        parse_expr("x + w", XYZ)


def test_unary_minus_binds_below_power():
    assert parse_expr("-x^2", XYZ) == Neg(Pow(Var("x"), 2))


def test_integer_ratio_literal_folds():
    assert parse_expr("1/2", XYZ) == Num(F(1, 2))
    assert parse_expr("3/4*x", XYZ) == BinOp("*", Num(F(3, 4)), Var("x"))


def test_decimal_literals_are_exact():
    assert parse_expr("0.1", XYZ) == Num(F(1, 10))


def test_calls_only_with_permission():
    tree = parse_expr("E(2*t)", ("t",), allow_calls=True)
    assert tree == Call("E", BinOp("*", Num(F(2)), Var("t")))
    with pytest.raises(UnknownIdentifierError):
        parse_expr("E(2*x)", XYZ, allow_calls=False)


def test_evaluation_examples():
    assert evaluate(parse_expr("y - x", XYZ), {"x": 2.0, "y": 5.0, "z": 0.0}) == 3.0
    v = evaluate(parse_expr("(1+2*x)/(1+x)^2", XYZ), {"x": 1.0})
    assert v == 0.75


def test_evaluation_singularity_carries_subexpression():
    with pytest.raises(EvaluationSingularityError) as err:
        evaluate(parse_expr("1/x", XYZ), {"x": 0.0})
    assert "1/x" in str(err.value)


def test_bigfloat_evaluation_matches_floats_when_benign():
    tree = parse_expr("(y - x)/x^2", XYZ)
    env = {"x": 0.3, "y": 0.42}
    assert abs(float(evaluate_mp(tree, env)) - evaluate(tree, env)) < 1e-12


def test_constant_folding_detects_hidden_zero():
    assert fold_constant(parse_expr("2*(3-3)", XYZ)) == 0
    assert fold_constant(parse_expr("x-x", XYZ)) is None


def test_variable_renaming():
    tree = parse_expr("y + z*x", XYZ)
    renamed = rename_vars(tree, {"y": "y1", "z": "y2"})
    assert variables_of(renamed) == {"x", "y1", "y2"}


# -- print/parse stability ---------------------------------------------------


def _expr_strategy():
    atoms = st.one_of(
        st.builds(Num, st.builds(F, st.integers(0, 9), st.integers(1, 9))),
        st.sampled_from([Var("x"), Var("y"), Var("z")]),
    )

    def extend(children):
        return st.one_of(
            st.builds(Neg, children),
            st.builds(Pow, children, st.integers(-3, 3)),
            st.tuples(st.sampled_from("+-*/"), children, children).map(
                lambda t: BinOp(t[0], t[1], t[2])
            ),
        )

    return st.recursive(atoms, extend, max_leaves=12)


@given(_expr_strategy())
@settings(max_examples=120, deadline=None)
def test_print_parse_round_trip(tree):
    # print-then-parse reaches a normal form in one step and stays there
    # (rational literals like 0/1 fold at parse time, so arbitrary trees may
    # normalize once; parsed trees must round-trip exactly)
    text = to_text(tree)
    normal = parse_expr(text, XYZ)
    assert to_text(normal) == to_text(parse_expr(to_text(normal), XYZ))
    assert parse_expr(to_text(normal), XYZ) == normal


def test_parsed_trees_round_trip_exactly():
    for text in ("2*x^2", "(1+2*x)/(1+x)^2", "-x^2", "x - (y - z)",
                 "1/2*x + 3/4", "x*y*z - x/(y*z)", "-(x + y)^3"):
        tree = parse_expr(text, XYZ)
        assert parse_expr(to_text(tree), XYZ) == tree


# -- series substitution -------------------------------------------------------


def test_substitute_difference_along_curve():
    e = euler_series(6, var="t")
    t = TruncatedSeries.identity(6, var="t")
    got = substitute_series(parse_expr("y - x", XYZ), {"x": t, "y": e, "z": t})
    assert got == e - t


def test_substitute_rational_coefficient():
    t = TruncatedSeries.identity(5, var="t")
    got = substitute_series(parse_expr("(1+2*x)/(1+x)^2", XYZ), {"x": t})
    assert got == TruncatedSeries.from_coeffs([1, 0, -1, 2, -3, 4], 5, EXACT, "t")


def test_substitute_rejects_non_unit_denominator():
    t = TruncatedSeries.identity(5, var="t")
    with pytest.raises(NonUnitDenominatorError):
        substitute_series(parse_expr("1/y", XYZ), {"x": t, "y": t})


def test_substitute_negative_power():
    t = TruncatedSeries.identity(4, var="t")
    one_plus = TruncatedSeries.from_coeffs([1, 1], 4, EXACT, "t")
    got = substitute_series(parse_expr("(1+x)^-2", XYZ), {"x": t})
    by_division = substitute_series(parse_expr("1/(1+x)^2", XYZ), {"x": t})
    assert got == by_division
    assert (got * one_plus * one_plus) == TruncatedSeries.from_coeffs([1], 4, EXACT, "t")


def test_substitution_agrees_with_pointwise_evaluation():
    # low truncation order so the O(t^{N+1}) error is visible above float noise
    tree = parse_expr("(y - x)/(1 + x)", XYZ)
    order = 4
    e_full = euler_series(12, var="t")
    e = e_full.truncated(order)
    t = TruncatedSeries.identity(order, var="t")
    sub = substitute_series(tree, {"x": t, "y": e, "z": t})
    for tv in (0.05, 0.02):
        direct = evaluate(tree, {"x": tv, "y": float(e_full.eval(F(tv))), "z": tv})
        via_series = float(sub.eval(F(tv)))
        assert abs(direct - via_series) < 100 * tv ** (order + 1)
