import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pompeiu_lab.expr import (Binary, Const, DomainError, ParseError, Param, Unary,
                              UnboundParameterError, Var, boggio_deviation, compile_expr,
                              differentiate, evaluate, parameters, parse, pompeiu_deviation,
                              to_text)

from corpus import ENV, EXPRESSIONS, interior_points


def test_parse_tree_shape():
    e = parse("x^2 - 4*x + 4")
    assert e == Binary("add", Binary("sub", Binary("pow", Var(), Const(2.0)),
                                     Binary("mul", Const(4.0), Var())), Const(4.0))
    assert evaluate(e, 0) == 4


def test_power_is_right_associative_and_binds_tighter_than_neg():
    assert evaluate("2^3^2", 0) == 512
    assert evaluate("-x^2", 3) == -9
    assert evaluate("2^-1", 0) == 0.5


@pytest.mark.parametrize("text, x, env, want", [
    ("c*x - 1", 1, {"c": 3}, 2),
    ("x^2-4*x+4", 0.5, None, 2.25),
    ("ln(x)", 1, None, 0.0),
    ("abs(x)", -3, None, 3),
    ("pi", 0, None, math.pi),
    ("sign(x)", 0, None, 0.0),
])
def test_evaluate_examples(text, x, env, want):
    assert evaluate(text, x, env) == pytest.approx(want, abs=0, rel=1e-15)


@pytest.mark.parametrize("text, x", [("1/x", 0), ("ln(x)", 0), ("ln(x)", -1),
                                     ("sqrt(x)", -1), ("x^0.5", -2), ("x^-1", 0)])
def test_domain_errors(text, x):
    with pytest.raises(DomainError):
        evaluate(text, x)


def test_nonstrict_gives_nan():
    v = evaluate("1/x", np.array([0.0, 2.0]), strict=False)
    assert math.isnan(v[0]) and v[1] == 0.5


@pytest.mark.parametrize("text, offset", [("2*", 2), ("x +* 1", 3), ("foo(x)", 0),
                                          ("(x", 2), ("x)", 1), ("3 $ x", 2)])
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.offset == offset


def test_unbound_parameter():
    with pytest.raises(UnboundParameterError):
        evaluate("c*x", 1.0)
    with pytest.raises(UnboundParameterError):
        compile_expr("c*x + d", {"c": 1})
    assert parameters(parse("c*x + d*sin(e)")) == {"c", "d", "e"}


def test_vectorized_constant_broadcasts():
    f = compile_expr("3")
    assert f(np.zeros(5)).shape == (5,)


@pytest.mark.parametrize("text, want", [("x^2-4*x+4", "2*x - 4"), ("c*x - 1", "c")])
def test_derivative_examples(text, want):
    xs = np.linspace(-2, 3, 11)
    env = {"c": 2.5}
    got = evaluate(differentiate(text), xs, env)
    assert np.allclose(got, evaluate(want, xs, env), rtol=1e-15, atol=1e-15)


def test_ln_derivative_at_two():
    assert evaluate(differentiate("ln(x)"), 2.0) == 0.5


def test_abs_derivative_uses_sign():
    d = differentiate("abs(x)")
    assert evaluate(d, np.array([-1.0, 0.0, 2.0])).tolist() == [-1.0, 0.0, 1.0]
    assert evaluate(parse(to_text(d)), 0.0) == 0.0


def test_pompeiu_deviation_examples():
    xs = np.linspace(0.3, 4, 9)
    assert np.all(evaluate(pompeiu_deviation("c*x - 1"), xs, {"c": 3.3}) == -1)
    assert np.all(evaluate(pompeiu_deviation("x"), xs) == 0)
    assert np.allclose(evaluate(pompeiu_deviation("x^2"), xs), -xs ** 2, rtol=1e-15)


def test_boggio_deviation_examples():
    xs = np.linspace(-1, 1, 9)
    h = "x^2-4*x+4"
    assert np.allclose(evaluate(boggio_deviation(h, h), xs), 0, atol=1e-15)
    # h - x h' = x^2 - 4x + 4 - x(2x - 4) = 4 - x^2
    assert np.allclose(evaluate(boggio_deviation("x", h), xs), 4 - xs ** 2, rtol=1e-14)


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_boggio_with_identity_is_minus_pompeiu(text):
    xs = np.linspace(0.5, 2.5, 64)
    b = evaluate(boggio_deviation(text, "x"), xs, ENV)
    p = evaluate(pompeiu_deviation(text), xs, ENV)
    assert np.allclose(b, -p, rtol=1e-14, atol=1e-14)


def central_difference(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2 * h)


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_derivative_matches_central_difference(text):
    xs = interior_points()
    fn = compile_expr(text, ENV)
    d = compile_expr(differentiate(text), ENV)(xs)
    fd = central_difference(fn, xs)
    assert np.all(np.abs(d - fd) <= 1e-6 * (1 + np.abs(d)))


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_corpus_round_trip(text):
    e = parse(text)
    assert parse(to_text(e)) == e


# random trees ------------------------------------------------------------

leaves = st.one_of(
    st.just(Var()),
    st.sampled_from([Param("c"), Param("d")]),
    st.floats(-50, 50, allow_nan=False).map(Const),
    st.integers(-5, 5).map(lambda k: Const(float(k))),
)


def extend(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["neg", "abs", "exp", "ln", "sin", "cos",
                                          "sqrt", "sign"]), children),
        st.builds(Binary, st.sampled_from(["add", "sub", "mul", "div", "pow"]),
                  children, children),
    )


trees = st.recursive(leaves, extend, max_leaves=12)
points = np.random.default_rng(7).uniform(-3, 3, 32)


@given(trees)
def test_random_tree_round_trip(e):
    back = parse(to_text(e))
    env = {"c": 0.75, "d": -1.5}
    v1 = evaluate(e, points, env, strict=False)
    v2 = evaluate(back, points, env, strict=False)
    assert np.array_equal(v1, v2, equal_nan=True)


@given(st.floats(0.6, 2.4), st.sampled_from(EXPRESSIONS))
def test_derivative_property(x, text):
    fn = compile_expr(text, ENV)
    if "abs" in text and abs(x - 1.37) < 1e-4:
        return
    d = float(compile_expr(differentiate(text), ENV)(np.array([x]))[0])
    fd = float(central_difference(fn, np.array([x]))[0])
    assert abs(d - fd) <= 1e-6 * (1 + abs(d))
