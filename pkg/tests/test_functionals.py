import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sci

from pompeiu_lab import functionals as fn
from pompeiu_lab.expr import compile_expr
from pompeiu_lab.functionals import PreconditionError, means
from pompeiu_lab.quad import Interval
from pompeiu_lab.verify import random_interval, random_smooth

LN2 = math.log(2)
I12 = Interval(1, 2)
I01 = Interval(0, 1)


def quad(f, a, b):
    return sci.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


# Chebyshev and P ---------------------------------------------------------

def test_T_examples():
    assert fn.chebyshev_T("1", "1", I12).value == pytest.approx(0, abs=1e-15)
    assert fn.chebyshev_T("x", "x", I01).value == pytest.approx(1 / 12, rel=1e-13)
    assert fn.chebyshev_T("x", "-x", I01).value == pytest.approx(-1 / 12, rel=1e-13)


def test_P_examples():
    assert fn.pompeiu_P("x", "x", I12) == pytest.approx(0, abs=1e-13)
    assert fn.pompeiu_P("1", "1", I12) == pytest.approx(1 / 28, rel=1e-13)
    with pytest.raises(PreconditionError):
        fn.pompeiu_P("1", "1", Interval(0, 1))


@pytest.mark.parametrize("c", [0.1, 1.0, 3.0, -2.5])
def test_Phat_linear_family(c):
    v = fn.pompeiu_Phat("c*x - 1", "c*x - 1", I12, {"c": c})
    assert v.product_form == pytest.approx(1 / 12, rel=1e-12)
    assert v.double_form == pytest.approx(1 / 12, rel=1e-9)


def test_Phat_examples():
    assert fn.pompeiu_Phat("x", "x", I12).product_form == pytest.approx(0, abs=1e-13)
    assert fn.pompeiu_Phat("1", "1", I12).product_form == pytest.approx(1 / 12, rel=1e-13)


def test_Phat_against_scipy():
    f, g = "exp(-x)*sin(3*x)", "ln(x) + x^2"
    iv = Interval(0.7, 2.9)
    fa, ga = compile_expr(f), compile_expr(g)
    a, b = iv.a, iv.b
    ref = ((b ** 3 - a ** 3) / 3 * quad(lambda x: fa(x) * ga(x), a, b)
           - quad(lambda x: x * fa(x), a, b) * quad(lambda x: x * ga(x), a, b))
    v = fn.pompeiu_Phat(f, g, iv)
    assert v.product_form == pytest.approx(ref, rel=1e-10)
    assert v.identity_holds()


def test_Phat_h_examples():
    f, g = "sin(x)", "x^2 + 1"
    iv = Interval(0.5, 3)
    t = fn.chebyshev_T(f, g, iv).value
    p1 = fn.general_Phat_h(f, g, "1", iv).product_form
    # T is normalized, so the constant-h functional is (b - a)^2 T
    assert p1 == pytest.approx(iv.length ** 2 * t, rel=1e-11)
    assert fn.general_Phat_h("exp(x)", g, "exp(x)", iv).product_form == \
        pytest.approx(0, abs=1e-10)


def test_weighted_examples():
    f, g, h = "sin(x)", "cos(2*x)", "x + 1"
    iv = Interval(0.5, 2)
    plain = fn.general_Phat_h(f, g, h, iv).product_form
    assert fn.weighted_Phat_h(f, g, h, "1", iv).product_form == pytest.approx(plain, rel=1e-13)
    assert fn.weighted_Phat_h(h, g, h, "x", iv).product_form == pytest.approx(0, abs=1e-12)
    # int x * int x^3 - (int x^2)^2 = 45/8 - 49/9
    v = fn.weighted_Phat_h("x", "x", "1", "x", I12)
    assert v.product_form == pytest.approx(13 / 72, rel=1e-13)
    assert v.double_form == pytest.approx(13 / 72, rel=1e-9)


def test_weight_must_be_positive():
    with pytest.raises(PreconditionError):
        fn.weighted_Phat_h("x", "x", "1", "x - 1.5", I12)


def test_andreief_substitution_reduces_to_phat_h():
    f, g, h = "exp(x/2)", "1/(1 + x)", "x^2"
    iv = Interval(0.5, 1.5)
    a = fn.andreief(h, h, f, g, iv)
    p = fn.general_Phat_h(f, g, h, iv)
    assert a.product_form == pytest.approx(p.product_form, rel=1e-12)
    assert a.double_form == pytest.approx(p.double_form, rel=1e-9)


# Hardy type ---------------------------------------------------------------

def test_prefix_integral_against_scipy():
    iv = Interval(0.5, 3)
    F = fn.prefix_integral("exp(sin(x))*x", iv)
    xs = np.array([0.5, 0.50001, 0.9, 1.7321, 2.999, 3.0])
    ref = [quad(lambda t: math.exp(math.sin(t)) * t, 0.5, x) for x in xs]
    assert np.allclose(F(xs), ref, rtol=1e-12, atol=1e-14)


def test_hardy_H_examples():
    assert fn.hardy_H("1", I12) == pytest.approx((1 - LN2) - LN2 / 2, abs=1e-12)
    assert fn.hardy_H("0", I12) == 0
    with pytest.raises(PreconditionError):
        fn.hardy_H("1", Interval(0, 1))


def test_hardy_H_sign_for_positive_phi():
    # F increasing and 1/t decreasing: the functional is non-positive
    for phi in ("1", "x^2", "exp(-x)", "1 + sin(x)"):
        assert fn.hardy_H(phi, Interval(0.5, 3.5)) <= 1e-12


def test_hardy_Hp_examples():
    # F = t - 1: int (1 - 1/t)^2 - (1/2) int (t - 1)^2 = 3/2 - 2 ln 2 - 1/6
    assert fn.hardy_Hp("1", 2, I12) == pytest.approx(4 / 3 - 2 * LN2, abs=1e-12)
    assert fn.hardy_Hp("0", 2.5, I12) == 0
    with pytest.raises(PreconditionError):
        fn.hardy_Hp("1", 1, I12)
    with pytest.raises(PreconditionError):
        fn.hardy_Hp("x - 1.5", 2, I12)


def test_hardy_Hp_against_scipy():
    iv, p = Interval(0.8, 2.2), 2.7
    phi = lambda t: 1 + math.cos(t) ** 2
    F = lambda x: quad(phi, iv.a, x)
    a, b = iv.a, iv.b
    ref = (iv.length * quad(lambda t: (F(t) / t) ** p, a, b)
           - quad(lambda t: t ** -p, a, b) * quad(lambda t: F(t) ** p, a, b))
    assert fn.hardy_Hp("1 + cos(x)^2", p, iv) == pytest.approx(ref, rel=1e-9)


def test_hardy_H_h_examples():
    phi = "x*exp(-x)"
    iv = Interval(1.5, 4)
    assert fn.hardy_H_h(phi, "1", iv) == pytest.approx(fn.hardy_H(phi, iv), rel=1e-12)
    assert fn.hardy_H_h("0", "x", iv) == 0
    # h = x, F = t - 1: (7/3)(1 - ln 2) - (5/6)(1)
    assert fn.hardy_H_h("1", "x", I12) == pytest.approx(7 / 3 * (1 - LN2) - 5 / 6, abs=1e-12)


def test_hardy_phi_functional_examples():
    assert fn.hardy_phi_functional("2.5", 0, 3) == pytest.approx(0, abs=1e-13)
    assert fn.hardy_phi_functional("0", 0, 3) == 0
    assert fn.hardy_phi_functional("x", 0, 1) == pytest.approx(1 / 48, rel=1e-10)
    with pytest.raises(PreconditionError):
        fn.hardy_phi_functional("x", -1, 1)


def test_cesaro_mean_near_left_endpoint():
    m = fn.CesaroMean("exp(x)", Interval(0, 1))
    for d in (0.0, 1e-12, 1e-9, 1e-6, 1e-3, 0.5):
        want = math.expm1(d) / d if d else 1.0
        # below 1e-8 the limit phi(a) is used, which is off by about d phi'(a)/2
        assert m(d) == pytest.approx(want, rel=max(1e-12, d))
        dwant = (math.exp(d) - want) / d if d > 1e-4 else 0.5 + d / 3
        assert m.derivative(d) == pytest.approx(dwant, rel=1e-6)


def test_ramified_closed_forms():
    r = fn.ramified_fprime_closed_forms("x", I12)
    assert r.recip_closed == pytest.approx(1 - 1.5 * LN2, rel=1e-13)
    assert r.self_closed == pytest.approx(7 / 3 - 9 / 4, rel=1e-12)
    assert r.self_as_printed == pytest.approx(0.75, rel=1e-13)
    assert r.consistent()
    with pytest.raises(PreconditionError):
        fn.ramified_fprime_closed_forms("2", I12)
    with pytest.raises(PreconditionError):
        fn.ramified_fprime_closed_forms("x - 1.5", I12)


@pytest.mark.parametrize("f", ["exp(x)", "x^2 + 1", "ln(x) + 2", "1/x"])
def test_ramified_forms_consistent(f):
    assert fn.ramified_fprime_closed_forms(f, Interval(0.6, 2.1)).consistent()


# means ----------------------------------------------------------------------

def test_means():
    m = means(1, 2)
    assert m.L == pytest.approx(1 / LN2, rel=1e-15)
    assert means(1, 3).A == 2
    assert means(2.5, 2.5 + 1e-8).L == pytest.approx(2.5, rel=1e-8)
    assert means(2.5, 2.5).L == 2.5
    with pytest.raises(ValueError):
        m.L_s(0)
    with pytest.raises(ValueError):
        m.L_s(-1)
    with pytest.raises(ValueError):
        means(2, 1)


@pytest.mark.parametrize("s", [-3, -0.5, 0.5, 1, 2, 4.5])
def test_generalized_log_mean(s):
    a, b = 0.7, 3.1
    want = ((b ** (s + 1) - a ** (s + 1)) / ((s + 1) * (b - a))) ** (1 / s)
    assert means(a, b).L_s(s) == pytest.approx(want, rel=1e-13)
    assert a < means(a, b).L_s(s) < b


@pytest.mark.parametrize("p", [1.5, 2, 3.5])
def test_hardy_mean_formula(p):
    a, b = 0.7, 3.1
    want = ((b ** (p - 1) - a ** (p - 1)) / ((p - 1) * (b - a))) ** (1 / p)
    assert means(a, b).L_hardy(p) == pytest.approx(want, rel=1e-13)


# properties -----------------------------------------------------------------

seeds = st.integers(0, 2 ** 32 - 1)


def _triple(seed):
    rng = np.random.default_rng(seed)
    iv = random_interval(rng, 0.5, 3, 0.2, 2)
    return [random_smooth(rng, iv) for _ in range(3)], iv


@given(seeds)
def test_identity_holds(seed):
    (f, g, h), iv = _triple(seed)
    for v in (fn.pompeiu_Phat(f, g, iv), fn.general_Phat_h(f, g, h, iv)):
        assert v.discrepancy <= 1e-7 * (1 + abs(v.product_form))


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_symmetry_and_bilinearity(seed, al, be):
    (f, g, h), iv = _triple(seed)
    f2 = random_smooth(np.random.default_rng(seed + 1), iv)
    p = lambda u, v: fn.general_Phat_h(u, v, h, iv, double=False).product_form
    sc = fn.general_Phat_h(f, g, h, iv, double=False).scale
    assert abs(p(f, g) - p(g, f)) <= 1e-8 * (1 + sc)
    comb = f"({al!r})*({f}) + ({be!r})*({f2})"
    lhs = p(comb, g)
    rhs = al * p(f, g) + be * p(f2, g)
    assert abs(lhs - rhs) <= 1e-8 * (1 + abs(al) * sc + abs(be) * abs(rhs) + abs(lhs))


@given(seeds)
def test_self_functional_nonnegative(seed):
    (f, _, h), iv = _triple(seed)
    v = fn.general_Phat_h(f, f, h, iv, double=False)
    assert v.product_form >= -1e-9 * (1 + v.scale)


@given(seeds)
def test_annihilation(seed):
    (_, g, h), iv = _triple(seed)
    v = fn.general_Phat_h(h, g, h, iv, double=False)
    assert abs(v.product_form) <= 1e-9 * (1 + v.scale)


@given(seeds)
def test_reduction_chain(seed):
    (f, g, _), iv = _triple(seed)
    one = fn.general_Phat_h(f, g, "1", iv, double=False)
    t = fn.chebyshev_T(f, g, iv).value
    assert abs(one.product_form - iv.length ** 2 * t) <= 1e-9 * (1 + one.scale)
    ell = fn.general_Phat_h(f, g, "x", iv, double=False)
    ph = fn.pompeiu_Phat(f, g, iv, double=False)
    assert ell.product_form == ph.product_form
    scaled = (iv.b ** 3 - iv.a ** 3) / 3 * fn.pompeiu_P(f, g, iv)
    assert abs(ph.product_form - scaled) <= 1e-9 * (1 + ph.scale)
