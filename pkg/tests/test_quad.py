import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sci

from pompeiu_lab.quad import (Interval, QuadConfig, QuadratureError, function_range,
                              integrate, integrate1d, integrate2d, lp_norm, sup_norm)


def test_x_squared():
    assert abs(integrate("x^2", Interval(0, 1)) - 1 / 3) <= 1e-12


def test_one_minus_reciprocal():
    assert integrate("1 - 1/x", Interval(1, 2)) == pytest.approx(1 - math.log(2), abs=1e-12)


def test_degenerate_interval_rejected():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)


@pytest.mark.parametrize("kw", [dict(abs_tol=0), dict(rel_tol=-1), dict(max_subdivisions=0)])
def test_bad_config(kw):
    with pytest.raises(ValueError):
        QuadConfig(**kw)


def test_error_estimate_within_tolerance():
    cfg = QuadConfig(1e-10, 1e-10)
    r = integrate1d("exp(sin(3*x))", Interval(0, 4), cfg=cfg)
    assert r.err_estimate <= max(cfg.abs_tol, cfg.rel_tol * abs(r.value))
    ref, _ = sci.quad(lambda x: math.exp(math.sin(3 * x)), 0, 4, epsabs=1e-13, epsrel=1e-13)
    assert r.value == pytest.approx(ref, rel=1e-10)


def test_budget_exhaustion():
    with pytest.raises(QuadratureError):
        integrate1d("sin(1/x)", Interval(1e-4, 1), cfg=QuadConfig(1e-14, 1e-14, 20))


def test_nonfinite_integrand():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.where(x > 0.5, np.inf, 1.0), Interval(0, 1))


def test_square_kernel():
    r = integrate2d(lambda x, t: (x - t) ** 2, Interval(1, 2))
    assert abs(r.value - 1 / 6) <= 1e-9


def test_antisymmetric_kernel():
    assert abs(integrate2d(lambda x, t: x - t, Interval(-0.7, 3.1)).value) <= 1e-12


def test_separable_kernel():
    assert integrate2d(lambda x, t: x * t, Interval(0, 1)).value == pytest.approx(0.25, abs=1e-13)


def test_lower_region_against_dblquad():
    k = lambda x, t: np.exp(x - 2 * t) * np.cos(x * t)
    got = integrate2d(k, Interval(0.5, 2), region="lower").value
    ref, _ = sci.dblquad(lambda t, x: math.exp(x - 2 * t) * math.cos(x * t), 0.5, 2,
                         lambda x: 0.5, lambda x: x, epsabs=1e-13, epsrel=1e-13)
    assert got == pytest.approx(ref, rel=1e-9)


def test_kinked_kernel():
    got = integrate2d(lambda x, t: np.abs(x - t), Interval(0, 1)).value
    assert got == pytest.approx(1 / 3, abs=1e-12)


def test_bad_order_or_region():
    with pytest.raises(ValueError):
        integrate2d(lambda x, t: x, Interval(0, 1), order="zz")
    with pytest.raises(ValueError):
        integrate2d(lambda x, t: x, Interval(0, 1), region="upper")


@pytest.mark.parametrize("p", [1, 1.5, 2, 3.7])
def test_norm_of_one(p):
    assert lp_norm("1", p, Interval(1, 3.5)) == pytest.approx(2.5 ** (1 / p), rel=1e-13)


def test_norm_examples():
    assert lp_norm("-1", 2, Interval(1, 2)) == pytest.approx(1, rel=1e-14)
    assert lp_norm("x", 2, Interval(0, 1)) == pytest.approx(1 / math.sqrt(3), rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm("x", 0.5, Interval(0, 1))


def test_sup_examples():
    assert sup_norm("x^2 - x", Interval(0, 1)) == pytest.approx(0.25, abs=1e-15)
    assert sup_norm("-1", Interval(0, 1)) == 1
    assert sup_norm("x", Interval(-1, 1)) == 1
    assert lp_norm("x^2 - x", math.inf, Interval(0, 1)) == pytest.approx(0.25, abs=1e-15)


def test_sup_finds_narrow_peak_between_scan_points():
    # peak at an irrational point, width far below the refinement bracket
    c = math.sqrt(2) - 1
    _, hi = function_range(lambda x: 1 - 1e3 * (x - c) ** 2, Interval(0, 1))
    assert hi == pytest.approx(1.0, abs=1e-12)


def test_function_range():
    lo, hi = function_range("sin(x)", Interval(0, 4))
    assert hi == pytest.approx(1, abs=1e-15)
    assert lo == pytest.approx(math.sin(4), abs=1e-15)


coef = st.floats(-3, 3, allow_nan=False)
poly = st.lists(coef, min_size=1, max_size=5)


def _poly_text(cs):
    return " + ".join(f"({c!r})*x^{k}" for k, c in enumerate(cs))


@given(poly, poly, coef, coef)
def test_linearity(p1, p2, al, be):
    iv = Interval(-0.5, 1.7)
    both = f"({al!r})*({_poly_text(p1)}) + ({be!r})*({_poly_text(p2)})"
    lhs = integrate(both, iv)
    rhs = al * integrate(_poly_text(p1), iv) + be * integrate(_poly_text(p2), iv)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 2))
def test_fubini(c1, c2, w):
    k = lambda x, t: np.exp(c1 * x) * np.sin(c2 * t + x) + x * t ** 2
    iv = Interval(0.3, 0.3 + w)
    v1 = integrate2d(k, iv, order="xt").value
    v2 = integrate2d(k, iv, order="tx").value
    assert abs(v1 - v2) <= 1e-7 * (1 + abs(v1))


@given(poly, st.floats(1, 3), st.floats(0, 3))
def test_norms_monotone_in_p_on_unit_interval(cs, p, dp):
    iv = Interval(0, 1)
    f = _poly_text(cs)
    assert lp_norm(f, p, iv) <= lp_norm(f, p + dp, iv) + 1e-8
    assert lp_norm(f, p + dp, iv) <= sup_norm(f, iv) + 1e-8


@given(poly)
def test_sup_dominates_scan(cs):
    iv = Interval(-1, 2)
    fn = lambda x: np.polyval(cs[::-1], x)
    xs = np.linspace(iv.a, iv.b, 4097)
    assert sup_norm(fn, iv) >= np.max(np.abs(fn(xs)))
