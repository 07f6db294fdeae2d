import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pompeiu_lab.expr import compile_expr, differentiate
from pompeiu_lab.functionals import PreconditionError
from pompeiu_lab.mvt import (Monotonicity, MvtWarning, admissible, boggio_xi,
                             h_monotonicity, pompeiu_xi)
from pompeiu_lab.quad import Interval
from pompeiu_lab.verify import random_interval, random_smooth


def test_admissible_examples():
    assert admissible("x^2-4*x+4", Interval(-1, 1))
    assert not admissible("x", Interval(-1, 1))
    assert admissible("x", Interval(1, 2))
    assert not admissible("x^2", Interval(-0.5, 1))


def test_boggio_worked_example():
    sol = boggio_xi("x", "x^2-4*x+4", -1, 1)
    assert sol.lhs_value == pytest.approx(5 / 4, rel=1e-15)
    assert sol.xi_roots == pytest.approx([0.5], abs=1e-12)
    assert abs(sol.residuals[0]) <= 1e-10
    assert any("0 lies" in w for w in sol.warnings)


def test_boggio_power_h():
    # f(xi) - (xi/2) f'(xi) = xi/2 = 2/3
    sol = boggio_xi("x", "x^2", 1, 2)
    assert sol.lhs_value == pytest.approx(2 / 3, rel=1e-15)
    assert sol.xi_roots == pytest.approx([4 / 3], abs=1e-12)


def test_boggio_equal_h_values():
    with pytest.raises(PreconditionError):
        boggio_xi("x", "x^2", -1, 1)
    with pytest.raises(PreconditionError):
        boggio_xi("x", "x", 1, 1)


def test_boggio_warns_when_h_not_admissible():
    with pytest.warns(MvtWarning):
        boggio_xi("x^3", "x^2", -0.5, 1)


def test_pompeiu_quadratic():
    # f = x^2 on [1, 2]: f - x f' = -x^2 and the secant quantity is -2
    sol = pompeiu_xi("x^2", 1, 2)
    assert sol.xi_roots == pytest.approx([math.sqrt(2)], abs=1e-12)
    assert not sol.all_solutions


@pytest.mark.parametrize("f", ["c*x", "c*x - 1"])
def test_pompeiu_degenerate_linear(f):
    sol = pompeiu_xi(f, 0.5, 3, {"c": 2.3})
    assert sol.all_solutions and sol.found and sol.xi_roots == []


def test_pompeiu_zero_in_interval():
    with pytest.raises(PreconditionError):
        pompeiu_xi("x^2", -1, 1)
    with pytest.raises(PreconditionError):
        pompeiu_xi("x^2", 2, 2)


def test_no_root_is_reported():
    # the secant quantity of sign(x - 1.5) is outside the range of the deviation
    sol = pompeiu_xi("sign(x - 1.5)", 1, 2)
    assert not sol.found
    assert sol.warnings


def test_h_monotonicity_examples():
    iv = Interval(1, 2)
    assert h_monotonicity("x", "1", iv) is Monotonicity.H_INCREASING
    assert h_monotonicity("-x", "1", iv) is Monotonicity.H_DECREASING
    assert h_monotonicity("x^2", "x", iv) is Monotonicity.H_INCREASING
    assert h_monotonicity("1/x", "x", iv) is Monotonicity.H_DECREASING
    assert h_monotonicity("x^2 + 1", "x^2 + 1", iv) is Monotonicity.H_INCREASING
    assert h_monotonicity("sin(6*x)", "1", iv) is Monotonicity.NEITHER
    with pytest.raises(PreconditionError):
        h_monotonicity("x", "x - 1.5", iv)


def _check_roots(sol, resid):
    for x, r in zip(sol.xi_roots, sol.residuals):
        assert abs(r) <= 1e-10 * (1 + abs(sol.lhs_value))
        assert abs(resid(x) - r) <= 1e-12 * (1 + abs(sol.lhs_value))


@pytest.mark.parametrize("seed", range(20))
def test_boggio_with_identity_matches_pompeiu(seed):
    rng = np.random.default_rng(seed)
    iv = random_interval(rng, 0.3, 3, 0.2, 2)
    f = random_smooth(rng, iv)
    p = pompeiu_xi(f, iv.a, iv.b)
    b = boggio_xi(f, "x", iv.a, iv.b)
    assert p.all_solutions == b.all_solutions
    assert len(p.xi_roots) == len(b.xi_roots)
    assert np.allclose(p.xi_roots, b.xi_roots, rtol=0, atol=1e-10 * (1 + iv.b))
    fa, da = compile_expr(f), compile_expr(differentiate(f))
    _check_roots(p, lambda x: float(fa(x) - x * da(x) - p.lhs_value))


@given(st.integers(0, 10 ** 6))
def test_roots_are_interior_and_accurate(seed):
    rng = np.random.default_rng(seed)
    iv = random_interval(rng, 0.3, 3, 0.2, 2)
    f, h = random_smooth(rng, iv), f"exp({rng.uniform(0.1, 1.0)!r}*x)"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MvtWarning)
        sol = boggio_xi(f, h, iv.a, iv.b)
    fa, da = compile_expr(f), compile_expr(differentiate(f))
    ha, dha = compile_expr(h), compile_expr(differentiate(h))
    for x in sol.xi_roots:
        assert iv.a < x < iv.b
    _check_roots(sol, lambda x: float(fa(x) - ha(x) / dha(x) * da(x) - sol.lhs_value))
