"""As-printed variants of catalog entries whose published form is not sound.

These are kept out of ``list_bounds()`` and the soundness sweep.  Each one
reproduces the constant exactly as stated so that counterexamples can be
exhibited; the sound entry of the same name minus ``_as_printed`` is the
corrected version.
"""
from __future__ import annotations

import math

from . import catalog as cat
from .core import BoundSpec, Component as C, register

PI = math.pi


def errata(id, of, theorem, lhs, requires, profile, note, **kw):
    def deco(fn):
        register(BoundSpec(id, theorem, lhs, tuple(requires), fn, profile,
                           errata_of=of, note=note, **kw))
        return fn
    return deco


@errata("four_case_as_printed", "four_case", "Four-case range bound, printed constant",
        "|Phat(f,g)|", cat.POMPEIU + ("f_range", "g_range"), "positive_pair",
        "omits the change-of-variables Jacobian and uses a pointwise bound valid "
        "only on half of the square")
def _four_case(ctx, q, d):
    case, sg, sf, Yf, Yg, J = cat.four_case_parts(ctx, q)
    d.update(case=case, jacobian=J)
    return [C(f"case {case}", abs(cat.P_hat(q)), 0.5 * Yf * Yg)]


@errata("range_product_as_printed", "range_product", "Range product bound without sign "
        "conditions", "|Phat(f,g)|", cat.POMPEIU + ("f_range", "g_range"), "smooth_pair",
        "fails for negative ranges, e.g. f = -1, g = 1")
def _range_product(ctx, q, d):
    return cat._range_product(ctx, q, d)


@errata("range_mixed_as_printed", "range_mixed", "Mixed range bound without sign "
        "conditions", "|Phat(f,g)|", cat.POMPEIU + ("g_range",), "smooth_pair",
        "fails for negative ranges of g, e.g. g = -1")
def _range_mixed(ctx, q, d):
    return cat._range_mixed(ctx, q, d)


def _printed_root(ctx, q):
    gamma, Gamma = cat.rng(ctx, "gamma", "Gamma")
    br = cat.bracket_printed(q.a, q.b, gamma, Gamma)
    return math.sqrt(max(br, 0.0)), br


@errata("thm_2_6_as_printed", "thm_2_6", "Phat(f,f) and range-of-g bound, printed bracket",
        "|Phat(f,g)|", cat.POMPEIU + ("g_range",), "smooth_pair",
        "the printed bracket does not equal the double integral it replaces")
def _thm_2_6(ctx, q, d):
    root, br = _printed_root(ctx, q)
    d["bracket"] = br
    return [C("range of g", abs(cat.P_hat(q)),
              math.sqrt(cat.P_hat_sq(q, "f")) * root / (2 * math.sqrt(3)))]


@errata("sec3_inf_range_as_printed", "sec3_inf_range", "Sup deviation and range of g, "
        "printed form", "|Phat(f,g)|", cat.POMPEIU + ("f_differentiable", "g_range"),
        "smooth_pair", "the bracket appears without its square root")
def _sec3_inf_range(ctx, q, d):
    gamma, Gamma = cat.rng(ctx, "gamma", "Gamma")
    br = cat.bracket_printed(q.a, q.b, gamma, Gamma)
    d["bracket"] = br
    return [C("sup deviation and range of g", abs(cat.P_hat(q)),
              q.length ** 2 / 12 * q.sup("dev:f") * br)]


@errata("sec3_l1_range_as_printed", "sec3_l1_range", "L1 deviation and range of g, "
        "printed bracket", "|Phat(f,g)|", cat.POMPEIU + ("f_differentiable", "g_range"),
        "smooth_pair", "uses the printed bracket in place of the double integral")
def _sec3_l1_range(ctx, q, d):
    a, b = q.a, q.b
    root, br = _printed_root(ctx, q)
    d["bracket"] = br
    c = 1 / (6 * math.sqrt(2)) * math.sqrt((2 * b ** 3 + a ** 3 - 3 * a * b * b) / a)
    return [C("L1 deviation and range of g", abs(cat.P_hat(q)), c * q.lp("dev:f", 1) * root)]


@errata("improved_l2_range_as_printed", "improved_l2_range", "Improved L2 bound with the "
        "range of g, printed bracket", "|Phat(f,g)|",
        cat.POMPEIU + ("f_differentiable", "g_range"), "smooth_pair",
        "uses the printed bracket in place of the double integral")
def _improved_l2_range(ctx, q, d):
    a, b = q.a, q.b
    root, br = _printed_root(ctx, q)
    d["bracket"] = br
    c = math.sqrt(7) / (18 * math.sqrt(6) * PI) / a ** 3 * math.sqrt(b ** 9 - a ** 9)
    return [C("improved L2 and range of g", abs(cat.P_hat(q)), c * q.lp("dev:f", 2) * root)]


@errata("cor_l2_range_as_printed", "cor_l2_range", "L2 deviation and range of g, printed "
        "power of (b - a)", "|Phat(f,g)|",
        cat.POMPEIU + ("f_differentiable", "g_range", "g_range_nonneg"), "positive_pair",
        "the power of (b - a) is 1 instead of 3/2")
def _cor_l2_range(ctx, q, d):
    a, b = q.a, q.b
    gamma, Gamma = cat.rng(ctx, "gamma", "Gamma")
    c = 1 / (3 * PI) * b / a ** 3 * (b ** 3 - a ** 3) * q.length * (b * Gamma - a * gamma)
    return [C("L2 and range of g", abs(cat.P_hat(q)), c * q.lp("dev:f", 2))]


@errata("hardy_cheb_bounds_as_printed", "hardy_cheb_bounds", "Bounds for T(F, 1/t), printed "
        "Gruss term", "|T(F,1/t)|", ("a_positive", "f_range"), "hardy",
        "the Gruss term uses the range of f instead of the range of F")
def _hardy_cheb(ctx, q, d):
    return cat._hardy_cheb_terms(ctx, q, d, printed=True)


@errata("hardy_p_bounds_as_printed", "hardy_p_bounds", "Bounds for T(F^p, t^-p), printed "
        "Gruss and Lupas terms", "|T(F^p,t^-p)|",
        ("a_positive", "f_nonneg", "f_range", "exponent_p"), "hardy_nonneg_p",
        "Gruss term uses M^p - m^p; Lupas term uses the mean to the power p/2")
def _hardy_p(ctx, q, d):
    return cat._hardy_p_terms(ctx, q, d, printed=True)


@errata("hardy_log_mean_as_printed", "hardy_log_mean", "Log-mean Hardy inequality in the "
        "printed direction", "int F/t vs (1/L) int F", ("a_positive",), "hardy_nonneg_p",
        "asserts >= regardless of the monotonicity classes", sign_check=True)
def _hardy_log_mean(ctx, q, d):
    return cat._log_mean_components(ctx, q, d, printed=True)


@errata("ramified_derivative_set_as_printed", "ramified_derivative_set",
        "Sign of P_h(f, f''), printed h = t case", "P_h(f,f'') vs 0",
        ("f_twice_differentiable", "f_positive", "ramified_cases"), "ramified",
        "the h = t case has b f(b) - a f(a) where b f'(b) - a f'(a) belongs", sign_check=True)
def _ramified(ctx, q, d):
    return cat.ramified_components(ctx, q, d, printed=True)

