"""The bound catalog.

Each entry evaluates one or more component inequalities lhs <= rhs.  Norms
written ||f - l f'|| are norms of the Pompeiu deviation f(x) - x f'(x).
Functional values are taken from their double-integral forms.
"""
from __future__ import annotations

import math

import numpy as np

from ..functionals import means, prefix_integral
from ..mvt import Monotonicity
from ..quad import Interval, QuadConfig, integrate_rows
from .core import BoundSpec, Component, Precondition, predicate, register
from .predicates import SCAN, cesaro, classify, exponent_p, holder_data

PI = math.pi
C = Component


# ------------------------------------------------------------ shared pieces

def T_double(q, fk, gk):
    """Chebyshev functional T(f, g) = P_1(f, g) / (b - a)^2."""
    return q.phat(fk, gk, "one").double_form / q.length ** 2


def P_hat(q, fk="f", gk="g", hk=None):
    return q.phat(fk, gk, hk).double_form


def P_hat_sq(q, fk, hk=None):
    return max(q.phat(fk, fk, hk).double_form, 0.0)


def P_abs(q):
    return abs(P_hat(q)) * 3.0 / (q.b ** 3 - q.a ** 3)


def A_abs(q, gk):
    g = q.fn(gk)
    return lambda x, t: np.abs(t * g(x) - x * g(t))


def K_range(a, b, gamma, Gamma):
    """int_a^b int_a^t (G t - g x)^2 dx dt with (g, G) the dominating pair."""
    if Gamma + gamma >= 0:
        G, g = Gamma, gamma
    else:
        G, g = -gamma, -Gamma
    s4 = (b ** 4 - a ** 4) / 4.0
    return (G * G * (s4 - a * (b ** 3 - a ** 3) / 3.0)
            - G * g * (s4 - a * a * (b * b - a * a) / 2.0)
            + g * g / 3.0 * (s4 - a ** 3 * (b - a)))


def bracket_printed(a, b, gamma, Gamma):
    return 2 * (b ** 3 - a ** 3) * (b - a) * (Gamma ** 2 + gamma ** 2) \
        - 3 * Gamma * gamma * (b * b - a * a) ** 2


def K_kernel(r):
    return lambda x, t: np.abs(x ** r / t ** (r - 1) - t ** r / x ** (r - 1))


def M_r(q, r):
    """iint |x^r / t^(r-1) - t^r / x^(r-1)| over the square."""
    return 2.0 * q.double_lower(("M_r", r), K_kernel(r))


def rng(ctx, *keys):
    return [ctx.supplied_range_bounds[k] for k in keys]


def spec(id, theorem, lhs, requires, profile, **kw):
    def deco(fn):
        register(BoundSpec(id, theorem, lhs, tuple(requires), fn, profile, **kw))
        return fn
    return deco


PAIR = ("g_given",)
POMPEIU = ("a_positive", "g_given")


# ------------------------------------------------------------ classical Chebyshev type

@spec("cheb_deriv_inf", "Chebyshev inequality, sup norms of derivatives", "|T(f,g)|",
      PAIR + ("f_differentiable", "g_differentiable"), "smooth_pair")
def _cheb_deriv_inf(ctx, q, d):
    rhs = q.length ** 2 / 12.0 * q.sup("d:f") * q.sup("d:g")
    return [C("chebyshev", abs(T_double(q, "f", "g")), rhs)]


@spec("gruss_classic", "Gruss inequality", "|T(f,g)|",
      PAIR + ("f_range", "g_range"), "smooth_pair")
def _gruss(ctx, q, d):
    phi, Phi, gamma, Gamma = rng(ctx, "phi", "Phi", "gamma", "Gamma")
    return [C("gruss", abs(T_double(q, "f", "g")), 0.25 * (Phi - phi) * (Gamma - gamma))]


@spec("lupas_l2", "Lupas inequality, L2 norms of derivatives", "|T(f,g)|",
      PAIR + ("f_differentiable", "g_differentiable"), "smooth_pair")
def _lupas(ctx, q, d):
    rhs = q.length / PI ** 2 * q.lp("d:f", 2) * q.lp("d:g", 2)
    return [C("lupas", abs(T_double(q, "f", "g")), rhs)]


@spec("ostrowski_mixed", "Ostrowski mixed bound, range of f and sup norm of g'", "|T(f,g)|",
      PAIR + ("f_range", "g_differentiable"), "smooth_pair",
      note="the sup norm is taken of g'")
def _ostrowski(ctx, q, d):
    phi, Phi = rng(ctx, "phi", "Phi")
    rhs = q.length * (Phi - phi) * q.sup("d:g") / 8.0
    return [C("ostrowski", abs(T_double(q, "f", "g")), rhs)]


# ------------------------------------------------------------ Pompeiu-Chebyshev, |P|

@spec("pachpatte", "Pachpatte bound for P with sup norms of f - l f'", "|P(f,g)|",
      POMPEIU + ("f_differentiable", "g_differentiable"), "smooth_pair")
def _pachpatte(ctx, q, d):
    a, b = q.a, q.b
    c = q.length * (1.0 - 0.75 * (a + b) ** 2 / (a * a + a * b + b * b))
    return [C("pachpatte", P_abs(q), c * q.sup("dev:f") * q.sup("dev:g"))]


def _A_inf(a, b):
    return lambda x: ((x - a) ** 2 + (b - x) ** 2) / (2.0 * x)


def _A_one(a, b):
    return lambda x: 1.0 / a + b / x ** 2


def _A_two(a, b):
    def A(x):
        u = np.maximum(3 * np.log(x / a) + a ** 3 / x ** 3 - 1, 0.0)
        v = np.maximum(3 * np.log(x / b) + b ** 3 / x ** 3 - 1, 0.0)
        return (np.sqrt(u) + np.sqrt(v)) / 3.0
    return A


def _pecaric(p, A_factory):
    def run(ctx, q, d):
        a, b = q.a, q.b
        A = A_factory(a, b)
        f, g = q.fn("f"), q.fn("g")
        ig, i_f = q.integrate(("pecaric", p), lambda x: x * np.abs(g(x)) * A(x),
                              lambda x: x * np.abs(f(x)) * A(x))
        scale = (q.length ** (0.0 if p == math.inf else 1.0 / p)) / (b * b - a * a)
        rhs = scale * (q.lp("dev:f", p) * ig + q.lp("dev:g", p) * i_f)
        return [C(f"pecaric-ungar p={p}", P_abs(q), rhs)]
    return run


for _p, _suffix, _fac in ((math.inf, "inf", _A_inf), (1.0, "1", _A_one), (2.0, "2", _A_two)):
    register(BoundSpec(f"pecaric_ungar_{_suffix}",
                       f"Pecaric-Ungar bound for P, special case p = {_suffix}", "|P(f,g)|",
                       POMPEIU + ("f_differentiable", "g_differentiable"),
                       _pecaric(_p, _fac), "smooth_pair"))


# ------------------------------------------------------------ Dragomir, |P_hat|

DEV = POMPEIU + ("f_differentiable", "g_differentiable")


@spec("dragomir_linf", "Dragomir bound, sup norms of f - l f' (sharp)", "|Phat(f,g)|",
      DEV, "smooth_pair")
def _drag_inf(ctx, q, d):
    rhs = q.length ** 4 / 12.0 * q.sup("dev:f") * q.sup("dev:g")
    return [C("dragomir sup", abs(P_hat(q)), rhs)]


@spec("dragomir_lpq", "Dragomir bound, Lp and Lq norms with the M_r constants",
      "|Phat(f,g)|", DEV + ("exponent_p", "conjugate_pq"), "smooth_pair_p")
def _drag_lpq(ctx, q, d):
    p, qq = exponent_p(ctx)
    Mp, Mq = M_r(q, p), M_r(q, qq)
    d["M_p"], d["M_q"] = Mp, Mq
    c = Mp ** (1 / p) * Mq ** (1 / qq) / (2 * (2 * p - 1) ** (1 / p) * (2 * qq - 1) ** (1 / qq))
    return [C("dragomir lp-lq", abs(P_hat(q)), c * q.lp("dev:f", p) * q.lp("dev:g", qq))]


@spec("dragomir_l2", "Dragomir bound, L2 norms", "|Phat(f,g)|", DEV, "smooth_pair")
def _drag_l2(ctx, q, d):
    a, b = q.a, q.b
    br = (a ** 3 + b ** 3) * math.log(b / a) - 2.0 / 3.0 * (b ** 3 - a ** 3)
    d["bracket"] = br
    return [C("dragomir L2", abs(P_hat(q)), br / 9.0 * q.lp("dev:f", 2) * q.lp("dev:g", 2))]


@spec("dragomir_l1", "Dragomir bound, L1 norms", "|Phat(f,g)|", DEV, "smooth_pair")
def _drag_l1(ctx, q, d):
    a, b = q.a, q.b
    c = q.length ** 2 * (a + 2 * b) / (6 * a)
    return [C("dragomir L1", abs(P_hat(q)), c * q.lp("dev:f", 1) * q.lp("dev:g", 1))]


# ------------------------------------------------------------ pre-Gruss and range bounds

@spec("pre_gruss", "Pre-Gruss inequality for Phat (sharp at f = g)", "|Phat(f,g)|",
      POMPEIU, "smooth_pair")
def _pre_gruss(ctx, q, d):
    return [C("pre-gruss", abs(P_hat(q)), math.sqrt(P_hat_sq(q, "f") * P_hat_sq(q, "g")))]


RANGES = POMPEIU + ("f_range", "g_range", "f_range_nonneg", "g_range_nonneg")


@spec("range_product", "Range bound with (b Phi - a phi)(b Gamma - a gamma)", "|Phat(f,g)|",
      RANGES, "positive_pair")
def _range_product(ctx, q, d):
    phi, Phi, gamma, Gamma = rng(ctx, "phi", "Phi", "gamma", "Gamma")
    a, b = q.a, q.b
    rhs = 0.5 * q.length ** 2 * (b * Phi - a * phi) * (b * Gamma - a * gamma)
    return [C("range product", abs(P_hat(q)), rhs)]


@spec("range_mixed", "Mixed range and Phat(f,f) bound", "|Phat(f,g)|",
      POMPEIU + ("g_range", "g_range_nonneg"), "positive_pair")
def _range_mixed(ctx, q, d):
    gamma, Gamma = rng(ctx, "gamma", "Gamma")
    rhs = q.length * (q.b * Gamma - q.a * gamma) * math.sqrt(P_hat_sq(q, "f")) / math.sqrt(2)
    return [C("range mixed", abs(P_hat(q)), rhs)]


def _Y(hi, lo, a, b):
    """int |y| over [hi a - lo b, hi b - lo a]."""
    u, v = hi * a - lo * b, hi * b - lo * a
    if u >= 0:
        return 0.5 * (v * v - u * u)
    return 0.5 * (v * v + u * u)


def four_case_parts(ctx, q):
    phi, Phi, gamma, Gamma = rng(ctx, "phi", "Phi", "gamma", "Gamma")
    a, b = q.a, q.b
    sg, sf = Gamma * a - gamma * b, Phi * a - phi * b
    case = 1 + 2 * (sg < 0) + (sf < 0)
    Yf, Yg = _Y(Phi, phi, a, b), _Y(Gamma, gamma, a, b)
    J = abs(phi * Gamma - Phi * gamma)
    return case, sg, sf, Yf, Yg, J


@spec("four_case", "Four-case range bound, with the change-of-variables Jacobian",
      "|Phat(f,g)|", RANGES + ("jacobian_nonzero", "f_ne_g"), "positive_pair")
def _four_case(ctx, q, d):
    case, sg, sf, Yf, Yg, J = four_case_parts(ctx, q)
    d.update(case=case, Gamma_a_minus_gamma_b=sg, Phi_a_minus_phi_b=sf, jacobian=J,
             printed_value=0.5 * Yf * Yg)
    return [C(f"case {case}", abs(P_hat(q)), Yf * Yg / J)]


def K_of(ctx, q):
    gamma, Gamma = rng(ctx, "gamma", "Gamma")
    return K_range(q.a, q.b, gamma, Gamma)


@spec("thm_2_6", "Phat(f,f) and range-of-g bound", "|Phat(f,g)|",
      POMPEIU + ("g_range",), "smooth_pair")
def _thm_2_6(ctx, q, d):
    K = K_of(ctx, q)
    d["K"] = K
    return [C("range of g", abs(P_hat(q)), math.sqrt(P_hat_sq(q, "f") * K))]


# ------------------------------------------------------------ L2 bounds via a weighted Wirtinger inequality

@spec("milo_l2_bound", "L2 bound from the weighted Wirtinger inequality", "|Phat(f,g)|",
      DEV, "smooth_pair")
def _milo_l2(ctx, q, d):
    a, b = q.a, q.b
    c = 2.0 / (9 * PI ** 2) * b * b / a ** 6 * (b ** 3 - a ** 3) ** 2 * q.length
    return [C("L2", abs(P_hat(q)), c * q.lp("dev:f", 2) * q.lp("dev:g", 2))]


@spec("cor_l2_g", "L2 norm of f - l f' and Phat(g,g)", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable",), "smooth_pair")
def _cor_l2_g(ctx, q, d):
    a, b = q.a, q.b
    c = math.sqrt(2) / (3 * PI) * b / a ** 3 * (b ** 3 - a ** 3) * math.sqrt(q.length)
    return [C("L2 and Phat(g,g)", abs(P_hat(q)),
              c * q.lp("dev:f", 2) * math.sqrt(P_hat_sq(q, "g")))]


@spec("cor_l2_range", "L2 norm of f - l f' and range of g", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable", "g_range", "g_range_nonneg"), "positive_pair")
def _cor_l2_range(ctx, q, d):
    a, b = q.a, q.b
    gamma, Gamma = rng(ctx, "gamma", "Gamma")
    c = 1 / (3 * PI) * b / a ** 3 * (b ** 3 - a ** 3) * q.length ** 1.5 * (b * Gamma - a * gamma)
    return [C("L2 and range of g", abs(P_hat(q)), c * q.lp("dev:f", 2))]


@spec("improved_l2", "Improved L2 bound", "|Phat(f,g)|", DEV, "smooth_pair")
def _improved_l2(ctx, q, d):
    a, b = q.a, q.b
    c = 7.0 / (162 * PI ** 2) / a ** 6 * (b ** 9 - a ** 9)
    return [C("improved L2", abs(P_hat(q)), c * q.lp("dev:f", 2) * q.lp("dev:g", 2))]


def _improved_g_const(a, b):
    return math.sqrt(7) / (9 * math.sqrt(2) * PI) / a ** 3 * math.sqrt(b ** 9 - a ** 9)


@spec("improved_l2_g", "Improved L2 bound with Phat(g,g)", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable",), "smooth_pair")
def _improved_l2_g(ctx, q, d):
    c = _improved_g_const(q.a, q.b)
    return [C("improved L2 and Phat(g,g)", abs(P_hat(q)),
              c * q.lp("dev:f", 2) * math.sqrt(P_hat_sq(q, "g")))]


@spec("improved_l2_range", "Improved L2 bound with the range of g", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable", "g_range"), "smooth_pair")
def _improved_l2_range(ctx, q, d):
    c = _improved_g_const(q.a, q.b)
    K = K_of(ctx, q)
    d["K"] = K
    return [C("improved L2 and range of g", abs(P_hat(q)), c * q.lp("dev:f", 2) * math.sqrt(K))]


# ------------------------------------------------------------ pointwise deviation lemma bounds

@spec("sec3_inf", "Deviation lemma bound, sup norm of f - l f'", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable",), "smooth_pair")
def _sec3_inf(ctx, q, d):
    A = A_abs(q, "g")
    I = 2 * q.double_lower("sec3_inf", lambda x, t: np.abs(x - t) * A(x, t))
    return [C("sup deviation", abs(P_hat(q)), 0.5 * q.sup("dev:f") * I)]


@spec("sec3_lp", "Deviation lemma bound, Lp norm of f - l f'", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable", "exponent_p", "conjugate_pq"), "smooth_pair_p")
def _sec3_lp(ctx, q, d):
    p, qq = exponent_p(ctx)
    A, K = A_abs(q, "g"), K_kernel(qq)
    I = 2 * q.double_lower(("sec3_lp", qq), lambda x, t: K(x, t) ** (1 / qq) * A(x, t))
    c = 0.5 * (1 / (2 * qq - 1)) ** (1 / qq)
    return [C("Lp deviation", abs(P_hat(q)), c * q.lp("dev:f", p) * I)]


@spec("sec3_l1", "Deviation lemma bound, L1 norm of f - l f'", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable",), "smooth_pair")
def _sec3_l1(ctx, q, d):
    A = A_abs(q, "g")
    I = 2 * q.double_lower("sec3_l1",
                           lambda x, t: np.maximum(x, t) / np.minimum(x, t) * A(x, t))
    return [C("L1 deviation", abs(P_hat(q)), 0.5 * q.lp("dev:f", 1) * I)]


@spec("sec3_inf_range", "Sup norm of f - l f' and range of g", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable", "g_range"), "smooth_pair")
def _sec3_inf_range(ctx, q, d):
    K = K_of(ctx, q)
    d["K"] = K
    rhs = q.length ** 2 / (2 * math.sqrt(3)) * q.sup("dev:f") * math.sqrt(K)
    return [C("sup deviation and range of g", abs(P_hat(q)), rhs)]


def sec3_inf_l1_const(a, b):
    """iint |x - t| max(x,t)/min(x,t) over the square."""
    return b * b * a - (a ** 3 + 8 * b ** 3) / 9 + 2.0 / 3.0 * b ** 3 * math.log(b / a)


@spec("sec3_inf_l1", "Sup norm of f - l f' and L1 norm of g - l g'", "|Phat(f,g)|", DEV,
      "smooth_pair")
def _sec3_inf_l1(ctx, q, d):
    c = 0.5 * sec3_inf_l1_const(q.a, q.b)
    return [C("sup and L1 deviation", abs(P_hat(q)), c * q.sup("dev:f") * q.lp("dev:g", 1))]


@spec("sec3_l1_range", "L1 norm of f - l f' and range of g", "|Phat(f,g)|",
      POMPEIU + ("f_differentiable", "g_range"), "smooth_pair")
def _sec3_l1_range(ctx, q, d):
    a, b = q.a, q.b
    K = K_of(ctx, q)
    d["K"] = K
    c = math.sqrt((2 * b ** 3 + a ** 3 - 3 * a * b * b) / (6 * a))
    return [C("L1 deviation and range of g", abs(P_hat(q)), c * q.lp("dev:f", 1) * math.sqrt(K))]


# ------------------------------------------------------------ general weight h

@spec("gen_pre_gruss", "Pre-Gruss inequality for P_h (sharp at f = g)", "|Phat_h(f,g)|",
      ("g_given", "h_given"), "h_triple")
def _gen_pre_gruss(ctx, q, d):
    lhs = abs(P_hat(q, "f", "g", "h"))
    c1 = math.sqrt(P_hat_sq(q, "f", "h") * P_hat_sq(q, "g", "h"))
    c2 = math.sqrt(max(q.phat("h", "h", "f").double_form, 0.0)
                   * max(q.phat("h", "h", "g").double_form, 0.0))
    return [C("P_h(f,f) P_h(g,g)", lhs, c1), C("P_f(h,h) P_g(h,h)", lhs, c2)]


def _beta(ctx):
    e = ctx.supplied_exponents
    if "alpha" not in e:
        return None, None
    al = e["alpha"]
    return al, e.get("beta", al / (al - 1))


def _holder_components(q, ctx, d, H1, p, H2, qq, n_inf, n_2beta, n_2, lhs, label):
    """Three Holder-type components shared by the Barnett and CBS entries."""
    L = q.length
    out = [C(f"{label} sup", lhs, H1 * H2 * L ** (p + qq + 2)
             / math.sqrt((2 * p + 1) * (2 * p + 2) * (2 * qq + 1) * (2 * qq + 2)) * n_inf)]
    al, be = _beta(ctx)
    if al is not None:
        den = ((2 * al * p + 1) * (2 * al * p + 2) * (2 * al * qq + 1) * (2 * al * qq + 2)) \
            ** (1 / (2 * al))
        out.append(C(f"{label} L(2 beta)", lhs,
                     H1 * H2 * 2 ** (-1 / be) * L ** (p + qq + 2 / al) / den * n_2beta(be)))
    out.append(C(f"{label} L2", lhs, 0.5 * H1 * H2 * L ** (p + qq) * n_2))
    return out


def _holder_of(ctx, q, d, num, den, which):
    H, order, est, grid = holder_data(ctx, q, num, den, which)
    d[f"H{which}"], d[f"order{which}"], d[f"H{which}_estimated"] = H, order, est
    return H, order


@spec("barnett_reverse", "Barnett-Dragomir reverse CBS bound, f/h Holder", "Phat_h(f,f)",
      ("h_nonvanishing", "holder_f_over_h", "alpha_conjugate"), "holder_h")
def _barnett_reverse(ctx, q, d):
    H, p = _holder_of(ctx, q, d, "f", "h", 1)
    lhs = P_hat_sq(q, "f", "h")
    return _holder_components(q, ctx, d, H, p, H, p, q.sup("h") ** 4,
                              lambda be: q.lp("h", 2 * be) ** 4, q.lp("h", 2) ** 4, lhs,
                              "barnett")


@spec("cbs_holder_h", "Reverse CBS bound for P_h, f/h and g/h Holder", "|Phat_h(f,g)|",
      ("g_given", "h_nonvanishing", "holder_f_over_h", "holder_g_over_h", "alpha_conjugate"),
      "holder_h")
def _cbs_holder_h(ctx, q, d):
    H1, p = _holder_of(ctx, q, d, "f", "h", 1)
    H2, qq = _holder_of(ctx, q, d, "g", "h", 2)
    lhs = abs(P_hat(q, "f", "g", "h"))
    return _holder_components(q, ctx, d, H1, p, H2, qq, q.sup("h") ** 4,
                              lambda be: q.lp("h", 2 * be) ** 4, q.lp("h", 2) ** 4, lhs, "cbs")


@spec("cbs_holder_x", "Reverse CBS bound for Phat, f/x and g/x Holder", "|Phat(f,g)|",
      POMPEIU + ("holder_f_over_x", "holder_g_over_x", "alpha_conjugate"), "holder_x",
      note="L2 component keeps the constant (b^3 - a^3)^2, which exceeds ||x||_2^4")
def _cbs_holder_x(ctx, q, d):
    a, b = q.a, q.b
    H1, p = _holder_of(ctx, q, d, "f", "x", 1)
    H2, qq = _holder_of(ctx, q, d, "g", "x", 2)
    lhs = abs(P_hat(q))

    def n2beta(be):
        return ((b ** (2 * be + 1) - a ** (2 * be + 1)) / (2 * be + 1)) ** (2 / be)
    return _holder_components(q, ctx, d, H1, p, H2, qq, b ** 4, n2beta,
                              (b ** 3 - a ** 3) ** 2, lhs, "cbs x")


@spec("cbs_holder_fg", "Reverse CBS bound for P_h, h/f and h/g Holder", "|Phat_h(f,g)|",
      ("g_given", "h_given", "fg_nonvanishing", "holder_h_over_f", "holder_h_over_g",
       "alpha_conjugate"), "holder_fg")
def _cbs_holder_fg(ctx, q, d):
    H1, p = _holder_of(ctx, q, d, "h", "f", 1)
    H2, qq = _holder_of(ctx, q, d, "h", "g", 2)
    lhs = abs(P_hat(q, "f", "g", "h"))
    return _holder_components(
        q, ctx, d, H1, p, H2, qq, q.sup("f") ** 2 * q.sup("g") ** 2,
        lambda be: q.lp("f", 2 * be) ** 2 * q.lp("g", 2 * be) ** 2,
        q.lp("f", 2) ** 2 * q.lp("g", 2) ** 2, lhs, "cbs fg")


def _int_hf(q, fk):
    h, f = q.fn("h"), q.fn(fk)
    return q.integrate(("hf", fk), lambda x: h(x) * f(x))[0]


@spec("barnett_pointwise", "Reverse CBS bound under m h <= f <= M h", "Phat_h(f,f)",
      ("h_nonneg", "f_ratio_bounds"), "pointwise")
def _barnett_pointwise(ctx, q, d):
    m, M = rng(ctx, "m", "M")
    rhs = 0.25 * (M - m) ** 2 / (m * M) * _int_hf(q, "f") ** 2
    return [C("pointwise ratio", P_hat_sq(q, "f", "h"), rhs)]


@spec("cbs_pointwise", "Reverse CBS bound for P_h under pointwise ratio bounds",
      "|Phat_h(f,g)|", ("g_given", "h_nonneg", "f_ratio_bounds", "g_ratio_bounds"),
      "pointwise")
def _cbs_pointwise(ctx, q, d):
    m, M, n, N = rng(ctx, "m", "M", "n", "N")
    rhs = 0.25 * (M - m) / math.sqrt(m * M) * (N - n) / math.sqrt(n * N) \
        * abs(_int_hf(q, "f")) * abs(_int_hf(q, "g"))
    return [C("pointwise ratios", abs(P_hat(q, "f", "g", "h")), rhs)]


# ------------------------------------------------------------ Hardy-Chebyshev

def hardy_setup(ctx, q, p=None):
    """Register F = int_a^x f, G = 1/t and, for p, F^p and t^-p."""
    if "F" not in q._funcs:
        F = prefix_integral(q.expr("f"), ctx.iv, ctx.env, ctx.cfg)
        q.register("F", F)
        q.register("G", lambda t: 1.0 / np.asarray(t, dtype=float))
    if p is not None and f"F^{p}" not in q._funcs:
        F = q.fn("F")
        q.register(f"F^{p}", lambda t: np.maximum(F(t), 0.0) ** p)
        q.register(f"G^{p}", lambda t: np.asarray(t, dtype=float) ** (-p))
        f = q.fn("f")
        q.register(f"F^{p-1}f", lambda t: np.maximum(F(t), 0.0) ** (p - 1) * f(t))


def _hardy_cheb_terms(ctx, q, d, printed=False):
    hardy_setup(ctx, q)
    a, b, L = q.a, q.b, q.length
    phi, Phi = rng(ctx, "phi", "Phi")
    lhs = abs(T_double(q, "F", "G"))
    sup_f = q.sup("f")
    spread = (Phi - phi) if printed else (max(Phi, 0.0) - min(phi, 0.0))
    return [
        C("chebyshev", lhs, L ** 2 / (12 * a * a) * sup_f),
        C("gruss", lhs, 0.25 * L ** 2 / (a * b) * spread),
        C("lupas", lhs, L ** 1.5 / PI ** 2 * (a * b) ** -1.5 * means(a, b).L_s(2) * q.lp("f", 2)),
        C("ostrowski", lhs, L / 8 * (L / (a * b)) * sup_f),
    ]


@spec("hardy_cheb_bounds", "Chebyshev, Gruss, Lupas and Ostrowski bounds for T(F, 1/t)",
      "|T(F,1/t)|", ("a_positive", "f_range"), "hardy",
      note="the Gruss term uses the range of F, (b-a)(max(Phi,0) - min(phi,0))")
def _hardy_cheb_bounds(ctx, q, d):
    return _hardy_cheb_terms(ctx, q, d)


@spec("hardy_cheb_pre", "Pre-Gruss bound for T(F, 1/t)", "|T(F,1/t)|", ("a_positive",), "hardy")
def _hardy_cheb_pre(ctx, q, d):
    hardy_setup(ctx, q)
    a, b, L = q.a, q.b, q.length
    tg = abs(1 / (a * b) - (math.log(b / a) / L) ** 2)
    tf = max(T_double(q, "F", "F"), 0.0)
    return [C("pre-gruss", abs(T_double(q, "F", "G")), math.sqrt(tg * tf))]


def _hardy_p_terms(ctx, q, d, printed=False):
    p, _ = exponent_p(ctx)
    hardy_setup(ctx, q, p)
    a, b, L = q.a, q.b, q.length
    phi, Phi = rng(ctx, "phi", "Phi")
    lhs = abs(T_double(q, f"F^{p}", f"G^{p}"))
    sup_fp = q.sup("f") ** p
    span = (b ** p - a ** p) / (a ** p * b ** p)
    Lm = means(a, b).L_s(2 * p)
    if printed:
        gr = 0.25 * span * L ** p * (Phi ** p - max(phi, 0.0) ** p)
        lu = p * p * L ** 1.5 / PI ** 2 * (a * b) ** -(p + 0.5) * Lm ** (p / 2) \
            * q.lp(f"F^{p-1}f", 2)
    else:
        gr = 0.25 * span * L ** p * Phi ** p
        lu = p * p * L ** 1.5 / PI ** 2 * (a * b) ** -(p + 0.5) * Lm ** p * q.lp(f"F^{p-1}f", 2)
    return [
        C("chebyshev", lhs, L ** (p + 1) / 12 * p * p * a ** -(p + 1) * sup_fp),
        C("gruss", lhs, gr),
        C("lupas", lhs, lu),
        C("ostrowski", lhs, p / 8 * L ** p * span * sup_fp),
    ]


@spec("hardy_p_bounds", "Chebyshev, Gruss, Lupas and Ostrowski bounds for T(F^p, t^-p)",
      "|T(F^p,t^-p)|", ("a_positive", "f_nonneg", "f_range", "exponent_p"), "hardy_nonneg_p")
def _hardy_p_bounds(ctx, q, d):
    return _hardy_p_terms(ctx, q, d)


@spec("hardy_p_pre", "Pre-Gruss bound for T(F^p, t^-p)", "|T(F^p,t^-p)|",
      ("a_positive", "f_nonneg", "exponent_p"), "hardy_nonneg_p")
def _hardy_p_pre(ctx, q, d):
    p, _ = exponent_p(ctx)
    hardy_setup(ctx, q, p)
    a, b, L = q.a, q.b, q.length
    tg = abs((a * b ** (2 * p) - b * a ** (2 * p)) / (L * (2 * p - 1) * a ** (2 * p) * b ** (2 * p))
             - (a * b ** p - b * a ** p) ** 2 / (L * L * (p - 1) ** 2 * a ** (2 * p) * b ** (2 * p)))
    tf = max(T_double(q, f"F^{p}", f"F^{p}"), 0.0)
    return [C("pre-gruss", abs(T_double(q, f"F^{p}", f"G^{p}")), math.sqrt(tg * tf))]


@predicate("hardy_classified")
def _hardy_classified(ctx, q):
    hardy_setup(ctx, q)
    cF, cG = classify(q, "F", "one"), classify(q, "G", "one")
    return Precondition("hardy_classified", Monotonicity.NEITHER not in (cF, cG),
                        f"F: {cF}, 1/t: {cG}")


def _direction(q, fk, gk):
    same = classify(q, fk, "one") == classify(q, gk, "one")
    return same


def _log_mean_components(ctx, q, d, printed=False):
    hardy_setup(ctx, q)
    a, b = q.a, q.b
    F = q.fn("F")
    i_ft, i_f = q.integrate("hardy_lm", lambda t: F(t) / t, F)
    left, right = i_ft, i_f / means(a, b).L
    same = _direction(q, "F", "G")
    d["direction"] = ">=" if same else "<="
    ge = same if not printed else True
    out = [C("log mean", right, left) if ge else C("log mean", left, right)]
    if "p" in ctx.supplied_exponents:
        p, _ = exponent_p(ctx)
        vals = q.values("f", SCAN)
        if np.all(vals >= 0):
            hardy_setup(ctx, q, p)
            Fp = q.fn(f"F^{p}")
            j1, j2 = q.integrate(("hardy_lmp", p), lambda t: Fp(t) / t ** p, Fp)
            left = j1
            right = (a * b) ** (1 - p) * means(a, b).L_hardy(p) ** p * j2
            same_p = _direction(q, f"F^{p}", f"G^{p}")
            d["direction_p"] = ">=" if same_p else "<="
            ge = same_p if not printed else True
            out.append(C("log mean p", right, left) if ge else C("log mean p", left, right))
    return out


@spec("hardy_log_mean", "Hardy-Chebyshev direction with the logarithmic mean",
      "int F/t vs (1/L) int F", ("a_positive", "hardy_classified"), "hardy_nonneg_p",
      sign_check=True)
def _hardy_log_mean(ctx, q, d):
    return _log_mean_components(ctx, q, d)


@spec("hardy_convex", "Hardy functional bound for a convex Cesaro mean on [0, b]",
      "|T(Phi0,Phi0)|", ("a_zero", "exponent_p", "conjugate_pq", "p_le_q",
                         "cesaro_convex_positive"), "hardy_convex")
def _hardy_convex(ctx, q, d):
    p, qq = exponent_p(ctx)
    Phi = cesaro(ctx, q)
    q.register("Phi0", Phi)
    q.register("dPhi0", Phi.derivative)
    b = q.b
    c = b * p * qq * math.sin(PI / p) * math.sin(PI / qq) / (
        4 * PI ** 2 * (p - 1) ** (1 / p) * (qq - 1) ** (1 / qq))
    lhs = abs(T_double(q, "Phi0", "Phi0"))
    return [C("hardy convex", lhs, c * q.lp("dPhi0", p) * q.lp("dPhi0", qq))]


def _split_lp(fn, r, iv, points, cfg):
    """(int |fn|^r)^(1/r) with the interval split at the given points."""
    edges = [iv.a] + sorted(x for x in points if iv.a < x < iv.b) + [iv.b]
    tot = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, _, _ = integrate_rows(lambda s: np.abs(fn(s)) ** r * np.ones((1, s.size)), 1, lo, hi,
                                 cfg)
        tot += float(v[0])
    return tot ** (1 / r)


@spec("hardy_convex_half", "Midpoint deviation bounds for a convex Cesaro mean on [0, b]",
      "Lp deviations of Phi0", ("a_zero", "exponent_p", "conjugate_pq", "p_le_q",
                                "cesaro_convex_positive"), "hardy_convex")
def _hardy_convex_half(ctx, q, d):
    p, qq = exponent_p(ctx)
    Phi = cesaro(ctx, q)
    q.register("dPhi0", Phi.derivative)
    b = q.b
    mid = float(Phi(b / 2))
    mean = q.integrate("phi0_mean", Phi)[0] / b
    d["Phi0_mid"], d["Phi0_mean"] = mid, mean

    def dev_mid(x):
        return Phi(x) - mid

    def dev_mean(x):
        return Phi(x) - mean

    def C_r(r):
        return r * math.sin(PI / r) / (2 * PI * (r - 1) ** (1 / r)) * b

    mid_p = _split_lp(dev_mid, p, ctx.iv, [b / 2], ctx.cfg)
    mid_q = _split_lp(dev_mid, qq, ctx.iv, [b / 2], ctx.cfg)
    xs = ctx.iv.grid(SCAN)
    v = dev_mean(xs)
    cross = [0.5 * (xs[i] + xs[i + 1]) for i in np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))[0]]
    mean_q = _split_lp(dev_mean, qq, ctx.iv, cross, ctx.cfg)
    return [
        C("midpoint Lp", mid_p, C_r(p) * q.lp("dPhi0", p)),
        C("mean vs midpoint Lq", mean_q, mid_q),
        C("midpoint Lq", mid_q, C_r(qq) * q.lp("dPhi0", qq)),
    ]


# ------------------------------------------------------------ standalone inequalities

ETA_GRID = 65


@spec("milo_standalone", "Weighted Wirtinger inequality at every eta", "int w (F - F(eta))^2",
      ("w_positive", "f_differentiable"), "weighted_F")
def _milo(ctx, q, d):
    F, dF, w = q.fn("f"), q.fn("d:f"), q.fn("w")
    etas = ctx.iv.grid(ETA_GRID)
    Fe = np.asarray(F(etas), dtype=float)
    W = prefix_integral(w, ctx.iv, cfg=ctx.cfg)
    We = np.asarray(W(etas), dtype=float)
    Wtot = float(W(ctx.iv.b))

    lhs, _, _ = integrate_rows(lambda s: w(s)[None, :] * (F(s)[None, :] - Fe[:, None]) ** 2,
                               ETA_GRID, ctx.iv.a, ctx.iv.b, ctx.cfg)
    energy = q.integrate("milo_energy", lambda s: dF(s) ** 2 / w(s))[0]
    out = []
    for k, eta in enumerate(etas):
        rhs = 4 / PI ** 2 * max(We[k], Wtot - We[k]) ** 2 * energy
        out.append(C(f"eta={eta:.6g}", float(lhs[k]), rhs))
    return out


def _lp_const(p):
    return p ** p * math.sin(PI / p) ** p / (PI ** p * (p - 1))


@spec("monotone_deviation_lp", "Lp deviation from f(xi) for increasing f, every xi",
      "int |f - f(xi)|^p", ("f_increasing", "exponent_p"), "monotone_p")
def _monotone_dev(ctx, q, d):
    p, _ = exponent_p(ctx)
    f, df = q.fn("f"), q.fn("d:f")
    a, b = ctx.iv.a, ctx.iv.b
    xis = ctx.iv.grid(ETA_GRID + 2)[1:-1]
    fx = np.asarray(f(xis), dtype=float)

    def left(s):
        x = a + (xis[:, None] - a) * s[None, :]
        return np.abs(f(x) - fx[:, None]) ** p * (xis - a)[:, None]

    def right(s):
        x = xis[:, None] + (b - xis[:, None]) * s[None, :]
        return np.abs(f(x) - fx[:, None]) ** p * (b - xis)[:, None]

    cfg = ctx.cfg
    l1, _, _ = integrate_rows(left, xis.size, 0.0, 1.0, cfg)
    l2, _, _ = integrate_rows(right, xis.size, 0.0, 1.0, cfg)
    energy = q.integrate(("y1_energy", p), lambda s: np.maximum(df(s), 0.0) ** p)[0]
    c = _lp_const(p)
    out = []
    for k, xi in enumerate(xis):
        rhs = c * ((b - a) / 2 + abs(xi - (a + b) / 2)) ** p * energy
        out.append(C(f"xi={xi:.6g}", float(l1[k] + l2[k]), rhs))
    return out


# ------------------------------------------------------------ sign checks

def positivity_components(ctx, q, d):
    hk = "h" if ctx.h is not None else "x"
    cf, cg = classify(q, "f", hk), classify(q, "g", hk)
    fv = q.phat("f", "g", None if hk == "x" else "h")
    val = fv.double_form
    same = cf == cg
    d.update(class_f=str(cf), class_g=str(cg), value=val, product_form=fv.product_form,
             scale=fv.scale, direction=">= 0" if same else "<= 0")
    if same:
        return [C("P_h(f,g) >= 0", -val, 0.0)]
    return [C("P_h(f,g) <= 0", val, 0.0)]


@spec("positivity", "Sign of P_h for h-monotone pairs (first Chebyshev inequality at h = 1)",
      "P_h(f,g) vs 0", ("fg_h_classified",), "monotone_classes", sign_check=True)
def _positivity(ctx, q, d):
    return positivity_components(ctx, q, d)


RAMIFIED_H = ("1", "t", "1/f", "f'")


def ramified_cases(ctx, q):
    """(label, h key) pairs where h >= 0 and f, f'' are both h-monotone."""
    f = q.fn("f")
    q._funcs.setdefault("1/f", lambda x: 1.0 / f(x))
    keys = {"1": "one", "t": "x", "1/f": "1/f", "f'": "d:f"}
    out = []
    for lab in RAMIFIED_H:
        hk = keys[lab]
        if np.any(q.values(hk, SCAN) < 0):
            continue
        cf, cg = classify(q, "f", hk), classify(q, "dd:f", hk)
        if Monotonicity.NEITHER in (cf, cg):
            continue
        out.append((lab, hk, cf == cg))
    return out


@predicate("ramified_cases")
def _ramified_pred(ctx, q):
    cases = ramified_cases(ctx, q)
    return Precondition("ramified_cases", bool(cases),
                        "usable h: " + (", ".join(c[0] for c in cases) or "none"))


def _ramified_sides(ctx, q, lab, printed=False):
    """(left, right) with P_h(f, f'') >= 0 equivalent to left >= right."""
    a, b, L = q.a, q.b, q.length
    f, df, d2 = q.fn("f"), q.fn("d:f"), q.fn("dd:f")
    fa, fb = float(f(a)), float(f(b))
    da, db = float(df(a)), float(df(b))
    if lab == "1":
        i_ff2, i_f = q.integrate("r1", lambda x: f(x) * d2(x), f)
        return i_ff2, (db - da) / L * i_f
    if lab == "t":
        i_ff2, i_xf = q.integrate("rt", lambda x: f(x) * d2(x), lambda x: x * f(x))
        if printed:
            coef = b * fb - a * fa - (fb - fa)
        else:
            coef = b * db - a * da - (fb - fa)
        return (b ** 3 - a ** 3) / 3 * i_ff2, coef * i_xf
    if lab == "1/f":
        i_inv, i_ff2, i_q = q.integrate("rinv", lambda x: f(x) ** -2, lambda x: f(x) * d2(x),
                                        lambda x: d2(x) / f(x))
        return i_inv * i_ff2, L * i_q
    i_d2, i_ff2 = q.integrate("rd", lambda x: df(x) ** 2, lambda x: f(x) * d2(x))
    return i_d2 * i_ff2, 0.25 * (fb ** 2 - fa ** 2) * (db ** 2 - da ** 2)


def ramified_components(ctx, q, d, printed=False):
    out = []
    for lab, hk, same in ramified_cases(ctx, q):
        left, right = _ramified_sides(ctx, q, lab, printed)
        d[f"h={lab}"] = ">=" if same else "<="
        out.append(C(f"h={lab}", right, left) if same else C(f"h={lab}", left, right))
    return out


@spec("ramified_derivative_set", "Sign of P_h(f, f'') for h in {1, t, 1/f, f'}",
      "P_h(f,f'') vs 0", ("f_twice_differentiable", "f_positive", "ramified_cases"),
      "ramified", sign_check=True)
def _ramified(ctx, q, d):
    return ramified_components(ctx, q, d)
