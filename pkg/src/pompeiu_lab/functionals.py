"""Chebyshev, Pompeiu-Chebyshev and Hardy-Chebyshev functionals.

Each functional ``P_h(f, g) = int h^2 int fg - int fh int hg`` has a product
form and a double-integral form

    P_h(f, g) = 1/2 iint (h(x)f(t) - h(t)f(x)) (h(x)g(t) - h(t)g(x)) dt dx.

The double-form integrand is symmetric in (x, t), so it is integrated over
the triangle t <= x only.  Both forms are returned in a FunctionalValue so
callers can check the identity.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .expr import Expr, ParamEnv, as_expr, compile_expr, differentiate
from .quad import (DEFAULT, FunctionLike, Interval, QuadConfig, as_callable,
                   integrate2d, integrate_rows)

IDENTITY_RTOL = 1e-7
SAMPLE_POINTS = 1025
PREFIX_NODES = 257
CESARO_EPS = 1e-8


class PreconditionError(ValueError):
    """Inputs violate a hypothesis of the functional or theorem."""


@dataclass(frozen=True)
class FunctionalValue:
    product_form: float
    double_form: Optional[float] = None
    discrepancy: float = 0.0
    scale: float = 0.0

    @property
    def value(self) -> float:
        return self.product_form

    def identity_holds(self, rtol: float = IDENTITY_RTOL) -> bool:
        if self.double_form is None:
            return True
        return self.discrepancy <= rtol * (1.0 + abs(self.product_form))


def _fv(product, double=None, scale=0.0):
    product = float(product)
    if double is None:
        return FunctionalValue(product, None, 0.0, float(scale))
    double = float(double)
    return FunctionalValue(product, double, abs(product - double), float(scale))


def integrals(funcs: Sequence[Callable], iv: Interval, cfg: QuadConfig = DEFAULT):
    """Integrate several vectorized callables on one shared panel set."""
    funcs = list(funcs)

    def rows(s):
        return np.stack([np.broadcast_to(np.asarray(fn(s), dtype=float), s.shape)
                         for fn in funcs])

    vals, _, _ = integrate_rows(rows, len(funcs), iv.a, iv.b, cfg)
    return [float(v) for v in vals]


def _sample(fn, iv: Interval, n: int = SAMPLE_POINTS):
    return np.asarray(fn(iv.grid(n)), dtype=float)


def _require_positive_a(iv: Interval, what: str):
    if not iv.a > 0:
        raise PreconditionError(f"{what} requires a > 0, got a = {iv.a}")


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _ident(x):
    return np.asarray(x, dtype=float)


# ------------------------------------------------------------ Chebyshev / P

def chebyshev_T(f: FunctionLike, g: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
                cfg: QuadConfig = DEFAULT) -> FunctionalValue:
    """Mean of the product minus the product of the means."""
    fa, ga = as_callable(f, env), as_callable(g, env)
    ifg, i_f, i_g = integrals([lambda x: fa(x) * ga(x), fa, ga], iv, cfg)
    n = iv.length
    return _fv(ifg / n - (i_f / n) * (i_g / n), scale=abs(ifg) / n + abs(i_f * i_g) / n ** 2)


def pompeiu_P(f: FunctionLike, g: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
              cfg: QuadConfig = DEFAULT) -> float:
    """int fg - 3/(b^3 - a^3) int xf int xg, defined for 0 < a < b."""
    _require_positive_a(iv, "pompeiu_P")
    fa, ga = as_callable(f, env), as_callable(g, env)
    ifg, ixf, ixg = integrals([lambda x: fa(x) * ga(x), lambda x: x * fa(x),
                               lambda x: x * ga(x)], iv, cfg)
    return ifg - 3.0 / (iv.b ** 3 - iv.a ** 3) * ixf * ixg


# ------------------------------------------------------------ P_h family

def _phat_h(fa, ga, ha, wa, iv, cfg, double):
    if wa is None:
        w = _one
    else:
        w = wa
    ihh, ifg, ifh, igh = integrals([lambda x: w(x) * ha(x) ** 2,
                                    lambda x: w(x) * fa(x) * ga(x),
                                    lambda x: w(x) * fa(x) * ha(x),
                                    lambda x: w(x) * ga(x) * ha(x)], iv, cfg)
    product = ihh * ifg - ifh * igh
    iafg = integrals([lambda x: w(x) * np.abs(fa(x) * ga(x))], iv, cfg)[0]
    scale = abs(ihh) * iafg + abs(ifh * igh)
    if not double:
        return _fv(product, scale=scale)

    def kern(x, t):
        hx, ht = ha(x), ha(t)
        k = (hx * fa(t) - ht * fa(x)) * (hx * ga(t) - ht * ga(x))
        if wa is not None:
            k = k * wa(x) * wa(t)
        return k

    d = integrate2d(kern, iv, cfg, region="lower").value
    return _fv(product, d, scale)


def pompeiu_Phat(f: FunctionLike, g: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
                 cfg: QuadConfig = DEFAULT, *, double: bool = True) -> FunctionalValue:
    """(b^3 - a^3)/3 int fg - int xf int xg, i.e. P_h with h(x) = x."""
    return _phat_h(as_callable(f, env), as_callable(g, env), _ident, None, iv, cfg, double)


def general_Phat_h(f: FunctionLike, g: FunctionLike, h: FunctionLike, iv: Interval,
                   env: Optional[ParamEnv] = None, cfg: QuadConfig = DEFAULT, *,
                   double: bool = True) -> FunctionalValue:
    return _phat_h(as_callable(f, env), as_callable(g, env), as_callable(h, env), None,
                   iv, cfg, double)


def _check_weight(wa, iv):
    ws = _sample(wa, iv)
    if not np.all(ws > 0):
        i = int(np.argmin(ws))
        raise PreconditionError(f"weight must be positive; w({iv.grid(SAMPLE_POINTS)[i]:.6g})"
                                f" = {ws[i]:.6g}")


def weighted_Phat_h(f: FunctionLike, g: FunctionLike, h: FunctionLike, p: FunctionLike,
                    iv: Interval, env: Optional[ParamEnv] = None, cfg: QuadConfig = DEFAULT, *,
                    double: bool = True) -> FunctionalValue:
    """int p h^2 int p fg - int p hg int p hf for a positive weight p."""
    wa = as_callable(p, env)
    _check_weight(wa, iv)
    return _phat_h(as_callable(f, env), as_callable(g, env), as_callable(h, env), wa,
                   iv, cfg, double)


def andreief(F1: FunctionLike, F2: FunctionLike, G1: FunctionLike, G2: FunctionLike,
             iv: Interval, env: Optional[ParamEnv] = None, cfg: QuadConfig = DEFAULT, *,
             weight: Optional[FunctionLike] = None) -> FunctionalValue:
    """int F1F2 int G1G2 - int F1G2 int F2G1 against its determinant double integral."""
    f1, f2, g1, g2 = (as_callable(u, env) for u in (F1, F2, G1, G2))
    wa = None if weight is None else as_callable(weight, env)
    if wa is not None:
        _check_weight(wa, iv)
    w = _one if wa is None else wa
    a11, a22, a12, a21 = integrals([lambda x: w(x) * f1(x) * f2(x),
                                    lambda x: w(x) * g1(x) * g2(x),
                                    lambda x: w(x) * f1(x) * g2(x),
                                    lambda x: w(x) * f2(x) * g1(x)], iv, cfg)
    product = a11 * a22 - a12 * a21

    def kern(x, t):
        k = (f1(x) * g1(t) - f1(t) * g1(x)) * (f2(x) * g2(t) - f2(t) * g2(x))
        if wa is not None:
            k = k * wa(x) * wa(t)
        return k

    d = integrate2d(kern, iv, cfg, region="lower").value
    return _fv(product, d, abs(a11 * a22) + abs(a12 * a21))


# ------------------------------------------------------------ prefix integrals

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class PrefixIntegral:
    """F(x) = int_a^x phi, from a cumulative table plus a local Gauss correction.

    The cell integrals between 257 equispaced nodes are computed once by
    adaptive quadrature; F(x) adds a 16-point Gauss-Legendre integral from
    the nearest node.  Evaluation is vectorized over any array shape.
    """

    def __init__(self, phi: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
                 cfg: QuadConfig = DEFAULT, nodes: int = PREFIX_NODES):
        self.phi = as_callable(phi, env)
        self.iv = iv
        self.nodes = iv.grid(nodes)
        self.width = iv.length / (nodes - 1)
        lo = self.nodes[:-1]
        w = self.width
        cell_cfg = QuadConfig(cfg.abs_tol / (nodes - 1), cfg.rel_tol, cfg.max_subdivisions)
        cells, _, _ = integrate_rows(
            lambda s: np.asarray(self.phi(lo[:, None] + w * s[None, :]), dtype=float) * w,
            nodes - 1, 0.0, 1.0, cell_cfg)
        cum = np.empty(nodes)
        cum[0] = 0.0
        for k in range(1, nodes):
            cum[k] = math.fsum(cells[:k])
        self.table = cum

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        k = np.clip(np.rint((xa - self.iv.a) / self.width), 0, self.nodes.size - 1).astype(int)
        x0 = self.nodes[k]
        d = xa - x0
        t = x0[..., None] + d[..., None] * (1.0 + _GL_X) * 0.5
        corr = np.asarray(self.phi(t), dtype=float) @ _GL_W * d * 0.5
        out = self.table[k] + corr
        return float(out) if np.ndim(x) == 0 else out


_PREFIX_CACHE: "OrderedDict[tuple, PrefixIntegral]" = OrderedDict()
_PREFIX_CACHE_SIZE = 64


def prefix_integral(phi: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
                    cfg: QuadConfig = DEFAULT) -> PrefixIntegral:
    """PrefixIntegral, cached by (expr, env, interval, cfg) for expression input."""
    if callable(phi):
        return PrefixIntegral(phi, iv, env, cfg)
    e = as_expr(phi)
    key = (e, tuple(sorted((env or {}).items())), iv, cfg)
    hit = _PREFIX_CACHE.get(key)
    if hit is None:
        hit = PrefixIntegral(phi, iv, env, cfg)
        _PREFIX_CACHE[key] = hit
        if len(_PREFIX_CACHE) > _PREFIX_CACHE_SIZE:
            _PREFIX_CACHE.popitem(last=False)
    else:
        _PREFIX_CACHE.move_to_end(key)
    return hit


# ------------------------------------------------------------ Hardy functionals

def int_t_pow(p: float, iv: Interval) -> float:
    """int_a^b t^-p for p > 1, as (a b^p - b a^p) / ((p - 1) a^p b^p)."""
    a, b = iv.a, iv.b
    return (a * b ** p - b * a ** p) / ((p - 1.0) * a ** p * b ** p)


def hardy_H(phi: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
            cfg: QuadConfig = DEFAULT) -> float:
    """(b - a) int F/t - ln(b/a) int F with F(x) = int_a^x phi."""
    _require_positive_a(iv, "hardy_H")
    F = prefix_integral(phi, iv, env, cfg)
    i1, i2 = integrals([lambda t: F(t) / t, F], iv, cfg)
    return iv.length * i1 - math.log(iv.b / iv.a) * i2


def hardy_H_h(phi: FunctionLike, h: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
              cfg: QuadConfig = DEFAULT) -> float:
    """int h^2 int F/t - int hF int h/t."""
    _require_positive_a(iv, "hardy_H_h")
    F = prefix_integral(phi, iv, env, cfg)
    ha = as_callable(h, env)
    ihh, ift, ihf, iht = integrals([lambda t: ha(t) ** 2, lambda t: F(t) / t,
                                    lambda t: ha(t) * F(t), lambda t: ha(t) / t], iv, cfg)
    return ihh * ift - ihf * iht


def _nonneg_on_grid(fn, iv, what):
    vals = _sample(fn, iv)
    if np.any(vals < 0):
        i = int(np.argmin(vals))
        raise PreconditionError(f"{what} must be non-negative; value {vals[i]:.6g} at "
                                f"x = {iv.grid(SAMPLE_POINTS)[i]:.6g}")


def hardy_Hp(phi: FunctionLike, p: float, iv: Interval, env: Optional[ParamEnv] = None,
             cfg: QuadConfig = DEFAULT, *, h: Optional[FunctionLike] = None) -> float:
    """Hardy functional of F^p and t^-p.

    Without ``h``: (b - a) int (F/t)^p - int t^-p int F^p.
    With ``h``: int h^2 int (F/t)^p - int h F^p int h t^-p.
    """
    _require_positive_a(iv, "hardy_Hp")
    if not p > 1:
        raise PreconditionError(f"hardy_Hp requires p > 1, got {p}")
    pa = as_callable(phi, env)
    _nonneg_on_grid(pa, iv, "phi")
    F = prefix_integral(phi, iv, env, cfg)

    def Fp(t):
        return np.maximum(F(t), 0.0) ** p

    if h is None:
        i1, i2 = integrals([lambda t: Fp(t) / t ** p, Fp], iv, cfg)
        return iv.length * i1 - int_t_pow(p, iv) * i2
    ha = as_callable(h, env)
    ihh, i1, ihf, iht = integrals([lambda t: ha(t) ** 2, lambda t: Fp(t) / t ** p,
                                   lambda t: ha(t) * Fp(t), lambda t: ha(t) / t ** p], iv, cfg)
    return ihh * i1 - ihf * iht


class CesaroMean:
    """Phi_a(x) = (1/(x - a)) int_a^x phi and its derivative.

    Near x = a the removable singularity is replaced by the limit phi(a)
    (for x - a < 1e-8).  The derivative (phi - Phi_a)/(x - a) switches to a
    three-term Taylor expansion close to a when phi is an expression.
    """

    def __init__(self, phi: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
                 cfg: QuadConfig = DEFAULT):
        self.iv = iv
        self.phi = as_callable(phi, env)
        self.F = prefix_integral(phi, iv, env, cfg)
        e = getattr(self.phi, "expr", None)
        if e is None and not callable(phi):
            e = as_expr(phi)
        self._taylor = None
        if e is not None:
            d1 = differentiate(e)
            d2 = differentiate(d1)
            d3 = differentiate(d2)
            a = iv.a
            self._taylor = tuple(float(compile_expr(d, env)(np.array([a]))[0])
                                 for d in (d1, d2, d3))
        self.taylor_width = 1e-4 * max(1.0, iv.length)

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        d = xa - self.iv.a
        small = d < CESARO_EPS
        safe = np.where(small, 1.0, d)
        out = np.where(small, self.phi(np.where(small, self.iv.a, xa)), self.F(xa) / safe)
        return float(out) if np.ndim(x) == 0 else out

    def derivative(self, x):
        xa = np.asarray(x, dtype=float)
        d = xa - self.iv.a
        if self._taylor is not None:
            near = d < self.taylor_width
            p1, p2, p3 = self._taylor
            series = p1 / 2.0 + p2 * d / 3.0 + p3 * d * d / 8.0
        else:
            near = d < CESARO_EPS
            series = np.zeros_like(d)
        safe = np.where(near, 1.0, d)
        direct = (self.phi(xa) - self(xa)) / safe
        out = np.where(near, series, direct)
        return float(out) if np.ndim(x) == 0 else out


def hardy_phi_functional(phi: FunctionLike, a: float, b: float, env: Optional[ParamEnv] = None,
                         cfg: QuadConfig = DEFAULT) -> float:
    """Chebyshev functional T(Phi_a, Phi_a) on [a, b], a >= 0."""
    if not a >= 0:
        raise PreconditionError(f"hardy_phi_functional requires a >= 0, got {a}")
    iv = Interval(a, b)
    Phi = CesaroMean(phi, iv, env, cfg)
    return chebyshev_T(Phi, Phi, iv, cfg=cfg).product_form


# ------------------------------------------------------------ ramified forms

@dataclass(frozen=True)
class RamifiedForms:
    """P_{f'}(f, 1/f) and P_{f'}(f, f) by closed form, with generic cross-checks.

    ``self_as_printed`` keeps the variant [f^2(b) - f^2(a)] int f'^2 - ...,
    which does not equal P_{f'}(f, f); ``self_closed`` is the correct
    int f'^2 int f^2 - (1/4)[f^2(b) - f^2(a)]^2.
    """
    recip_closed: float
    self_closed: float
    self_as_printed: float
    recip_generic: FunctionalValue
    self_generic: FunctionalValue

    def as_pair(self):
        return self.recip_closed, self.self_closed

    def consistent(self, rtol: float = IDENTITY_RTOL) -> bool:
        return (abs(self.recip_closed - self.recip_generic.product_form)
                <= rtol * (1 + abs(self.recip_generic.product_form) + self.recip_generic.scale)
                and abs(self.self_closed - self.self_generic.product_form)
                <= rtol * (1 + abs(self.self_generic.product_form) + self.self_generic.scale))


def ramified_fprime_closed_forms(f, iv: Interval, env: Optional[ParamEnv] = None,
                                 cfg: QuadConfig = DEFAULT) -> RamifiedForms:
    e = f.expr if callable(f) and hasattr(f, "expr") else as_expr(f)
    fa = compile_expr(e, env)
    dfa = compile_expr(differentiate(e), env)
    if not np.all(_sample(fa, iv) > 0):
        raise PreconditionError("f must be positive on [a, b]")
    fA, fB = fa(iv.a), fa(iv.b)
    if fA == fB:
        raise PreconditionError("f(a) = f(b); the closed forms degenerate")
    idd, iff = integrals([lambda x: dfa(x) ** 2, lambda x: fa(x) ** 2], iv, cfg)
    dsq = fB ** 2 - fA ** 2
    recip = iv.length * idd - 0.5 * dsq * (math.log(fB) - math.log(fA))
    self_closed = idd * iff - 0.25 * dsq ** 2
    printed = dsq * idd - 0.25 * dsq ** 2
    g_recip = general_Phat_h(fa, lambda x: 1.0 / fa(x), dfa, iv, cfg=cfg)
    g_self = general_Phat_h(fa, fa, dfa, iv, cfg=cfg)
    return RamifiedForms(recip, self_closed, printed, g_recip, g_self)


# ------------------------------------------------------------ means

def _rel_power_mean(u: float, s: float) -> float:
    """((1+u)^s - 1)/(s u) with the u -> 0 limit 1."""
    if u == 0:
        return 1.0
    return math.expm1(s * math.log1p(u)) / (s * u)


@dataclass(frozen=True)
class Means:
    """Arithmetic, logarithmic and generalized logarithmic means of 0 < a <= b."""
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b >= self.a):
            raise ValueError(f"means need 0 < a <= b, got a={self.a}, b={self.b}")

    @property
    def A(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def L(self) -> float:
        d = self.b - self.a
        if d == 0:
            return self.a
        return d / math.log1p(d / self.a)

    def L_s(self, s: float) -> float:
        """[(b^(s+1) - a^(s+1)) / ((s+1)(b-a))]^(1/s)."""
        if s in (0, -1):
            raise ValueError("L_s is undefined for s in {-1, 0}")
        u = (self.b - self.a) / self.a
        return self.a * _rel_power_mean(u, s + 1.0) ** (1.0 / s)

    def L_hardy(self, p: float) -> float:
        """[(b^(p-1) - a^(p-1)) / ((p-1)(b-a))]^(1/p), p > 1."""
        if not p > 1:
            raise ValueError("L_hardy needs p > 1")
        u = (self.b - self.a) / self.a
        return (self.a ** (p - 2.0) * _rel_power_mean(u, p - 1.0)) ** (1.0 / p)


def means(a: float, b: float) -> Means:
    return Means(a, b)
