"""Machine-checkable preconditions shared by the catalog entries.

A predicate returns a Precondition.  It raises MissingContextError when the
context does not carry the data it needs, and reports ``satisfied=False``
when supplied data fails verification on a 1025-point scan.
"""
from __future__ import annotations

import math

import numpy as np

from ..functionals import CesaroMean
from ..mvt import Monotonicity, h_monotonicity
from ..quad import Interval
from .context import MissingContextError
from .core import Precondition, predicate

SCAN = 1025
HOLDER_GRID = 257
VERIFY_RTOL = 1e-12
JACOBIAN_TOL = 1e-12


def _ok(name, cond, detail=""):
    return Precondition(name, bool(cond), detail)


def supplied(mapping, keys, what):
    missing = [k for k in keys if k not in mapping]
    if missing:
        raise MissingContextError(f"{what} requires {', '.join(missing)}")
    return [mapping[k] for k in keys]


def exponent_p(ctx):
    """Supplied Lebesgue exponent p and its conjugate q."""
    p, = supplied(ctx.supplied_exponents, ["p"], "this entry")
    if p == math.inf:
        q = 1.0
    elif p == 1:
        q = math.inf
    else:
        q = p / (p - 1.0)
    return p, ctx.supplied_exponents.get("q", q)


@predicate("a_positive")
def _a_positive(ctx, q):
    return _ok("a_positive", ctx.iv.a > 0, f"a = {ctx.iv.a:.17g}")


@predicate("a_zero")
def _a_zero(ctx, q):
    return _ok("a_zero", ctx.iv.a == 0, f"a = {ctx.iv.a:.17g}")


def _finite(name, q, key):
    v = q.values(key, SCAN)
    return _ok(name, np.all(np.isfinite(v)), "" if np.all(np.isfinite(v)) else "non-finite")


@predicate("f_differentiable")
def _f_diff(ctx, q):
    q.expr("f")
    return _finite("f_differentiable", q, "d:f")


@predicate("g_differentiable")
def _g_diff(ctx, q):
    q.expr("g")
    return _finite("g_differentiable", q, "d:g")


@predicate("f_twice_differentiable")
def _f_diff2(ctx, q):
    q.expr("f")
    return _finite("f_twice_differentiable", q, "dd:f")


@predicate("g_given")
def _g_given(ctx, q):
    if ctx.g is None:
        raise MissingContextError("this entry requires g")
    return _ok("g_given", True)


@predicate("h_given")
def _h_given(ctx, q):
    if ctx.h is None:
        raise MissingContextError("this entry requires h")
    return _ok("h_given", True)


def _sign(name, q, key, strict, label):
    v = q.values(key, SCAN)
    good = np.all(v > 0) if strict else np.all(v >= 0)
    worst = float(np.min(v))
    return _ok(name, good, f"min {label} on scan = {worst:.6g}")


@predicate("h_nonneg")
def _h_nonneg(ctx, q):
    _h_given(ctx, q)
    return _sign("h_nonneg", q, "h", False, "h")


@predicate("h_nonvanishing")
def _h_nonvan(ctx, q):
    _h_given(ctx, q)
    v = q.values("h", SCAN)
    good = np.all(v > 0) or np.all(v < 0)
    return _ok("h_nonvanishing", good, f"min |h| on scan = {float(np.min(np.abs(v))):.6g}")


@predicate("fg_nonvanishing")
def _fg_nonvan(ctx, q):
    _g_given(ctx, q)
    fv, gv = q.values("f", SCAN), q.values("g", SCAN)
    good = (np.all(fv > 0) or np.all(fv < 0)) and (np.all(gv > 0) or np.all(gv < 0))
    return _ok("fg_nonvanishing", good,
               f"min |f| = {float(np.min(np.abs(fv))):.6g}, min |g| = {float(np.min(np.abs(gv))):.6g}")


@predicate("f_positive")
def _f_pos(ctx, q):
    return _sign("f_positive", q, "f", True, "f")


@predicate("f_nonneg")
def _f_nonneg(ctx, q):
    return _sign("f_nonneg", q, "f", False, "f")


@predicate("f_increasing")
def _f_inc(ctx, q):
    q.expr("f")
    return _sign("f_increasing", q, "d:f", False, "f'")


@predicate("w_positive")
def _w_pos(ctx, q):
    if ctx.w is None:
        if not ctx.iv.a > 0:
            return _ok("w_positive", False, "default weight s^2 needs a > 0")
        q.register("w", lambda s: np.asarray(s, dtype=float) ** 2)
    return _sign("w_positive", q, "w", True, "w")


def _verify_range(name, ctx, q, key, lo_key, hi_key):
    lo, hi = supplied(ctx.supplied_range_bounds, [lo_key, hi_key], name)
    v = q.values(key, SCAN)
    tol_lo = VERIFY_RTOL * (1 + abs(lo))
    tol_hi = VERIFY_RTOL * (1 + abs(hi))
    good = lo <= hi and np.all(v >= lo - tol_lo) and np.all(v <= hi + tol_hi)
    return _ok(name, good, f"scan range [{float(v.min()):.6g}, {float(v.max()):.6g}] vs "
                           f"[{lo:.6g}, {hi:.6g}]")


@predicate("f_range")
def _f_range(ctx, q):
    return _verify_range("f_range", ctx, q, "f", "phi", "Phi")


@predicate("g_range")
def _g_range(ctx, q):
    _g_given(ctx, q)
    return _verify_range("g_range", ctx, q, "g", "gamma", "Gamma")


@predicate("f_range_nonneg")
def _f_range_nn(ctx, q):
    lo, = supplied(ctx.supplied_range_bounds, ["phi"], "f_range_nonneg")
    return _ok("f_range_nonneg", lo >= 0, f"phi = {lo:.6g}")


@predicate("g_range_nonneg")
def _g_range_nn(ctx, q):
    lo, = supplied(ctx.supplied_range_bounds, ["gamma"], "g_range_nonneg")
    return _ok("g_range_nonneg", lo >= 0, f"gamma = {lo:.6g}")


@predicate("jacobian_nonzero")
def _jac(ctx, q):
    phi, Phi, gamma, Gamma = supplied(ctx.supplied_range_bounds,
                                      ["phi", "Phi", "gamma", "Gamma"], "jacobian_nonzero")
    J = phi * Gamma - Phi * gamma
    return _ok("jacobian_nonzero", abs(J) > JACOBIAN_TOL, f"phi*Gamma - Phi*gamma = {J:.6g}")


@predicate("f_ne_g")
def _f_ne_g(ctx, q):
    _g_given(ctx, q)
    if ctx.f == ctx.g:
        return _ok("f_ne_g", False, "f and g are the same expression")
    fv, gv = q.values("f", SCAN), q.values("g", SCAN)
    scale = 1.0 + float(np.max(np.abs(fv)))
    diff = float(np.max(np.abs(fv - gv)))
    return _ok("f_ne_g", diff > VERIFY_RTOL * scale, f"max |f - g| on scan = {diff:.6g}")


def _verify_ratio(name, ctx, q, key, lo_key, hi_key):
    lo, hi = supplied(ctx.supplied_range_bounds, [lo_key, hi_key], name)
    _h_given(ctx, q)
    v, hv = q.values(key, SCAN), q.values("h", SCAN)
    good = hi >= lo > 0 and np.all(v >= lo * hv - VERIFY_RTOL * (1 + np.abs(lo * hv))) \
        and np.all(v <= hi * hv + VERIFY_RTOL * (1 + np.abs(hi * hv)))
    return _ok(name, good, f"{lo_key} = {lo:.6g}, {hi_key} = {hi:.6g}")


@predicate("f_ratio_bounds")
def _f_ratio(ctx, q):
    return _verify_ratio("f_ratio_bounds", ctx, q, "f", "m", "M")


@predicate("g_ratio_bounds")
def _g_ratio(ctx, q):
    _g_given(ctx, q)
    return _verify_ratio("g_ratio_bounds", ctx, q, "g", "n", "N")


@predicate("exponent_p")
def _exp_p(ctx, q):
    p, qq = exponent_p(ctx)
    return _ok("exponent_p", 1 < p < math.inf, f"p = {p:.6g}")


@predicate("conjugate_pq")
def _conj(ctx, q):
    p, qq = exponent_p(ctx)
    s = (0.0 if p == math.inf else 1.0 / p) + (0.0 if qq == math.inf else 1.0 / qq)
    return _ok("conjugate_pq", abs(s - 1.0) <= 1e-12, f"1/p + 1/q = {s:.17g}")


@predicate("p_le_q")
def _p_le_q(ctx, q):
    p, qq = exponent_p(ctx)
    return _ok("p_le_q", p <= qq, f"p = {p:.6g}, q = {qq:.6g}")


@predicate("alpha_conjugate")
def _alpha(ctx, q):
    e = ctx.supplied_exponents
    if "alpha" not in e:
        return _ok("alpha_conjugate", True, "alpha not supplied; Holder-split component skipped")
    al = e["alpha"]
    be = e.get("beta", al / (al - 1.0) if al > 1 else math.nan)
    good = al > 1 and be > 1 and abs(1 / al + 1 / be - 1) <= 1e-12
    return _ok("alpha_conjugate", good, f"alpha = {al:.6g}, beta = {be:.6g}")


def holder_estimate(u: np.ndarray, xs: np.ndarray, order: float) -> float:
    """max over grid pairs of |u_i - u_j| / |x_i - x_j|^order."""
    du = np.abs(u[:, None] - u[None, :])
    dx = np.abs(xs[:, None] - xs[None, :])
    iu = np.triu_indices(xs.size, 1)
    return float(np.max(du[iu] / dx[iu] ** order))


def holder_data(ctx, q, num: str, den: str, which: int):
    """Holder constant and order of num/den; supplied values are verified.

    Returns (H, order, estimated, detail).
    """
    hk, ok = ("H1", "p") if which == 1 else ("H2", "q")
    hd = ctx.supplied_holder
    order = hd.get(ok, 1.0)
    key = ("holder", num, den, order)

    def run():
        xs = ctx.iv.grid(HOLDER_GRID)
        u = np.asarray(q.fn(num)(xs), dtype=float) / np.asarray(q.fn(den)(xs), dtype=float)
        return holder_estimate(u, xs, order)
    est = q.get(key, run)
    if hk in hd:
        return hd[hk], order, False, est
    return est, order, True, est


def _holder_pred(name, ctx, q, num, den, which):
    hd = ctx.supplied_holder
    ok = "p" if which == 1 else "q"
    order = hd.get(ok, 1.0)
    if not 0 < order <= 1:
        return _ok(name, False, f"Holder order {order:.6g} outside (0, 1]")
    H, order, estimated, est = holder_data(ctx, q, num, den, which)
    if estimated:
        return _ok(name, True, f"estimated H = {H:.6g} of order {order:.6g} on a "
                               f"{HOLDER_GRID}^2 grid")
    return _ok(name, H >= est * (1 - 1e-9), f"supplied H = {H:.6g}, grid estimate {est:.6g}")


@predicate("holder_f_over_h")
def _hfh(ctx, q):
    return _holder_pred("holder_f_over_h", ctx, q, "f", "h", 1)


@predicate("holder_g_over_h")
def _hgh(ctx, q):
    return _holder_pred("holder_g_over_h", ctx, q, "g", "h", 2)


@predicate("holder_h_over_f")
def _hhf(ctx, q):
    return _holder_pred("holder_h_over_f", ctx, q, "h", "f", 1)


@predicate("holder_h_over_g")
def _hhg(ctx, q):
    return _holder_pred("holder_h_over_g", ctx, q, "h", "g", 2)


@predicate("holder_f_over_x")
def _hfx(ctx, q):
    return _holder_pred("holder_f_over_x", ctx, q, "f", "x", 1)


@predicate("holder_g_over_x")
def _hgx(ctx, q):
    return _holder_pred("holder_g_over_x", ctx, q, "g", "x", 2)


def cesaro(ctx, q) -> CesaroMean:
    return q.get("cesaro", lambda: CesaroMean(q.expr("f"), ctx.iv, ctx.env, ctx.cfg))


@predicate("cesaro_convex_positive")
def _ces(ctx, q):
    Phi = cesaro(ctx, q)
    xs = ctx.iv.grid(SCAN)
    v = np.asarray(Phi(xs), dtype=float)
    d2 = v[:-2] - 2 * v[1:-1] + v[2:]
    tol = 1e-10 * (1 + float(np.max(np.abs(v))))
    good = np.all(v > 0) and np.all(d2 >= -tol)
    return _ok("cesaro_convex_positive", good,
               f"min Phi0 = {float(v.min()):.6g}, min second difference = {float(d2.min()):.3g}")


def classify(q, fkey, hkey):
    return q.get(("mono", fkey, hkey), lambda: h_monotonicity(q.fn(fkey), q.fn(hkey), q.iv))


@predicate("fg_h_classified")
def _fg_cls(ctx, q):
    _g_given(ctx, q)
    hk = "h" if ctx.h is not None else "x"
    if hk == "h":
        bad = _sign("h_nonneg", q, "h", False, "h")
        if not bad.satisfied:
            return _ok("fg_h_classified", False, bad.detail)
    elif not ctx.iv.a >= 0:
        return _ok("fg_h_classified", False, "default h(x) = x needs a >= 0")
    cf, cg = classify(q, "f", hk), classify(q, "g", hk)
    good = Monotonicity.NEITHER not in (cf, cg)
    return _ok("fg_h_classified", good, f"f: {cf}, g: {cg}")
