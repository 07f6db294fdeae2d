"""Adaptive Gauss-Kronrod quadrature, iterated 2D integrals and norms.

All integrators share one engine, :func:`integrate_rows`, which integrates a
batch of functions over a common interval on a shared panel set.  A single
1D integral is a batch of one; the inner integrals of a 2D integral are a
batch indexed by the outer nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .expr import Expr, ParamEnv, compile_expr

# 7-point Gauss / 15-point Kronrod (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # ascending, 15 nodes
K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[1:7:2] = _WG[:3]
G_WEIGHTS[7] = _WG[3]
G_WEIGHTS[9:15:2] = _WG[2::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


class QuadratureError(RuntimeError):
    """Raised when the adaptive scheme exhausts its subdivision budget."""

    def __init__(self, message, value=float("nan"), err_estimate=float("inf")):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("interval endpoints must be finite")
        if not b > a:
            raise ValueError(f"interval requires b > a, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def positive(self) -> bool:
        return self.a > 0

    @property
    def length(self) -> float:
        return self.b - self.a

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.a, self.b, n)


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: float
    err_estimate: float
    subdivisions: int


DEFAULT = QuadConfig()
OUTER_TOL = 1e-8

FunctionLike = Union[str, Expr, Callable[[np.ndarray], np.ndarray]]


def as_callable(f: FunctionLike, env: Optional[ParamEnv] = None) -> Callable:
    if callable(f) and not isinstance(f, type):
        return f
    return compile_expr(f, env)


def _gk_panels(func, n_rows, lo, hi):
    """Kronrod values and QUADPACK-style error estimates for every panel.

    Returns arrays of shape (n_rows, n_panels).
    """
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    s = (c[:, None] + h[:, None] * NODES[None, :]).ravel()
    v = np.asarray(func(s), dtype=float)
    v = np.broadcast_to(v, (n_rows, s.size)).reshape(n_rows, lo.size, 15)
    if not np.all(np.isfinite(v)):
        raise QuadratureError("integrand is not finite at a quadrature node")
    k = v @ K_WEIGHTS
    g = v @ G_WEIGHTS
    mean = k * 0.5
    resasc = np.abs(v - mean[..., None]) @ K_WEIGHTS
    resabs = np.abs(v) @ K_WEIGHTS
    err = np.abs(k - g) * h
    resasc = resasc * h
    ratio = np.where(resasc > 0, 200.0 * err / np.where(resasc > 0, resasc, 1.0), 0.0)
    err = np.where((resasc > 0) & (err > 0), resasc * np.minimum(1.0, ratio ** 1.5), err)
    floor = 50.0 * _EPS * resabs * h
    err = np.where(floor > _TINY, np.maximum(err, floor), err)
    return k * h, err


def integrate_rows(func, n_rows: int, a: float, b: float, cfg: QuadConfig = DEFAULT,
                   initial: int = 1):
    """Integrate ``func(s) -> (n_rows, len(s))`` over ``[a, b]`` row by row.

    Panels are shared between rows; a panel is bisected while some row that
    has not met its tolerance still has a panel error larger than its share.
    Returns (values, errors, n_panels); summation is ordered (math.fsum).
    """
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk_panels(func, n_rows, lo, hi)
    width = b - a
    while True:
        total = np.array([math.fsum(r) for r in vals])
        err_tot = errs.sum(axis=1)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        open_rows = err_tot > tol
        if not np.any(open_rows):
            return total, err_tot, lo.size
        share = (tol[open_rows, None] * (hi - lo)[None, :] / width)
        need = np.any(errs[open_rows] > share, axis=0)
        need[np.argmax(errs[open_rows], axis=1)] = True
        if lo.size + int(need.sum()) > cfg.max_subdivisions:
            worst = int(np.argmax(err_tot))
            raise QuadratureError(
                f"no convergence within {cfg.max_subdivisions} subdivisions "
                f"(error estimate {err_tot[worst]:.3g} > tolerance {tol[worst]:.3g})",
                float(total[worst]), float(err_tot[worst]))
        mid = 0.5 * (lo[need] + hi[need])
        new_lo = np.concatenate([lo[need], mid])
        new_hi = np.concatenate([mid, hi[need]])
        nv, ne = _gk_panels(func, n_rows, new_lo, new_hi)
        keep = ~need
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[:, keep], nv], axis=1)
        errs = np.concatenate([errs[:, keep], ne], axis=1)
        order = np.argsort(lo, kind="stable")
        lo, hi, vals, errs = lo[order], hi[order], vals[:, order], errs[:, order]


def integrate1d(f: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
                cfg: QuadConfig = DEFAULT) -> QuadResult:
    """Adaptive G7/K15 integral of ``f`` over ``iv``."""
    fn = as_callable(f, env)
    val, err, n = integrate_rows(lambda s: np.asarray(fn(s), dtype=float)[None, :], 1,
                                 iv.a, iv.b, cfg)
    return QuadResult(float(val[0]), float(err[0]), int(n))


def integrate(f: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None,
              cfg: QuadConfig = DEFAULT) -> float:
    return integrate1d(f, iv, env, cfg).value


def integrate2d(k: Callable[[np.ndarray, np.ndarray], np.ndarray], iv: Interval,
                cfg: QuadConfig = DEFAULT, *, outer_tol: float = OUTER_TOL,
                order: str = "xt", split_diagonal: bool = True,
                region: str = "square") -> QuadResult:
    """Iterated integral of ``k(x, t)`` over ``iv x iv``.

    ``order="xt"`` integrates t inside and x outside; ``"tx"`` swaps them.
    With ``split_diagonal`` the inner range is cut at t = x, which keeps
    kernels with |x - t| type kinks smooth on each piece.
    ``region="lower"`` integrates only over the triangle t <= x.
    """
    if order not in ("xt", "tx"):
        raise ValueError("order must be 'xt' or 'tx'")
    if region not in ("square", "lower"):
        raise ValueError("region must be 'square' or 'lower'")
    kern = k if order == "xt" else (lambda x, t: k(t, x))
    a, b = iv.a, iv.b
    inner_panels = [0]

    def inner(xs):
        xs = np.asarray(xs, dtype=float)
        n = xs.size
        if split_diagonal:
            def left(s):
                t = a + (xs[:, None] - a) * s[None, :]
                return kern(np.broadcast_to(xs[:, None], t.shape), t) * (xs - a)[:, None]

            def right(s):
                t = xs[:, None] + (b - xs[:, None]) * s[None, :]
                return kern(np.broadcast_to(xs[:, None], t.shape), t) * (b - xs)[:, None]

            v1, _, n1 = integrate_rows(left, n, 0.0, 1.0, cfg)
            inner_panels[0] += n1
            if region == "lower":
                return v1
            v2, _, n2 = integrate_rows(right, n, 0.0, 1.0, cfg)
            inner_panels[0] += n2
            return v1 + v2

        if region == "lower":
            raise ValueError("region='lower' needs split_diagonal")

        def full(s):
            t = np.broadcast_to(s[None, :], (n, s.size))
            return kern(np.broadcast_to(xs[:, None], t.shape), t)

        v, _, n1 = integrate_rows(full, n, a, b, cfg)
        inner_panels[0] += n1
        return v

    outer_cfg = QuadConfig(max(cfg.abs_tol, outer_tol), max(cfg.rel_tol, outer_tol),
                           cfg.max_subdivisions)
    val, err, n = integrate_rows(lambda xs: inner(xs)[None, :], 1, a, b, outer_cfg)
    return QuadResult(float(val[0]), float(err[0]), int(n + inner_panels[0]))


# ------------------------------------------------------------ extrema, norms

SCAN_POINTS = 4097
REFINE_PEAKS = 8
ARG_TOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(fn: Callable[[float], float], lo: float, hi: float, tol: float = ARG_TOL):
    """Golden-section maximization of a scalar function on [lo, hi]."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = fn(c), fn(d)
    while hi - lo > tol * max(1.0, abs(lo) + abs(hi)) * 0.5:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = fn(d)
    xm = 0.5 * (lo + hi)
    best = max(((fc, c), (fd, d), (fn(xm), xm)))
    return best[1], best[0]


def argmax_scan(fn: Callable, iv: Interval, n: int = SCAN_POINTS, peaks: int = REFINE_PEAKS):
    """Maximize ``fn`` (vectorized) over ``iv`` by scan plus golden refinement.

    Returns (argmax, max, scan_values).
    """
    xs = np.linspace(iv.a, iv.b, n)
    ys = np.asarray(fn(xs), dtype=float)
    if ys.shape != xs.shape:
        ys = np.broadcast_to(ys, xs.shape).astype(float)
    if not np.all(np.isfinite(ys)):
        raise ArithmeticError("function is not finite on the scan grid")
    interior = (ys[1:-1] >= ys[:-2]) & (ys[1:-1] >= ys[2:])
    idx = list(np.nonzero(interior)[0] + 1)
    if ys[0] >= ys[1]:
        idx.append(0)
    if ys[-1] >= ys[-2]:
        idx.append(n - 1)
    idx = sorted(idx, key=lambda i: -ys[i])[:peaks]
    best_i = int(np.argmax(ys))
    best_x, best_y = float(xs[best_i]), float(ys[best_i])

    def scalar(t):
        return float(np.asarray(fn(np.array([t])), dtype=float).reshape(-1)[0])

    for i in idx:
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, n - 1)]
        x, y = golden_max(scalar, float(lo), float(hi))
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y, ys


def sup_norm(f: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None) -> float:
    """max |f| on iv: 4097-point scan, golden refinement of the top 8 peaks."""
    fn = as_callable(f, env)
    _, y, ys = argmax_scan(lambda x: np.abs(fn(x)), iv)
    assert y >= ys.max()
    return float(y)


def function_range(f: FunctionLike, iv: Interval, env: Optional[ParamEnv] = None):
    """(min f, max f) on iv with the same scan-and-refine scheme."""
    fn = as_callable(f, env)
    _, hi, _ = argmax_scan(fn, iv)
    _, lo, _ = argmax_scan(lambda x: -np.asarray(fn(x)), iv)
    return -lo, hi


def lp_norm(f: FunctionLike, p: float, iv: Interval, env: Optional[ParamEnv] = None,
            cfg: QuadConfig = DEFAULT) -> float:
    """(int |f|^p)^(1/p) for 1 <= p < inf; p = inf delegates to sup_norm."""
    if p == math.inf:
        return sup_norm(f, iv, env)
    if not p >= 1:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    fn = as_callable(f, env)
    val = integrate1d(lambda x: np.abs(fn(x)) ** p, iv, cfg=cfg).value
    return float(max(val, 0.0) ** (1.0 / p))
