"""Mean-value points of the Pompeiu and Boggio theorems, and h-monotonicity.

Roots are located by a sign scan over ``panels`` equal panels followed by
Brent refinement.  Tangential roots (no sign change) are caught by
minimizing |residual| around small local minima of the scan.  Scanning is
heuristic: a root set is complete only up to the scan resolution.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq

from .expr import ParamEnv, as_expr, compile_expr, differentiate, evaluate
from .functionals import PreconditionError
from .quad import FunctionLike, Interval, argmax_scan, as_callable, golden_max

SCAN_PANELS = 1024
ROOT_RTOL = 1e-10
DEGENERATE_RTOL = 1e-12
ZERO_TOL = 1e-12
ADMISSIBLE_SCAN = 4097
MONOTONE_GRID = 129


class MvtWarning(UserWarning):
    pass


@dataclass
class MvtSolution:
    xi_roots: List[float]
    residuals: List[float]
    lhs_value: float
    all_solutions: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.all_solutions or bool(self.xi_roots)


def _solve(resid, lo: float, hi: float, lhs: float, panels: int) -> MvtSolution:
    xs = np.linspace(lo, hi, panels + 1)
    rs = np.asarray(resid(xs, strict=False), dtype=float)
    scale = 1.0 + abs(lhs)
    accept = ROOT_RTOL * scale
    finite = np.isfinite(rs)
    if np.all(finite) and np.all(np.abs(rs) <= DEGENERATE_RTOL * scale):
        return MvtSolution([], [], lhs, all_solutions=True)

    def r1(x):
        return float(resid(np.array([x]), strict=False)[0])

    cands = []
    for i in range(panels):
        u, v = rs[i], rs[i + 1]
        if not (math.isfinite(u) and math.isfinite(v)):
            continue
        if u == 0.0:
            cands.append(xs[i])
        elif u * v < 0:
            cands.append(brentq(r1, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                maxiter=200))
    if rs[-1] == 0.0:
        cands.append(xs[-1])
    # tangential roots: |r| has a small local minimum without a sign change
    ar = np.where(finite, np.abs(rs), np.inf)
    for i in range(1, panels):
        if ar[i] <= ar[i - 1] and ar[i] <= ar[i + 1] and ar[i] < 1e-3 * scale:
            if np.isfinite(ar[i - 1]) and np.isfinite(ar[i + 1]) \
                    and rs[i - 1] * rs[i + 1] > 0 and rs[i] * rs[i - 1] > 0:
                x, y = golden_max(lambda t: -abs(r1(t)), xs[i - 1], xs[i + 1], tol=1e-14)
                if -y <= accept:
                    cands.append(x)
    roots, res = [], []
    span = hi - lo
    for x in sorted(cands):
        if not (lo < x < hi):
            continue
        r = r1(x)
        if not (abs(r) <= accept):
            continue
        if roots and x - roots[-1] <= 1e-9 * span:
            if abs(r) < abs(res[-1]):
                roots[-1], res[-1] = float(x), r
            continue
        roots.append(float(x))
        res.append(r)
    sol = MvtSolution(roots, res, lhs)
    if not roots:
        sol.warnings.append("no root found on the scan; a hypothesis may fail or the scan "
                            "missed a root")
    return sol


def _expr_and_derivative(f, env):
    e = as_expr(f)
    return compile_expr(e, env, strict=False), compile_expr(differentiate(e), env, strict=False)


def pompeiu_xi(f, x1: float, x2: float, env: Optional[ParamEnv] = None, *,
               allow_zero: bool = False, panels: int = SCAN_PANELS) -> MvtSolution:
    """Points xi between x1 and x2 with f(xi) - xi f'(xi) = (x1 f(x2) - x2 f(x1))/(x1 - x2)."""
    if x1 == x2:
        raise PreconditionError("pompeiu_xi needs x1 != x2")
    lo, hi = min(x1, x2), max(x1, x2)
    if lo <= 0 <= hi and not allow_zero:
        raise PreconditionError("0 lies in [x1, x2]; pass allow_zero=True to override")
    fa, da = _expr_and_derivative(f, env)
    e = as_expr(f)
    f1, f2 = evaluate(e, x1, env), evaluate(e, x2, env)
    lhs = (x1 * f2 - x2 * f1) / (x1 - x2)

    def resid(x, strict=False):
        return fa(x) - x * da(x) - lhs

    return _solve(resid, lo, hi, lhs, panels)


def boggio_xi(f, h, x1: float, x2: float, env: Optional[ParamEnv] = None, *,
              panels: int = SCAN_PANELS) -> MvtSolution:
    """Points xi with f(xi) - h(xi) f'(xi) / h'(xi) equal to the h-secant quantity.

    0 may lie in [x1, x2]; a warning is attached when it does, or when h is
    not admissible on [x1, x2].
    """
    if x1 == x2:
        raise PreconditionError("boggio_xi needs x1 != x2")
    ef, eh = as_expr(f), as_expr(h)
    h1, h2 = evaluate(eh, x1, env), evaluate(eh, x2, env)
    if h1 == h2:
        raise PreconditionError("boggio_xi needs h(x1) != h(x2)")
    f1, f2 = evaluate(ef, x1, env), evaluate(ef, x2, env)
    lhs = (h1 * f2 - h2 * f1) / (h1 - h2)
    fa, dfa = _expr_and_derivative(ef, env)
    ha, dha = _expr_and_derivative(eh, env)
    lo, hi = min(x1, x2), max(x1, x2)
    notes = []
    if lo <= 0 <= hi:
        notes.append("0 lies in [x1, x2]; the classical hypothesis is not needed here")
    if not admissible(eh, Interval(lo, hi), env):
        notes.append("h is not admissible on [x1, x2] (h or h' vanishes or changes sign)")
        warnings.warn(notes[-1], MvtWarning, stacklevel=2)

    def resid(x, strict=False):
        with np.errstate(all="ignore"):
            d = dha(x)
            q = np.where(d != 0, ha(x) / np.where(d != 0, d, 1.0), np.nan)
            return fa(x) - q * dfa(x) - lhs

    sol = _solve(resid, lo, hi, lhs, panels)
    sol.warnings[:0] = notes
    return sol


def _never_zero(fn, iv: Interval) -> bool:
    xs = iv.grid(ADMISSIBLE_SCAN)
    v = np.asarray(fn(xs), dtype=float)
    if not np.all(np.isfinite(v)):
        return False
    if np.any(np.abs(v) < ZERO_TOL):
        return False
    if np.any(np.sign(v) != np.sign(v[0])):
        return False
    s = float(np.sign(v[0]))
    # refine around the smallest values in case a zero hides between nodes
    _, top, _ = argmax_scan(lambda x: -s * np.asarray(fn(x), dtype=float), iv, ADMISSIBLE_SCAN)
    return -top >= ZERO_TOL


def admissible(h, iv: Interval, env: Optional[ParamEnv] = None) -> bool:
    """True iff neither h nor h' vanishes or changes sign on [a, b]."""
    try:
        ha, dha = _expr_and_derivative(h, env)
        return _never_zero(ha, iv) and _never_zero(dha, iv)
    except ArithmeticError:
        return False


class Monotonicity(str, enum.Enum):
    H_INCREASING = "h_increasing"
    H_DECREASING = "h_decreasing"
    NEITHER = "neither"

    def __str__(self):
        return self.value


def h_monotonicity(f: FunctionLike, h: FunctionLike, iv: Interval,
                   env: Optional[ParamEnv] = None, n: int = MONOTONE_GRID) -> Monotonicity:
    """Classify f by the sign of h(x) f(t) - h(t) f(x) over t >= x.

    A zero table counts as h-increasing.
    """
    fa, ha = as_callable(f, env), as_callable(h, env)
    xs = iv.grid(n)
    hv = np.broadcast_to(np.asarray(ha(xs), dtype=float), xs.shape)
    fv = np.broadcast_to(np.asarray(fa(xs), dtype=float), xs.shape)
    if np.any(hv < 0):
        i = int(np.argmin(hv))
        raise PreconditionError(f"h must be non-negative; h({xs[i]:.6g}) = {hv[i]:.6g}")
    s = hv[:, None] * fv[None, :] - hv[None, :] * fv[:, None]   # rows x, columns t
    s = s[np.triu_indices(n, 1)]
    tol = ZERO_TOL * max(np.max(np.abs(hv)) * np.max(np.abs(fv)), np.finfo(float).tiny)
    if np.all(s >= -tol):
        return Monotonicity.H_INCREASING
    if np.all(s <= tol):
        return Monotonicity.H_DECREASING
    return Monotonicity.NEITHER
