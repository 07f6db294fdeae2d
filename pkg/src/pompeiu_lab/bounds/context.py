"""Bound evaluation context and the per-evaluation quantity cache."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from ..expr import Expr, as_expr, compile_expr, differentiate, pompeiu_deviation, to_text
from ..functionals import FunctionalValue, _phat_h, integrals
from ..quad import (DEFAULT, FunctionLike, Interval, QuadConfig, function_range,
                    integrate2d, lp_norm, sup_norm)

RANGE_KEYS = ("phi", "Phi", "gamma", "Gamma", "m", "M", "n", "N")
HOLDER_KEYS = ("H1", "p", "H2", "q")
EXPONENT_KEYS = ("p", "q", "alpha", "beta")


class MissingContextError(ValueError):
    """The context lacks data that a bound entry requires."""


def _mapping(value, keys, what):
    if value is None:
        return {}
    out = dict(value)
    bad = set(out) - set(keys)
    if bad:
        raise ValueError(f"unknown {what} keys: {sorted(bad)}")
    for k, v in out.items():
        if v is not None and not math.isfinite(float(v)) and not (what == "exponent" and
                                                                    float(v) == math.inf):
            raise ValueError(f"{what} {k} must be finite")
    return {k: float(v) for k, v in out.items() if v is not None}


@dataclass
class BoundContext:
    """Functions, interval and optional constants handed to a bound entry.

    ``f``, ``g``, ``h`` and the weight ``w`` are expressions (strings or Expr);
    plain callables are accepted where no derivative is needed.  Range
    bounds use the keys phi <= f <= Phi and gamma <= g <= Gamma, and
    m h <= f <= M h, n h <= g <= N h for the pointwise ratio bounds.
    """
    f: FunctionLike
    g: Optional[FunctionLike] = None
    h: Optional[FunctionLike] = None
    iv: Interval = field(default_factory=lambda: Interval(1.0, 2.0))
    env: Mapping[str, float] = field(default_factory=dict)
    supplied_range_bounds: Optional[Mapping[str, float]] = None
    supplied_holder: Optional[Mapping[str, float]] = None
    supplied_exponents: Optional[Mapping[str, float]] = None
    w: Optional[FunctionLike] = None
    cfg: QuadConfig = DEFAULT

    def __post_init__(self):
        if isinstance(self.iv, (tuple, list)):
            self.iv = Interval(*self.iv)
        self.env = {k: float(v) for k, v in dict(self.env or {}).items()}
        self.supplied_range_bounds = _mapping(self.supplied_range_bounds, RANGE_KEYS, "range")
        self.supplied_holder = _mapping(self.supplied_holder, HOLDER_KEYS, "holder")
        self.supplied_exponents = _mapping(self.supplied_exponents, EXPONENT_KEYS, "exponent")
        for name in ("f", "g", "h", "w"):
            v = getattr(self, name)
            if isinstance(v, (str, int, float)):
                setattr(self, name, as_expr(v))

    @property
    def ranges(self) -> Dict[str, float]:
        return self.supplied_range_bounds

    @property
    def holder(self) -> Dict[str, float]:
        return self.supplied_holder

    @property
    def exponents(self) -> Dict[str, float]:
        return self.supplied_exponents

    def text(self, name: str) -> Optional[str]:
        v = getattr(self, name)
        if v is None:
            return None
        if isinstance(v, (Expr.__args__)):
            return to_text(v)
        return repr(v)

    def describe(self) -> dict:
        return {
            "f": self.text("f"), "g": self.text("g"), "h": self.text("h"),
            "w": self.text("w"), "interval": [self.iv.a, self.iv.b], "env": dict(self.env),
            "range_bounds": dict(self.supplied_range_bounds),
            "holder": dict(self.supplied_holder),
            "exponents": dict(self.supplied_exponents),
        }

    def with_auto_ranges(self) -> "BoundContext":
        """Copy with phi/Phi (f) and gamma/Gamma (g) filled from a scan of f and g."""
        r = dict(self.supplied_range_bounds)
        q = Quantities(self)
        if self.f is not None and "phi" not in r:
            r["phi"], r["Phi"] = q.range_of("f")
        if self.g is not None and "gamma" not in r:
            r["gamma"], r["Gamma"] = q.range_of("g")
        return BoundContext(self.f, self.g, self.h, self.iv, self.env, r,
                            self.supplied_holder, self.supplied_exponents, self.w, self.cfg)


class Quantities:
    """Memoized functions, norms and functionals for one evaluation."""

    def __init__(self, ctx: BoundContext):
        self.ctx = ctx
        self.iv = ctx.iv
        self.a, self.b = ctx.iv.a, ctx.iv.b
        self.length = ctx.iv.length
        self.cfg = ctx.cfg
        self._cache: Dict[object, object] = {}
        self._funcs: Dict[str, Callable] = {
            "one": lambda x: np.ones_like(np.asarray(x, dtype=float)),
            "x": lambda x: np.asarray(x, dtype=float),
        }

    def get(self, key, thunk):
        if key not in self._cache:
            self._cache[key] = thunk()
        return self._cache[key]

    def has(self, name: str) -> bool:
        return getattr(self.ctx, name, None) is not None

    def expr(self, name: str) -> Expr:
        v = getattr(self.ctx, name)
        if v is None:
            raise MissingContextError(f"context has no function {name!r}")
        if callable(v) and hasattr(v, "expr"):
            return v.expr
        if callable(v):
            raise MissingContextError(f"{name!r} must be an expression for this entry")
        return as_expr(v)

    def register(self, key: str, fn: Callable):
        self._funcs[key] = fn
        return fn

    def fn(self, key: str) -> Callable:
        """Callable for f, g, h, w or a derived key like 'd:f', 'dd:f', 'dev:f'."""
        if key in self._funcs:
            return self._funcs[key]
        if ":" in key:
            op, base = key.split(":", 1)
            e = self.expr(base)
            if op == "d":
                e = differentiate(e)
            elif op == "dd":
                e = differentiate(differentiate(e))
            elif op == "dev":
                e = pompeiu_deviation(e)
            else:
                raise KeyError(key)
            return self.register(key, compile_expr(e, self.ctx.env))
        v = getattr(self.ctx, key, None)
        if v is None:
            raise MissingContextError(f"context has no function {key!r}")
        if callable(v) and not hasattr(v, "expr") and not isinstance(v, Expr.__args__):
            return self.register(key, v)
        return self.register(key, compile_expr(self.expr(key), self.ctx.env))

    def values(self, key: str, n: int = 1025) -> np.ndarray:
        return self.get(("grid", key, n), lambda: np.broadcast_to(
            np.asarray(self.fn(key)(self.iv.grid(n)), dtype=float), (n,)).copy())

    def sup(self, key: str) -> float:
        return self.get(("sup", key), lambda: sup_norm(self.fn(key), self.iv))

    def lp(self, key: str, p: float) -> float:
        if p == math.inf:
            return self.sup(key)
        return self.get(("lp", key, p), lambda: lp_norm(self.fn(key), p, self.iv, cfg=self.cfg))

    def range_of(self, key: str):
        return self.get(("range", key), lambda: function_range(self.fn(key), self.iv))

    def integral(self, key: str, weight: Optional[Callable] = None) -> float:
        fn = self.fn(key)
        return self.get(("int", key), lambda: integrals([fn], self.iv, self.cfg)[0])

    def integrate(self, key, *fns) -> list:
        return self.get(("ints", key), lambda: integrals(list(fns), self.iv, self.cfg))

    def double(self, key, kernel) -> float:
        return self.get(("2d", key), lambda: integrate2d(kernel, self.iv, self.cfg).value)

    def double_lower(self, key, kernel) -> float:
        return self.get(("2dl", key), lambda: integrate2d(kernel, self.iv, self.cfg,
                                                           region="lower").value)

    def phat(self, fk: str, gk: str, hk: Optional[str] = None) -> FunctionalValue:
        """P_h(f, g) for keys fk, gk and weight key hk (None means h(x) = x)."""
        def run():
            h = (lambda x: np.asarray(x, dtype=float)) if hk is None else self.fn(hk)
            return _phat_h(self.fn(fk), self.fn(gk), h, None, self.iv, self.cfg, True)
        if fk > gk:
            fk, gk = gk, fk
        return self.get(("phat", fk, gk, hk), run)
