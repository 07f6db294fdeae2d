"""Randomized soundness suites, identity checks and sharpness search.

Random contexts come from per-profile generators.  Each catalog entry names
a profile describing which hypotheses its contexts must satisfy; the
generator draws functions from parameterized families, then fills in range,
ratio and Holder constants computed from the drawn functions.  The random
stream of every case is a SeedSequence child keyed by (seed, bound, case),
so results do not depend on the order or grouping in which cases run.
"""
from __future__ import annotations

import json
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from . import functionals as fn
from .bounds import (HOLDS, PRECONDITION_FAILED, VIOLATED, BoundContext, BoundReport,
                     MissingContextError, evaluate_bound, get_spec)
from .expr import (Binary, Const, DomainError, Expr, ExprError, Param, Unary, as_expr,
                   compile_expr, differentiate, div, parameters, to_text)
from .quad import DEFAULT, Interval, QuadConfig, QuadratureError, function_range, sup_norm

CONSTRAINTS = ("none", "increasing", "decreasing", "convex", "positive", "bounded")
MAX_RESAMPLE = 10
SHARPNESS_RTOL = 1e-7
NUMERIC_ERRORS = (QuadratureError, DomainError, ArithmeticError, FloatingPointError,
                  ValueError)


# ------------------------------------------------------------ families

@dataclass(frozen=True)
class FunctionFamily:
    """An expression template with a box of parameter values.

    Members of the constrained families built by ``constrained_family``
    satisfy their constraint for every parameter value in the box.
    """
    template: Expr
    param_box: Mapping[str, Tuple[float, float]]
    class_constraint: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "template", as_expr(self.template))
        if self.class_constraint not in CONSTRAINTS:
            raise ValueError(f"unknown class constraint {self.class_constraint!r}")
        missing = parameters(self.template) - set(self.param_box)
        if missing:
            raise ValueError(f"parameters without a box: {sorted(missing)}")
        for k, (lo, hi) in self.param_box.items():
            if not lo <= hi:
                raise ValueError(f"empty box for {k}")

    @property
    def names(self) -> List[str]:
        return sorted(self.param_box)

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        return {k: float(rng.uniform(*self.param_box[k])) for k in self.names}

    def from_unit(self, u: Sequence[float]) -> Dict[str, float]:
        return {k: lo + (hi - lo) * float(t)
                for k, t in zip(self.names, u) for lo, hi in [self.param_box[k]]}

    def instantiate(self, env: Mapping[str, float]) -> Expr:
        """The member for env as a parameter-free expression."""
        return substitute(self.template, env)


def substitute(e: Expr, env: Mapping[str, float]) -> Expr:
    """Replace parameters by constants."""
    if isinstance(e, Param):
        return Const(float(env[e.name]))
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, env))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, env), substitute(e.right, env))
    return e


def constrained_family(constraint: str, iv: Interval, degree: int = 3,
                       scale: float = 2.0) -> FunctionFamily:
    """Polynomials in u = (x - a)/(b - a) whose constraint holds by construction.

    increasing: c0 + sum a_k u^k, a_k >= 0;  decreasing: the negative;
    convex: c0 + c1 u + sum_{k>=2} a_k u^k, a_k >= 0;
    positive: c0 + sum a_k u^k with c0 > sum |a_k|;  bounded: |f| <= 1 + sum |a_k|.
    """
    a, L = iv.a, iv.length
    u = f"((x - {a!r})/{L!r})"
    box = {"c0": (-scale, scale)}
    terms = []
    for k in range(1, degree + 1):
        box[f"a{k}"] = (0.0, scale) if constraint in ("increasing", "decreasing") or \
            (constraint == "convex" and k >= 2) else (-scale, scale)
        terms.append(f"a{k}*{u}^{k}")
    body = " + ".join(terms)
    if constraint == "decreasing":
        text = f"c0 - ({body})"
    elif constraint == "positive":
        box["c0"] = (degree * scale + 0.05, degree * scale + 2.0)
        text = f"c0 + {body}"
    elif constraint == "bounded":
        text = f"c0 + {' + '.join(f'a{k}*sin({k}*{u})' for k in range(1, degree + 1))}"
    else:
        text = f"c0 + {body}"
    return FunctionFamily(text, box, constraint)


def check_constraint(e, constraint: str, iv: Interval, n: int = 1025) -> bool:
    """Independent scan check of a family constraint."""
    xs = iv.grid(n)
    v = compile_expr(e)(xs) * np.ones(n)
    d = compile_expr(differentiate(e))(xs) * np.ones(n)
    if constraint == "increasing":
        return bool(np.all(d >= -1e-12))
    if constraint == "decreasing":
        return bool(np.all(d <= 1e-12))
    if constraint == "convex":
        dd = compile_expr(differentiate(differentiate(e)))(xs) * np.ones(n)
        return bool(np.all(dd >= -1e-12))
    if constraint == "positive":
        return bool(np.all(v > 0))
    return bool(np.all(np.isfinite(v)))


# ------------------------------------------------------------ random expressions

def _r(rng, lo, hi):
    return float(rng.uniform(lo, hi))


def _lit(v: float) -> str:
    return f"({v!r})" if v < 0 else repr(v)


def random_smooth(rng: np.random.Generator, iv: Interval) -> str:
    """A smooth expression on iv from a small pool of templates."""
    a = iv.a
    kind = int(rng.integers(0, 8))
    A, B = _r(rng, -2, 2), _r(rng, -2, 2)
    if kind == 0:
        c = [_r(rng, -2, 2) for _ in range(4)]
        return f"{_lit(c[0])} + {_lit(c[1])}*x + {_lit(c[2])}*x^2 + {_lit(c[3])}*x^3"
    if kind == 1:
        return f"{_lit(A)}*exp({_lit(_r(rng, -1.5, 1.5))}*x) + {_lit(B)}"
    if kind == 2:
        return f"{_lit(A)}*sin({_lit(_r(rng, 0.2, 3))}*x + {_lit(_r(rng, -3, 3))}) + {_lit(B)}"
    if kind == 3:
        return f"{_lit(A)}*ln(x + {_r(rng, 0.1, 2) - a + max(a, 0)!r}) + {_lit(B)}"
    if kind == 4:
        return f"{_lit(A)}/(x + {_r(rng, 0.2, 2) - min(a, 0)!r}) + {_lit(B)}"
    if kind == 5 and a > 0:
        return f"{_lit(A)}*x^{_lit(_r(rng, -2, 3))} + {_lit(B)}"
    if kind == 6:
        return f"({_lit(A)} + {_lit(B)}*x)*exp({_lit(_r(rng, -1, 1))}*x)"
    return f"{_lit(A)}*cos({_lit(_r(rng, 0.2, 3))}*x) + {_lit(B)}*x"


def shifted_positive(text: str, iv: Interval, rng, lo: float = 0.05, hi: float = 2.0) -> str:
    """text + shift with the shift making the expression >= a random positive floor."""
    m, _ = function_range(compile_expr(text), iv)
    shift = -m + _r(rng, lo, hi)
    return f"({text}) + {_lit(shift)}"


def random_positive(rng, iv: Interval) -> str:
    return shifted_positive(random_smooth(rng, iv), iv, rng)


def random_monotone(rng, iv: Interval, increasing: bool) -> str:
    fam = constrained_family("increasing" if increasing else "decreasing", iv,
                             degree=int(rng.integers(1, 4)))
    env = fam.sample(rng)
    text = to_text(fam.instantiate(env))
    if rng.random() < 0.4:
        k = _r(rng, 0.1, 1.5)
        s = 1.0 if increasing else -1.0
        text = f"({text}) + {_lit(s * _r(rng, 0.1, 2))}*exp({k!r}*(x - {iv.a!r}))"
    return text


def random_interval(rng, a_lo: float = 0.2, a_hi: float = 3.0, len_lo: float = 0.1,
                    len_hi: float = 3.0) -> Interval:
    a = _r(rng, a_lo, a_hi)
    return Interval(a, a + _r(rng, len_lo, len_hi))


def random_p(rng, lo: float = 1.1, hi: float = 4.0) -> float:
    return _r(rng, lo, hi)


# ------------------------------------------------------------ profiles

@dataclass
class Draft:
    f: str
    g: Optional[str] = None
    h: Optional[str] = None
    iv: Interval = field(default_factory=lambda: Interval(1.0, 2.0))
    exponents: Dict[str, float] = field(default_factory=dict)
    holder: List[Tuple[str, str, float]] = field(default_factory=list)   # (num, den, order)
    ratios: List[Tuple[str, str]] = field(default_factory=list)           # (num, den)

    def text(self, key: str) -> str:
        return "x" if key == "x" else getattr(self, key)
    w: Optional[str] = None


def _holder_const(num: str, den: str, order: float, iv: Interval) -> float:
    """Rigorous Holder constant sup|u'| (b - a)^(1 - order) of u = num/den."""
    u = div(as_expr(num), as_expr(den))
    return sup_norm(compile_expr(differentiate(u)), iv) * iv.length ** (1.0 - order) * (1 + 1e-9)


def finalize(d: Draft, cfg: QuadConfig = DEFAULT) -> BoundContext:
    """Context from a draft with range, ratio and Holder data computed from the functions."""
    rb: Dict[str, float] = {}
    pad = 1e-12
    for key, lo, hi in (("f", "phi", "Phi"), ("g", "gamma", "Gamma")):
        text = getattr(d, key)
        if text is not None:
            m, M = function_range(compile_expr(text), d.iv)
            rb[lo], rb[hi] = m - pad * (1 + abs(m)), M + pad * (1 + abs(M))
    for ((num, den), (lo, hi)) in zip(d.ratios, (("m", "M"), ("n", "N"))):
        u = div(as_expr(d.text(num)), as_expr(d.text(den)))
        m, M = function_range(compile_expr(u), d.iv)
        rb[lo], rb[hi] = m * (1 - 1e-12), M * (1 + 1e-12)
    holder: Dict[str, float] = {}
    for which, (num, den, order) in enumerate(d.holder, start=1):
        holder[f"H{which}"] = _holder_const(d.text(num), d.text(den), order, d.iv)
        holder["p" if which == 1 else "q"] = order
    return BoundContext(d.f, d.g, d.h, d.iv, {}, rb, holder, dict(d.exponents), d.w, cfg)


def _conj(p):
    return {"p": p, "q": p / (p - 1)}


def _alpha(rng, ex):
    if rng.random() < 0.6:
        al = _r(rng, 1.2, 4.0)
        ex.update(alpha=al, beta=al / (al - 1))
    return ex


def _prof_smooth_pair(rng):
    iv = random_interval(rng)
    return Draft(random_smooth(rng, iv), random_smooth(rng, iv), iv=iv)


def _prof_smooth_pair_p(rng):
    d = _prof_smooth_pair(rng)
    d.exponents = _conj(random_p(rng))
    return d


def _prof_positive_pair(rng):
    iv = random_interval(rng)
    return Draft(random_positive(rng, iv), random_positive(rng, iv), iv=iv)


def _prof_h_triple(rng):
    iv = random_interval(rng, a_lo=-1.0)
    return Draft(random_smooth(rng, iv), random_smooth(rng, iv), random_smooth(rng, iv), iv=iv)


def _orders(rng):
    return [1.0 if rng.random() < 0.5 else _r(rng, 0.3, 1.0) for _ in range(2)]


def _prof_holder_h(rng):
    iv = random_interval(rng)
    f, g, h = random_smooth(rng, iv), random_smooth(rng, iv), random_positive(rng, iv)
    p1, p2 = _orders(rng)
    return Draft(f, g, h, iv=iv, exponents=_alpha(rng, {}),
                 holder=[("f", "h", p1), ("g", "h", p2)])


def _prof_holder_x(rng):
    iv = random_interval(rng)
    f, g = random_smooth(rng, iv), random_smooth(rng, iv)
    p1, p2 = _orders(rng)
    return Draft(f, g, None, iv=iv, exponents=_alpha(rng, {}),
                 holder=[("f", "x", p1), ("g", "x", p2)])


def _prof_holder_fg(rng):
    iv = random_interval(rng)
    f, g, h = random_positive(rng, iv), random_positive(rng, iv), random_smooth(rng, iv)
    p1, p2 = _orders(rng)
    return Draft(f, g, h, iv=iv, exponents=_alpha(rng, {}),
                 holder=[("h", "f", p1), ("h", "g", p2)])


def _prof_pointwise(rng):
    iv = random_interval(rng, a_lo=-1.0)
    h = random_positive(rng, iv)
    f = f"({random_positive(rng, iv)})*({h})"
    g = f"({random_positive(rng, iv)})*({h})"
    return Draft(f, g, h, iv=iv, ratios=[("f", "h"), ("g", "h")])


def _prof_hardy(rng):
    iv = random_interval(rng)
    return Draft(random_smooth(rng, iv), iv=iv)


def _prof_hardy_nonneg_p(rng):
    iv = random_interval(rng)
    f = random_positive(rng, iv) if rng.random() < 0.7 else \
        shifted_positive(random_smooth(rng, iv), iv, rng, 0.0, 1e-300)
    return Draft(f, iv=iv, exponents=_conj(random_p(rng)))


def _prof_hardy_convex(rng):
    b = _r(rng, 0.3, 4.0)
    iv = Interval(0.0, b)
    if rng.random() < 0.5:
        fam = constrained_family("convex", iv, degree=int(rng.integers(2, 5)))
        base = to_text(fam.instantiate(fam.sample(rng)))
    else:
        base = f"{_r(rng, 0.1, 2)!r}*exp({_lit(_r(rng, -2, 2))}*x)"
    f = shifted_positive(base, iv, rng, 0.01, 2.0)
    return Draft(f, iv=iv, exponents=_conj(_r(rng, 1.05, 2.0)))


def _prof_weighted_F(rng):
    iv = random_interval(rng)
    w = None if rng.random() < 0.6 else random_positive(rng, iv)
    return Draft(random_smooth(rng, iv), iv=iv, w=w)


def _prof_monotone_p(rng):
    iv = random_interval(rng, a_lo=-2.0)
    return Draft(random_monotone(rng, iv, True), iv=iv, exponents={"p": random_p(rng, 1.05, 4.0)})


def _prof_monotone_classes(rng):
    iv = random_interval(rng, a_lo=0.0)
    h = None if rng.random() < 0.5 else random_positive(rng, iv)
    hh = "x" if h is None else h
    f = f"({random_monotone(rng, iv, rng.random() < 0.5)})*({hh})"
    g = f"({random_monotone(rng, iv, rng.random() < 0.5)})*({hh})"
    return Draft(f, g, h, iv=iv)


def _prof_ramified(rng):
    iv = random_interval(rng)
    k = int(rng.integers(0, 4))
    if k == 0:
        f = f"{_r(rng, 0.2, 3)!r}*exp({_lit(_r(rng, -2, 2))}*x)"
    elif k == 1:
        f = f"{_r(rng, 0.2, 3)!r}*x^{_lit(_r(rng, -3, 4))}"
    elif k == 2:
        fam = constrained_family(["convex", "increasing", "decreasing"][int(rng.integers(3))], iv)
        f = shifted_positive(to_text(fam.instantiate(fam.sample(rng))), iv, rng)
    else:
        f = random_positive(rng, iv)
    return Draft(f, iv=iv)


PROFILES: Dict[str, Callable[[np.random.Generator], Draft]] = {
    "smooth_pair": _prof_smooth_pair,
    "smooth_pair_p": _prof_smooth_pair_p,
    "positive_pair": _prof_positive_pair,
    "h_triple": _prof_h_triple,
    "holder_h": _prof_holder_h,
    "holder_x": _prof_holder_x,
    "holder_fg": _prof_holder_fg,
    "pointwise": _prof_pointwise,
    "hardy": _prof_hardy,
    "hardy_nonneg_p": _prof_hardy_nonneg_p,
    "hardy_convex": _prof_hardy_convex,
    "weighted_F": _prof_weighted_F,
    "monotone_p": _prof_monotone_p,
    "monotone_classes": _prof_monotone_classes,
    "ramified": _prof_ramified,
}


# ------------------------------------------------------------ suites

@dataclass
class SuiteConfig:
    bounds: List[str]
    functions: Dict[str, object] = field(default_factory=dict)
    intervals: List[Tuple[float, float]] = field(default_factory=list)
    samples: int = 200
    seed: int = 0
    quad: Dict[str, float] = field(default_factory=dict)
    output: Optional[str] = None

    @classmethod
    def from_dict(cls, d: Mapping) -> "SuiteConfig":
        known = {"bounds", "functions", "intervals", "samples", "seed", "quad", "output"}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown suite config keys: {sorted(bad)}")
        return cls(list(d.get("bounds", [])), dict(d.get("functions", {})),
                   [tuple(map(float, iv)) for iv in d.get("intervals", [])],
                   int(d.get("samples", 200)), int(d.get("seed", 0)),
                   dict(d.get("quad", {})), d.get("output"))

    def quad_config(self) -> QuadConfig:
        base = asdict(DEFAULT)
        base.update(self.quad)
        return QuadConfig(**base)


@dataclass
class BoundTally:
    bound_id: str
    cases: int = 0
    holds: int = 0
    violated: int = 0
    precondition_failed: int = 0
    min_slack: Optional[float] = None
    max_ratio: Optional[float] = None
    resamples: int = 0
    numeric_errors: int = 0

    def add(self, rep: Optional[BoundReport]):
        self.cases += 1
        if rep is None or rep.status == PRECONDITION_FAILED:
            self.precondition_failed += 1
            return
        if rep.status == HOLDS:
            self.holds += 1
        else:
            self.violated += 1
        for c in rep.components:
            s = c.rhs - c.lhs
            if self.min_slack is None or s < self.min_slack:
                self.min_slack = s
            if c.rhs > 0:
                r = c.lhs / c.rhs
                if self.max_ratio is None or r > self.max_ratio:
                    self.max_ratio = r


@dataclass
class SuiteReport:
    seed: int
    samples: int
    tallies: Dict[str, BoundTally]
    counterexamples: List[dict] = field(default_factory=list)

    @property
    def violated(self) -> int:
        return sum(t.violated for t in self.tallies.values())

    def to_dict(self) -> dict:
        return {"seed": self.seed, "samples": self.samples,
                "tallies": {k: asdict(v) for k, v in self.tallies.items()},
                "counterexamples": self.counterexamples}


def case_seed(seed: int, bound_id: str, case: int, attempt: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(zlib.crc32(bound_id.encode()), case, attempt))


def _pick_function(spec, rng) -> str:
    if isinstance(spec, str):
        return spec
    fam = FunctionFamily(spec["template"], {k: tuple(v) for k, v in spec["box"].items()},
                         spec.get("constraint", "none"))
    return to_text(fam.instantiate(fam.sample(rng)))


def draw_context(bound_id: str, rng: np.random.Generator, cfg: SuiteConfig) -> BoundContext:
    spec = get_spec(bound_id)
    d = PROFILES[spec.profile](rng)
    if cfg.intervals:
        a, b = cfg.intervals[int(rng.integers(len(cfg.intervals)))]
        d.iv = Interval(a, b)
    for k in ("f", "g", "h", "w"):
        if k in cfg.functions:
            setattr(d, k, _pick_function(cfg.functions[k], rng))
    return finalize(d, cfg.quad_config())


def run_case(bound_id: str, case: int, cfg: SuiteConfig):
    """Report for one case, resampling precondition failures and numeric errors."""
    resamples = errors = 0
    rep, ctx = None, None
    for attempt in range(MAX_RESAMPLE + 1):
        rng = np.random.default_rng(case_seed(cfg.seed, bound_id, case, attempt))
        try:
            with np.errstate(all="ignore"):
                ctx = draw_context(bound_id, rng, cfg)
                rep = evaluate_bound(bound_id, ctx)
        except MissingContextError:
            raise
        except NUMERIC_ERRORS + (ExprError,):
            errors += 1
            rep = None
            continue
        if rep.status != PRECONDITION_FAILED:
            break
        resamples += int(attempt < MAX_RESAMPLE)
    return rep, ctx, resamples, errors, attempt


def _counterexample(bound_id, case, attempt, cfg, ctx, rep) -> dict:
    return {"bound_id": bound_id, "case": case, "attempt": attempt, "seed": cfg.seed,
            "spawn_key": [zlib.crc32(bound_id.encode()), case, attempt],
            "context": ctx.describe(), "report": rep.to_dict()}


def _run_bound(bound_id: str, cfg: SuiteConfig):
    tally = BoundTally(bound_id)
    cex = []
    for case in range(cfg.samples):
        rep, ctx, rs, errs, attempt = run_case(bound_id, case, cfg)
        tally.add(rep)
        tally.resamples += rs
        tally.numeric_errors += errs
        if rep is not None and rep.status == VIOLATED:
            cex.append(_counterexample(bound_id, case, attempt, cfg, ctx, rep))
    return tally, cex


def run_suite(config, workers: int = 1) -> SuiteReport:
    """Run every configured bound over ``samples`` random contexts.

    Deterministic for a given config; ``workers > 1`` spreads bounds over
    processes without changing the report.
    """
    cfg = config if isinstance(config, SuiteConfig) else SuiteConfig.from_dict(config)
    for b in cfg.bounds:
        get_spec(b)
    if workers > 1 and len(cfg.bounds) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_bound, cfg.bounds, [cfg] * len(cfg.bounds)))
    else:
        results = [_run_bound(b, cfg) for b in cfg.bounds]
    report = SuiteReport(cfg.seed, cfg.samples, {})
    for b, (t, cex) in zip(cfg.bounds, results):
        report.tallies[b] = t
        report.counterexamples.extend(cex)
    return report


def write_counterexamples(report: SuiteReport, directory: str) -> List[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for c in report.counterexamples:
        p = os.path.join(directory, f"{c['bound_id']}_case{c['case']}.json")
        with open(p, "w") as fh:
            json.dump(c, fh, indent=2, default=_json_default)
        paths.append(p)
    return paths


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    return str(o)


# ------------------------------------------------------------ identities

IDENTITIES = ("phat_double", "phat_h_double", "andreief", "weighted_andreief",
              "ramified_closed_forms", "reduction_T", "reduction_P")


@dataclass
class IdentityResult:
    which: str
    passed: bool
    discrepancy: float
    scale: float
    left: float
    right: float


def _result(which, left, right, scale, rtol):
    disc = abs(left - right)
    return IdentityResult(which, bool(disc <= rtol * (1 + scale)), disc, scale, left, right)


def check_identity(which: str, ctx: BoundContext, rtol: float = fn.IDENTITY_RTOL
                   ) -> IdentityResult:
    """Check one identity between two independent evaluation routes.

    reduction_T compares P_1(f,g) with (b - a)^2 T(f,g), T being the
    normalized Chebyshev functional; reduction_P compares Phat with
    (b^3 - a^3)/3 P.  The weighted kinds use ctx.w (default x^2 + 1).
    """
    iv, env, cfg = ctx.iv, ctx.env, ctx.cfg
    f, g = ctx.f, ctx.g if ctx.g is not None else ctx.f
    h = ctx.h if ctx.h is not None else "x"
    if which == "phat_double":
        v = fn.pompeiu_Phat(f, g, iv, env, cfg)
        return _result(which, v.product_form, v.double_form, v.scale, rtol)
    if which == "phat_h_double":
        v = fn.general_Phat_h(f, g, h, iv, env, cfg)
        return _result(which, v.product_form, v.double_form, v.scale, rtol)
    if which in ("andreief", "weighted_andreief"):
        w = None
        if which == "weighted_andreief":
            w = ctx.w if ctx.w is not None else "x^2 + 1"
        v = fn.andreief(h, h, f, g, iv, env, cfg, weight=w)
        ref = fn.general_Phat_h(f, g, h, iv, env, cfg, double=False) if w is None else \
            fn.weighted_Phat_h(f, g, h, w, iv, env, cfg, double=False)
        r1 = _result(which, v.product_form, v.double_form, v.scale, rtol)
        r2 = _result(which, ref.product_form, v.double_form, v.scale, rtol)
        return r1 if r1.discrepancy >= r2.discrepancy else r2
    if which == "ramified_closed_forms":
        rf = fn.ramified_fprime_closed_forms(f, iv, env, cfg)
        pairs = [(rf.recip_closed, rf.recip_generic), (rf.self_closed, rf.self_generic)]
        res = [_result(which, c, gv.double_form, max(gv.scale, abs(c)), rtol) for c, gv in pairs]
        return max(res, key=lambda r: r.discrepancy / (1 + r.scale))
    if which == "reduction_T":
        p1 = fn.general_Phat_h(f, g, "1", iv, env, cfg)
        t = fn.chebyshev_T(f, g, iv, env, cfg)
        L2 = iv.length ** 2
        return _result(which, p1.double_form, L2 * t.product_form, max(p1.scale, L2 * t.scale),
                       rtol)
    if which == "reduction_P":
        ph = fn.pompeiu_Phat(f, g, iv, env, cfg)
        c = (iv.b ** 3 - iv.a ** 3) / 3
        return _result(which, ph.double_form, c * fn.pompeiu_P(f, g, iv, env, cfg), ph.scale,
                       rtol)
    raise ValueError(f"unknown identity {which!r}; expected one of {IDENTITIES}")


# ------------------------------------------------------------ sharpness

@dataclass
class SharpnessResult:
    bound_id: str
    best_params: Dict[str, float]
    best_ratio: float
    evaluations: int
    trace: List[Tuple[Dict[str, float], float]]
    counterexample: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"bound_id": self.bound_id, "best_params": self.best_params,
                "best_ratio": self.best_ratio, "evaluations": self.evaluations,
                "trace": [[p, r] for p, r in self.trace],
                "counterexample": self.counterexample}


class SharpnessError(RuntimeError):
    pass


def sharpness_search(bound_id: str, family: FunctionFamily, iv: Interval, budget: int = 64, *,
                     g_family: Optional[FunctionFamily] = None, h=None, exponents=None,
                     seed: int = 0) -> SharpnessResult:
    """Maximize lhs/rhs over the family's parameter box.

    Latin-hypercube seeding uses budget/2 points; Nelder-Mead refinement
    from the best three seeds shares the remaining budget.  f = g unless a
    separate ``g_family`` is given (its parameters are appended).
    """
    names = family.names + ([f"g.{k}" for k in g_family.names] if g_family else [])
    boxes = [family.param_box[k] for k in family.names] + \
        ([g_family.param_box[k] for k in g_family.names] if g_family else [])
    lo = np.array([b[0] for b in boxes])
    hi = np.array([b[1] for b in boxes])
    trace: List[Tuple[Dict[str, float], float]] = []
    cache: Dict[tuple, float] = {}
    best_rep = [None, None]

    def params(u):
        return {k: float(v) for k, v in zip(names, np.clip(u, lo, hi))}

    def ratio(u) -> float:
        key = tuple(np.round(np.clip(u, lo, hi), 15))
        if key in cache:
            return cache[key]
        p = params(u)
        fenv = {k: p[k] for k in family.names}
        ftxt = to_text(family.instantiate(fenv))
        if g_family:
            gtxt = to_text(g_family.instantiate({k: p[f"g.{k}"] for k in g_family.names}))
        else:
            gtxt = ftxt
        r = math.nan
        try:
            with np.errstate(all="ignore"):
                ctx = finalize(Draft(ftxt, gtxt, h, iv, dict(exponents or {})))
                rep = evaluate_bound(bound_id, ctx)
            if rep.status != PRECONDITION_FAILED and rep.ratio is not None:
                r = float(rep.ratio)
                if best_rep[0] is None or r > best_rep[0]:
                    best_rep[:] = [r, (ctx, rep)]
        except NUMERIC_ERRORS + (ExprError,):
            pass
        cache[key] = r
        trace.append((p, r))
        return r

    n_seed = max(1, budget // 2)
    sampler = qmc.LatinHypercube(d=len(names), seed=seed)
    pts = lo + (hi - lo) * sampler.random(n_seed)
    seeds = [(ratio(u), u) for u in pts]
    good = sorted([s for s in seeds if math.isfinite(s[0])], key=lambda s: -s[0])
    if not good:
        raise SharpnessError(f"{bound_id}: every sample failed its preconditions")
    remaining = budget - n_seed
    starts = good[:3]
    for i, (_, u0) in enumerate(starts):
        share = remaining // len(starts) + (1 if i < remaining % len(starts) else 0)
        if share <= 0:
            continue
        width = np.where(hi > lo, 0.1 * (hi - lo), 0.0)
        simplex = np.vstack([u0] + [u0 + np.eye(len(names))[k] * width[k]
                                    for k in range(len(names))])
        minimize(lambda u: -ratio(u) if math.isfinite(ratio(u)) else 1e300, u0,
                 method="Nelder-Mead",
                 options={"maxfev": share, "initial_simplex": simplex, "xatol": 1e-12,
                          "fatol": 1e-15})
    finite = [(p, r) for p, r in trace if math.isfinite(r)]
    bp, br = max(finite, key=lambda t: t[1])
    res = SharpnessResult(bound_id, bp, br, len(trace), trace)
    if br > 1 + SHARPNESS_RTOL:
        ctx, rep = best_rep[1]
        res.counterexample = {"bound_id": bound_id, "params": bp, "context": ctx.describe(),
                              "report": rep.to_dict(), "seed": seed}
    return res
