"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 a bound was
violated, 3 numeric failure (quadrature, domain or root-finding errors).
All numbers are written with 17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Dict, List, Optional, Sequence

import jsonschema

from . import functionals as fn
from .bounds import (CATALOG, VIOLATED, BoundContext, MissingContextError, UnknownBoundError,
                     evaluate_bound, get_spec, list_bounds)
from .expr import DomainError, ExprError, evaluate, parse
from .mvt import boggio_xi, pompeiu_xi
from .quad import Interval, QuadratureError
from .verify import (SHARPNESS_RTOL, FunctionFamily, SharpnessError, SuiteConfig, run_suite,
                     sharpness_search, write_counterexamples)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, EXIT_NUMERIC = 0, 1, 2, 3
CSV_COLUMNS = ("bound_id", "cases", "holds", "violated", "prec_failed", "min_slack", "max_ratio")

_NUM = {"type": ["number", "null"]}
FAMILY_SCHEMA = {
    "type": "object",
    "properties": {
        "template": {"type": "string"},
        "box": {"type": "object", "additionalProperties": {
            "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
        "constraint": {"enum": ["none", "increasing", "decreasing", "convex", "positive",
                                "bounded"]},
    },
    "required": ["template", "box"],
    "additionalProperties": False,
}
SUITE_CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "bounds": {"type": "array", "items": {"type": "string"}},
        "functions": {"type": "object",
                      "propertyNames": {"enum": ["f", "g", "h", "w"]},
                      "additionalProperties": {"oneOf": [{"type": "string"}, FAMILY_SCHEMA]}},
        "intervals": {"type": "array", "items": {
            "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
        "samples": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "quad": {"type": "object", "properties": {
            "abs_tol": {"type": "number", "exclusiveMinimum": 0},
            "rel_tol": {"type": "number", "exclusiveMinimum": 0},
            "max_subdivisions": {"type": "integer", "minimum": 1}},
            "additionalProperties": False},
        "output": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
    },
    "required": ["bounds"],
    "additionalProperties": False,
}
TALLY_SCHEMA = {
    "type": "object",
    "properties": {"bound_id": {"type": "string"}, "cases": {"type": "integer"},
                   "holds": {"type": "integer"}, "violated": {"type": "integer"},
                   "precondition_failed": {"type": "integer"}, "min_slack": _NUM,
                   "max_ratio": _NUM, "resamples": {"type": "integer"},
                   "numeric_errors": {"type": "integer"}},
    "required": ["bound_id", "cases", "holds", "violated", "precondition_failed"],
    "additionalProperties": False,
}
SUITE_REPORT_SCHEMA = {
    "type": "object",
    "properties": {"seed": {"type": "integer"}, "samples": {"type": "integer"},
                   "tallies": {"type": "object", "additionalProperties": TALLY_SCHEMA},
                   "counterexamples": {"type": "array", "items": {"type": "object"}}},
    "required": ["seed", "samples", "tallies", "counterexamples"],
    "additionalProperties": False,
}
BOUND_REPORT_SCHEMA = {
    "type": "object",
    "properties": {
        "id": {"type": "string"},
        "status": {"enum": ["holds", "violated", "precondition_failed"]},
        "lhs": _NUM, "rhs": _NUM, "slack": _NUM, "ratio": _NUM,
        "component": {"type": ["string", "null"]},
        "preconditions": {"type": "array", "items": {
            "type": "object",
            "properties": {"name": {"type": "string"}, "satisfied": {"type": "boolean"},
                           "detail": {"type": "string"}},
            "required": ["name", "satisfied", "detail"], "additionalProperties": False}},
        "components": {"type": "array", "items": {
            "type": "object", "properties": {"label": {"type": "string"}, "lhs": _NUM,
                                             "rhs": _NUM},
            "required": ["label", "lhs", "rhs"], "additionalProperties": False}},
        "details": {"type": "object"},
    },
    "required": ["id", "status", "lhs", "rhs", "slack", "ratio", "preconditions"],
    "additionalProperties": False,
}
SHARPNESS_SCHEMA = {
    "type": "object",
    "properties": {"bound_id": {"type": "string"},
                   "best_params": {"type": "object", "additionalProperties": {"type": "number"}},
                   "best_ratio": {"type": "number"}, "evaluations": {"type": "integer"},
                   "trace": {"type": "array"}, "counterexample": {"type": ["object", "null"]}},
    "required": ["bound_id", "best_params", "best_ratio", "evaluations", "trace"],
    "additionalProperties": False,
}


class UsageError(Exception):
    pass


# ------------------------------------------------------------ output

def fmt(x) -> str:
    """17 significant digits."""
    return format(float(x), ".17g")


def _plain(o):
    """JSON-ready copy: non-finite floats become null, numpy scalars become Python."""
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if hasattr(o, "item") and not isinstance(o, (str, bytes)):
        o = o.item()
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, (str, int, float, bool)) or o is None:
        return o
    return str(o)


def dumps(obj, indent: int = 2) -> str:
    """JSON with every float at 17 significant digits."""
    return _write(_plain(obj), indent, 0)


def _write(o, indent: int, level: int) -> str:
    if isinstance(o, bool) or o is None:
        return json.dumps(o)
    if isinstance(o, float):
        return fmt(o)
    if isinstance(o, (int, str)):
        return json.dumps(o)
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_write(v, indent, level + 1)}" for k, v in o.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if not o:
        return "[]"
    items = [inner + _write(v, indent, level + 1) for v in o]
    return "[\n" + ",\n".join(items) + "\n" + pad + "]"


def summary_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for t in report.tallies.values():
        w.writerow([t.bound_id, t.cases, t.holds, t.violated, t.precondition_failed,
                    "" if t.min_slack is None else fmt(t.min_slack),
                    "" if t.max_ratio is None else fmt(t.max_ratio)])
    return buf.getvalue()


# ------------------------------------------------------------ parsing helpers

def parse_params(items: Optional[Sequence[str]]) -> Dict[str, float]:
    env: Dict[str, float] = {}
    for item in items or []:
        for part in item.split(","):
            if "=" not in part:
                raise UsageError(f"expected name=value, got {part!r}")
            k, v = part.split("=", 1)
            k = k.strip()
            if k in env:
                raise UsageError(f"parameter {k!r} given twice")
            env[k] = _float(v)
    return env


def _float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise UsageError(f"not a number: {s!r}") from None


def _csv_floats(s: Optional[str], names: Sequence[str], what: str) -> Dict[str, float]:
    if s is None:
        return {}
    vals = [v.strip() for v in s.split(",")]
    if len(vals) != len(names):
        raise UsageError(f"--{what} expects {len(names)} comma-separated values "
                         f"({','.join(names)})")
    return {k: _float(v) for k, v in zip(names, vals) if v != ""}


def parse_box(s: str) -> Dict[str, tuple]:
    box = {}
    for part in s.split(","):
        if "=" not in part or ":" not in part:
            raise UsageError(f"expected name=lo:hi, got {part!r}")
        k, rng = part.split("=", 1)
        lo, hi = rng.split(":", 1)
        box[k.strip()] = (_float(lo), _float(hi))
    return box


def _interval(a, b) -> Interval:
    try:
        return Interval(a, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------ subcommands

def cmd_eval(args, out):
    env = parse_params(args.param)
    v = evaluate(parse(args.expr), _float(args.at), env)
    print(fmt(v), file=out)
    return EXIT_OK


def cmd_functional(args, out):
    env = parse_params(args.param)
    iv = _interval(args.a, args.b)
    k = args.kind

    def need(name):
        v = getattr(args, name)
        if v is None:
            raise UsageError(f"--kind {k} needs --{name}")
        return parse(v)
    f = parse(args.f)
    res: Dict[str, object] = {"kind": k}
    if k in ("T", "Phat", "Phat_h", "weighted"):
        g = need("g")
        if k == "T":
            v = fn.chebyshev_T(f, g, iv, env)
        elif k == "Phat":
            v = fn.pompeiu_Phat(f, g, iv, env)
        elif k == "Phat_h":
            v = fn.general_Phat_h(f, g, need("h"), iv, env)
        else:
            v = fn.weighted_Phat_h(f, g, need("h"), need("w"), iv, env)
        res.update(product_form=v.product_form, double_form=v.double_form,
                   discrepancy=v.discrepancy)
        print(dumps(res), file=out)
        return EXIT_OK
    # the remaining kinds have a single form
    if k == "P":
        value = fn.pompeiu_P(f, need("g"), iv, env)
    elif k == "hardy":
        value = fn.hardy_H(f, iv, env)
    elif k == "hardy_h":
        value = fn.hardy_H_h(f, need("h"), iv, env)
    elif k == "hardy_p":
        if args.p is None:
            raise UsageError("--kind hardy_p needs --p")
        h = parse(args.h) if args.h else None
        value = fn.hardy_Hp(f, args.p, iv, env, h=h)
    else:
        value = fn.hardy_phi_functional(f, iv.a, iv.b, env)
    res.update(product_form=value, double_form=None, discrepancy=None)
    print(dumps(res), file=out)
    return EXIT_OK


def context_from_args(args) -> BoundContext:
    env = parse_params(args.param)
    rb = _csv_floats(args.range, ("phi", "Phi", "gamma", "Gamma"), "range")
    rb.update(_csv_floats(args.ratio, ("m", "M", "n", "N"), "ratio"))
    holder = _csv_floats(args.holder, ("H1", "p", "H2", "q"), "holder")
    ex = parse_params(args.exponents)
    iv = _interval(args.a, args.b)
    try:
        ctx = BoundContext(parse(args.f), parse(args.g) if args.g else None,
                           parse(args.h) if args.h else None, iv, env, rb, holder, ex,
                           parse(args.w) if args.w else None)
    except ValueError as exc:
        if isinstance(exc, ExprError):
            raise
        raise UsageError(str(exc)) from None
    if args.auto_ranges:
        ctx = ctx.with_auto_ranges()
    return ctx


def cmd_bound(args, out):
    rep = evaluate_bound(args.id, context_from_args(args))
    d = rep.to_dict()
    print(dumps(d), file=out)
    return EXIT_VIOLATED if rep.status == VIOLATED else EXIT_OK


def cmd_mvt(args, out):
    env = parse_params(args.param)
    if args.variant == "pompeiu":
        sol = pompeiu_xi(parse(args.f), args.x1, args.x2, env, allow_zero=args.allow_zero)
    else:
        if args.h is None:
            raise UsageError("--variant boggio needs --h")
        sol = boggio_xi(parse(args.f), parse(args.h), args.x1, args.x2, env)
    print(dumps({"variant": args.variant, "xi_roots": sol.xi_roots, "residuals": sol.residuals,
                 "lhs_value": sol.lhs_value, "all_solutions": sol.all_solutions,
                 "warnings": sol.warnings}), file=out)
    return EXIT_OK if sol.found else EXIT_NUMERIC


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        jsonschema.validate(cfg, SUITE_CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"invalid config: {exc.message}") from None
    for b in cfg["bounds"]:
        try:
            get_spec(b)
        except UnknownBoundError as exc:
            raise UsageError(str(exc)) from None
    return cfg


def cmd_suite(args, out):
    cfg = load_config(args.config)
    workers = int(cfg.pop("workers", 1))
    if args.workers:
        workers = args.workers
    config = SuiteConfig.from_dict(cfg)
    report = run_suite(config, workers=workers)
    path = args.out or config.output
    text = dumps(report.to_dict())
    table = summary_csv(report)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
        csv_path = (path[:-5] if path.endswith(".json") else path) + ".csv"
        with open(csv_path, "w") as fh:
            fh.write(table)
        if report.counterexamples:
            write_counterexamples(report, (path[:-5] if path.endswith(".json") else path)
                                  + "_counterexamples")
    else:
        print(text, file=out)
    print(table, end="", file=sys.stderr if not path else out)
    return EXIT_VIOLATED if report.violated > 0 else EXIT_OK


def cmd_sharpness(args, out):
    fam = FunctionFamily(parse(args.family), parse_box(args.box))
    gfam = None
    if args.g_family:
        if not args.g_box:
            raise UsageError("--g-family needs --g-box")
        gfam = FunctionFamily(parse(args.g_family), parse_box(args.g_box))
    h = parse(args.h) if args.h else None
    res = sharpness_search(args.id, fam, _interval(args.a, args.b), args.budget, g_family=gfam,
                           h=h, exponents=parse_params(args.exponents), seed=args.seed)
    print(dumps(res.to_dict()), file=out)
    if args.id in CATALOG and res.best_ratio > 1 + SHARPNESS_RTOL:
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_list(args, out):
    rows = list_bounds(include_errata=args.errata)
    if args.json:
        print(dumps(rows), file=out)
        return EXIT_OK
    w = max(len(r["id"]) for r in rows)
    for r in rows:
        print(f"{r['id']:<{w}}  {r['theorem']}", file=out)
        print(f"{'':<{w}}  requires: {', '.join(r['requires'])}", file=out)
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pompeiu-lab",
                                description="Chebyshev and Pompeiu functionals and bounds")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate an expression")
    e.add_argument("--expr", required=True)
    e.add_argument("--at", required=True)
    e.add_argument("--param", action="append", metavar="NAME=VAL")
    e.set_defaults(run=cmd_eval)

    f = sub.add_parser("functional", help="evaluate a functional")
    f.add_argument("--kind", required=True, choices=["T", "P", "Phat", "Phat_h", "weighted",
                                                     "hardy", "hardy_p", "hardy_h", "hardy_phi"])
    for name in ("f",):
        f.add_argument(f"--{name}", required=True)
    for name in ("g", "h", "w"):
        f.add_argument(f"--{name}")
    f.add_argument("--p", type=float)
    f.add_argument("--a", type=float, required=True)
    f.add_argument("--b", type=float, required=True)
    f.add_argument("--param", action="append", metavar="NAME=VAL")
    f.set_defaults(run=cmd_functional)

    b = sub.add_parser("bound", help="check one catalog bound")
    b.add_argument("--id", required=True)
    b.add_argument("--f", required=True)
    b.add_argument("--g")
    b.add_argument("--h")
    b.add_argument("--w")
    b.add_argument("--a", type=float, required=True)
    b.add_argument("--b", type=float, required=True)
    b.add_argument("--range", metavar="phi,Phi,gamma,Gamma")
    b.add_argument("--ratio", metavar="m,M,n,N")
    b.add_argument("--holder", metavar="H1,p,H2,q")
    b.add_argument("--exponents", action="append", metavar="p=..,q=..,alpha=..,beta=..")
    b.add_argument("--auto-ranges", action="store_true",
                   help="fill unsupplied phi/Phi and gamma/Gamma from a scan")
    b.add_argument("--param", action="append", metavar="NAME=VAL")
    b.set_defaults(run=cmd_bound)

    m = sub.add_parser("mvt", help="mean-value points")
    m.add_argument("--variant", required=True, choices=["pompeiu", "boggio"])
    m.add_argument("--f", required=True)
    m.add_argument("--h")
    m.add_argument("--x1", type=float, required=True)
    m.add_argument("--x2", type=float, required=True)
    m.add_argument("--allow-zero", action="store_true")
    m.add_argument("--param", action="append", metavar="NAME=VAL")
    m.set_defaults(run=cmd_mvt)

    s = sub.add_parser("suite", help="run a randomized soundness suite")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    s.set_defaults(run=cmd_suite)

    h = sub.add_parser("sharpness", help="maximize lhs/rhs over a family")
    h.add_argument("--id", required=True)
    h.add_argument("--family", required=True)
    h.add_argument("--box", required=True, metavar="name=lo:hi[,..]")
    h.add_argument("--g-family")
    h.add_argument("--g-box")
    h.add_argument("--h")
    h.add_argument("--exponents", action="append")
    h.add_argument("--a", type=float, required=True)
    h.add_argument("--b", type=float, required=True)
    h.add_argument("--budget", type=int, default=64)
    h.add_argument("--seed", type=int, default=0)
    h.set_defaults(run=cmd_sharpness)

    ls = sub.add_parser("list", help="print the bound catalog")
    ls.add_argument("--errata", action="store_true", help="include as-printed variants")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(run=cmd_list)
    return p


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.run(args, out)
    except (UsageError, UnknownBoundError, MissingContextError, SharpnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, DomainError, ArithmeticError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ExprError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
