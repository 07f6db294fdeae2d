"""Univariate function expressions: parsing, evaluation, differentiation.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := number | 'x' | 'pi' | name | func '(' expr ')' | '(' expr ')'

``func`` is one of abs, exp, ln, sin, cos, sqrt, sign.  ``sign`` exists so
that derivatives of ``abs`` can be printed and re-parsed.  Any other
identifier is a parameter whose value comes from the environment.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

import numpy as np

ParamEnv = Mapping[str, float]

UNARY_OPS = ("neg", "abs", "exp", "ln", "sin", "cos", "sqrt", "sign")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTIONS = ("abs", "exp", "ln", "sin", "cos", "sqrt", "sign")


class ExprError(Exception):
    pass


class ParseError(ExprError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(ExprError, ArithmeticError):
    pass


class UnboundParameterError(ExprError, KeyError):
    def __str__(self):
        return f"unbound parameter {self.args[0]!r}"


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Param, Unary, Binary]
X = Var()


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, off = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off)
        return e

    def expr(self):
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = "add" if self.take()[1] == "+" else "sub"
            left = Binary(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = "mul" if self.take()[1] == "*" else "div"
            left = Binary(op, left, self.unary())
        return left

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Binary("pow", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", off)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Unary(val, arg)
            if val == "x":
                return X
            if val == "pi":
                return Const(math.pi)
            return Param(val)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", off)


def parse(text: str) -> Expr:
    """Parse ``text`` into an AST; raises ParseError with the offending offset."""
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text).parse()


def as_expr(e: Union[str, Expr, float, int]) -> Expr:
    if isinstance(e, str):
        return parse(e)
    if isinstance(e, (int, float)) and not isinstance(e, bool):
        return Const(float(e))
    if isinstance(e, (Const, Var, Param, Unary, Binary)):
        return e
    raise TypeError(f"cannot interpret {e!r} as an expression")


# --------------------------------------------------------------- printing

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYM = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return 3
    if isinstance(e, Const) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return 3
    return 5


def _num(v: float) -> str:
    if v == int(v) and v < 2.0**53:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Print ``e`` so that ``parse(to_text(e))`` rebuilds the same tree shape."""
    if isinstance(e, Const):
        v = e.value
        if not math.isfinite(v):
            raise ExprError(f"cannot print non-finite constant {v}")
        if math.copysign(1.0, v) < 0:
            return "-" + _num(-v)
        return _num(v)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = to_text(e.arg)
            if _prec(e.arg) < 3 or inner.startswith("-"):
                inner = f"({inner})"
            return "-" + inner
        return f"{e.op}({to_text(e.arg)})"
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "pow":
        if _prec(e.left) <= 4:
            left = f"({left})"
        if _prec(e.right) < 3:
            right = f"({right})"
    else:
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
    return f"{left} {_SYM[e.op]} {right}"


# ------------------------------------------------------------- evaluation

def depends_on_x(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Const, Param)):
        return False
    if isinstance(e, Unary):
        return depends_on_x(e.arg)
    return depends_on_x(e.left) or depends_on_x(e.right)


def parameters(e: Expr) -> frozenset:
    if isinstance(e, Param):
        return frozenset([e.name])
    if isinstance(e, (Const, Var)):
        return frozenset()
    if isinstance(e, Unary):
        return parameters(e.arg)
    return parameters(e.left) | parameters(e.right)


def _fail(mask, what, strict):
    if strict and np.any(mask):
        raise DomainError(what)


def _eval(e: Expr, x, env: ParamEnv, strict: bool):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Param):
        try:
            return float(env[e.name])
        except KeyError:
            raise UnboundParameterError(e.name) from None
    if isinstance(e, Unary):
        u = _eval(e.arg, x, env, strict)
        op = e.op
        if op == "neg":
            return -u
        if op == "abs":
            return np.abs(u)
        if op == "sign":
            return np.sign(u)
        if op == "sin":
            return np.sin(u)
        if op == "cos":
            return np.cos(u)
        if op == "exp":
            out = np.exp(u)
            _fail(np.isinf(out) & np.isfinite(u), "exp overflow", strict)
            return out
        if op == "ln":
            bad = ~(np.asarray(u) > 0)
            _fail(bad, "ln of non-positive argument", strict)
            return np.where(bad, np.nan, np.log(np.where(bad, 1.0, u)))
        if op == "sqrt":
            bad = ~(np.asarray(u) >= 0)
            _fail(bad, "sqrt of negative argument", strict)
            return np.where(bad, np.nan, np.sqrt(np.where(bad, 0.0, u)))
        raise ExprError(f"unknown unary op {op!r}")
    lv = _eval(e.left, x, env, strict)
    rv = _eval(e.right, x, env, strict)
    op = e.op
    if op == "add":
        return lv + rv
    if op == "sub":
        return lv - rv
    if op == "mul":
        return lv * rv
    if op == "div":
        bad = np.asarray(rv) == 0
        _fail(bad, "division by zero", strict)
        return np.where(bad, np.nan, lv / np.where(bad, 1.0, rv))
    if op == "pow":
        lv_a, rv_a = np.asarray(lv, dtype=float), np.asarray(rv, dtype=float)
        integral = rv_a == np.round(rv_a)
        # non-integer exponents need base > 0; base 0 is allowed for exponent > 0
        bad = (~integral & (lv_a < 0)) | ((lv_a == 0) & (rv_a <= 0) & ~((rv_a == 0) & integral))
        _fail(bad, "invalid power (negative base or 0 to a non-positive power)", strict)
        base = np.where(bad, 1.0, lv_a)
        out = np.where(bad, np.nan, np.power(base, rv_a))
        _fail(np.isinf(out) & np.isfinite(base) & ~bad, "power overflow", strict)
        return out
    raise ExprError(f"unknown binary op {op!r}")


def evaluate(e: Union[str, Expr], x, env: ParamEnv | None = None, *, strict: bool = True):
    """Evaluate ``e`` at ``x`` (scalar or array).

    With ``strict=True`` any point outside the domain raises DomainError;
    otherwise such points evaluate to nan.  Scalars in, float out.
    """
    e = as_expr(e)
    env = {} if env is None else env
    scalar = np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(e, xa, env, strict)
    out = np.broadcast_to(np.asarray(out, dtype=float), xa.shape)
    if scalar:
        return float(out)
    return np.array(out)


def compile_expr(e: Union[str, Expr], env: ParamEnv | None = None, *, strict: bool = True
                 ) -> Callable[[np.ndarray], np.ndarray]:
    """Bind ``e`` and ``env`` into a vectorized callable of x."""
    e = as_expr(e)
    missing = parameters(e) - set(env or {})
    if missing:
        raise UnboundParameterError(sorted(missing)[0])
    env = dict(env or {})

    def fn(x):
        return evaluate(e, x, env, strict=strict)

    fn.expr = e
    return fn


# -------------------------------------------------------- differentiation

def _is(e, v):
    return isinstance(e, Const) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return Binary("add", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    return Binary("sub", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is(a, 0) or _is(b, 0):
        return Const(0.0)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    return Binary("mul", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    if _is(b, 1):
        return a
    return Binary("div", a, b)


def power(a: Expr, b: Expr) -> Expr:
    if _is(b, 1):
        return a
    if _is(b, 0):
        return Const(1.0)
    if isinstance(a, Const) and isinstance(b, Const) and a.value > 0:
        return Const(a.value ** b.value)
    return Binary("pow", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def call(op: str, a: Expr) -> Expr:
    return Unary(op, a)


def differentiate(e: Union[str, Expr]) -> Expr:
    """Symbolic d/dx with constant folding.

    ``abs`` differentiates to ``sign`` (value 0 at the kink).
    """
    e = as_expr(e)
    if isinstance(e, (Const, Param)):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Unary):
        u = e.arg
        du = differentiate(u)
        if _is(du, 0):
            return Const(0.0)
        op = e.op
        if op == "neg":
            return neg(du)
        if op == "abs":
            return mul(call("sign", u), du)
        if op == "sign":
            return Const(0.0)
        if op == "exp":
            return mul(e, du)
        if op == "ln":
            return div(du, u)
        if op == "sin":
            return mul(call("cos", u), du)
        if op == "cos":
            return neg(mul(call("sin", u), du))
        if op == "sqrt":
            return div(du, mul(Const(2.0), e))
        raise ExprError(f"unknown unary op {op!r}")
    a, b = e.left, e.right
    da, db = differentiate(a), differentiate(b)
    op = e.op
    if op == "add":
        return add(da, db)
    if op == "sub":
        return sub(da, db)
    if op == "mul":
        return add(mul(da, b), mul(a, db))
    if op == "div":
        if _is(db, 0):
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, Const(2.0)))
    if op == "pow":
        if not depends_on_x(b):
            return mul(mul(b, power(a, sub(b, Const(1.0)))), da)
        # d(a^b) = a^b (b' ln a + b a'/a)
        return mul(e, add(mul(db, call("ln", a)), div(mul(b, da), a)))
    raise ExprError(f"unknown binary op {op!r}")


def pompeiu_deviation(f: Union[str, Expr]) -> Expr:
    """f - x f'."""
    f = as_expr(f)
    return sub(f, mul(X, differentiate(f)))


def boggio_deviation(f: Union[str, Expr], h: Union[str, Expr]) -> Expr:
    """h f' - f h'."""
    f, h = as_expr(f), as_expr(h)
    return sub(mul(h, differentiate(f)), mul(f, differentiate(h)))
