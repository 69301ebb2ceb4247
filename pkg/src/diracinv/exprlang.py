"""Closed-form complex scalar expressions: parser, exact differentiator, evaluator.

Grammar (conventional precedence climbing)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, tighter than unary minus
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Exponents must constant-fold to integers.  Variables are exactly x0..x3;
``i``, ``pi`` and ``e`` are built-in constants; any other name is a user
parameter bound at evaluation time.  Functions: sin cos tan exp log sqrt
sinh cosh (principal branches).

Two node kinds are internal and never produced by the parser: ``Conj``
(componentwise complex conjugate; its partial derivatives along the real
coordinates are the conjugated partials) and ``PathIntegral`` (an integral
of the operand along the x0 axis from a fixed lower limit, evaluated by
adaptive quadrature).  They print in a debug form the parser rejects.

Differentiation is exact on the AST; evaluation is IEEE double complex.
Non-finite intermediate results raise ``EvaluationError`` instead of
propagating.
"""

from __future__ import annotations

import cmath
import math
import re
import warnings
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np
import scipy.integrate

from .errors import EvaluationError, ParseError, QuadratureError

VARIABLES = ("x0", "x1", "x2", "x3")
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")
BUILTIN_CONSTANTS = {"i": 1j, "pi": complex(math.pi), "e": complex(math.e)}

QUADRATURE_TOL = 1e-11


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Sub:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Mul:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Div:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class Conj:
    arg: "Expr"


@dataclass(frozen=True)
class PathIntegral:
    """Integral of ``integrand`` over the x0 slot from ``lower`` to the current x0."""

    integrand: "Expr"
    lower: float


Expr = Union[Num, Name, Neg, Add, Sub, Mul, Div, Pow, Call, Conj, PathIntegral]

ZERO = Num(0j)
ONE = Num(1 + 0j)


def _is_num(e: Expr, value: complex | None = None) -> bool:
    return isinstance(e, Num) and (value is None or e.value == value)


# Smart constructors: fold literal arithmetic and prune algebraic identities so
# derivative trees stay small.  Division keeps a literal zero denominator
# unfolded; the error belongs to evaluation.

def add(lhs: Expr, rhs: Expr) -> Expr:
    if _is_num(lhs) and _is_num(rhs):
        return Num(lhs.value + rhs.value)
    if _is_num(lhs, 0j):
        return rhs
    if _is_num(rhs, 0j):
        return lhs
    return Add(lhs, rhs)


def sub(lhs: Expr, rhs: Expr) -> Expr:
    if _is_num(lhs) and _is_num(rhs):
        return Num(lhs.value - rhs.value)
    if _is_num(rhs, 0j):
        return lhs
    if _is_num(lhs, 0j):
        return neg(rhs)
    return Sub(lhs, rhs)


def neg(arg: Expr) -> Expr:
    if _is_num(arg):
        return Num(-arg.value)
    if isinstance(arg, Neg):
        return arg.arg
    return Neg(arg)


def mul(lhs: Expr, rhs: Expr) -> Expr:
    if _is_num(lhs) and _is_num(rhs):
        return Num(lhs.value * rhs.value)
    if _is_num(lhs, 0j) or _is_num(rhs, 0j):
        return ZERO
    if _is_num(lhs, 1 + 0j):
        return rhs
    if _is_num(rhs, 1 + 0j):
        return lhs
    return Mul(lhs, rhs)


def div(lhs: Expr, rhs: Expr) -> Expr:
    if _is_num(lhs) and _is_num(rhs) and rhs.value != 0:
        return Num(lhs.value / rhs.value)
    if _is_num(lhs, 0j) and not _is_num(rhs):
        return ZERO
    if _is_num(rhs, 1 + 0j):
        return lhs
    return Div(lhs, rhs)


def powi(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if _is_num(base) and (base.value != 0 or exponent > 0):
        return Num(base.value ** exponent)
    return Pow(base, exponent)


def call(func: str, arg: Expr) -> Expr:
    return Call(func, arg)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | one of "+-*/^(),", or "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            offset = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", offset,
                             ("number", "name", "operator"))
        if match.lastgroup == "op":
            tokens.append(_Token(match.group("op"), match.group("op"), match.start("op")))
        elif match.lastgroup == "num":
            tokens.append(_Token("num", match.group("num"), match.start("num")))
        else:
            tokens.append(_Token("name", match.group("name"), match.start("name")))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.idx = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str) -> _Token:
        if self.current.kind != kind:
            raise ParseError(f"unexpected {self._describe(self.current)}",
                             self.current.pos, (kind,))
        return self.advance()

    @staticmethod
    def _describe(tok: _Token) -> str:
        return "end of input" if tok.kind == "end" else f"token {tok.text!r}"

    def parse(self) -> Expr:
        expr = self.expr()
        if self.current.kind != "end":
            raise ParseError(f"unexpected {self._describe(self.current)}",
                             self.current.pos, ("operator", "end of input"))
        return expr

    def expr(self) -> Expr:
        node = self.term()
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.current.kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def unary(self) -> Expr:
        if self.current.kind == "-":
            self.advance()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.kind == "^":
            caret = self.advance()
            exponent = self.unary()
            if not isinstance(exponent, Num) or exponent.value.imag != 0 \
                    or exponent.value.real != int(exponent.value.real):
                raise ParseError("exponent must be an integer constant", caret.pos,
                                 ("integer",))
            return powi(base, int(exponent.value.real))
        return base

    def atom(self) -> Expr:
        tok = self.current
        if tok.kind == "num":
            self.advance()
            return Num(complex(float(tok.text)))
        if tok.kind == "name":
            self.advance()
            if self.current.kind == "(":
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}", tok.pos, FUNCTIONS)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return call(tok.text, arg)
            return Name(tok.text)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {self._describe(tok)}", tok.pos,
                         ("number", "name", "(", "-"))


def parse(text: str) -> Expr:
    """Parse expression text into an AST; raises ParseError with offset."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_ATOM_PREC = 5


def _prec(e: Expr) -> int:
    return _PREC.get(type(e), _ATOM_PREC)


def _num_text(value: complex) -> str:
    def real_text(x: float) -> str:
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return repr(x)

    if value.imag == 0:
        x = value.real
        return real_text(x) if x >= 0 else f"(0-{real_text(-x)})"
    if value.real == 0:
        im = value.imag
        return f"({real_text(im)}*i)" if im >= 0 else f"(0-{real_text(-im)}*i)"
    sign = "+" if value.imag >= 0 else "-"
    return f"({real_text(value.real) if value.real >= 0 else '0-' + real_text(-value.real)}" \
           f"{sign}{real_text(abs(value.imag))}*i)"


def to_text(e: Expr) -> str:
    """Render an AST as parseable text (internal nodes use a debug form)."""
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        if _prec(e.arg) < _PREC[Neg]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, (Add, Sub, Mul, Div)):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        my = _prec(e)
        lhs = to_text(e.lhs)
        if _prec(e.lhs) < my:
            lhs = f"({lhs})"
        rhs = to_text(e.rhs)
        # -, / are left-associative: parenthesize an equal-precedence rhs.
        if _prec(e.rhs) < my or (_prec(e.rhs) == my and op in ("-", "/")):
            rhs = f"({rhs})"
        return f"{lhs}{op}{rhs}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if _prec(e.base) <= _PREC[Pow]:
            base = f"({base})"
        exp = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{base}^{exp}"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Conj):
        return f"conj({to_text(e.arg)})"
    if isinstance(e, PathIntegral):
        return f"integral0({to_text(e.integrand)}, {e.lower!r})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Differentiation

def differentiate(e: Expr, axis: int) -> Expr:
    """Exact symbolic partial derivative along coordinate axis 0..3."""
    if axis not in (0, 1, 2, 3):
        raise ValueError(f"axis must be in 0..3, got {axis!r}")
    return _diff(e, axis)


def _diff(e: Expr, axis: int) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Name):
        return ONE if e.ident == VARIABLES[axis] else ZERO
    if isinstance(e, Neg):
        return neg(_diff(e.arg, axis))
    if isinstance(e, Add):
        return add(_diff(e.lhs, axis), _diff(e.rhs, axis))
    if isinstance(e, Sub):
        return sub(_diff(e.lhs, axis), _diff(e.rhs, axis))
    if isinstance(e, Mul):
        return add(mul(_diff(e.lhs, axis), e.rhs), mul(e.lhs, _diff(e.rhs, axis)))
    if isinstance(e, Div):
        num = sub(mul(_diff(e.lhs, axis), e.rhs), mul(e.lhs, _diff(e.rhs, axis)))
        return div(num, powi(e.rhs, 2))
    if isinstance(e, Pow):
        inner = _diff(e.base, axis)
        return mul(mul(Num(complex(e.exponent)), powi(e.base, e.exponent - 1)), inner)
    if isinstance(e, Call):
        inner = _diff(e.arg, axis)
        rules = {
            "sin": lambda a: call("cos", a),
            "cos": lambda a: neg(call("sin", a)),
            "tan": lambda a: div(ONE, powi(call("cos", a), 2)),
            "exp": lambda a: call("exp", a),
            "log": lambda a: div(ONE, a),
            "sqrt": lambda a: div(ONE, mul(Num(2 + 0j), call("sqrt", a))),
            "sinh": lambda a: call("cosh", a),
            "cosh": lambda a: call("sinh", a),
        }
        return mul(rules[e.func](e.arg), inner)
    if isinstance(e, Conj):
        # Partials are along real coordinates, so they commute with conjugation.
        return _conj(_diff(e.arg, axis))
    if isinstance(e, PathIntegral):
        if axis == 0:
            return e.integrand
        return PathIntegral(_diff(e.integrand, axis), e.lower)
    raise TypeError(f"not an expression node: {e!r}")


def _conj(e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(e.value.conjugate())
    if isinstance(e, Conj):
        return e.arg
    return Conj(e)


def conjugate(e: Expr) -> Expr:
    """Complex conjugate of an expression (internal node; not parseable)."""
    return _conj(e)


def path_integral(integrand: Expr, lower: float) -> Expr:
    """Integral of ``integrand`` along the x0 slot from ``lower`` (quadrature node)."""
    if _is_num(integrand, 0j):
        return ZERO
    return PathIntegral(integrand, float(lower))


# ---------------------------------------------------------------------------
# Evaluation

_CFUNCS = {
    "sin": cmath.sin, "cos": cmath.cos, "tan": cmath.tan, "exp": cmath.exp,
    "log": cmath.log, "sqrt": cmath.sqrt, "sinh": cmath.sinh, "cosh": cmath.cosh,
}
_NPFUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "log": np.log, "sqrt": np.sqrt, "sinh": np.sinh, "cosh": np.cosh,
}


def _check_finite(value, e: Expr, what: str):
    ok = np.all(np.isfinite(value)) if isinstance(value, np.ndarray) else cmath.isfinite(value)
    if not ok:
        raise EvaluationError(f"{what} produced a non-finite value in {to_text(e)!r}")
    return value


def _resolve(ident: str, coords, params: Mapping[str, complex]):
    for k, var in enumerate(VARIABLES):
        if ident == var:
            return coords[k]
    if ident in BUILTIN_CONSTANTS:
        return BUILTIN_CONSTANTS[ident]
    if params is not None and ident in params:
        return complex(params[ident])
    raise EvaluationError(f"unbound name {ident!r}")


def _eval_scalar(e: Expr, coords, params) -> complex:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Name):
        value = _resolve(e.ident, coords, params)
        return complex(value)
    if isinstance(e, Neg):
        return -_eval_scalar(e.arg, coords, params)
    if isinstance(e, Add):
        return _eval_scalar(e.lhs, coords, params) + _eval_scalar(e.rhs, coords, params)
    if isinstance(e, Sub):
        return _eval_scalar(e.lhs, coords, params) - _eval_scalar(e.rhs, coords, params)
    if isinstance(e, Mul):
        value = _eval_scalar(e.lhs, coords, params) * _eval_scalar(e.rhs, coords, params)
        return _check_finite(value, e, "multiplication")
    if isinstance(e, Div):
        den = _eval_scalar(e.rhs, coords, params)
        if den == 0:
            raise EvaluationError(f"division produced a non-finite value in {to_text(e)!r}")
        return _check_finite(_eval_scalar(e.lhs, coords, params) / den, e, "division")
    if isinstance(e, Pow):
        base = _eval_scalar(e.base, coords, params)
        if base == 0 and e.exponent < 0:
            raise EvaluationError(f"power produced a non-finite value in {to_text(e)!r}")
        try:
            return _check_finite(base ** e.exponent, e, "power")
        except OverflowError:
            raise EvaluationError(f"power produced a non-finite value in {to_text(e)!r}")
    if isinstance(e, Call):
        arg = _eval_scalar(e.arg, coords, params)
        try:
            value = _CFUNCS[e.func](arg)
        except (ValueError, OverflowError):
            raise EvaluationError(f"domain error in {e.func} at argument {arg!r}")
        return _check_finite(value, e, e.func)
    if isinstance(e, Conj):
        return _eval_scalar(e.arg, coords, params).conjugate()
    if isinstance(e, PathIntegral):
        return _eval_path_integral(e, coords, params)
    raise TypeError(f"not an expression node: {e!r}")


def _eval_path_integral(e: PathIntegral, coords, params) -> complex:
    upper = coords[0]
    if isinstance(upper, complex):
        upper = upper.real
    rest = coords[1], coords[2], coords[3]

    def integrand(s: float, which: str) -> float:
        value = _eval_scalar(e.integrand, (s, *rest), params)
        return value.real if which == "re" else value.imag

    total = 0j
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
        try:
            re_part, _ = scipy.integrate.quad(
                integrand, e.lower, upper, args=("re",),
                epsabs=QUADRATURE_TOL, epsrel=QUADRATURE_TOL, limit=200)
            im_part, _ = scipy.integrate.quad(
                integrand, e.lower, upper, args=("im",),
                epsabs=QUADRATURE_TOL, epsrel=QUADRATURE_TOL, limit=200)
        except scipy.integrate.IntegrationWarning as exc:
            raise QuadratureError(f"path quadrature failed: {exc}") from exc
        except EvaluationError as exc:
            raise QuadratureError(f"path quadrature failed: {exc}") from exc
    total = complex(re_part, im_part)
    if not cmath.isfinite(total):
        raise QuadratureError("path quadrature produced a non-finite value")
    return total


def _contains_path_integral(e: Expr) -> bool:
    if isinstance(e, PathIntegral):
        return True
    if isinstance(e, (Neg, Call, Conj)):
        return _contains_path_integral(e.arg)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return _contains_path_integral(e.lhs) or _contains_path_integral(e.rhs)
    if isinstance(e, Pow):
        return _contains_path_integral(e.base)
    return False


def evaluate(e: Expr, point, params: Mapping[str, complex] | None = None) -> complex:
    """Evaluate at a point (anything indexable as 4 reals).  Strictly finite."""
    coords = (float(point[0]), float(point[1]), float(point[2]), float(point[3]))
    value = _eval_scalar(e, coords, params)
    return _check_finite(value, e, "evaluation")


def _eval_array(e: Expr, cols, params) -> np.ndarray:
    if isinstance(e, Num):
        return np.broadcast_to(np.complex128(e.value), cols[0].shape)
    if isinstance(e, Name):
        value = _resolve(e.ident, cols, params)
        if isinstance(value, np.ndarray):
            return value
        return np.broadcast_to(np.complex128(value), cols[0].shape)
    if isinstance(e, Neg):
        return -_eval_array(e.arg, cols, params)
    if isinstance(e, (Add, Sub, Mul, Div)):
        lhs = _eval_array(e.lhs, cols, params)
        rhs = _eval_array(e.rhs, cols, params)
        op = {Add: np.add, Sub: np.subtract, Mul: np.multiply, Div: np.divide}[type(e)]
        with np.errstate(all="ignore"):
            value = op(lhs, rhs)
        what = "division" if isinstance(e, Div) else "arithmetic"
        return _check_finite(value, e, what)
    if isinstance(e, Pow):
        base = _eval_array(e.base, cols, params)
        with np.errstate(all="ignore"):
            value = base ** e.exponent
        return _check_finite(value, e, "power")
    if isinstance(e, Call):
        arg = _eval_array(e.arg, cols, params)
        with np.errstate(all="ignore"):
            value = _NPFUNCS[e.func](arg)
        return _check_finite(value, e, e.func)
    if isinstance(e, Conj):
        return np.conj(_eval_array(e.arg, cols, params))
    if isinstance(e, PathIntegral):
        out = np.empty(cols[0].shape, dtype=complex)
        flat = [c.reshape(-1) for c in cols]
        for idx in range(flat[0].size):
            coords = tuple(float(c[idx].real) for c in flat)
            out.reshape(-1)[idx] = _eval_path_integral(e, coords, params)
        return out
    raise TypeError(f"not an expression node: {e!r}")


def evaluate_many(e: Expr, points: np.ndarray,
                  params: Mapping[str, complex] | None = None) -> np.ndarray:
    """Vectorized evaluation over an (N, 4) array of points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError(f"points must have shape (N, 4), got {pts.shape}")
    cols = tuple(np.ascontiguousarray(pts[:, k]).astype(complex) for k in range(4))
    value = _eval_array(e, cols, params)
    return np.broadcast_to(value, (pts.shape[0],)).astype(complex)
