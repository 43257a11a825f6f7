"""Small arithmetic expression language with symbolic differentiation.

Grammar (recursive descent):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary (('^' | '**') unary)?          # right-associative
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Known functions: sin, cos, sinh, cosh, exp, ln, sqrt, abs, asinh.
Known constants: pi, e.  Expressions differentiate to expressions, so
derivatives of any order are available; compiled closures evaluate through
the math module.
"""

import math
import re

from .errors import ExpressionError

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
    "asinh": math.asinh,
}

CONSTANTS = {"pi": math.pi, "e": math.e}


def _sign(x):
    return math.copysign(1.0, x)


_EVAL_NAMESPACE = {"_m": math, "_sign": _sign, "__builtins__": {}}


class Expr:
    """Base expression node."""

    def diff(self, var):
        raise NotImplementedError

    def to_python(self):
        raise NotImplementedError

    def free_variables(self):
        return set()

    def simplify(self):
        return self

    def compile(self, variables):
        code = f"lambda {', '.join(variables)}: ({self.simplify().to_python()})"
        return eval(code, dict(_EVAL_NAMESPACE))

    def __add__(self, other):
        return Add(self, _as_expr(other)).simplify()

    def __sub__(self, other):
        return Sub(self, _as_expr(other)).simplify()

    def __mul__(self, other):
        return Mul(self, _as_expr(other)).simplify()

    def __repr__(self):
        return f"<expr {self.to_python()}>"


def _as_expr(v):
    return v if isinstance(v, Expr) else Num(float(v))


class Num(Expr):
    def __init__(self, value):
        self.value = float(value)

    def diff(self, var):
        return Num(0.0)

    def to_python(self):
        return repr(self.value)


class Var(Expr):
    def __init__(self, name):
        self.name = name

    def diff(self, var):
        return Num(1.0 if var == self.name else 0.0)

    def to_python(self):
        return self.name

    def free_variables(self):
        return {self.name}


class _Binary(Expr):
    op = "?"

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def to_python(self):
        return f"({self.left.to_python()} {self.op} {self.right.to_python()})"

    def free_variables(self):
        return self.left.free_variables() | self.right.free_variables()


def _num(e, v):
    return isinstance(e, Num) and e.value == v


class Add(_Binary):
    op = "+"

    def diff(self, var):
        return Add(self.left.diff(var), self.right.diff(var))

    def simplify(self):
        l, r = self.left.simplify(), self.right.simplify()
        if isinstance(l, Num) and isinstance(r, Num):
            return Num(l.value + r.value)
        if _num(l, 0.0):
            return r
        if _num(r, 0.0):
            return l
        return Add(l, r)


class Sub(_Binary):
    op = "-"

    def diff(self, var):
        return Sub(self.left.diff(var), self.right.diff(var))

    def simplify(self):
        l, r = self.left.simplify(), self.right.simplify()
        if isinstance(l, Num) and isinstance(r, Num):
            return Num(l.value - r.value)
        if _num(r, 0.0):
            return l
        if _num(l, 0.0):
            return Neg(r).simplify()
        return Sub(l, r)


class Mul(_Binary):
    op = "*"

    def diff(self, var):
        return Add(Mul(self.left.diff(var), self.right),
                   Mul(self.left, self.right.diff(var)))

    def simplify(self):
        l, r = self.left.simplify(), self.right.simplify()
        if isinstance(l, Num) and isinstance(r, Num):
            return Num(l.value * r.value)
        if _num(l, 0.0) or _num(r, 0.0):
            return Num(0.0)
        if _num(l, 1.0):
            return r
        if _num(r, 1.0):
            return l
        return Mul(l, r)


class Div(_Binary):
    op = "/"

    def diff(self, var):
        # (u/v)' = (u'v - uv') / v^2
        num = Sub(Mul(self.left.diff(var), self.right),
                  Mul(self.left, self.right.diff(var)))
        return Div(num, Pow(self.right, Num(2.0)))

    def simplify(self):
        l, r = self.left.simplify(), self.right.simplify()
        if isinstance(l, Num) and isinstance(r, Num) and r.value != 0.0:
            return Num(l.value / r.value)
        if _num(l, 0.0):
            return Num(0.0)
        if _num(r, 1.0):
            return l
        return Div(l, r)


class Pow(_Binary):
    op = "**"

    def diff(self, var):
        u, v = self.left, self.right
        if isinstance(v, Num):
            # c u^(c-1) u'
            return Mul(Mul(v, Pow(u, Num(v.value - 1.0))), u.diff(var))
        # u^v (v' ln u + v u'/u)
        inner = Add(Mul(v.diff(var), Call("ln", u)),
                    Mul(v, Div(u.diff(var), u)))
        return Mul(Pow(u, v), inner)

    def simplify(self):
        l, r = self.left.simplify(), self.right.simplify()
        if isinstance(l, Num) and isinstance(r, Num):
            return Num(l.value ** r.value)
        if _num(r, 0.0):
            return Num(1.0)
        if _num(r, 1.0):
            return l
        if _num(l, 0.0):
            return Num(0.0)
        if _num(l, 1.0):
            return Num(1.0)
        return Pow(l, r)


class Neg(Expr):
    def __init__(self, arg):
        self.arg = arg

    def diff(self, var):
        return Neg(self.arg.diff(var))

    def to_python(self):
        return f"(-{self.arg.to_python()})"

    def free_variables(self):
        return self.arg.free_variables()

    def simplify(self):
        a = self.arg.simplify()
        if isinstance(a, Num):
            return Num(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)


class Call(Expr):
    _codegen = {
        "sin": "_m.sin", "cos": "_m.cos", "sinh": "_m.sinh", "cosh": "_m.cosh",
        "exp": "_m.exp", "ln": "_m.log", "sqrt": "_m.sqrt", "abs": "abs",
        "asinh": "_m.asinh", "sign": "_sign",
    }

    def __init__(self, fn, arg):
        if fn not in self._codegen:
            raise ExpressionError(f"unknown function {fn!r}")
        self.fn = fn
        self.arg = arg

    def diff(self, var):
        u = self.arg
        du = u.diff(var)
        if self.fn == "sin":
            outer = Call("cos", u)
        elif self.fn == "cos":
            outer = Neg(Call("sin", u))
        elif self.fn == "sinh":
            outer = Call("cosh", u)
        elif self.fn == "cosh":
            outer = Call("sinh", u)
        elif self.fn == "exp":
            outer = Call("exp", u)
        elif self.fn == "ln":
            outer = Div(Num(1.0), u)
        elif self.fn == "sqrt":
            outer = Div(Num(0.5), Call("sqrt", u))
        elif self.fn == "abs":
            outer = Call("sign", u)
        elif self.fn == "asinh":
            outer = Div(Num(1.0), Call("sqrt", Add(Num(1.0), Mul(u, u))))
        else:  # sign: derivative taken as 0 away from the kink
            return Num(0.0)
        return Mul(outer, du)

    def to_python(self):
        return f"{self._codegen[self.fn]}({self.arg.to_python()})"

    def free_variables(self):
        return self.arg.free_variables()

    def simplify(self):
        a = self.arg.simplify()
        if isinstance(a, Num):
            if self.fn == "sign":
                return Num(_sign(a.value))
            return Num(float(FUNCTIONS[self.fn](a.value)))
        return Call(self.fn, a)


# ---------------------------------------------------------------------------
# tokenizer and parser

_TOKEN_RE = re.compile(r"""
    (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[+\-*/^(),])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r} at position {pos}",
                                  position=pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise ExpressionError(f"expected {value!r} at position {pos}, got {val!r}",
                                  position=pos)

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r} at position {pos}", position=pos)
        return e.simplify()

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.next()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[1] in ("^", "**"):
            self.next()
            return Pow(base, self.unary())
        return base

    def primary(self):
        kind, val, pos = self.next()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if self.peek()[1] == "(":
                self.next()
                arg = self.expr()
                self.expect(")")
                try:
                    return Call(val, arg)
                except ExpressionError as exc:
                    raise ExpressionError(f"{exc} at position {pos}", position=pos) from None
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            return Var(val)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExpressionError(f"unexpected {val!r} at position {pos}", position=pos)


def parse_expression(text):
    """Parse expression text into an Expr tree (simplified)."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression")
    return _Parser(text).parse()


def compile_scalar(text, variables):
    """Parse and compile to a plain Python callable of the given variables."""
    e = parse_expression(text)
    unknown = e.free_variables() - set(variables)
    if unknown:
        raise ExpressionError(f"unknown variables {sorted(unknown)} in {text!r}")
    return e.compile(variables)


def compile_with_derivative(text, variable):
    """(value, derivative) callables of one variable, both symbolic."""
    e = parse_expression(text)
    unknown = e.free_variables() - {variable}
    if unknown:
        raise ExpressionError(f"unknown variables {sorted(unknown)} in {text!r}")
    return e.compile((variable,)), e.diff(variable).simplify().compile((variable,))
