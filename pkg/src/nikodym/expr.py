"""Integer/rational sequence expressions as s-expressions.

Grammar (prefix forms):

    e ::= integer | p/q | n
        | (add e e ...) | (sub e e) | (mul e e ...) | (div e e)
        | (floordiv e e) | (pow e k) | (pow2 e) | (ceil e) | (floor e)
        | (app name e) | (psum name e)

sub is truncated at 0 (a monus); div is exact rational division; pow takes an
integer exponent; pow2 is 2**e for integer-valued e; app applies a named
function from the environment; psum(name, e) is sum_{i < e} name(i), memoized.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import EvalError, MagnitudeOverflow, ParseError
from .rat import INT_BIT_LIMIT, BigMag

_MAX_APP_DEPTH = 128

_OPS = {"add", "sub", "mul", "div", "floordiv", "pow", "pow2", "ceil", "floor"}


@dataclass(frozen=True)
class Expr:
    kind: str  # const | var | op | app | psum
    value: Optional[Fraction] = None
    name: Optional[str] = None
    args: tuple = ()

    def __str__(self):
        return render(self)


def const(v) -> Expr:
    return Expr("const", value=Fraction(v))


VAR_N = Expr("var")


def op(name: str, *args: Expr) -> Expr:
    return Expr("op", name=name, args=tuple(args))


def app(fname: str, arg: Expr) -> Expr:
    return Expr("app", name=fname, args=(arg,))


def psum(fname: str, arg: Expr) -> Expr:
    return Expr("psum", name=fname, args=(arg,))


def _tokenize(text: str):
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append(c)
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _parse_atom(tok: str) -> Expr:
    if tok == "n":
        return VAR_N
    if "/" in tok:
        p, _, q = tok.partition("/")
        try:
            return const(Fraction(int(p), int(q)))
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"bad rational literal {tok!r}") from e
    try:
        return const(int(tok))
    except ValueError:
        raise ParseError(f"unexpected atom {tok!r}; only 'n', integers and p/q are atoms")


def _build_form(head: str, args) -> Expr:
    if head in ("add", "mul"):
        if len(args) < 2:
            raise ParseError(f"({head} ...) needs at least two arguments")
        return op(head, *args)
    if head in ("sub", "div", "floordiv", "pow"):
        if len(args) != 2:
            raise ParseError(f"({head} a b) takes exactly two arguments")
        return op(head, *args)
    if head in ("pow2", "ceil", "floor"):
        if len(args) != 1:
            raise ParseError(f"({head} e) takes exactly one argument")
        return op(head, *args)
    raise ParseError(f"unknown operator {head!r}")


def _parse(toks, pos):
    if pos >= len(toks):
        raise ParseError("unexpected end of expression")
    tok = toks[pos]
    pos += 1
    if tok == ")":
        raise ParseError("unexpected ')'")
    if tok != "(":
        return _parse_atom(tok), pos
    if pos >= len(toks):
        raise ParseError("unterminated form")
    head = toks[pos]
    pos += 1
    if head in ("app", "psum"):
        if pos >= len(toks) or toks[pos] in "()":
            raise ParseError(f"({head} name e): name must be a bare symbol")
        name = toks[pos]
        if name[0].isdigit() or name[0] == "-" or "/" in name:
            raise ParseError(f"({head} name e): {name!r} is not a symbol")
        pos += 1
        arg, pos = _parse(toks, pos)
        if pos >= len(toks) or toks[pos] != ")":
            raise ParseError("unterminated form")
        pos += 1
        return Expr(head, name=name, args=(arg,)), pos
    args = []
    while pos < len(toks) and toks[pos] != ")":
        a, pos = _parse(toks, pos)
        args.append(a)
    if pos >= len(toks):
        raise ParseError("unterminated form")
    pos += 1
    return _build_form(head, args), pos


def parse_expr(text: str) -> Expr:
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression")
    e, pos = _parse(toks, 0)
    if pos != len(toks):
        raise ParseError("trailing tokens after expression")
    return e


def render(e: Expr) -> str:
    if e.kind == "const":
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if e.kind == "var":
        return "n"
    if e.kind in ("app", "psum"):
        return f"({e.kind} {e.name} {render(e.args[0])})"
    return "(" + " ".join([e.name] + [render(a) for a in e.args]) + ")"


@dataclass
class Env:
    """Named functions: s-expression bodies or finite integer tables."""

    defs: dict = field(default_factory=dict)  # name -> Expr
    tables: dict = field(default_factory=dict)  # name -> dict[int, Fraction]
    _psum_cache: dict = field(default_factory=dict, compare=False, repr=False)
    _app_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def define(self, name: str, body: Expr) -> "Env":
        """New environment with one more named function; self is unchanged."""
        return Env(defs={**self.defs, name: body}, tables=dict(self.tables))

    def define_table(self, name: str, table: dict) -> "Env":
        clean = {int(k): Fraction(v) for k, v in table.items()}
        return Env(defs=dict(self.defs), tables={**self.tables, name: clean})

    def call(self, name: str, n_value: Fraction, depth: int) -> Fraction:
        if n_value.denominator != 1:
            raise EvalError(f"{name} applied to non-integer {n_value}")
        k = n_value.numerator
        if name in self.tables:
            try:
                return self.tables[name][k]
            except KeyError:
                raise EvalError(f"table-backed {name} undefined at {k}")
        if name not in self.defs:
            raise EvalError(f"unknown function {name!r}")
        key = (name, k)
        if key in self._app_cache:
            return self._app_cache[key]
        v = _eval(self.defs[name], Fraction(k), self, depth + 1)
        self._app_cache[key] = v
        return v

    def prefix_sum(self, name: str, upper: Fraction, depth: int) -> Fraction:
        if upper.denominator != 1 or upper.numerator < 0:
            raise EvalError(f"psum upper bound must be a natural number, got {upper}")
        m = upper.numerator
        cache = self._psum_cache.setdefault(name, [Fraction(0)])
        while len(cache) <= m:
            i = len(cache) - 1
            cache.append(cache[-1] + self.call(name, Fraction(i), depth))
        return cache[m]


EMPTY_ENV = Env()


def merge_envs(a: Env, b: Env):
    """Combined environment, or None when a name is bound differently."""
    defs = dict(a.defs)
    tables = dict(a.tables)
    for k, v in b.defs.items():
        if k in defs and defs[k] != v:
            return None
        defs[k] = v
    for k, v in b.tables.items():
        if k in tables and tables[k] != v:
            return None
        tables[k] = v
    return Env(defs=defs, tables=tables)


def _eval(e: Expr, n: Fraction, env: Env, depth: int) -> Fraction:
    if depth > _MAX_APP_DEPTH:
        raise EvalError("expression recursion too deep")
    if e.kind == "const":
        return e.value
    if e.kind == "var":
        return n
    if e.kind == "app":
        return env.call(e.name, _eval(e.args[0], n, env, depth), depth)
    if e.kind == "psum":
        return env.prefix_sum(e.name, _eval(e.args[0], n, env, depth), depth)
    name = e.name
    if name == "mul":
        # lazy product: a zero factor means later factors (for instance
        # table-backed functions with a partial domain) are never evaluated
        out = Fraction(1)
        for a in e.args:
            v = _eval(a, n, env, depth)
            if v == 0:
                return Fraction(0)
            out *= v
        return out
    vals = [_eval(a, n, env, depth) for a in e.args]
    if name == "add":
        return sum(vals, Fraction(0))
    if name == "sub":
        d = vals[0] - vals[1]
        return d if d > 0 else Fraction(0)
    if name == "div":
        if vals[1] == 0:
            raise EvalError("division by zero")
        return vals[0] / vals[1]
    if name == "floordiv":
        if vals[1] == 0:
            raise EvalError("floor-division by zero")
        return Fraction(math.floor(vals[0] / vals[1]))
    if name == "pow":
        if vals[1].denominator != 1:
            raise EvalError(f"pow exponent must be an integer, got {vals[1]}")
        k = vals[1].numerator
        if vals[0] == 0 and k < 0:
            raise EvalError("0 to a negative power")
        bits = max(vals[0].numerator.bit_length(), vals[0].denominator.bit_length())
        if bits * abs(k) > INT_BIT_LIMIT:
            raise MagnitudeOverflow(f"pow result around {bits * abs(k)} bits")
        return vals[0] ** k
    if name == "pow2":
        if vals[0].denominator != 1:
            raise EvalError(f"pow2 exponent must be an integer, got {vals[0]}")
        k = vals[0].numerator
        if abs(k) > INT_BIT_LIMIT:
            raise MagnitudeOverflow(f"pow2 exponent {k} too large to materialize")
        return Fraction(2) ** k
    if name == "ceil":
        return Fraction(math.ceil(vals[0]))
    if name == "floor":
        return Fraction(math.floor(vals[0]))
    raise EvalError(f"unknown operator {name!r}")


def eval_expr(e: Expr, n: int, env: Env = EMPTY_ENV) -> Fraction:
    return _eval(e, Fraction(n), env, 0)


def eval_int(e: Expr, n: int, env: Env = EMPTY_ENV) -> int:
    v = eval_expr(e, n, env)
    if v.denominator != 1:
        raise EvalError(f"expected integer value, got {v} at n = {n}")
    return v.numerator


def subst_var(e: Expr, repl: Expr) -> Expr:
    """Replace the variable n by another expression (for shifts like n-1)."""
    if e.kind == "var":
        return repl
    if e.kind in ("const",):
        return e
    return Expr(e.kind, value=e.value, name=e.name,
                args=tuple(subst_var(a, repl) for a in e.args))


def eval_mag(e: Expr, n: int, env: Env = EMPTY_ENV, depth: int = 0) -> BigMag:
    """Evaluate a positive-valued expression lazily as m * 2**e.

    Handles the multiplicative fragment (mul, pow, pow2, app, const, var);
    additive forms fall back to exact integers and may raise MagnitudeOverflow.
    """
    if depth > _MAX_APP_DEPTH:
        raise EvalError("expression recursion too deep")
    if e.kind == "const":
        v = e.value
        if v.denominator != 1 or v.numerator <= 0:
            raise EvalError(f"magnitude evaluation needs positive integers, got {v}")
        return BigMag.from_int(v.numerator)
    if e.kind == "var":
        if n <= 0:
            raise EvalError("magnitude evaluation needs n >= 1")
        return BigMag.from_int(n)
    if e.kind == "app":
        arg = eval_mag(e.args[0], n, env, depth + 1).to_int()
        body = env.defs.get(e.name)
        if body is None:
            if e.name in env.tables:
                v = env.call(e.name, Fraction(arg), depth)
                if v.denominator != 1 or v.numerator <= 0:
                    raise EvalError(f"table {e.name}({arg}) not a positive integer")
                return BigMag.from_int(v.numerator)
            raise EvalError(f"unknown function {e.name!r}")
        return eval_mag(body, arg, env, depth + 1)
    if e.kind == "op" and e.name == "mul":
        out = BigMag.from_int(1)
        for a in e.args:
            out = out.mul(eval_mag(a, n, env, depth + 1))
        return out
    if e.kind == "op" and e.name == "pow":
        k = eval_int(e.args[1], n, env)
        if k < 0:
            raise EvalError("negative exponent in magnitude context")
        return eval_mag(e.args[0], n, env, depth + 1).pow(k)
    if e.kind == "op" and e.name == "pow2":
        k = eval_mag(e.args[0], n, env, depth + 1).to_int()
        return BigMag(1, k)
    # additive / other forms: materialize exactly (guarded)
    v = eval_expr(e, n, env)
    if v.denominator != 1 or v.numerator <= 0:
        raise EvalError(f"magnitude evaluation needs positive integers, got {v}")
    return BigMag.from_int(v.numerator)


def cmp_exprs(a: Expr, b: Expr, n: int, env: Env = EMPTY_ENV) -> int:
    """Exact comparison of a(n) vs b(n), lazily when values are astronomical."""
    try:
        va, vb = eval_expr(a, n, env), eval_expr(b, n, env)
        return (va > vb) - (va < vb)
    except MagnitudeOverflow:
        return eval_mag(a, n, env).cmp(eval_mag(b, n, env))
