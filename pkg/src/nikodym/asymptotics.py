"""Certified closed-form asymptotics over an exact fragment.

A Term is c * n**d * b**n * 2**E(n) with rational c != 0, integer d, rational
b > 0 and E an integer polynomial of degree >= 2 (lower-degree exponent parts
fold into b and c).  A Form is a finite sum of Terms; a Ratio is Form/Form.
Within the fragment, limits as n -> infinity are decided exactly by dominance
and every "eventually" claim carries an explicit integer threshold certified
by Cauchy root bounds plus monotone search.  Nothing here guesses: anything
outside the fragment raises UnsupportedAsymptotics or returns None.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import MagnitudeOverflow, UnsupportedAsymptotics
from .expr import Env, Expr
from .rat import INT_BIT_LIMIT

_SEARCH_DOUBLINGS = 64

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------- polynomials
# coefficient tuples, low degree first, normalized (no trailing zeros)

def poly_norm(coeffs):
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_sub(p, q):
    m = max(len(p), len(q))
    return poly_norm(tuple((p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0)
                           for i in range(m)))


def poly_eval(p, n):
    out = 0
    for a in reversed(p):
        out = out * n + a
    return out


def poly_shift(p):
    """Coefficients of p(n+1)."""
    out = [0] * len(p)
    for j, a in enumerate(p):
        for i in range(j + 1):
            out[i] += a * math.comb(j, i)
    return poly_norm(out)


def poly_positive_from(p) -> Optional[int]:
    """Least certified N with p(n) > 0 for all n >= N, by the Cauchy bound."""
    if not p:
        return None
    lead = p[-1]
    if lead <= 0:
        return None
    if len(p) == 1:
        return 1
    worst = max(abs(Fraction(a)) for a in p[:-1])
    return max(1, 1 + math.ceil(worst / Fraction(lead)))


# ---------------------------------------------------------------------- terms

@dataclass(frozen=True)
class Term:
    coeff: Fraction
    deg: int
    base: Fraction
    ep: tuple  # exponent-poly coefficients for degrees 2, 3, ...

    def key(self):
        return (self.deg, self.base, self.ep)


def _ep_to_poly(ep):
    return poly_norm((0, 0) + tuple(ep))


def _growth_cmp(k1, k2) -> int:
    """Compare asymptotic growth of n**d * b**n * 2**E(n) for two keys."""
    d1, b1, e1 = k1
    d2, b2, e2 = k2
    diff = poly_sub(_ep_to_poly(e1), _ep_to_poly(e2))
    if diff:
        return 1 if diff[-1] > 0 else -1
    if b1 != b2:
        return 1 if b1 > b2 else -1
    return (d1 > d2) - (d1 < d2)


def _growth_class(key) -> str:
    d, b, ep = key
    if ep:
        return "inf" if ep[-1] > 0 else "zero"
    if b > 1:
        return "inf"
    if b < 1:
        return "zero"
    if d > 0:
        return "inf"
    if d < 0:
        return "zero"
    return "const"


def term_eval(t: Term, n: int) -> Fraction:
    if n < 1:
        raise ValueError("terms are evaluated at n >= 1")
    e = poly_eval(_ep_to_poly(t.ep), n)
    if abs(e) > INT_BIT_LIMIT:
        raise MagnitudeOverflow(f"2-exponent {e} at n = {n}")
    bits = max(t.base.numerator.bit_length(), t.base.denominator.bit_length())
    if bits * n > INT_BIT_LIMIT:
        raise MagnitudeOverflow(f"base power too large at n = {n}")
    return t.coeff * Fraction(n) ** t.deg * t.base ** n * Fraction(2) ** e


# ---------------------------------------------------------------------- forms

class Form:
    """Normalized sum of Terms."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        merged = {}
        for t in terms:
            if t.coeff == 0:
                continue
            k = t.key()
            merged[k] = merged.get(k, ZERO) + t.coeff
        self.terms = tuple(Term(c, d, b, ep) for (d, b, ep), c in
                           sorted(merged.items()) if c != 0)

    @classmethod
    def const(cls, c) -> "Form":
        return cls((Term(Fraction(c), 0, ONE, ()),))

    @classmethod
    def var(cls) -> "Form":
        return cls((Term(ONE, 1, ONE, ()),))

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Optional[Fraction]:
        if self.is_zero():
            return ZERO
        if len(self.terms) == 1:
            t = self.terms[0]
            if t.deg == 0 and t.base == 1 and not t.ep:
                return t.coeff
        return None

    def add(self, other: "Form") -> "Form":
        return Form(self.terms + other.terms)

    def neg(self) -> "Form":
        return Form(tuple(Term(-t.coeff, t.deg, t.base, t.ep) for t in self.terms))

    def sub(self, other: "Form") -> "Form":
        return self.add(other.neg())

    def scale(self, c) -> "Form":
        c = Fraction(c)
        return Form(tuple(Term(t.coeff * c, t.deg, t.base, t.ep) for t in self.terms))

    def mul(self, other: "Form") -> "Form":
        out = []
        for a in self.terms:
            for b in other.terms:
                ep = poly_norm(tuple(x + y for x, y in
                                     _pad(a.ep, b.ep)))
                out.append(Term(a.coeff * b.coeff, a.deg + b.deg,
                                a.base * b.base, ep))
        return Form(out)

    def pow(self, k: int) -> "Form":
        if k < 0:
            raise ValueError("Form.pow takes k >= 0")
        out = Form.const(1)
        for _ in range(k):
            out = out.mul(self)
        return out

    def dominant(self) -> Optional[Term]:
        best = None
        for t in self.terms:
            if best is None or _growth_cmp(t.key(), best.key()) > 0:
                best = t
        return best

    def eval(self, n: int) -> Fraction:
        return sum((term_eval(t, n) for t in self.terms), ZERO)

    def __eq__(self, other):
        return isinstance(other, Form) and self.terms == other.terms

    def __repr__(self):
        return f"Form({self.terms!r})"


def _pad(ep1, ep2):
    m = max(len(ep1), len(ep2))
    return [((ep1[i] if i < len(ep1) else 0), (ep2[i] if i < len(ep2) else 0))
            for i in range(m)]


# -------------------------------------------------------------- "eventually"

def _log2_floor_bound(x: Fraction) -> int:
    """Integer L with x >= 2**L, for x > 0."""
    return (x.numerator.bit_length() - 1) - x.denominator.bit_length()


def _log2_ceil_bound(x: Fraction) -> int:
    """Integer U with x <= 2**U, for x > 0."""
    return x.numerator.bit_length() - (x.denominator.bit_length() - 1)


def _ratio_key(k_top, k_bot):
    """Quotient key of two term keys; Term.ep never has degree-0/1 parts,
    so the difference polynomial starts at degree 2 as well."""
    d1, b1, e1 = k_top
    d2, b2, e2 = k_bot
    diff = poly_sub(_ep_to_poly(e1), _ep_to_poly(e2))
    rest = poly_norm(tuple(diff[2:])) if len(diff) > 2 else ()
    return ONE, (d1 - d2, b1 / b2, rest)


def _monotone_from(key) -> int:
    """N such that n**d * b**n * 2**E(n) is nondecreasing for n >= N.

    Requires the key to have growth class 'inf'.
    """
    d, b, ep = key
    if ep:
        # step ratio s(n) = (1+1/n)**d * b * 2**(E(n+1)-E(n))
        E = _ep_to_poly(ep)
        delta = poly_sub(poly_shift(E), E)
        t = 0
        bb = b
        while bb < 1:  # least t with b * 2**t >= 1
            bb *= 2
            t += 1
        margin = abs(d) + t
        N = poly_positive_from(poly_sub(delta, (margin,)))
        if N is None:
            raise UnsupportedAsymptotics("exponent step not eventually positive")
        return N
    if b > 1:
        if d >= 0:
            return 1
        M = 1
        for _ in range(_SEARCH_DOUBLINGS):
            # b >= ((M+1)/M)**|d| makes the step ratio >= 1 from M on
            if b * Fraction(M, M + 1) ** (-d) >= 1:
                return M
            M *= 2
        raise UnsupportedAsymptotics("monotonicity threshold search exhausted")
    if b == 1 and d > 0:
        return 1
    raise UnsupportedAsymptotics("key does not grow")


def _term_ratio_threshold(k_top, k_bot, target: Fraction) -> int:
    """N with g_top(n)/g_bot(n) >= target for all n >= N.

    Requires strict dominance of k_top over k_bot.
    """
    coeff, key = _ratio_key(k_top, k_bot)
    if _growth_class(key) != "inf":
        raise UnsupportedAsymptotics("ratio does not diverge")
    start = _monotone_from(key)
    need = target / coeff
    if need <= 0:
        return start
    d, b, ep = key
    n = start
    for _ in range(_SEARCH_DOUBLINGS):
        # cheap certified lower bound on log2 of the ratio value
        e = poly_eval(_ep_to_poly(ep), n)
        lb = e + n * _log2_floor_bound(b)
        lb += d * (n.bit_length() - 1) if d >= 0 else d * n.bit_length()
        if lb >= _log2_ceil_bound(need):
            return n
        try:
            if term_eval(Term(ONE, d, b, ep), n) >= need:
                return n
        except MagnitudeOverflow:
            pass
        n *= 2
    raise UnsupportedAsymptotics("threshold search exhausted")


def eventually_positive(f: Form) -> Optional[int]:
    """Certified N with f(n) > 0 for all n >= N; None if f is not
    eventually positive (identically zero or negative-dominant)."""
    dom = f.dominant()
    if dom is None or dom.coeff <= 0:
        return None
    others = [t for t in f.terms if t.key() != dom.key()]
    if not others:
        return 1
    m = len(others)
    N = 1
    for t in others:
        target = 2 * m * abs(t.coeff) / dom.coeff
        N = max(N, _term_ratio_threshold(dom.key(), t.key(), target))
    return N


# --------------------------------------------------------------------- limits

@dataclass(frozen=True)
class Lim:
    kind: str  # finite | pinf | ninf
    value: Optional[Fraction] = None

    @classmethod
    def finite(cls, v):
        return cls("finite", Fraction(v))

    def is_zero(self):
        return self.kind == "finite" and self.value == 0

    def describe(self) -> str:
        if self.kind == "pinf":
            return "+inf"
        if self.kind == "ninf":
            return "-inf"
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


class Ratio:
    """Form/Form with denominator eventually positive and not identically 0."""

    __slots__ = ("num", "den")

    def __init__(self, num: Form, den: Form):
        dom = den.dominant()
        if dom is None:
            raise ZeroDivisionError("zero denominator form")
        if dom.coeff < 0:
            num, den = num.neg(), den.neg()
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c) -> "Ratio":
        return cls(Form.const(c), Form.const(1))

    @classmethod
    def var(cls) -> "Ratio":
        return cls(Form.var(), Form.const(1))

    def is_zero(self):
        return self.num.is_zero()

    def constant_value(self) -> Optional[Fraction]:
        cn, cd = self.num.constant_value(), self.den.constant_value()
        if cn is not None and cd is not None and cd != 0:
            return cn / cd
        return None

    def add(self, o: "Ratio") -> "Ratio":
        return Ratio(self.num.mul(o.den).add(o.num.mul(self.den)),
                     self.den.mul(o.den))

    def sub(self, o: "Ratio") -> "Ratio":
        return self.add(o.neg())

    def neg(self) -> "Ratio":
        return Ratio(self.num.neg(), self.den)

    def mul(self, o: "Ratio") -> "Ratio":
        return Ratio(self.num.mul(o.num), self.den.mul(o.den))

    def div(self, o: "Ratio") -> "Ratio":
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero ratio")
        return Ratio(self.num.mul(o.den), self.den.mul(o.num))

    def scale(self, c) -> "Ratio":
        return Ratio(self.num.scale(c), self.den)

    def sub_const(self, c) -> "Ratio":
        return Ratio(self.num.sub(self.den.scale(c)), self.den)

    def eval(self, n: int) -> Fraction:
        d = self.den.eval(n)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at n = {n}")
        return self.num.eval(n) / d

    def limit(self) -> Lim:
        tn = self.num.dominant()
        if tn is None:
            return Lim.finite(0)
        td = self.den.dominant()
        coeff, key = _ratio_key(tn.key(), td.key())
        cls = _growth_class(key)
        c = coeff * tn.coeff / td.coeff
        if cls == "zero":
            return Lim.finite(0)
        if cls == "const":
            return Lim.finite(c)
        return Lim("pinf" if c > 0 else "ninf")

    def __repr__(self):
        return f"Ratio({self.num!r}, {self.den!r})"


def sign_eventually(r: Ratio):
    """(sign, threshold): sign of r(n) for all n >= threshold.

    sign 0 means identically zero.  Raises UnsupportedAsymptotics when the
    threshold search gives out (never for well-formed fragment ratios).
    """
    if r.num.is_zero():
        return 0, 1
    nd = eventually_positive(r.den)
    if nd is None:
        raise UnsupportedAsymptotics("denominator not eventually positive")
    dom = r.num.dominant()
    if dom.coeff > 0:
        np_ = eventually_positive(r.num)
        return 1, max(np_, nd)
    np_ = eventually_positive(r.num.neg())
    return -1, max(np_, nd)


def eventually_ge(r: Ratio, c) -> Optional[int]:
    """Threshold N with r(n) >= c for all n >= N, or None if not eventual."""
    s, thr = sign_eventually(r.sub_const(c))
    if s > 0:
        return thr
    if s == 0:
        return thr
    return None


def eventually_le(r: Ratio, c) -> Optional[int]:
    return eventually_ge(r.neg(), -Fraction(c))


# --------------------------------------------------------------------- series

def series_class(u: Ratio):
    """Decide sum_k u(k) for an eventually nonnegative fragment sequence.

    Returns (verdict, evidence) with verdict in {'converges', 'diverges'};
    evidence is a dict of exact rationals/thresholds describing the rule used.
    """
    if u.is_zero():
        return "converges", {"rule": "zero"}
    tn, td = u.num.dominant(), u.den.dominant()
    coeff, key = _ratio_key(tn.key(), td.key())
    c = coeff * tn.coeff / td.coeff
    d, b, ep = key
    if ep:
        if ep[-1] > 0:
            thr = eventually_ge(u, 1)
            return "diverges", {"rule": "terms-unbounded", "threshold": thr}
        return "converges", {"rule": "super-geometric"}
    if b > 1:
        thr = eventually_ge(u, 1)
        return "diverges", {"rule": "terms-unbounded", "threshold": thr}
    if b < 1:
        return "converges", {"rule": "geometric", "ratio": b}
    if d >= 1:
        thr = eventually_ge(u, 1)
        return "diverges", {"rule": "terms-unbounded", "threshold": thr}
    if d == 0:
        eps = abs(c) / 2
        thr = eventually_ge(u if c > 0 else u.neg(), eps)
        return "diverges", {"rule": "terms-bounded-below", "epsilon": eps,
                            "threshold": thr}
    if d == -1:
        eps = abs(c) / 2
        ku = u.mul(Ratio.var())
        thr = eventually_ge(ku if c > 0 else ku.neg(), eps)
        return "diverges", {"rule": "harmonic-comparison", "coefficient": eps,
                            "threshold": thr}
    return "converges", {"rule": "p-series", "p": -d}


# --------------------------------------------------------------------- bounds

@dataclass
class Bounds:
    """lo(n) <= value(n) <= hi(n) for all n >= n0 where the value is defined."""

    lo: Ratio
    hi: Ratio
    n0: int
    exact: bool

    @classmethod
    def point(cls, r: Ratio, n0: int = 1) -> "Bounds":
        return cls(r, r, n0, True)

    def limit(self) -> Optional[Lim]:
        llo, lhi = self.lo.limit(), self.hi.limit()
        if llo == lhi:
            return llo
        return None


def _nonneg_floor(lo: Ratio, n0: int):
    """Replace an eventually-negative lower bound by 0 (for values known >= 0)."""
    s, thr = sign_eventually(lo) if not lo.is_zero() else (0, 1)
    if s >= 0:
        return lo, max(n0, thr)
    return Ratio.const(0), n0


def expr_to_bounds(e: Expr, env: Env) -> Optional[Bounds]:
    """Sandwich an expression by fragment ratios, or None if out of fragment."""
    try:
        return _bounds(e, env, 0)
    except (UnsupportedAsymptotics, ZeroDivisionError, OverflowError):
        return None


def _bounds(e: Expr, env: Env, depth: int) -> Optional[Bounds]:
    if depth > 32:
        return None
    if e.kind == "const":
        return Bounds.point(Ratio.const(e.value))
    if e.kind == "var":
        return Bounds.point(Ratio.var())
    if e.kind == "psum":
        return None
    if e.kind == "app":
        arg = e.args[0]
        if arg.kind != "var":
            return None
        body = env.defs.get(e.name)
        if body is None:
            return None
        return _bounds(body, env, depth + 1)
    name = e.name
    if name == "add":
        out = None
        for a in e.args:
            b = _bounds(a, env, depth + 1)
            if b is None:
                return None
            if out is None:
                out = b
            else:
                out = Bounds(out.lo.add(b.lo), out.hi.add(b.hi),
                             max(out.n0, b.n0), out.exact and b.exact)
        return out
    if name == "mul":
        out = None
        for a in e.args:
            b = _bounds(a, env, depth + 1)
            if b is None:
                return None
            out = b if out is None else _mul_bounds(out, b)
            if out is None:
                return None
        return out
    if name == "sub":
        b1 = _bounds(e.args[0], env, depth + 1)
        b2 = _bounds(e.args[1], env, depth + 1)
        if b1 is None or b2 is None:
            return None
        A = b1.lo.sub(b2.hi)
        B = b1.hi.sub(b2.lo)
        n0 = max(b1.n0, b2.n0)
        sA, tA = (0, 1) if A.is_zero() else sign_eventually(A)
        if sA >= 0:
            return Bounds(A, B, max(n0, tA), b1.exact and b2.exact)
        sB, tB = (0, 1) if B.is_zero() else sign_eventually(B)
        if sB <= 0:
            z = Ratio.const(0)
            return Bounds(z, z, max(n0, tB), False)
        return Bounds(Ratio.const(0), B, max(n0, tB), False)
    if name == "div":
        return _div_bounds(e, env, depth, floor=False)
    if name == "floordiv":
        return _div_bounds(e, env, depth, floor=True)
    if name == "pow":
        if e.args[1].kind != "const" or e.args[1].value.denominator != 1:
            return None
        k = e.args[1].value.numerator
        base = _bounds(e.args[0], env, depth + 1)
        if base is None:
            return None
        if k >= 0:
            out = Bounds.point(Ratio.const(1), base.n0)
            for _ in range(k):
                out = _mul_bounds(out, base)
                if out is None:
                    return None
            return out
        # negative exponent: 1 / base**(-k)
        powed = _bounds(Expr("op", name="pow", args=(e.args[0], Expr("const", value=Fraction(-k)))), env, depth + 1)
        if powed is None:
            return None
        return _invert_bounds(powed)
    if name == "pow2":
        inner = _bounds(e.args[0], env, depth + 1)
        if inner is None or not inner.exact:
            return None
        p = _as_int_poly(inner.lo)
        if p is None:
            return None
        c0 = p[0] if len(p) > 0 else 0
        c1 = p[1] if len(p) > 1 else 0
        t = Term(Fraction(2) ** c0, 0, Fraction(2) ** c1, poly_norm(p[2:]))
        r = Ratio(Form((t,)), Form.const(1))
        return Bounds.point(r, inner.n0)
    if name == "floor":
        inner = _bounds(e.args[0], env, depth + 1)
        if inner is None:
            return None
        lo, n0 = _nonneg_floor(inner.lo.sub_const(1), inner.n0)
        return Bounds(lo, inner.hi, n0, False)
    if name == "ceil":
        inner = _bounds(e.args[0], env, depth + 1)
        if inner is None:
            return None
        return Bounds(inner.lo, inner.hi.add(Ratio.const(1)), inner.n0, False)
    return None


def _as_int_poly(r: Ratio):
    """Extract integer polynomial coefficients if r is a pure polynomial."""
    cd = r.den.constant_value()
    if cd is None or cd == 0:
        return None
    coeffs = {}
    for t in r.num.terms:
        if t.base != 1 or t.ep:
            return None
        coeffs[t.deg] = t.coeff / cd
    if not coeffs:
        return ()
    out = [coeffs.get(i, ZERO) for i in range(max(coeffs) + 1)]
    if any(c.denominator != 1 for c in out):
        return None
    return poly_norm(tuple(c.numerator for c in out))


def _mul_bounds(b1: Bounds, b2: Bounds) -> Optional[Bounds]:
    n0 = max(b1.n0, b2.n0)
    exact = b1.exact and b2.exact
    if b1.exact:
        return _scale_by_exact(b1.lo, b2, n0, exact)
    if b2.exact:
        return _scale_by_exact(b2.lo, b1, n0, exact)
    s1 = 1 if b1.lo.is_zero() else sign_eventually(b1.lo)[0]
    s2 = 1 if b2.lo.is_zero() else sign_eventually(b2.lo)[0]
    if s1 >= 0 and s2 >= 0:
        t1 = 1 if b1.lo.is_zero() else sign_eventually(b1.lo)[1]
        t2 = 1 if b2.lo.is_zero() else sign_eventually(b2.lo)[1]
        return Bounds(b1.lo.mul(b2.lo), b1.hi.mul(b2.hi),
                      max(n0, t1, t2), exact)
    return None


def _scale_by_exact(x: Ratio, b: Bounds, n0: int, exact: bool) -> Optional[Bounds]:
    if x.is_zero():
        z = Ratio.const(0)
        return Bounds(z, z, n0, exact)
    s, thr = sign_eventually(x)
    if s > 0:
        return Bounds(x.mul(b.lo), x.mul(b.hi), max(n0, thr), exact)
    return Bounds(x.mul(b.hi), x.mul(b.lo), max(n0, thr), exact)


def _invert_bounds(b: Bounds) -> Optional[Bounds]:
    if b.exact:
        x = b.lo
        if x.is_zero():
            return None
        s, thr = sign_eventually(x)
        inv = Ratio.const(1).div(x)
        return Bounds(inv, inv, max(b.n0, thr), True)
    s, thr = (0, 1) if b.lo.is_zero() else sign_eventually(b.lo)
    if s <= 0:
        return None
    one = Ratio.const(1)
    return Bounds(one.div(b.hi), one.div(b.lo), max(b.n0, thr), False)


def _div_bounds(e: Expr, env: Env, depth: int, floor: bool) -> Optional[Bounds]:
    b1 = _bounds(e.args[0], env, depth + 1)
    b2 = _bounds(e.args[1], env, depth + 1)
    if b1 is None or b2 is None:
        return None
    n0 = max(b1.n0, b2.n0)
    inv = _invert_bounds(b2)
    if inv is None:
        return None
    q = _mul_bounds(b1, inv)
    if q is None:
        return None
    q = Bounds(q.lo, q.hi, max(q.n0, n0), q.exact)
    if not floor:
        return q
    if q.exact:
        it = _integral_from(q.lo)
        if it is not None:
            # quotient certifiably a nonnegative integer: floor is the identity
            return Bounds(q.lo, q.hi, max(q.n0, it), True)
    lo, m0 = _nonneg_floor(q.lo.sub_const(1), q.n0)
    return Bounds(lo, q.hi, m0, False)


def _integral_from(r: Ratio) -> Optional[int]:
    """Threshold from which r(n) is a nonnegative integer, or None.

    Handles single products c * n^d * b^n * 2^E(n): the denominator of c must
    be absorbed by the odd part of b and by the certified growth of the
    2-exponent s*n + E(n) where s is the 2-adic valuation of b.
    """
    dv = r.den.constant_value()
    if dv is None or dv == 0:
        return None
    ts = r.num.terms
    if not ts:
        return 1
    if len(ts) != 1:
        return None
    t = ts[0]
    if t.deg < 0 or t.base <= 0 or t.base.denominator != 1:
        return None
    c = t.coeff / dv
    if c < 0:
        return None
    den = c.denominator
    j = (den & -den).bit_length() - 1
    qodd = den >> j
    b = t.base.numerator
    s = (b & -b).bit_length() - 1
    bodd = b >> s
    kodd = 0
    cur = 1 % qodd
    while cur:
        cur = cur * bodd % qodd
        kodd += 1
        if kodd > 64:
            return None
    p = list(_ep_to_poly(t.ep)) + [0, 0]
    p[0] += 1 - j
    p[1] += s
    thr = poly_positive_from(poly_norm(p))
    if thr is None:
        return None
    return max(1, kodd, thr)
