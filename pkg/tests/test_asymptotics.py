"""Certified asymptotics: every threshold and limit is cross-checked by
direct evaluation over a window of sample points."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nikodym.asymptotics import (
    Bounds,
    Form,
    Lim,
    Ratio,
    Term,
    eventually_ge,
    eventually_le,
    eventually_positive,
    expr_to_bounds,
    poly_eval,
    poly_norm,
    poly_positive_from,
    poly_shift,
    poly_sub,
    series_class,
    sign_eventually,
    term_eval,
)
from nikodym.expr import EMPTY_ENV, Env, eval_expr, parse_expr

F = Fraction


# ---------------------------------------------------------------- polynomials

def test_poly_norm_drops_trailing_zeros():
    assert poly_norm((1, 2, 0, 0)) == (1, 2)
    assert poly_norm((0, 0)) == ()
    assert poly_norm(()) == ()


def test_poly_sub_eval_agree():
    p, q = (3, -1, 2), (1, 4)
    r = poly_sub(p, q)
    for n in range(-5, 6):
        assert poly_eval(r, n) == poly_eval(p, n) - poly_eval(q, n)


def test_poly_shift_is_eval_at_succ():
    p = (2, -3, 0, 1)
    s = poly_shift(p)
    for n in range(-4, 8):
        assert poly_eval(s, n) == poly_eval(p, n + 1)


@pytest.mark.parametrize("p", [(5, 1), (-100, 1), (-3, -7, 2), (0, 0, 1), (1,)])
def test_poly_positive_from_certified(p):
    N = poly_positive_from(p)
    assert N is not None
    # no value at or past the threshold may fail, for a generous window
    for n in range(N, N + 120):
        assert poly_eval(p, n) > 0


@pytest.mark.parametrize("p", [(), (1, -1), (3, 0, -2), (-4,)])
def test_poly_positive_from_refuses_nonpositive_lead(p):
    assert poly_positive_from(p) is None


# ---------------------------------------------------------------------- forms

def _direct(t: Term, n: int) -> Fraction:
    e = 0
    for i, a in enumerate(t.ep):
        e += a * n ** (i + 2)
    return t.coeff * F(n) ** t.deg * t.base ** n * F(2) ** e


def test_term_eval_matches_direct():
    t = Term(F(3, 7), 2, F(5, 4), (1,))
    for n in range(1, 9):
        assert term_eval(t, n) == _direct(t, n)


def test_form_merges_like_terms():
    a = Term(F(2), 1, F(1), ())
    b = Term(F(3), 1, F(1), ())
    f = Form((a, b))
    assert len(f.terms) == 1
    assert f.terms[0].coeff == 5


def test_form_cancellation_is_zero():
    a = Term(F(2), 1, F(1), ())
    b = Term(F(-2), 1, F(1), ())
    assert Form((a, b)).is_zero()


def test_form_arithmetic_agrees_with_eval():
    f = Form((Term(F(1), 2, F(1), ()), Term(F(-3), 0, F(1), ())))  # n^2 - 3
    g = Form((Term(F(1, 2), 0, F(2), ()),))                        # 2^n / 2
    for n in range(1, 10):
        fv, gv = f.eval(n), g.eval(n)
        assert f.add(g).eval(n) == fv + gv
        assert f.sub(g).eval(n) == fv - gv
        assert f.mul(g).eval(n) == fv * gv
        assert f.pow(3).eval(n) == fv ** 3
        assert f.scale(F(2, 5)).eval(n) == fv * F(2, 5)


def test_dominant_picks_fastest_growth():
    f = Form((Term(F(1000), 5, F(1), ()),   # 1000 n^5
              Term(F(1, 1000), 0, F(2), ())))  # 2^n / 1000
    d = f.dominant()
    assert d.base == 2 and d.deg == 0


# -------------------------------------------------------------- "eventually"

@pytest.mark.parametrize("terms", [
    (Term(F(1), 1, F(1), ()), Term(F(-10), 0, F(1), ())),        # n - 10
    (Term(F(1), 0, F(2), ()), Term(F(-1), 3, F(1), ())),          # 2^n - n^3
    (Term(F(1, 100), 2, F(1), ()), Term(F(-50), 1, F(1), ())),    # n^2/100 - 50n
    (Term(F(1), 0, F(1), (1,)), Term(F(-1), 0, F(3), ())),        # 2^(n^2) - 3^n
])
def test_eventually_positive_certified(terms):
    f = Form(terms)
    N = eventually_positive(f)
    assert N is not None
    for n in range(N, N + 64):
        assert f.eval(n) > 0


def test_eventually_positive_none_for_negative_dominant():
    f = Form((Term(F(100), 1, F(1), ()), Term(F(-1), 2, F(1), ())))
    assert eventually_positive(f) is None
    assert eventually_positive(Form()) is None


def test_sign_eventually_matches_samples():
    # (n^2 - 100n) / (n + 1): negative early, positive late
    num = Form((Term(F(1), 2, F(1), ()), Term(F(-100), 1, F(1), ())))
    den = Form((Term(F(1), 1, F(1), ()), Term(F(1), 0, F(1), ())))
    s, thr = sign_eventually(Ratio(num, den))
    assert s == 1
    for n in range(thr, thr + 64):
        assert num.eval(n) / den.eval(n) > 0


def test_eventually_ge_certified():
    # n/(n+1) >= 1/2 eventually
    r = Ratio(Form.var(), Form.var().add(Form.const(1)))
    N = eventually_ge(r, F(1, 2))
    assert N is not None
    for n in range(N, N + 64):
        assert r.eval(n) >= F(1, 2)
    assert eventually_ge(r, 2) is None


def test_eventually_le_certified():
    r = Ratio(Form.const(1), Form.var())
    N = eventually_le(r, F(1, 10))
    assert N is not None
    for n in range(N, N + 64):
        assert r.eval(n) <= F(1, 10)


# --------------------------------------------------------------------- limits

@pytest.mark.parametrize("num,den,want", [
    ((1, 1), (1, 1), Lim.finite(1)),       # n/n -> 1
    ((3, 2), (1, 1), Lim("pinf")),         # 3n^2/n -> +inf
    ((-3, 2), (1, 1), Lim("ninf")),        # -3n^2/n -> -inf
    ((1, 1), (2, 2), Lim.finite(0)),       # n/(2n^2) -> 0
])
def test_ratio_limits(num, den, want):
    def build(spec):
        c, d = spec
        return Form((Term(F(c), d, F(1), ()),))
    r = Ratio(build(num), build(den))
    assert r.limit() == want


def test_limit_constant_ratio():
    # (3n^2 + n) / (6n^2) -> 1/2
    num = Form((Term(F(3), 2, F(1), ()), Term(F(1), 1, F(1), ())))
    den = Form((Term(F(6), 2, F(1), ()),))
    assert Ratio(num, den).limit() == Lim.finite(F(1, 2))


def test_lim_describe():
    assert Lim.finite(F(1, 2)).describe() == "1/2"
    assert Lim.finite(3).describe() == "3"
    assert Lim("pinf").describe() == "+inf"


# --------------------------------------------------------------------- series

def _ratio_of(text: str, env: Env = EMPTY_ENV) -> Ratio:
    b = expr_to_bounds(parse_expr(text), env)
    assert b is not None and b.exact
    return b.lo


@pytest.mark.parametrize("text,verdict,rule", [
    ("(div 1 (add n 1))", "diverges", "harmonic-comparison"),
    ("(div 1 (mul n n))", "converges", "p-series"),
    ("(div 1 (pow2 n))", "converges", "geometric"),
    ("(div 1 (pow2 (pow n 2)))", "converges", "super-geometric"),
    ("1/1", "diverges", "terms-bounded-below"),
    ("n", "diverges", "terms-unbounded"),
    ("(pow2 n)", "diverges", "terms-unbounded"),
])
def test_series_class_rules(text, verdict, rule):
    got, evidence = series_class(_ratio_of(text))
    assert got == verdict
    assert evidence["rule"] == rule


def test_series_class_zero():
    got, evidence = series_class(Ratio.const(0))
    assert got == "converges" and evidence["rule"] == "zero"


def test_series_divergence_threshold_is_certified():
    r = _ratio_of("(div 1 (add n 1))")
    verdict, evidence = series_class(r)
    assert verdict == "diverges"
    thr = evidence["threshold"]
    eps = evidence["coefficient"]
    # past the threshold each term is at least eps / n
    for n in range(thr, thr + 64):
        assert r.eval(n) >= eps / n


# --------------------------------------------------------------------- bounds

def _check_sandwich(text: str, env: Env, lo_n: int, hi_n: int):
    e = parse_expr(text)
    b = expr_to_bounds(e, env)
    assert b is not None
    for n in range(max(b.n0, lo_n), hi_n):
        v = eval_expr(e, n, env)
        assert b.lo.eval(n) <= v <= b.hi.eval(n), (text, n)
    return b


@pytest.mark.parametrize("text", [
    "n",
    "(add n 3/2)",
    "(mul 2 (pow n 3))",
    "(pow2 (pow n 2))",
    "(div (pow n 2) (add n 1))",
    "(pow (add n 1) 2)",
    "(pow n -1)",
    "(sub (pow n 2) n)",
])
def test_bounds_exact_fragment(text):
    b = _check_sandwich(text, EMPTY_ENV, 1, 40)
    if b.exact:
        e = parse_expr(text)
        for n in range(b.n0, b.n0 + 20):
            assert b.lo.eval(n) == eval_expr(e, n, EMPTY_ENV)


@pytest.mark.parametrize("text", [
    "(floordiv (pow2 n) 2)",
    "(floordiv (pow n 2) 3)",
    "(floor (div n 2))",
    "(ceil (div n 2))",
    "(sub n (mul 2 (floordiv n 2)))",
])
def test_bounds_rounding_sandwich(text):
    _check_sandwich(text, EMPTY_ENV, 1, 60)


def test_floordiv_integral_quotient_is_exact():
    b = expr_to_bounds(parse_expr("(floordiv (pow2 n) 2)"), EMPTY_ENV)
    assert b is not None and b.exact
    for n in range(b.n0, b.n0 + 12):
        assert b.lo.eval(n) == 2 ** n // 2


def test_bounds_through_definitions():
    env = EMPTY_ENV.define("f", parse_expr("(mul 2 (pow n 2))"))
    b = _check_sandwich("(app f n)", env, 1, 40)
    assert b.exact
    assert b.limit() == Lim("pinf")


def test_bounds_out_of_fragment():
    env = EMPTY_ENV.define("f", parse_expr("n"))
    # prefix sums have no closed form here
    assert expr_to_bounds(parse_expr("(psum f n)"), env) is None
    # application at a non-variable argument is not a closed form in n
    assert expr_to_bounds(parse_expr("(app f 3)"), env) is None
    # undefined name
    assert expr_to_bounds(parse_expr("(app g n)"), EMPTY_ENV) is None


def test_bounds_limits():
    cases = [
        ("(div 1 (add n 1))", Lim.finite(0)),
        ("(mul 2 (pow n 2))", Lim("pinf")),
        ("(div (mul 3 n) (mul 6 n))", Lim.finite(F(1, 2))),
        ("(pow2 (pow n 2))", Lim("pinf")),
    ]
    for text, want in cases:
        b = expr_to_bounds(parse_expr(text), EMPTY_ENV)
        assert b is not None
        assert b.limit() == want, text


def test_monus_bounds_clamp_at_zero():
    # n monus n^2 is identically zero from some point; bounds must respect it
    e = parse_expr("(sub n (pow n 2))")
    b = expr_to_bounds(e, EMPTY_ENV)
    assert b is not None
    for n in range(b.n0, b.n0 + 30):
        v = eval_expr(e, n, EMPTY_ENV)
        assert b.lo.eval(n) <= v <= b.hi.eval(n)
    assert b.limit() == Lim.finite(0)


# small random polynomial expressions: sandwich must hold everywhere

@st.composite
def _poly_expr(draw):
    c0 = draw(st.integers(min_value=0, max_value=9))
    c1 = draw(st.integers(min_value=0, max_value=9))
    c2 = draw(st.integers(min_value=0, max_value=9))
    return f"(add {c0}/1 (add (mul {c1}/1 n) (mul {c2}/1 (pow n 2))))"


@given(_poly_expr(), st.integers(min_value=1, max_value=200))
@settings(max_examples=60, deadline=None)
def test_bounds_sandwich_random_polys(text, n):
    e = parse_expr(text)
    b = expr_to_bounds(e, EMPTY_ENV)
    assert b is not None and b.exact
    if n >= b.n0:
        assert b.lo.eval(n) == eval_expr(e, n, EMPTY_ENV)


def test_bounds_point_constructor():
    b = Bounds.point(Ratio.const(F(3, 4)))
    assert b.exact and b.lo.eval(5) == F(3, 4)
    assert b.limit() == Lim.finite(F(3, 4))
