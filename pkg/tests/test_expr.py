"""S-expression language: parsing, evaluation, magnitudes, comparison."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nikodym.expr import (parse_expr, render, eval_expr, eval_int, subst_var,
                          cmp_exprs, eval_mag, Env, EMPTY_ENV)
from nikodym.errors import ParseError, EvalError, MagnitudeOverflow


def test_parse_render_round_trip():
    for s in ["n", "7", "(div 1 2)", "(mul 2 (pow n 2))", "(pow2 (pow n 2))",
              "(add n (sub 3 n))", "(app f (app f n))", "(psum phi n)",
              "(floordiv (pow2 n) n)"]:
        assert render(parse_expr(s)) == s


@pytest.mark.parametrize("bad", [
    "", "(", ")", "(add 1", "(unknownop 1 2)", "(pow n n n)", "(app 3 n)",
    "(add)", "1 2",
])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse_expr(bad)


def test_eval_arithmetic():
    e = parse_expr("(add (mul 2 n) (div 1 2))")
    assert eval_expr(e, 3) == Fraction(13, 2)
    assert eval_expr(parse_expr("(sub 2 5)"), 0) == 0  # truncated subtraction
    assert eval_expr(parse_expr("(sub 5 2)"), 0) == 3
    assert eval_expr(parse_expr("(floordiv 7 2)"), 0) == 3
    assert eval_expr(parse_expr("(pow2 n)"), 5) == 32
    assert eval_int(parse_expr("(pow n 3)"), 4) == 64


def test_eval_rejects():
    with pytest.raises(EvalError):
        eval_expr(parse_expr("(div 1 (sub 1 1))"), 0)
    with pytest.raises(EvalError):
        eval_int(parse_expr("(div 1 2)"), 0)
    with pytest.raises(EvalError):
        eval_expr(parse_expr("(pow2 (div 1 2))"), 0)


def test_env_definitions():
    env = EMPTY_ENV.define("f", parse_expr("(pow n 2)"))
    assert eval_expr(parse_expr("(app f (app f n))"), 3, env) == 81
    assert eval_expr(parse_expr("(psum f n)"), 4, env) == 0 + 1 + 4 + 9
    env2 = env.define_table("g", {0: 5, 1: 7})
    assert eval_expr(parse_expr("(app g 1)"), 0, env2) == 7
    with pytest.raises(EvalError):
        eval_expr(parse_expr("(app g 2)"), 0, env2)
    # functional: the original env is unchanged
    with pytest.raises(EvalError):
        eval_expr(parse_expr("(app g 0)"), 0, env)


def test_mul_short_circuits_on_zero():
    env = EMPTY_ENV.define_table("t", {1: 4})
    # t undefined at 0, but the zero factor means it is never consulted
    assert eval_expr(parse_expr("(mul n (app t n))"), 0, env) == 0
    with pytest.raises(EvalError):
        eval_expr(parse_expr("(add n (app t n))"), 0, env)


def test_subst_var():
    e = parse_expr("(mul n (pow n 2))")
    shifted = subst_var(e, parse_expr("(add n 1)"))
    assert eval_expr(shifted, 2) == 3 * 9


def test_eval_mag_matches_exact_when_representable():
    env = EMPTY_ENV.define("f", parse_expr("(pow2 (pow n 2))"))
    e = parse_expr("(mul n (app f n))")
    for n in range(1, 8):
        assert eval_mag(e, n, env).to_int() == n * 2 ** (n * n)


def test_eval_mag_handles_astronomical_values():
    env = EMPTY_ENV.define("f", parse_expr("(pow2 (pow n 2))"))
    g = parse_expr("(mul n (app f (app f n)))")  # n * 2^((2^(n^2))^2)
    m = eval_mag(g, 4, env)  # exponent 2^32, far past materialization
    with pytest.raises(MagnitudeOverflow):
        m.to_int()
    assert m.cmp(eval_mag(g, 3, env)) == 1


def test_cmp_exprs_exact_and_lazy():
    f = parse_expr("(pow2 (pow n 2))")
    n4 = parse_expr("(pow n 4)")
    for n in range(1, 17):
        want = (2 ** (n * n) > n ** 4) - (2 ** (n * n) < n ** 4)
        assert cmp_exprs(f, n4, n) == want
    env = EMPTY_ENV.define("succf", f)
    lhs = parse_expr("(mul 2 (mul (pow n 2) (app succf n)))")
    g = parse_expr("(mul n (app succf (app succf n)))")
    # 2 n^2 2^(n^2) <= n 2^((2^(n^2))^2) at n = 16: pure magnitude territory
    assert cmp_exprs(lhs, g, 16, env) == -1


@given(st.integers(min_value=0, max_value=40),
       st.integers(min_value=0, max_value=40),
       st.integers(min_value=1, max_value=20))
def test_cmp_exprs_agrees_with_eval(a, b, n):
    ea = parse_expr(f"(add (mul {a} n) {b})")
    eb = parse_expr(f"(add (mul {b} n) {a})")
    va, vb = eval_expr(ea, n), eval_expr(eb, n)
    assert cmp_exprs(ea, eb, n) == (va > vb) - (va < vb)
