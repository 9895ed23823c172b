"""Set specifications and block families, checked against brute-force
point-membership oracles on finite windows."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nikodym.blocks import ExplicitBlocks, UniformBlocks, phi_blocks
from nikodym.errors import BlockTooLarge, ValidationError
from nikodym.expr import EMPTY_ENV, parse_expr
from nikodym.measures import PF, FinMeasure
from nikodym.sets import (
    BlockSelect,
    Complement,
    FiniteSet,
    Intersect,
    IntervalRule,
    IntervalUnion,
    Union,
    everything,
    is_finite_with_bound,
    omega_complement,
)

F = Fraction


def _points(s, lo, hi):
    return {k for k in range(lo, hi) if s.contains_point(k)}


# ---------------------------------------------------------------- finite sets

def test_finite_set_normalizes():
    s = FiniteSet((5, 1, 3, 3))
    assert s.members == (1, 3, 5)
    assert _points(s, 0, 10) == {1, 3, 5}
    assert s.count_in(0, 10) == 3
    assert s.count_in(2, 4) == 1


def test_finite_set_rejects_bad_members():
    with pytest.raises(ValidationError):
        FiniteSet((-1,))
    with pytest.raises(ValidationError):
        FiniteSet((F(1, 2),))


def test_adjacent_members_merge_to_one_interval():
    s = FiniteSet((2, 3, 4, 7))
    assert s.intervals_in(0, 10) == [(2, 5), (7, 8)]


# ------------------------------------------------------------ interval unions

def test_interval_union_static():
    s = IntervalUnion(intervals=((0, 3), (5, 9)))
    assert _points(s, 0, 12) == {0, 1, 2, 5, 6, 7, 8}
    assert s.count_in(2, 7) == 3


def test_interval_union_overlaps_merge():
    s = IntervalUnion(intervals=((0, 4), (2, 6)))
    assert s.intervals_in(0, 10) == [(0, 6)]


def test_interval_union_rejects_bad():
    with pytest.raises(ValidationError):
        IntervalUnion(intervals=((3, 2),))
    with pytest.raises(ValidationError):
        IntervalUnion(intervals=((-1, 2),))


def test_interval_rule_powers_of_two():
    # [2^k, 2^k + k) for k >= 1
    rule = IntervalRule(lower=parse_expr("(pow2 n)"),
                        upper=parse_expr("(add (pow2 n) n)"),
                        index_from=1)
    s = IntervalUnion(rule=rule)
    want = set()
    for k in range(1, 8):
        want |= set(range(2 ** k, 2 ** k + k))
    got = _points(s, 0, 200)
    assert got == {p for p in want if p < 200}


def test_interval_rule_rejects_decreasing_starts():
    rule = IntervalRule(lower=parse_expr("(sub 10 n)"),
                        upper=parse_expr("(add (sub 10 n) 1)"),
                        index_from=0)
    s = IntervalUnion(rule=rule)
    with pytest.raises(ValidationError):
        s.intervals_in(0, 100)


# ------------------------------------------------------------ boolean algebra

small_sets = st.sets(st.integers(min_value=0, max_value=30), max_size=10)


@given(small_sets, small_sets)
@settings(max_examples=80, deadline=None)
def test_boolean_algebra_oracle(a, b):
    sa, sb = FiniteSet(tuple(a)), FiniteSet(tuple(b))
    lo, hi = 0, 35
    assert _points(Union(sa, sb), lo, hi) == (a | b)
    assert _points(Intersect(sa, sb), lo, hi) == (a & b)
    assert _points(Complement(sa), lo, hi) == set(range(lo, hi)) - a


def test_complement_flips_pf():
    s = FiniteSet((1,))
    assert not s.contains_pf
    assert Complement(s).contains_pf
    assert not Complement(Complement(s)).contains_pf


def test_omega_complement_never_contains_pf():
    s = FiniteSet((1, 2), contains_pf=True)
    c = omega_complement(s)
    assert not c.contains_pf
    assert _points(c, 0, 6) == {0, 3, 4, 5}
    # double complement collapses
    cc = omega_complement(omega_complement(FiniteSet((4,))))
    assert _points(cc, 0, 6) == {4}


def test_everything():
    o = everything()
    assert o.count_in(10, 25) == 15
    assert not o.contains_pf


def test_points_in_cap():
    from nikodym.sets import ScanLimit
    with pytest.raises(ScanLimit):
        everything().points_in(0, 1 << 21)


# ------------------------------------------------------------ finiteness test

def test_is_finite_with_bound():
    assert is_finite_with_bound(FiniteSet((2, 9))) == (True, 10)
    assert is_finite_with_bound(FiniteSet(())) == (True, 0)
    assert is_finite_with_bound(IntervalUnion(intervals=((0, 5),))) == (True, 5)
    assert is_finite_with_bound(everything()) == (False, None)
    u = Union(FiniteSet((1,)), IntervalUnion(intervals=((4, 7),)))
    assert is_finite_with_bound(u) == (True, 7)
    m = Intersect(everything(), FiniteSet((3,)))
    assert is_finite_with_bound(m) == (True, 4)
    rule = IntervalRule(lower=parse_expr("(pow2 n)"),
                        upper=parse_expr("(add (pow2 n) 1)"), index_from=1)
    assert is_finite_with_bound(IntervalUnion(rule=rule)) == (False, None)


# ------------------------------------------------------------- uniform blocks

def _dyadic_blocks():
    # block n = [2^n, 2^(n+1)), weight 2^-n, starting at n = 0
    return UniformBlocks(start=parse_expr("(pow2 n)"),
                         length=parse_expr("(pow2 n)"),
                         weight=parse_expr("(div 1 (pow2 n))"),
                         first_index=0)


def test_uniform_block_geometry():
    g = _dyadic_blocks()
    assert g.block_interval(3) == (8, 16)
    assert g.block_length(3) == 8
    assert g.block_norm(3) == 1
    assert g.blocks_touching(5, 20) == [2, 3, 4]
    assert g.locate_point(9) == 3
    assert g.locate_point(0) is None


def test_uniform_block_value_matches_measure():
    g = _dyadic_blocks()
    s = IntervalUnion(intervals=((0, 11),))
    for n in range(0, 5):
        m = g.block_measure(n)
        assert g.block_value(n, s) == m.variation_on(s)
        assert g.block_norm(n) == m.norm()


def test_uniform_blocks_overlap_detected():
    g = UniformBlocks(start=parse_expr("n"), length=parse_expr("2/1"),
                      weight=parse_expr("1/1"), first_index=0)
    with pytest.raises(ValidationError):
        g.block_interval(0)


def test_uniform_blocks_select():
    g = _dyadic_blocks()
    assert g.select(3, 3, "first") == [(8, 11)]
    assert g.select(3, 3, "last") == [(13, 16)]
    assert g.select(3, 100, "first") == [(8, 16)]
    assert g.select(3, 0, "first") == []


def test_block_measure_cap():
    g = UniformBlocks(start=parse_expr("(mul n (pow2 24))"),
                      length=parse_expr("(pow2 24)"),
                      weight=parse_expr("1/1"), first_index=1)
    with pytest.raises(BlockTooLarge):
        g.block_measure(1)


# ---------------------------------------------------------- canonical family

@pytest.mark.parametrize("ftext", ["1/1", "n", "(mul 2 (pow n 2))"])
def test_phi_blocks_norm_is_index(ftext):
    g = phi_blocks(parse_expr(ftext))
    for n in range(1, 8):
        assert g.block_norm(n) == n


def test_phi_blocks_are_consecutive_from_zero():
    g = phi_blocks(parse_expr("n"))
    # f = n: block n = [start, start + n^2), starts 0, 1, 5, 14, 30, ...
    assert g.block_interval(1) == (0, 1)
    assert g.block_interval(2) == (1, 5)
    assert g.block_interval(3) == (5, 14)
    prev_end = 0
    for n in range(1, 10):
        a, b = g.block_interval(n)
        assert a == prev_end
        assert b - a == n * n
        prev_end = b


def test_phi_blocks_per_point_weight():
    g = phi_blocks(parse_expr("(mul 2 (pow n 2))"))
    for n in range(1, 6):
        m = g.block_measure(n)
        assert m.at_plus() == m.at_minus() == F(1, 2 * n * n)


# ------------------------------------------------------------ explicit blocks

def test_explicit_blocks_basic():
    ms = (FinMeasure({0: F(1)}), FinMeasure({2: F(1), 3: F(-1)}),
          FinMeasure({5: F(2)}))
    g = ExplicitBlocks(ms)
    assert g.last_index == 3
    assert g.block_interval(2) == (2, 4)
    assert g.block_norm(2) == 2
    assert g.block_measure(3) == ms[2]
    assert g.select(2, 1, "last") == [(3, 4)]


def test_explicit_blocks_value_is_variation():
    ms = (FinMeasure({0: F(1), 1: F(-1)}), FinMeasure({4: F(3)}))
    g = ExplicitBlocks(ms)
    s = FiniteSet((1, 4))
    assert g.block_value(1, s) == 1
    assert g.block_value(2, s) == 3


def test_explicit_blocks_reject_bad():
    with pytest.raises(ValidationError):
        ExplicitBlocks(())
    with pytest.raises(ValidationError):
        ExplicitBlocks((FinMeasure({3: F(1)}), FinMeasure({2: F(1)})))
    with pytest.raises(ValidationError):
        ExplicitBlocks((FinMeasure({0: F(1), 5: F(1)}), FinMeasure({3: F(1)})))
    from nikodym.errors import NotBlockStructured
    with pytest.raises(NotBlockStructured):
        ExplicitBlocks((FinMeasure({PF: F(1)}),))


# ------------------------------------------------------------- block selects

def test_block_select_half_of_each_dyadic_block():
    g = _dyadic_blocks()
    s = BlockSelect(count=parse_expr("(floordiv (pow2 n) 2)"),
                    mode="first", generator=g)
    # block n contributes its first 2^(n-1) points
    assert _points(s, 0, 40) == ({1} - {1}) | set(range(2, 3)) | set(range(4, 6)) \
        | set(range(8, 12)) | set(range(16, 24)) | set(range(32, 40))
    # selected fraction of each block has measure value exactly 1/2 for n >= 1
    for n in range(1, 6):
        assert g.block_value(n, s) == F(1, 2)


def test_block_select_mode_checked():
    with pytest.raises(ValidationError):
        BlockSelect(count=parse_expr("1/1"), mode="middle",
                    generator=_dyadic_blocks())


def test_block_select_count_clamped_to_block():
    g = ExplicitBlocks((FinMeasure({0: F(1), 1: F(1)}),))
    s = BlockSelect(count=parse_expr("(mul 5 n)"), mode="first", generator=g)
    assert _points(s, 0, 5) == {0, 1}
