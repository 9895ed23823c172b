"""Set specifications: finite data plus symbolic rules, evaluated exactly.

Every spec can list its trace inside a window [lo, hi) as disjoint sorted
half-open intervals, so counting, complementation and boolean algebra never
materialize points.  Rule-generated interval families are scanned with a
monotonicity check and a hard scan cap; callers treat a cap hit as
"cannot decide here", never as an answer.
"""

from dataclasses import dataclass, field
from typing import Optional

from .errors import ValidationError
from .expr import EMPTY_ENV, Env, Expr, eval_int

_SCAN_CAP = 65536


class ScanLimit(ValidationError):
    pass


def _merge(intervals):
    out = []
    for a, b in sorted(intervals):
        if a >= b:
            continue
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _clip(intervals, lo, hi):
    out = []
    for a, b in intervals:
        a2, b2 = max(a, lo), min(b, hi)
        if a2 < b2:
            out.append((a2, b2))
    return out


def _complement_within(intervals, lo, hi):
    out = []
    cur = lo
    for a, b in intervals:
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
    if cur < hi:
        out.append((cur, hi))
    return out


def _intersect(xs, ys):
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if a < b:
            out.append((a, b))
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return out


class SetSpec:
    contains_pf: bool = False
    kind: str = "abstract"

    def intervals_in(self, lo: int, hi: int):
        raise NotImplementedError

    def count_in(self, lo: int, hi: int) -> int:
        return sum(b - a for a, b in self.intervals_in(lo, hi))

    def contains_point(self, k: int) -> bool:
        return bool(self.intervals_in(k, k + 1))

    def points_in(self, lo: int, hi: int, cap: int = 1 << 20):
        ivs = self.intervals_in(lo, hi)
        if sum(b - a for a, b in ivs) > cap:
            raise ScanLimit(f"too many points in [{lo}, {hi})")
        out = []
        for a, b in ivs:
            out.extend(range(a, b))
        return out


@dataclass(frozen=True)
class FiniteSet(SetSpec):
    members: tuple
    contains_pf: bool = False
    kind: str = "finite"

    def __post_init__(self):
        ms = tuple(sorted(set(self.members)))
        if any(not isinstance(m, int) or m < 0 for m in ms):
            raise ValidationError("finite set members must be naturals")
        object.__setattr__(self, "members", ms)

    def intervals_in(self, lo, hi):
        return _merge((m, m + 1) for m in self.members if lo <= m < hi)


@dataclass(frozen=True)
class IntervalRule:
    """k-th interval is [lower(k), upper(k)), k >= index_from."""

    lower: Expr
    upper: Expr
    index_from: int = 0
    env: Env = field(default_factory=lambda: EMPTY_ENV)


@dataclass(frozen=True)
class IntervalUnion(SetSpec):
    intervals: tuple = ()
    rule: Optional[IntervalRule] = None
    contains_pf: bool = False
    kind: str = "interval_union"

    def __post_init__(self):
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        for a, b in ivs:
            if a < 0 or b < a:
                raise ValidationError(f"bad interval [{a}, {b})")
        object.__setattr__(self, "intervals", ivs)

    def intervals_in(self, lo, hi):
        got = list(_clip(self.intervals, lo, hi))
        if self.rule is not None:
            r = self.rule
            k = r.index_from
            prev_lower = None
            for _ in range(_SCAN_CAP):
                a = eval_int(r.lower, k, r.env)
                b = eval_int(r.upper, k, r.env)
                if prev_lower is not None and a < prev_lower:
                    raise ValidationError("rule interval starts must be nondecreasing")
                prev_lower = a
                if a >= hi:
                    break
                if b > a:
                    got.append((max(a, lo), min(b, hi)))
                k += 1
            else:
                raise ScanLimit("interval rule scan cap hit")
        return _merge(got)


@dataclass(frozen=True)
class BlockSelect(SetSpec):
    """min(count(n), block length) points from each generator block."""

    count: Expr
    mode: str
    generator: object  # BlockGenerator, bound late
    env: Env = field(default_factory=lambda: EMPTY_ENV)
    contains_pf: bool = False
    kind: str = "block_select"

    def __post_init__(self):
        if self.mode not in ("first", "last"):
            raise ValidationError("block_select mode is 'first' or 'last'")

    def count_at(self, n: int) -> int:
        c = eval_int(self.count, n, self.env)
        if c < 0:
            raise ValidationError(f"block_select count negative at n = {n}")
        return c

    def intervals_in(self, lo, hi):
        out = []
        for n in self.generator.blocks_touching(lo, hi):
            out.extend(self.generator.select(n, self.count_at(n), self.mode))
        return _merge(_clip(out, lo, hi))


@dataclass(frozen=True)
class Complement(SetSpec):
    inner: SetSpec
    kind: str = "complement"

    @property
    def contains_pf(self):
        return not self.inner.contains_pf

    def intervals_in(self, lo, hi):
        return _complement_within(self.inner.intervals_in(lo, hi), lo, hi)


@dataclass(frozen=True)
class Union(SetSpec):
    left: SetSpec
    right: SetSpec
    kind: str = "union"

    @property
    def contains_pf(self):
        return self.left.contains_pf or self.right.contains_pf

    def intervals_in(self, lo, hi):
        return _merge(list(self.left.intervals_in(lo, hi))
                      + list(self.right.intervals_in(lo, hi)))


@dataclass(frozen=True)
class Intersect(SetSpec):
    left: SetSpec
    right: SetSpec
    kind: str = "intersect"

    @property
    def contains_pf(self):
        return self.left.contains_pf and self.right.contains_pf

    def intervals_in(self, lo, hi):
        return _intersect(self.left.intervals_in(lo, hi),
                          self.right.intervals_in(lo, hi))


def omega_complement(s: SetSpec) -> SetSpec:
    """Complement within the naturals only (PF flag forced off)."""
    if isinstance(s, Complement) and not s.inner.contains_pf:
        return s.inner
    comp = Complement(s)
    if not comp.contains_pf:
        return comp
    return Intersect(comp, _OMEGA)


@dataclass(frozen=True)
class _Everything(SetSpec):
    contains_pf: bool = False
    kind: str = "omega"

    def intervals_in(self, lo, hi):
        return [(lo, hi)] if lo < hi else []


_OMEGA = _Everything()


def everything() -> SetSpec:
    """The set of all naturals (PF excluded)."""
    return _OMEGA


def is_finite_with_bound(s: SetSpec):
    """(True, sup+1) for specs that are syntactically finite, else (False, None)."""
    if isinstance(s, FiniteSet):
        return True, (s.members[-1] + 1 if s.members else 0)
    if isinstance(s, IntervalUnion) and s.rule is None:
        return True, max((b for _, b in s.intervals), default=0)
    if isinstance(s, Union):
        fl, bl = is_finite_with_bound(s.left)
        fr, br = is_finite_with_bound(s.right)
        if fl and fr:
            return True, max(bl, br)
        return False, None
    if isinstance(s, Intersect):
        for side in (s.left, s.right):
            f, b = is_finite_with_bound(side)
            if f:
                return True, b
        return False, None
    return False, None
