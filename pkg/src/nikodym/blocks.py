"""Block families: indexed sequences of finite measures with disjoint supports.

Two realizations:

* UniformBlocks: block n occupies the interval [start(n), start(n) + length(n))
  and gives every point the same positive weight(n); start, length and weight
  are expressions in n, so values on sets reduce to exact counting and the
  family never has to be materialized.
* ExplicitBlocks: a concrete finite list of measures with pairwise disjoint
  supports on the naturals.

The canonical uniform family attached to a growth function f has block n of
length n * f(n) with per-point weight 1 / f(n), so block n has variation
exactly n; phi_blocks builds it.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import BlockTooLarge, NotBlockStructured, ValidationError
from .expr import EMPTY_ENV, Env, Expr, eval_expr, eval_int, op, parse_expr
from .measures import FinMeasure
from .sets import ScanLimit, SetSpec

_SCAN_CAP = 65536
_BLOCK_POINT_CAP = 1 << 20


class BlockGenerator:
    first_index: int = 1
    last_index: Optional[int] = None

    def indices(self):
        """Iterate block indices, capped; infinite families stop at the cap."""
        n = self.first_index
        stop = self.last_index
        for _ in range(_SCAN_CAP):
            if stop is not None and n > stop:
                return
            yield n
            n += 1
        raise ScanLimit("block index scan cap hit")

    def block_interval(self, n: int):
        raise NotImplementedError

    def block_length(self, n: int) -> int:
        a, b = self.block_interval(n)
        return b - a

    def block_norm(self, n: int) -> Fraction:
        raise NotImplementedError

    def block_value(self, n: int, s: SetSpec) -> Fraction:
        """Variation of block n on s (equals mass for positive blocks)."""
        raise NotImplementedError

    def block_measure(self, n: int) -> FinMeasure:
        raise NotImplementedError

    def select(self, n: int, c: int, mode: str):
        raise NotImplementedError

    def blocks_touching(self, lo: int, hi: int):
        out = []
        for n in self.indices():
            a, b = self.block_interval(n)
            if a >= hi:
                break
            if b > lo:
                out.append(n)
        return out

    def locate_point(self, k: int) -> Optional[int]:
        for n in self.blocks_touching(k, k + 1):
            return n
        return None


@dataclass(frozen=True)
class UniformBlocks(BlockGenerator):
    start: Expr
    length: Expr
    weight: Expr
    first_index: int = 1
    last_index: Optional[int] = None
    env: Env = field(default_factory=lambda: EMPTY_ENV)
    label: str = ""

    def start_at(self, n: int) -> int:
        v = eval_int(self.start, n, self.env)
        if v < 0:
            raise ValidationError(f"block start negative at n = {n}")
        return v

    def length_at(self, n: int) -> int:
        v = eval_int(self.length, n, self.env)
        if v <= 0:
            raise ValidationError(f"block length must be positive at n = {n}")
        return v

    def weight_at(self, n: int) -> Fraction:
        v = eval_expr(self.weight, n, self.env)
        if v <= 0:
            raise ValidationError(f"block weight must be positive at n = {n}")
        return v

    def block_interval(self, n: int):
        self._check_index(n)
        a = self.start_at(n)
        b = a + self.length_at(n)
        nxt = n + 1
        if self.last_index is None or nxt <= self.last_index:
            if eval_int(self.start, nxt, self.env) < b:
                raise ValidationError(f"blocks {n} and {nxt} overlap")
        return a, b

    def _check_index(self, n: int):
        if n < self.first_index or (self.last_index is not None
                                    and n > self.last_index):
            raise ValidationError(f"block index {n} out of range")

    def block_norm(self, n: int) -> Fraction:
        return self.weight_at(n) * self.length_at(n)

    def block_value(self, n: int, s: SetSpec) -> Fraction:
        a, b = self.block_interval(n)
        return self.weight_at(n) * s.count_in(a, b)

    def block_measure(self, n: int) -> FinMeasure:
        a, b = self.block_interval(n)
        if b - a > _BLOCK_POINT_CAP:
            raise BlockTooLarge(n, b - a)
        w = self.weight_at(n)
        return FinMeasure({k: w for k in range(a, b)})

    def select(self, n: int, c: int, mode: str):
        a, b = self.block_interval(n)
        c = min(c, b - a)
        if c <= 0:
            return []
        return [(a, a + c)] if mode == "first" else [(b - c, b)]


@dataclass(frozen=True)
class ExplicitBlocks(BlockGenerator):
    measures: tuple
    first_index: int = 1

    def __post_init__(self):
        ms = tuple(self.measures)
        if not ms:
            raise ValidationError("explicit block family is empty")
        prev_end = 0
        for m in ms:
            if not isinstance(m, FinMeasure) or m.is_zero():
                raise ValidationError("explicit blocks must be nonzero measures")
            if m.has_pf_atom():
                raise NotBlockStructured("explicit blocks live on the naturals")
            sup = m.omega_support()
            if min(sup) < prev_end:
                raise ValidationError(
                    "explicit block supports must occupy increasing disjoint spans")
            prev_end = max(sup) + 1
        object.__setattr__(self, "measures", ms)
        object.__setattr__(self, "last_index",
                           self.first_index + len(ms) - 1)

    def _measure(self, n: int) -> FinMeasure:
        i = n - self.first_index
        if not 0 <= i < len(self.measures):
            raise ValidationError(f"block index {n} out of range")
        return self.measures[i]

    def block_interval(self, n: int):
        sup = self._measure(n).omega_support()
        return min(sup), max(sup) + 1

    def block_norm(self, n: int) -> Fraction:
        return self._measure(n).norm()

    def block_value(self, n: int, s: SetSpec) -> Fraction:
        return self._measure(n).variation_on(s)

    def block_measure(self, n: int) -> FinMeasure:
        return self._measure(n)

    def select(self, n: int, c: int, mode: str):
        sup = self._measure(n).omega_support()
        c = min(c, len(sup))
        if c <= 0:
            return []
        chosen = sup[:c] if mode == "first" else sup[-c:]
        return [(k, k + 1) for k in chosen]


_PHI_START = parse_expr("(psum philen n)")
_PHI_LEN = parse_expr("(mul n (app f n))")
_PHI_WEIGHT = parse_expr("(div 1 (app f n))")


def phi_blocks(f: Expr, env: Env = EMPTY_ENV, first_index: int = 1,
               last_index: Optional[int] = None) -> UniformBlocks:
    """Canonical uniform family of a growth function f.

    Block n: length n * f(n), per-point weight 1 / f(n), blocks consecutive
    from 0; block n has variation exactly n.  f must evaluate at every j >= 0
    and be positive from first_index on (the j = 0 summand is 0 * f(0) = 0).
    """
    env2 = env.define("f", f).define("philen", _PHI_LEN)
    return UniformBlocks(start=_PHI_START, length=_PHI_LEN, weight=_PHI_WEIGHT,
                         first_index=first_index, last_index=last_index,
                         env=env2, label="phi")
