"""Lower semicontinuous submeasures given symbolically, evaluated exactly.

Five spec forms:
* density: sup over a block family of the block measures' values;
* summable: weight expression w with value(A) = sum of w(k) for k in A;
* asymptotic_density: the fixed density form with blocks [2^n, 2^(n+1)) and
  per-point weight 2^(-n), n from 0 (the point 0 belongs to no block and
  always gets value 0);
* max_merge: pointwise max of two forms;
* finite_table: explicit values on every subset of a small ground set,
  validated monotone and subadditive on construction.

Also houses the prefix search (least [lo, m] whose value exceeds a bound,
with a boundedness certificate when the search provably cannot succeed) and
the LP-backed non-pathology defect for finite tables.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .asymptotics import eventually_le, expr_to_bounds, series_class
from .blocks import BlockGenerator, ExplicitBlocks, UniformBlocks
from .errors import (GroundTooLarge, OutOfGround, UnsupportedAsymptotics,
                     ValidationError)
from .expr import EMPTY_ENV, Env, Expr, eval_expr, op, parse_expr, render
from .measures import FinMeasure
from .sets import FiniteSet, SetSpec, is_finite_with_bound

_ZERO = Fraction(0)


class SubmeasureSpec:
    kind: str = "abstract"


@dataclass(frozen=True)
class DensitySubmeasure(SubmeasureSpec):
    generator: BlockGenerator
    kind: str = "density"

    def __post_init__(self):
        gen = self.generator
        if isinstance(gen, ExplicitBlocks):
            for m in gen.measures:
                if not m.is_nonneg():
                    raise ValidationError(
                        "density blocks must be non-negative measures")


@dataclass(frozen=True)
class SummableSubmeasure(SubmeasureSpec):
    weight: Expr
    env: Env = field(default_factory=lambda: EMPTY_ENV)
    kind: str = "summable"

    def weight_at(self, k: int) -> Fraction:
        v = eval_expr(self.weight, k, self.env)
        if v < 0:
            raise ValidationError(f"summable weight negative at n = {k}")
        return v


_PHI_D_GEN = UniformBlocks(start=parse_expr("(pow2 n)"),
                           length=parse_expr("(pow2 n)"),
                           weight=parse_expr("(div 1 (pow2 n))"),
                           first_index=0, label="phi_d")


def phi_d_generator() -> UniformBlocks:
    return _PHI_D_GEN


def asymptotic_density() -> DensitySubmeasure:
    """Blockwise upper-density form: value 2^(-n) per point on [2^n, 2^(n+1))."""
    return DensitySubmeasure(_PHI_D_GEN, kind="asymptotic_density")


@dataclass(frozen=True)
class MaxMerge(SubmeasureSpec):
    left: SubmeasureSpec
    right: SubmeasureSpec
    kind: str = "max_merge"


@dataclass(frozen=True)
class FiniteTable(SubmeasureSpec):
    ground: tuple
    values: tuple  # values[mask] for every subset mask of ground
    kind: str = "finite_table"

    def __post_init__(self):
        g = tuple(sorted(set(int(p) for p in self.ground)))
        if any(p < 0 for p in g):
            raise ValidationError("ground points must be naturals")
        if len(g) > 12:
            raise GroundTooLarge(len(g), 12)
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) != 1 << len(g):
            raise ValidationError("finite table needs a value for every subset")
        if vals[0] != 0:
            raise ValidationError("finite table value on the empty set must be 0")
        n = len(g)
        for mask in range(1 << n):
            for i in range(n):
                if not mask >> i & 1:
                    if vals[mask | 1 << i] < vals[mask]:
                        raise ValidationError(
                            "finite table violates monotonicity")
        # Subadditivity on disjoint pairs implies it everywhere (with
        # monotonicity): phi(A|B) = phi(A|(B-A)) <= phi(A) + phi(B-A) <= ...
        for mask in range(1 << n):
            rest = ((1 << n) - 1) ^ mask
            sub = rest
            while sub:
                if vals[mask | sub] > vals[mask] + vals[sub]:
                    raise ValidationError(
                        "finite table violates subadditivity")
                sub = (sub - 1) & rest
        object.__setattr__(self, "ground", g)
        object.__setattr__(self, "values", vals)

    def mask_of(self, pts) -> int:
        idx = {p: i for i, p in enumerate(self.ground)}
        mask = 0
        for p in pts:
            if p not in idx:
                raise OutOfGround(f"point {p} is outside the table ground")
            mask |= 1 << idx[p]
        return mask

    def value_of(self, pts) -> Fraction:
        return self.values[self.mask_of(pts)]

    def subset_dict(self) -> dict:
        n = len(self.ground)
        return {
            frozenset(self.ground[i] for i in range(n) if mask >> i & 1):
                self.values[mask]
            for mask in range(1 << n)
        }

    @staticmethod
    def from_submeasure(phi: SubmeasureSpec, ground) -> "FiniteTable":
        g = tuple(sorted(set(int(p) for p in ground)))
        if len(g) > 12:
            raise GroundTooLarge(len(g), 12)
        vals = []
        for mask in range(1 << len(g)):
            pts = [g[i] for i in range(len(g)) if mask >> i & 1]
            vals.append(eval_submeasure(phi, pts))
        return FiniteTable(ground=g, values=tuple(vals))


def _as_points(a):
    if isinstance(a, FiniteSet):
        return a.members
    if isinstance(a, SetSpec):
        fin, bound = is_finite_with_bound(a)
        if not fin:
            raise ValidationError("eval_submeasure needs a finite set")
        return tuple(a.points_in(0, bound))
    pts = tuple(sorted(set(int(k) for k in a)))
    if any(k < 0 for k in pts):
        raise ValidationError("submeasures are evaluated on naturals")
    return pts


def eval_submeasure(phi: SubmeasureSpec, a) -> Fraction:
    """Exact value of phi on a finite set of naturals."""
    pts = _as_points(a)
    if not pts:
        return _ZERO
    if isinstance(phi, DensitySubmeasure):
        fs = FiniteSet(pts)
        gen = phi.generator
        best = _ZERO
        for n in gen.blocks_touching(pts[0], pts[-1] + 1):
            best = max(best, gen.block_value(n, fs))
        return best
    if isinstance(phi, SummableSubmeasure):
        return sum((phi.weight_at(k) for k in pts), _ZERO)
    if isinstance(phi, MaxMerge):
        return max(eval_submeasure(phi.left, pts),
                   eval_submeasure(phi.right, pts))
    if isinstance(phi, FiniteTable):
        return phi.value_of(pts)
    raise ValidationError(f"unknown submeasure kind {phi!r}")


def interval_value(phi: SubmeasureSpec, lo: int, m: int) -> Fraction:
    """phi on the inclusive interval [lo, m], without materializing points."""
    if m < lo:
        return _ZERO
    if isinstance(phi, DensitySubmeasure):
        gen = phi.generator
        best = _ZERO
        if isinstance(gen, UniformBlocks):
            for n in gen.blocks_touching(lo, m + 1):
                s, e = gen.block_interval(n)
                overlap = min(e - 1, m) - max(s, lo) + 1
                best = max(best, gen.weight_at(n) * overlap)
            return best
        for n in gen.blocks_touching(lo, m + 1):
            acc = sum((abs(w) for p, w in gen.block_measure(n).items()
                       if lo <= p <= m), _ZERO)
            best = max(best, acc)
        return best
    if isinstance(phi, SummableSubmeasure):
        return sum((phi.weight_at(k) for k in range(lo, m + 1)), _ZERO)
    if isinstance(phi, MaxMerge):
        return max(interval_value(phi.left, lo, m),
                   interval_value(phi.right, lo, m))
    if isinstance(phi, FiniteTable):
        return phi.value_of(p for p in phi.ground if lo <= p <= m)
    raise ValidationError(f"unknown submeasure kind {phi!r}")


@dataclass
class PrefixSearch:
    """Outcome of searching the least m in [lo, horizon] with
    phi([lo, m]) > bound (interval endpoints inclusive)."""

    found: bool
    lo: int
    bound: Fraction
    horizon: int
    m: Optional[int] = None
    value: Optional[Fraction] = None
    bounded_certificate: Optional[dict] = None

    def to_jsonable(self):
        from .rat import format_rational
        out = {"found": self.found, "lo": self.lo,
               "bound": format_rational(self.bound), "horizon": self.horizon}
        if self.found:
            out["m"] = self.m
            out["value"] = format_rational(self.value)
        if self.bounded_certificate is not None:
            out["bounded_certificate"] = self.bounded_certificate
        return out


def _count_needed(bound: Fraction, w: Fraction) -> int:
    """Least c with c*w > bound."""
    q = bound / w
    return max(1, q.numerator // q.denominator + 1)


def _uniform_search(gen: UniformBlocks, lo, bound, horizon):
    best_m = None
    best_val = None
    for n in gen.indices():
        s, e = gen.block_interval(n)
        if s > horizon or (best_m is not None and s > best_m):
            break
        if e <= lo:
            continue
        w = gen.weight_at(n)
        start = max(s, lo)
        need = _count_needed(bound, w)
        m = start + need - 1
        if m < e and m <= horizon and (best_m is None or m < best_m):
            best_m = m
            best_val = w * need
    return best_m, best_val


def _explicit_search(gen: ExplicitBlocks, lo, bound, horizon):
    best_m = None
    best_val = None
    for n in gen.indices():
        s, e = gen.block_interval(n)
        if s > horizon or (best_m is not None and s > best_m):
            break
        if e <= lo:
            continue
        acc = _ZERO
        for p, w in gen.block_measure(n).items():
            if p < lo or p > horizon:
                continue
            acc += abs(w)
            if acc > bound:
                if best_m is None or p < best_m:
                    best_m, best_val = p, acc
                break
    return best_m, best_val


def _density_search(gen: BlockGenerator, lo, bound, horizon):
    if isinstance(gen, UniformBlocks):
        return _uniform_search(gen, lo, bound, horizon)
    if isinstance(gen, ExplicitBlocks):
        return _explicit_search(gen, lo, bound, horizon)
    raise ValidationError("unsupported block generator")


def _summable_search(phi: SummableSubmeasure, lo, bound, horizon):
    acc = _ZERO
    for m in range(lo, horizon + 1):
        acc += phi.weight_at(m)
        if acc > bound:
            return m, acc
    return None, None


def _table_search(phi: FiniteTable, lo, bound, horizon):
    mask = 0
    idx = {p: i for i, p in enumerate(phi.ground)}
    for m in range(lo, horizon + 1):
        if m in idx:
            mask |= 1 << idx[m]
            v = phi.values[mask]
            if v > bound:
                return m, v
        if m > (phi.ground[-1] if phi.ground else -1):
            break
    return None, None


def norm_bound_certificate(gen: BlockGenerator) -> Optional[dict]:
    """A rational C with every block norm <= C, certified, or None."""
    if isinstance(gen, ExplicitBlocks):
        c = max(gen.block_norm(n) for n in gen.indices())
        return {"kind": "explicit-finite-family",
                "bound": c, "checked_blocks": len(gen.measures)}
    if not isinstance(gen, UniformBlocks):
        return None
    if gen.last_index is not None:
        c = max(gen.block_norm(n) for n in gen.indices())
        return {"kind": "finite-family", "bound": c}
    norm_expr = op("mul", gen.length, gen.weight)
    bb = expr_to_bounds(norm_expr, gen.env)
    if bb is None:
        return None
    lim = bb.limit()
    if lim is None or lim.kind != "finite":
        return None
    # Try C = small candidates above the limit until hi <= C certifies.
    for c in (lim.value, lim.value + 1, 2 * lim.value + 1):
        try:
            thr = eventually_le(bb.hi, c)
        except UnsupportedAsymptotics:
            return None
        if thr is not None:
            n0 = max(thr, bb.n0, gen.first_index)
            worst = c
            for n in range(gen.first_index, n0):
                worst = max(worst, gen.block_norm(n))
            return {"kind": "norms-eventually-below", "bound": worst,
                    "eventual_bound": c, "threshold": n0}
    return None


def bounded_certificate(phi: SubmeasureSpec) -> Optional[dict]:
    """Certified rational bound on every value of phi, when one exists."""
    if isinstance(phi, DensitySubmeasure):
        return norm_bound_certificate(phi.generator)
    if isinstance(phi, SummableSubmeasure):
        bb = expr_to_bounds(phi.weight, phi.env)
        if bb is None:
            return None
        try:
            verdict, evidence = series_class(bb.hi)
        except UnsupportedAsymptotics:
            return None
        if verdict != "converges":
            return None
        return {"kind": "summable-total-converges",
                "rule": evidence.get("rule")}
    if isinstance(phi, MaxMerge):
        l = bounded_certificate(phi.left)
        r = bounded_certificate(phi.right)
        if l is None or r is None:
            return None
        out = {"kind": "max-of-bounded", "left": l, "right": r}
        if "bound" in l and "bound" in r:
            out["bound"] = max(Fraction(l["bound"]), Fraction(r["bound"]))
        return out
    if isinstance(phi, FiniteTable):
        return {"kind": "finite-table-top", "bound": phi.values[-1]}
    return None


def interval_search(phi: SubmeasureSpec, lo: int, bound: Fraction,
                    horizon: int) -> PrefixSearch:
    """Least m in [lo, horizon] with phi([lo, m]) > bound."""
    bound = Fraction(bound)
    if bound < 0:
        raise ValidationError("bound must be non-negative")
    if isinstance(phi, DensitySubmeasure):
        m, v = _density_search(phi.generator, lo, bound, horizon)
    elif isinstance(phi, SummableSubmeasure):
        m, v = _summable_search(phi, lo, bound, horizon)
    elif isinstance(phi, FiniteTable):
        m, v = _table_search(phi, lo, bound, horizon)
    elif isinstance(phi, MaxMerge):
        a = interval_search(phi.left, lo, bound, horizon)
        b = interval_search(phi.right, lo, bound, horizon)
        if a.found and (not b.found or a.m <= b.m):
            m, v = a.m, interval_value(phi, lo, a.m)
        elif b.found:
            m, v = b.m, interval_value(phi, lo, b.m)
        else:
            m, v = None, None
    else:
        raise ValidationError(f"unknown submeasure kind {phi!r}")
    if m is not None:
        return PrefixSearch(found=True, lo=lo, bound=bound, horizon=horizon,
                            m=m, value=v)
    cert = bounded_certificate(phi)
    return PrefixSearch(found=False, lo=lo, bound=bound, horizon=horizon,
                        bounded_certificate=_cert_jsonable(cert))


def _cert_jsonable(cert):
    if cert is None:
        return None
    from .rat import format_rational
    out = {}
    for k, v in cert.items():
        if isinstance(v, dict):
            out[k] = _cert_jsonable(v)
        elif isinstance(v, Fraction):
            out[k] = format_rational(v)
        elif isinstance(v, int) and k in ("bound", "eventual_bound"):
            out[k] = format_rational(Fraction(v))
        else:
            out[k] = v
    return out


def unboundedness_check(phi: SubmeasureSpec, bound: Fraction,
                        horizon: int) -> PrefixSearch:
    """Least prefix [0, m], m <= horizon, with phi([0, m]) > bound."""
    return interval_search(phi, 0, bound, horizon)


@dataclass
class NonpathReport:
    lp_value: Fraction
    phi_value: Fraction
    defect: Fraction
    measure: dict  # optimal dominated measure, point -> mass
    cover: dict  # subset (frozenset) -> multiplier, witnessing the optimum

    def to_jsonable(self):
        from .rat import format_rational
        return {
            "lp_value": format_rational(self.lp_value),
            "phi_value": format_rational(self.phi_value),
            "defect": format_rational(self.defect),
            "measure": {"atoms": [[p, format_rational(w)]
                                  for p, w in sorted(self.measure.items())]},
            "cover": [[sorted(s), format_rational(w)]
                      for s, w in sorted(self.cover.items(),
                                         key=lambda kv: sorted(kv[0]))],
        }


def nonpathology_defect(table: FiniteTable, a) -> NonpathReport:
    """Gap between phi(a) and the best dominated-measure mass on a (0 iff
    phi is non-pathological at a)."""
    if not isinstance(table, FiniteTable):
        raise ValidationError("non-pathology check needs a finite table")
    pts = _as_points(a)
    table.mask_of(pts)  # raises OutOfGround if a escapes the ground
    from .lp import dominated_measure_max
    lp_value, mu, cover = dominated_measure_max(table.subset_dict(),
                                                table.ground, set(pts))
    phi_value = table.value_of(pts)
    if lp_value > phi_value:
        raise ValidationError("LP value exceeded the submeasure value")
    return NonpathReport(lp_value=lp_value, phi_value=phi_value,
                         defect=phi_value - lp_value, measure=mu, cover=cover)
