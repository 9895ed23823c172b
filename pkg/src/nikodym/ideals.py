"""Ideals on the naturals and a certified three-valued membership oracle.

An ideal here is the family of sets whose tail mass under a submeasure tends
to zero.  Membership answers In / NotIn / Undetermined: In and NotIn always
carry machine-checkable certificates, everything outside the closed-form rule
table is reported Undetermined together with an exact evaluation trace.  The
contains_pf flag on a set spec is irrelevant to ideal membership (ideals live
on the naturals) and is ignored here.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (ValidationError, EvalError, MagnitudeOverflow,
                     NonPositiveValue, NotBlockStructured, InconsistentVerdicts,
                     OutOfGround)
from .rat import format_rational
from .expr import (Expr, Env, EMPTY_ENV, render, eval_expr,
                   eval_int, subst_var, merge_envs)
from .asymptotics import (Bounds, Ratio, expr_to_bounds, sign_eventually,
                          eventually_ge, series_class, UnsupportedAsymptotics)
from .sets import (SetSpec, IntervalUnion, IntervalRule, BlockSelect,
                   Complement, Union, Intersect, ScanLimit, is_finite_with_bound)
from .blocks import BlockGenerator, UniformBlocks, phi_blocks
from .submeasures import (SubmeasureSpec, DensitySubmeasure, SummableSubmeasure,
                          MaxMerge, FiniteTable, eval_submeasure)

IN = "In"
NOT_IN = "NotIn"
UNDETERMINED = "Undetermined"

DEFAULT_HORIZON = 64
DEFAULT_TOLERANCE = Fraction(1, 10 ** 6)

_ZERO_SCAN_CAP = 1 << 16
_CROSSING_TARGETS = (Fraction(1), Fraction(2), Fraction(3))
_CROSSING_CAP = 50000


# ---------------------------------------------------------------------- specs

class IdealSpec:
    """Marker base for ideal specifications."""

    kind = "ideal"


@dataclass(frozen=True)
class ExhIdeal(IdealSpec):
    """Sets whose submeasure tail mass tends to zero."""

    submeasure: SubmeasureSpec
    kind: str = "exh"


@dataclass(frozen=True)
class PhiOfIdeal(IdealSpec):
    """Exhaustive ideal of the canonical block family built from f.

    Block n carries n*f(n) consecutive points of weight 1/f(n); f(n) must be
    at least 1 for every n >= 1 (checked up to the working horizon).
    """

    f: Expr
    env: Env = field(default_factory=lambda: EMPTY_ENV)
    kind: str = "phi_of"

    def generator(self) -> UniformBlocks:
        return phi_blocks(self.f, self.env)


@dataclass(frozen=True)
class SimpleDensityIdeal(IdealSpec):
    """Sets whose initial-segment count grows slower than the scale g.

    Membership semantics: |x intersect [0, n)| / g(n) tends to zero.
    """

    g: Expr
    env: Env = field(default_factory=lambda: EMPTY_ENV)
    kind: str = "simple_density"

    def scale_at(self, n: int) -> Fraction:
        v = eval_expr(self.g, n, self.env)
        if v <= 0:
            raise NonPositiveValue("scale g", n, v)
        return v


def summable_ideal(weight: Expr, env: Env = EMPTY_ENV) -> ExhIdeal:
    """Sugar: the ideal of sets with convergent weight sum."""
    return ExhIdeal(SummableSubmeasure(weight=weight, env=env))


def check_block_scale(f: Expr, env: Env, horizon: int) -> None:
    """f(n) >= 1 for 1 <= n <= horizon, else NonPositiveValue."""
    for n in range(1, max(2, min(horizon, DEFAULT_HORIZON) + 1)):
        v = eval_expr(f, n, env)
        if v < 1:
            raise NonPositiveValue("block scale f", n, v)


def generator_of(ideal, horizon: int = DEFAULT_HORIZON) -> BlockGenerator:
    """Block family underlying a block-structured ideal."""
    if isinstance(ideal, ExhIdeal):
        sub = ideal.submeasure
        if sub.kind in ("density", "asymptotic_density"):
            return sub.generator
        raise NotBlockStructured(f"exh({sub.kind}) has no block family")
    if isinstance(ideal, PhiOfIdeal):
        check_block_scale(ideal.f, ideal.env, horizon)
        return ideal.generator()
    raise NotBlockStructured(f"{getattr(ideal, 'kind', type(ideal).__name__)}"
                             " has no block family")


# ------------------------------------------------------------------- verdicts

@dataclass
class MembershipVerdict:
    verdict: str            # In | NotIn | Undetermined
    evidence: dict
    trace: Optional[list] = None       # list of (index, Fraction)

    @property
    def is_in(self) -> bool:
        return self.verdict == IN

    @property
    def is_notin(self) -> bool:
        return self.verdict == NOT_IN

    @property
    def certified(self) -> bool:
        return self.verdict in (IN, NOT_IN)

    def to_jsonable(self) -> dict:
        out = {"verdict": self.verdict, "evidence": _jsonify(self.evidence)}
        if self.trace is not None:
            out["trace"] = [[n, format_rational(v)] for n, v in self.trace]
        return out


def _jsonify(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, Expr):
        return render(v)
    if isinstance(v, dict):
        return {str(k): _jsonify(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonify(x) for x in v]
    if isinstance(v, MembershipVerdict):
        return v.to_jsonable()
    return v


# --------------------------------------------------------------- block traces

def block_values(ideal, x: SetSpec, horizon: int) -> list:
    """Exact per-block values of x, first `horizon` block indices.

    For the simple-density form the n-th value is the initial-segment count
    divided by the scale.  Summable / table forms have no block trace.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    if isinstance(ideal, SimpleDensityIdeal):
        return [(n, Fraction(x.count_in(0, n)) / ideal.scale_at(n))
                for n in range(1, horizon + 1)]
    gen = generator_of(ideal, horizon)
    return _trace(gen, x, horizon)


def _trace(gen: BlockGenerator, x: SetSpec, horizon: int) -> list:
    out = []
    for n in gen.indices():
        if len(out) >= horizon:
            break
        try:
            out.append((n, gen.block_value(n, x)))
        except ScanLimit:
            # deep blocks of rule-generated sets can exceed the interval
            # scan cap; the trace is diagnostic, so stop extending it
            break
    return out


def _zero_from(gen: BlockGenerator, bound: int) -> Optional[int]:
    """Least block index whose span starts at or beyond `bound`."""
    seen = 0
    for n in gen.indices():
        a, _ = gen.block_interval(n)
        if a >= bound:
            return n
        seen += 1
        if seen >= _ZERO_SCAN_CAP:
            return None
    return (gen.last_index + 1) if gen.last_index is not None else None


# ------------------------------------------------- closed-form density bounds

def _ratio_le(a: Ratio, b: Ratio) -> Optional[int]:
    """Threshold from which a(n) <= b(n), or None if not certifiable."""
    try:
        s, thr = sign_eventually(b.sub(a))
    except UnsupportedAsymptotics:
        return None
    return thr if s >= 0 else None


def _expr_bounds(e: Expr, env: Env) -> Optional[Bounds]:
    if env is None:
        return None
    return expr_to_bounds(e, env)


def _value_bounds(gen, x: SetSpec, depth: int = 0):
    """Certified sandwich for the per-block values of x, or None.

    Returns (Bounds, description) valid for block indices n >= Bounds.n0.
    Only uniform generators have symbolic start/length/weight to work with.
    """
    if depth > 8 or not isinstance(gen, UniformBlocks):
        return None
    fin, bnd = is_finite_with_bound(x)
    if fin:
        z = _zero_from(gen, bnd)
        if z is None:
            return None
        zero = Bounds(Ratio.const(0), Ratio.const(0), max(z, 1), True)
        return zero, {"route": "finite-tail-zero", "zero_from": z}
    if isinstance(x, BlockSelect) and x.generator == gen:
        return _select_bounds(gen, x)
    if isinstance(x, IntervalUnion) and x.rule is not None:
        static_max = max((b for _, b in x.intervals), default=0)
        return _aligned_rule_bounds(gen, x.rule, static_max)
    if isinstance(x, Complement):
        return _complement_bounds(gen, x, depth)
    if isinstance(x, Union):
        return _union_bounds(gen, x, depth)
    if isinstance(x, Intersect):
        for side, other in ((x.left, x.right), (x.right, x.left)):
            if side.kind == "omega":
                return _value_bounds(gen, other, depth + 1)
            fin, bnd = is_finite_with_bound(side)
            if fin:
                z = _zero_from(gen, bnd)
                if z is None:
                    return None
                zero = Bounds(Ratio.const(0), Ratio.const(0), max(z, 1), True)
                return zero, {"route": "finite-tail-zero", "zero_from": z}
        return None
    return None


def _select_bounds(gen: UniformBlocks, x: BlockSelect):
    env = merge_envs(x.env, gen.env)
    if env is None:
        return None
    bc = _expr_bounds(x.count, env)
    bl = _expr_bounds(gen.length, env)
    if bc is None or bl is None:
        return None
    thr = _ratio_le(bc.hi, bl.lo)
    if thr is not None:
        vexpr = Expr("op", name="mul", args=(gen.weight, x.count))
        resolved = "count"
    else:
        thr = _ratio_le(bl.hi, bc.lo)
        if thr is None:
            return None
        vexpr = Expr("op", name="mul", args=(gen.weight, gen.length))
        resolved = "length"
    vb = _expr_bounds(vexpr, env)
    if vb is None:
        return None
    n0 = max(vb.n0, thr, bc.n0, bl.n0, gen.first_index)
    vb = Bounds(vb.lo, vb.hi, n0, vb.exact)
    desc = {"route": "block-select", "value_expr": vexpr,
            "min_resolved": resolved, "valid_from": n0}
    return vb, desc


def _aligned_rule_bounds(gen: UniformBlocks, rule: IntervalRule,
                         static_max: int):
    """Value bounds when each rule interval sits inside its own block."""
    env = merge_envs(rule.env, gen.env)
    if env is None:
        return None
    offset = None
    for k in range(rule.index_from, rule.index_from + 4):
        try:
            a = eval_int(rule.lower, k, rule.env)
            b = eval_int(rule.upper, k, rule.env)
        except (EvalError, MagnitudeOverflow, ZeroDivisionError):
            return None
        if b <= a:
            return None
        m = gen.locate_point(a)
        if m is None:
            return None
        if offset is None:
            offset = m - k
        elif m - k != offset:
            return None
    kvar = (Expr("op", name="sub", args=(Expr("var"), _const(offset)))
            if offset >= 0
            else Expr("op", name="add", args=(Expr("var"), _const(-offset))))
    low_k = subst_var(rule.lower, kvar)
    up_k = subst_var(rule.upper, kvar)
    b_start = _expr_bounds(gen.start, env)
    b_low = _expr_bounds(low_k, env)
    end = Expr("op", name="add", args=(gen.start, gen.length))
    b_end = _expr_bounds(end, env)
    b_up = _expr_bounds(up_k, env)
    if None in (b_start, b_low, b_end, b_up):
        return None
    thr_a = _ratio_le(b_start.hi, b_low.lo)
    thr_b = _ratio_le(b_up.hi, b_end.lo)
    if thr_a is None or thr_b is None:
        return None
    vexpr = Expr("op", name="mul",
                 args=(gen.weight, Expr("op", name="sub", args=(up_k, low_k))))
    vb = _expr_bounds(vexpr, env)
    if vb is None:
        return None
    n0 = max(vb.n0, thr_a, thr_b, rule.index_from + max(offset, 0),
             gen.first_index)
    # intervals indexed below the certified region may spill anywhere; push
    # n0 past the furthest point they can reach, and past the static part
    k_hi = n0 - offset
    if k_hi - rule.index_from > 4096:
        return None
    reach = static_max
    for k in range(rule.index_from, k_hi):
        try:
            reach = max(reach, eval_int(rule.upper, k, rule.env))
        except (EvalError, MagnitudeOverflow, ZeroDivisionError):
            return None
    z = _zero_from(gen, reach)
    if z is None:
        return None
    n0 = max(n0, z)
    vb = Bounds(vb.lo, vb.hi, n0, vb.exact)
    desc = {"route": "aligned-rule", "offset": offset, "value_expr": vexpr,
            "valid_from": n0}
    return vb, desc


def _complement_bounds(gen: UniformBlocks, x: Complement, depth: int):
    inner = _value_bounds(gen, x.inner, depth + 1)
    if inner is None:
        return None
    ib, idesc = inner
    norm = Expr("op", name="mul", args=(gen.length, gen.weight))
    nb = _expr_bounds(norm, gen.env)
    if nb is None:
        return None
    lo = nb.lo.sub(ib.hi)
    hi = nb.hi.sub(ib.lo)
    n0 = max(nb.n0, ib.n0)
    vb = Bounds(lo, hi, n0, nb.exact and ib.exact)
    desc = {"route": "complement", "inner": idesc, "valid_from": n0}
    return vb, desc


def _union_bounds(gen: UniformBlocks, x: Union, depth: int):
    left = _value_bounds(gen, x.left, depth + 1)
    right = _value_bounds(gen, x.right, depth + 1)
    if left is None or right is None:
        return None
    lb, ldesc = left
    rb, rdesc = right
    hi = lb.hi.add(rb.hi)
    # the union dominates each side; keep the side with the larger floor
    lo = lb.lo
    try:
        s, _ = sign_eventually(rb.lo.sub(lb.lo))
        if s > 0:
            lo = rb.lo
    except UnsupportedAsymptotics:
        pass
    n0 = max(lb.n0, rb.n0)
    vb = Bounds(lo, hi, n0, False)
    desc = {"route": "union", "left": ldesc, "right": rdesc, "valid_from": n0}
    return vb, desc


def _const(k) -> Expr:
    return Expr("const", value=Fraction(k))


# ----------------------------------------------------------- density verdicts

def _check_trace_against_bounds(trace, bounds: Bounds) -> list:
    """Exact trace points must sit inside the certified sandwich."""
    checked = []
    usable = [(n, v) for n, v in trace if n >= bounds.n0]
    for n, v in usable[-4:]:
        try:
            lo = bounds.lo.eval(n)
            hi = bounds.hi.eval(n)
        except (MagnitudeOverflow, ZeroDivisionError, ValueError):
            continue
        if not (lo <= v <= hi):
            raise InconsistentVerdicts(
                f"trace value {v} at block {n} escapes certified "
                f"bounds [{lo}, {hi}]")
        checked.append(n)
    return checked


def _choose_epsilon(bounds: Bounds, lim) -> tuple:
    """(epsilon, threshold) with block values >= epsilon for n >= threshold."""
    if lim.kind == "pinf":
        cands = [Fraction(1)]
    else:
        cands = [lim.value, lim.value / 2]
    for c in cands:
        if c <= 0:
            continue
        thr = eventually_ge(bounds.lo, c)
        if thr is not None:
            return c, max(thr, bounds.n0)
    return None, None


def _density_membership(gen: BlockGenerator, x: SetSpec, horizon: int,
                        tolerance: Fraction) -> MembershipVerdict:
    if gen.last_index is not None:
        # finitely many blocks: every tail value is eventually zero
        return MembershipVerdict(IN, {
            "rule": "finitely-many-blocks",
            "last_block": gen.last_index,
            "tail_certified": True,
        }, _trace(gen, x, horizon))
    trace = _trace(gen, x, horizon)
    got = _value_bounds(gen, x)
    if got is not None:
        bounds, desc = got
        checked = _check_trace_against_bounds(trace, bounds)
        lim = bounds.limit()
        if lim is not None and lim.kind == "finite" and lim.value == 0:
            ev = {"rule": "closed-form-limit", "limit": Fraction(0),
                  "valid_from": bounds.n0, "tail_certified": True,
                  "trace_checked_at": checked}
            ev.update({k: v for k, v in desc.items() if k != "valid_from"})
            return MembershipVerdict(IN, ev, trace)
        lo_lim = bounds.lo.limit()
        positive = lo_lim.kind == "pinf" or (lo_lim.kind == "finite"
                                             and lo_lim.value > 0)
        if positive:
            eps, thr = _choose_epsilon(bounds, lo_lim)
            if eps is not None:
                witnesses = _notin_witnesses(gen, x, thr, eps)
                ev = {"rule": "eventually-above", "epsilon": eps,
                      "threshold": thr, "indices": witnesses}
                ev.update({k: v for k, v in desc.items()
                           if k != "valid_from"})
                return MembershipVerdict(NOT_IN, ev, trace)
    reason = {"reason": "outside-closed-form-rules"}
    if trace:
        tail = trace[-1][1]
        reason["last_value"] = tail
        reason["below_tolerance"] = bool(tail < tolerance)
    return MembershipVerdict(UNDETERMINED, reason, trace)


def _notin_witnesses(gen: BlockGenerator, x: SetSpec, thr: int,
                     eps: Fraction) -> list:
    out = []
    n = max(thr, gen.first_index)
    while len(out) < 3:
        v = gen.block_value(n, x)
        if v < eps:
            raise InconsistentVerdicts(
                f"certified floor {eps} violated at block {n}: value {v}")
        out.append((n, v))
        n += 1
    return out


# ----------------------------------------------------------- summable route

def _segments_of(x: SetSpec, base_env: Env, depth: int = 0):
    """Symbolic segment plan (lower, count, env, k0, static_bound) or None.

    Segment k of x occupies [lower(k), lower(k) + count(k)) for k >= k0,
    with at most `static_bound` extra mass sitting below a fixed point.
    """
    if depth > 4:
        return None
    if isinstance(x, IntervalUnion) and x.rule is not None:
        r = x.rule
        env = merge_envs(r.env, base_env)
        if env is None:
            return None
        count = Expr("op", name="sub", args=(r.upper, r.lower))
        static_max = max((b for _, b in x.intervals), default=0)
        return r.lower, count, env, r.index_from, static_max
    if isinstance(x, BlockSelect) and isinstance(x.generator, UniformBlocks):
        gen = x.generator
        env = merge_envs(x.env, gen.env)
        if env is None:
            return None
        bc = _expr_bounds(x.count, env)
        bl = _expr_bounds(gen.length, env)
        if bc is None or bl is None:
            return None
        if _ratio_le(bc.hi, bl.lo) is not None:
            count = x.count
        elif _ratio_le(bl.hi, bc.lo) is not None:
            count = gen.length
        else:
            return None
        if x.mode == "first":
            lower = gen.start
        else:
            lower = Expr("op", name="sub", args=(
                Expr("op", name="add", args=(gen.start, gen.length)), count))
        return lower, count, env, gen.first_index, 0
    if isinstance(x, Union):
        for side, other in ((x.left, x.right), (x.right, x.left)):
            fin, bnd = is_finite_with_bound(side)
            if fin:
                plan = _segments_of(other, base_env, depth + 1)
                if plan is None:
                    return None
                lower, count, env, k0, static = plan
                return lower, count, env, k0, max(static, bnd)
        return None
    return None


def _antitone_threshold(w: Expr, env: Env) -> Optional[int]:
    """Threshold from which the weight is nonincreasing, or None."""
    bw = _expr_bounds(w, env)
    shifted = subst_var(w, Expr("op", name="add",
                                args=(Expr("var"), _const(1))))
    bw1 = _expr_bounds(shifted, env)
    if bw is None or bw1 is None:
        return None
    thr = _ratio_le(bw1.hi, bw.lo)
    if thr is None:
        return None
    return max(thr, bw.n0, bw1.n0)


def _summable_membership(phi: SummableSubmeasure, x: SetSpec, horizon: int,
                         tolerance: Fraction) -> MembershipVerdict:
    trace = _prefix_trace(phi, x, horizon)
    plan = _segments_of(x, phi.env)
    if plan is not None:
        verdict = _summable_closed_form(phi, plan, trace, horizon)
        if verdict is not None:
            return verdict
    reason = {"reason": "outside-closed-form-rules"}
    if trace:
        reason["prefix_sum"] = trace[-1][1]
    return MembershipVerdict(UNDETERMINED, reason, trace)


def _summable_closed_form(phi: SummableSubmeasure, plan, trace, horizon):
    lower, count, env, k0, static = plan
    t_w = _antitone_threshold(phi.weight, env)
    if t_w is None:
        return None
    b_low = _expr_bounds(lower, env)
    if b_low is None:
        return None
    # weight monotonicity is used at arguments lower(k) and beyond
    k_start = eventually_ge(b_low.lo, Fraction(t_w))
    if k_start is None:
        return None
    k_start = max(k_start, k0, b_low.n0)
    w_first = subst_var(phi.weight, lower)
    hi_expr = Expr("op", name="mul", args=(count, w_first))
    last = Expr("op", name="sub", args=(
        Expr("op", name="add", args=(lower, count)), _const(1)))
    w_last = subst_var(phi.weight, last)
    lo_expr = Expr("op", name="mul", args=(count, w_last))
    bh = _expr_bounds(hi_expr, env)
    if bh is not None:
        res, ev = series_class(bh.hi)
        if res == "converges":
            return MembershipVerdict(IN, {
                "rule": "dominated-tail", "series": ev,
                "segment_bound_expr": hi_expr,
                "antitone_from": t_w, "segments_from": k_start,
                "tail_certified": True,
            }, trace)
    bl = _expr_bounds(lo_expr, env)
    if bl is not None:
        res, ev = series_class(bl.lo)
        if res == "diverges":
            crossings = _sum_crossings(lo_expr, env, max(k_start, bl.n0))
            if crossings is not None:
                return MembershipVerdict(NOT_IN, {
                    "rule": "divergent-tail", "series": ev,
                    "epsilon": Fraction(1),
                    "segment_floor_expr": lo_expr,
                    "antitone_from": t_w,
                    "crossings": crossings,
                }, trace)
    return None


def _sum_crossings(lo_expr: Expr, env: Env, k_start: int):
    """Partial sums of the certified per-segment floors crossing 1, 2, 3.

    Each floor is rounded down to 64 dyadic digits before accumulating, so
    the running sum stays small while remaining a valid lower bound.
    """
    scale = 1 << 64
    total = Fraction(0)
    out = []
    targets = list(_CROSSING_TARGETS)
    k = k_start
    for _ in range(_CROSSING_CAP):
        if not targets:
            break
        try:
            v = eval_expr(lo_expr, k, env)
        except (EvalError, MagnitudeOverflow, ZeroDivisionError):
            return None
        if v > 0:
            total += Fraction((v.numerator * scale) // v.denominator, scale)
        while targets and total > targets[0]:
            out.append((targets.pop(0), k, total))
            if len(out) == len(_CROSSING_TARGETS):
                return out
        k += 1
    return out if len(out) == len(_CROSSING_TARGETS) else None


def _prefix_trace(phi: SummableSubmeasure, x: SetSpec, horizon: int) -> list:
    """(point, running weight sum) over the first `horizon` points of x."""
    pts = []
    hi = 64
    while True:
        try:
            pts = list(x.points_in(0, hi))
        except ScanLimit:
            break
        if len(pts) >= horizon or hi > (1 << 40):
            break
        hi *= 64
    out = []
    total = Fraction(0)
    for p in pts[:horizon]:
        total += phi.weight_at(p)
        out.append((p, total))
    return out


# ------------------------------------------------------------- entry points

def _submeasure_membership(phi: SubmeasureSpec, x: SetSpec, horizon: int,
                           tolerance: Fraction) -> MembershipVerdict:
    fin, bnd = is_finite_with_bound(x)
    if fin:
        ev = {"rule": "finite-set", "tail_certified": True}
        try:
            pts = list(x.points_in(0, bnd))
            ev["value"] = eval_submeasure(phi, pts)
        except (ScanLimit, OutOfGround, ValidationError):
            pass
        return MembershipVerdict(IN, ev)
    kind = phi.kind
    if kind in ("density", "asymptotic_density"):
        return _density_membership(phi.generator, x, horizon, tolerance)
    if kind == "summable":
        return _summable_membership(phi, x, horizon, tolerance)
    if kind == "max_merge":
        return _merge_membership(phi, x, horizon, tolerance)
    if kind == "finite_table":
        top = max(phi.ground) + 1 if phi.ground else 0
        return MembershipVerdict(IN, {
            "rule": "finite-ground", "ground_bound": top,
            "tail_certified": True,
        })
    raise ValidationError(f"unknown submeasure kind {kind!r}")


def _merge_membership(phi: MaxMerge, x: SetSpec, horizon: int,
                      tolerance: Fraction) -> MembershipVerdict:
    vl = _submeasure_membership(phi.left, x, horizon, tolerance)
    vr = _submeasure_membership(phi.right, x, horizon, tolerance)
    if vl.is_in and vr.is_in:
        return MembershipVerdict(IN, {
            "rule": "max-conjunction",
            "left": vl.evidence, "right": vr.evidence,
            "tail_certified": bool(vl.evidence.get("tail_certified")
                                   and vr.evidence.get("tail_certified")),
        }, vl.trace)
    for side, v, other in (("left", vl, vr), ("right", vr, vl)):
        if v.is_notin:
            ev = dict(v.evidence)
            ev["side_rule"] = ev.get("rule")
            ev["rule"] = "max-dominates-side"
            ev["side"] = side
            return MembershipVerdict(NOT_IN, ev, v.trace)
    ev = {"reason": "side-undetermined",
          "left": vl.to_jsonable(), "right": vr.to_jsonable()}
    return MembershipVerdict(UNDETERMINED, ev, vl.trace or vr.trace)


def _simple_density_membership(ideal: SimpleDensityIdeal, x: SetSpec,
                               horizon: int,
                               tolerance: Fraction) -> MembershipVerdict:
    trace = block_values(ideal, x, horizon)
    bg = _expr_bounds(ideal.g, ideal.env)
    unbounded = False
    if bg is not None:
        lim = bg.lo.limit()
        unbounded = lim.kind == "pinf"
    fin, bnd = is_finite_with_bound(x)
    if fin:
        if unbounded:
            return MembershipVerdict(IN, {
                "rule": "finite-set", "count_bound": x.count_in(0, bnd),
                "scale_unbounded_from": bg.n0, "tail_certified": True,
            }, trace)
        return MembershipVerdict(UNDETERMINED, {
            "reason": "scale-not-certified-unbounded"}, trace)
    # the whole prefix has at most n points; a superlinear scale absorbs it
    full = Expr("op", name="div", args=(Expr("var"), ideal.g))
    bf = _expr_bounds(full, ideal.env)
    if bf is not None:
        lim = bf.limit()
        if lim is not None and lim.kind == "finite" and lim.value == 0:
            return MembershipVerdict(IN, {
                "rule": "scale-dominates-full-prefix",
                "valid_from": bf.n0, "tail_certified": True,
            }, trace)
    return MembershipVerdict(UNDETERMINED, {
        "reason": "outside-closed-form-rules"}, trace)


def membership(ideal, x: SetSpec, horizon: int = DEFAULT_HORIZON,
               tolerance: Fraction = DEFAULT_TOLERANCE) -> MembershipVerdict:
    """Three-valued certified membership of x in the ideal."""
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    if tolerance <= 0:
        raise ValidationError("tolerance must be positive")
    if isinstance(ideal, ExhIdeal):
        return _submeasure_membership(ideal.submeasure, x, horizon, tolerance)
    if isinstance(ideal, PhiOfIdeal):
        check_block_scale(ideal.f, ideal.env, horizon)
        sub = DensitySubmeasure(ideal.generator())
        return _submeasure_membership(sub, x, horizon, tolerance)
    if isinstance(ideal, SimpleDensityIdeal):
        return _simple_density_membership(ideal, x, horizon, tolerance)
    raise ValidationError(f"not an ideal spec: {type(ideal).__name__}")


# ------------------------------------------------------------------- probing

@dataclass
class ProbeReport:
    entries: list
    violations: list

    def to_jsonable(self) -> dict:
        return {
            "entries": [{
                "test": e["test"], "kind": e["kind"],
                "psi": e["psi"].to_jsonable(),
                "phi": e["phi"].to_jsonable(),
                "merged": e["merged"].to_jsonable(),
            } for e in self.entries],
            "violations": list(self.violations),
        }


def max_merge_exh_probe(psi: SubmeasureSpec, phi: SubmeasureSpec, tests,
                        horizon: int = DEFAULT_HORIZON,
                        tolerance: Fraction = DEFAULT_TOLERANCE) -> ProbeReport:
    """Pointwise-max conjunction probe over a list of test sets.

    For each test set reports membership under both sides and under their
    pointwise max, then checks: In + In forces In under the max, and In under
    the max forces In under each side.  Certified violations are engine bugs.
    """
    merged = MaxMerge(psi, phi)
    entries = []
    violations = []
    for i, t in enumerate(tests):
        vp = _submeasure_membership(psi, t, horizon, tolerance)
        vf = _submeasure_membership(phi, t, horizon, tolerance)
        vm = _submeasure_membership(merged, t, horizon, tolerance)
        if vp.is_in and vf.is_in and not vm.is_in:
            violations.append(f"test {i}: In + In did not give In on the max")
        for name, v in (("left", vp), ("right", vf)):
            if vm.is_in and v.is_notin:
                violations.append(
                    f"test {i}: In on the max with NotIn on {name}")
        entries.append({"test": i, "kind": t.kind,
                        "psi": vp, "phi": vf, "merged": vm})
    report = ProbeReport(entries, violations)
    if violations:
        raise InconsistentVerdicts("; ".join(violations))
    return report
