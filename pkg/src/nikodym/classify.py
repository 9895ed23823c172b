"""Classification of block and weight ideals against the anti-vanishing class.

A block family lands in the class when its variation norms certifiably grow
without bound, or when its largest atoms certifiably stay away from zero;
it certifiably misses the class when the norms stay bounded and the atoms
vanish.  Weight families with divergent total weight always land in the
class.  Certified verdicts come only from the closed-form rule table; raw
prefixes yield Undetermined with their traces attached.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (ValidationError, NotAnIdeal, ConditionFails,
                     UnsupportedAsymptotics)
from .rat import format_rational
from .expr import Expr, Env, EMPTY_ENV, render, eval_expr, eval_int, subst_var
from .asymptotics import expr_to_bounds, sign_eventually, series_class
from .blocks import BlockGenerator, UniformBlocks
from .submeasures import (SubmeasureSpec, DensitySubmeasure,
                          SummableSubmeasure, MaxMerge, FiniteTable,
                          unboundedness_check)

IN_AN = "InAN"
NOT_IN_AN = "NotInAN"
UNDETERMINED = "Undetermined"

UNBOUNDED_NORMS = "UnboundedNorms"
ATOMS_DO_NOT_VANISH = "AtomsDoNotVanish"
BOTH_CONDITIONS_HOLD = "BothConditionsHold"
SUMMABLE_ALWAYS_AN = "SummableAlwaysAN"
UNBOUNDED_SUBMEASURE = "UnboundedSubmeasure"

# consequences are entailed by the verdict, never computed separately
_NOT_IN_AN_CONSEQUENCES = [
    "totally-bounded-submeasure",
    "two-way-reducible-with-the-canonical-density-ideal",
    "countable-splitting-family-on-the-quotient",
]
_IN_AN_CONSEQUENCES = [
    "submeasure-not-totally-bounded",
    "not-two-way-reducible-with-the-canonical-density-ideal",
    "no-countable-splitting-family-on-the-quotient",
]


@dataclass
class ClassificationVerdict:
    verdict: str
    reason: Optional[str]
    evidence: dict
    consequences: list = field(default_factory=list)
    trace: Optional[dict] = None

    def to_jsonable(self):
        out = {"verdict": self.verdict, "reason": self.reason,
               "evidence": self.evidence,
               "consequences": list(self.consequences)}
        if self.trace is not None:
            out["trace"] = self.trace
        return out


def _limit_facts(e: Expr, env: Env) -> dict:
    """Certified facts about a positive-valued block expression."""
    out = {"expr": render(e)}
    b = expr_to_bounds(e, env)
    if b is None:
        out["certified"] = False
        return out
    out["certified"] = True
    lo, hi = b.lo.limit(), b.hi.limit()
    out["valid_from"] = b.n0
    out["unbounded"] = lo.kind == "pinf"
    out["bounded"] = hi.kind == "finite"
    if hi.kind == "finite":
        out["upper_limit"] = format_rational(hi.value)
    out["vanishes"] = hi.kind == "finite" and hi.value == 0
    out["stays_positive"] = (lo.kind == "pinf"
                             or (lo.kind == "finite" and lo.value > 0))
    if lo.kind == "finite":
        out["lower_limit"] = format_rational(lo.value)
    return out


def _generator_trace(gen: BlockGenerator, horizon: int):
    norms, atoms = [], []
    for n in gen.indices():
        if n > horizon or len(norms) >= horizon:
            break
        norms.append([n, format_rational(gen.block_norm(n))])
        try:
            atoms.append([n, format_rational(gen.block_measure(n).at_plus())])
        except Exception:
            atoms.append([n, None])
    return {"norms": norms, "largest_atoms": atoms}


def classify_density(gen: BlockGenerator, horizon: int = 64,
                     ) -> ClassificationVerdict:
    """Anti-vanishing classification of a block family.

    Order of tests: certified unbounded norms first, then certified
    non-vanishing largest atoms; the negative verdict needs both bounded
    norms and vanishing atoms certified.  All certificates come from the
    closed-form bounds of the family's norm and weight expressions.
    """
    norm_facts = {"certified": False}
    atom_facts = {"certified": False}
    if isinstance(gen, UniformBlocks):
        norm_expr = Expr("op", name="mul", args=(gen.length, gen.weight))
        norm_facts = _limit_facts(norm_expr, gen.env)
        # uniform blocks: every atom equals the block weight
        atom_facts = _limit_facts(gen.weight, gen.env)
    evidence = {"norms": norm_facts, "largest_atoms": atom_facts}
    if norm_facts.get("unbounded"):
        return ClassificationVerdict(IN_AN, UNBOUNDED_NORMS, evidence,
                                     _IN_AN_CONSEQUENCES)
    if atom_facts.get("stays_positive"):
        return ClassificationVerdict(IN_AN, ATOMS_DO_NOT_VANISH, evidence,
                                     _IN_AN_CONSEQUENCES)
    if norm_facts.get("bounded") and atom_facts.get("vanishes"):
        return ClassificationVerdict(NOT_IN_AN, BOTH_CONDITIONS_HOLD,
                                     evidence, _NOT_IN_AN_CONSEQUENCES)
    return ClassificationVerdict(UNDETERMINED, None, evidence, [],
                                 trace=_generator_trace(gen, min(horizon, 24)))


def classify_summable(weight: Expr, env: Env = EMPTY_ENV,
                      horizon: int = 64) -> ClassificationVerdict:
    """Weight families with divergent total weight are always in the class.

    The divergence must be certified (series comparison on the closed
    form); the returned evidence also carries the exact prefix on which the
    running total first exceeds 2.  Raises NotAnIdeal when the total weight
    certifiably converges, or when divergence cannot be certified.
    """
    for n in range(0, min(horizon, 64) + 1):
        v = eval_expr(weight, n, env)
        if v < 0:
            raise ValidationError(f"weight({n}) = {v} is negative")
    b = expr_to_bounds(weight, env)
    if b is None:
        raise NotAnIdeal("weight outside the closed-form rule table; "
                         "divergence not certified")
    try:
        verdict, info = series_class(b.hi)
    except UnsupportedAsymptotics:
        verdict, info = "unknown", {}
    if verdict == "converges":
        raise NotAnIdeal(f"total weight certifiably converges "
                         f"({info.get('rule', 'series comparison')})")
    try:
        lo_verdict, lo_info = series_class(b.lo)
    except UnsupportedAsymptotics:
        lo_verdict, lo_info = "unknown", {}
    if lo_verdict != "diverges":
        raise NotAnIdeal("divergence not certified at this horizon")
    phi = SummableSubmeasure(weight=weight, env=env)
    ps = unboundedness_check(phi, Fraction(2), horizon)
    evidence = {
        "divergence": {"rule": lo_info.get("rule"),
                       "series_expr": render(weight)},
        "prefix_crossing": ps.to_jsonable(),
    }
    return ClassificationVerdict(IN_AN, SUMMABLE_ALWAYS_AN, evidence,
                                 _IN_AN_CONSEQUENCES)


def classify_submeasure(phi: SubmeasureSpec,
                        horizon: int = 64) -> ClassificationVerdict:
    """Dispatch on the submeasure's shape.

    Merges certify through a certified-unbounded side (the merge dominates
    it, so the merged submeasure is unbounded too); a bounded ground set
    never decides the class.
    """
    if isinstance(phi, DensitySubmeasure):
        return classify_density(phi.generator, horizon)
    if isinstance(phi, SummableSubmeasure):
        return classify_summable(phi.weight, phi.env, horizon)
    if isinstance(phi, MaxMerge):
        for side_name, side in (("left", phi.left), ("right", phi.right)):
            try:
                sub = classify_submeasure(side, horizon)
            except NotAnIdeal:
                continue
            if sub.verdict == IN_AN and sub.reason in (UNBOUNDED_NORMS,
                                                       SUMMABLE_ALWAYS_AN):
                return ClassificationVerdict(
                    IN_AN, UNBOUNDED_SUBMEASURE,
                    {"dominated_side": side_name,
                     "side_verdict": sub.to_jsonable()},
                    _IN_AN_CONSEQUENCES)
        return ClassificationVerdict(
            UNDETERMINED, None,
            {"note": "neither merged side certifies an unbounded "
                     "submeasure"}, [])
    if isinstance(phi, FiniteTable):
        return ClassificationVerdict(
            UNDETERMINED, None,
            {"note": "finite ground set; asymptotic class not applicable"},
            [])
    raise ValidationError(f"unknown submeasure kind {phi!r}")


# ------------------------------------------------------- simple density form

@dataclass
class SimpleDensityResult:
    status: str            # Match | Inconclusive
    g: Optional[dict]
    certificate: dict

    def to_jsonable(self):
        return {"status": self.status, "g": self.g,
                "certificate": self.certificate}


def _eventually_ge_shift(f: Expr, env: Env) -> Optional[int]:
    """Threshold from which f(n+1) >= f(n), or None."""
    b0 = expr_to_bounds(f, env)
    b1 = expr_to_bounds(subst_var(f, Expr("op", name="add",
                                          args=(Expr("var"),
                                                Expr("const",
                                                     value=Fraction(1))))),
                        env)
    if b0 is None or b1 is None:
        return None
    try:
        s, thr = sign_eventually(b1.lo.sub(b0.hi))
    except UnsupportedAsymptotics:
        return None
    if s >= 0:
        return max(thr, b0.n0, b1.n0)
    return None


def simple_density_check(f: Expr, env: Env = EMPTY_ENV,
                         horizon: int = 64) -> SimpleDensityResult:
    """Does the canonical family of f collapse to a simple density form?

    Needs f non-decreasing and the ratio of f(n) to the sum of all earlier
    values to grow without bound.  The positive route certifies the ratio
    from below by f(n) / (n * f(n-1)); the negative route bounds it above
    by f(n) / f(n-1).  A prefix index with f(n) at most the earlier sum is
    reported exactly; a certified bounded ratio without such an index is
    reported at the certificate's threshold.
    """
    values = {}
    running = 0
    violation = None
    for n in range(1, min(horizon, 64) + 1):
        v = eval_int(f, n, env)
        if v < 1:
            raise ValidationError(f"f({n}) = {v} must be at least 1")
        if n >= 2 and v <= running and violation is None:
            violation = n
        values[n] = v
        running += v
    if violation is not None:
        raise ConditionFails(violation,
                             f"(f({violation}) = {values[violation]} does "
                             f"not exceed the sum of earlier values)")
    mono_thr = _eventually_ge_shift(f, env)
    prefix_mono = all(values[n] <= values[n + 1]
                      for n in range(1, len(values)))
    shifted = subst_var(f, Expr("op", name="sub",
                                args=(Expr("var"),
                                      Expr("const", value=Fraction(1)))))
    lower = Expr("op", name="div",
                 args=(f, Expr("op", name="mul", args=(Expr("var"), shifted))))
    upper = Expr("op", name="div", args=(f, shifted))
    lb = expr_to_bounds(lower, env)
    ub = expr_to_bounds(upper, env)
    cert = {
        "monotone": {"certified_from": mono_thr, "prefix_ok": prefix_mono},
        "ratio_lower_expr": render(lower),
        "ratio_upper_expr": render(upper),
    }
    if (mono_thr is not None and lb is not None
            and lb.lo.limit().kind == "pinf"):
        cert["ratio"] = {"certified": True, "route": "lower-bound",
                         "valid_from": max(lb.n0, mono_thr, 2)}
        g = {
            "kind": "block-step",
            "description": "constant value f(n) on the n-th canonical block",
            "prefix": [[n, values[n]] for n in sorted(values)[:16]],
        }
        return SimpleDensityResult("Match", g, cert)
    if ub is not None:
        hi = ub.hi.limit()
        if hi.kind == "finite":
            cert["ratio"] = {"certified": True, "route": "upper-bound",
                             "upper_limit": format_rational(hi.value),
                             "valid_from": ub.n0}
            raise ConditionFails(max(ub.n0, 2),
                                 "(ratio certifiably bounded above)")
    cert["ratio"] = {"certified": False}
    trace = []
    run = 0
    for n in sorted(values):
        if n >= 2:
            trace.append([n, format_rational(Fraction(values[n], run))])
        run += values[n]
    cert["ratio_trace"] = trace[:16]
    return SimpleDensityResult("Inconclusive", None, cert)
