"""Sequences of finitely supported measures on the one-point extension.

Pipeline: verify the three anti-vanishing conditions (growing norms, total
mass to zero, variation to zero outside each sampled filter set), make the
supports pairwise disjoint and drop the extra-point atoms, convert between
signed and nonnegative forms, package a nonnegative disjoint sequence as a
block family, and extract such a sequence from an unbounded submeasure by
greedy prefix search.  Everything is exact; limit claims appear only when a
closed-form descriptor certifies them.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import (ValidationError, HasPFAtom, HorizonExhausted,
                     AllZeroPrefix, HypothesisFails, BoundedSubmeasure,
                     BlockTooLarge, InconsistentVerdicts)
from .rat import format_rational
from .expr import Expr, Env, EMPTY_ENV, parse_expr, const
from .asymptotics import expr_to_bounds, eventually_ge
from .measures import FinMeasure, PF
from .sets import (SetSpec, FiniteSet, IntervalUnion, Complement, BlockSelect,
                   omega_complement, is_finite_with_bound)
from .blocks import ExplicitBlocks
from .submeasures import (SubmeasureSpec, DensitySubmeasure, SummableSubmeasure,
                          eval_submeasure, interval_search, unboundedness_check)
from .ideals import (IdealSpec, ExhIdeal, membership, DEFAULT_HORIZON,
                     DEFAULT_TOLERANCE, generator_of)

PASS = "Pass"
FAIL = "Fail"
INCONCLUSIVE = "Inconclusive"


# ------------------------------------------------------------------ sequences

@dataclass
class MeasureSeq:
    """Lazy index -> measure sequence with an optional closed-form descriptor.

    The descriptor is a dict of s-expressions (strings or Expr) describing
    exact per-index facts: "norm" (variation norm), "total" (signed mass of
    the whole space), "support_min" (a lower bound on the smallest point of
    the support inside the naturals).  Descriptors are only used to certify
    trends; prefix values are always computed from the measures themselves.
    """

    fn: Callable[[int], FinMeasure]
    descriptor: Optional[dict] = None
    env: Env = field(default_factory=lambda: EMPTY_ENV)
    start: int = 0
    length: Optional[int] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def index_range(self, horizon: int):
        stop = self.start + horizon
        if self.length is not None:
            stop = min(stop, self.start + self.length)
        return range(self.start, stop)

    def at(self, n: int) -> FinMeasure:
        if n not in self._cache:
            m = self.fn(n)
            if not isinstance(m, FinMeasure):
                raise ValidationError(f"sequence element {n} is not a measure")
            self._cache[n] = m
        return self._cache[n]

    def prefix(self, horizon: int):
        return [(n, self.at(n)) for n in self.index_range(horizon)]

    def descriptor_expr(self, key: str) -> Optional[Expr]:
        if not self.descriptor or key not in self.descriptor:
            return None
        v = self.descriptor[key]
        return parse_expr(v) if isinstance(v, str) else v

    @classmethod
    def from_list(cls, measures, start: int = 0, descriptor=None,
                  env: Env = EMPTY_ENV) -> "MeasureSeq":
        ms = list(measures)
        return cls(fn=lambda n: ms[n - start], descriptor=descriptor, env=env,
                   start=start, length=len(ms))


# ------------------------------------------------------------ filter contexts

@dataclass
class FilterContext:
    """An ideal plus sampled dual-filter sets used as test clopen sets.

    Every sample's complement (within the naturals) is certified In the
    ideal before the context is handed out; `certificates` records the
    verdicts in sample order.
    """

    ideal: IdealSpec
    samples: list
    certificates: list
    horizon: int = DEFAULT_HORIZON
    log: dict = field(default_factory=dict)


def make_filter_context(ideal, samples, horizon: int = DEFAULT_HORIZON,
                        tolerance: Fraction = DEFAULT_TOLERANCE) -> FilterContext:
    """Certify and package explicit filter samples."""
    kept = []
    certs = []
    for i, a in enumerate(samples):
        v = membership(ideal, omega_complement(a), horizon, tolerance)
        if not v.is_in:
            raise ValidationError(
                f"sample {i}: complement not certified In ({v.verdict})")
        kept.append(a)
        certs.append(v)
    return FilterContext(ideal, kept, certs, horizon,
                         {"mode": "explicit", "samples": len(kept)})


def default_filter_context(ideal, horizon: int = DEFAULT_HORIZON,
                           extra=()) -> FilterContext:
    """Cofinite samples plus certified thin block selections, when available.

    Candidates whose complements cannot be certified In the ideal are
    dropped and recorded; user-supplied extras must certify.
    """
    candidates = [("cofinite-0..4", Complement(FiniteSet(tuple(range(5)))))]
    try:
        gen = generator_of(ideal, horizon)
        for label, cexpr in (("one-per-block", "1"), ("two-per-block", "2")):
            sel = BlockSelect(count=parse_expr(cexpr), mode="first",
                              generator=gen)
            candidates.append((f"co-{label}", Complement(sel)))
    except Exception:
        pass
    kept, certs, log = [], [], []
    for label, a in candidates:
        v = membership(ideal, omega_complement(a), horizon)
        if v.is_in:
            kept.append(a)
            certs.append(v)
            log.append({"candidate": label, "kept": True})
        else:
            log.append({"candidate": label, "kept": False,
                        "verdict": v.verdict})
    for i, a in enumerate(extra):
        v = membership(ideal, omega_complement(a), horizon)
        if not v.is_in:
            raise ValidationError(
                f"extra sample {i}: complement not certified In")
        kept.append(a)
        certs.append(v)
        log.append({"candidate": f"extra-{i}", "kept": True})
    return FilterContext(ideal, kept, certs, horizon,
                         {"mode": "default", "decisions": log})


def frechet_context(horizon: int = DEFAULT_HORIZON) -> FilterContext:
    """Cofinite filter: the dual ideal is the finite sets (unit weights)."""
    ideal = ExhIdeal(SummableSubmeasure(weight=parse_expr("1")))
    return default_filter_context(ideal, horizon)


# ------------------------------------------------------------------- reports

@dataclass
class ConditionVerdict:
    status: str                 # Pass | Fail | Inconclusive
    certified: bool = False
    witness: Optional[tuple] = None     # (index, value) for Fail
    detail: str = ""

    def to_jsonable(self):
        out = {"status": self.status, "certified": self.certified,
               "detail": self.detail}
        if self.witness is not None:
            out["witness"] = [self.witness[0], format_rational(self.witness[1])]
        return out


@dataclass
class ANReport:
    horizon: int
    norms: list
    totals: list
    variations: list            # per sample: list of (n, value)
    norms_grow: ConditionVerdict
    total_vanishes: ConditionVerdict
    tests_vanish: list          # per sample ConditionVerdict
    samples_kind: list

    @property
    def passes(self) -> bool:
        verdicts = [self.norms_grow, self.total_vanishes] + self.tests_vanish
        return all(v.status != FAIL for v in verdicts)

    def condition_summary(self):
        worst = PASS
        for v in self.tests_vanish:
            if v.status == FAIL:
                return FAIL
            if v.status == INCONCLUSIVE:
                worst = INCONCLUSIVE
        return worst

    def to_jsonable(self):
        return {
            "horizon": self.horizon,
            "passes": self.passes,
            "norms": [[n, format_rational(v)] for n, v in self.norms],
            "totals": [[n, format_rational(v)] for n, v in self.totals],
            "variations": [[[n, format_rational(v)] for n, v in tr]
                           for tr in self.variations],
            "conditions": {
                "norms_unbounded": self.norms_grow.to_jsonable(),
                "total_mass_vanishes": self.total_vanishes.to_jsonable(),
                "filter_tails_vanish": [v.to_jsonable()
                                        for v in self.tests_vanish],
            },
            "samples": self.samples_kind,
        }


def _cert_limit(e: Optional[Expr], env: Env, want: str) -> Optional[int]:
    """Threshold when the expression certifiably tends to 0 / infinity."""
    if e is None:
        return None
    b = expr_to_bounds(e, env)
    if b is None:
        return None
    if want == "zero":
        lim = b.limit()
        if lim is not None and lim.kind == "finite" and lim.value == 0:
            return b.n0
        return None
    lim = b.lo.limit()
    if lim.kind == "pinf":
        return b.n0
    return None


def _grow_verdict(trace, certified_from: Optional[int]) -> ConditionVerdict:
    if certified_from is not None:
        return ConditionVerdict(PASS, True,
                                detail=f"closed form, valid from "
                                       f"{certified_from}")
    if not trace:
        return ConditionVerdict(INCONCLUSIVE, detail="empty prefix")
    vals = [v for _, v in trace]
    nondecreasing = all(a <= b for a, b in zip(vals, vals[1:]))
    if nondecreasing and vals[-1] > vals[0]:
        return ConditionVerdict(PASS, False, detail="monotone growth on the "
                                                    "evaluated prefix")
    if vals[-1] <= vals[0]:
        n, v = trace[-1]
        return ConditionVerdict(FAIL, False, (n, v),
                                "no growth across the evaluated prefix")
    return ConditionVerdict(INCONCLUSIVE, detail="non-monotone prefix")


def _vanish_verdict(trace, certified_from: Optional[int],
                    what: str) -> ConditionVerdict:
    if certified_from is not None:
        return ConditionVerdict(PASS, True,
                                detail=f"closed form, valid from "
                                       f"{certified_from}")
    if not trace:
        return ConditionVerdict(INCONCLUSIVE, detail="empty prefix")
    vals = [abs(v) for _, v in trace]
    if all(v == 0 for v in vals):
        return ConditionVerdict(PASS, False, detail=f"{what} identically zero "
                                                    "on the prefix")
    tail = vals[len(vals) // 2:]
    nonincreasing = all(a >= b for a, b in zip(vals, vals[1:]))
    if nonincreasing and vals[-1] < vals[0]:
        return ConditionVerdict(PASS, False,
                                detail="monotone decay on the prefix")
    if all(v >= vals[0] for v in tail) and vals[-1] >= vals[0] > 0:
        n, v = trace[-1]
        return ConditionVerdict(FAIL, False, (n, v),
                                f"{what} stays at or above its first value")
    return ConditionVerdict(INCONCLUSIVE, detail="prefix neither vanishing "
                                                 "nor certified away from 0")


def verify_AN(seq: MeasureSeq, ctx: FilterContext,
              horizon: int = DEFAULT_HORIZON) -> ANReport:
    """Evaluate the three anti-vanishing conditions on a prefix.

    (1) variation norms grow without bound, (2) signed mass of the whole
    space tends to zero, (3) variation outside each sampled filter set tends
    to zero.  Certified verdicts come only from descriptor closed forms.
    """
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    pre = seq.prefix(horizon)
    norms = [(n, m.norm()) for n, m in pre]
    totals = [(n, m.total_mass()) for n, m in pre]
    variations = []
    tests = []
    for a in ctx.samples:
        outside = omega_complement(a)
        tr = [(n, m.variation_on(outside)) for n, m in pre]
        variations.append(tr)
        cert = _support_escape_threshold(seq, outside)
        tests.append(_vanish_verdict(tr, cert, "tail variation"))
    norms_grow = _grow_verdict(
        norms, _cert_limit(seq.descriptor_expr("norm"), seq.env, "inf"))
    total_vanishes = _vanish_verdict(
        totals, _cert_limit(seq.descriptor_expr("total"), seq.env, "zero"),
        "total mass")
    return ANReport(horizon, norms, totals, variations, norms_grow,
                    total_vanishes, tests,
                    [a.kind for a in ctx.samples])


def _raise_first_failure(report: ANReport):
    named = [("norms-unbounded", report.norms_grow),
             ("total-mass-vanishes", report.total_vanishes)]
    named += [(f"filter-tail-{i}-vanishes", v)
              for i, v in enumerate(report.tests_vanish)]
    for which, v in named:
        if v.status == FAIL:
            idx = v.witness[0] if v.witness else report.horizon
            raise HypothesisFails(idx, which)
    raise HypothesisFails(report.horizon, "anti-vanishing conditions")


def _support_escape_threshold(seq: MeasureSeq, outside) -> Optional[int]:
    """Certified index from which the support misses a finite outside set."""
    fin, bnd = is_finite_with_bound(outside)
    if not fin:
        return None
    smin = seq.descriptor_expr("support_min")
    if smin is None:
        return None
    b = expr_to_bounds(smin, seq.env)
    if b is None:
        return None
    thr = eventually_ge(b.lo, Fraction(bnd))
    if thr is None:
        return None
    return max(thr, b.n0)


# -------------------------------------------------------------- disjointify

def _prefix_set(bound: int) -> SetSpec:
    """The initial segment [0, bound] as a set spec (empty when bound < 0)."""
    if bound < 0:
        return FiniteSet(())
    return IntervalUnion(intervals=((0, bound + 1),))


def disjointify(seq: MeasureSeq, ctx: FilterContext,
                horizon: int = DEFAULT_HORIZON):
    """Greedy two-step rewrite to pairwise disjoint supports inside omega.

    Step 1 picks a subsequence whose members have variation below 1/k on the
    initial segment covered so far, then cuts that segment away (keeping the
    extra point).  Step 2 removes the extra-point atoms: either by pairing
    members with nearby extra-point masses and subtracting, or, when those
    masses grow, by scaling consecutive members so the extra-point atoms
    cancel exactly.  Returns (sequence, replayable log).
    """
    report = verify_AN(seq, ctx, horizon)
    if not report.passes:
        _raise_first_failure(report)
    log = {"precondition": {"passes": True, "horizon": horizon},
           "step1": [], "step2": {}}
    idx = list(seq.index_range(horizon))
    if not idx:
        raise HorizonExhausted("step1 (empty prefix)", 0)

    thetas = []
    chosen = []
    cover = -1          # largest omega point covered by prior supports
    pos = 0
    k = 0
    while pos < len(idx):
        if k == 0:
            n_k = idx[pos]
            pos += 1
        else:
            bound = Fraction(1, k)
            found = None
            while pos < len(idx):
                cand = idx[pos]
                pos += 1
                m = seq.at(cand)
                if m.variation_on(_prefix_set(cover)) < bound:
                    found = cand
                    break
            if found is None:
                if k >= 2:
                    break       # enough members; the horizon is exhausted
                raise HorizonExhausted(
                    f"step1 (no member with variation below 1/{k} "
                    f"on [0, {cover}])", k)
            n_k = found
        m = seq.at(n_k)
        keep = Complement(_prefix_set(cover))   # contains the extra point
        theta = m.restrict_to(keep)
        thetas.append(theta)
        chosen.append(n_k)
        log["step1"].append({
            "k": k, "index": n_k, "segment_max": cover,
            "variation_on_segment": format_rational(
                m.variation_on(_prefix_set(cover))),
            "bound": "none" if k == 0 else format_rational(Fraction(1, k)),
        })
        omega_pts = m.omega_support()
        if omega_pts:
            cover = max(cover, max(omega_pts))
        k += 1

    if len(thetas) == 1:
        out = [thetas[0].restrict_omega()]
        log["step2"] = {"case": "degenerate", "note": "single member; "
                        "extra-point atom dropped"}
        return MeasureSeq.from_list(out, start=0), log

    pf_vals = [t.weight(PF) for t in thetas]
    log["step2"]["pf_trace"] = [format_rational(v) for v in pf_vals]

    pairs = _cauchy_pairs(pf_vals)
    if pairs is not None:
        out = []
        plog = []
        for j, (p, q) in enumerate(pairs):
            nu = (thetas[p] - thetas[q]).restrict_omega()
            out.append(nu)
            plog.append({"pair": j, "first": p, "second": q,
                         "gap": format_rational(abs(pf_vals[p] - pf_vals[q])),
                         "gap_bound": format_rational(Fraction(1, j + 1))})
        log["step2"].update({"case": "a", "pairs": plog,
                             "rule": "earliest pair with extra-point gap "
                                     "below 1/(k+1)"})
        return MeasureSeq.from_list(out, start=0), log

    chain = _increasing_chain(pf_vals)
    if len(chain) < 2:
        raise HorizonExhausted(
            "step2 (extra-point masses neither cluster nor grow)", len(chain))
    out = []
    blog = []
    for j in range(0, len(chain) - 1, 2):
        a, b = chain[j], chain[j + 1]
        alpha = pf_vals[a] / pf_vals[b]
        if not abs(alpha) < 1:
            raise InconsistentVerdicts(
                f"scaling coefficient {alpha} not below 1 in modulus")
        nu = (thetas[a] - thetas[b].scale(alpha)).restrict_omega()
        if (thetas[a] - thetas[b].scale(alpha)).weight(PF) != 0:
            raise InconsistentVerdicts("extra-point atom failed to cancel")
        out.append(nu)
        blog.append({"pair": j // 2, "first": a, "second": b,
                     "alpha": format_rational(alpha)})
    if not out:
        raise HorizonExhausted("step2 (not enough growing extra-point "
                               "masses)", len(chain))
    log["step2"].update({"case": "b", "pairs": blog,
                         "rule": "strictly growing extra-point masses; "
                                 "scale so the atoms cancel"})
    return MeasureSeq.from_list(out, start=0), log


def _cauchy_pairs(vals) -> Optional[list]:
    """Earliest index pairs with |gap| < 1/(k+1) for the k-th pair, or None.

    Every index is used at most once; the search stalls (returns None) as
    soon as some k admits no remaining pair, which is the signal that the
    extra-point masses do not cluster within the horizon.
    """
    used = [False] * len(vals)
    out = []
    k = 0
    while True:
        bound = Fraction(1, k + 1)
        best = None
        for p in range(len(vals)):
            if used[p]:
                continue
            for q in range(p + 1, len(vals)):
                if used[q]:
                    continue
                if abs(vals[p] - vals[q]) < bound:
                    best = (p, q)
                    break
            if best:
                break
        if best is None:
            break
        used[best[0]] = used[best[1]] = True
        out.append(best)
        k += 1
    return out if out else None


def _increasing_chain(vals) -> list:
    """Greedy earliest subsequence with strictly growing |values|, from 0."""
    out = []
    cur = None
    for i, v in enumerate(vals):
        if v == 0:
            continue
        if cur is None or abs(v) > cur:
            out.append(i)
            cur = abs(v)
    return out


# ------------------------------------------------------- signed <-> positive

def positive_to_AN(seq: MeasureSeq) -> MeasureSeq:
    """nu_n = (total mass) * delta_extra - mu_n for nonnegative mu_n."""
    def build(n: int) -> FinMeasure:
        m = seq.at(n)
        if m.has_pf_atom():
            raise HasPFAtom(f"element {n} already charges the extra point")
        if not m.is_nonneg():
            raise ValidationError(f"element {n} is not nonnegative")
        return FinMeasure.delta(PF, m.total_mass()) - m

    descriptor = None
    if seq.descriptor and "norm" in seq.descriptor:
        e = seq.descriptor_expr("norm")
        descriptor = dict(seq.descriptor)
        descriptor["norm"] = Expr("op", name="mul", args=(const(2), e))
        descriptor["total"] = parse_expr("0")
    return MeasureSeq(fn=build, descriptor=descriptor, env=seq.env,
                      start=seq.start, length=seq.length)


def AN_to_positive(seq: MeasureSeq, ctx: FilterContext,
                   horizon: int = DEFAULT_HORIZON):
    """Disjointify, then take variation measures.  Returns (sequence, log)."""
    dis, log = disjointify(seq, ctx, horizon)
    out = [m.abs() for _, m in dis.prefix(horizon)]
    log = dict(log)
    log["positive"] = {"elements": len(out)}
    return MeasureSeq.from_list(out, start=0), log


def AN_to_density(seq: MeasureSeq, ctx: FilterContext,
                  horizon: int = DEFAULT_HORIZON):
    """Package a verified sequence as a block-family submeasure.

    Returns (DensitySubmeasure, probe log).  The probe re-checks that every
    sampled filter set's complement lands In the packaged ideal and confirms
    the family's values exceed every level reached on the prefix.
    """
    pos, log = AN_to_positive(seq, ctx, horizon)
    kept = []
    end = -1
    for n, m in pos.prefix(horizon):
        if m.is_zero():
            continue
        pts = m.omega_support()
        if min(pts) > end:
            kept.append(m)
            end = max(pts)
    if not kept:
        raise AllZeroPrefix("nothing to package")
    gen = ExplicitBlocks(measures=tuple(kept))
    phi = DensitySubmeasure(gen)
    ideal = ExhIdeal(phi)
    probes = []
    for i, a in enumerate(ctx.samples):
        v = membership(ideal, omega_complement(a), horizon)
        probes.append({"sample": i, "verdict": v.verdict,
                       "rule": v.evidence.get("rule")})
    top = max(m.total_mass() for m in kept)
    ub = unboundedness_check(phi, top - 1, horizon=10 ** 6) if top > 1 else None
    log = dict(log)
    log["packaging"] = {
        "blocks": len(kept),
        "block_masses": [format_rational(m.total_mass()) for m in kept],
        "probe": probes,
        "level_reached": format_rational(top),
        "level_search": ub.to_jsonable() if ub is not None else None,
    }
    return phi, log


# ------------------------------------------------- extraction and normalizing

def _interval_measure(phi: SubmeasureSpec, lo: int, hi: int) -> FinMeasure:
    """Dominated measure on [lo, hi] witnessing the interval's submeasure mass.

    Summable: the weights themselves.  Density: the single maximizing block
    restricted to the interval.
    """
    if isinstance(phi, SummableSubmeasure):
        return FinMeasure({j: phi.weight_at(j) for j in range(lo, hi + 1)
                           if phi.weight_at(j) != 0})
    gen = phi.generator
    best = None
    best_val = Fraction(-1)
    window = IntervalUnion(intervals=((lo, hi + 1),))
    for b in gen.blocks_touching(lo, hi + 1):
        v = gen.block_value(b, window)
        if v > best_val:
            best_val = v
            best = b
    if best is None:
        return FinMeasure.zero()
    a, bnd = gen.block_interval(best)
    lo2, hi2 = max(a, lo), min(bnd - 1, hi)
    if hi2 - lo2 + 1 > (1 << 20):
        raise BlockTooLarge(best, hi2 - lo2 + 1)
    w = gen.block_norm(best) / gen.block_length(best)
    return FinMeasure({j: w for j in range(lo2, hi2 + 1)})


def _check_domination(mu: FinMeasure, phi: SubmeasureSpec) -> dict:
    """mu(S) <= phi(S): exhaustive on supports of up to 16 points."""
    pts = mu.omega_support()
    if len(pts) <= 16:
        for mask in range(1, 1 << len(pts)):
            s = [pts[i] for i in range(len(pts)) if mask >> i & 1]
            if sum(mu.weight(p) for p in s) > eval_submeasure(phi, s):
                raise InconsistentVerdicts(
                    f"witness measure exceeds the submeasure on {s}")
        return {"mode": "exhaustive", "subsets": (1 << len(pts)) - 1}
    samples = [list(pts), [pts[0]], [pts[-1]], list(pts[::2]),
               list(pts[1::2]), list(pts[: len(pts) // 2])]
    for s in samples:
        if sum(mu.weight(p) for p in s) > eval_submeasure(phi, s):
            raise InconsistentVerdicts(
                f"witness measure exceeds the submeasure on a sampled set")
    return {"mode": "sampled", "subsets": len(samples)}


def submeasure_to_AN(phi: SubmeasureSpec, horizon: int = DEFAULT_HORIZON):
    """Greedy interval extraction of a mass-growing dominated sequence.

    Cuts 0 = n_0 < n_1 < ... with the submeasure of [n_(k-1), n_k] above
    k + 1, and packages per-interval dominated measures with mass above k.
    Returns (sequence, log).  Raises BoundedSubmeasure at the first level no
    prefix reaches: with a boundedness certificate when one exists, else as
    a horizon report.
    """
    if phi.kind not in ("density", "asymptotic_density", "summable"):
        raise ValidationError("extraction needs a density or summable form")
    cuts = [0]
    mus = []
    logs = []
    k = 1
    while True:
        bound = Fraction(k + 1)
        ps = interval_search(phi, cuts[-1], bound, horizon)
        if not ps.found:
            if k == 1 or ps.bounded_certificate is not None:
                status = ("bounded-certified"
                          if ps.bounded_certificate is not None
                          else "not-certified")
                raise BoundedSubmeasure(
                    status, k,
                    f"(level {format_rational(bound)} unreachable from "
                    f"{cuts[-1]} below horizon {horizon})")
            break
        n_k = ps.m
        mu = _interval_measure(phi, cuts[-1], n_k)
        mass = mu.total_mass()
        if not mass > k:
            raise InconsistentVerdicts(
                f"interval witness mass {mass} not above {k}")
        dom = _check_domination(mu, phi)
        logs.append({
            "k": k, "from": cuts[-1], "to": n_k,
            "interval_value": format_rational(ps.value),
            "bound": format_rational(bound),
            "witness_mass": format_rational(mass),
            "domination": dom,
        })
        cuts.append(n_k)
        mus.append(mu)
        k += 1
        if n_k >= horizon:
            break
    seq = MeasureSeq.from_list(mus, start=1)
    log = {"cuts": cuts, "intervals": logs}
    log["vanishing"] = _vanishing_probe(phi, seq, len(mus))
    return seq, log


def _vanishing_probe(phi: SubmeasureSpec, seq: MeasureSeq, horizon: int):
    """Exact mass trace of each default In-sample against the sequence."""
    ideal = ExhIdeal(phi)
    probes = []
    candidates = []
    try:
        gen = generator_of(ideal)
        candidates.append(("one-per-block",
                           BlockSelect(count=parse_expr("1"), mode="first",
                                       generator=gen)))
    except Exception:
        pass
    candidates.append(("finite-0..3", FiniteSet((0, 1, 2, 3))))
    for label, c in candidates:
        v = membership(ideal, c)
        if not v.is_in:
            continue
        tr = [(n, m.mass_of(c)) for n, m in seq.prefix(horizon)]
        verdict = _vanish_verdict(tr, None, "sample mass")
        probes.append({"sample": label,
                       "trace": [[n, format_rational(x)] for n, x in tr],
                       "status": verdict.status})
    return probes


def bjn_normalize(seq: MeasureSeq, horizon: int = DEFAULT_HORIZON):
    """Scale every member to variation norm one; zero members are dropped.

    Returns (sequence, log); the log records the index renumbering.
    """
    out = []
    remap = []
    for n, m in seq.prefix(horizon):
        if m.is_zero():
            continue
        out.append(m.scale(Fraction(1) / m.norm()))
        remap.append(n)
    if not out:
        raise AllZeroPrefix(f"no nonzero members below horizon {horizon}")
    log = {"kept": remap, "dropped": [n for n in seq.index_range(horizon)
                                      if n not in set(remap)]}
    return MeasureSeq.from_list(out, start=0), log
