"""Command-line workbench.

Every subcommand reads JSON spec objects (file path, inline JSON, or "-"
for stdin), runs one library operation, and emits a deterministic report:
sorted-key JSON (or an indented text rendering), no timestamps, rationals
as canonical "p/q" strings.  Exit codes: 0 positive verdict / success,
1 negative verdict / counterexample, 2 undetermined or inconclusive,
3 malformed input or violated precondition.
"""

import argparse
import json
import sys
from fractions import Fraction

from .errors import (NikodymError, ParseError, HypothesisFails,
                     HorizonExhausted, BoundedSubmeasure, AtomConditionFails,
                     DominationFails, NotAnIdeal, NotPseudoUnion)
from .rat import parse_rational, format_rational
from .expr import Expr, EMPTY_ENV, parse_expr, render
from .measures import PF, FinMeasure
from .sets import SetSpec
from .blocks import BlockGenerator
from .submeasures import (SubmeasureSpec, MaxMerge, FiniteTable,
                          unboundedness_check, nonpathology_defect)
from .ideals import (IdealSpec, PhiOfIdeal, ExhIdeal, SimpleDensityIdeal,
                     membership, generator_of)
from .sequences import (MeasureSeq, default_filter_context, frechet_context,
                        verify_AN, disjointify, submeasure_to_AN)
from .classify import (ClassificationVerdict, classify_density,
                       classify_submeasure, IN_AN, NOT_IN_AN)
from .katetov import (ReductionTable, transport, build_reduction_density,
                      phi_ideal, refute_reduction, RefutationWitness,
                      successor, tukey_map, verify_reduction)
from . import serialize

_OK, _NEGATIVE, _UNDETERMINED, _INPUT_ERROR = 0, 1, 2, 3


def _plain(x):
    """Recursively JSON-safe: exact rationals to canonical strings."""
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, Expr):
        return render(x)
    if x is PF:
        return "PF"
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return sorted(_plain(v) for v in x)
    if hasattr(x, "to_jsonable"):
        return _plain(x.to_jsonable())
    return x


def _render_text(x, indent=0):
    pad = "  " * indent
    if isinstance(x, dict):
        lines = []
        for k in sorted(x):
            v = x[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True)}")
        return "\n".join(lines)
    if isinstance(x, list):
        lines = []
        for v in x:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v, sort_keys=True)}")
        return "\n".join(lines)
    return f"{pad}{json.dumps(x, sort_keys=True)}"


def _load(source: str):
    if source == "-":
        return serialize.parse_obj(json.loads(sys.stdin.read()))
    return serialize.parse_spec(source)


def _load_as(source: str, want, what: str):
    obj = _load(source)
    if not isinstance(obj, want):
        names = (want.__name__ if isinstance(want, type)
                 else "/".join(w.__name__ for w in want))
        raise ParseError(f"{what}: expected {names}, "
                         f"got {type(obj).__name__}")
    return obj


def _generator_from(source: str, what: str) -> BlockGenerator:
    obj = _load(source)
    if isinstance(obj, BlockGenerator):
        return obj
    if isinstance(obj, IdealSpec):
        return generator_of(obj)
    raise ParseError(f"{what}: expected a block generator or a "
                     f"block-structured ideal, got {type(obj).__name__}")


class _Parser(argparse.ArgumentParser):
    # bad flags are input errors; keep the documented exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _context_for(args, horizon):
    if getattr(args, "ideal", None):
        return default_filter_context(_load_as(args.ideal, IdealSpec,
                                               "--ideal"), horizon)
    return frechet_context(horizon)


# ------------------------------------------------------------------- commands

def _cmd_transport(args):
    lam = _load_as(args.lam, FinMeasure, "--lam")
    mu = _load_as(args.mu, FinMeasure, "--mu")
    eps = parse_rational(args.eps)
    mapping, log = transport(lam, mu, eps, seed=args.seed)
    return _OK, {"mapping": sorted(mapping.items()), "log": log.to_jsonable(),
                 "inputs": {"lam": serialize.emit_obj(lam),
                            "mu": serialize.emit_obj(mu),
                            "eps": args.eps}}


def _cmd_reduce(args):
    src = _generator_from(args.source, "--source")
    tgt = _generator_from(args.target, "--target")
    try:
        rtable, cert = build_reduction_density(src, tgt, args.horizon,
                                               seed=args.seed)
    except AtomConditionFails as e:
        return _NEGATIVE, {"verdict": "AtomConditionFails",
                           "violations": e.violations, "message": str(e)}
    return _OK, {"reduction": rtable.to_jsonable(),
                 "certificate": cert.to_jsonable(),
                 "inputs": {"source": serialize.emit_obj(src),
                            "target": serialize.emit_obj(tgt)}}


def _cmd_phi(args):
    f = parse_expr(args.f)
    ideal = phi_ideal(f, EMPTY_ENV, horizon=min(args.horizon, 16))
    gen = ideal.generator()
    prefix = []
    for n in gen.indices():
        if n > min(args.horizon, 12):
            break
        s, e = gen.block_interval(n)
        prefix.append({"n": n, "interval": [s, e],
                       "weight": format_rational(gen.weight_at(n)),
                       "norm": format_rational(gen.block_norm(n))})
    return _OK, {"ideal": serialize.emit_obj(ideal), "blocks": prefix}


def _cmd_verify_an(args):
    seq = _load_as(args.seq, MeasureSeq, "--seq")
    ctx = _context_for(args, args.horizon)
    report = verify_AN(seq, ctx, args.horizon)
    statuses = [report.norms_grow.status, report.total_vanishes.status]
    statuses += [c.status for c in report.tests_vanish]
    if any(s == "Fail" for s in statuses):
        code = _NEGATIVE
    elif all(s == "Pass" for s in statuses):
        code = _OK
    else:
        code = _UNDETERMINED
    return code, {"report": report.to_jsonable(),
                  "context": {"mode": ctx.log.get("mode", "explicit"),
                              "samples": len(ctx.samples)}}


def _cmd_disjointify(args):
    seq = _load_as(args.seq, MeasureSeq, "--seq")
    ctx = _context_for(args, args.horizon)
    try:
        out, log = disjointify(seq, ctx, args.horizon)
    except HypothesisFails as e:
        return _NEGATIVE, {"verdict": "HypothesisFails", "index": e.index,
                           "condition": e.which, "message": str(e)}
    except HorizonExhausted as e:
        return _UNDETERMINED, {"verdict": "HorizonExhausted",
                               "stage": e.stage, "reached": e.reached,
                               "message": str(e)}
    return _OK, {"sequence": serialize.emit_obj(out), "log": log}


def _cmd_extract_an(args):
    phi = _load_as(args.submeasure, SubmeasureSpec, "--submeasure")
    try:
        seq, log = submeasure_to_AN(phi, args.horizon)
    except BoundedSubmeasure as e:
        return _NEGATIVE, {"verdict": "BoundedSubmeasure", "status": e.status,
                           "level": e.step, "message": str(e)}
    except HorizonExhausted as e:
        return _UNDETERMINED, {"verdict": "HorizonExhausted",
                               "stage": e.stage, "reached": e.reached,
                               "message": str(e)}
    return _OK, {"sequence": serialize.emit_obj(seq), "log": log,
                 "inputs": {"submeasure": serialize.emit_obj(phi)}}


def _classification_exit(v: ClassificationVerdict) -> int:
    if v.verdict == IN_AN:
        return _OK
    if v.verdict == NOT_IN_AN:
        return _NEGATIVE
    return _UNDETERMINED


def _cmd_classify(args):
    # NotAnIdeal propagates to the generic handler: not-an-ideal inputs are
    # input errors (exit 3), unlike the inline probe in merge-probe
    if args.ideal:
        obj = _load_as(args.ideal, IdealSpec, "--ideal")
        if isinstance(obj, PhiOfIdeal):
            verdict = classify_density(generator_of(obj), args.horizon)
        elif isinstance(obj, ExhIdeal):
            verdict = classify_submeasure(obj.submeasure, args.horizon)
        elif isinstance(obj, SimpleDensityIdeal):
            verdict = ClassificationVerdict(
                "Undetermined", None,
                {"note": "classification operates on block or weight "
                         "families; scale-quotient forms are out of scope"},
                [])
        else:
            raise ParseError(f"--ideal: unsupported kind "
                             f"{getattr(obj, 'kind', '?')}")
        spec = serialize.emit_obj(obj)
    else:
        phi = _load_as(args.submeasure, SubmeasureSpec, "--submeasure")
        verdict = classify_submeasure(phi, args.horizon)
        spec = serialize.emit_obj(phi)
    report = verdict.to_jsonable()
    report["inputs"] = spec
    return _classification_exit(verdict), report


def _classify_sub(phi, horizon):
    try:
        return classify_submeasure(phi, horizon)
    except NotAnIdeal as e:
        return e


def _cmd_membership(args):
    ideal = _load_as(args.ideal, IdealSpec, "--ideal")
    x = _load_as(args.set, SetSpec, "--set")
    v = membership(ideal, x, args.horizon, args.tolerance)
    code = {"In": _OK, "NotIn": _NEGATIVE}.get(v.verdict, _UNDETERMINED)
    return code, {"membership": v.to_jsonable(),
                  "inputs": {"ideal": serialize.emit_obj(ideal),
                             "set": serialize.emit_obj(x)}}


def _cmd_refute(args):
    f = parse_expr(args.f)
    rtable = _load_as(args.map, ReductionTable, "--map")
    result = refute_reduction(f, rtable, args.horizon, EMPTY_ENV)
    report = {"result": result.to_jsonable(), "inputs": {"f": args.f}}
    if isinstance(result, RefutationWitness) and not result.partial:
        return _OK, report
    return _UNDETERMINED, report


def _cmd_nonpath(args):
    phi = _load_as(args.submeasure, FiniteTable, "--submeasure")
    pts = (phi.ground if args.set is None
           else tuple(int(p) for p in args.set.split(",") if p != ""))
    report = nonpathology_defect(phi, pts)
    verdict = ("NonPathological" if report.defect == 0
               else "PathologyWitness")
    code = _OK if report.defect == 0 else _NEGATIVE
    return code, {"verdict": verdict, "set": sorted(pts),
                  "report": report.to_jsonable(),
                  "inputs": {"submeasure": serialize.emit_obj(phi)}}


def _cmd_successor(args):
    f = parse_expr(args.f)
    try:
        result = successor(f, args.horizon, EMPTY_ENV, seed=args.seed)
    except HypothesisFails as e:
        return _NEGATIVE, {"verdict": "HypothesisFails", "index": e.index,
                           "condition": e.which, "message": str(e)}
    return _OK, {"g": render(result.g), "report": result.report,
                 "forward": result.forward.to_jsonable(),
                 "certificate": result.certificate,
                 "inputs": {"f": args.f}}


def _cmd_tukey(args):
    gen = _generator_from(args.blocks, "--blocks")
    h = parse_expr(args.h) if args.h else None
    try:
        psi, report = tukey_map(gen, args.horizon, h=h, seed=args.seed)
    except DominationFails as e:
        return _NEGATIVE, {"verdict": "DominationFails",
                           "worst": e.worst, "message": str(e)}
    return _OK, {"psi": psi.to_jsonable(), "report": report,
                 "inputs": {"blocks": serialize.emit_obj(gen),
                            "h": args.h}}


def _cmd_merge_probe(args):
    left = _load_as(args.left, SubmeasureSpec, "--left")
    right = _load_as(args.right, SubmeasureSpec, "--right")
    phi = MaxMerge(left, right)
    bound = parse_rational(args.bound)
    ps = unboundedness_check(phi, bound, args.horizon)
    cls = _classify_sub(phi, args.horizon)
    if isinstance(cls, NotAnIdeal):
        cls_report = {"verdict": "NotAnIdeal", "message": str(cls)}
    else:
        cls_report = cls.to_jsonable()
    if ps.found:
        code = _OK
    elif ps.bounded_certificate is not None:
        code = _NEGATIVE
    else:
        code = _UNDETERMINED
    return code, {"probe": ps.to_jsonable(), "classification": cls_report,
                  "inputs": {"merged": serialize.emit_obj(phi),
                             "bound": args.bound}}


def _cmd_verify_reduction(args):
    rtable = _load_as(args.map, ReductionTable, "--map")
    source = _load_as(args.source, IdealSpec, "--source")
    target = _load_as(args.target, IdealSpec, "--target")
    tests = [_load_as(t, SetSpec, "--test") for t in args.test]
    report = verify_reduction(rtable, source, target, tests, args.horizon)
    code = _NEGATIVE if report.refuted else _OK
    return code, {"verification": report.to_jsonable(),
                  "inputs": {"source": serialize.emit_obj(source),
                             "target": serialize.emit_obj(target),
                             "tests": [serialize.emit_obj(t)
                                       for t in tests]}}


# --------------------------------------------------------------------- driver

def _add_common(p):
    p.add_argument("--horizon", type=int, default=64)
    p.add_argument("--tolerance", type=parse_rational,
                   default=Fraction(1, 1000000))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nikodym",
                description="Exact-arithmetic workbench for finitely "
                            "supported measures, submeasure ideals, and "
                            "reduction certificates.")
    sub = p.add_subparsers(dest="command", required=True,
                           parser_class=_Parser)

    sp = sub.add_parser("transport", help="greedy mass transport between "
                                          "two non-negative measures")
    sp.add_argument("--lam", required=True)
    sp.add_argument("--mu", required=True)
    sp.add_argument("--eps", required=True)
    sp.set_defaults(fn=_cmd_transport)

    sp = sub.add_parser("reduce", help="blockwise reduction between two "
                                       "norm-aligned block families")
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.set_defaults(fn=_cmd_reduce)

    sp = sub.add_parser("phi", help="canonical block ideal of a scale "
                                    "function")
    sp.add_argument("--f", required=True)
    sp.set_defaults(fn=_cmd_phi)

    sp = sub.add_parser("verify-an", help="check the three anti-vanishing "
                                          "sequence conditions")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--ideal", default=None)
    sp.set_defaults(fn=_cmd_verify_an)

    sp = sub.add_parser("disjointify", help="rewrite a sequence to pairwise "
                                            "disjoint supports")
    sp.add_argument("--seq", required=True)
    sp.add_argument("--ideal", default=None)
    sp.set_defaults(fn=_cmd_disjointify)

    sp = sub.add_parser("extract-an", help="interval extraction of a "
                                           "mass-growing sequence from a "
                                           "submeasure")
    sp.add_argument("--submeasure", required=True)
    sp.set_defaults(fn=_cmd_extract_an)

    sp = sub.add_parser("classify", help="anti-vanishing classification of "
                                         "an ideal or submeasure")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--ideal", default=None)
    g.add_argument("--submeasure", default=None)
    sp.set_defaults(fn=_cmd_classify)

    sp = sub.add_parser("membership", help="certified membership of a set "
                                           "in an ideal")
    sp.add_argument("--ideal", required=True)
    sp.add_argument("--set", required=True)
    sp.set_defaults(fn=_cmd_membership)

    sp = sub.add_parser("refute", help="search for a witness set refuting "
                                       "a claimed reduction")
    sp.add_argument("--f", required=True)
    sp.add_argument("--map", required=True)
    sp.set_defaults(fn=_cmd_refute)

    sp = sub.add_parser("nonpath", help="exact non-pathology defect of a "
                                        "finite submeasure table")
    sp.add_argument("--submeasure", required=True)
    sp.add_argument("--set", default=None,
                    help="comma-separated points (default: full ground)")
    sp.set_defaults(fn=_cmd_nonpath)

    sp = sub.add_parser("successor", help="growth jump g(n) = n f(f(n)) "
                                          "with hypothesis checks")
    sp.add_argument("--f", required=True)
    sp.set_defaults(fn=_cmd_successor)

    sp = sub.add_parser("tukey", help="monotone growth envelope of the "
                                      "synthesized reduction")
    sp.add_argument("--blocks", required=True)
    sp.add_argument("--h", default=None)
    sp.set_defaults(fn=_cmd_tukey)

    sp = sub.add_parser("merge-probe", help="unboundedness probe of the "
                                            "pointwise max of two "
                                            "submeasures")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--bound", default="2/1")
    sp.set_defaults(fn=_cmd_merge_probe)

    sp = sub.add_parser("verify-reduction", help="audit a reduction table "
                                                 "against test sets")
    sp.add_argument("--map", required=True)
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--test", action="append", required=True)
    sp.set_defaults(fn=_cmd_verify_reduction)

    for name, spr in sub.choices.items():
        _add_common(spr)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.horizon < 1:
        code, report = _INPUT_ERROR, {"error": {
            "type": "ValidationError", "message": "horizon must be >= 1"}}
    elif args.tolerance <= 0:
        code, report = _INPUT_ERROR, {"error": {
            "type": "ValidationError", "message": "tolerance must be > 0"}}
    else:
        try:
            code, report = args.fn(args)
        except NikodymError as e:
            code = _INPUT_ERROR
            report = {"error": {"type": type(e).__name__,
                                "message": str(e)}}
    envelope = {"command": args.command,
                "config": {"horizon": args.horizon,
                           "tolerance": format_rational(args.tolerance),
                           "seed": args.seed}}
    envelope.update(report)
    payload = _plain(envelope)
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        text = _render_text(payload) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
