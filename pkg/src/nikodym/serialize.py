"""JSON (de)serialization for workbench objects.

Every object family uses a "kind"-discriminated JSON object; expressions
travel as s-expression strings and rationals as canonical "p/q" strings.
Named helper functions ride along in optional "defs" (name to s-expression)
and "tables" (name to [[n, value], ...]) blocks and become the object's
environment.  Measures keep the flat {"atoms": [[point, "p/q"], ...]} shape
with no discriminator; sequences may be a bare JSON array of measures.
"""

import json
import os
from fractions import Fraction
from typing import Optional

from .errors import ParseError, ValidationError
from .rat import parse_rational, format_rational
from .expr import Expr, Env, EMPTY_ENV, parse_expr, render
from .measures import FinMeasure
from .sets import (SetSpec, FiniteSet, IntervalRule, IntervalUnion,
                   BlockSelect, Complement, Union, Intersect, everything)
from .blocks import BlockGenerator, UniformBlocks, ExplicitBlocks, phi_blocks
from .submeasures import (SubmeasureSpec, DensitySubmeasure,
                          SummableSubmeasure, MaxMerge, FiniteTable,
                          asymptotic_density)
from .ideals import (IdealSpec, ExhIdeal, PhiOfIdeal, SimpleDensityIdeal,
                     summable_ideal)
from .sequences import MeasureSeq
from .katetov import ReductionTable


def _need(obj: dict, field: str, kind: str):
    if field not in obj:
        raise ParseError(f"{kind}: missing field {field!r}")
    return obj[field]


def _expr_of(obj: dict, field: str, kind: str) -> Expr:
    raw = _need(obj, field, kind)
    if not isinstance(raw, str):
        raise ParseError(f"{kind}: field {field!r} must be an s-expression "
                         f"string, got {type(raw).__name__}")
    return parse_expr(raw)


def _env_of(obj: dict, kind: str) -> Env:
    env = EMPTY_ENV
    defs = obj.get("defs", {})
    if not isinstance(defs, dict):
        raise ParseError(f"{kind}: 'defs' must map names to s-expressions")
    for name in sorted(defs):
        env = env.define(name, parse_expr(defs[name]))
    tables = obj.get("tables", {})
    if not isinstance(tables, dict):
        raise ParseError(f"{kind}: 'tables' must map names to [[n, value]] "
                         "pairs")
    for name in sorted(tables):
        rows = tables[name]
        try:
            env = env.define_table(
                name, {int(k): parse_rational(v) for k, v in rows})
        except (TypeError, ValueError):
            raise ParseError(f"{kind}: table {name!r} rows must be "
                             "[n, rational] pairs")
    return env


def _env_out(env: Env) -> dict:
    out = {}
    if env.defs:
        out["defs"] = {k: render(v) for k, v in sorted(env.defs.items())}
    if env.tables:
        out["tables"] = {
            k: [[n, format_rational(Fraction(v))] for n, v in sorted(t.items())]
            for k, t in sorted(env.tables.items())}
    return out


# ----------------------------------------------------------------- generators

def parse_generator(obj: dict) -> BlockGenerator:
    kind = _need(obj, "kind", "generator")
    env = _env_of(obj, kind)
    if kind == "uniform_blocks":
        return UniformBlocks(start=_expr_of(obj, "start", kind),
                             length=_expr_of(obj, "length", kind),
                             weight=_expr_of(obj, "weight", kind),
                             first_index=int(obj.get("first_index", 1)),
                             last_index=obj.get("last_index"),
                             env=env, label=obj.get("label", ""))
    if kind == "phi_blocks":
        return phi_blocks(_expr_of(obj, "f", kind), env,
                          first_index=int(obj.get("first_index", 1)),
                          last_index=obj.get("last_index"))
    if kind == "explicit_blocks":
        ms = tuple(FinMeasure.from_jsonable(m)
                   for m in _need(obj, "measures", kind))
        return ExplicitBlocks(measures=ms,
                              first_index=int(obj.get("first_index", 1)))
    raise ParseError(f"unknown generator kind {kind!r}")


def emit_generator(gen: BlockGenerator) -> dict:
    if isinstance(gen, UniformBlocks):
        out = {"kind": "uniform_blocks", "start": render(gen.start),
               "length": render(gen.length), "weight": render(gen.weight),
               "first_index": gen.first_index}
        if gen.last_index is not None:
            out["last_index"] = gen.last_index
        if gen.label:
            out["label"] = gen.label
        out.update(_env_out(gen.env))
        return out
    if isinstance(gen, ExplicitBlocks):
        return {"kind": "explicit_blocks",
                "measures": [m.to_jsonable() for m in gen.measures],
                "first_index": gen.first_index}
    raise ValidationError(f"cannot serialize generator {gen!r}")


# ---------------------------------------------------------------- submeasures

def parse_submeasure(obj: dict) -> SubmeasureSpec:
    kind = _need(obj, "kind", "submeasure")
    if kind == "asymptotic_density":
        return asymptotic_density()
    if kind == "density":
        return DensitySubmeasure(parse_generator(_need(obj, "generator",
                                                       kind)))
    if kind == "summable":
        return SummableSubmeasure(weight=_expr_of(obj, "weight", kind),
                                  env=_env_of(obj, kind))
    if kind == "max_merge":
        return MaxMerge(parse_submeasure(_need(obj, "left", kind)),
                        parse_submeasure(_need(obj, "right", kind)))
    if kind == "finite_table":
        ground = tuple(int(p) for p in _need(obj, "ground", kind))
        values = tuple(parse_rational(v) for v in _need(obj, "values", kind))
        return FiniteTable(ground=ground, values=values)
    raise ParseError(f"unknown submeasure kind {kind!r}")


def emit_submeasure(phi: SubmeasureSpec) -> dict:
    if isinstance(phi, DensitySubmeasure):
        if phi.kind == "asymptotic_density":
            return {"kind": "asymptotic_density"}
        return {"kind": "density", "generator": emit_generator(phi.generator)}
    if isinstance(phi, SummableSubmeasure):
        out = {"kind": "summable", "weight": render(phi.weight)}
        out.update(_env_out(phi.env))
        return out
    if isinstance(phi, MaxMerge):
        return {"kind": "max_merge", "left": emit_submeasure(phi.left),
                "right": emit_submeasure(phi.right)}
    if isinstance(phi, FiniteTable):
        return {"kind": "finite_table", "ground": list(phi.ground),
                "values": [format_rational(v) for v in phi.values]}
    raise ValidationError(f"cannot serialize submeasure {phi!r}")


# --------------------------------------------------------------------- ideals

def parse_ideal(obj: dict) -> IdealSpec:
    kind = _need(obj, "kind", "ideal")
    if kind == "phi":
        return PhiOfIdeal(f=_expr_of(obj, "f", kind), env=_env_of(obj, kind))
    if kind == "exh":
        return ExhIdeal(parse_submeasure(_need(obj, "submeasure", kind)))
    if kind == "summable_ideal":
        return summable_ideal(_expr_of(obj, "weight", kind),
                              _env_of(obj, kind))
    if kind == "simple_density":
        return SimpleDensityIdeal(g=_expr_of(obj, "g", kind),
                                  env=_env_of(obj, kind))
    raise ParseError(f"unknown ideal kind {kind!r}")


def emit_ideal(ideal: IdealSpec) -> dict:
    if isinstance(ideal, PhiOfIdeal):
        out = {"kind": "phi", "f": render(ideal.f)}
        out.update(_env_out(ideal.env))
        return out
    if isinstance(ideal, ExhIdeal):
        return {"kind": "exh", "submeasure": emit_submeasure(ideal.submeasure)}
    if isinstance(ideal, SimpleDensityIdeal):
        out = {"kind": "simple_density", "g": render(ideal.g)}
        out.update(_env_out(ideal.env))
        return out
    raise ValidationError(f"cannot serialize ideal {ideal!r}")


# ----------------------------------------------------------------------- sets

def parse_set(obj: dict) -> SetSpec:
    kind = _need(obj, "kind", "set")
    if kind == "finite":
        return FiniteSet(members=tuple(int(p)
                                       for p in _need(obj, "members", kind)),
                         contains_pf=bool(obj.get("contains_pf", False)))
    if kind == "interval_union":
        rule = None
        if obj.get("rule") is not None:
            r = obj["rule"]
            rule = IntervalRule(lower=_expr_of(r, "lower", "interval rule"),
                                upper=_expr_of(r, "upper", "interval rule"),
                                index_from=int(r.get("index_from", 0)),
                                env=_env_of(r, "interval rule"))
        ivs = tuple((int(a), int(b))
                    for a, b in obj.get("intervals", []))
        return IntervalUnion(intervals=ivs, rule=rule,
                             contains_pf=bool(obj.get("contains_pf", False)))
    if kind == "block_select":
        return BlockSelect(count=_expr_of(obj, "count", kind),
                           mode=_need(obj, "mode", kind),
                           generator=parse_generator(_need(obj, "generator",
                                                           kind)),
                           env=_env_of(obj, kind),
                           contains_pf=bool(obj.get("contains_pf", False)))
    if kind == "complement":
        return Complement(parse_set(_need(obj, "inner", kind)))
    if kind == "union":
        return Union(parse_set(_need(obj, "left", kind)),
                     parse_set(_need(obj, "right", kind)))
    if kind == "intersect":
        return Intersect(parse_set(_need(obj, "left", kind)),
                         parse_set(_need(obj, "right", kind)))
    if kind == "omega":
        return everything()
    raise ParseError(f"unknown set kind {kind!r}")


def emit_set(s: SetSpec) -> dict:
    if isinstance(s, FiniteSet):
        out = {"kind": "finite", "members": list(s.members)}
        if s.contains_pf:
            out["contains_pf"] = True
        return out
    if isinstance(s, IntervalUnion):
        out = {"kind": "interval_union",
               "intervals": [[a, b] for a, b in s.intervals]}
        if s.rule is not None:
            r = {"lower": render(s.rule.lower), "upper": render(s.rule.upper),
                 "index_from": s.rule.index_from}
            r.update(_env_out(s.rule.env))
            out["rule"] = r
        if s.contains_pf:
            out["contains_pf"] = True
        return out
    if isinstance(s, BlockSelect):
        out = {"kind": "block_select", "count": render(s.count),
               "mode": s.mode, "generator": emit_generator(s.generator)}
        out.update(_env_out(s.env))
        if s.contains_pf:
            out["contains_pf"] = True
        return out
    if isinstance(s, Complement):
        return {"kind": "complement", "inner": emit_set(s.inner)}
    if isinstance(s, Union):
        return {"kind": "union", "left": emit_set(s.left),
                "right": emit_set(s.right)}
    if isinstance(s, Intersect):
        return {"kind": "intersect", "left": emit_set(s.left),
                "right": emit_set(s.right)}
    if s.kind == "omega":
        return {"kind": "omega"}
    raise ValidationError(f"cannot serialize set {s!r}")


# ------------------------------------------------------------------ sequences

def parse_sequence(obj) -> MeasureSeq:
    """A bare array of measures, or {"kind": "sequence", ...} with options."""
    if isinstance(obj, list):
        return MeasureSeq.from_list([FinMeasure.from_jsonable(m)
                                     for m in obj])
    kind = _need(obj, "kind", "sequence")
    if kind != "sequence":
        raise ParseError(f"unknown sequence kind {kind!r}")
    ms = [FinMeasure.from_jsonable(m) for m in _need(obj, "measures", kind)]
    descriptor = obj.get("descriptor")
    if descriptor is not None:
        if not isinstance(descriptor, dict):
            raise ParseError("sequence: 'descriptor' must map names to "
                             "s-expressions")
        for k, v in descriptor.items():
            parse_expr(v)  # reject malformed closed forms at load time
    return MeasureSeq.from_list(ms, start=int(obj.get("start", 0)),
                                descriptor=descriptor,
                                env=_env_of(obj, kind))


def emit_sequence(seq: MeasureSeq, horizon: Optional[int] = None) -> dict:
    length = seq.length
    if length is None:
        if horizon is None:
            raise ValidationError("cannot serialize an unbounded sequence "
                                  "without a horizon")
        length = horizon
    ms = [seq.at(n).to_jsonable()
          for n in range(seq.start, seq.start + length)]
    out = {"kind": "sequence", "measures": ms, "start": seq.start}
    if seq.descriptor:
        out["descriptor"] = dict(seq.descriptor)
    out.update(_env_out(seq.env))
    return out


# ----------------------------------------------------------------- reductions

def parse_reduction(obj: dict) -> ReductionTable:
    if "table" not in obj:
        raise ParseError("reduction: missing field 'table'")
    try:
        table = {int(k): int(v) for k, v in obj["table"]}
    except (TypeError, ValueError):
        raise ParseError("reduction: 'table' rows must be [n, f(n)] pairs")
    rule = None
    if obj.get("rule") is not None:
        rule = parse_expr(obj["rule"])
    rt = ReductionTable(table=table, rule=rule,
                        env=_env_of(obj, "reduction"),
                        finite_to_one=bool(obj.get("finite_to_one", False)))
    return rt.validate()


# -------------------------------------------------------------- entry points

_IDEAL_KINDS = {"phi", "exh", "summable_ideal", "simple_density"}
_SUBMEASURE_KINDS = {"asymptotic_density", "density", "summable", "max_merge",
                     "finite_table"}
_SET_KINDS = {"finite", "interval_union", "block_select", "complement",
              "union", "intersect", "omega"}
_GENERATOR_KINDS = {"uniform_blocks", "phi_blocks", "explicit_blocks"}


def parse_obj(obj):
    """Typed object from decoded JSON; dispatches on shape and 'kind'."""
    if isinstance(obj, list):
        return parse_sequence(obj)
    if not isinstance(obj, dict):
        raise ParseError(f"expected a JSON object or array, got "
                         f"{type(obj).__name__}")
    if "kind" not in obj:
        if "atoms" in obj:
            return FinMeasure.from_jsonable(obj)
        if "table" in obj:
            return parse_reduction(obj)
        raise ParseError("object needs a 'kind' field (or 'atoms' for a "
                         "measure, 'table' for a reduction)")
    kind = obj["kind"]
    if kind in _IDEAL_KINDS:
        return parse_ideal(obj)
    if kind in _SUBMEASURE_KINDS:
        return parse_submeasure(obj)
    if kind in _SET_KINDS:
        return parse_set(obj)
    if kind in _GENERATOR_KINDS:
        return parse_generator(obj)
    if kind == "sequence":
        return parse_sequence(obj)
    if kind == "reduction":
        return parse_reduction(obj)
    raise ParseError(f"unknown kind {kind!r}")


def parse_spec(source: str):
    """Typed object from a file path or inline JSON text."""
    text = source
    label = "<inline>"
    if os.path.exists(source):
        label = source
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{label}: invalid JSON at line {e.lineno} "
                         f"column {e.colno}: {e.msg}")
    return parse_obj(obj)


def emit_obj(x):
    if isinstance(x, FinMeasure):
        return x.to_jsonable()
    if isinstance(x, IdealSpec):
        return emit_ideal(x)
    if isinstance(x, SubmeasureSpec):
        return emit_submeasure(x)
    if isinstance(x, SetSpec):
        return emit_set(x)
    if isinstance(x, BlockGenerator):
        return emit_generator(x)
    if isinstance(x, MeasureSeq):
        return emit_sequence(x)
    if isinstance(x, ReductionTable):
        out = x.to_jsonable()
        out.update(_env_out(x.env))
        return out
    raise ValidationError(f"cannot serialize {type(x).__name__}")
