"""JSON parse/emit round trips and error reporting."""

import json
from fractions import Fraction

import pytest

from nikodym.errors import ParseError, ValidationError
from nikodym.measures import FinMeasure, PF
from nikodym.blocks import UniformBlocks, ExplicitBlocks
from nikodym.submeasures import (SummableSubmeasure, DensitySubmeasure,
                                 MaxMerge, FiniteTable)
from nikodym.ideals import ExhIdeal, PhiOfIdeal, SimpleDensityIdeal
from nikodym.sequences import MeasureSeq
from nikodym.katetov import ReductionTable
from nikodym.sets import FiniteSet, IntervalUnion, BlockSelect
from nikodym.serialize import (parse_obj, parse_spec, emit_obj,
                               parse_sequence, emit_sequence)


def rt(obj):
    """One full round trip through the typed layer."""
    return emit_obj(parse_obj(obj))


# -------------------------------------------------------------------- measures

def test_measure_round_trip():
    obj = {"atoms": [[0, "2/1"], [1, "-3/1"], ["PF", "1/2"]]}
    m = parse_obj(obj)
    assert isinstance(m, FinMeasure)
    assert m.weight(0) == 2
    assert m.weight(1) == -3
    assert m.weight(PF) == Fraction(1, 2)
    again = parse_obj(emit_obj(m))
    assert again == m


def test_measure_zero_weight_rejected():
    with pytest.raises(ValidationError, match="zero weight"):
        parse_obj({"atoms": [[0, "0/1"], [1, "1/1"]]})


def test_measure_duplicate_point_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        parse_obj({"atoms": [[3, "1/2"], [3, "1/3"]]})


def test_measure_bad_entry_shape():
    with pytest.raises(ValidationError):
        parse_obj({"atoms": [[3]]})


# ------------------------------------------------------------------ generators

UNIFORM_OBJ = {
    "kind": "uniform_blocks",
    "start": "(pow2 n)",
    "length": "(pow2 n)",
    "weight": "(div 1 (pow2 n))",
    "first_index": 1,
}


def test_uniform_blocks_round_trip():
    gen = parse_obj(UNIFORM_OBJ)
    assert isinstance(gen, UniformBlocks)
    assert emit_obj(gen) == UNIFORM_OBJ
    again = parse_obj(emit_obj(gen))
    for n in range(1, 5):
        assert again.block_interval(n) == gen.block_interval(n)
        assert again.block_norm(n) == gen.block_norm(n)


def test_uniform_blocks_optional_fields_survive():
    obj = dict(UNIFORM_OBJ, last_index=6, label="dyadic")
    out = rt(obj)
    assert out["last_index"] == 6
    assert out["label"] == "dyadic"


def test_uniform_blocks_env_defs_round_trip():
    obj = {
        "kind": "uniform_blocks",
        "start": "(app h n)",
        "length": "(app h n)",
        "weight": "(div 1 (app h n))",
        "first_index": 1,
        "defs": {"h": "(pow n 3)"},
    }
    gen = parse_obj(obj)
    assert rt(obj) == obj
    assert gen.block_length(2) == 8
    assert gen.block_norm(2) == 1


def test_canonical_family_parses_to_uniform_blocks():
    gen = parse_obj({"kind": "phi_blocks", "f": "(pow n 2)"})
    assert isinstance(gen, UniformBlocks)
    assert gen.label == "phi"
    out = emit_obj(gen)
    assert out["kind"] == "uniform_blocks"
    assert "defs" in out
    again = parse_obj(out)
    # block n: length n^3, norm n, consecutive from 0
    for n, iv in [(1, (0, 1)), (2, (1, 9)), (3, (9, 36)), (4, (36, 100))]:
        assert gen.block_interval(n) == iv
        assert again.block_interval(n) == iv
        assert again.block_norm(n) == n


def test_explicit_blocks_round_trip():
    obj = {
        "kind": "explicit_blocks",
        "measures": [{"atoms": [[0, "1/2"], [1, "1/2"]]},
                     {"atoms": [[2, "1/3"]]}],
        "first_index": 1,
    }
    gen = parse_obj(obj)
    assert isinstance(gen, ExplicitBlocks)
    assert rt(obj) == obj
    assert gen.block_norm(2) == Fraction(1, 3)


def test_generator_missing_field():
    with pytest.raises(ParseError, match="missing field 'weight'"):
        parse_obj({"kind": "uniform_blocks", "start": "n", "length": "n"})


def test_generator_expr_field_must_be_string():
    with pytest.raises(ParseError, match="must be an s-expression"):
        parse_obj({"kind": "uniform_blocks", "start": 7, "length": "n",
                   "weight": "n"})


# ----------------------------------------------------------------- submeasures

SUBMEASURE_OBJS = [
    {"kind": "asymptotic_density"},
    {"kind": "density", "generator": UNIFORM_OBJ},
    {"kind": "summable", "weight": "(div 1 (add n 1))"},
    {"kind": "max_merge",
     "left": {"kind": "asymptotic_density"},
     "right": {"kind": "summable", "weight": "(div 1 (add n 1))"}},
    {"kind": "finite_table", "ground": [0, 1],
     "values": ["0/1", "1/2", "1/2", "1/1"]},
]


@pytest.mark.parametrize("obj", SUBMEASURE_OBJS,
                         ids=[o["kind"] for o in SUBMEASURE_OBJS])
def test_submeasure_round_trip(obj):
    assert rt(obj) == obj


def test_submeasure_types():
    kinds = [type(parse_obj(o)) for o in SUBMEASURE_OBJS]
    assert kinds == [DensitySubmeasure, DensitySubmeasure,
                     SummableSubmeasure, MaxMerge, FiniteTable]


def test_finite_table_value_count_checked():
    with pytest.raises(ValidationError):
        parse_obj({"kind": "finite_table", "ground": [0, 1],
                   "values": ["0/1", "1/2"]})


def test_summable_with_table_env():
    obj = {"kind": "summable", "weight": "(app w n)",
           "tables": {"w": [[0, "1/2"], [1, "1/4"], [2, "1/8"]]}}
    phi = parse_obj(obj)
    assert rt(obj) == obj
    assert phi.of(FiniteSet((0, 2))) == Fraction(5, 8)


# ---------------------------------------------------------------------- ideals

IDEAL_OBJS = [
    {"kind": "phi", "f": "(mul 2 (pow n 2))"},
    {"kind": "exh", "submeasure": {"kind": "asymptotic_density"}},
    {"kind": "simple_density", "g": "(pow2 n)"},
]


@pytest.mark.parametrize("obj", IDEAL_OBJS,
                         ids=[o["kind"] for o in IDEAL_OBJS])
def test_ideal_round_trip(obj):
    assert rt(obj) == obj


def test_ideal_types():
    kinds = [type(parse_obj(o)) for o in IDEAL_OBJS]
    assert kinds == [PhiOfIdeal, ExhIdeal, SimpleDensityIdeal]


def test_summable_ideal_normalizes_to_exh():
    ideal = parse_obj({"kind": "summable_ideal",
                       "weight": "(div 1 (add n 1))"})
    assert isinstance(ideal, ExhIdeal)
    assert isinstance(ideal.submeasure, SummableSubmeasure)
    out = emit_obj(ideal)
    assert out == {"kind": "exh",
                   "submeasure": {"kind": "summable",
                                  "weight": "(div 1 (add n 1))"}}
    assert rt(out) == out


# ------------------------------------------------------------------------ sets

SET_OBJS = [
    {"kind": "finite", "members": [1, 4, 9], "contains_pf": True},
    {"kind": "interval_union", "intervals": [[0, 3], [10, 12]]},
    {"kind": "interval_union", "intervals": [],
     "rule": {"lower": "(pow2 n)",
              "upper": "(add (pow2 n) (floordiv (pow2 n) n))",
              "index_from": 1}},
    {"kind": "block_select", "count": "(floordiv (app philen n) 2)",
     "mode": "first",
     "generator": {"kind": "uniform_blocks", "start": "(app philen 0)",
                   "length": "n", "weight": "(div 1 n)", "first_index": 1,
                   "defs": {"philen": "(mul n n)"}},
     "defs": {"philen": "(mul n n)"}},
    {"kind": "complement", "inner": {"kind": "finite", "members": [0, 1]}},
    {"kind": "union",
     "left": {"kind": "finite", "members": [0]},
     "right": {"kind": "interval_union", "intervals": [[5, 7]]}},
    {"kind": "intersect",
     "left": {"kind": "omega"},
     "right": {"kind": "finite", "members": [2, 3]}},
    {"kind": "omega"},
]


@pytest.mark.parametrize("obj", SET_OBJS,
                         ids=[o["kind"] for o in SET_OBJS])
def test_set_round_trip(obj):
    assert rt(obj) == obj


def test_set_membership_survives_round_trip():
    obj = SET_OBJS[2]
    s = parse_obj(obj)
    assert isinstance(s, IntervalUnion)
    again = parse_obj(rt(obj))
    for k in range(0, 300):
        assert s.contains_point(k) == again.contains_point(k)
    assert s.contains_point(2) and s.contains_point(5)
    assert not s.contains_point(3)


def test_block_select_round_trip_semantics():
    s = parse_obj(SET_OBJS[3])
    assert isinstance(s, BlockSelect)
    again = parse_obj(rt(SET_OBJS[3]))
    for k in range(0, 40):
        assert s.contains_point(k) == again.contains_point(k)


def test_unknown_set_kind():
    with pytest.raises(ParseError, match="unknown set kind"):
        parse_obj({"kind": "complement", "inner": {"kind": "frob"}})


# ------------------------------------------------------------------- sequences

MEASURE_LIST = [{"atoms": [[0, "1/1"]]},
                {"atoms": [[1, "1/2"], [2, "1/2"]]}]


def test_bare_list_is_a_sequence():
    seq = parse_obj(MEASURE_LIST)
    assert isinstance(seq, MeasureSeq)
    assert seq.start == 0
    assert seq.length == 2
    assert seq.at(1).weight(2) == Fraction(1, 2)


def test_sequence_kind_form_round_trip():
    obj = {"kind": "sequence", "measures": MEASURE_LIST, "start": 3,
           "descriptor": {"norm": "1/1"}}
    seq = parse_obj(obj)
    assert seq.start == 3
    assert seq.at(4).norm() == 1
    assert rt(obj) == obj


def test_sequence_rejects_malformed_descriptor():
    with pytest.raises(ParseError):
        parse_obj({"kind": "sequence", "measures": MEASURE_LIST,
                   "descriptor": {"norm": "(frobnicate n)"}})
    with pytest.raises(ParseError, match="descriptor"):
        parse_obj({"kind": "sequence", "measures": MEASURE_LIST,
                   "descriptor": ["norm"]})


def test_unbounded_sequence_needs_horizon():
    seq = MeasureSeq(fn=lambda n: FinMeasure({n: Fraction(1)}))
    with pytest.raises(ValidationError, match="horizon"):
        emit_sequence(seq)
    out = emit_sequence(seq, horizon=3)
    assert out["measures"] == [{"atoms": [[0, "1/1"]]},
                               {"atoms": [[1, "1/1"]]},
                               {"atoms": [[2, "1/1"]]}]
    assert parse_sequence(out).length == 3


# ------------------------------------------------------------------ reductions

REDUCTION_OBJ = {"table": [[0, 0], [1, 1], [2, 2]], "rule": "n",
                 "finite_to_one": True}


def test_reduction_round_trip():
    f = parse_obj(REDUCTION_OBJ)
    assert isinstance(f, ReductionTable)
    assert f.apply(1) == 1
    assert rt(REDUCTION_OBJ) == REDUCTION_OBJ


def test_reduction_rule_table_disagreement_rejected():
    with pytest.raises(ValidationError):
        parse_obj({"table": [[0, 0], [1, 5]], "rule": "n"})


def test_reduction_bad_rows():
    with pytest.raises(ParseError, match="rows"):
        parse_obj({"table": [[0]]})


def test_reduction_env_round_trip():
    obj = {"table": [[1, 2], [2, 4], [3, 6]], "rule": "(app d n)",
           "finite_to_one": False, "defs": {"d": "(mul 2 n)"}}
    f = parse_obj(obj)
    assert f.apply(5) == 10
    assert rt(obj) == obj


# ---------------------------------------------------------------- entry points

DISPATCH = [
    ({"atoms": [[0, "1/1"]]}, FinMeasure),
    ({"table": [[0, 0]]}, ReductionTable),
    (MEASURE_LIST, MeasureSeq),
    ({"kind": "phi", "f": "n"}, PhiOfIdeal),
    ({"kind": "summable", "weight": "(div 1 (add n 1))"}, SummableSubmeasure),
    ({"kind": "finite", "members": [0]}, FiniteSet),
    (UNIFORM_OBJ, UniformBlocks),
    ({"kind": "sequence", "measures": MEASURE_LIST}, MeasureSeq),
    ({"kind": "reduction", "table": [[0, 0]]}, ReductionTable),
]


@pytest.mark.parametrize("obj,tp", DISPATCH,
                         ids=[t.__name__ for _, t in DISPATCH])
def test_parse_obj_dispatch(obj, tp):
    assert isinstance(parse_obj(obj), tp)


def test_parse_obj_rejections():
    with pytest.raises(ParseError, match="unknown kind"):
        parse_obj({"kind": "frob"})
    with pytest.raises(ParseError, match="object or array"):
        parse_obj(42)
    with pytest.raises(ParseError, match="'kind'"):
        parse_obj({"x": 1})


def test_bad_env_blocks():
    with pytest.raises(ParseError, match="'defs'"):
        parse_obj({"kind": "phi", "f": "n", "defs": ["h"]})
    with pytest.raises(ParseError, match="table 't'"):
        parse_obj({"kind": "phi", "f": "n", "tables": {"t": [[1]]}})


def test_parse_spec_inline_and_path(tmp_path):
    text = json.dumps({"atoms": [[0, "1/1"], [5, "-1/3"]]})
    path = tmp_path / "m.json"
    path.write_text(text)
    assert parse_spec(str(path)) == parse_spec(text)


def test_parse_spec_reports_position():
    with pytest.raises(ParseError) as ei:
        parse_spec('{"atoms": [}')
    msg = str(ei.value)
    assert "<inline>" in msg
    assert "line 1" in msg and "column" in msg


def test_parse_spec_reports_file_name(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\n  broken\n}")
    with pytest.raises(ParseError, match="bad.json.*line 2"):
        parse_spec(str(path))


def test_emit_obj_unknown_type():
    with pytest.raises(ValidationError, match="cannot serialize"):
        emit_obj(42)
