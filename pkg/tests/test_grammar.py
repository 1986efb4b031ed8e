from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import fixture_specs, load_fixture_spec
from linkboard.dataflow import execute
from linkboard.errors import (
    DuplicateAlias,
    LinkboardError,
    MalformedDocument,
    UnknownChannel,
    UnknownMark,
    UnknownTransformKind,
)
from linkboard.grammar import (
    default_representation,
    parse_spec,
    serialize_spec,
    validate_spec,
)
from linkboard.linking import SelectionRegistry


def test_source_only_spec_parses_minimal():
    spec = parse_spec({"source": [{"alias": "t", "entity": "samples"}]})
    assert spec.transformation == ()
    assert spec.representation is None
    assert spec.primary_entity == "samples"


def test_grouped_bar_spec_shape():
    spec = parse_spec(load_fixture_spec("valid/organ_condition_bar.json"))
    assert len(spec.transformation) == 2
    assert len(spec.representation.mapping) == 3


def test_unknown_mark_rejected():
    with pytest.raises(UnknownMark):
        parse_spec(load_fixture_spec("malformed/m01_unknown_mark.json"))


def test_unknown_transform_rejected():
    with pytest.raises(UnknownTransformKind):
        parse_spec(load_fixture_spec("malformed/m02_unknown_transform.json"))


def test_unknown_channel_rejected():
    with pytest.raises(UnknownChannel):
        parse_spec(load_fixture_spec("malformed/m03_unknown_channel.json"))


def test_duplicate_alias_rejected():
    with pytest.raises(DuplicateAlias):
        parse_spec(load_fixture_spec("malformed/m04_duplicate_alias.json"))


def test_unknown_keys_rejected():
    with pytest.raises(MalformedDocument):
        parse_spec(load_fixture_spec("malformed/m08_unknown_key.json"))


def test_json_text_input_accepted():
    spec = parse_spec('{"source": [{"alias": "t", "entity": "penguins"}]}')
    assert spec.primary_entity == "penguins"
    with pytest.raises(MalformedDocument):
        parse_spec("{not json")


def test_rejection_totality_over_malformed_corpus(penguins, biorepo):
    """Every malformed fixture fails cleanly: a grammar error on parse, or
    at least one violation from validation. Never a crash."""
    for name, doc in fixture_specs("malformed"):
        try:
            spec = parse_spec(doc)
        except MalformedDocument:
            continue
        except Exception as exc:  # noqa: BLE001
            pytest.fail(f"{name} crashed the parser: {exc!r}")
        package = biorepo if "samples" in str(doc) and "organ" in str(doc) else penguins
        violations = validate_spec(spec, package)
        assert violations, f"{name} parsed and validated clean"


def test_valid_corpus_parses_and_validates(penguins, biorepo):
    for name, doc in fixture_specs("valid"):
        spec = parse_spec(doc)
        package = penguins if "penguins" in str(doc) else biorepo
        assert validate_spec(spec, package) == [], name


def test_validate_unresolved_field(penguins):
    spec = parse_spec(load_fixture_spec("malformed/m22_dangling_encoding_field.json"))
    violations = validate_spec(spec, penguins)
    assert [v.code for v in violations] == ["UnresolvedField"]
    assert violations[0].locus == "representation.x"


def test_validate_cdf_on_nominal(penguins):
    spec = parse_spec(load_fixture_spec("malformed/m24_cdf_on_nominal.json"))
    assert "KindMismatch" in [v.code for v in validate_spec(spec, penguins)]


def test_validate_rollup_nominal_input(penguins):
    spec = parse_spec(load_fixture_spec("malformed/m27_rollup_nominal_input.json"))
    assert "KindMismatch" in [v.code for v in validate_spec(spec, penguins)]


def test_validate_groupby_scope(penguins):
    spec = parse_spec(load_fixture_spec("malformed/m28_encoding_after_groupby_out_of_scope.json"))
    violations = validate_spec(spec, penguins)
    assert any(v.code == "UnresolvedField" and v.locus == "representation.y"
               for v in violations)


def test_default_representation_attaches_row():
    spec = parse_spec({"source": [{"alias": "p", "entity": "penguins"}]})
    assert default_representation(spec).representation.mark == "row"


def test_default_representation_is_identity_when_present():
    spec = parse_spec(load_fixture_spec("valid/sex_bar.json"))
    assert default_representation(spec) is spec


def test_default_row_over_grouped_columns(penguins):
    doc = {"source": [{"alias": "p", "entity": "penguins"}],
           "transformation": [{"kind": "groupby", "fields": ["species"]},
                              {"kind": "rollup", "out_field": "count", "op": "count"}]}
    spec = default_representation(parse_spec(doc))
    assert spec.representation.mark == "row"
    result = execute(spec, penguins, SelectionRegistry())
    expected = oracles.naive_execute(doc, _tables(penguins), [], {})
    assert result.column_names() == ["species", "count"]
    assert result.rows == expected


def _tables(package):
    out = {}
    for entity in package.entities:
        names = entity.field_names()
        out[entity.name] = [dict(zip(names, row)) for row in entity.rows]
    return out


# --------------------------------------------------------------------------
# generated-spec properties
# --------------------------------------------------------------------------

PENGUIN_Q = ["bill_length_mm", "bill_depth_mm", "flipper_length_mm", "body_mass_g"]
PENGUIN_N = ["species", "island", "sex"]


@st.composite
def penguin_spec_docs(draw) -> dict:
    """Structurally valid spec documents over the penguins entity, without
    selection filters (those need a registry)."""
    doc = {"source": [{"alias": "p", "entity": "penguins"}]}
    transforms = []
    if draw(st.booleans()):
        field = draw(st.sampled_from(PENGUIN_N))
        op = draw(st.sampled_from(["notnull", "isnull", "in"]))
        predicate = {"field": field, "op": op}
        if op == "in":
            predicate["values"] = draw(st.lists(
                st.sampled_from(["Adelie", "Gentoo", "male", "Dream"]), max_size=3))
        transforms.append({"kind": "filter", "predicate": predicate})
    if draw(st.booleans()):
        lo = draw(st.integers(0, 4000))
        transforms.append({"kind": "filter", "predicate": {
            "field": draw(st.sampled_from(PENGUIN_Q)), "op": "range",
            "min": lo, "max": lo + draw(st.integers(0, 3000))}})
    shape = draw(st.sampled_from(["plain", "grouped", "cdf"]))
    encodings = []
    if shape == "grouped":
        fields = draw(st.lists(st.sampled_from(PENGUIN_N), min_size=1, max_size=2,
                               unique=True))
        transforms.append({"kind": "groupby", "fields": fields})
        op = draw(st.sampled_from(["count", "mean", "sum", "min", "max"]))
        rollup = {"kind": "rollup", "out_field": "value", "op": op}
        if op != "count":
            rollup["in_field"] = draw(st.sampled_from(PENGUIN_Q))
        transforms.append(rollup)
        encodings = [
            {"channel": "y", "field": fields[0], "field_kind": "nominal"},
            {"channel": "x", "field": "value", "field_kind": "quantitative"},
        ]
        if len(fields) > 1:
            encodings.append({"channel": "color", "field": fields[1],
                              "field_kind": "nominal"})
        if draw(st.booleans()):
            transforms.append({"kind": "orderby", "field": "value",
                               "direction": draw(st.sampled_from(["asc", "desc"]))})
        mark = "bar"
    elif shape == "cdf":
        field = draw(st.sampled_from(PENGUIN_Q))
        transforms.append({"kind": "cdf", "field": field, "out_fraction": "fraction"})
        encodings = [
            {"channel": "x", "field": field, "field_kind": "quantitative"},
            {"channel": "y", "field": "fraction", "field_kind": "quantitative"},
        ]
        mark = "line"
    else:
        mark = draw(st.sampled_from(["point", "row"]))
        if mark == "point":
            encodings = [
                {"channel": "x", "field": draw(st.sampled_from(PENGUIN_Q)),
                 "field_kind": "quantitative"},
                {"channel": "y", "field": draw(st.sampled_from(PENGUIN_Q)),
                 "field_kind": "quantitative"},
            ]
    if transforms:
        doc["transformation"] = transforms
    if mark != "row" or draw(st.booleans()):
        doc["representation"] = {"mark": mark}
        if encodings:
            doc["representation"]["mapping"] = encodings
    return doc


@given(penguin_spec_docs())
@settings(max_examples=150, deadline=None)
def test_parse_serialize_round_trip(doc):
    spec = parse_spec(doc)
    assert parse_spec(serialize_spec(spec)) == spec


@given(penguin_spec_docs())
@settings(max_examples=150, deadline=None)
def test_validation_soundness(doc):
    """Whatever validates cleanly executes without reference/kind errors."""
    package = test_validation_soundness.package
    spec = parse_spec(doc)
    if validate_spec(spec, package):
        return
    try:
        execute(default_representation(spec), package, SelectionRegistry())
    except LinkboardError as exc:
        pytest.fail(f"validated spec failed at runtime: {exc}")


@pytest.fixture(autouse=True, scope="module")
def _attach_package(penguins):
    test_validation_soundness.package = penguins
    yield
