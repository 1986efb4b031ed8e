from __future__ import annotations

import pytest

import oracles
from conftest import load_fixture_spec
from linkboard.dataflow import execute
from linkboard.datapackage import Relationship
from linkboard.errors import InvalidInterval, KindMismatch, UnknownField
from linkboard.grammar import FilterTransform, parse_spec
from linkboard.linking import (
    Selection,
    SelectionRegistry,
    derive_brush,
    entity_counts,
    inject_filters,
    neutral_selection,
    observed_tuples,
    update_selection,
)

DONOR_SAMPLE_REL = Relationship("samples", ("donor_id",), "donors", ("id",))


def spec_of(name: str):
    return parse_spec(load_fixture_spec(f"valid/{name}.json"))


# --------------------------------------------------------------------------
# brush derivation
# --------------------------------------------------------------------------

def test_scatter_gets_2d_interval(penguins):
    geometry = derive_brush(spec_of("bill_scatter"), penguins)
    assert geometry.kind == "2d-interval"
    assert geometry.fields == ("bill_length_mm", "bill_depth_mm")


def test_categorical_bar_gets_point_on_combination(biorepo):
    geometry = derive_brush(spec_of("organ_condition_bar"), biorepo)
    assert geometry.kind == "point"
    assert geometry.fields == ("organ", "condition")


def test_tabular_spec_gets_no_brush(penguins):
    from linkboard.grammar import default_representation
    spec = default_representation(spec_of("penguins_table"))
    assert derive_brush(spec, penguins) is None


def test_cdf_line_gets_x_interval(penguins):
    geometry = derive_brush(spec_of("mass_cdf"), penguins)
    assert geometry.kind == "x-interval"
    assert geometry.fields == ("body_mass_g",)


def test_quantitative_y_only_gets_y_interval(penguins):
    spec = parse_spec({"source": [{"alias": "p", "entity": "penguins"}],
                       "transformation": [
                           {"kind": "groupby", "fields": ["species"]},
                           {"kind": "rollup", "out_field": "count", "op": "count"}],
                       "representation": {"mark": "bar", "mapping": [
                           {"channel": "x", "field": "species", "field_kind": "nominal"},
                           {"channel": "y", "field": "count",
                            "field_kind": "quantitative"}]}})
    # count is derived, species is a nominal source field on x
    geometry = derive_brush(spec, penguins)
    assert geometry.kind == "point"
    assert geometry.fields == ("species",)

    flipped = parse_spec({"source": [{"alias": "p", "entity": "penguins"}],
                          "representation": {"mark": "point", "mapping": [
                              {"channel": "y", "field": "body_mass_g",
                               "field_kind": "quantitative"},
                              {"channel": "x", "field": "species",
                               "field_kind": "nominal"}]}})
    geometry = derive_brush(flipped, penguins)
    assert geometry.kind == "y-interval"
    assert geometry.fields == ("body_mass_g",)


# --------------------------------------------------------------------------
# injection
# --------------------------------------------------------------------------

def donor_age_registry() -> SelectionRegistry:
    return SelectionRegistry((Selection(
        name="donor-age", kind="interval", entity="donors", fields=("age",),
        intervals=(("age", (18.0, 90.0)),)),))


def test_cross_entity_injection(biorepo):
    spec = spec_of("organ_condition_bar")
    injected = inject_filters(spec, donor_age_registry(), biorepo.relations)
    first = injected.transformation[0]
    assert isinstance(first, FilterTransform)
    assert first.selection == "donor-age"
    assert first.via == DONOR_SAMPLE_REL
    assert first.mode == "any"
    assert first.injected
    assert len(injected.transformation) == len(spec.transformation) + 1


def test_empty_registry_injection_is_identity(biorepo):
    spec = spec_of("organ_condition_bar")
    assert inject_filters(spec, SelectionRegistry(), biorepo.relations) == spec


def test_multi_hop_is_skipped(biorepo):
    spec = parse_spec({"source": [{"alias": "x", "entity": "datasets"}]})
    injected = inject_filters(spec, donor_age_registry(), biorepo.relations)
    assert injected == spec  # donors are two hops from datasets


def test_own_brush_not_applied_to_self(penguins):
    spec = spec_of("bill_scatter")
    geometry = derive_brush(spec, penguins)
    brush = neutral_selection("brush-1", geometry, penguins, "penguins")
    from dataclasses import replace
    from linkboard.session import _decl_from_selection
    spec = replace(spec, selections=(_decl_from_selection(brush, brush=True),))
    registry = SelectionRegistry((brush,))
    assert inject_filters(spec, registry, penguins.relations) == spec


def test_injection_idempotence(penguins, biorepo):
    for package, name in ((penguins, "sex_bar"), (biorepo, "organ_condition_bar")):
        registry = donor_age_registry().with_selection(Selection(
            name="organ-pick", kind="point", entity="samples", fields=("organ",),
            values=frozenset({("Kidney",)})))
        spec = spec_of(name)
        once = inject_filters(spec, registry, package.relations)
        twice = inject_filters(once, registry, package.relations)
        assert once == twice


def test_injection_order_is_name_sorted(biorepo):
    registry = donor_age_registry().with_selection(Selection(
        name="a-organ", kind="point", entity="samples", fields=("organ",),
        values=frozenset({("Kidney",)})))
    injected = inject_filters(spec_of("organ_condition_bar"), registry,
                              biorepo.relations)
    names = [t.selection for t in injected.transformation
             if isinstance(t, FilterTransform) and t.injected]
    assert names == ["a-organ", "donor-age"]


# --------------------------------------------------------------------------
# update_selection
# --------------------------------------------------------------------------

def test_update_narrows_interval(biorepo):
    registry = donor_age_registry()
    registry = update_selection(registry, biorepo, "donor-age",
                                intervals=(("age", (21.0, 90.0)),))
    assert registry["donor-age"].interval_for("age") == (21.0, 90.0)


def test_full_category_point_filter_is_identity(penguins):
    values = observed_tuples(penguins, "penguins", ("species",))
    registry = SelectionRegistry((Selection(
        name="sp", kind="point", entity="penguins", fields=("species",),
        values=values),))
    assert entity_counts(penguins, registry) == {"penguins": 344}


def test_weight_interval_scatter_matches_oracle(biorepo):
    registry = SelectionRegistry((Selection(
        name="w", kind="interval", entity="donors", fields=("weight_kg",),
        intervals=(("weight_kg", (30.0, 130.0)),)),))
    spec = inject_filters(spec_of("weight_height_scatter"), registry,
                          biorepo.relations)
    rows = execute(spec, biorepo, registry).rows
    raw = oracles.read_rows("data/biorepo/donors.csv")
    expected = [r for r in raw
                if r["weight_kg"] not in ("", "NA")
                and 30.0 <= float(r["weight_kg"]) <= 130.0]
    assert len(rows) == len(expected)


def test_invalid_interval_rejected(biorepo):
    with pytest.raises(InvalidInterval):
        update_selection(donor_age_registry(), biorepo, "donor-age",
                         intervals=(("age", (5.0, 1.0)),))


def test_unknown_field_rejected(biorepo):
    with pytest.raises(UnknownField):
        update_selection(SelectionRegistry(), biorepo, "x", kind="interval",
                         entity="donors", fields=("wingspan",),
                         intervals=(("wingspan", (0.0, 1.0)),))


def test_kind_mismatch_rejected(biorepo):
    with pytest.raises(KindMismatch):
        update_selection(SelectionRegistry(), biorepo, "x", kind="interval",
                         entity="donors", fields=("sex",),
                         intervals=(("sex", (0.0, 1.0)),))
    with pytest.raises(KindMismatch):
        update_selection(SelectionRegistry(), biorepo, "x", kind="point",
                         entity="donors", fields=("age",),
                         values=frozenset({(5,)}))


# --------------------------------------------------------------------------
# entity counts
# --------------------------------------------------------------------------

def test_counts_empty_registry(penguins):
    assert entity_counts(penguins, SelectionRegistry()) == {"penguins": 344}


def test_counts_with_donor_filter_match_oracle(biorepo):
    registry = donor_age_registry()
    counts = entity_counts(biorepo, registry)
    tables = {e.name: [dict(zip(e.field_names(), r)) for r in e.rows]
              for e in biorepo.entities}
    sel = oracles.OracleSelection(entity="donors", fields=["age"], kind="interval",
                                  intervals={"age": (18.0, 90.0)})
    rels = [oracles.OracleRelation("samples", ["donor_id"], "donors", ["id"]),
            oracles.OracleRelation("datasets", ["sample_id"], "samples", ["id"])]
    for entity in ("donors", "samples", "datasets"):
        assert counts[entity] == len(oracles.surviving_rows(tables, rels, [sel], entity))
    # datasets are two hops from donors: unaffected by a donor-only filter
    assert counts["datasets"] == len(tables["datasets"])


def test_empty_point_filter_zeroes_related_counts(biorepo):
    registry = SelectionRegistry((Selection(
        name="none", kind="point", entity="donors", fields=("sex",),
        values=frozenset()),))
    counts = entity_counts(biorepo, registry)
    assert counts["donors"] == 0
    # samples with no donor are dropped under any-mode, so samples hit 0 too
    assert counts["samples"] == 0


def test_count_coherence_with_injected_execution(biorepo):
    registry = donor_age_registry()
    counts = entity_counts(biorepo, registry)
    for entity in biorepo.entity_names():
        spec = inject_filters(parse_spec({"source": [{"alias": "t", "entity": entity}]}),
                              registry, biorepo.relations)
        assert counts[entity] == len(execute(spec, biorepo, registry).rows)
