"""Type graph contents and conformance queries."""
from __future__ import annotations

import pytest

from vdse.errors import UnknownTypeError
from vdse.schema import EntityType, builtin_schema, type_graph_to_dot

# The full flow edge table: id -> (source code, target code, bidirectional).
FLOW_TABLE = {
    "E1": ("P", "V", False),
    "E2": ("P", "DA", True),
    "E3": ("DA", "V", True),
    "E4": ("DA", "O", False),
    "E5": ("DA", "DA", True),
    "E6": ("AVS", "V", True),
    "E7": ("P", "AVS", False),
    "E8": ("AVS", "P", True),
    "E9": ("AVS", "O", True),
    "E10": ("V", "VC", True),
    "E11": ("VC", "VC", True),
    "E12": ("V", "V", True),
    "E13": ("V", "CI", True),
    "E14": ("CI", "CI", True),
    "E15": ("CI", "O", False),
    "E16": ("V", "TMS", False),
    "E17": ("TMS", "O", True),
    "E18": ("CF", "V", True),
    "E19": ("CF", "O", True),
    "E20": ("V", "O", True),
    "E21": ("O", "O", True),
}


def test_schema_counts(schema):
    assert len(schema.entity_types) == 14
    assert len(schema.subclass_parent) == 4
    assert len(schema.semantic_relations) == 7
    assert len(schema.flow_edge_types) == 21


def test_flow_edge_table_matches(schema):
    assert set(schema.flow_edge_types) == set(FLOW_TABLE)
    for edge_id, (source, target, bidirectional) in FLOW_TABLE.items():
        edge = schema.flow_edge_types[edge_id]
        assert edge.source.code == source
        assert edge.target.code == target
        assert edge.bidirectional is bidirectional
        assert edge.directionality == ("bi" if bidirectional else "uni")


def test_subclass_edges(schema):
    pairs = {
        (child.code, parent.code) for child, parent in schema.subclass_parent.items()
    }
    assert pairs == {("G", "O"), ("SP", "O"), ("NI", "CI"), ("RSU", "CI")}


def test_semantic_relation_names(schema):
    assert set(schema.semantic_relations) == {
        "occupy",
        "isPartOf",
        "ownedBy",
        "equippedWith",
        "communicate",
        "provideService",
        "partnerWith",
    }
    assert schema.semantic_relations["occupy"].required_attributes == frozenset({"role"})


def test_is_subtype_reflexive(schema):
    for etype in schema.entity_types:
        assert schema.is_subtype(etype, etype)


@pytest.mark.parametrize(
    "child,parent,expected",
    [
        ("G", "O", True),
        ("SP", "O", True),
        ("NI", "CI", True),
        ("RSU", "CI", True),
        ("O", "G", False),
        ("O", "SP", False),
        ("P", "O", False),
        ("V", "VC", False),
    ],
)
def test_is_subtype_pairs(schema, child, parent, expected):
    assert (
        schema.is_subtype(EntityType.from_code(child), EntityType.from_code(parent))
        is expected
    )


@pytest.mark.parametrize(
    "edge,source,target,expected",
    [
        ("E1", "P", "V", True),
        ("E1", "V", "P", False),  # uni type used backwards
        ("E16", "V", "TMS", True),
        ("E16", "TMS", "V", False),
        ("E20", "V", "O", True),
        ("E20", "O", "V", True),  # bi conforms in either orientation
        ("E20", "V", "G", True),  # subtype on the O side
        ("E20", "SP", "V", True),
        ("E21", "G", "SP", True),
        ("E13", "V", "RSU", True),
        ("E13", "RSU", "V", True),
        ("E13", "NI", "V", True),
        ("E4", "DA", "G", True),
        ("E4", "G", "DA", False),
        ("E2", "DA", "P", True),
        ("E7", "AVS", "P", False),
    ],
)
def test_flow_conforms(schema, edge, source, target, expected):
    assert (
        schema.flow_conforms(
            edge, EntityType.from_code(source), EntityType.from_code(target)
        )
        is expected
    )


def test_from_code_rejects_unknown():
    with pytest.raises(UnknownTypeError):
        EntityType.from_code("XX")


def test_coerce_accepts_all_spellings():
    assert EntityType.coerce(EntityType.VEHICLE) is EntityType.VEHICLE
    assert EntityType.coerce("V") is EntityType.VEHICLE
    assert EntityType.coerce("Vehicle") is EntityType.VEHICLE
    with pytest.raises(UnknownTypeError):
        EntityType.coerce("Bicycle")


def test_display_names_cover_every_type(schema):
    names = {etype.display_name for etype in schema.entity_types}
    assert len(names) == 14
    assert "Organisation" in names
    assert "AdditionalVehicleSensor" in names


def test_builtin_schema_is_shared():
    assert builtin_schema() is builtin_schema()


def test_type_graph_dot_structure():
    dot = type_graph_to_dot()
    assert dot.startswith('digraph "entity_types" {')
    assert dot.rstrip().endswith("}")
    node_lines = [line for line in dot.splitlines() if "shape=box" in line]
    assert len(node_lines) == 14
    assert '  "GovernmentBody" -> "Organisation" [label="subclassOf", arrowhead=onormal];' in dot
    assert '  "Organisation" -> "Organisation" [label="E21", style=dashed, dir=both];' in dot
    assert '  "Person" -> "Vehicle" [label="E1", style=dashed];' in dot


def test_type_graph_dot_deterministic():
    assert type_graph_to_dot() == type_graph_to_dot()
