"""Scenario text format: parsing, diagnostics, canonical serialization."""
from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import build_random_graph, wellformed_graphs
from vdse.dsl import parse, serialize
from vdse.errors import MalformedGraphError, ParseError
from vdse.graph import DataPackage, FlowInstance, new_scenario
from vdse.scenarios import scenario_text

MINIMAL = (
    'scenario "t"\n'
    "entity driver: P\n"
    "entity car: V\n"
    'package DP1_1 "driving data"\n'
    "flow e1_1: E1 driver -> car package DP1_1\n"
)


def test_parse_minimal_scenario():
    graph = parse(MINIMAL)
    assert graph.name == "t"
    assert sorted(graph.entities) == ["car", "driver"]
    assert sorted(graph.flows) == ["e1_1"]
    assert graph.packages["DP1_1"].description == "driving data"


def test_parse_accepts_comments_blank_lines_and_crlf():
    text = 'scenario "a"\r\n\r\n# a comment\r\nentity x: P  # trailing comment\r\n'
    graph = parse(text)
    assert sorted(graph.entities) == ["x"]


def test_parse_attrs_and_lists():
    graph = parse(
        'scenario "a"\n'
        'entity car: V {static = ["VRM", "make"], dynamic = ["speed"]}\n'
        'entity org: O {label = "Some\\nOrg", privacy_preserving = true}\n'
    )
    assert graph.entities["car"].attributes == {
        "static": ["VRM", "make"],
        "dynamic": ["speed"],
    }
    assert graph.entities["org"].attributes["label"] == "Some\nOrg"
    assert graph.entities["org"].privacy_preserving is True


def test_parse_bidirectional_sugar():
    graph = parse(
        'scenario "a"\n'
        "entity app: DA\n"
        "entity car: V\n"
        "package d\n"
        "flow x: E3 app <-> car package d\n"
    )
    assert sorted(graph.flows) == ["x.fwd", "x.rev"]
    assert graph.flows["x.fwd"].source == "app"
    assert graph.flows["x.rev"].source == "car"
    assert graph.flows["x.fwd"].package == graph.flows["x.rev"].package == "d"


def test_parse_package_clauses():
    graph = parse(
        'scenario "a"\n'
        "package base\n"
        'package full "desc" items ["one", "two"] derives base\n'
    )
    package = graph.packages["full"]
    assert package.description == "desc"
    assert package.items == ["one", "two"]
    assert package.derives_from == ("base",)


@pytest.mark.parametrize(
    "text,line,column,fragment",
    [
        ("", 1, 1, "empty input"),
        ("# only a comment\n", 2, 1, "empty input"),
        ("entity a: P\n", 1, 1, "expected 'scenario' header"),
        ('scenario "a"\nscenario "b"\n', 2, 1, "duplicate 'scenario' header"),
        ('scenario "a"\nfrobnicate x\n', 2, 1, "unknown statement"),
        ('scenario "a"\nentity x: DP\n', 2, 11, "unknown entity type code 'DP'"),
        (
            'scenario "a"\nentity a: P\nentity b: V\npackage d\n'
            "flow e9: E99 a -> b package d\n",
            5,
            10,
            "unknown flow edge type 'E99'",
        ),
        (
            'scenario "a"\nentity a: P\nentity b: V\n'
            "flow e1: E1 a -> b package DP1\n",
            4,
            28,
            "undeclared package 'DP1'",
        ),
        (
            'scenario "a"\nentity x: P {label = "a", label = "b"}\n',
            2,
            27,
            "duplicate attribute 'label'",
        ),
        ('scenario "a\n', 1, 10, "unterminated string"),
        ('scenario "a\\q"\n', 1, 12, "invalid escape"),
        (
            'scenario "a"\nentity a: V\npackage d\nflow f: E12 a -> a package d\n',
            4,
            18,
            "connects 'a' to itself",
        ),
        ('scenario "a"\nentity x: P\nentity x: P\n', 3, 8, "already declared"),
        ('scenario "a"\nentity x P\n', 2, 10, "expected ':'"),
        ('scenario "a"\npackage p derives q\n', 2, 19, "undeclared package 'q'"),
        (
            'scenario "a"\nentity a: P\nentity b: V\nrelation r: drives a -> b\n',
            4,
            13,
            "unknown semantic relation",
        ),
        ('scenario "a"\nentity x: P extra\n', 2, 13, "unexpected trailing"),
        ('scenario ""\n', 1, 10, "scenario name"),
    ],
)
def test_parse_error_positions(text, line, column, fragment):
    with pytest.raises(ParseError) as exc:
        parse(text)
    error = exc.value
    assert (error.line, error.column) == (line, column)
    assert fragment in error.message
    lines = text.split("\n")
    assert 1 <= error.line <= max(1, len(lines))
    assert error.column >= 1
    assert str(error).startswith(f"line {line}, column {column}: ")


def test_parse_error_carries_snippet():
    with pytest.raises(ParseError) as exc:
        parse('scenario "a"\nentity x: DP\n')
    assert exc.value.snippet == "entity x: DP"


def test_serialize_empty_graph():
    assert serialize(new_scenario("x")) == 'scenario "x"\n'


def test_serialize_canonical_layout():
    text = serialize(parse(MINIMAL))
    assert text == (
        'scenario "t"\n'
        "\n"
        "entity car: V\n"
        "entity driver: P\n"
        "\n"
        'package DP1_1 "driving data"\n'
        "\n"
        "flow e1_1: E1 driver -> car package DP1_1\n"
    )


def test_serialize_orders_packages_for_reparsing():
    # "a" derives from "z": lexicographic order alone would forward-reference.
    graph = new_scenario("t")
    graph.add_package(DataPackage("z"))
    graph.add_package(DataPackage("a", derives_from=("z",)))
    text = serialize(graph)
    assert text.index("package z") < text.index("package a")
    assert parse(text) == graph


def test_serialize_resugars_pairs():
    graph = parse(scenario_text("uber"))
    text = serialize(graph)
    assert "flow e3_1: E3 uber_rider_app <-> car package DP3_1" in text
    assert ".fwd" not in text and ".rev" not in text


def test_serialize_insertion_order_invariance():
    first = (
        new_scenario("t")
        .add_entity("a", "P")
        .add_entity("b", "V")
        .add_flow("f2", "E1", "a", "b", DataPackage("q"))
        .add_flow("f1", "E1", "a", "b", "q")
    )
    second = (
        new_scenario("t")
        .add_entity("b", "V")
        .add_entity("a", "P")
        .add_package(DataPackage("q"))
        .add_flow("f1", "E1", "a", "b", "q")
        .add_flow("f2", "E1", "a", "b", "q")
    )
    assert serialize(first) == serialize(second)
    assert first == second


def test_serialize_rejects_unpaired_half():
    graph = new_scenario("t").add_entity("a", "DA").add_entity("b", "V")
    graph.add_bidirectional_flow("x", "E3", "a", "b", DataPackage("d"))
    del graph.flows["x.rev"]
    with pytest.raises(MalformedGraphError) as exc:
        serialize(graph)
    assert "bidirectional pair" in str(exc.value)


def test_serialize_rejects_mismatched_pair():
    graph = new_scenario("t").add_entity("a", "DA").add_entity("b", "V")
    graph.add_bidirectional_flow("x", "E3", "a", "b", DataPackage("d"))
    graph.packages["e"] = DataPackage("e")
    graph.flows["x.rev"] = FlowInstance("x.rev", "E3", "b", "a", "e")
    with pytest.raises(MalformedGraphError):
        serialize(graph)


def test_serialize_rejects_base_id_collision():
    graph = new_scenario("t").add_entity("a", "DA").add_entity("b", "V")
    graph.add_bidirectional_flow("x", "E3", "a", "b", DataPackage("d"))
    graph.add_flow("x", "E3", "a", "b", "d")
    with pytest.raises(MalformedGraphError) as exc:
        serialize(graph)
    assert "would not round-trip" in str(exc.value)


def test_serialize_rejects_dangling_and_bad_ids():
    graph = new_scenario("t").add_entity("a", "P")
    graph.flows["f"] = FlowInstance("f", "E1", "a", "ghost", "d")
    with pytest.raises(MalformedGraphError):
        serialize(graph)
    graph = new_scenario("t")
    graph.packages["bad id"] = DataPackage("bad id")
    with pytest.raises(MalformedGraphError) as exc:
        serialize(graph)
    assert "not a serializable identifier" in str(exc.value)


@pytest.mark.parametrize("name", ["uber", "speeding"])
def test_bundled_round_trip(name):
    graph = parse(scenario_text(name))
    canonical = serialize(graph)
    assert parse(canonical) == graph
    assert serialize(parse(canonical)) == canonical


@pytest.mark.parametrize("seed", range(25))
def test_seeded_round_trip(seed):
    graph = build_random_graph(seed)
    assert parse(serialize(graph)) == graph


@settings(max_examples=60, deadline=None)
@given(wellformed_graphs())
def test_round_trip_property(graph):
    canonical = serialize(graph)
    assert parse(canonical) == graph
    assert serialize(parse(canonical)) == canonical
