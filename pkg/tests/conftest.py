"""Shared fixtures and graph generators for the test suite."""
from __future__ import annotations

import random
import string

import pytest
from hypothesis import strategies as st

from vdse import builtin_schema, new_scenario
from vdse.graph import DataPackage
from vdse.schema import INSTANTIABLE_TYPE_CODES
from vdse.scenarios import load_scenario

# Stable orderings so seeded generation is reproducible across runs.
TYPE_CODES = tuple(sorted(INSTANTIABLE_TYPE_CODES))
EDGE_IDS = tuple(sorted(builtin_schema().flow_edge_types, key=lambda e: int(e[1:])))


@pytest.fixture
def schema():
    return builtin_schema()


@pytest.fixture
def uber_graph():
    return load_scenario("uber")


@pytest.fixture
def speeding_graph():
    return load_scenario("speeding")


def build_random_graph(seed: int):
    """Seeded well-formed scenario: up to 12 entities and 30 flows over
    admissible edge types, with shared packages and derivation chains."""
    rng = random.Random(seed)
    schema = builtin_schema()
    graph = new_scenario(f"random_{seed}")
    for i in range(rng.randint(2, 12)):
        graph.add_entity(f"n{i}", rng.choice(TYPE_CODES))
    ids = sorted(graph.entities)

    package_count = rng.randint(1, 8)
    for j in range(package_count):
        derives = ()
        if j and rng.random() < 0.3:
            derives = (f"DP{rng.randrange(j)}",)
        graph.add_package(DataPackage(f"DP{j}", derives_from=derives))

    target = rng.randint(0, 30)
    attempts = 0
    counter = 0
    while len(graph.flows) < target and attempts < 500:
        attempts += 1
        edge = rng.choice(EDGE_IDS)
        source, sink = rng.choice(ids), rng.choice(ids)
        if source == sink:
            continue
        if not schema.flow_conforms(
            edge, graph.entity_type_of(source), graph.entity_type_of(sink)
        ):
            continue
        package = f"DP{rng.randrange(package_count)}"
        if (
            schema.flow_edge_types[edge].bidirectional
            and rng.random() < 0.25
            and len(graph.flows) + 2 <= target
        ):
            graph.add_bidirectional_flow(f"f{counter}", edge, source, sink, package)
        else:
            graph.add_flow(f"f{counter}", edge, source, sink, package)
        counter += 1
    return graph


def sample_pairs(graph, seed: int, limit: int = 8):
    """Ordered entity pairs to query; all of them for small graphs."""
    ids = sorted(graph.entities)
    pairs = [(a, b) for a in ids for b in ids if a != b]
    if len(pairs) <= limit:
        return pairs
    return random.Random(seed ^ 0x5EED).sample(pairs, limit)


# Text that exercises quoting and escapes in the scenario format.
_TEXT = st.text(
    alphabet=string.ascii_letters + string.digits + " _-.,:;!?'\"\\\n\t\r",
    max_size=12,
)
_NAME = st.text(
    alphabet=string.ascii_letters + string.digits + " _-'\"\\", min_size=1, max_size=12
)


@st.composite
def wellformed_graphs(draw):
    """Small graphs built through the mutation API, attribute-rich enough to
    exercise the serializer's quoting, sorting, and pairing rules."""
    schema = builtin_schema()
    graph = new_scenario(draw(_NAME))
    count = draw(st.integers(2, 6))
    for i in range(count):
        code = draw(st.sampled_from(TYPE_CODES))
        attrs = {}
        if draw(st.booleans()):
            attrs["label"] = draw(_TEXT)
        if draw(st.booleans()):
            attrs["privacy_preserving"] = draw(st.booleans())
        if code in ("V", "VC") and draw(st.booleans()):
            attrs["static"] = draw(st.lists(_TEXT, min_size=1, max_size=3))
        graph.add_entity(f"n{i}", code, attrs)
    ids = sorted(graph.entities)

    for j in range(draw(st.integers(1, 4))):
        derives = ()
        existing = sorted(graph.packages)
        if existing and draw(st.booleans()):
            derives = (draw(st.sampled_from(existing)),)
        graph.add_package(
            DataPackage(
                f"p{j}",
                description=draw(_TEXT),
                items=draw(st.lists(_TEXT, max_size=2)),
                derives_from=derives,
            )
        )

    combos = [
        (edge, a, b)
        for edge in EDGE_IDS
        for a in ids
        for b in ids
        if a != b
        and schema.flow_conforms(edge, graph.entity_type_of(a), graph.entity_type_of(b))
    ]
    if combos:
        for k in range(draw(st.integers(0, 5))):
            edge, source, sink = draw(st.sampled_from(combos))
            package = draw(st.sampled_from(sorted(graph.packages)))
            if schema.flow_edge_types[edge].bidirectional and draw(st.booleans()):
                graph.add_bidirectional_flow(f"f{k}", edge, source, sink, package)
            else:
                graph.add_flow(f"f{k}", edge, source, sink, package)

    pairs = [(a, b) for a in ids for b in ids if a != b]
    for m in range(draw(st.integers(0, 3))):
        name = draw(st.sampled_from(sorted(schema.semantic_relations)))
        source, sink = draw(st.sampled_from(pairs))
        attrs = {"role": "driver"} if name == "occupy" else {}
        graph.add_semantic_relation(f"r{m}", name, source, sink, attrs)
    return graph
