"""Conformance checking of scenario graphs against the type graph.

Validation is total: it never raises on graph content, it reports. Graphs
built through the mutation API cannot trigger the reference-level codes
(DANGLING_REF, DUPLICATE_ID, MISSING_PACKAGE and friends are pre-empted at
build time); those codes exist for graphs assembled by hand or loaded from
untrusted sources.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from vdse.graph import InstanceGraph, check_entity_attributes
from vdse.schema import EntityType, TypeGraph

__all__ = ["ViolationCode", "Violation", "ValidationReport", "validate"]


class ViolationCode(str, Enum):
    UNKNOWN_TYPE = "UNKNOWN_TYPE"
    ENDPOINT_MISMATCH = "ENDPOINT_MISMATCH"
    DIRECTION_VIOLATION = "DIRECTION_VIOLATION"
    MISSING_PACKAGE = "MISSING_PACKAGE"
    DANGLING_REF = "DANGLING_REF"
    DUPLICATE_ID = "DUPLICATE_ID"
    ROLE_MISSING = "ROLE_MISSING"
    PART_OF_CYCLE = "PART_OF_CYCLE"
    DERIVES_CYCLE = "DERIVES_CYCLE"
    ATTRIBUTE_MISUSE = "ATTRIBUTE_MISUSE"
    SELF_LOOP = "SELF_LOOP"
    OWNERSHIP_LINT = "OWNERSHIP_LINT"


# The only advisory code; everything else is an error.
_WARNING_CODES = frozenset({ViolationCode.OWNERSHIP_LINT})

# Flow edge types whose direction is expected to follow declared ownership.
_OWNERSHIP_EDGE_TYPES = frozenset({"E8", "E9", "E17", "E19"})

_OCCUPY_ROLES = frozenset({"driver", "passenger"})


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    subject: str
    message: str

    @property
    def severity(self) -> str:
        return "warning" if self.code in _WARNING_CODES else "error"


@dataclass
class ValidationReport:
    scenario: str
    violations: list = field(default_factory=list)

    @property
    def errors(self) -> list:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list:
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors


def _cycle_groups(nodes: list[str], edges: dict[str, set[str]]) -> list[list[str]]:
    """Groups of nodes that lie on a directed cycle, deterministically ordered."""
    reach: dict[str, set[str]] = {}
    for node in nodes:
        seen: set[str] = set()
        stack = list(edges.get(node, ()))
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            stack.extend(edges.get(current, ()))
        reach[node] = seen
    cyclic = [n for n in nodes if n in reach[n]]
    groups: list[list[str]] = []
    assigned: set[str] = set()
    for node in sorted(cyclic):
        if node in assigned:
            continue
        group = sorted(
            m for m in cyclic if m == node or (m in reach[node] and node in reach[m])
        )
        assigned.update(group)
        groups.append(group)
    return groups


def _check_entities(schema: TypeGraph, graph: InstanceGraph, out: list) -> None:
    for entity in graph.entities.values():
        if not isinstance(entity.entity_type, EntityType):
            out.append(
                Violation(
                    ViolationCode.UNKNOWN_TYPE,
                    entity.id,
                    f"entity {entity.id!r} has unknown type {entity.entity_type!r}",
                )
            )
            continue
        if entity.entity_type is EntityType.DATA_PACKAGE:
            out.append(
                Violation(
                    ViolationCode.UNKNOWN_TYPE,
                    entity.id,
                    f"entity {entity.id!r} is typed DP; packages attach to flows",
                )
            )
            continue
        for problem in check_entity_attributes(schema, entity.entity_type, entity.attributes):
            out.append(Violation(ViolationCode.ATTRIBUTE_MISUSE, entity.id, problem))


def _check_packages(graph: InstanceGraph, out: list) -> None:
    derive_edges: dict[str, set[str]] = {}
    for package in graph.packages.values():
        ancestors = set()
        for ancestor in package.derives_from:
            if ancestor not in graph.packages:
                out.append(
                    Violation(
                        ViolationCode.DANGLING_REF,
                        package.id,
                        f"package {package.id!r} derives from unknown package {ancestor!r}",
                    )
                )
            else:
                ancestors.add(ancestor)
        derive_edges[package.id] = ancestors
    for group in _cycle_groups(sorted(graph.packages), derive_edges):
        out.append(
            Violation(
                ViolationCode.DERIVES_CYCLE,
                group[0],
                "package derivation cycle: " + " -> ".join(group),
            )
        )


def _check_relations(schema: TypeGraph, graph: InstanceGraph, out: list) -> None:
    part_of_edges: dict[str, set[str]] = {}
    for relation in graph.relations.values():
        if relation.relation not in schema.semantic_relations:
            out.append(
                Violation(
                    ViolationCode.UNKNOWN_TYPE,
                    relation.id,
                    f"relation {relation.id!r} uses unknown relation {relation.relation!r}",
                )
            )
            continue
        dangling = False
        for endpoint in (relation.source, relation.target):
            if endpoint not in graph.entities:
                dangling = True
                out.append(
                    Violation(
                        ViolationCode.DANGLING_REF,
                        relation.id,
                        f"relation {relation.id!r} references unknown entity {endpoint!r}",
                    )
                )
        if dangling:
            continue
        if relation.relation == "occupy":
            role = relation.attributes.get("role")
            if role not in _OCCUPY_ROLES:
                detail = "has no 'role'" if role is None else f"has invalid role {role!r}"
                out.append(
                    Violation(
                        ViolationCode.ROLE_MISSING,
                        relation.id,
                        f"occupy relation {relation.id!r} {detail}; "
                        "expected \"driver\" or \"passenger\"",
                    )
                )
        if relation.relation == "isPartOf":
            part_of_edges.setdefault(relation.source, set()).add(relation.target)
    for group in _cycle_groups(sorted(graph.entities), part_of_edges):
        out.append(
            Violation(
                ViolationCode.PART_OF_CYCLE,
                group[0],
                "isPartOf cycle: " + " -> ".join(group),
            )
        )


def _owner_pairs(graph: InstanceGraph) -> set[tuple[str, str]]:
    return {
        (r.source, r.target)
        for r in graph.relations.values()
        if r.relation == "ownedBy"
    }


def _check_flows(schema: TypeGraph, graph: InstanceGraph, out: list) -> None:
    owned_by = _owner_pairs(graph)
    for flow in graph.flows.values():
        if flow.edge_type not in schema.flow_edge_types:
            out.append(
                Violation(
                    ViolationCode.UNKNOWN_TYPE,
                    flow.id,
                    f"flow {flow.id!r} uses unknown edge type {flow.edge_type!r}",
                )
            )
            continue
        dangling = False
        for endpoint in (flow.source, flow.target):
            if endpoint not in graph.entities:
                dangling = True
                out.append(
                    Violation(
                        ViolationCode.DANGLING_REF,
                        flow.id,
                        f"flow {flow.id!r} references unknown entity {endpoint!r}",
                    )
                )
        if flow.package not in graph.packages:
            out.append(
                Violation(
                    ViolationCode.MISSING_PACKAGE,
                    flow.id,
                    f"flow {flow.id!r} references unknown package {flow.package!r}",
                )
            )
        if dangling:
            continue
        if flow.source == flow.target:
            out.append(
                Violation(
                    ViolationCode.SELF_LOOP,
                    flow.id,
                    f"flow {flow.id!r} connects {flow.source!r} to itself",
                )
            )
            continue
        src_type = graph.entities[flow.source].entity_type
        dst_type = graph.entities[flow.target].entity_type
        if not isinstance(src_type, EntityType) or not isinstance(dst_type, EntityType):
            continue  # the entity check already reported it
        edge = schema.flow_edge_types[flow.edge_type]
        if not schema.flow_conforms(flow.edge_type, src_type, dst_type):
            reversed_fits = schema.is_subtype(src_type, edge.target) and schema.is_subtype(
                dst_type, edge.source
            )
            if not edge.bidirectional and reversed_fits:
                out.append(
                    Violation(
                        ViolationCode.DIRECTION_VIOLATION,
                        flow.id,
                        f"uni-directional {edge.id} "
                        f"({edge.source.code} -> {edge.target.code}) used in reverse",
                    )
                )
            else:
                out.append(
                    Violation(
                        ViolationCode.ENDPOINT_MISMATCH,
                        flow.id,
                        f"{edge.id} connects {edge.source.code} and {edge.target.code}; "
                        f"got {src_type.code} -> {dst_type.code}",
                    )
                )
            continue
        if flow.edge_type in _OWNERSHIP_EDGE_TYPES and (flow.target, flow.source) in owned_by:
            out.append(
                Violation(
                    ViolationCode.OWNERSHIP_LINT,
                    flow.id,
                    f"flow {flow.id!r} runs from owner {flow.source!r} to owned entity "
                    f"{flow.target!r}; data is expected to flow toward the owner",
                )
            )


def validate(schema: TypeGraph, graph: InstanceGraph) -> ValidationReport:
    """Check a scenario against the type graph and report all violations.

    The report is deterministic: violations are sorted by severity,
    subject, code, and message.
    """
    violations: list[Violation] = []
    _check_entities(schema, graph, violations)
    _check_packages(graph, violations)
    _check_relations(schema, graph, violations)
    _check_flows(schema, graph, violations)
    violations.sort(key=lambda v: (v.severity, v.subject, v.code.value, v.message))
    return ValidationReport(scenario=graph.name, violations=violations)
