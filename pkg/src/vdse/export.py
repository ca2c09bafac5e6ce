"""Deterministic DOT and JSON renderings of graphs and reports.

Output depends only on graph content: statements and keys are emitted in
sorted order, and JSON is compact single-line by default. The documented
shapes are:

validation report
    {"scenario": ..., "violations": [{"code", "severity", "subject", "message"}]}
exposure report
    {"person": ..., "sinks": [{"id", "type", "paths", "packages"}],
     "aggregation_points": [{"id", "path_count"}]}
instance graph
    {"scenario": ..., "entities": [...], "packages": [...],
     "relations": [...], "flows": [...]}
path query results
    strict: [[flow ids...], ...]   lineage: [{"flows": [...], "packages": [...]}, ...]
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from vdse.analysis import ExposureReport, LineageTrace, Path
from vdse.errors import MalformedGraphError
from vdse.graph import InstanceGraph
from vdse.schema import EntityType
from vdse.validate import ValidationReport

__all__ = [
    "ExportOptions",
    "graph_to_dot",
    "graph_to_json",
    "report_to_json",
    "paths_to_json",
]


@dataclass(frozen=True)
class ExportOptions:
    """Rendering switches; highlighted paths only make sense for DOT."""

    format: str = "dot"
    show_packages: bool = False
    highlight_paths: tuple = ()

    def __post_init__(self):
        if self.format not in ("dot", "json"):
            raise ValueError(f"unknown export format {self.format!r}")
        if self.highlight_paths and self.format != "dot":
            raise ValueError("highlight_paths is only valid with the dot format")


def _gvquote(text: str) -> str:
    # Newlines become the \n label escape so every statement stays on one line.
    quoted = text.replace("\\", "\\\\").replace('"', '\\"')
    return '"' + quoted.replace("\r", "").replace("\n", "\\n") + '"'


def _check_well_formed(graph: InstanceGraph) -> None:
    for relation in graph.relations.values():
        for endpoint in (relation.source, relation.target):
            if endpoint not in graph.entities:
                raise MalformedGraphError(
                    f"relation {relation.id!r} references unknown entity {endpoint!r}"
                )
    for flow in graph.flows.values():
        for endpoint in (flow.source, flow.target):
            if endpoint not in graph.entities:
                raise MalformedGraphError(
                    f"flow {flow.id!r} references unknown entity {endpoint!r}"
                )


def graph_to_dot(graph: InstanceGraph, options: ExportOptions | None = None) -> str:
    """Render a scenario as Graphviz source: nodes labelled `id : code`,
    semantic relations solid, flows dashed (highlighted ones red)."""
    options = options or ExportOptions()
    _check_well_formed(graph)
    highlighted: set[str] = {
        flow_id for path in options.highlight_paths for flow_id in path.flow_ids
    }
    nodes = []
    for entity_id in sorted(graph.entities):
        entity = graph.entities[entity_id]
        code = entity.entity_type.code if isinstance(entity.entity_type, EntityType) else str(
            entity.entity_type
        )
        nodes.append(f"{_gvquote(entity_id)} [label={_gvquote(f'{entity_id} : {code}')}];")
    edges = []
    for relation_id in sorted(graph.relations):
        relation = graph.relations[relation_id]
        label = relation.relation
        role = relation.attributes.get("role")
        if isinstance(role, str):
            label += f" (role={role})"
        edges.append(
            f"{_gvquote(relation.source)} -> {_gvquote(relation.target)} "
            f"[label={_gvquote(label)}];"
        )
    for flow_id in sorted(graph.flows):
        flow = graph.flows[flow_id]
        label = flow_id
        if options.show_packages:
            label += f" [{flow.package}]"
        style = ", color=red, penwidth=2.0" if flow_id in highlighted else ""
        edges.append(
            f"{_gvquote(flow.source)} -> {_gvquote(flow.target)} "
            f"[label={_gvquote(label)}, style=dashed{style}];"
        )
    lines = [f"digraph {_gvquote(graph.name)} {{"]
    lines.extend("  " + n for n in sorted(nodes))
    lines.extend("  " + e for e in sorted(edges))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dump(document, pretty: bool) -> str:
    if pretty:
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    return json.dumps(document, separators=(",", ":"), ensure_ascii=False)


def graph_to_json(graph: InstanceGraph, pretty: bool = False) -> str:
    """Render a scenario as a stable JSON document, all sections sorted by id."""
    _check_well_formed(graph)
    document = {
        "scenario": graph.name,
        "entities": [
            {
                "id": e.id,
                "type": e.entity_type.code
                if isinstance(e.entity_type, EntityType)
                else str(e.entity_type),
                "attributes": {k: e.attributes[k] for k in sorted(e.attributes)},
            }
            for e in (graph.entities[i] for i in sorted(graph.entities))
        ],
        "packages": [
            {
                "id": p.id,
                "description": p.description,
                "items": list(p.items),
                "derives_from": list(p.derives_from),
            }
            for p in (graph.packages[i] for i in sorted(graph.packages))
        ],
        "relations": [
            {
                "id": r.id,
                "relation": r.relation,
                "source": r.source,
                "target": r.target,
                "attributes": {k: r.attributes[k] for k in sorted(r.attributes)},
            }
            for r in (graph.relations[i] for i in sorted(graph.relations))
        ],
        "flows": [
            {
                "id": f.id,
                "edge_type": f.edge_type,
                "source": f.source,
                "target": f.target,
                "package": f.package,
            }
            for f in (graph.flows[i] for i in sorted(graph.flows))
        ],
    }
    return _dump(document, pretty)


def report_to_json(report: "ValidationReport | ExposureReport", pretty: bool = False) -> str:
    """Render a validation or exposure report as its documented JSON shape."""
    if isinstance(report, ValidationReport):
        document = {
            "scenario": report.scenario,
            "violations": [
                {
                    "code": v.code.value,
                    "severity": v.severity,
                    "subject": v.subject,
                    "message": v.message,
                }
                for v in report.violations
            ],
        }
    elif isinstance(report, ExposureReport):
        document = {
            "person": report.person,
            "sinks": [
                {
                    "id": s.sink,
                    "type": s.sink_type,
                    "paths": [list(p.flow_ids) for p in s.paths],
                    "packages": list(s.packages),
                }
                for s in report.sinks
            ],
            "aggregation_points": [
                {"id": a.entity, "path_count": a.path_count}
                for a in report.aggregation_points
            ],
        }
    else:
        raise TypeError(f"unsupported report type {type(report).__name__}")
    return _dump(document, pretty)


def paths_to_json(results: list, pretty: bool = False) -> str:
    """Render path query results: arrays of flow ids for strict paths,
    {flows, packages} objects for lineage traces."""
    document = []
    for result in results:
        if isinstance(result, Path):
            document.append(list(result.flow_ids))
        elif isinstance(result, LineageTrace):
            document.append(
                {"flows": list(result.flow_ids), "packages": list(result.package_ids)}
            )
        else:
            raise TypeError(f"unsupported result type {type(result).__name__}")
    return _dump(document, pretty)
