"""Graph model and analysis tools for vehicle data-sharing scenarios.

The package models who can obtain data about whom in a vehicle-centric
ecosystem. A fixed type graph describes which kinds of entities exist and
which data flows between them are admissible; scenario instance graphs are
validated against it, and path enumeration over the flow edges turns a
scenario into a privacy exposure report.
"""
from __future__ import annotations

from vdse.analysis import (
    DEFAULT_MAX_PATH_LEN,
    AggregationPoint,
    ExposureReport,
    LineageTrace,
    Path,
    SinkExposure,
    brute_force_paths,
    enumerate_paths,
    exposure_report,
    reachable_from,
)
from vdse.dsl import parse, serialize
from vdse.errors import (
    AnalysisError,
    AttributeMisuseError,
    DanglingReferenceError,
    DuplicateIdError,
    GraphError,
    IdentifierError,
    MalformedGraphError,
    PackageConflictError,
    ParseError,
    SelfLoopError,
    UnknownTypeError,
    VdseError,
)
from vdse.export import (
    ExportOptions,
    graph_to_dot,
    graph_to_json,
    paths_to_json,
    report_to_json,
)
from vdse.graph import (
    DataPackage,
    EntityInstance,
    FlowInstance,
    InstanceGraph,
    SemanticRelationInstance,
    new_scenario,
)
from vdse.schema import (
    EntityType,
    FlowEdgeType,
    SemanticRelationType,
    TypeGraph,
    builtin_schema,
    type_graph_to_dot,
)
from vdse.validate import ValidationReport, Violation, ViolationCode, validate

__version__ = "0.1.0"

__all__ = [
    "AggregationPoint",
    "AnalysisError",
    "AttributeMisuseError",
    "DEFAULT_MAX_PATH_LEN",
    "DanglingReferenceError",
    "DataPackage",
    "DuplicateIdError",
    "EntityInstance",
    "EntityType",
    "ExportOptions",
    "ExposureReport",
    "FlowEdgeType",
    "FlowInstance",
    "GraphError",
    "IdentifierError",
    "InstanceGraph",
    "LineageTrace",
    "MalformedGraphError",
    "PackageConflictError",
    "ParseError",
    "Path",
    "SelfLoopError",
    "SemanticRelationInstance",
    "SemanticRelationType",
    "SinkExposure",
    "TypeGraph",
    "UnknownTypeError",
    "ValidationReport",
    "VdseError",
    "Violation",
    "ViolationCode",
    "brute_force_paths",
    "builtin_schema",
    "enumerate_paths",
    "exposure_report",
    "graph_to_dot",
    "graph_to_json",
    "new_scenario",
    "parse",
    "paths_to_json",
    "reachable_from",
    "report_to_json",
    "serialize",
    "type_graph_to_dot",
    "validate",
    "__version__",
]
