"""Entity-level scenario graphs.

A scenario holds entity instances, semantic relation instances, directed
data flows, and the data packages those flows carry. Mutations are
atomic: every precondition is checked before anything is inserted, so a
raised GraphError leaves the graph exactly as it was. A graph that is no
longer being mutated is safe to share across threads.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from vdse.errors import (
    AttributeMisuseError,
    DanglingReferenceError,
    DuplicateIdError,
    IdentifierError,
    PackageConflictError,
    SelfLoopError,
    UnknownTypeError,
)
from vdse.schema import EntityType, TypeGraph, builtin_schema

__all__ = [
    "AttrValue",
    "Attrs",
    "EntityInstance",
    "DataPackage",
    "SemanticRelationInstance",
    "FlowInstance",
    "InstanceGraph",
    "new_scenario",
    "check_entity_attributes",
    "IDENT_RE",
    "FLOW_ID_RE",
]

AttrValue = str | bool | list[str]
Attrs = dict[str, AttrValue]

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
# Flow ids may carry a .fwd/.rev suffix; those only arise as the two
# halves of a bidirectional flow declaration.
FLOW_ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*(\.fwd|\.rev)?\Z")

# Reserved entity attribute names and where they are admissible.
_LIST_ATTRS = ("static", "dynamic")
_VEHICLE_TYPES = (EntityType.VEHICLE, EntityType.VEHICLE_COMPONENT)


@dataclass
class EntityInstance:
    id: str
    entity_type: EntityType
    attributes: dict = field(default_factory=dict)

    @property
    def privacy_preserving(self) -> bool:
        return bool(self.attributes.get("privacy_preserving", False))


@dataclass
class DataPackage:
    """A bundle of data items exchanged over one or more flows."""

    id: str
    description: str = ""
    items: list = field(default_factory=list)
    derives_from: tuple = ()


@dataclass
class SemanticRelationInstance:
    id: str
    relation: str
    source: str
    target: str
    attributes: dict = field(default_factory=dict)


@dataclass
class FlowInstance:
    """A directed data flow carrying exactly one package."""

    id: str
    edge_type: str
    source: str
    target: str
    package: str


def _check_identifier(id_: str, kind: str, pattern: re.Pattern = IDENT_RE) -> None:
    if not isinstance(id_, str) or not pattern.match(id_):
        raise IdentifierError(f"invalid {kind} id {id_!r}")


def _check_attr_shape(key: str, value) -> None:
    _check_identifier(key, "attribute")
    if isinstance(value, bool) or isinstance(value, str):
        return
    if isinstance(value, list):
        if not value:
            raise AttributeMisuseError(
                f"attribute {key!r} is an empty list; omit the attribute instead"
            )
        if all(isinstance(item, str) for item in value):
            return
    raise AttributeMisuseError(
        f"attribute {key!r} must be text, a truth value, or a list of text"
    )


def check_entity_attributes(
    schema: TypeGraph, entity_type: EntityType, attributes: dict
) -> list[str]:
    """Return reserved-attribute problems for an entity, empty when clean."""
    problems: list[str] = []
    for key in _LIST_ATTRS:
        if key in attributes:
            if not any(schema.is_subtype(entity_type, t) for t in _VEHICLE_TYPES):
                problems.append(f"{key!r} is only allowed on V or VC entities")
            elif not (
                isinstance(attributes[key], list)
                and all(isinstance(i, str) for i in attributes[key])
            ):
                problems.append(f"{key!r} must be a list of text")
    if "category" in attributes:
        if not schema.is_subtype(entity_type, EntityType.ORGANISATION):
            problems.append("'category' is only allowed on O, G, or SP entities")
        elif not isinstance(attributes["category"], str):
            problems.append("'category' must be text")
    if "privacy_preserving" in attributes and not isinstance(
        attributes["privacy_preserving"], bool
    ):
        problems.append("'privacy_preserving' must be a truth value")
    if "label" in attributes and not isinstance(attributes["label"], str):
        problems.append("'label' must be text")
    return problems


def _validated_attrs(schema: TypeGraph, entity_type: EntityType | None, attributes: dict) -> dict:
    attrs = dict(attributes or {})
    for key, value in attrs.items():
        _check_attr_shape(key, value)
    if entity_type is not None:
        problems = check_entity_attributes(schema, entity_type, attrs)
        if problems:
            raise AttributeMisuseError("; ".join(problems))
    return attrs


@dataclass
class InstanceGraph:
    """A named scenario over the built-in type graph."""

    name: str
    entities: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    flows: dict = field(default_factory=dict)
    packages: dict = field(default_factory=dict)

    # -- entities ---------------------------------------------------------

    def add_entity(
        self, id_: str, entity_type: EntityType | str, attributes: dict | None = None
    ) -> "InstanceGraph":
        schema = builtin_schema()
        _check_identifier(id_, "entity")
        etype = EntityType.coerce(entity_type)
        if etype is EntityType.DATA_PACKAGE:
            raise UnknownTypeError(
                "DataPackage is not an instantiable entity type; "
                "declare a package and attach it to a flow instead"
            )
        if id_ in self.entities:
            raise DuplicateIdError(f"entity id {id_!r} already declared")
        attrs = _validated_attrs(schema, etype, attributes or {})
        self.entities[id_] = EntityInstance(id_, etype, attrs)
        return self

    # -- packages ---------------------------------------------------------

    def add_package(self, package: DataPackage) -> "InstanceGraph":
        """Register a package. Derivations must point at existing packages,
        which keeps the derivation relation acyclic by construction."""
        _check_identifier(package.id, "package")
        if package.id in self.packages:
            raise DuplicateIdError(f"package id {package.id!r} already declared")
        if not isinstance(package.description, str):
            raise AttributeMisuseError("package description must be text")
        if not all(isinstance(i, str) for i in package.items):
            raise AttributeMisuseError("package items must be text")
        seen: set[str] = set()
        for ancestor in package.derives_from:
            if ancestor in seen:
                raise PackageConflictError(
                    f"package {package.id!r} lists derivation {ancestor!r} twice"
                )
            seen.add(ancestor)
            if ancestor not in self.packages:
                raise DanglingReferenceError(
                    f"package {package.id!r} derives from unknown package {ancestor!r}"
                )
        stored = DataPackage(
            package.id,
            package.description,
            list(package.items),
            tuple(sorted(package.derives_from)),
        )
        self.packages[package.id] = stored
        return self

    def _resolve_package(self, package: "DataPackage | str", flow_id: str) -> str:
        if isinstance(package, str):
            if package not in self.packages:
                raise DanglingReferenceError(
                    f"flow {flow_id!r} references unknown package {package!r}"
                )
            return package
        if package.id in self.packages:
            existing = self.packages[package.id]
            offered = DataPackage(
                package.id,
                package.description,
                list(package.items),
                tuple(sorted(package.derives_from)),
            )
            if existing != offered:
                raise PackageConflictError(
                    f"package {package.id!r} redeclared with different content"
                )
            return package.id
        self.add_package(package)
        return package.id

    # -- flows ------------------------------------------------------------

    def _check_flow(self, id_: str, edge_type: str, source: str, target: str) -> None:
        builtin_schema().flow_edge_type(edge_type)
        if id_ in self.flows:
            raise DuplicateIdError(f"flow id {id_!r} already declared")
        for endpoint in (source, target):
            if endpoint not in self.entities:
                raise DanglingReferenceError(
                    f"flow {id_!r} references unknown entity {endpoint!r}"
                )
        if source == target:
            raise SelfLoopError(f"flow {id_!r} connects {source!r} to itself")

    def add_flow(
        self,
        id_: str,
        edge_type: str,
        source: str,
        target: str,
        package: "DataPackage | str",
    ) -> "InstanceGraph":
        _check_identifier(id_, "flow")
        self._check_flow(id_, edge_type, source, target)
        package_id = self._resolve_package(package, id_)
        self.flows[id_] = FlowInstance(id_, edge_type, source, target, package_id)
        return self

    def add_bidirectional_flow(
        self,
        id_: str,
        edge_type: str,
        source: str,
        target: str,
        package: "DataPackage | str",
    ) -> "InstanceGraph":
        """Declare both directions of an exchange as `<id>.fwd` and
        `<id>.rev`, sharing one package."""
        _check_identifier(id_, "flow")
        fwd, rev = f"{id_}.fwd", f"{id_}.rev"
        self._check_flow(fwd, edge_type, source, target)
        self._check_flow(rev, edge_type, target, source)
        package_id = self._resolve_package(package, id_)
        self.flows[fwd] = FlowInstance(fwd, edge_type, source, target, package_id)
        self.flows[rev] = FlowInstance(rev, edge_type, target, source, package_id)
        return self

    # -- semantic relations -------------------------------------------------

    def add_semantic_relation(
        self,
        id_: str,
        relation: str,
        source: str,
        target: str,
        attributes: dict | None = None,
    ) -> "InstanceGraph":
        _check_identifier(id_, "relation")
        if relation not in builtin_schema().semantic_relations:
            raise UnknownTypeError(f"unknown semantic relation {relation!r}")
        if id_ in self.relations:
            raise DuplicateIdError(f"relation id {id_!r} already declared")
        for endpoint in (source, target):
            if endpoint not in self.entities:
                raise DanglingReferenceError(
                    f"relation {id_!r} references unknown entity {endpoint!r}"
                )
        attrs = _validated_attrs(builtin_schema(), None, attributes or {})
        self.relations[id_] = SemanticRelationInstance(id_, relation, source, target, attrs)
        return self

    # -- queries ------------------------------------------------------------

    def entity_type_of(self, entity_id: str) -> EntityType:
        return self.entities[entity_id].entity_type


def new_scenario(name: str) -> InstanceGraph:
    """Create an empty scenario graph with a non-empty name."""
    if not isinstance(name, str) or not name:
        raise IdentifierError("scenario name must be non-empty text")
    return InstanceGraph(name=name)
