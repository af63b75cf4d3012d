"""Entities, scenes and directed typed edges: the mutable world state.

The world is owned by a single writer (the rule controller's apply path);
mutating methods here are the atomic primitives that writer composes. They
validate graph integrity only — rule constraints live one layer up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Literal

from .errors import (
    ConceptMismatch,
    DuplicateEdge,
    DuplicateScene,
    EdgeNotFound,
    NonMemberEndpoint,
    RelationNotAllowedInScene,
    UnknownEntity,
    UnknownScene,
)
from .ontology import Ontology


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    concept: str


@dataclass(frozen=True)
class Scene:
    """A context with its own (optionally restricted) relation vocabulary.

    An empty ``allowed_relations`` set means every relation is permitted.
    """

    id: str
    name: str
    allowed_relations: frozenset[str] = frozenset()

    def allows(self, relation_id: str) -> bool:
        return not self.allowed_relations or relation_id in self.allowed_relations


@dataclass(frozen=True)
class Edge:
    subject: str
    relation: str
    object: str
    scene: str
    origin_event: int
    derived_from: int | None = None

    @property
    def derived(self) -> bool:
        return self.derived_from is not None

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.subject, self.relation, self.object)


@dataclass(frozen=True)
class BanRecord:
    """Permanent prohibition on restoring a relation between two entities."""

    pair: frozenset[str]
    relations: frozenset[str]
    origin_event: int

    def covers(self, a: str, b: str, relation_id: str) -> bool:
        return self.pair == frozenset((a, b)) and relation_id in self.relations


class SceneGraph:
    """One scene's membership set and edge set."""

    def __init__(self, scene: Scene):
        self.scene = scene
        self.members: set[str] = set()
        self._edges: dict[tuple[str, str, str], Edge] = {}

    def __contains__(self, triple: tuple[str, str, str]) -> bool:
        return triple in self._edges

    def edge(self, subject: str, relation: str, obj: str) -> Edge | None:
        return self._edges.get((subject, relation, obj))

    def edges(self) -> list[Edge]:
        """Edges in deterministic (subject, relation, object) order."""
        return [self._edges[key] for key in sorted(self._edges)]

    def insert_edge(self, edge: Edge) -> None:
        if edge.triple in self._edges:
            raise DuplicateEdge(f"edge {edge.triple} already exists in scene {self.scene.id!r}")
        for endpoint in (edge.subject, edge.object):
            if endpoint not in self.members:
                raise NonMemberEndpoint(
                    f"entity {endpoint!r} is not a member of scene {self.scene.id!r}"
                )
        if not self.scene.allows(edge.relation):
            raise RelationNotAllowedInScene(
                f"relation {edge.relation!r} is not allowed in scene {self.scene.id!r}"
            )
        self._edges[edge.triple] = edge

    def remove_edge(self, subject: str, relation: str, obj: str) -> Edge:
        try:
            return self._edges.pop((subject, relation, obj))
        except KeyError:
            raise EdgeNotFound(
                f"no edge ({subject!r}, {relation!r}, {obj!r}) in scene {self.scene.id!r}"
            ) from None

    def neighbors(self, v: str, direction: Literal["out", "in", "both"] = "out") -> set[tuple[str, str]]:
        """Adjacent (relation, entity) pairs of ``v`` in the given direction."""
        if v not in self.members:
            raise UnknownEntity(f"entity {v!r} is not a member of scene {self.scene.id!r}")
        out: set[tuple[str, str]] = set()
        for edge in self._edges.values():
            if direction in ("out", "both") and edge.subject == v:
                out.add((edge.relation, edge.object))
            if direction in ("in", "both") and edge.object == v:
                out.add((edge.relation, edge.subject))
        return out


@dataclass
class WorldState:
    """Everything the rules can see: entities, scenes, bans, log position."""

    entities: dict[str, Entity] = field(default_factory=dict)
    scenes: dict[str, SceneGraph] = field(default_factory=dict)
    bans: list[BanRecord] = field(default_factory=list)
    last_event: int = 0

    # -- lookups ---------------------------------------------------------

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"unknown entity {entity_id!r}") from None

    def scene(self, scene_id: str) -> SceneGraph:
        try:
            return self.scenes[scene_id]
        except KeyError:
            raise UnknownScene(f"unknown scene {scene_id!r}") from None

    def iter_edges(self) -> Iterator[Edge]:
        """All edges across all scenes, in deterministic scene-then-triple order."""
        for scene_id in sorted(self.scenes):
            yield from self.scenes[scene_id].edges()

    def find_edges(
        self,
        subject: str | None = None,
        relation: str | None = None,
        obj: str | None = None,
    ) -> list[Edge]:
        return [
            e
            for e in self.iter_edges()
            if (subject is None or e.subject == subject)
            and (relation is None or e.relation == relation)
            and (obj is None or e.object == obj)
        ]

    def ban_covering(self, a: str, b: str, relation_id: str) -> BanRecord | None:
        for ban in self.bans:
            if ban.covers(a, b, relation_id):
                return ban
        return None

    # -- mutation primitives ----------------------------------------------

    def create_scene(self, scene: Scene, ontology: Ontology) -> None:
        if scene.id in self.scenes:
            raise DuplicateScene(f"scene {scene.id!r} already exists")
        for relation_id in scene.allowed_relations:
            ontology.relation(relation_id)
        self.scenes[scene.id] = SceneGraph(scene)

    def add_entity(self, entity: Entity, scene_id: str, ontology: Ontology) -> None:
        """Register an entity globally and add it to a scene's members.

        One id maps to exactly one (name, concept) pair across the whole
        world, so a re-used id must match its original registration.
        """
        graph = self.scene(scene_id)
        ontology.concept(entity.concept)
        existing = self.entities.get(entity.id)
        if existing is not None and existing != entity:
            raise ConceptMismatch(
                f"entity {entity.id!r} already registered as "
                f"({existing.name!r}, {existing.concept!r})"
            )
        self.entities[entity.id] = entity
        graph.members.add(entity.id)

    def add_ban(self, ban: BanRecord) -> None:
        self.bans.append(ban)

    # -- export ------------------------------------------------------------

    def snapshot(self) -> dict:
        """Deterministic dict form of the graph state (no bans, no log)."""
        return {
            "entities": [
                {"id": e.id, "name": e.name, "concept": e.concept}
                for e in sorted(self.entities.values(), key=lambda e: e.id)
            ],
            "scenes": [
                {
                    "id": scene_id,
                    "name": graph.scene.name,
                    "members": sorted(graph.members),
                    "edges": [
                        {
                            "subject": e.subject,
                            "relation": e.relation,
                            "object": e.object,
                            "derived": e.derived,
                        }
                        for e in graph.edges()
                    ],
                }
                for scene_id, graph in sorted(self.scenes.items())
            ],
        }

    def snapshot_bytes(self) -> bytes:
        return canonical_json(self.snapshot())


def canonical_json(data: object) -> bytes:
    """Byte-stable JSON encoding used by every export surface."""
    return json.dumps(data, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8")
