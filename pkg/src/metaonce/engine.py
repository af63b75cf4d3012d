"""World orchestration: one serialized writer over ontology + log + graph.

The engine owns the WorldState, funnels every mutation through the rule
controller, appends the resulting event batch durably before the in-memory
world advances, and serves deterministic snapshot exports.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import analytics, merge, rules
from .errors import (
    ConceptMismatch,
    DuplicateScene,
    EngineError,
    InvalidSession,
    ParseError,
    UnknownQuery,
    UnknownScene,
)
from .events import Event, EventLog, ENTITY_ADDED, SCENE_CREATED, fold_event, stamp
from .graph import Entity, Scene, WorldState, canonical_json
from .ontology import Ontology, load_bundled_ontology, load_ontology
from .rules import ActionRequest, Decision


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8420
    data_dir: Path | None = None
    ontology_path: Path | None = None
    seed_path: Path | None = None
    max_hops: int = 8
    core_threshold: float = 0.5


@dataclass(frozen=True)
class Session:
    token: str
    entity: str
    created: int


@dataclass
class EdgeDelta:
    """Edges added/removed by one accepted action, derived ones included."""

    added: list[dict] = field(default_factory=list)
    removed: list[dict] = field(default_factory=list)


class Engine:
    def __init__(self, ontology: Ontology, log: EventLog):
        self.ontology = ontology
        self.log = log
        self.world: WorldState = log.replay(ontology)
        self.sessions: dict[str, Session] = {}
        self._lock = threading.RLock()

    @classmethod
    def open(cls, ontology: Ontology, data_dir: Path | str) -> "Engine":
        return cls(ontology, EventLog.open(data_dir))

    @classmethod
    def in_memory(cls, ontology: Ontology) -> "Engine":
        return cls(ontology, EventLog.in_memory())

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "Engine":
        if config.ontology_path is not None:
            ontology = load_ontology(Path(config.ontology_path).read_text("utf-8"))
        else:
            ontology = load_bundled_ontology()
        log = EventLog.open(config.data_dir) if config.data_dir else EventLog.in_memory()
        engine = cls(ontology, log)
        if config.seed_path is not None:
            engine.run_seed(Path(config.seed_path))
        return engine

    # -- sessions ----------------------------------------------------------

    def login(self, entity_id: str) -> Session:
        with self._lock:
            self.world.entity(entity_id)
            session = Session(token=uuid.uuid4().hex, entity=entity_id, created=self.world.last_event)
            self.sessions[session.token] = session
            return session

    def session(self, token: str) -> Session:
        try:
            return self.sessions[token]
        except KeyError:
            raise InvalidSession(f"unknown session token {token!r}") from None

    # -- world building ----------------------------------------------------

    def create_scene(self, scene: Scene) -> None:
        with self._lock:
            if scene.id in self.world.scenes:
                raise DuplicateScene(f"scene {scene.id!r} already exists")
            for relation_id in scene.allowed_relations:
                self.ontology.relation(relation_id)
            self._commit(
                Event(
                    seq=self.world.last_event + 1,
                    kind=SCENE_CREATED,
                    payload={
                        "id": scene.id,
                        "name": scene.name,
                        "allowed_relations": sorted(scene.allowed_relations),
                    },
                    ts=stamp(),
                )
            )

    def add_entity(self, entity: Entity, scene_id: str) -> None:
        with self._lock:
            graph = self.world.scene(scene_id)
            self.ontology.concept(entity.concept)
            existing = self.world.entities.get(entity.id)
            if existing is not None and existing != entity:
                raise ConceptMismatch(
                    f"entity {entity.id!r} already registered as "
                    f"({existing.name!r}, {existing.concept!r})"
                )
            if entity.id in graph.members:
                return
            self._commit(
                Event(
                    seq=self.world.last_event + 1,
                    kind=ENTITY_ADDED,
                    scene=scene_id,
                    payload={"id": entity.id, "name": entity.name, "concept": entity.concept},
                    ts=stamp(),
                )
            )

    def _commit(self, event: Event) -> None:
        self.log.append([event])
        fold_event(self.world, event, self.ontology)

    # -- actions -----------------------------------------------------------

    def submit_action(self, token: str, req: ActionRequest) -> tuple[Decision, EdgeDelta]:
        session = self.session(token)
        if req.actor != session.entity:
            decision = Decision(
                outcome=rules.REJECTED,
                reason_code=rules.NOT_AUTHORIZED,
                message=f"session is bound to {session.entity!r}, not {req.actor!r}",
                relation=req.relation,
            )
            return decision, EdgeDelta()
        return self.apply(req)

    def apply(self, req: ActionRequest) -> tuple[Decision, EdgeDelta]:
        with self._lock:
            _, events, decision = rules.submit(self.world, self.ontology, req, log=self.log)
            return decision, _delta_from_events(events)

    # -- reads ---------------------------------------------------------------

    def scene_snapshot(self, scene_id: str) -> dict:
        with self._lock:
            graph = self.world.scene(scene_id)
            full = self.world.snapshot()
            scene = next(s for s in full["scenes"] if s["id"] == scene_id)
            member_set = set(graph.members)
            return {
                "entities": [e for e in full["entities"] if e["id"] in member_set],
                "scenes": [scene],
            }

    def scene_snapshot_bytes(self, scene_id: str) -> bytes:
        return canonical_json(self.scene_snapshot(scene_id))

    def world_snapshot_bytes(self) -> bytes:
        with self._lock:
            return self.world.snapshot_bytes()

    def merged(self, scene_ids: list[str]) -> merge.MergedGraph:
        with self._lock:
            return merge.merge_scenes(self.world, scene_ids)

    def merged_snapshot_bytes(self, scene_ids: list[str]) -> bytes:
        return merge.merged_snapshot_bytes(self.merged(scene_ids))

    def list_scenes(self) -> list[dict]:
        with self._lock:
            return [
                {"id": scene_id, "name": graph.scene.name, "members": sorted(graph.members)}
                for scene_id, graph in sorted(self.world.scenes.items())
            ]

    def list_entities(self) -> list[dict]:
        with self._lock:
            return [
                {"id": e.id, "name": e.name, "concept": e.concept}
                for e in sorted(self.world.entities.values(), key=lambda e: e.id)
            ]

    def history(
        self,
        subject: str | None = None,
        obj: str | None = None,
        relation: str | None = None,
    ) -> list[dict]:
        with self._lock:
            return [e.to_record() for e in self.log.query_history(subject, obj, relation)]

    # -- analytics -----------------------------------------------------------

    def run_analytics(self, target: dict, query: str, params: dict, config: ServiceConfig | None = None) -> dict:
        config = config or ServiceConfig()
        with self._lock:
            graph = self._analysis_graph(target, params.get("weights"))
        result = _dispatch_analytics(graph, query, params, config)
        return {"query": query, "result": result}

    def _analysis_graph(self, target: dict, weights: dict | None) -> analytics.AnalysisGraph:
        if "scene" in target:
            return analytics.AnalysisGraph.from_scene(self.world, target["scene"], weights)
        if "scenes" in target:
            merged = merge.merge_scenes(self.world, list(target["scenes"]))
            return analytics.AnalysisGraph.from_merged(merged, weights)
        raise UnknownScene(f"analytics target must name a scene or scenes: {target!r}")

    # -- seeding ---------------------------------------------------------------

    def run_seed(self, path: Path) -> None:
        """Build a world from a seed script: scene/entity declarations plus an
        ordered list of actions. Skipped when the log already has history."""
        if len(self.log) > 0:
            return
        try:
            records = json.loads(Path(path).read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"seed script is not valid JSON: {exc}") from exc
        if not isinstance(records, list):
            raise ParseError("seed script must be a JSON array")
        for record in records:
            if not isinstance(record, dict):
                raise ParseError(f"malformed seed record: {record!r}")
            kind = record.get("declare")
            if kind == "scene":
                self.create_scene(
                    Scene(
                        id=record["id"],
                        name=record.get("name", record["id"]),
                        allowed_relations=frozenset(record.get("allowed_relations", [])),
                    )
                )
            elif kind == "entity":
                self.add_entity(
                    Entity(id=record["id"], name=record["name"], concept=record["concept"]),
                    record["scene"],
                )
            elif kind is None:
                req = ActionRequest(
                    actor=record["actor"],
                    verb=record["verb"],
                    subject=record["subject"],
                    relation=record["relation"],
                    object=record["object"],
                    scene=record["scene"],
                )
                decision, _ = self.apply(req)
                if not decision.accepted:
                    raise EngineError(
                        f"seed action {record!r} rejected: "
                        f"{decision.reason_code} {decision.message}"
                    )
            else:
                raise ParseError(f"unknown seed declaration {kind!r}")


def _delta_from_events(events: list[Event]) -> EdgeDelta:
    delta = EdgeDelta()
    for event in events:
        payload = dict(event.payload)
        entry = {
            "subject": payload.get("subject"),
            "relation": payload.get("relation"),
            "object": payload.get("object"),
            "scene": event.scene,
            "derived": event.cause is not None,
        }
        if event.kind in ("RelationEstablished", "DerivedRelationEstablished"):
            delta.added.append(entry)
        elif event.kind in ("RelationCancelled", "DerivedRelationCancelled"):
            delta.removed.append(entry)
    return delta


def _dispatch_analytics(
    graph: analytics.AnalysisGraph, query: str, params: dict, config: ServiceConfig
) -> object:
    if query == "traverse":
        return analytics.traverse(graph, params["start"], params.get("strategy", "bfs"))
    if query == "sssp":
        return {
            v: {"distance": d, "predecessor": p}
            for v, (d, p) in sorted(analytics.sssp(graph, params["source"]).items())
        }
    if query == "shortest_path":
        path = analytics.shortest_path(graph, params["source"], params["target"])
        return path.to_dict() if path is not None else None
    if query == "all_simple_paths":
        max_hops = int(params.get("max_hops", config.max_hops))
        paths = analytics.all_simple_paths(graph, params["source"], params["target"], max_hops)
        return [p.to_dict() for p in paths]
    if query == "evaluate_path":
        path = _resolve_path(graph, params["vertices"])
        return analytics.evaluate_path(path).to_dict()
    if query == "articulation_points":
        return sorted(analytics.articulation_points(graph))
    if query == "core_vertices":
        threshold = float(params.get("threshold", config.core_threshold))
        return sorted(analytics.core_vertices(graph, threshold))
    raise UnknownQuery(f"unknown analytics query {query!r}")


def _resolve_path(graph: analytics.AnalysisGraph, vertex_ids: list[str]) -> analytics.Path:
    """Build a Path from a vertex sequence using the graph's arcs."""
    if not vertex_ids:
        raise UnknownQuery("evaluate_path requires at least one vertex")
    for v in vertex_ids:
        graph.require(v)
    edges = []
    total = 0.0
    for u, v in zip(vertex_ids, vertex_ids[1:]):
        arc = graph.arc(u, v)
        if arc is None:
            raise UnknownQuery(f"no arc from {u!r} to {v!r}")
        weight, relation = arc
        edges.append((relation, weight))
        total += weight
    return analytics.Path(
        vertices=tuple(vertex_ids), edges=tuple(edges), total_weight=total, hops=len(edges)
    )


def bundled_seed_path() -> Path:
    """Filesystem path of the packaged three-scene demo seed."""
    return Path(str(resources.files("metaonce.data").joinpath("golden_seed.json")))
