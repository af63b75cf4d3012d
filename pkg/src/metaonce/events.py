"""Append-only event memory with deterministic replay.

Every change to the world is recorded here first; replaying the log folds
the same events through the same graph primitives the live path uses, so a
restarted process reconstructs a byte-identical world. Replay performs no
rule checks: logged events are historical facts.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import CorruptLog, EngineError, StorageError
from .graph import BanRecord, Edge, Entity, Scene, WorldState
from .ontology import Ontology

SCENE_CREATED = "SceneCreated"
ENTITY_ADDED = "EntityAdded"
RELATION_ESTABLISHED = "RelationEstablished"
RELATION_CANCELLED = "RelationCancelled"
DERIVED_RELATION_ESTABLISHED = "DerivedRelationEstablished"
DERIVED_RELATION_CANCELLED = "DerivedRelationCancelled"
BAN_RECORDED = "BanRecorded"

EVENT_KINDS = frozenset(
    {
        SCENE_CREATED,
        ENTITY_ADDED,
        RELATION_ESTABLISHED,
        RELATION_CANCELLED,
        DERIVED_RELATION_ESTABLISHED,
        DERIVED_RELATION_CANCELLED,
        BAN_RECORDED,
    }
)


@dataclass(frozen=True)
class Event:
    """One immutable entry of the metaverse's memory.

    ``seq`` is the authoritative order (gapless from 1). ``cause`` links a
    derived or ban event back to the event that triggered it. ``ts`` is
    wall-clock metadata only and never affects replay.
    """

    seq: int
    kind: str
    payload: Mapping[str, Any]
    scene: str | None = None
    cause: int | None = None
    ts: float | None = None

    def to_record(self) -> dict:
        record: dict[str, Any] = {"seq": self.seq, "kind": self.kind, "payload": dict(self.payload)}
        if self.scene is not None:
            record["scene"] = self.scene
        if self.cause is not None:
            record["cause"] = self.cause
        if self.ts is not None:
            record["ts"] = self.ts
        return record

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "Event":
        try:
            return cls(
                seq=int(record["seq"]),
                kind=record["kind"],
                payload=record.get("payload", {}),
                scene=record.get("scene"),
                cause=record.get("cause"),
                ts=record.get("ts"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptLog(f"malformed event record: {record!r}") from exc


def fold_event(world: WorldState, event: Event, ontology: Ontology) -> None:
    """Apply one historical event to the world. No rule checks."""
    if event.seq != world.last_event + 1:
        raise CorruptLog(f"event seq {event.seq} does not continue {world.last_event}")
    if event.kind not in EVENT_KINDS:
        raise CorruptLog(f"unknown event kind {event.kind!r}")
    payload = event.payload

    if event.kind == SCENE_CREATED:
        scene = Scene(
            id=payload["id"],
            name=payload["name"],
            allowed_relations=frozenset(payload.get("allowed_relations", [])),
        )
        world.create_scene(scene, ontology)
    elif event.kind == ENTITY_ADDED:
        entity = Entity(id=payload["id"], name=payload["name"], concept=payload["concept"])
        world.add_entity(entity, event.scene, ontology)
    elif event.kind in (RELATION_ESTABLISHED, DERIVED_RELATION_ESTABLISHED):
        world.scene(event.scene).insert_edge(
            Edge(
                subject=payload["subject"],
                relation=payload["relation"],
                object=payload["object"],
                scene=event.scene,
                origin_event=event.seq,
                derived_from=event.cause,
            )
        )
    elif event.kind in (RELATION_CANCELLED, DERIVED_RELATION_CANCELLED):
        world.scene(event.scene).remove_edge(payload["subject"], payload["relation"], payload["object"])
    elif event.kind == BAN_RECORDED:
        world.add_ban(
            BanRecord(
                pair=frozenset(payload["pair"]),
                relations=frozenset(payload["relations"]),
                origin_event=event.seq,
            )
        )
    world.last_event = event.seq


def replay(events: Iterable[Event], ontology: Ontology) -> WorldState:
    """Fold a well-formed event sequence into a fresh world."""
    world = WorldState()
    for event in events:
        try:
            fold_event(world, event, ontology)
        except CorruptLog:
            raise
        except (EngineError, KeyError, TypeError) as exc:
            raise CorruptLog(f"event {event.seq} cannot be applied: {exc}") from exc
    return world


def matches_filters(
    event: Event,
    subject: str | None = None,
    obj: str | None = None,
    relation: str | None = None,
) -> bool:
    """Event-history filter predicate.

    When both subject and object are given, relation events match as an
    unordered pair, so a derived mirror edge's events are included.
    """
    payload = event.payload
    if event.kind == BAN_RECORDED:
        pair = set(payload.get("pair", []))
        relations = set(payload.get("relations", []))
        if relation is not None and relation not in relations:
            return False
        if subject is not None and obj is not None:
            return {subject, obj} == pair
        if subject is not None:
            return subject in pair
        if obj is not None:
            return obj in pair
        return True

    ev_subject = payload.get("subject") if event.kind != ENTITY_ADDED else payload.get("id")
    ev_object = payload.get("object")
    ev_relation = payload.get("relation")
    if relation is not None and ev_relation != relation:
        return False
    if subject is not None and obj is not None:
        return {ev_subject, ev_object} == {subject, obj}
    if subject is not None and ev_subject != subject:
        return False
    if obj is not None and ev_object != obj:
        return False
    return True


class EventLog:
    """Durable, totally ordered event storage (one JSON object per line).

    A batch is flushed and fsynced before ``append`` returns; the in-memory
    world must never advance past the durable log.
    """

    FILENAME = "events.log"

    def __init__(self, path: Path | None):
        self._path = path
        self._events: list[Event] = []
        if path is not None and path.exists():
            self._events = list(self._read(path))

    @classmethod
    def open(cls, data_dir: Path | str) -> "EventLog":
        data_dir = Path(data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        return cls(data_dir / cls.FILENAME)

    @classmethod
    def in_memory(cls) -> "EventLog":
        return cls(None)

    @staticmethod
    def _read(path: Path) -> Iterable[Event]:
        previous = 0
        with path.open("r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorruptLog(f"{path}:{lineno}: malformed record") from exc
                event = Event.from_record(record)
                if event.seq != previous + 1:
                    raise CorruptLog(f"{path}:{lineno}: seq {event.seq} does not continue {previous}")
                previous = event.seq
                yield event

    @property
    def events(self) -> list[Event]:
        return list(self._events)

    def __len__(self) -> int:
        return len(self._events)

    @property
    def next_seq(self) -> int:
        return len(self._events) + 1

    def append(self, batch: list[Event]) -> "EventLog":
        """Durably extend the log with a gapless batch."""
        if not batch:
            return self
        expected = self.next_seq
        for event in batch:
            if event.seq != expected:
                raise ValueError(f"batch seq {event.seq} does not continue the log at {expected}")
            expected += 1
        if self._path is not None:
            try:
                with self._path.open("a", encoding="utf-8") as handle:
                    for event in batch:
                        handle.write(json.dumps(event.to_record(), ensure_ascii=False, sort_keys=True))
                        handle.write("\n")
                    handle.flush()
                    os.fsync(handle.fileno())
            except OSError as exc:
                raise StorageError(f"cannot append to {self._path}: {exc}") from exc
        self._events.extend(batch)
        return self

    def replay(self, ontology: Ontology) -> WorldState:
        return replay(self._events, ontology)

    def query_history(
        self,
        subject: str | None = None,
        obj: str | None = None,
        relation: str | None = None,
    ) -> list[Event]:
        return [e for e in self._events if matches_filters(e, subject, obj, relation)]


def stamp() -> float:
    """Wall-clock metadata for new events."""
    return time.time()
