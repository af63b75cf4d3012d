"""Multi-scene graph merging: align entities by id, union the relations.

A merged graph is a read-only view for joint analysis; rules are enforced at
action time, never re-evaluated here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptySelection, UnknownEntity
from .graph import Entity, WorldState, canonical_json

Triple = tuple[str, str, str]


@dataclass(frozen=True, eq=False)
class MergedGraph:
    """Union of several scene graphs with per-edge scene provenance.

    Equality compares the aligned entity set and the provenance-tagged edge
    set; the order scenes were selected in does not matter.
    """

    entities: dict[str, Entity]
    edges: dict[Triple, frozenset[str]]
    source_scenes: tuple[str, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MergedGraph):
            return NotImplemented
        return self.entities == other.entities and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((frozenset(self.entities), frozenset(self.edges.items())))


def merge_scenes(world: WorldState, scenes: list[str]) -> MergedGraph:
    """Merge the named scenes; identical triples collapse with multi-scene
    provenance, entities align by id."""
    if not scenes:
        raise EmptySelection("at least one scene is required")
    selection: list[str] = []
    for scene_id in scenes:
        world.scene(scene_id)  # raises UnknownScene
        if scene_id not in selection:
            selection.append(scene_id)

    entities: dict[str, Entity] = {}
    edges: dict[Triple, set[str]] = {}
    for scene_id in selection:
        graph = world.scenes[scene_id]
        for member in graph.members:
            entities[member] = world.entities[member]
        for edge in graph.edges():
            edges.setdefault(edge.triple, set()).add(scene_id)
    return MergedGraph(
        entities=entities,
        edges={triple: frozenset(provenance) for triple, provenance in edges.items()},
        source_scenes=tuple(selection),
    )


def joint_relations(merged: MergedGraph, a: str, b: str) -> set[tuple[str, str, frozenset[str]]]:
    """All relations between two aligned entities, both directions.

    Returns (relation, direction, provenance) with direction seen from ``a``:
    "out" for a->b edges, "in" for b->a edges.
    """
    for entity_id in (a, b):
        if entity_id not in merged.entities:
            raise UnknownEntity(f"entity {entity_id!r} is not in the merged graph")
    out: set[tuple[str, str, frozenset[str]]] = set()
    for (subject, relation, obj), provenance in merged.edges.items():
        if subject == a and obj == b:
            out.add((relation, "out", provenance))
        elif subject == b and obj == a:
            out.add((relation, "in", provenance))
    return out


def merged_snapshot(merged: MergedGraph) -> dict:
    """Deterministic dict form of a merged graph."""
    return {
        "entities": [
            {"id": e.id, "name": e.name, "concept": e.concept}
            for e in sorted(merged.entities.values(), key=lambda e: e.id)
        ],
        "edges": [
            {
                "subject": subject,
                "relation": relation,
                "object": obj,
                "scenes": sorted(merged.edges[(subject, relation, obj)]),
            }
            for subject, relation, obj in sorted(merged.edges)
        ],
        "source_scenes": list(merged.source_scenes),
    }


def merged_snapshot_bytes(merged: MergedGraph) -> bytes:
    return canonical_json(merged_snapshot(merged))
