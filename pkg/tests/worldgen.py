"""Seeded random generators for worlds, ontologies and analysis graphs."""

from __future__ import annotations

import random

from metaonce.analytics import AnalysisGraph
from metaonce.graph import Edge, Entity, Scene, WorldState
from metaonce.ontology import Ontology, load_ontology

RELATION_POOL = ("r_link", "r_ties", "r_near", "r_owes")


def random_analysis_graph(
    rng: random.Random, max_vertices: int = 12, arc_probability: float = 0.18
) -> tuple[list[str], list[tuple[str, str, str, float]], AnalysisGraph]:
    """Sparse directed graph with integer weights (so float sums stay exact).

    At most one arc per ordered pair, which keeps the oracle comparisons
    one-to-one with the implementation's collapsed adjacency.
    """
    n = rng.randint(2, max_vertices)
    vertices = [f"v{i:02d}" for i in range(n)]
    arcs = []
    for u in vertices:
        for v in vertices:
            if u != v and rng.random() < arc_probability:
                weight = float(rng.randint(0, 9))
                arcs.append((u, rng.choice(RELATION_POOL), v, weight))
    return vertices, arcs, AnalysisGraph(vertices, arcs, directed=True)


def random_merge_world(
    rng: random.Random,
    max_scenes: int = 5,
    max_entities: int = 15,
    max_edges: int = 40,
) -> tuple[WorldState, list[str]]:
    """World with overlapping scene memberships and duplicated triples,
    built straight from the graph primitives (merging is rule-agnostic)."""
    ontology = _plain_ontology()
    world = WorldState()
    scene_ids = [f"s{i}" for i in range(1, rng.randint(2, max_scenes) + 1)]
    for scene_id in scene_ids:
        world.create_scene(Scene(id=scene_id, name=f"Scene {scene_id}"), ontology)
    entity_ids = [f"e{i:02d}" for i in range(rng.randint(3, max_entities))]
    for entity_id in entity_ids:
        entity = Entity(id=entity_id, name=f"Entity {entity_id}", concept="/Thing")
        for scene_id in rng.sample(scene_ids, rng.randint(1, len(scene_ids))):
            world.add_entity(entity, scene_id, ontology)

    placed = 0
    attempts = 0
    target = rng.randint(0, max_edges)
    while placed < target and attempts < target * 10:
        attempts += 1
        scene_id = rng.choice(scene_ids)
        graph = world.scenes[scene_id]
        members = sorted(graph.members)
        if len(members) < 2:
            continue
        subject, obj = rng.sample(members, 2)
        relation = rng.choice(RELATION_POOL)
        if (subject, relation, obj) in graph:
            continue
        placed += 1
        graph.insert_edge(
            Edge(
                subject=subject,
                relation=relation,
                object=obj,
                scene=scene_id,
                origin_event=placed,
            )
        )
        # Bias toward cross-scene duplicate triples so provenance merging is exercised.
        if rng.random() < 0.35:
            other = rng.choice(scene_ids)
            other_graph = world.scenes[other]
            if (
                other != scene_id
                and subject in other_graph.members
                and obj in other_graph.members
                and (subject, relation, obj) not in other_graph
            ):
                other_graph.insert_edge(
                    Edge(
                        subject=subject,
                        relation=relation,
                        object=obj,
                        scene=other,
                        origin_event=placed,
                    )
                )
    return world, scene_ids


def _plain_ontology() -> Ontology:
    import json

    doc = {
        "concepts": [{"id": "/Thing", "label": "Thing", "parent": None}],
        "relations": [
            {"id": rid, "label": rid, "subject": "/Thing", "object": "/Thing", "rules": []}
            for rid in RELATION_POOL
        ],
        "events": [],
    }
    return load_ontology(json.dumps(doc))


def random_rule_ontology(rng: random.Random) -> Ontology:
    """Ontology exercising all five constraint families with valid companions."""
    import json

    concepts = [
        {"id": "/Thing", "label": "Thing", "parent": None},
        {"id": "/Thing/Agent", "label": "Agent", "parent": "/Thing"},
        {"id": "/Thing/Asset", "label": "Asset", "parent": "/Thing"},
        {"id": "/Thing/Agent/Robot", "label": "Robot", "parent": "/Thing/Agent"},
    ]
    relations = [
        {"id": "PlainLink", "label": "PlainLink", "subject": "/Thing", "object": "/Thing", "rules": []},
        {"id": "OwnedBy", "label": "OwnedBy", "subject": "/Thing/Asset", "object": "/Thing", "rules": []},
        {
            "id": "Claim",
            "label": "Claim",
            "subject": "/Thing",
            "object": "/Thing/Asset",
            "rules": ["exclusive", "co_occurrence", "mutual_termination"],
            "companion": "OwnedBy",
        },
        {
            "id": "Bond",
            "label": "Bond",
            "subject": "/Thing/Agent",
            "object": "/Thing/Agent",
            "rules": ["exclusive", "symmetric", "irreversible"],
            "companion": "Bond",
        },
        {
            "id": "Pact",
            "label": "Pact",
            "subject": "/Thing",
            "object": "/Thing",
            "rules": ["symmetric"],
        },
        {
            "id": "Oath",
            "label": "Oath",
            "subject": "/Thing/Agent",
            "object": "/Thing/Agent",
            "rules": ["irreversible"],
            "companion": "Oath",
        },
        {
            "id": "Hold",
            "label": "Hold",
            "subject": "/Thing",
            "object": "/Thing",
            "rules": ["exclusive"],
        },
    ]
    doc = {"concepts": concepts, "relations": relations, "events": []}
    return load_ontology(json.dumps(doc))


def random_rule_world(rng: random.Random, ontology: Ontology) -> WorldState:
    """Scenes and entities for constraint fuzzing (edges come from requests)."""
    world = WorldState()
    concepts = ["/Thing/Agent", "/Thing/Asset", "/Thing/Agent/Robot", "/Thing"]
    scene_ids = [f"s{i}" for i in range(1, rng.randint(2, 3) + 1)]
    relation_ids = sorted(ontology.relation_types)
    for scene_id in scene_ids:
        if rng.random() < 0.25:
            allowed = frozenset(rng.sample(relation_ids, rng.randint(3, len(relation_ids))))
        else:
            allowed = frozenset()
        world.create_scene(Scene(id=scene_id, name=f"Scene {scene_id}", allowed_relations=allowed), ontology)
    for i in range(rng.randint(6, 12)):
        entity = Entity(id=f"e{i:02d}", name=f"Entity {i}", concept=rng.choice(concepts))
        for scene_id in rng.sample(scene_ids, rng.randint(1, len(scene_ids))):
            world.add_entity(entity, scene_id, ontology)
    return world
