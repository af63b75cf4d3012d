import random

import pytest

from metaonce.errors import EmptySelection, UnknownEntity, UnknownScene
from metaonce.graph import Edge, Entity, Scene, WorldState
from metaonce.merge import joint_relations, merge_scenes, merged_snapshot, merged_snapshot_bytes
from metaonce.ontology import load_ontology

from oracles import brute_merge_union
from worldgen import random_merge_world


class TestGoldenMerge:
    def test_two_scene_merge_aligns_shared_entity(self, golden_engine):
        merged = merge_scenes(golden_engine.world, ["s1", "s2"])
        assert set(merged.entities) == {"a6", "c1", "a5", "d4", "a3", "d5"}
        assert ("a6", "BuyAction", "c1") in merged.edges
        assert ("a5", "FollowAction", "a3") in merged.edges
        # a5 appears in both scenes but is one aligned vertex
        assert sum(1 for e in merged.entities if e == "a5") == 1

    def test_single_scene_merge_is_the_scene(self, golden_engine):
        world = golden_engine.world
        merged = merge_scenes(world, ["s1"])
        graph = world.scene("s1")
        assert set(merged.entities) == graph.members
        assert set(merged.edges) == {e.triple for e in graph.edges()}
        assert all(prov == frozenset({"s1"}) for prov in merged.edges.values())

    def test_three_scene_edge_count_matches_enumeration(self, golden_engine):
        merged = merge_scenes(golden_engine.world, ["s1", "s2", "s3"])
        _, triples = brute_merge_union(golden_engine.world, ["s1", "s2", "s3"])
        assert set(merged.edges) == set(triples)
        assert {t: set(p) for t, p in merged.edges.items()} == triples

    def test_unknown_scene(self, golden_engine):
        with pytest.raises(UnknownScene):
            merge_scenes(golden_engine.world, ["s1", "nope"])

    def test_empty_selection(self, golden_engine):
        with pytest.raises(EmptySelection):
            merge_scenes(golden_engine.world, [])


class TestJointRelations:
    @pytest.fixture
    def cross_scene_world(self):
        onto = load_ontology(
            """
            {"concepts": [{"id": "/Thing", "label": "Thing", "parent": null}],
             "relations": [
               {"id": "kill", "label": "kill", "subject": "/Thing", "object": "/Thing", "rules": []},
               {"id": "teacher-of", "label": "teacher", "subject": "/Thing", "object": "/Thing", "rules": []}
             ],
             "events": []}
            """
        )
        world = WorldState()
        for sid, name in (("game", "Online game"), ("class", "Classroom")):
            world.create_scene(Scene(id=sid, name=name), onto)
        for eid in ("A", "B"):
            world.add_entity(Entity(eid, eid, "/Thing"), "game", onto)
            world.add_entity(Entity(eid, eid, "/Thing"), "class", onto)
        world.scene("game").insert_edge(Edge("A", "kill", "B", "game", origin_event=1))
        world.scene("class").insert_edge(Edge("B", "teacher-of", "A", "class", origin_event=2))
        return world

    def test_both_directions_with_provenance(self, cross_scene_world):
        merged = merge_scenes(cross_scene_world, ["game", "class"])
        relations = joint_relations(merged, "A", "B")
        assert relations == {
            ("kill", "out", frozenset({"game"})),
            ("teacher-of", "in", frozenset({"class"})),
        }

    def test_unrelated_pair_is_empty(self, golden_engine):
        merged = merge_scenes(golden_engine.world, ["s1", "s2"])
        assert joint_relations(merged, "c1", "d5") == set()

    def test_equals_brute_force_filter(self, cross_scene_world):
        merged = merge_scenes(cross_scene_world, ["game", "class"])
        expected = set()
        for (subject, relation, obj), provenance in merged.edges.items():
            if {subject, obj} <= {"A", "B"} and subject != obj:
                direction = "out" if subject == "A" else "in"
                expected.add((relation, direction, provenance))
        assert joint_relations(merged, "A", "B") == expected

    def test_unknown_entity(self, golden_engine):
        merged = merge_scenes(golden_engine.world, ["s1"])
        with pytest.raises(UnknownEntity):
            joint_relations(merged, "a6", "zz")


class TestMergeProperties:
    def test_randomized_worlds(self):
        rng = random.Random(4321)
        for _ in range(40):
            world, scene_ids = random_merge_world(rng)
            merged = merge_scenes(world, scene_ids)

            members, triples = brute_merge_union(world, scene_ids)
            assert set(merged.entities) == members  # conservation
            assert {t: set(p) for t, p in merged.edges.items()} == triples

            shuffled = scene_ids[:]
            rng.shuffle(shuffled)
            assert merge_scenes(world, shuffled) == merged  # permutation invariance

            duplicated = scene_ids + [rng.choice(scene_ids)]
            assert merge_scenes(world, duplicated) == merged  # idempotence

            for scene_id in scene_ids:  # monotonicity
                scene_triples = {e.triple for e in world.scenes[scene_id].edges()}
                assert scene_triples <= set(merged.edges)

    def test_export_is_deterministic(self, golden_engine):
        a = merged_snapshot_bytes(merge_scenes(golden_engine.world, ["s1", "s2", "s3"]))
        b = merged_snapshot_bytes(merge_scenes(golden_engine.world, ["s1", "s2", "s3"]))
        assert a == b

    def test_export_shape(self, golden_engine):
        merged = merge_scenes(golden_engine.world, ["s2", "s1"])
        doc = merged_snapshot(merged)
        assert doc["source_scenes"] == ["s2", "s1"]
        assert [e["id"] for e in doc["entities"]] == sorted(e["id"] for e in doc["entities"])
        for edge in doc["edges"]:
            assert edge["scenes"] == sorted(edge["scenes"])
