import json

import pytest

from metaonce import Engine
from metaonce.engine import bundled_seed_path
from metaonce.errors import CorruptLog, StorageError
from metaonce.events import Event, EventLog, replay
from metaonce.graph import Entity
from metaonce.rules import (
    CANCEL,
    ESTABLISH,
    IRREVERSIBLE_BAN,
    ActionRequest,
    check_establish,
)


def _marry_divorce(engine):
    for verb in (ESTABLISH, CANCEL):
        decision, _ = engine.apply(
            ActionRequest(actor="a6", verb=verb, subject="a6", relation="MarryAction", object="a3", scene="s1")
        )
        assert decision.accepted


class TestAppend:
    def test_purchase_appends_two_events_sharing_one_boundary(self, golden_engine):
        golden_engine.add_entity(Entity("c2", "Shield", "/Thing/Product"), "s1")
        before = len(golden_engine.log)
        decision, _ = golden_engine.apply(
            ActionRequest(actor="a6", verb=ESTABLISH, subject="a6", relation="BuyAction", object="c2", scene="s1")
        )
        assert decision.accepted
        assert len(golden_engine.log) == before + 2
        primary, derived = golden_engine.log.events[-2:]
        assert primary.kind == "RelationEstablished"
        assert derived.kind == "DerivedRelationEstablished"
        assert derived.cause == primary.seq  # one action boundary

    def test_rejected_action_appends_nothing(self, golden_engine):
        before = len(golden_engine.log)
        decision, _ = golden_engine.apply(
            ActionRequest(actor="a3", verb=ESTABLISH, subject="a3", relation="BuyAction", object="c1", scene="s1")
        )
        assert not decision.accepted  # c1 already owned
        assert len(golden_engine.log) == before

    def test_empty_batch_is_identity(self):
        log = EventLog.in_memory()
        assert log.append([]) is log
        assert len(log) == 0

    def test_gap_rejected(self):
        log = EventLog.in_memory()
        with pytest.raises(ValueError):
            log.append([Event(seq=2, kind="SceneCreated", payload={"id": "x", "name": "x"})])


class TestReplay:
    def test_empty_log(self, ontology):
        world = replay([], ontology)
        assert world.entities == {}
        assert world.scenes == {}
        assert world.last_event == 0

    def test_golden_scenario_round_trip(self, ontology, tmp_path):
        engine = Engine.open(ontology, tmp_path)
        engine.run_seed(bundled_seed_path())
        _marry_divorce(engine)
        live = engine.world.snapshot_bytes()

        reopened = Engine.open(ontology, tmp_path)
        assert reopened.world.snapshot_bytes() == live
        assert reopened.world.last_event == engine.world.last_event

    def test_replay_is_deterministic(self, golden_engine, ontology):
        events = golden_engine.log.events
        a = replay(events, ontology).snapshot_bytes()
        b = replay(events, ontology).snapshot_bytes()
        assert a == b

    def test_ban_survives_replay(self, ontology, tmp_path):
        engine = Engine.open(ontology, tmp_path)
        engine.run_seed(bundled_seed_path())
        _marry_divorce(engine)

        reopened = Engine.open(ontology, tmp_path)
        verdict = check_establish(
            reopened.world,
            ontology,
            ActionRequest(actor="a6", verb=ESTABLISH, subject="a6", relation="MarryAction", object="a3", scene="s1"),
        )
        assert verdict.reason_code == IRREVERSIBLE_BAN

    def test_prefix_consistency(self, golden_engine, ontology):
        events = golden_engine.log.events
        for cut in range(len(events) + 1):
            world = replay(events[:cut], ontology)
            for edge in world.iter_edges():
                graph = world.scene(edge.scene)
                assert edge.subject in graph.members and edge.object in graph.members

    def test_malformed_line(self, ontology, tmp_path):
        path = tmp_path / "events.log"
        path.write_text('{"seq": 1, "kind": "SceneCreated"\n', encoding="utf-8")
        with pytest.raises(CorruptLog):
            EventLog(path)

    def test_gap_in_file(self, tmp_path):
        path = tmp_path / "events.log"
        lines = [
            json.dumps({"seq": 1, "kind": "SceneCreated", "payload": {"id": "x", "name": "x"}}),
            json.dumps({"seq": 3, "kind": "SceneCreated", "payload": {"id": "y", "name": "y"}}),
        ]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(CorruptLog):
            EventLog(path)

    def test_dangling_reference(self, ontology):
        events = [
            Event(seq=1, kind="RelationEstablished", scene="nope", payload={"subject": "a", "relation": "r", "object": "b"})
        ]
        with pytest.raises(CorruptLog):
            replay(events, ontology)


class TestDurability:
    def test_log_file_lines_match_events(self, ontology, tmp_path):
        engine = Engine.open(ontology, tmp_path)
        engine.run_seed(bundled_seed_path())
        lines = (tmp_path / "events.log").read_text("utf-8").strip().splitlines()
        assert len(lines) == len(engine.log)
        assert [json.loads(line)["seq"] for line in lines] == list(range(1, len(lines) + 1))

    def test_unwritable_path_raises_storage_error(self, tmp_path):
        log = EventLog(tmp_path / "events.log")
        (tmp_path / "events.log").mkdir()  # opening a directory for append fails
        with pytest.raises(StorageError):
            log.append([Event(seq=1, kind="SceneCreated", payload={"id": "x", "name": "x"})])
        assert len(log) == 0  # the in-memory view never ran ahead of storage

    def test_failed_append_leaves_world_untouched(self, ontology, tmp_path, monkeypatch):
        engine = Engine.open(ontology, tmp_path)
        engine.run_seed(bundled_seed_path())
        before_len = len(engine.log)
        before_world = engine.world.snapshot_bytes()

        def broken_append(batch):
            raise StorageError("disk gone")

        monkeypatch.setattr(engine.log, "append", broken_append)
        with pytest.raises(StorageError):
            engine.apply(
                ActionRequest(
                    actor="a5", verb=ESTABLISH, subject="a5", relation="BefriendAction", object="a3", scene="s2"
                )
            )
        assert len(engine.log) == before_len
        assert engine.world.snapshot_bytes() == before_world


class TestQueryHistory:
    def test_marriage_lifecycle_events(self, golden_engine):
        _marry_divorce(golden_engine)
        events = golden_engine.log.query_history("a6", "a3", "MarryAction")
        assert [e.kind for e in events] == [
            "RelationEstablished",
            "DerivedRelationEstablished",
            "RelationCancelled",
            "DerivedRelationCancelled",
            "BanRecorded",
        ]
        assert [e.seq for e in events] == sorted(e.seq for e in events)

    def test_pair_matching_is_unordered(self, golden_engine):
        _marry_divorce(golden_engine)
        forward = golden_engine.log.query_history("a6", "a3", None)
        backward = golden_engine.log.query_history("a3", "a6", None)
        assert [e.seq for e in forward] == [e.seq for e in backward]

    def test_no_filters_returns_everything(self, golden_engine):
        assert golden_engine.log.query_history() == golden_engine.log.events

    def test_unknown_entity_matches_nothing(self, golden_engine):
        assert golden_engine.log.query_history(subject="zz99") == []
