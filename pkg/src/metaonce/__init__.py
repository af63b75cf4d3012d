"""metaonce-engine: rule-constrained, event-sourced, multi-scene knowledge graphs."""

from .constraints import ConstraintKind, RuleBinding
from .engine import Engine, ServiceConfig, Session
from .events import Event, EventLog, replay
from .graph import BanRecord, Edge, Entity, Scene, SceneGraph, WorldState
from .merge import MergedGraph, joint_relations, merge_scenes
from .ontology import (
    Concept,
    EventKind,
    Ontology,
    RelationType,
    load_bundled_ontology,
    load_ontology,
    serialize_ontology,
)
from .rules import ActionRequest, Decision, apply_cancel, apply_establish, check_cancel, check_establish

__version__ = "0.1.0"

__all__ = [
    "ActionRequest",
    "BanRecord",
    "Concept",
    "ConstraintKind",
    "Decision",
    "Edge",
    "Engine",
    "Entity",
    "Event",
    "EventKind",
    "EventLog",
    "MergedGraph",
    "Ontology",
    "RelationType",
    "RuleBinding",
    "Scene",
    "SceneGraph",
    "ServiceConfig",
    "Session",
    "WorldState",
    "apply_cancel",
    "apply_establish",
    "check_cancel",
    "check_establish",
    "joint_relations",
    "load_bundled_ontology",
    "load_ontology",
    "merge_scenes",
    "replay",
    "serialize_ontology",
]
