"""Rule controller: decides every relation change and applies it atomically.

Every establish/cancel request runs through a fixed-priority check first;
only an accepted request produces events, and the triggering action plus all
rule-derived side effects (symmetric mirrors, co-occurrence companions,
cascaded terminations, bans) commit as one gapless event batch. Replaying
those events through ``events.fold_event`` is exactly how the live path
mutates the world, so live state and replayed state cannot diverge.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import ConstraintKind
from .errors import StorageError
from .events import (
    BAN_RECORDED,
    DERIVED_RELATION_CANCELLED,
    DERIVED_RELATION_ESTABLISHED,
    RELATION_CANCELLED,
    RELATION_ESTABLISHED,
    Event,
    EventLog,
    fold_event,
    stamp,
)
from .graph import Edge, WorldState
from .ontology import Ontology, RelationType

ESTABLISH = "establish"
CANCEL = "cancel"

# Relation an entity may hold toward its owner; an owner may act for what it owns.
OWNERSHIP_RELATION = "BelongsTo"

ACCEPTED = "Accepted"
REJECTED = "Rejected"

OK = "OK"
EXCLUSIVE_CONFLICT = "EXCLUSIVE_CONFLICT"
IRREVERSIBLE_BAN = "IRREVERSIBLE_BAN"
DUPLICATE_RELATION = "DUPLICATE_RELATION"
EDGE_NOT_FOUND = "EDGE_NOT_FOUND"
SCENE_DISALLOWED = "SCENE_DISALLOWED"
TYPING_VIOLATION = "TYPING_VIOLATION"
UNKNOWN_ENTITY = "UNKNOWN_ENTITY"
NOT_AUTHORIZED = "NOT_AUTHORIZED"

REASON_CODES = frozenset(
    {
        OK,
        EXCLUSIVE_CONFLICT,
        IRREVERSIBLE_BAN,
        DUPLICATE_RELATION,
        EDGE_NOT_FOUND,
        SCENE_DISALLOWED,
        TYPING_VIOLATION,
        UNKNOWN_ENTITY,
        NOT_AUTHORIZED,
    }
)


@dataclass(frozen=True)
class ActionRequest:
    """A user's attempted relation change, as issued by ``actor``."""

    actor: str
    verb: str
    subject: str
    relation: str
    object: str
    scene: str


@dataclass
class Decision:
    """The controller's verdict. ``relation`` echoes the request so the
    rejection message can be re-rendered from the decision alone."""

    outcome: str
    reason_code: str
    message: str = ""
    conflicting_edge: Edge | None = None
    relation: str | None = None

    @property
    def accepted(self) -> bool:
        return self.outcome == ACCEPTED

    def to_dict(self) -> dict:
        out: dict = {
            "outcome": self.outcome,
            "reason_code": self.reason_code,
            "message": self.message,
        }
        if self.relation is not None:
            out["relation"] = self.relation
        if self.conflicting_edge is not None:
            e = self.conflicting_edge
            out["conflicting_edge"] = {
                "subject": e.subject,
                "relation": e.relation,
                "object": e.object,
                "scene": e.scene,
                "derived": e.derived,
            }
        return out


def _accept(relation: str) -> Decision:
    return Decision(outcome=ACCEPTED, reason_code=OK, relation=relation)


def _reject(code: str, message: str, relation: str, conflicting: Edge | None = None) -> Decision:
    return Decision(
        outcome=REJECTED,
        reason_code=code,
        message=message,
        conflicting_edge=conflicting,
        relation=relation,
    )


# --- rejection messages -----------------------------------------------------

# Some relations have purpose-built wording; everything else falls back to a
# generic template for its reason code.
_RELATION_TEMPLATES = {
    (EXCLUSIVE_CONFLICT, "MarryAction"): (
        "Sorry, you can't marry this person because {owner} is already married to this person"
    ),
    (EXCLUSIVE_CONFLICT, "BuyAction"): "Sorry, you can't buy it, it's {owner}'s property.",
    (IRREVERSIBLE_BAN, "MarryAction"): "Sorry, the two of you are divorced and can't be together anymore.",
}

_GENERIC_TEMPLATES = {
    EXCLUSIVE_CONFLICT: "Sorry, {relation} is exclusive and {owner} already holds it for this entity.",
    IRREVERSIBLE_BAN: "Sorry, {relation} between the two of you was cancelled and can't be restored.",
    DUPLICATE_RELATION: "The relation {relation} already exists between these entities in this scene.",
}


def render_rejection_message(decision: Decision, world: WorldState) -> str:
    """Deterministic user-facing text for a rejected decision."""
    template = _RELATION_TEMPLATES.get((decision.reason_code, decision.relation)) or _GENERIC_TEMPLATES.get(
        decision.reason_code
    )
    if template is None:
        return decision.message
    owner = ""
    if decision.conflicting_edge is not None:
        entity = world.entities.get(decision.conflicting_edge.subject)
        owner = entity.name if entity is not None else decision.conflicting_edge.subject
    return template.format(owner=owner, relation=decision.relation)


# --- establish ---------------------------------------------------------------


def check_establish(world: WorldState, ontology: Ontology, req: ActionRequest) -> Decision:
    """Verdict for an establish request. Never modifies state; total over
    any input (bad references reject rather than raise).

    Check order (first failure wins): unknown entity -> unknown relation ->
    authorization -> scene filter -> typing -> duplicate -> irreversible ban
    -> exclusive conflict.
    """
    r = req.relation
    for entity_id in (req.actor, req.subject, req.object):
        if entity_id not in world.entities:
            return _reject(UNKNOWN_ENTITY, f"unknown entity {entity_id!r}", r)
    if req.scene not in world.scenes:
        return _reject(SCENE_DISALLOWED, f"unknown scene {req.scene!r}", r)
    graph = world.scenes[req.scene]
    for entity_id in (req.subject, req.object):
        if entity_id not in graph.members:
            return _reject(
                UNKNOWN_ENTITY, f"entity {entity_id!r} is not in scene {req.scene!r}", r
            )

    if not ontology.has_relation(r):
        return _reject(TYPING_VIOLATION, f"unknown relation type {r!r}", r)
    rt = ontology.relation(r)

    if not _controls(world, req.actor, req.subject):
        return _reject(
            NOT_AUTHORIZED, f"{req.actor!r} may not act for entity {req.subject!r}", r
        )
    if r in ontology.derived_only_relations():
        return _reject(
            NOT_AUTHORIZED,
            f"{r!r} is maintained by its primary relation and cannot be changed directly",
            r,
        )

    for needed in _required_relations(rt):
        if not graph.scene.allows(needed):
            return _reject(
                SCENE_DISALLOWED, f"relation {needed!r} is not allowed in scene {req.scene!r}", r
            )

    subject_concept = world.entities[req.subject].concept
    object_concept = world.entities[req.object].concept
    if not ontology.validate_relation_typing(subject_concept, r, object_concept):
        return _reject(
            TYPING_VIOLATION,
            f"{subject_concept!r} -{r}-> {object_concept!r} violates the relation's typing",
            r,
        )
    for mirror_subject, mirror_relation, mirror_object in _derived_triples(req, rt):
        if not ontology.validate_relation_typing(
            world.entities[mirror_subject].concept,
            mirror_relation,
            world.entities[mirror_object].concept,
        ):
            return _reject(
                TYPING_VIOLATION,
                f"derived edge ({mirror_subject!r}, {mirror_relation!r}, {mirror_object!r}) "
                "violates the companion relation's typing",
                r,
            )

    duplicate = (req.subject, r, req.object) in graph
    if not duplicate and rt.rule_bindings:
        # Rule-bound relations are facts about the entities themselves, so a
        # copy in any other scene is the same fact, not a parallel edge.
        duplicate = bool(world.find_edges(subject=req.subject, relation=r, obj=req.object))
    if duplicate:
        decision = _reject(DUPLICATE_RELATION, "", r)
        decision.message = render_rejection_message(decision, world)
        return decision

    banned = world.ban_covering(req.subject, req.object, r)
    if banned is None and rt.companion is not None:
        banned = world.ban_covering(req.subject, req.object, rt.companion)
    if banned is not None:
        decision = _reject(IRREVERSIBLE_BAN, "", r)
        decision.message = render_rejection_message(decision, world)
        return decision

    if rt.has(ConstraintKind.EXCLUSIVE):
        conflict = _exclusive_conflict(world, req, rt)
        if conflict is not None:
            decision = _reject(EXCLUSIVE_CONFLICT, "", r, conflicting=conflict)
            decision.message = render_rejection_message(decision, world)
            return decision

    return _accept(r)


def _exclusive_conflict(world: WorldState, req: ActionRequest, rt: RelationType) -> Edge | None:
    """First edge (any scene) showing the object — or, for a symmetric
    relation, the subject — is already taken by someone else."""
    for edge in world.iter_edges():
        if edge.relation != rt.id:
            continue
        if edge.object == req.object and edge.subject != req.subject:
            return edge
        if rt.has(ConstraintKind.SYMMETRIC) and edge.object == req.subject and edge.subject != req.object:
            return edge
    return None


def _controls(world: WorldState, actor: str, subject: str) -> bool:
    """Actors act for themselves, or for entities that belong to them."""
    if actor == subject:
        return True
    return any(
        (subject, OWNERSHIP_RELATION, actor) in world.scenes[scene_id]
        for scene_id in world.scenes
    )


def _derived_triples(req: ActionRequest, rt: RelationType) -> list[tuple[str, str, str]]:
    """Side-effect edges an establish of ``req`` would create."""
    primary = (req.subject, req.relation, req.object)
    triples: list[tuple[str, str, str]] = []
    if rt.has(ConstraintKind.SYMMETRIC):
        triples.append((req.object, req.relation, req.subject))
    binding = rt.binding(ConstraintKind.ASYMMETRIC_CO_OCCURRENCE)
    if binding is not None:
        triples.append((req.object, binding.companion, req.subject))
    seen = {primary}
    unique = []
    for triple in triples:
        if triple not in seen:
            seen.add(triple)
            unique.append(triple)
    return unique


def _required_relations(rt: RelationType) -> list[str]:
    """Relations the scene must permit for an establish to fully apply."""
    needed = [rt.id]
    binding = rt.binding(ConstraintKind.ASYMMETRIC_CO_OCCURRENCE)
    if binding is not None and binding.companion not in needed:
        needed.append(binding.companion)
    return needed


def plan_establish(world: WorldState, ontology: Ontology, req: ActionRequest) -> list[Event]:
    """Event batch for an already-accepted establish request."""
    rt = ontology.relation(req.relation)
    seq = world.last_event + 1
    ts = stamp()
    events = [
        Event(
            seq=seq,
            kind=RELATION_ESTABLISHED,
            scene=req.scene,
            payload={"subject": req.subject, "relation": req.relation, "object": req.object},
            ts=ts,
        )
    ]
    for subject, relation, obj in _derived_triples(req, rt):
        events.append(
            Event(
                seq=seq + len(events),
                kind=DERIVED_RELATION_ESTABLISHED,
                scene=req.scene,
                payload={"subject": subject, "relation": relation, "object": obj},
                cause=seq,
                ts=ts,
            )
        )
    return events


# --- cancel -------------------------------------------------------------------


def check_cancel(world: WorldState, ontology: Ontology, req: ActionRequest) -> Decision:
    """Verdict for a cancel request. A reference that cannot name an existing
    edge rejects as EDGE_NOT_FOUND; derived edges reject as NOT_AUTHORIZED
    because they are only removable through their primary edge."""
    r = req.relation
    graph = world.scenes.get(req.scene)
    edge = graph.edge(req.subject, r, req.object) if graph is not None else None
    if edge is None:
        return _reject(
            EDGE_NOT_FOUND,
            f"no relation {r!r} from {req.subject!r} to {req.object!r} in scene {req.scene!r}",
            r,
        )
    if req.actor not in world.entities or not _controls(world, req.actor, req.subject):
        return _reject(
            NOT_AUTHORIZED, f"{req.actor!r} may not act for entity {req.subject!r}", r
        )
    if edge.derived:
        return _reject(
            NOT_AUTHORIZED,
            f"edge ({req.subject!r}, {r!r}, {req.object!r}) is rule-derived and can only be "
            "cancelled through its primary relation",
            r,
        )
    return _accept(r)


def _cancel_cascade(world: WorldState, ontology: Ontology, req: ActionRequest) -> list[tuple[str, tuple[str, str, str]]]:
    """(scene, triple) pairs removed alongside the primary edge of a cancel.

    Covers: edges derived from the primary's establish event, the literal
    companion edge of a mutual-termination/irreversible binding, and the
    mirror of a symmetric relation (so symmetry closure survives cancels).
    Companion and mirror edges are terminated wherever they live, not just
    in the request's scene, so a ban never leaves live copies behind.
    """
    rt = ontology.relation(req.relation)
    graph = world.scenes[req.scene]
    primary = graph.edge(req.subject, req.relation, req.object)
    cascade: list[tuple[str, tuple[str, str, str]]] = []
    seen = {(req.scene, primary.triple)}

    def _add(scene_id: str, triple: tuple[str, str, str]) -> None:
        key = (scene_id, triple)
        if key not in seen and triple in world.scenes[scene_id]:
            seen.add(key)
            cascade.append(key)

    for edge in graph.edges():
        if edge.derived_from == primary.origin_event:
            _add(req.scene, edge.triple)

    paired: list[tuple[str, str, str]] = []
    for kind in (ConstraintKind.MUTUAL_TERMINATION, ConstraintKind.IRREVERSIBLE):
        binding = rt.binding(kind)
        if binding is not None:
            paired.append((req.object, binding.companion, req.subject))
    if rt.has(ConstraintKind.SYMMETRIC):
        paired.append((req.object, req.relation, req.subject))
    for triple in paired:
        for scene_id in sorted(world.scenes):
            _add(scene_id, triple)
    return cascade


def plan_cancel(world: WorldState, ontology: Ontology, req: ActionRequest) -> list[Event]:
    """Event batch for an already-accepted cancel request."""
    rt = ontology.relation(req.relation)
    seq = world.last_event + 1
    ts = stamp()
    events = [
        Event(
            seq=seq,
            kind=RELATION_CANCELLED,
            scene=req.scene,
            payload={"subject": req.subject, "relation": req.relation, "object": req.object},
            ts=ts,
        )
    ]
    for scene_id, (subject, relation, obj) in _cancel_cascade(world, ontology, req):
        events.append(
            Event(
                seq=seq + len(events),
                kind=DERIVED_RELATION_CANCELLED,
                scene=scene_id,
                payload={"subject": subject, "relation": relation, "object": obj},
                cause=seq,
                ts=ts,
            )
        )
    binding = rt.binding(ConstraintKind.IRREVERSIBLE)
    if binding is not None:
        relations = sorted({req.relation, binding.companion})
        events.append(
            Event(
                seq=seq + len(events),
                kind=BAN_RECORDED,
                payload={"pair": sorted({req.subject, req.object}), "relations": relations},
                cause=seq,
                ts=ts,
            )
        )
    return events


# --- apply ---------------------------------------------------------------------


def _apply(
    world: WorldState,
    ontology: Ontology,
    req: ActionRequest,
    check,
    plan,
    log: EventLog | None,
) -> tuple[WorldState, list[Event], Decision]:
    decision = check(world, ontology, req)
    if not decision.accepted:
        return world, [], decision
    events = plan(world, ontology, req)
    if log is not None:
        log.append(events)  # durable before the world advances
    try:
        for event in events:
            fold_event(world, event, ontology)
    except StorageError:
        raise
    except Exception as exc:  # checks guarantee folds cannot fail
        raise AssertionError(f"accepted action failed to apply: {exc}") from exc
    return world, events, decision


def apply_establish(
    world: WorldState, ontology: Ontology, req: ActionRequest, log: EventLog | None = None
) -> tuple[WorldState, list[Event], Decision]:
    """Check, then atomically apply an establish with all derived edges.

    When ``log`` is given the batch is durably appended before the in-memory
    world is touched.
    """
    return _apply(world, ontology, req, check_establish, plan_establish, log)


def apply_cancel(
    world: WorldState, ontology: Ontology, req: ActionRequest, log: EventLog | None = None
) -> tuple[WorldState, list[Event], Decision]:
    """Check, then atomically apply a cancel with cascades and bans."""
    return _apply(world, ontology, req, check_cancel, plan_cancel, log)


def submit(
    world: WorldState, ontology: Ontology, req: ActionRequest, log: EventLog | None = None
) -> tuple[WorldState, list[Event], Decision]:
    """Route a request to establish or cancel by its verb."""
    if req.verb == ESTABLISH:
        return apply_establish(world, ontology, req, log)
    if req.verb == CANCEL:
        return apply_cancel(world, ontology, req, log)
    raise ValueError(f"unknown verb {req.verb!r}")
