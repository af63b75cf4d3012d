"""Vocabulary of the metaverse: concept tree, typed relations, event kinds.

Ontology values are immutable after loading; extension operations return new
values, so a loaded ontology can be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .constraints import COMPANION_KINDS, ConstraintKind, RuleBinding
from .errors import (
    DuplicateConcept,
    ParseError,
    UnknownConcept,
    UnknownParent,
    UnknownRelationType,
    ValidationError,
)

ROOT_CONCEPT = "/Thing"

_RULE_NAMES = {kind.value: kind for kind in ConstraintKind}


def parse_concept_path(path: str) -> list[str]:
    """Split a concept path into segments, validating its shape.

    Paths are slash-separated, rooted at ``/Thing``, with non-empty segments
    and no repeated segment within one path.
    """
    if not isinstance(path, str) or not path.startswith("/"):
        raise ValidationError(f"concept path must start with '/': {path!r}")
    segments = path[1:].split("/")
    if segments[0] != "Thing":
        raise ValidationError(f"concept path must be rooted at {ROOT_CONCEPT}: {path!r}")
    if any(not seg for seg in segments):
        raise ValidationError(f"concept path has an empty segment: {path!r}")
    if len(set(segments)) != len(segments):
        raise ValidationError(f"concept path repeats a segment: {path!r}")
    return segments


def parent_path(path: str) -> str | None:
    """Parent concept path implied by the hierarchy, None for the root."""
    if path == ROOT_CONCEPT:
        return None
    return path.rsplit("/", 1)[0]


@dataclass(frozen=True)
class Concept:
    id: str
    label: str
    parent: str | None


@dataclass(frozen=True)
class RelationType:
    id: str
    label: str
    subject_concept: str
    object_concept: str
    rule_bindings: frozenset[RuleBinding] = frozenset()
    companion: str | None = None

    def has(self, kind: ConstraintKind) -> bool:
        return any(b.kind is kind for b in self.rule_bindings)

    def binding(self, kind: ConstraintKind) -> RuleBinding | None:
        for b in self.rule_bindings:
            if b.kind is kind:
                return b
        return None


@dataclass(frozen=True)
class EventKind:
    id: str
    label: str


@dataclass(frozen=True)
class Ontology:
    """Validated vocabulary. Treat as immutable; extension returns a new value."""

    concepts: dict[str, Concept] = field(default_factory=dict)
    relation_types: dict[str, RelationType] = field(default_factory=dict)
    event_kinds: dict[str, EventKind] = field(default_factory=dict)

    # -- lookups ---------------------------------------------------------

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise UnknownConcept(f"unknown concept {concept_id!r}") from None

    def relation(self, relation_id: str) -> RelationType:
        try:
            return self.relation_types[relation_id]
        except KeyError:
            raise UnknownRelationType(f"unknown relation type {relation_id!r}") from None

    def has_relation(self, relation_id: str) -> bool:
        return relation_id in self.relation_types

    def derived_only_relations(self) -> frozenset[str]:
        """Relation ids that only ever appear as rule-derived companion edges.

        A relation that serves as the co-occurrence companion of another
        relation cannot be established or cancelled directly: its edges exist
        exactly as long as their primary edges do.
        """
        out = set()
        for rt in self.relation_types.values():
            b = rt.binding(ConstraintKind.ASYMMETRIC_CO_OCCURRENCE)
            if b is not None and b.companion != rt.id:
                out.add(b.companion)
        return frozenset(out)

    # -- queries ---------------------------------------------------------

    def is_subconcept(self, a: str, b: str) -> bool:
        """True iff ``a`` equals ``b`` or ``b`` is an ancestor of ``a``."""
        self.concept(b)
        current: str | None = self.concept(a).id
        while current is not None:
            if current == b:
                return True
            current = self.concepts[current].parent
        return False

    def validate_relation_typing(self, subject_concept: str, relation_id: str, object_concept: str) -> bool:
        """Check a {subject concept, relation, object concept} triple."""
        rt = self.relation(relation_id)
        return self.is_subconcept(subject_concept, rt.subject_concept) and self.is_subconcept(
            object_concept, rt.object_concept
        )

    # -- extension -------------------------------------------------------

    def add_concept(self, concept: Concept) -> "Ontology":
        """Return a new ontology with one more concept; self is unchanged."""
        parse_concept_path(concept.id)
        if concept.id in self.concepts:
            raise DuplicateConcept(f"concept {concept.id!r} already defined")
        implied = parent_path(concept.id)
        if concept.parent != implied:
            raise ValidationError(
                f"concept {concept.id!r} declares parent {concept.parent!r}, path implies {implied!r}"
            )
        if implied is not None and implied not in self.concepts:
            raise UnknownParent(f"parent {implied!r} of {concept.id!r} is not defined")
        concepts = dict(self.concepts)
        concepts[concept.id] = concept
        return Ontology(concepts, dict(self.relation_types), dict(self.event_kinds))


# -- document loading ------------------------------------------------------


def load_ontology(document: str) -> Ontology:
    """Parse and validate an ontology document (see serialize_ontology for the format)."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"ontology document is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("ontology document must be a JSON object")

    concepts = _load_concepts(raw.get("concepts", []))
    relations = _load_relations(raw.get("relations", []), concepts)
    events = _load_events(raw.get("events", []))
    return Ontology(concepts, relations, events)


def _load_concepts(items: object) -> dict[str, Concept]:
    if not isinstance(items, list):
        raise ParseError("'concepts' must be an array")
    concepts: dict[str, Concept] = {}
    for item in items:
        if not isinstance(item, dict) or "id" not in item:
            raise ParseError(f"malformed concept entry: {item!r}")
        cid = item["id"]
        parse_concept_path(cid)
        if cid in concepts:
            raise ValidationError(f"duplicate concept id {cid!r}")
        declared_parent = item.get("parent")
        implied = parent_path(cid)
        if declared_parent != implied:
            raise ValidationError(
                f"concept {cid!r} declares parent {declared_parent!r}, path implies {implied!r}"
            )
        concepts[cid] = Concept(id=cid, label=str(item.get("label", cid)), parent=implied)

    if ROOT_CONCEPT not in concepts:
        raise ValidationError(f"ontology must define the root concept {ROOT_CONCEPT}")
    for concept in concepts.values():
        if concept.parent is not None and concept.parent not in concepts:
            raise ValidationError(f"parent {concept.parent!r} of {concept.id!r} is not defined")
    return concepts


def _load_relations(items: object, concepts: dict[str, Concept]) -> dict[str, RelationType]:
    if not isinstance(items, list):
        raise ParseError("'relations' must be an array")
    relations: dict[str, RelationType] = {}
    declared: dict[str, dict] = {}
    for item in items:
        if not isinstance(item, dict) or "id" not in item:
            raise ParseError(f"malformed relation entry: {item!r}")
        rid = item["id"]
        if not rid or not isinstance(rid, str):
            raise ParseError(f"relation id must be a non-empty string: {rid!r}")
        if rid in declared:
            raise ValidationError(f"duplicate relation id {rid!r}")
        declared[rid] = item

    co_occurrence_companions: dict[str, str] = {}
    for rid, item in declared.items():
        for key in ("subject", "object"):
            concept_id = item.get(key)
            if concept_id not in concepts:
                raise ValidationError(f"relation {rid!r}: unknown {key} concept {concept_id!r}")
        kinds = []
        for name in item.get("rules", []):
            kind = _RULE_NAMES.get(name)
            if kind is None:
                raise ParseError(f"relation {rid!r}: unknown rule {name!r}")
            kinds.append(kind)
        if len(set(kinds)) != len(kinds):
            raise ValidationError(f"relation {rid!r}: repeated rule binding")
        companion = item.get("companion")
        needs_companion = any(k in COMPANION_KINDS for k in kinds)
        if needs_companion and companion is None:
            raise ValidationError(f"relation {rid!r}: rule requires a companion relation")
        if companion is not None and companion not in declared:
            raise ValidationError(f"relation {rid!r}: companion {companion!r} is not a relation")
        if ConstraintKind.ASYMMETRIC_CO_OCCURRENCE in kinds:
            if companion == rid:
                raise ValidationError(f"relation {rid!r}: co-occurrence companion must differ from the relation")
            previous = co_occurrence_companions.get(companion)
            if previous is not None:
                raise ValidationError(
                    f"relations {previous!r} and {rid!r} share co-occurrence companion {companion!r}"
                )
            co_occurrence_companions[companion] = rid

        bindings = frozenset(
            RuleBinding(kind=k, companion=companion if k in COMPANION_KINDS else None) for k in kinds
        )
        relations[rid] = RelationType(
            id=rid,
            label=str(item.get("label", rid)),
            subject_concept=item["subject"],
            object_concept=item["object"],
            rule_bindings=bindings,
            companion=companion,
        )

    # A companion that differs from its primary must itself be rule-free:
    # its edges are managed entirely by the primary relation's rules.
    for rt in relations.values():
        if rt.companion and rt.companion != rt.id:
            target = relations[rt.companion]
            if target.rule_bindings:
                raise ValidationError(
                    f"relation {rt.id!r}: companion {rt.companion!r} must not carry rule bindings"
                )
    return relations


def _load_events(items: object) -> dict[str, EventKind]:
    if not isinstance(items, list):
        raise ParseError("'events' must be an array")
    events: dict[str, EventKind] = {}
    for item in items:
        if not isinstance(item, dict) or "id" not in item:
            raise ParseError(f"malformed event entry: {item!r}")
        eid = item["id"]
        if eid in events:
            raise ValidationError(f"duplicate event kind {eid!r}")
        events[eid] = EventKind(id=eid, label=str(item.get("label", eid)))
    return events


def serialize_ontology(ontology: Ontology) -> str:
    """Canonical document form; load_ontology(serialize_ontology(o)) == o."""
    doc = {
        "concepts": [
            {"id": c.id, "label": c.label, "parent": c.parent}
            for c in sorted(ontology.concepts.values(), key=lambda c: c.id)
        ],
        "relations": [
            _relation_entry(rt)
            for rt in sorted(ontology.relation_types.values(), key=lambda r: r.id)
        ],
        "events": [
            {"id": e.id, "label": e.label}
            for e in sorted(ontology.event_kinds.values(), key=lambda e: e.id)
        ],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True)


def _relation_entry(rt: RelationType) -> dict:
    entry = {
        "id": rt.id,
        "label": rt.label,
        "subject": rt.subject_concept,
        "object": rt.object_concept,
        "rules": sorted(b.kind.value for b in rt.rule_bindings),
    }
    if rt.companion is not None:
        entry["companion"] = rt.companion
    return entry


def load_bundled_ontology() -> Ontology:
    """The ontology document shipped with the package."""
    text = resources.files("metaonce.data").joinpath("ontology.json").read_text("utf-8")
    return load_ontology(text)
