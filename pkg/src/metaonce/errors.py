"""Exception hierarchy shared by all engine modules."""


class EngineError(Exception):
    """Base class for every error raised by this package."""


# --- ontology ---

class ParseError(EngineError):
    """Ontology or seed document is not syntactically valid."""


class ValidationError(EngineError):
    """Document parsed but violates a structural invariant."""


class DuplicateConcept(EngineError):
    pass


class UnknownParent(EngineError):
    pass


class UnknownConcept(EngineError):
    pass


class UnknownRelationType(EngineError):
    pass


# --- graph state ---

class DuplicateScene(EngineError):
    pass


class UnknownScene(EngineError):
    pass


class ConceptMismatch(EngineError):
    """Entity id re-used with a different name or concept."""


class DuplicateEdge(EngineError):
    pass


class NonMemberEndpoint(EngineError):
    pass


class RelationNotAllowedInScene(EngineError):
    pass


class EdgeNotFound(EngineError):
    pass


class UnknownEntity(EngineError):
    pass


# --- event memory ---

class StorageError(EngineError):
    """Durable write to the event log failed."""


class CorruptLog(EngineError):
    """Event log cannot be replayed (malformed record, gap, dangling reference)."""


# --- merging ---

class EmptySelection(EngineError):
    pass


# --- analytics ---

class UnknownVertex(EngineError):
    pass


class NegativeWeight(EngineError):
    pass


class InvalidThreshold(EngineError):
    pass


# --- service ---

class InvalidSession(EngineError):
    pass


class UnknownQuery(EngineError):
    pass
