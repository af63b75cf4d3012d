"""Constraint vocabulary: the five rule families a relation type can carry."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class ConstraintKind(enum.Enum):
    """Closed enumeration of the supported rule constraint families."""

    EXCLUSIVE = "exclusive"
    SYMMETRIC = "symmetric"
    ASYMMETRIC_CO_OCCURRENCE = "co_occurrence"
    MUTUAL_TERMINATION = "mutual_termination"
    IRREVERSIBLE = "irreversible"


# Kinds whose semantics involve a paired relation r'.
COMPANION_KINDS = frozenset(
    {
        ConstraintKind.ASYMMETRIC_CO_OCCURRENCE,
        ConstraintKind.MUTUAL_TERMINATION,
        ConstraintKind.IRREVERSIBLE,
    }
)


@dataclass(frozen=True)
class RuleBinding:
    """One constraint attached to a relation type.

    ``companion`` is the paired relation id r'. It is required for the
    co-occurrence, mutual-termination and irreversible kinds and absent for
    the others. A relation may be its own companion (``companion == id`` of
    the bound relation): the paired edge is then the symmetric mirror.
    """

    kind: ConstraintKind
    companion: str | None = None

    def __post_init__(self) -> None:
        needs = self.kind in COMPANION_KINDS
        if needs and not self.companion:
            raise ValueError(f"{self.kind.value} binding requires a companion relation")
        if not needs and self.companion is not None:
            raise ValueError(f"{self.kind.value} binding does not take a companion")
