"""Unification-style matching of schema expressions against ground events.

A schema expression matches an event when every schema slot is satisfied by
the event: equal word, consistently bindable variable, or recursively
matching nested expression.  Slots the event carries beyond the schema are
ignored.  Events are ground, so bindings always map variables to ground
values and there is never variable-against-variable binding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .model import (
    EMPTY_SUBSTITUTION,
    EventExpression,
    Nested,
    PreconditionError,
    Substitution,
    Var,
    Word,
    is_ground,
    variables_of,
)


@dataclass(frozen=True)
class MatchOutcome:
    """Result of a match or merge: a success flag and the binding found."""

    success: bool
    substitution: Optional[Substitution] = None

    @classmethod
    def ok(cls, subst: Substitution) -> "MatchOutcome":
        return cls(True, subst)

    @classmethod
    def fail(cls) -> "MatchOutcome":
        return cls(False, None)

    def __bool__(self) -> bool:
        return self.success


def match_event(schema: EventExpression, event: EventExpression) -> MatchOutcome:
    """Match one schema expression against one ground event.

    On success the substitution binds exactly the variables the event
    forced.  The event must be ground.
    """
    if not is_ground(event):
        raise PreconditionError("match_event requires a ground event")
    subst = _match_into(schema, event, EMPTY_SUBSTITUTION)
    if subst is None:
        return MatchOutcome.fail()
    return MatchOutcome.ok(subst)


def _match_into(
    schema: EventExpression, event: EventExpression, subst: Substitution
) -> Optional[Substitution]:
    for case, wanted in schema.slots:
        actual = event.get(case)
        if actual is None:
            return None
        if isinstance(wanted, Word):
            if not isinstance(actual, Word) or wanted.text != actual.text:
                return None
        elif isinstance(wanted, Var):
            subst = subst.bind(wanted.name, actual)
            if subst is None:
                return None
        else:  # Nested
            if not isinstance(actual, Nested):
                return None
            subst = _match_into(wanted.expr, actual.expr, subst)
            if subst is None:
                return None
    return subst


def merge(a: Substitution, b: Substitution) -> MatchOutcome:
    """Combine two substitutions; fails when they bind a variable differently."""
    merged = a
    for name, value in b:
        merged = merged.bind(name, value)
        if merged is None:
            return MatchOutcome.fail()
    return MatchOutcome.ok(merged)


def confirm_unmatched(
    nodes: Iterable[EventExpression], subst: Substitution
) -> MatchOutcome:
    """Check that schema nodes nothing matched are still accounted for.

    A node passes when it is ground, or when every variable it mentions is
    already bound.  The substitution is returned unchanged.
    """
    domain = subst.domain()
    for node in nodes:
        if not variables_of(node) <= domain:
            return MatchOutcome.fail()
    return MatchOutcome.ok(subst)
