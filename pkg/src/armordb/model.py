"""Core ontology representation: names, class expressions, axioms, and the
axiom store with its buffered-change queue.

Axioms are immutable values with set semantics in the store; every mutation
of the store goes through a batch so the revision counter bumps exactly once
per effective batch.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import ReservedNameError

_NAME_PART = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*$")

DEFAULT_PREFIX = "ex"
AUX_PREFIX = "gen"  # reserved for reasoner-generated auxiliary names


@dataclass(frozen=True, order=True)
class EntityName:
    """Namespaced identifier, canonical text form ``prefix:local``."""

    prefix: str
    local: str

    def __post_init__(self):
        if not _NAME_PART.match(self.prefix) or not _NAME_PART.match(self.local):
            raise ValueError(f"invalid entity name {self.prefix!r}:{self.local!r}")

    def __str__(self):
        return f"{self.prefix}:{self.local}"

    @classmethod
    def parse(cls, text: str) -> "EntityName":
        """Parse ``prefix:local`` or a bare name (defaulted to ``ex:``)."""
        if ":" in text:
            prefix, _, local = text.partition(":")
        else:
            prefix, local = DEFAULT_PREFIX, text
        try:
            return cls(prefix, local)
        except ValueError:
            raise ValueError(f"invalid entity name {text!r}") from None


OWL_THING = EntityName("owl", "Thing")
OWL_NOTHING = EntityName("owl", "Nothing")
RESERVED_NAMES = frozenset({OWL_THING, OWL_NOTHING})


def is_reserved(name: EntityName) -> bool:
    return name in RESERVED_NAMES


# --------------------------------------------------------------------------
# Class expressions


class ClassExpression:
    """Concept term: named class, Top, Bottom, intersection, or existential."""

    __slots__ = ()


@dataclass(frozen=True)
class Named(ClassExpression):
    name: EntityName

    def __str__(self):
        return str(self.name)


@dataclass(frozen=True)
class Top(ClassExpression):
    def __str__(self):
        return "owl:Thing"


@dataclass(frozen=True)
class Bottom(ClassExpression):
    def __str__(self):
        return "owl:Nothing"


TOP = Top()
BOTTOM = Bottom()


def _expr_key(expr: ClassExpression):
    if isinstance(expr, Named):
        return (0, str(expr.name))
    if isinstance(expr, Top):
        return (1,)
    if isinstance(expr, Bottom):
        return (2,)
    if isinstance(expr, Intersection):
        return (3,) + tuple(_expr_key(op) for op in expr.operands)
    if isinstance(expr, Existential):
        return (4, str(expr.role), _expr_key(expr.filler))
    raise TypeError(f"not a class expression: {expr!r}")


@dataclass(frozen=True)
class Intersection(ClassExpression):
    """Conjunction of two or more operands; operand order is not significant,
    so operands are canonically sorted at construction."""

    operands: tuple

    def __init__(self, operands: Iterable[ClassExpression]):
        ops = tuple(sorted(operands, key=_expr_key))
        if len(ops) < 2:
            raise ValueError("intersection needs at least 2 operands")
        object.__setattr__(self, "operands", ops)

    def __str__(self):
        return "ObjectIntersectionOf(" + " ".join(str(o) for o in self.operands) + ")"


@dataclass(frozen=True)
class Existential(ClassExpression):
    role: EntityName
    filler: ClassExpression

    def __str__(self):
        return f"ObjectSomeValuesFrom({self.role} {self.filler})"


def named_class(name: EntityName) -> ClassExpression:
    """Class position of an entity name; owl:Thing/owl:Nothing fold to
    Top/Bottom so the reserved names never occur as Named nodes."""
    if name == OWL_THING:
        return TOP
    if name == OWL_NOTHING:
        return BOTTOM
    return Named(name)


def expr_signature(expr: ClassExpression, classes: set, roles: set):
    if isinstance(expr, Named):
        classes.add(expr.name)
    elif isinstance(expr, Intersection):
        for op in expr.operands:
            expr_signature(op, classes, roles)
    elif isinstance(expr, Existential):
        roles.add(expr.role)
        expr_signature(expr.filler, classes, roles)


# --------------------------------------------------------------------------
# Axioms


class Axiom:
    __slots__ = ()

    def signature(self) -> frozenset:
        """All entity names the axiom mentions."""
        classes, roles, individuals = set(), set(), set()
        self.collect_signature(classes, roles, individuals)
        return frozenset(classes | roles | individuals)

    def collect_signature(self, classes, roles, individuals):
        raise NotImplementedError


@dataclass(frozen=True)
class SubClassOf(Axiom):
    sub: ClassExpression
    sup: ClassExpression

    def collect_signature(self, classes, roles, individuals):
        expr_signature(self.sub, classes, roles)
        expr_signature(self.sup, classes, roles)


@dataclass(frozen=True)
class EquivalentClasses(Axiom):
    members: tuple

    def __init__(self, members: Iterable[ClassExpression]):
        ms = tuple(members)
        if len(ms) < 2:
            raise ValueError("EquivalentClasses needs at least 2 members")
        object.__setattr__(self, "members", ms)

    def collect_signature(self, classes, roles, individuals):
        for m in self.members:
            expr_signature(m, classes, roles)


@dataclass(frozen=True)
class DisjointClasses(Axiom):
    members: tuple

    def __init__(self, members: Iterable[ClassExpression]):
        ms = tuple(members)
        if len(ms) < 2:
            raise ValueError("DisjointClasses needs at least 2 members")
        object.__setattr__(self, "members", ms)

    def collect_signature(self, classes, roles, individuals):
        for m in self.members:
            expr_signature(m, classes, roles)


@dataclass(frozen=True)
class SubObjectPropertyOf(Axiom):
    sub: EntityName
    sup: EntityName

    def collect_signature(self, classes, roles, individuals):
        roles.add(self.sub)
        roles.add(self.sup)


@dataclass(frozen=True)
class ObjectPropertyDomain(Axiom):
    role: EntityName
    domain: ClassExpression

    def collect_signature(self, classes, roles, individuals):
        roles.add(self.role)
        expr_signature(self.domain, classes, roles)


@dataclass(frozen=True)
class ObjectPropertyRange(Axiom):
    role: EntityName
    range: ClassExpression

    def collect_signature(self, classes, roles, individuals):
        roles.add(self.role)
        expr_signature(self.range, classes, roles)


CLASS_KIND = "class"
ROLE_KIND = "role"
INDIVIDUAL_KIND = "individual"
_DECL_KINDS = (CLASS_KIND, ROLE_KIND, INDIVIDUAL_KIND)


@dataclass(frozen=True)
class Declaration(Axiom):
    kind: str
    name: EntityName

    def __post_init__(self):
        if self.kind not in _DECL_KINDS:
            raise ValueError(f"unknown declaration kind {self.kind!r}")

    def collect_signature(self, classes, roles, individuals):
        if self.kind == CLASS_KIND:
            classes.add(self.name)
        elif self.kind == ROLE_KIND:
            roles.add(self.name)
        else:
            individuals.add(self.name)


@dataclass(frozen=True)
class ClassAssertion(Axiom):
    type: ClassExpression
    individual: EntityName

    def collect_signature(self, classes, roles, individuals):
        expr_signature(self.type, classes, roles)
        individuals.add(self.individual)


@dataclass(frozen=True)
class ObjectPropertyAssertion(Axiom):
    role: EntityName
    subject: EntityName
    object: EntityName

    def collect_signature(self, classes, roles, individuals):
        roles.add(self.role)
        individuals.add(self.subject)
        individuals.add(self.object)


TBOX_TYPES = (
    SubClassOf,
    EquivalentClasses,
    DisjointClasses,
    SubObjectPropertyOf,
    ObjectPropertyDomain,
    ObjectPropertyRange,
)
ABOX_TYPES = (ClassAssertion, ObjectPropertyAssertion)


def is_terminological(axiom: Axiom) -> bool:
    if isinstance(axiom, Declaration):
        return axiom.kind != INDIVIDUAL_KIND
    return isinstance(axiom, TBOX_TYPES)


def validate_axiom(axiom: Axiom) -> None:
    """Reject reserved/auxiliary names where they may not occur: owl:Thing
    and owl:Nothing as declarations, individuals, or roles; the gen: prefix
    anywhere in user axioms (it belongs to the reasoner)."""
    classes, roles, individuals = set(), set(), set()
    axiom.collect_signature(classes, roles, individuals)
    for name in roles | individuals:
        if is_reserved(name):
            raise ReservedNameError(f"{name} is reserved")
    if isinstance(axiom, Declaration) and is_reserved(axiom.name):
        raise ReservedNameError(f"{axiom.name} is reserved and cannot be declared")
    for name in classes | roles | individuals:
        if name.prefix == AUX_PREFIX:
            raise ReservedNameError(f"prefix '{AUX_PREFIX}:' is reserved for generated names")


# --------------------------------------------------------------------------
# Store and change buffer

ADD = "add"
REMOVE = "remove"


class BatchError(Exception):
    """A batch stopped at a failing entry; earlier entries stay applied.
    Carries the count of entries applied before the failure and the cause."""

    def __init__(self, cause, applied_count):
        super().__init__(str(cause))
        self.cause = cause
        self.applied_count = applied_count


class AxiomStore:
    """Set of axioms with a signature index and a revision counter.

    The index maps every entity name to the axioms mentioning it and mirrors
    the axiom set exactly. Revision bumps once per effective mutation batch.
    """

    def __init__(self):
        self._axioms: set = set()
        self._index: dict = {}
        self.revision = 0

    @property
    def axioms(self) -> frozenset:
        return frozenset(self._axioms)

    def __len__(self):
        return len(self._axioms)

    def __contains__(self, axiom):
        return axiom in self._axioms

    def axioms_mentioning(self, name: EntityName) -> frozenset:
        return frozenset(self._index.get(name, ()))

    def signature(self) -> frozenset:
        return frozenset(self._index)

    def kind_signature(self):
        """(classes, roles, individuals) mentioned anywhere in the store."""
        classes, roles, individuals = set(), set(), set()
        for axiom in self._axioms:
            axiom.collect_signature(classes, roles, individuals)
        return classes, roles, individuals

    # -- raw mutations (no revision bump; used inside batches) --

    def _insert(self, axiom: Axiom) -> bool:
        validate_axiom(axiom)
        if axiom in self._axioms:
            return False
        self._axioms.add(axiom)
        for name in axiom.signature():
            self._index.setdefault(name, set()).add(axiom)
        return True

    def _discard(self, axiom: Axiom) -> bool:
        if axiom not in self._axioms:
            return False
        self._axioms.discard(axiom)
        for name in axiom.signature():
            bucket = self._index.get(name)
            if bucket is not None:
                bucket.discard(axiom)
                if not bucket:
                    del self._index[name]
        return True

    def _apply_one(self, op: str, axiom: Axiom) -> bool:
        if op == ADD:
            return self._insert(axiom)
        if op == REMOVE:
            return self._discard(axiom)
        raise ValueError(f"unknown change op {op!r}")

    # -- public operations --

    def add_axiom(self, axiom: Axiom) -> bool:
        """Add one axiom; returns True iff the store changed."""
        changed = self._insert(axiom)
        if changed:
            self.revision += 1
        return changed

    def remove_axiom(self, axiom: Axiom) -> bool:
        """Remove one axiom; never cascades to dependents."""
        changed = self._discard(axiom)
        if changed:
            self.revision += 1
        return changed

    def replace_property_value(self, role, subject, new_object, old_object) -> bool:
        """Atomically swap one property assertion for another: remove
        (role, subject, old) and add (role, subject, new) in one batch.
        The add happens even when the old assertion was absent; `changed`
        reports the net effect, so replacing a value by itself is a no-op."""
        old_axiom = ObjectPropertyAssertion(role, subject, old_object)
        new_axiom = ObjectPropertyAssertion(role, subject, new_object)
        if old_axiom == new_axiom:
            changed = self._insert(new_axiom)
        else:
            removed = self._discard(old_axiom)
            changed = self._insert(new_axiom) or removed
        if changed:
            self.revision += 1
        return changed

    def apply_batch(self, changes) -> tuple:
        """Apply (op, axiom) changes in order as one batch.

        Returns (applied_count, changed). Stops at the first failing entry:
        earlier entries remain applied (with a revision bump if any was
        effective) and a BatchError carrying the applied count is raised.
        """
        applied = 0
        changed = False
        try:
            for op, axiom in changes:
                changed = self._apply_one(op, axiom) or changed
                applied += 1
        except Exception as exc:
            if changed:
                self.revision += 1
            raise BatchError(exc, applied) from exc
        if changed:
            self.revision += 1
        return applied, changed

    def snapshot(self) -> frozenset:
        return self.axioms


class ChangeBuffer:
    """Pending (op, axiom) changes in submission order."""

    def __init__(self):
        self.pending: list = []

    def __len__(self):
        return len(self.pending)

    def append(self, op: str, axiom: Axiom):
        self.pending.append((op, axiom))

    def clear(self):
        self.pending.clear()


def buffer_or_apply(store: AxiomStore, buf: ChangeBuffer, buffered: bool, change) -> bool:
    """Route one change: append to the buffer when buffered, else apply
    immediately (one single-change batch). Returns True iff applied now."""
    op, axiom = change
    if buffered:
        buf.append(op, axiom)
        return False
    store.apply_batch([(op, axiom)])
    return True


def flush(store: AxiomStore, buf: ChangeBuffer) -> int:
    """Apply all pending changes in order as one batch and empty the buffer.

    On failure the already-applied prefix stays applied, the buffer keeps the
    failing entry onward, and the BatchError propagates.
    """
    try:
        applied, _ = store.apply_batch(buf.pending)
    except BatchError as exc:
        buf.pending = buf.pending[exc.applied_count:]
        raise
    buf.clear()
    return applied
