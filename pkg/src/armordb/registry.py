"""Registry of named ontology references: thread-safe access, manipulation
leases keyed by client name, per-reference flags, and reasoner-update
scheduling.

Concurrency model: registry-level create/drop serialize on one lock; per
reference, manipulations and reasoner updates serialize on the reference
lock while queries never take it - they read the last published
(revision, inference) snapshot, which is swapped atomically. A lease does
not block queries, only manipulations by other client names.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace

from .errors import (
    DuplicateReferenceError,
    MalformedRequestError,
    ReferenceBusyError,
    NotLeaseHolderError,
    UnknownReferenceError,
)
from .model import (
    AxiomStore,
    ChangeBuffer,
    ObjectPropertyAssertion,
    buffer_or_apply,
    flush,
    is_terminological,
)
from .protocol import QueryDescriptor
from .reasoner import Inference, normalize, saturate


@dataclass(frozen=True)
class RefFlags:
    buffered_manipulation: bool = False
    continuous_reasoner_update: bool = True


FLAG_NAMES = ("buffered_manipulation", "continuous_reasoner_update")


@dataclass(frozen=True)
class ManipulationResult:
    consistent: bool
    applied: bool
    revision: int


class OntologyRef:
    """One named ontology: store, change buffer, lease, flags, and the
    published inference snapshot tagged with the revision it was computed
    at. A stale tag is only observable when continuous updates are off."""

    def __init__(self, name: str, flags: RefFlags):
        self.name = name
        self.store = AxiomStore()
        self.buffer = ChangeBuffer()
        self.lease: str | None = None
        self.flags = flags
        self.lock = threading.RLock()
        self.prefixes: dict = {}  # prefix expansions remembered from LOAD
        self._published = (0, _empty_inference())

    @property
    def published(self) -> tuple:
        """(revision_tag, inference) as one atomic read."""
        return self._published

    def publish(self):
        self._published = (self.store.revision, _compute_inference(self.store))

    @property
    def inference(self) -> Inference:
        return self._published[1]


def _compute_inference(store: AxiomStore) -> Inference:
    tbox = [a for a in store.axioms if is_terminological(a)]
    abox = [a for a in store.axioms if not is_terminological(a)]
    return saturate(normalize(tbox), abox)


_EMPTY = None


def _empty_inference() -> Inference:
    global _EMPTY
    if _EMPTY is None:
        _EMPTY = saturate(normalize([]), [])
    return _EMPTY


class ReferenceMap:
    def __init__(self, default_flags: RefFlags | None = None, mandatory_mount=False):
        self._refs: dict = {}
        self._lock = threading.Lock()
        self.default_flags = default_flags or RefFlags()
        self.mandatory_mount = mandatory_mount

    # -- lifecycle --

    def create_ref(self, name: str, flags: RefFlags | None = None) -> OntologyRef:
        with self._lock:
            if name in self._refs:
                raise DuplicateReferenceError(f"reference {name!r} already exists")
            ref = OntologyRef(name, flags or self.default_flags)
            self._refs[name] = ref
            return ref

    def drop_ref(self, client: str, name: str) -> None:
        with self._lock:
            ref = self._refs.get(name)
            if ref is None:
                raise UnknownReferenceError(f"unknown reference {name!r}")
            with ref.lock:
                if ref.lease is not None and ref.lease != client:
                    raise ReferenceBusyError(
                        f"reference {name!r} is mounted by {ref.lease!r}"
                    )
                del self._refs[name]

    def get(self, name: str) -> OntologyRef:
        ref = self._refs.get(name)
        if ref is None:
            raise UnknownReferenceError(f"unknown reference {name!r}")
        return ref

    def names(self):
        return sorted(self._refs)

    # -- leases --

    def mount(self, client: str, name: str) -> None:
        ref = self.get(name)
        with ref.lock:
            if ref.lease is None or ref.lease == client:
                ref.lease = client  # re-mount by the holder is a no-op
            else:
                raise ReferenceBusyError(
                    f"reference {name!r} is mounted by {ref.lease!r}"
                )

    def unmount(self, client: str, name: str) -> None:
        ref = self.get(name)
        with ref.lock:
            if ref.lease != client:
                raise NotLeaseHolderError(
                    f"client {client!r} does not hold the lease on {name!r}"
                )
            ref.lease = None

    def force_unmount(self, name: str) -> None:
        """Administrative recovery: clear the lease regardless of holder.
        Not reachable through the wire protocol."""
        ref = self.get(name)
        with ref.lock:
            ref.lease = None

    def _check_writable(self, ref: OntologyRef, client: str) -> None:
        if ref.lease is not None and ref.lease != client:
            raise ReferenceBusyError(
                f"reference {ref.name!r} is mounted by {ref.lease!r}"
            )
        if self.mandatory_mount and ref.lease != client:
            raise ReferenceBusyError(
                f"reference {ref.name!r} requires a mount before manipulation"
            )

    # -- manipulation and reasoning --

    def manipulate(self, client: str, name: str, changes) -> ManipulationResult:
        """Apply or buffer a batch of (op, axiom) changes for one client.

        When applied with continuous reasoner update on, the returned
        consistency verdict reflects the new store; when buffered or with
        continuous update off, it reports the last computed state.
        """
        ref = self.get(name)
        with ref.lock:
            self._check_writable(ref, client)
            before = ref.store.revision
            applied = False
            try:
                for change in changes:
                    applied = buffer_or_apply(
                        ref.store, ref.buffer, ref.flags.buffered_manipulation, change
                    ) or applied
            finally:
                if (
                    ref.store.revision != before
                    and ref.flags.continuous_reasoner_update
                ):
                    ref.publish()
            return ManipulationResult(
                consistent=ref.inference.consistent,
                applied=applied,
                revision=ref.store.revision,
            )

    def replace_value(self, client, name, role, subject, new_object, old_object) -> ManipulationResult:
        """Swap one property assertion atomically (one revision bump); when
        buffering is on, the remove/add pair is enqueued instead."""
        ref = self.get(name)
        with ref.lock:
            self._check_writable(ref, client)
            if ref.flags.buffered_manipulation:
                ref.buffer.append("remove", ObjectPropertyAssertion(role, subject, old_object))
                ref.buffer.append("add", ObjectPropertyAssertion(role, subject, new_object))
                return ManipulationResult(
                    consistent=ref.inference.consistent,
                    applied=False,
                    revision=ref.store.revision,
                )
            before = ref.store.revision
            try:
                ref.store.replace_property_value(role, subject, new_object, old_object)
            finally:
                if ref.store.revision != before and ref.flags.continuous_reasoner_update:
                    ref.publish()
            return ManipulationResult(
                consistent=ref.inference.consistent,
                applied=True,
                revision=ref.store.revision,
            )

    def apply_buffer(self, client: str, name: str) -> ManipulationResult:
        """Flush the change buffer as one batch; resaturates only when the
        continuous-update flag is on (otherwise the snapshot stays stale
        until an explicit reason())."""
        ref = self.get(name)
        with ref.lock:
            self._check_writable(ref, client)
            try:
                if ref.buffer.pending:
                    flush(ref.store, ref.buffer)
            finally:
                if (
                    ref.flags.continuous_reasoner_update
                    and ref.published[0] != ref.store.revision
                ):
                    ref.publish()
            return ManipulationResult(
                consistent=ref.inference.consistent,
                applied=True,
                revision=ref.store.revision,
            )

    def reason(self, name: str) -> ManipulationResult:
        """Flush pending changes and recompute the inference snapshot; a
        no-op when nothing changed since the last computation."""
        ref = self.get(name)
        with ref.lock:
            try:
                if ref.buffer.pending:
                    flush(ref.store, ref.buffer)
            finally:
                if ref.published[0] != ref.store.revision:
                    ref.publish()
            return ManipulationResult(
                consistent=ref.inference.consistent,
                applied=True,
                revision=ref.store.revision,
            )

    def replace_axioms(self, client: str, name: str, axioms, prefixes=None) -> ManipulationResult:
        """Replace the whole store content (LOAD): clears the buffer, swaps
        the axiom set in one batch, and recomputes the snapshot."""
        ref = self.get(name)
        with ref.lock:
            self._check_writable(ref, client)
            ref.buffer.clear()
            changes = [("remove", a) for a in sorted(ref.store.axioms, key=repr)]
            changes += [("add", a) for a in axioms]
            try:
                ref.store.apply_batch(changes)
            finally:
                if prefixes:
                    ref.prefixes.update(prefixes)
                ref.publish()
            return ManipulationResult(
                consistent=ref.inference.consistent,
                applied=True,
                revision=ref.store.revision,
            )

    def set_flag(self, client: str, name: str, flag: str, value: bool) -> None:
        """Set one per-reference flag; takes effect for later operations
        only. Respects an existing lease held by another client."""
        ref = self.get(name)
        with ref.lock:
            if ref.lease is not None and ref.lease != client:
                raise ReferenceBusyError(
                    f"reference {name!r} is mounted by {ref.lease!r}"
                )
            if flag not in FLAG_NAMES:
                raise MalformedRequestError(f"unknown flag {flag!r}")
            ref.flags = replace(ref.flags, **{flag: value})
            # a stale snapshot is only legal while continuous update is off
            if (
                flag == "continuous_reasoner_update"
                and value
                and ref.published[0] != ref.store.revision
            ):
                ref.publish()

    # -- queries (never blocked by leases, never mutate) --

    def query(self, name: str, descriptor: QueryDescriptor):
        """Run one query against the current published snapshot."""
        ref = self.get(name)
        _, inference = ref.published
        if descriptor.kind == "instances":
            return inference.instances_of(descriptor.entity)
        if descriptor.kind == "types":
            return inference.types_of(descriptor.entity, direct=descriptor.direct)
        if descriptor.kind == "hierarchy":
            return inference.hierarchy_neighbors(
                descriptor.entity, descriptor.hierarchy_kind
            )
        if descriptor.kind == "values":
            return inference.property_values(descriptor.entity, descriptor.role)
        raise MalformedRequestError(f"unknown query kind {descriptor.kind!r}")

    def snapshot_for_save(self, name: str):
        """(axioms, remembered prefixes) read under the reference lock."""
        ref = self.get(name)
        with ref.lock:
            return ref.store.axioms, dict(ref.prefixes)
