"""Injected procedures: named command macros executed server-side.

A procedure file holds blocks of the form

    proc classify-room(ind, cls)
        ADD INDIVIDUAL CLASS $ind $cls
        REASON

Body rows are command-table rows whose argument slots may reference
declared parameters as $name; substitution happens at call time and each
step behaves exactly like the equivalent client request. Step failure
stops execution (no rollback).

The built-in `abstract-class` procedure is programmatic: from one
individual's asserted property fillers and their most specific types, it
defines a new class as the intersection of the corresponding existential
restrictions and triggers reasoning, so further individuals with matching
assertions classify under the new name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ArmorError, ProcedureFailedError
from .model import (
    EntityName,
    EquivalentClasses,
    Existential,
    Intersection,
    Named,
    ObjectPropertyAssertion,
    TOP,
)
from .protocol import lookup_row, parse_command_text

BUILTIN_NAMES = ("abstract-class",)

_PROC_HEAD = re.compile(r"proc\s+([A-Za-z_][A-Za-z0-9_-]*)\s*\(([^)]*)\)\s*$")
# parameter names exclude '-' so slots stay unambiguous inside composite args
_PARAM = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_SLOT = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")


@dataclass(frozen=True)
class Procedure:
    name: str
    params: tuple
    body: tuple  # rows of (command, primary, secondary, args)


class ProcedureParseError(Exception):
    def __init__(self, message, lineno):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_procedures(text: str) -> dict:
    """Parse a procedure file into a name -> Procedure registry."""
    registry: dict = {}
    current: tuple | None = None  # (name, params, body, lineno)

    def finish():
        nonlocal current
        if current is None:
            return
        name, params, body, lineno = current
        registry[name] = Procedure(name, tuple(params), tuple(body))
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indented = raw[:1].isspace()
        if not indented:
            finish()
            m = _PROC_HEAD.match(stripped)
            if m is None:
                raise ProcedureParseError(f"expected 'proc name(params)', got {stripped!r}", lineno)
            name = m.group(1)
            if name in BUILTIN_NAMES:
                raise ProcedureParseError(f"{name!r} is a built-in procedure name", lineno)
            if name in registry:
                raise ProcedureParseError(f"procedure {name!r} already defined", lineno)
            params = []
            raw_params = m.group(2).strip()
            if raw_params:
                for p in raw_params.split(","):
                    p = p.strip()
                    if not _PARAM.match(p):
                        raise ProcedureParseError(f"invalid parameter name {p!r}", lineno)
                    if p in params:
                        raise ProcedureParseError(f"duplicate parameter {p!r}", lineno)
                    params.append(p)
            current = (name, params, [], lineno)
            continue
        if current is None:
            raise ProcedureParseError("command row outside any procedure", lineno)
        try:
            command, primary, secondary, args = parse_command_text(stripped)
        except ArmorError as exc:
            raise ProcedureParseError(str(exc), lineno) from None
        for arg in args:
            for slot in _SLOT.findall(arg):
                if slot not in current[1]:
                    raise ProcedureParseError(f"undeclared parameter ${slot}", lineno)
        row = lookup_row(command, primary, secondary)
        if not row.arity_ok(len(args)):
            raise ProcedureParseError(
                f"{command}({primary or '-'}, {secondary or '-'}) arity mismatch", lineno
            )
        current[2].append((command, primary, secondary, tuple(args)))
    finish()
    return registry


def load_procedures(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_procedures(fh.read())


def substitute(template_args, params, values) -> tuple:
    binding = dict(zip(params, values))
    out = []
    for arg in template_args:
        out.append(_SLOT.sub(lambda m: binding[m.group(1)], arg))
    return tuple(out)


def build_abstract_class_axiom(store_axioms, inference, individual: EntityName, new_class: EntityName):
    """Definition axiom for the built-in `abstract-class` procedure: the new
    class is equivalent to the intersection of one existential restriction
    per asserted (role, filler) pair of the individual, each filler
    abstracted to its most specific named types."""
    pairs = sorted(
        {
            (a.role, a.object)
            for a in store_axioms
            if isinstance(a, ObjectPropertyAssertion) and a.subject == individual
        },
        key=lambda p: (str(p[0]), str(p[1])),
    )
    if not pairs:
        raise ProcedureFailedError(
            f"{individual} has no property assertions to abstract"
        )
    conjuncts = []
    for role, filler in pairs:
        types = inference.types_of(filler, direct=True)
        if not types:
            filler_expr = TOP
        elif len(types) == 1:
            filler_expr = Named(EntityName.parse(types[0]))
        else:
            filler_expr = Intersection(
                [Named(EntityName.parse(t)) for t in types]
            )
        conjuncts.append(Existential(role, filler_expr))
    body = conjuncts[0] if len(conjuncts) == 1 else Intersection(conjuncts)
    return EquivalentClasses((Named(new_class), body))
