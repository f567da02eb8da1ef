"""Wire protocol: the request/response data model, the closed command
table with primary/secondary specifiers, and the newline-delimited JSON
codec.

One request per line, one response per request, strictly FIFO per
connection. Encoding is canonical (sorted keys, compact separators, UTF-8)
so identical messages are byte-identical on the wire.
"""

from __future__ import annotations

import json
import re
import shlex
from dataclasses import dataclass, field

from .errors import (
    BadArityError,
    MalformedRequestError,
    UnknownCommandError,
    error_registry,
)
from .model import (
    ClassAssertion,
    Declaration,
    DisjointClasses,
    EntityName,
    EquivalentClasses,
    ObjectPropertyAssertion,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    SubClassOf,
    SubObjectPropertyOf,
    named_class,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*$")

COMMANDS = (
    "ADD",
    "REMOVE",
    "REPLACE",
    "QUERY",
    "LOAD",
    "SAVE",
    "CREATE",
    "DROP",
    "MOUNT",
    "UNMOUNT",
    "REASON",
    "APPLY",
    "CONFIG",
    "PROC",
    "DUMP",
)


@dataclass(frozen=True)
class CommandRequest:
    client_name: str
    reference_name: str
    command: str
    primary_spec: str = ""
    secondary_spec: str = ""
    args: tuple = ()


@dataclass(frozen=True)
class CommandResponse:
    success: bool = True
    consistent: bool = True
    error_code: int = 0
    error_description: str = ""
    queried_names: tuple = ()
    applied: bool = False
    revision: int = 0


@dataclass(frozen=True)
class CommandRow:
    command: str
    primary: str
    secondary: str
    min_args: int
    max_args: int | None  # None: unbounded
    meaning: str

    def arity_ok(self, n: int) -> bool:
        if n < self.min_args:
            return False
        return self.max_args is None or n <= self.max_args


_MANIPULATION_ROWS = [
    ("CLASS", "", 1, 1, "declare class"),
    ("INDIVIDUAL", "", 1, 1, "declare individual"),
    ("OBJECTPROP", "", 1, 1, "declare object property"),
    ("INDIVIDUAL", "CLASS", 2, 2, "class assertion: individual, class"),
    ("CLASS", "CLASS", 2, 2, "subclass: sub, super"),
    ("OBJECTPROP", "INDIVIDUAL", 3, 3, "property assertion: prop, subject, object"),
    ("OBJECTPROP", "OBJECTPROP", 2, 2, "property hierarchy: sub, super"),
    ("DISJOINT", "CLASS", 2, None, "disjoint classes"),
    ("EQUIV", "CLASS", 2, 2, "equivalent classes"),
    ("DOMAIN", "OBJECTPROP", 2, 2, "property domain: prop, class"),
    ("RANGE", "OBJECTPROP", 2, 2, "property range: prop, class"),
]

_TABLE = []
for verb in ("ADD", "REMOVE"):
    for primary, secondary, lo, hi, meaning in _MANIPULATION_ROWS:
        _TABLE.append(CommandRow(verb, primary, secondary, lo, hi, meaning))
_TABLE += [
    CommandRow("REPLACE", "OBJECTPROP", "INDIVIDUAL", 4, 4,
               "replace property value: prop, subject, new, old"),
    CommandRow("QUERY", "IND", "CLASS", 1, 1, "individuals belonging to a class"),
    CommandRow("QUERY", "CLASS", "IND", 1, 2,
               "classes of an individual: individual [, 'direct'|'all']"),
    CommandRow("QUERY", "CLASS", "CLASS", 2, 2,
               "hierarchy neighbors: class, 'sub'|'sup'|'equiv'"),
    CommandRow("QUERY", "OBJECTPROP", "IND", 2, 2, "property values: prop, subject"),
    CommandRow("LOAD", "FILE", "", 1, 1, "load ontology document"),
    CommandRow("SAVE", "FILE", "", 1, 1, "save ontology document"),
    CommandRow("CREATE", "", "", 0, 0, "create reference"),
    CommandRow("DROP", "", "", 0, 0, "drop reference"),
    CommandRow("MOUNT", "", "", 0, 0, "acquire manipulation lease"),
    CommandRow("UNMOUNT", "", "", 0, 0, "release manipulation lease"),
    CommandRow("REASON", "", "", 0, 0, "flush buffer and resaturate"),
    CommandRow("APPLY", "", "", 0, 0, "flush buffered changes"),
    CommandRow("CONFIG", "FLAG", "", 2, 2, "set flag: name, 'true'|'false'"),
    CommandRow("PROC", "", "", 1, None, "run procedure: name, args..."),
    CommandRow("DUMP", "", "", 0, 0, "serialized ontology in the description field"),
]

_ROW_INDEX = {(row.command, row.primary, row.secondary): row for row in _TABLE}

SPECIFIERS = frozenset(
    {"CLASS", "INDIVIDUAL", "OBJECTPROP", "DISJOINT", "EQUIV",
     "DOMAIN", "RANGE", "IND", "FILE", "FLAG"}
)


def command_table():
    """The closed set of legal (command, primary, secondary, arity) rows."""
    return tuple(_TABLE)


def lookup_row(command: str, primary: str, secondary: str) -> CommandRow | None:
    return _ROW_INDEX.get((command, primary, secondary))


def parse_command_text(text: str):
    """Parse the human text form ``COMMAND [PRIMARY [SECONDARY]] args...``
    (quotes allowed around args) into (command, primary, secondary, args).
    Specifier tokens are recognized greedily against the command table, so
    argument words can never be mistaken for specifiers."""
    try:
        parts = shlex.split(text)
    except ValueError as exc:
        raise MalformedRequestError(f"bad quoting: {exc}") from None
    if not parts:
        raise MalformedRequestError("empty command")
    command, rest = parts[0], parts[1:]
    if command not in COMMANDS:
        raise UnknownCommandError(f"unknown command {command!r}")
    if (
        len(rest) >= 2
        and rest[0] in SPECIFIERS
        and rest[1] in SPECIFIERS
        and lookup_row(command, rest[0], rest[1])
    ):
        return command, rest[0], rest[1], rest[2:]
    if rest and rest[0] in SPECIFIERS and lookup_row(command, rest[0], ""):
        return command, rest[0], "", rest[1:]
    if lookup_row(command, "", ""):
        return command, "", "", rest
    raise UnknownCommandError(f"no such command variant: {text.strip()!r}")


# --------------------------------------------------------------------------
# Codec

_REQUEST_FIELDS = {
    "client_name", "reference_name", "command",
    "primary_spec", "secondary_spec", "args",
}
_RESPONSE_FIELDS = {
    "success", "consistent", "error_code", "error_description",
    "queried_names", "applied", "revision",
}


def encode(msg) -> str:
    """One canonical JSON line (no trailing newline) for a request or
    response."""
    if isinstance(msg, CommandRequest):
        payload = {
            "client_name": msg.client_name,
            "reference_name": msg.reference_name,
            "command": msg.command,
            "primary_spec": msg.primary_spec,
            "secondary_spec": msg.secondary_spec,
            "args": list(msg.args),
        }
    elif isinstance(msg, CommandResponse):
        payload = {
            "success": msg.success,
            "consistent": msg.consistent,
            "error_code": msg.error_code,
            "error_description": msg.error_description,
            "queried_names": list(msg.queried_names),
            "applied": msg.applied,
            "revision": msg.revision,
        }
    else:
        raise TypeError(f"not a protocol message: {msg!r}")
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _load_object(line: str, expected_fields) -> dict:
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedRequestError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedRequestError("message must be a JSON object")
    if set(obj) != expected_fields:
        missing = expected_fields - set(obj)
        extra = set(obj) - expected_fields
        parts = []
        if missing:
            parts.append("missing fields: " + ", ".join(sorted(missing)))
        if extra:
            parts.append("unexpected fields: " + ", ".join(sorted(extra)))
        raise MalformedRequestError("; ".join(parts))
    return obj


def decode(line: str) -> CommandRequest:
    """Decode and validate one request line against the command table."""
    obj = _load_object(line, _REQUEST_FIELDS)
    for key in ("client_name", "reference_name", "command", "primary_spec", "secondary_spec"):
        if not isinstance(obj[key], str):
            raise MalformedRequestError(f"field {key} must be a string")
    args = obj["args"]
    if not isinstance(args, list) or not all(isinstance(a, str) for a in args):
        raise MalformedRequestError("field args must be a list of strings")
    if not _IDENT.match(obj["client_name"]):
        raise MalformedRequestError(f"invalid client name {obj['client_name']!r}")
    if not _IDENT.match(obj["reference_name"]):
        raise MalformedRequestError(f"invalid reference name {obj['reference_name']!r}")
    command = obj["command"]
    if command not in COMMANDS:
        raise UnknownCommandError(f"unknown command {command!r}")
    row = lookup_row(command, obj["primary_spec"], obj["secondary_spec"])
    if row is None:
        raise UnknownCommandError(
            f"no such command variant: {command}"
            f"({obj['primary_spec'] or '-'}, {obj['secondary_spec'] or '-'})"
        )
    if not row.arity_ok(len(args)):
        bound = "unbounded" if row.max_args is None else str(row.max_args)
        raise BadArityError(
            f"{command}({row.primary or '-'}, {row.secondary or '-'}) takes "
            f"{row.min_args}..{bound} args, got {len(args)}"
        )
    return CommandRequest(
        client_name=obj["client_name"],
        reference_name=obj["reference_name"],
        command=command,
        primary_spec=obj["primary_spec"],
        secondary_spec=obj["secondary_spec"],
        args=tuple(args),
    )


def decode_response(line: str) -> CommandResponse:
    obj = _load_object(line, _RESPONSE_FIELDS)
    if not isinstance(obj["success"], bool) or not isinstance(obj["consistent"], bool) \
            or not isinstance(obj["applied"], bool):
        raise MalformedRequestError("boolean field has wrong type")
    if not isinstance(obj["error_code"], int) or not isinstance(obj["revision"], int) \
            or isinstance(obj["error_code"], bool) or isinstance(obj["revision"], bool):
        raise MalformedRequestError("integer field has wrong type")
    if not isinstance(obj["error_description"], str):
        raise MalformedRequestError("error_description must be a string")
    names = obj["queried_names"]
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise MalformedRequestError("queried_names must be a list of strings")
    return CommandResponse(
        success=obj["success"],
        consistent=obj["consistent"],
        error_code=obj["error_code"],
        error_description=obj["error_description"],
        queried_names=tuple(names),
        applied=obj["applied"],
        revision=obj["revision"],
    )


# --------------------------------------------------------------------------
# Argument interpretation for validated requests

def parse_entity(text: str) -> EntityName:
    try:
        return EntityName.parse(text)
    except ValueError as exc:
        raise MalformedRequestError(str(exc)) from None


def build_change_axiom(request: CommandRequest):
    """Axiom for a validated ADD or REMOVE request."""
    spec = (request.primary_spec, request.secondary_spec)
    args = request.args
    if spec == ("CLASS", ""):
        return Declaration("class", _declared(args[0]))
    if spec == ("INDIVIDUAL", ""):
        return Declaration("individual", _declared(args[0]))
    if spec == ("OBJECTPROP", ""):
        return Declaration("role", _declared(args[0]))
    if spec == ("INDIVIDUAL", "CLASS"):
        return ClassAssertion(named_class(parse_entity(args[1])), parse_entity(args[0]))
    if spec == ("CLASS", "CLASS"):
        return SubClassOf(named_class(parse_entity(args[0])), named_class(parse_entity(args[1])))
    if spec == ("OBJECTPROP", "INDIVIDUAL"):
        return ObjectPropertyAssertion(
            parse_entity(args[0]), parse_entity(args[1]), parse_entity(args[2])
        )
    if spec == ("OBJECTPROP", "OBJECTPROP"):
        return SubObjectPropertyOf(parse_entity(args[0]), parse_entity(args[1]))
    if spec == ("DISJOINT", "CLASS"):
        return DisjointClasses([named_class(parse_entity(a)) for a in args])
    if spec == ("EQUIV", "CLASS"):
        return EquivalentClasses([named_class(parse_entity(a)) for a in args])
    if spec == ("DOMAIN", "OBJECTPROP"):
        return ObjectPropertyDomain(parse_entity(args[0]), named_class(parse_entity(args[1])))
    if spec == ("RANGE", "OBJECTPROP"):
        return ObjectPropertyRange(parse_entity(args[0]), named_class(parse_entity(args[1])))
    raise UnknownCommandError(f"no change for {request.command}{spec}")


def _declared(text: str) -> EntityName:
    # Declarations take plain names; reserved-name rejection happens in the
    # store so buffered submissions fail at apply time, not enqueue time.
    return parse_entity(text)


@dataclass(frozen=True)
class QueryDescriptor:
    kind: str  # instances | types | hierarchy | values
    entity: EntityName
    role: EntityName | None = None
    direct: bool = False
    hierarchy_kind: str = ""


def build_query(request: CommandRequest) -> QueryDescriptor:
    spec = (request.primary_spec, request.secondary_spec)
    args = request.args
    if spec == ("IND", "CLASS"):
        return QueryDescriptor(kind="instances", entity=parse_entity(args[0]))
    if spec == ("CLASS", "IND"):
        direct = False
        if len(args) == 2:
            if args[1] not in ("direct", "all"):
                raise MalformedRequestError(
                    f"type query flag must be 'direct' or 'all', got {args[1]!r}"
                )
            direct = args[1] == "direct"
        return QueryDescriptor(kind="types", entity=parse_entity(args[0]), direct=direct)
    if spec == ("CLASS", "CLASS"):
        if args[1] not in ("sub", "sup", "equiv"):
            raise MalformedRequestError(
                f"hierarchy direction must be 'sub', 'sup' or 'equiv', got {args[1]!r}"
            )
        return QueryDescriptor(
            kind="hierarchy", entity=parse_entity(args[0]), hierarchy_kind=args[1]
        )
    if spec == ("OBJECTPROP", "IND"):
        return QueryDescriptor(
            kind="values", entity=parse_entity(args[1]), role=parse_entity(args[0])
        )
    raise UnknownCommandError(f"no query for {request.command}{spec}")


__all__ = [
    "CommandRequest",
    "CommandResponse",
    "CommandRow",
    "QueryDescriptor",
    "build_change_axiom",
    "build_query",
    "command_table",
    "decode",
    "decode_response",
    "encode",
    "error_registry",
    "lookup_row",
    "parse_entity",
]
