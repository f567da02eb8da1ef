"""Error taxonomy shared by all modules.

Every failure that can cross the wire maps to exactly one numeric code;
the registry below is the single source of truth for code -> meaning.
"""

OK = 0
MALFORMED_REQUEST = 100
UNKNOWN_COMMAND = 101
BAD_ARITY = 102
RESERVED_NAME = 103
UNKNOWN_REFERENCE = 200
REFERENCE_BUSY = 201
NOT_LEASE_HOLDER = 202
DUPLICATE_REFERENCE = 203
UNKNOWN_ENTITY = 204
INCONSISTENT_ONTOLOGY = 205
ONTOLOGY_PARSE_ERROR = 300
FILE_IO_ERROR = 301
UNSUPPORTED_EXPRESSION = 302
UNKNOWN_PROCEDURE = 400
PROCEDURE_FAILED = 401
INTERNAL_ERROR = 500

_REGISTRY = {
    OK: "OK",
    MALFORMED_REQUEST: "MalformedRequest",
    UNKNOWN_COMMAND: "UnknownCommand",
    BAD_ARITY: "BadArity",
    RESERVED_NAME: "ReservedName",
    UNKNOWN_REFERENCE: "UnknownReference",
    REFERENCE_BUSY: "ReferenceBusy",
    NOT_LEASE_HOLDER: "NotLeaseHolder",
    DUPLICATE_REFERENCE: "DuplicateReference",
    UNKNOWN_ENTITY: "UnknownEntity",
    INCONSISTENT_ONTOLOGY: "InconsistentOntology",
    ONTOLOGY_PARSE_ERROR: "OntologyParseError",
    FILE_IO_ERROR: "FileIOError",
    UNSUPPORTED_EXPRESSION: "UnsupportedExpression",
    UNKNOWN_PROCEDURE: "UnknownProcedure",
    PROCEDURE_FAILED: "ProcedureFailed",
    INTERNAL_ERROR: "InternalError",
}


def error_registry():
    """Return a copy of the full code -> meaning map."""
    return dict(_REGISTRY)


class ArmorError(Exception):
    """Base for all service errors. Subclasses pin a wire code."""

    code = INTERNAL_ERROR

    def __init__(self, message=""):
        super().__init__(message or _REGISTRY.get(self.code, "error"))

    @property
    def message(self):
        return str(self)


class MalformedRequestError(ArmorError):
    code = MALFORMED_REQUEST


class UnknownCommandError(ArmorError):
    code = UNKNOWN_COMMAND


class BadArityError(ArmorError):
    code = BAD_ARITY


class ReservedNameError(ArmorError):
    code = RESERVED_NAME


class UnknownReferenceError(ArmorError):
    code = UNKNOWN_REFERENCE


class ReferenceBusyError(ArmorError):
    code = REFERENCE_BUSY


class NotLeaseHolderError(ArmorError):
    code = NOT_LEASE_HOLDER


class DuplicateReferenceError(ArmorError):
    code = DUPLICATE_REFERENCE


class UnknownEntityError(ArmorError):
    code = UNKNOWN_ENTITY


class InconsistentOntologyError(ArmorError):
    code = INCONSISTENT_ONTOLOGY


class OntologyParseError(ArmorError):
    code = ONTOLOGY_PARSE_ERROR

    def __init__(self, message="", line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class FileIOError(ArmorError):
    code = FILE_IO_ERROR


class UnsupportedExpressionError(ArmorError):
    code = UNSUPPORTED_EXPRESSION


class UnknownProcedureError(ArmorError):
    code = UNKNOWN_PROCEDURE


class ProcedureFailedError(ArmorError):
    code = PROCEDURE_FAILED


class InternalError(ArmorError):
    code = INTERNAL_ERROR
