"""armordb: a multi-ontology knowledge service.

Named ontology references are manipulated and queried through a uniform
triple-structured command protocol (client name, reference name, command
with specifiers), with an embedded saturation reasoner, client-name-based
manipulation leases, and buffered or continuous inference update.
"""

__version__ = "0.1.0"

from .errors import error_registry
from .model import (
    AxiomStore,
    ChangeBuffer,
    ClassAssertion,
    Declaration,
    DisjointClasses,
    EntityName,
    EquivalentClasses,
    Existential,
    Intersection,
    Named,
    ObjectPropertyAssertion,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    SubClassOf,
    SubObjectPropertyOf,
)
from .protocol import CommandRequest, CommandResponse, command_table, decode, encode
from .reasoner import BACKEND, normalize, saturate
from .registry import ReferenceMap, RefFlags

__all__ = [
    "AxiomStore",
    "BACKEND",
    "ChangeBuffer",
    "ClassAssertion",
    "CommandRequest",
    "CommandResponse",
    "Declaration",
    "DisjointClasses",
    "EntityName",
    "EquivalentClasses",
    "Existential",
    "Intersection",
    "Named",
    "ObjectPropertyAssertion",
    "ObjectPropertyDomain",
    "ObjectPropertyRange",
    "ReferenceMap",
    "RefFlags",
    "SubClassOf",
    "SubObjectPropertyOf",
    "command_table",
    "decode",
    "encode",
    "error_registry",
    "normalize",
    "saturate",
    "__version__",
]
