"""Functional-style syntax for the supported axiom forms (.ofn files).

The grammar is a closed subset of OWL 2 functional syntax:

    Prefix(p:=<iri>)* Ontology( name? Axiom* )

with axioms SubClassOf, EquivalentClasses, DisjointClasses,
SubObjectPropertyOf, ObjectPropertyDomain, ObjectPropertyRange,
Declaration, ClassAssertion, ObjectPropertyAssertion, and class
expressions built from named classes, owl:Thing, owl:Nothing,
ObjectIntersectionOf and ObjectSomeValuesFrom. Recognized OWL constructs
outside the subset are rejected by name; full IRIs in angle brackets are
folded onto a declared prefix or rejected.

Serialization is canonical: prefixes sorted, axioms sorted by their text
form, LF line endings, so structurally equal documents are byte-identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import OntologyParseError, UnsupportedExpressionError
from .model import (
    Bottom,
    ClassAssertion,
    ClassExpression,
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
    Top,
    named_class,
)

EX_IRI = "http://example.org/armordb#"
OWL_IRI = "http://www.w3.org/2002/07/owl#"
FALLBACK_IRI_TEMPLATE = "http://armordb.example/ns/{}#"

DEFAULT_PREFIXES = {"ex": EX_IRI, "owl": OWL_IRI}

# Constructs we recognize as OWL but do not support; reported by name.
_UNSUPPORTED = {
    "ObjectUnionOf", "ObjectComplementOf", "ObjectOneOf", "ObjectAllValuesFrom",
    "ObjectHasValue", "ObjectHasSelf", "ObjectMinCardinality",
    "ObjectMaxCardinality", "ObjectExactCardinality", "DataSomeValuesFrom",
    "DataAllValuesFrom", "DataHasValue", "DataMinCardinality",
    "DataMaxCardinality", "DataExactCardinality", "DataPropertyAssertion",
    "NegativeObjectPropertyAssertion", "NegativeDataPropertyAssertion",
    "DataPropertyDomain", "DataPropertyRange", "SameIndividual",
    "DifferentIndividuals", "AnnotationAssertion", "Annotation", "Import",
    "DataProperty", "AnnotationProperty", "Datatype", "HasKey",
    "DatatypeDefinition", "InverseObjectProperties", "FunctionalObjectProperty",
    "InverseFunctionalObjectProperty", "TransitiveObjectProperty",
    "SymmetricObjectProperty", "AsymmetricObjectProperty",
    "ReflexiveObjectProperty", "IrreflexiveObjectProperty",
    "DisjointObjectProperties", "EquivalentObjectProperties", "DisjointUnion",
    "SubAnnotationPropertyOf", "ObjectPropertyChain", "ObjectInverseOf",
}


@dataclass
class DocumentModel:
    """Parsed ontology document: prefix declarations, optional ontology
    name, and the axiom list in document order."""

    prefixes: dict = field(default_factory=lambda: dict(DEFAULT_PREFIXES))
    name: str | None = None
    axioms: list = field(default_factory=list)

    def __eq__(self, other):
        # Structural equality: axioms compare as a set, matching the store's
        # set-of-axioms semantics (document order carries no meaning).
        if not isinstance(other, DocumentModel):
            return NotImplemented
        return (
            self.prefixes == other.prefixes
            and self.name == other.name
            and set(self.axioms) == set(other.axioms)
        )


# --------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<bind>:=)
  | (?P<iri><[^<>\s]*>)
  | (?P<name>[A-Za-z_][A-Za-z0-9_-]*(?::[A-Za-z_][A-Za-z0-9_-]*)?)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _show(tok: _Token) -> str:
    return repr(tok.text) if tok.text else "end of input"


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise OntologyParseError(
                f"unexpected character {text[pos]!r}", line=line, column=col
            )
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, tok, line, pos - line_start + 1))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, n - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.prefixes = dict(DEFAULT_PREFIXES)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise OntologyParseError(message, line=tok.line, column=tok.column)

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            self.fail(f"expected {what}, found {_show(tok)}", tok)
        return tok

    def entity(self, tok: _Token | None = None) -> EntityName:
        """A prefixed name or an IRI folded onto a declared prefix."""
        tok = tok or self.next()
        if tok.kind == "iri":
            iri = tok.text[1:-1]
            # longest declared expansion wins
            for prefix, expansion in sorted(
                self.prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0])
            ):
                if iri.startswith(expansion):
                    local = iri[len(expansion):]
                    try:
                        return EntityName(prefix, local)
                    except ValueError:
                        continue
            self.fail(f"IRI <{iri}> does not fold onto any declared prefix", tok)
        if tok.kind != "name":
            self.fail(f"expected an entity name, found {_show(tok)}", tok)
        text = tok.text
        if ":" in text:
            prefix, _, local = text.partition(":")
            if prefix not in self.prefixes:
                self.fail(f"undeclared prefix {prefix!r}", tok)
            return EntityName(prefix, local)
        # bare names live in the default namespace
        return EntityName("ex", text)

    def class_expr(self) -> ClassExpression:
        tok = self.next()
        if tok.kind == "name" and self.peek().kind == "lpar":
            keyword = tok.text
            if keyword == "ObjectIntersectionOf":
                self.next()
                operands = []
                while self.peek().kind != "rpar":
                    operands.append(self.class_expr())
                self.expect("rpar", "')'")
                if len(operands) < 2:
                    self.fail("ObjectIntersectionOf needs at least 2 operands", tok)
                return Intersection(operands)
            if keyword == "ObjectSomeValuesFrom":
                self.next()
                role = self.entity()
                filler = self.class_expr()
                self.expect("rpar", "')'")
                return Existential(role, filler)
            if keyword in _UNSUPPORTED:
                raise UnsupportedExpressionError(
                    f"{keyword} is not supported (line {tok.line}, column {tok.column})"
                )
            self.fail(f"unknown construct {keyword!r}", tok)
        return named_class(self.entity(tok))

    def axiom(self, keyword: _Token):
        kw = keyword.text
        self.expect("lpar", "'('")
        if kw == "SubClassOf":
            sub = self.class_expr()
            sup = self.class_expr()
            out = SubClassOf(sub, sup)
        elif kw == "EquivalentClasses":
            members = self._expr_list(keyword, 2)
            out = EquivalentClasses(members)
        elif kw == "DisjointClasses":
            members = self._expr_list(keyword, 2)
            out = DisjointClasses(members)
        elif kw == "SubObjectPropertyOf":
            out = SubObjectPropertyOf(self.entity(), self.entity())
        elif kw == "ObjectPropertyDomain":
            out = ObjectPropertyDomain(self.entity(), self.class_expr())
        elif kw == "ObjectPropertyRange":
            out = ObjectPropertyRange(self.entity(), self.class_expr())
        elif kw == "Declaration":
            kind_tok = self.expect("name", "entity kind")
            kinds = {"Class": "class", "ObjectProperty": "role", "NamedIndividual": "individual"}
            if kind_tok.text in _UNSUPPORTED:
                raise UnsupportedExpressionError(
                    f"{kind_tok.text} is not supported "
                    f"(line {kind_tok.line}, column {kind_tok.column})"
                )
            if kind_tok.text not in kinds:
                self.fail(f"unknown declaration kind {kind_tok.text!r}", kind_tok)
            self.expect("lpar", "'('")
            name = self.entity()
            self.expect("rpar", "')'")
            out = Declaration(kinds[kind_tok.text], name)
        elif kw == "ClassAssertion":
            expr = self.class_expr()
            individual = self.entity()
            out = ClassAssertion(expr, individual)
        elif kw == "ObjectPropertyAssertion":
            out = ObjectPropertyAssertion(self.entity(), self.entity(), self.entity())
        else:
            self.fail(f"unknown axiom {kw!r}", keyword)
        self.expect("rpar", "')'")
        return out

    def _expr_list(self, opener: _Token, minimum: int):
        members = []
        while self.peek().kind != "rpar":
            members.append(self.class_expr())
        if len(members) < minimum:
            self.fail(f"{opener.text} needs at least {minimum} members", opener)
        return members

    def document(self) -> DocumentModel:
        model = DocumentModel()
        while self.peek().kind == "name" and self.peek().text == "Prefix":
            self.next()
            self.expect("lpar", "'('")
            ptok = self.expect("name", "prefix name")
            if ":" in ptok.text:
                self.fail(f"prefix declaration needs 'p:=' form, found {ptok.text!r}", ptok)
            self.expect("bind", "':='")
            iri = self.expect("iri", "an IRI in angle brackets")
            self.expect("rpar", "')'")
            self.prefixes[ptok.text] = iri.text[1:-1]
        head = self.next()
        if head.kind != "name" or head.text != "Ontology":
            self.fail("expected 'Ontology'", head)
        self.expect("lpar", "'('")
        # optional ontology name
        tok = self.peek()
        if tok.kind in ("name", "iri") and not (
            tok.kind == "name" and self.tokens[self.pos + 1].kind == "lpar"
        ):
            model.name = str(self.entity())
        while self.peek().kind != "rpar":
            tok = self.next()
            if tok.kind != "name":
                self.fail(f"expected an axiom, found {_show(tok)}", tok)
            if tok.text in _UNSUPPORTED:
                raise UnsupportedExpressionError(
                    f"{tok.text} is not supported (line {tok.line}, column {tok.column})"
                )
            model.axioms.append(self.axiom(tok))
        self.expect("rpar", "')'")
        tail = self.peek()
        if tail.kind != "eof":
            self.fail(f"trailing content {tail.text!r}", tail)
        model.prefixes = self.prefixes
        return model


def parse(text: str) -> DocumentModel:
    """Parse one ontology document; diagnostics carry line and column."""
    return _Parser(text).document()


# --------------------------------------------------------------------------
# Serializer

def _expr_text(expr: ClassExpression) -> str:
    if isinstance(expr, Named):
        return str(expr.name)
    if isinstance(expr, Top):
        return "owl:Thing"
    if isinstance(expr, Bottom):
        return "owl:Nothing"
    if isinstance(expr, Intersection):
        return "ObjectIntersectionOf(" + " ".join(_expr_text(o) for o in expr.operands) + ")"
    if isinstance(expr, Existential):
        return f"ObjectSomeValuesFrom({expr.role} {_expr_text(expr.filler)})"
    raise TypeError(f"not a class expression: {expr!r}")


def axiom_text(axiom) -> str:
    if isinstance(axiom, SubClassOf):
        return f"SubClassOf({_expr_text(axiom.sub)} {_expr_text(axiom.sup)})"
    if isinstance(axiom, EquivalentClasses):
        return "EquivalentClasses(" + " ".join(_expr_text(m) for m in axiom.members) + ")"
    if isinstance(axiom, DisjointClasses):
        return "DisjointClasses(" + " ".join(_expr_text(m) for m in axiom.members) + ")"
    if isinstance(axiom, SubObjectPropertyOf):
        return f"SubObjectPropertyOf({axiom.sub} {axiom.sup})"
    if isinstance(axiom, ObjectPropertyDomain):
        return f"ObjectPropertyDomain({axiom.role} {_expr_text(axiom.domain)})"
    if isinstance(axiom, ObjectPropertyRange):
        return f"ObjectPropertyRange({axiom.role} {_expr_text(axiom.range)})"
    if isinstance(axiom, Declaration):
        kinds = {"class": "Class", "role": "ObjectProperty", "individual": "NamedIndividual"}
        return f"Declaration({kinds[axiom.kind]}({axiom.name}))"
    if isinstance(axiom, ClassAssertion):
        return f"ClassAssertion({_expr_text(axiom.type)} {axiom.individual})"
    if isinstance(axiom, ObjectPropertyAssertion):
        return f"ObjectPropertyAssertion({axiom.role} {axiom.subject} {axiom.object})"
    raise TypeError(f"not an axiom: {axiom!r}")


def _used_prefixes(model: DocumentModel):
    used = set()
    for axiom in model.axioms:
        for name in axiom.signature():
            used.add(name.prefix)
    if model.name and ":" in model.name:
        used.add(model.name.partition(":")[0])
    return used


def serialize(model: DocumentModel) -> str:
    """Canonical text: sorted prefix declarations (always including the
    predeclared ones), sorted axiom lines, LF endings."""
    prefixes = dict(DEFAULT_PREFIXES)
    prefixes.update(model.prefixes)
    missing = _used_prefixes(model) - set(prefixes)
    if missing:
        raise ValueError(f"undeclared prefixes in model: {sorted(missing)}")
    lines = [
        f"Prefix({p}:=<{iri}>)" for p, iri in sorted(prefixes.items())
    ]
    header = f"Ontology({model.name}" if model.name else "Ontology("
    lines.append(header)
    for text in sorted(axiom_text(a) for a in set(model.axioms)):
        lines.append(text)
    lines.append(")")
    return "\n".join(lines) + "\n"


def document_for_axioms(axioms, known_prefixes=None, name=None) -> DocumentModel:
    """Build a serializable document for a stored axiom set: remembered
    prefix expansions win, predeclared ones fill in, anything still unknown
    gets a deterministic fallback expansion."""
    prefixes = dict(DEFAULT_PREFIXES)
    if known_prefixes:
        prefixes.update(known_prefixes)
    model = DocumentModel(prefixes=prefixes, name=name, axioms=sorted(axioms, key=axiom_text))
    for prefix in sorted(_used_prefixes(model)):
        if prefix not in prefixes:
            prefixes[prefix] = FALLBACK_IRI_TEMPLATE.format(prefix)
    return model
