"""Normalization of terminological axioms into normal-form inclusions.

Output shapes (A, Ai, B atomic: named class, Top, Bottom, or generated
auxiliary; r, s role names):

    nf1:  A ⊑ B
    nf2:  A1 ⊓ A2 ⊑ B
    nf3:  A ⊑ ∃r.B
    nf4:  ∃r.A ⊑ B
    role_incs:  r ⊑ s

Range axioms are not compiled away (doing so naively is unsound); they are
kept as (role, atom) constraints and applied by a dedicated rule at
saturation time. Auxiliary names live under the reserved `gen:` prefix and
never leak into query results, which keeps the rewriting conservative over
the input signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import UnsupportedExpressionError
from ..model import (
    AUX_PREFIX,
    BOTTOM,
    TOP,
    Bottom,
    Declaration,
    DisjointClasses,
    EntityName,
    EquivalentClasses,
    Existential,
    Intersection,
    Named,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    SubClassOf,
    SubObjectPropertyOf,
    Top,
    _expr_key,
)


@dataclass(frozen=True)
class IndAtom:
    """Singleton concept standing for one individual during saturation."""

    name: EntityName

    def __str__(self):
        return f"<{self.name}>"


def _is_atom(x) -> bool:
    return isinstance(x, (EntityName, Top, Bottom, IndAtom))


def _as_atom(x):
    """The atom behind an expression, or None when genuinely complex."""
    if isinstance(x, Named):
        return x.name
    if isinstance(x, Top):
        return TOP
    if isinstance(x, Bottom):
        return BOTTOM
    if _is_atom(x):
        return x
    return None


@dataclass
class NormalizedTBox:
    nf1: list = field(default_factory=list)
    nf2: list = field(default_factory=list)
    nf3: list = field(default_factory=list)
    nf4: list = field(default_factory=list)
    role_incs: list = field(default_factory=list)
    ranges: list = field(default_factory=list)
    classes: frozenset = frozenset()
    roles: frozenset = frozenset()
    aux_count: int = 0


class Normalizer:
    """Accumulates normal-form entries; reusable to extend an existing
    normalization (assertions, query concepts) without aux-name clashes."""

    def __init__(self, base: NormalizedTBox | None = None):
        if base is None:
            base = NormalizedTBox()
        self.nf1 = list(base.nf1)
        self.nf2 = list(base.nf2)
        self.nf3 = list(base.nf3)
        self.nf4 = list(base.nf4)
        self.role_incs = list(base.role_incs)
        self.ranges = list(base.ranges)
        self._aux_count = base.aux_count
        self._memo_upper = {}
        self._memo_lower = {}

    def _fresh(self) -> EntityName:
        name = EntityName(AUX_PREFIX, f"c{self._aux_count}")
        self._aux_count += 1
        return name

    def _atom_upper(self, expr):
        """Atom A with expr ⊑ A, for use of expr in subsumee positions."""
        atom = _as_atom(expr)
        if atom is not None:
            return atom
        key = _expr_key(expr)
        atom = self._memo_upper.get(key)
        if atom is None:
            atom = self._fresh()
            self._memo_upper[key] = atom
            self.gci(expr, atom)
        return atom

    def _atom_lower(self, expr):
        """Atom A with A ⊑ expr, for use of expr in subsumer positions."""
        atom = _as_atom(expr)
        if atom is not None:
            return atom
        key = _expr_key(expr)
        atom = self._memo_lower.get(key)
        if atom is None:
            atom = self._fresh()
            self._memo_lower[key] = atom
            self.gci(atom, expr)
        return atom

    def gci(self, sub, sup) -> None:
        """Record sub ⊑ sup, decomposing either side into normal shapes.
        Both sides may be atoms or class expressions."""
        sup_atom = _as_atom(sup)
        if sup_atom == TOP:
            return  # tautology
        if sup_atom is None:
            if isinstance(sup, Intersection):
                for op in sup.operands:
                    self.gci(sub, op)
                return
            if isinstance(sup, Existential):
                filler = self._atom_lower(sup.filler)
                self.nf3.append((self._atom_upper(sub), sup.role, filler))
                return
            raise UnsupportedExpressionError(f"unsupported expression {sup!r}")

        # Subsumer is atomic; decompose the subsumee.
        sub_atom = _as_atom(sub)
        if sub_atom == BOTTOM:
            return  # tautology
        if sub_atom is not None:
            self.nf1.append((sub_atom, sup_atom))
            return
        if isinstance(sub, Existential):
            filler = self._atom_upper(sub.filler)
            self.nf4.append((sub.role, filler, sup_atom))
            return
        if isinstance(sub, Intersection):
            atoms = [self._atom_upper(op) for op in sub.operands]
            while len(atoms) > 2:
                joined = self._fresh()
                self.nf2.append((atoms[0], atoms[1], joined))
                atoms = [joined] + atoms[2:]
            self.nf2.append((atoms[0], atoms[1], sup_atom))
            return
        raise UnsupportedExpressionError(f"unsupported expression {sub!r}")

    def add_axiom(self, axiom) -> None:
        if isinstance(axiom, SubClassOf):
            self.gci(axiom.sub, axiom.sup)
        elif isinstance(axiom, EquivalentClasses):
            members = axiom.members
            for left, right in zip(members, members[1:]):
                self.gci(left, right)
                self.gci(right, left)
        elif isinstance(axiom, DisjointClasses):
            members = axiom.members
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    self.gci(Intersection((members[i], members[j])), BOTTOM)
        elif isinstance(axiom, SubObjectPropertyOf):
            self.role_incs.append((axiom.sub, axiom.sup))
        elif isinstance(axiom, ObjectPropertyDomain):
            self.gci(Existential(axiom.role, TOP), axiom.domain)
        elif isinstance(axiom, ObjectPropertyRange):
            self.ranges.append((axiom.role, self._atom_lower(axiom.range)))
        elif isinstance(axiom, Declaration):
            pass  # signature only
        else:
            raise UnsupportedExpressionError(f"not a terminological axiom: {axiom!r}")

    def result(self, classes, roles) -> NormalizedTBox:
        return NormalizedTBox(
            nf1=self.nf1,
            nf2=self.nf2,
            nf3=self.nf3,
            nf4=self.nf4,
            role_incs=self.role_incs,
            ranges=self.ranges,
            classes=frozenset(classes),
            roles=frozenset(roles),
            aux_count=self._aux_count,
        )


def normalize(tbox) -> NormalizedTBox:
    """Normalize a collection of terminological axioms.

    Conservative over the input signature: for named classes A, B of the
    input, A ⊑ B holds with respect to the input iff it holds with respect
    to the output.
    """
    norm = Normalizer()
    classes, roles, individuals = set(), set(), set()
    for axiom in tbox:
        axiom.collect_signature(classes, roles, individuals)
        norm.add_axiom(axiom)
    return norm.result(classes, roles)
