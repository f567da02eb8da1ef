"""Saturation over normalized axioms plus assertions, and the query layer.

Individuals participate as singleton concepts: each individual gets one
generated atom, class assertions become inclusions of that atom, and
property assertions seed role edges between atoms. The ontology is
inconsistent exactly when Bottom becomes derivable for some individual's
atom; an unsatisfiable class alone does not make it inconsistent.

Range axioms are applied by a dedicated rule: fillers of normalized
existentials are replaced by per-role context atoms that carry the range
classes (so ranges never leak onto the named filler class itself), and
targets of asserted property edges receive the range classes directly.

The fixpoint kernel is the compiled extension when available, else the
pure Python twin; set ARMORDB_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from ..errors import (
    InconsistentOntologyError,
    UnknownEntityError,
    UnsupportedExpressionError,
)
from ..model import (
    BOTTOM,
    TOP,
    Bottom,
    ClassAssertion,
    ClassExpression,
    Declaration,
    EntityName,
    INDIVIDUAL_KIND,
    Named,
    ObjectPropertyAssertion,
    Top,
    named_class,
)
from .normalize import IndAtom, NormalizedTBox, Normalizer

if os.environ.get("ARMORDB_PURE_PYTHON"):
    from . import _satcore_py as _kernel

    BACKEND = "python"
else:
    try:
        from . import _satcore as _kernel  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _satcore_py as _kernel

        BACKEND = "python"

TOP_NAME = "owl:Thing"
BOTTOM_NAME = "owl:Nothing"


@dataclass(frozen=True)
class SubsumptionSet:
    """Entailed subsumptions over the named signature plus Top/Bottom,
    reflexive and transitively closed, and the reflexive-transitive role
    hierarchy closure."""

    subsumptions: frozenset
    role_subsumptions: frozenset


@dataclass(frozen=True)
class Realization:
    """Named types provably holding for each individual, and the
    consistency verdict. When consistent is False the type map must not be
    served."""

    types: dict
    consistent: bool


@dataclass(frozen=True)
class Hierarchy:
    """Transitive reduction of the subsumption set: equivalence groups and
    direct super-group edges (groups are frozensets of canonical names)."""

    groups: dict
    direct_supers: dict
    direct_subs: dict


def _role_closure(roles, incs):
    supers = {r: {r} for r in roles}
    changed = True
    while changed:
        changed = False
        for sub, sup in incs:
            if sub not in supers:
                supers[sub] = {sub}
            if sup not in supers:
                supers[sup] = {sup}
            reach = supers[sub]
            add = supers[sup] - reach
            if add:
                reach |= add
                changed = True
    return supers


class _Assembly:
    """One saturation run: symbolic assembly, interning, kernel call."""

    def __init__(self, ntbox: NormalizedTBox, abox, query_expr=None):
        norm = Normalizer(ntbox)
        classes = set(ntbox.classes)
        roles = set(ntbox.roles)
        individuals = set()
        sym_edges = []

        for axiom in abox:
            cs, rs, inds = set(), set(), set()
            axiom.collect_signature(cs, rs, inds)
            classes |= cs
            roles |= rs
            individuals |= inds
            if isinstance(axiom, ClassAssertion):
                norm.gci(IndAtom(axiom.individual), axiom.type)
            elif isinstance(axiom, ObjectPropertyAssertion):
                sym_edges.append((axiom.role, IndAtom(axiom.subject), IndAtom(axiom.object)))
            elif isinstance(axiom, Declaration) and axiom.kind == INDIVIDUAL_KIND:
                pass
            else:
                raise UnsupportedExpressionError(f"not an assertional axiom: {axiom!r}")

        self.query_atom = None
        if query_expr is not None:
            self.query_atom = norm._fresh()
            norm.gci(query_expr, self.query_atom)

        role_supers = _role_closure(roles, norm.role_incs)
        range_atoms = {}
        for r in role_supers:
            collected = set()
            for r2, atom in norm.ranges:
                if r2 in role_supers[r]:
                    collected.add(atom)
            if collected:
                range_atoms[r] = collected

        # Replace fillers of existential inclusions by context atoms that
        # carry the applicable ranges.
        nf3 = []
        ctx_cache = {}
        for a, r, b in norm.nf3:
            ras = range_atoms.get(r)
            if not ras:
                nf3.append((a, r, b))
                continue
            ctx = ctx_cache.get((r, b))
            if ctx is None:
                ctx = ("ctx", r, b)
                ctx_cache[(r, b)] = ctx
                norm.nf1.append((ctx, b))
                for atom in ras:
                    norm.nf1.append((ctx, atom))
            nf3.append((a, r, ctx))

        seeds = []
        for r, sx, sy in sym_edges:
            for atom in range_atoms.get(r, ()):
                seeds.append((sy, atom))

        # Intern atoms: Top=0, Bottom=1, named classes, individuals, rest.
        ids = {TOP: 0, BOTTOM: 1}

        def intern(atom):
            i = ids.get(atom)
            if i is None:
                i = len(ids)
                ids[atom] = i
            return i

        self.named = sorted(classes, key=str)
        self.individuals = sorted(individuals, key=str)
        self.roles = sorted(roles, key=str)
        for name in self.named:
            intern(name)
        ind_atoms = [IndAtom(name) for name in self.individuals]
        for atom in ind_atoms:
            intern(atom)

        role_ids = {}
        for r in sorted(role_supers, key=str):
            role_ids[r] = len(role_ids)

        nf1 = [(intern(a), intern(b)) for a, b in norm.nf1]
        nf2 = [(intern(a1), intern(a2), intern(b)) for a1, a2, b in norm.nf2]
        nf3i = [(intern(a), role_ids[r], intern(b)) for a, r, b in nf3]
        nf4 = [(role_ids[r], intern(a), intern(b)) for r, a, b in norm.nf4]
        seed_ids = [(intern(x), intern(a)) for x, a in seeds]
        edge_ids = [(role_ids[r], intern(x), intern(y)) for r, x, y in sym_edges]
        role_sup = [[] for _ in role_ids]
        for r, rid in role_ids.items():
            role_sup[rid] = sorted(role_ids[s] for s in role_supers[r])

        self.subs, self.rel = _kernel.saturate_core(
            len(ids), len(role_ids), nf1, nf2, nf3i, nf4, role_sup, seed_ids, edge_ids
        )

        self.ids = ids
        self.role_ids = role_ids
        self.role_supers = role_supers
        self.named_ids = {str(n): ids[n] for n in self.named}
        self.ind_ids = {str(n): ids[IndAtom(n)] for n in self.individuals}
        self.consistent = not any(1 in self.subs[i] for i in self.ind_ids.values())

    def named_pairs(self):
        """(sub, sup) pairs over named classes plus Top/Bottom; atoms with
        Bottom derived (and everything, when inconsistent) subsume under
        every member of the universe, matching logical explosion."""
        universe = [TOP_NAME, BOTTOM_NAME] + [str(n) for n in self.named]
        out_by_id = {0: TOP_NAME, 1: BOTTOM_NAME}
        for n in self.named:
            out_by_id[self.ids[n]] = str(n)
        pairs = set()
        if not self.consistent:
            for a in universe:
                for b in universe:
                    pairs.add((a, b))
            return pairs
        for a_name in universe:
            aid = self.named_ids.get(a_name, 0 if a_name == TOP_NAME else 1)
            row = self.subs[aid]
            if 1 in row:
                for b_name in universe:
                    pairs.add((a_name, b_name))
                continue
            for bid in row:
                b_name = out_by_id.get(bid)
                if b_name is not None:
                    pairs.add((a_name, b_name))
        return pairs

    def individual_types(self):
        out_by_id = {0: TOP_NAME}
        for n in self.named:
            out_by_id[self.ids[n]] = str(n)
        types = {}
        for ind, iid in self.ind_ids.items():
            types[ind] = frozenset(
                out_by_id[a] for a in self.subs[iid] if a in out_by_id
            )
        return types

    def property_index(self):
        """role -> subject -> set of asserted-or-inherited fillers, both
        endpoints individuals (no invented anonymous fillers)."""
        inv_ind = {iid: name for name, iid in self.ind_ids.items()}
        index = {}
        for r in self.roles:
            rid = self.role_ids.get(r)
            if rid is None:
                continue
            per_subj = {}
            for x, y in self.rel[rid]:
                sx, sy = inv_ind.get(x), inv_ind.get(y)
                if sx is not None and sy is not None:
                    per_subj.setdefault(sx, set()).add(sy)
            if per_subj:
                index[str(r)] = per_subj
        return index

    def role_pairs(self):
        pairs = set()
        user = set(self.roles)
        for r in user:
            for s in self.role_supers.get(r, {r}):
                if s in user:
                    pairs.add((str(r), str(s)))
        return pairs


def saturate(ntbox: NormalizedTBox, abox) -> "Inference":
    """Run the completion rules to fixpoint over a normalized TBox and an
    ABox; returns the inference snapshot (subsumption set + realization
    plus the query layer)."""
    return Inference(ntbox, tuple(abox))


class Inference:
    """Immutable inference snapshot for one revision of an ontology."""

    def __init__(self, ntbox: NormalizedTBox, abox: tuple):
        self._ntbox = ntbox
        self._abox = abox
        asm = _Assembly(ntbox, abox)
        self._named = {str(n) for n in asm.named}
        self._individuals = {str(n) for n in asm.individuals}
        self._pairs = asm.named_pairs()
        self.subsumption_set = SubsumptionSet(
            subsumptions=frozenset(self._pairs),
            role_subsumptions=frozenset(asm.role_pairs()),
        )
        self.realization = Realization(
            types=asm.individual_types(), consistent=asm.consistent
        )
        self._prop = asm.property_index()
        self._hierarchy = None

    @property
    def consistent(self) -> bool:
        return self.realization.consistent

    # -- helpers --

    def _require_consistent(self):
        if not self.consistent:
            raise InconsistentOntologyError("ontology is inconsistent")

    def subsumes(self, sup: str, sub: str) -> bool:
        return (sub, sup) in self._pairs

    def _universe(self):
        return self._named | {TOP_NAME, BOTTOM_NAME}

    def _strictly_below(self, a: str, b: str) -> bool:
        return (a, b) in self._pairs and (b, a) not in self._pairs

    # -- classification --

    def classify(self) -> Hierarchy:
        """Direct (non-transitive) class hierarchy: equivalence groups and
        covering edges, the exact transitive reduction of the subsumption
        set."""
        if self._hierarchy is not None:
            return self._hierarchy
        nodes = sorted(self._universe())
        group_of = {}
        groups = []
        for n in nodes:
            if n in group_of:
                continue
            members = frozenset(
                m for m in nodes if (n, m) in self._pairs and (m, n) in self._pairs
            )
            for m in members:
                group_of[m] = members
            groups.append(members)

        def leq(g1, g2):
            return (next(iter(g1)), next(iter(g2))) in self._pairs

        direct_supers = {}
        direct_subs = {g: set() for g in groups}
        for g in groups:
            uppers = [h for h in groups if h is not g and leq(g, h)]
            direct = []
            for h in uppers:
                if not any(o is not h and leq(o, h) for o in uppers):
                    direct.append(h)
            direct_supers[g] = frozenset(direct)
            for h in direct:
                direct_subs[h].add(g)
        self._hierarchy = Hierarchy(
            groups=group_of,
            direct_supers=direct_supers,
            direct_subs={g: frozenset(v) for g, v in direct_subs.items()},
        )
        return self._hierarchy

    def hierarchy_neighbors(self, name: EntityName, kind: str):
        """Named neighbors of a class: 'sub' and 'sup' give direct edges
        (Top/Bottom filtered out), 'equiv' gives the rest of its group."""
        self._require_consistent()
        canon = str(named_class(name))
        if canon not in self._universe():
            raise UnknownEntityError(f"unknown class {canon}")
        hier = self.classify()
        group = hier.groups[canon]
        if kind == "equiv":
            return sorted(group - {canon})
        if kind == "sup":
            neighbor_groups = hier.direct_supers[group]
        elif kind == "sub":
            neighbor_groups = hier.direct_subs[group]
        else:
            raise ValueError(f"unknown hierarchy direction {kind!r}")
        out = set()
        for g in neighbor_groups:
            out |= g
        return sorted(n for n in out if n not in (TOP_NAME, BOTTOM_NAME))

    # -- realization queries --

    def _known_individual(self, name: EntityName) -> str:
        canon = str(name)
        if canon not in self._individuals:
            raise UnknownEntityError(f"unknown individual {canon}")
        return canon

    def types_of(self, individual: EntityName, direct=False, include_top=False):
        """Named classes the individual provably belongs to, sorted; with
        direct=True only the most specific ones."""
        canon = self._known_individual(individual)
        self._require_consistent()
        all_types = {t for t in self.realization.types[canon] if t != TOP_NAME}
        if not direct:
            result = all_types
        else:
            result = {
                t
                for t in all_types
                if not any(o != t and self._strictly_below(o, t) for o in all_types)
            }
        if include_top:
            result = result | {TOP_NAME}
        return sorted(result)

    def instances_of(self, expr, direct=False):
        """Individuals provably belonging to a class expression, sorted.
        Complex expressions are internalized under a fresh atom and run
        through one extra saturation pass."""
        self._require_consistent()
        if isinstance(expr, EntityName):
            expr = named_class(expr)
        if isinstance(expr, Top):
            if not direct:
                return sorted(self._individuals)
            return sorted(
                i
                for i in self._individuals
                if not self.types_of(EntityName.parse(i), direct=False)
            )
        if isinstance(expr, Bottom):
            return []
        if isinstance(expr, Named):
            target = str(expr.name)
            out = []
            for ind in self._individuals:
                types = self.realization.types[ind]
                if target not in types:
                    continue
                if direct and any(
                    t not in (target, TOP_NAME) and self._strictly_below(t, target)
                    for t in types
                ):
                    continue
                out.append(ind)
            return sorted(out)
        return self._instances_of_complex(expr, direct)

    def _instances_of_complex(self, expr: ClassExpression, direct: bool):
        asm = _Assembly(self._ntbox, self._abox, query_expr=expr)
        qid = asm.ids[asm.query_atom]
        named_ids = asm.named_ids
        out = []
        for ind, iid in asm.ind_ids.items():
            row = asm.subs[iid]
            if qid not in row:
                continue
            if direct:
                shadowed = False
                for t, tid in named_ids.items():
                    if tid != qid and tid in row:
                        if qid in asm.subs[tid] and tid not in asm.subs[qid]:
                            shadowed = True
                            break
                if shadowed:
                    continue
            out.append(ind)
        return sorted(out)

    # -- property retrieval (asserted data; allowed even when inconsistent) --

    def property_values(self, subject: EntityName, role: EntityName):
        """Fillers of (subject, role), including via sub-roles, sorted."""
        canon = self._known_individual(subject)
        values = self._prop.get(str(role), {}).get(canon, ())
        return sorted(values)

    def has_individual(self, name: EntityName) -> bool:
        return str(name) in self._individuals

    def individuals(self):
        return sorted(self._individuals)
