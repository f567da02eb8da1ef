"""Independent entailment oracle: exhaustive interpretation search.

Completely separate route from the saturation reasoner: ontologies are
evaluated semantically by enumerating all interpretations over domains of
size 1..3 (classes as bitmasks over domain elements, the role as an
adjacency bitmask, individuals as element assignments).

  - A subsumption C ⊑ D is entailed iff no interpretation satisfying the
    axioms has a witness element in C and not in D.
  - The ontology is consistent iff some interpretation satisfies all
    axioms including the assertions; with no individuals the empty
    interpretation vacuously satisfies every supported axiom, so an
    ontology without individuals is always consistent.
  - An inconsistent ontology entails every subsumption.

Small signatures (at most 3 named classes, 1 role) admit counter-models of
size at most 3: elements are only forced apart by disjointness, which over
3 classes yields at most 3 mutually incompatible element types, and purely
existential requirements can always share elements or loop.

The inner enumeration is JIT-compiled with numba.
"""

from itertools import product

import numpy as np
from numba import njit

from armordb.model import (
    Bottom,
    ClassAssertion,
    Declaration,
    DisjointClasses,
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
)

OP_CLASS = 0
OP_TOP = 1
OP_BOTTOM = 2
OP_AND = 3
OP_EXISTS = 4

TOP_NAME = "owl:Thing"
BOTTOM_NAME = "owl:Nothing"


class _Compiler:
    def __init__(self):
        self.code = []
        self.classes = {}
        self.roles = {}
        self.individuals = {}

    def class_idx(self, name):
        return self.classes.setdefault(str(name), len(self.classes))

    def role_idx(self, name):
        return self.roles.setdefault(str(name), len(self.roles))

    def ind_idx(self, name):
        return self.individuals.setdefault(str(name), len(self.individuals))

    def emit(self, expr):
        """Append postfix ops for expr; returns (start, length) in ops."""
        start = len(self.code)
        self._emit(expr)
        return start, len(self.code) - start

    def _emit(self, expr):
        if isinstance(expr, Named):
            self.code.append((OP_CLASS, self.class_idx(expr.name)))
        elif isinstance(expr, Top):
            self.code.append((OP_TOP, 0))
        elif isinstance(expr, Bottom):
            self.code.append((OP_BOTTOM, 0))
        elif isinstance(expr, Intersection):
            self._emit(expr.operands[0])
            for op in expr.operands[1:]:
                self._emit(op)
                self.code.append((OP_AND, 0))
        elif isinstance(expr, Existential):
            self._emit(expr.filler)
            self.code.append((OP_EXISTS, self.role_idx(expr.role)))
        else:
            raise TypeError(f"unsupported expression {expr!r}")


def compile_ontology(axioms):
    comp = _Compiler()
    gcis = []
    ranges = []
    role_incs = []
    cls_asserts = []
    prop_asserts = []

    def gci(sub, sup):
        s0, s1 = comp.emit(sub)
        t0, t1 = comp.emit(sup)
        gcis.append((s0, s1, t0, t1))

    for axiom in axioms:
        if isinstance(axiom, SubClassOf):
            gci(axiom.sub, axiom.sup)
        elif isinstance(axiom, EquivalentClasses):
            for left, right in zip(axiom.members, axiom.members[1:]):
                gci(left, right)
                gci(right, left)
        elif isinstance(axiom, DisjointClasses):
            members = axiom.members
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    gci(Intersection((members[i], members[j])), Bottom())
        elif isinstance(axiom, ObjectPropertyDomain):
            gci(Existential(axiom.role, Top()), axiom.domain)
        elif isinstance(axiom, ObjectPropertyRange):
            start, length = comp.emit(axiom.range)
            ranges.append((comp.role_idx(axiom.role), start, length))
        elif isinstance(axiom, SubObjectPropertyOf):
            role_incs.append((comp.role_idx(axiom.sub), comp.role_idx(axiom.sup)))
        elif isinstance(axiom, ClassAssertion):
            start, length = comp.emit(axiom.type)
            cls_asserts.append((comp.ind_idx(axiom.individual), start, length))
        elif isinstance(axiom, ObjectPropertyAssertion):
            prop_asserts.append(
                (
                    comp.role_idx(axiom.role),
                    comp.ind_idx(axiom.subject),
                    comp.ind_idx(axiom.object),
                )
            )
        elif isinstance(axiom, Declaration):
            if axiom.kind == "class":
                comp.class_idx(axiom.name)
            elif axiom.kind == "role":
                comp.role_idx(axiom.name)
            else:
                comp.ind_idx(axiom.name)
        else:
            raise TypeError(f"unsupported axiom {axiom!r}")

    return comp, gcis, ranges, role_incs, cls_asserts, prop_asserts


@njit(cache=True)
def _eval(code, start, length, cmask, rel, d, stack):
    sp = 0
    full = (1 << d) - 1
    for k in range(length):
        op = code[2 * (start + k)]
        arg = code[2 * (start + k) + 1]
        if op == 0:
            stack[sp] = cmask[arg]
            sp += 1
        elif op == 1:
            stack[sp] = full
            sp += 1
        elif op == 2:
            stack[sp] = 0
            sp += 1
        elif op == 3:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] & stack[sp]
        else:  # EXISTS
            filler = stack[sp - 1]
            r = rel[arg]
            res = 0
            for x in range(d):
                row = (r >> (x * d)) & full
                if row & filler:
                    res |= 1 << x
            stack[sp - 1] = res
    return stack[0]


@njit(cache=True)
def _scan(
    d,
    nc,
    nr,
    ni,
    code,
    gcis,
    ranges,
    role_incs,
    cls_asserts,
    prop_asserts,
    track,
    countered,
    consistent_known,
):
    """Enumerate all interpretations of domain size d; mark counters for
    tracked pairs and report whether a model satisfying the assertions
    exists. Returns 1 if consistency was established, else 0."""
    full = (1 << d) - 1
    n_cc = 1
    for _ in range(nc):
        n_cc *= 1 << d
    n_rr = 1
    for _ in range(nr):
        n_rr *= 1 << (d * d)
    cmask = np.zeros(max(nc, 1), dtype=np.int64)
    rel = np.zeros(max(nr, 1), dtype=np.int64)
    mu = np.zeros(max(ni, 1), dtype=np.int64)
    stack = np.zeros(32, dtype=np.int64)
    consistent = consistent_known != 0
    n_track = track.shape[0]

    for cc in range(n_cc):
        v = cc
        for i in range(nc):
            cmask[i] = v & full
            v >>= d
        for rr in range(n_rr):
            v = rr
            for i in range(nr):
                rel[i] = v & ((1 << (d * d)) - 1)
                v >>= d * d
            ok = True
            for g in range(gcis.shape[0]):
                lhs = _eval(code, gcis[g, 0], gcis[g, 1], cmask, rel, d, stack)
                rhs = _eval(code, gcis[g, 2], gcis[g, 3], cmask, rel, d, stack)
                if lhs & ~rhs:
                    ok = False
                    break
            if ok:
                for q in range(ranges.shape[0]):
                    mask = _eval(code, ranges[q, 1], ranges[q, 2], cmask, rel, d, stack)
                    r = rel[ranges[q, 0]]
                    for x in range(d):
                        row = (r >> (x * d)) & full
                        if row & ~mask:
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                for q in range(role_incs.shape[0]):
                    if rel[role_incs[q, 0]] & ~rel[role_incs[q, 1]]:
                        ok = False
                        break
            if not ok:
                continue

            # TBox model found: collect counter-witnesses.
            all_countered = True
            for t in range(n_track):
                if countered[t]:
                    continue
                a = track[t, 0]
                b = track[t, 1]
                if a < nc:
                    lm = cmask[a]
                elif a == nc:
                    lm = full
                else:
                    lm = 0
                if b < nc:
                    rm = cmask[b]
                elif b == nc:
                    rm = full
                else:
                    rm = 0
                if lm & ~rm:
                    countered[t] = 1
                elif not countered[t]:
                    all_countered = False

            if not consistent and ni > 0:
                n_mu = 1
                for _ in range(ni):
                    n_mu *= d
                for m in range(n_mu):
                    v = m
                    for i in range(ni):
                        mu[i] = v % d
                        v //= d
                    good = True
                    for q in range(cls_asserts.shape[0]):
                        mask = _eval(
                            code, cls_asserts[q, 1], cls_asserts[q, 2], cmask, rel, d, stack
                        )
                        if not (mask >> mu[cls_asserts[q, 0]]) & 1:
                            good = False
                            break
                    if good:
                        for q in range(prop_asserts.shape[0]):
                            r = rel[prop_asserts[q, 0]]
                            bit = mu[prop_asserts[q, 1]] * d + mu[prop_asserts[q, 2]]
                            if not (r >> bit) & 1:
                                good = False
                                break
                    if good:
                        consistent = True
                        break

            if all_countered and consistent:
                return 1
    return 1 if consistent else 0


class OracleResult:
    def __init__(self, consistent, entailed, universe):
        self.consistent = consistent
        self.entailed = entailed
        self.universe = universe


def decide(axioms, max_domain=3):
    """Decide consistency and all named subsumptions by interpretation
    search up to the given domain size."""
    comp, gcis, ranges, role_incs, cls_asserts, prop_asserts = compile_ontology(axioms)
    nc = len(comp.classes)
    nr = len(comp.roles)
    ni = len(comp.individuals)
    names = sorted(comp.classes, key=lambda s: comp.classes[s])

    top_code = nc
    bottom_code = nc + 1
    atom_code = dict(comp.classes)
    atom_code[TOP_NAME] = top_code
    atom_code[BOTTOM_NAME] = bottom_code
    universe = names + [TOP_NAME, BOTTOM_NAME]

    track = []
    for a in universe:
        for b in universe:
            ca, cb = atom_code[a], atom_code[b]
            if a == b or cb == top_code or ca == bottom_code:
                continue  # trivially entailed, no search needed
            track.append((ca, cb))

    code = np.array(
        [v for pair in comp.code for v in pair] or [0], dtype=np.int64
    )
    gcis_a = np.array(gcis or np.zeros((0, 4)), dtype=np.int64).reshape(-1, 4)
    ranges_a = np.array(ranges or np.zeros((0, 3)), dtype=np.int64).reshape(-1, 3)
    rinc_a = np.array(role_incs or np.zeros((0, 2)), dtype=np.int64).reshape(-1, 2)
    ca_a = np.array(cls_asserts or np.zeros((0, 3)), dtype=np.int64).reshape(-1, 3)
    pa_a = np.array(prop_asserts or np.zeros((0, 3)), dtype=np.int64).reshape(-1, 3)
    track_a = np.array(track or np.zeros((0, 2)), dtype=np.int64).reshape(-1, 2)
    countered = np.zeros(len(track), dtype=np.uint8)

    consistent = ni == 0  # the empty interpretation satisfies any TBox
    for d in range(1, max_domain + 1):
        got = _scan(
            d,
            nc,
            nr,
            ni,
            code,
            gcis_a,
            ranges_a,
            rinc_a,
            ca_a,
            pa_a,
            track_a,
            countered,
            1 if consistent else 0,
        )
        consistent = consistent or bool(got)
        if consistent and countered.all():
            break

    entailed = set()
    if not consistent:
        for a in universe:
            for b in universe:
                entailed.add((a, b))
        return OracleResult(False, entailed, universe)

    code_to_name = {v: k for k, v in atom_code.items()}
    for a in universe:
        for b in universe:
            ca, cb = atom_code[a], atom_code[b]
            if a == b or cb == top_code or ca == bottom_code:
                entailed.add((a, b))
    for t, (ca, cb) in enumerate(track):
        if not countered[t]:
            entailed.add((code_to_name[ca], code_to_name[cb]))
    return OracleResult(True, entailed, universe)
