"""Pure Python saturation kernel.

Computes the least fixpoint of the completion rules over integer-indexed
normal-form inclusions. Atom 0 is Top, atom 1 is Bottom. Twin of the
compiled kernel in _satcore.pyx; both must produce identical output for
identical input.

Rules (S = memberships, R = role edges):
    CR1   a ∈ S(x), (a ⊑ b)            -> b ∈ S(x)
    CR2   a1, a2 ∈ S(x), (a1 ⊓ a2 ⊑ b) -> b ∈ S(x)
    CR3   a ∈ S(x), (a ⊑ ∃r.b)         -> (x, b) ∈ R(r)
    CR4   (x, y) ∈ R(r), a ∈ S(y), (∃r.a ⊑ b) -> b ∈ S(x)
    CR5   (x, y) ∈ R(r), Bottom ∈ S(y) -> Bottom ∈ S(x)
    edges propagate to super-roles on creation (role_sup is closed)
"""

from collections import deque

TOP = 0
BOTTOM = 1


def saturate_core(n_atoms, n_roles, nf1, nf2, nf3, nf4, role_sup, seeds, edges):
    """Saturate and return (subs, rel).

    subs: list of sets; subs[x] holds every atom a with x ⊑ a derived.
    rel: list of sets per role; rel[r] holds derived (x, y) edge pairs.
    role_sup[r] must list every super-role of r including r itself.
    """
    by1 = {}
    for a, b in nf1:
        by1.setdefault(a, []).append(b)
    by2 = {}
    for a1, a2, b in nf2:
        by2.setdefault(a1, []).append((a2, b))
        if a2 != a1:
            by2.setdefault(a2, []).append((a1, b))
    by3 = {}
    for a, r, b in nf3:
        by3.setdefault(a, []).append((r, b))
    by4 = {}
    for r, a, b in nf4:
        by4.setdefault(a, []).append((r, b))

    subs = [set() for _ in range(n_atoms)]
    rel = [set() for _ in range(n_roles)]
    pred = [{} for _ in range(n_roles)]  # y -> set of x with (x, y) in R(r)

    queue = deque()

    def add_sub(x, a):
        if a not in subs[x]:
            subs[x].add(a)
            queue.append((x, a, -1))

    def add_edge(r, x, y):
        for s in role_sup[r]:
            if (x, y) not in rel[s]:
                rel[s].add((x, y))
                pred[s].setdefault(y, set()).add(x)
                queue.append((s, x, y))

    for x in range(n_atoms):
        add_sub(x, x)
        add_sub(x, TOP)
    for x, a in seeds:
        add_sub(x, a)
    for r, x, y in edges:
        add_edge(r, x, y)

    while queue:
        first, second, third = queue.popleft()
        if third < 0:
            x, a = first, second
            for b in by1.get(a, ()):
                add_sub(x, b)
            for other, b in by2.get(a, ()):
                if other in subs[x]:
                    add_sub(x, b)
            for r, b in by3.get(a, ()):
                add_edge(r, x, b)
            for r, b in by4.get(a, ()):
                for w in pred[r].get(x, ()):
                    add_sub(w, b)
            if a == BOTTOM:
                for r in range(n_roles):
                    for w in pred[r].get(x, ()):
                        add_sub(w, BOTTOM)
        else:
            r, x, y = first, second, third
            for a in list(subs[y]):
                for r2, b in by4.get(a, ()):
                    if r2 == r:
                        add_sub(x, b)
            if BOTTOM in subs[y]:
                add_sub(x, BOTTOM)

    return subs, rel
