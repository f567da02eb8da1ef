# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled saturation kernel.

Same contract and completion rules as the pure Python twin in
_satcore_py.py: atom 0 is Top, atom 1 is Bottom, role_sup rows are closed
(each role lists itself). Memberships live in a dense n*n byte matrix, so
the kernel targets ontologies up to a few thousand atoms.
"""

from libcpp.vector cimport vector
from libcpp.unordered_set cimport unordered_set

cdef int C_TOP = 0
cdef int C_BOTTOM = 1

TOP = 0
BOTTOM = 1


cdef struct Edge:
    int r
    int x
    int y


def saturate_core(int n_atoms, int n_roles, nf1, nf2, nf3, nf4, role_sup, seeds, edges):
    """Saturate and return (subs, rel) exactly like _satcore_py.saturate_core."""
    cdef int n = n_atoms
    cdef int nr = n_roles if n_roles > 0 else 1

    cdef vector[unsigned char] memb
    memb.resize(<long long> n * n, 0)
    cdef vector[vector[int]] mlist
    mlist.resize(n)

    cdef vector[vector[int]] by1, by2o, by2b, by3r, by3b, by4r, by4b
    by1.resize(n); by2o.resize(n); by2b.resize(n)
    by3r.resize(n); by3b.resize(n); by4r.resize(n); by4b.resize(n)

    cdef vector[vector[int]] sup
    sup.resize(nr)

    cdef vector[unordered_set[long long]] eset
    eset.resize(nr)
    cdef vector[vector[int]] predr
    predr.resize(<long long> nr * n)

    cdef int a, b, o, r, s, x, y, w, i
    for item in nf1:
        a = item[0]; b = item[1]
        by1[a].push_back(b)
    for item in nf2:
        a = item[0]; o = item[1]; b = item[2]
        by2o[a].push_back(o); by2b[a].push_back(b)
        if o != a:
            by2o[o].push_back(a); by2b[o].push_back(b)
    for item in nf3:
        a = item[0]; r = item[1]; b = item[2]
        by3r[a].push_back(r); by3b[a].push_back(b)
    for item in nf4:
        r = item[0]; a = item[1]; b = item[2]
        by4r[a].push_back(r); by4b[a].push_back(b)
    for r in range(n_roles):
        for s_obj in role_sup[r]:
            sup[r].push_back(<int> s_obj)

    cdef vector[long long] mq    # membership events packed x*n+a
    cdef vector[Edge] eq         # edge events
    cdef size_t mh = 0, eh = 0

    cdef long long key, ekey
    cdef Edge ev

    for x in range(n):
        key = <long long> x * n + x
        if not memb[key]:
            memb[key] = 1; mlist[x].push_back(x); mq.push_back(key)
        key = <long long> x * n + C_TOP
        if not memb[key]:
            memb[key] = 1; mlist[x].push_back(C_TOP); mq.push_back(key)
    for item in seeds:
        x = item[0]; a = item[1]
        key = <long long> x * n + a
        if not memb[key]:
            memb[key] = 1; mlist[x].push_back(a); mq.push_back(key)
    for item in edges:
        r = item[0]; x = item[1]; y = item[2]
        for i in range(<int> sup[r].size()):
            s = sup[r][i]
            ekey = (<long long> s * n + x) * n + y
            if eset[s].find(ekey) == eset[s].end():
                eset[s].insert(ekey)
                predr[<long long> s * n + y].push_back(x)
                ev.r = s; ev.x = x; ev.y = y
                eq.push_back(ev)

    cdef size_t j, k, limit
    while mh < mq.size() or eh < eq.size():
        while mh < mq.size():
            key = mq[mh]; mh += 1
            x = <int> (key / n); a = <int> (key % n)
            for j in range(by1[a].size()):
                b = by1[a][j]
                key = <long long> x * n + b
                if not memb[key]:
                    memb[key] = 1; mlist[x].push_back(b); mq.push_back(key)
            for j in range(by2o[a].size()):
                o = by2o[a][j]
                if memb[<long long> x * n + o]:
                    b = by2b[a][j]
                    key = <long long> x * n + b
                    if not memb[key]:
                        memb[key] = 1; mlist[x].push_back(b); mq.push_back(key)
            for j in range(by3r[a].size()):
                r = by3r[a][j]; b = by3b[a][j]
                for k in range(sup[r].size()):
                    s = sup[r][k]
                    ekey = (<long long> s * n + x) * n + b
                    if eset[s].find(ekey) == eset[s].end():
                        eset[s].insert(ekey)
                        predr[<long long> s * n + b].push_back(x)
                        ev.r = s; ev.x = x; ev.y = b
                        eq.push_back(ev)
            for j in range(by4r[a].size()):
                r = by4r[a][j]; b = by4b[a][j]
                for k in range(predr[<long long> r * n + x].size()):
                    w = predr[<long long> r * n + x][k]
                    key = <long long> w * n + b
                    if not memb[key]:
                        memb[key] = 1; mlist[w].push_back(b); mq.push_back(key)
            if a == C_BOTTOM:
                for r in range(n_roles):
                    for k in range(predr[<long long> r * n + x].size()):
                        w = predr[<long long> r * n + x][k]
                        key = <long long> w * n + C_BOTTOM
                        if not memb[key]:
                            memb[key] = 1; mlist[w].push_back(C_BOTTOM); mq.push_back(key)
        if eh < eq.size():
            ev = eq[eh]; eh += 1
            r = ev.r; x = ev.x; y = ev.y
            limit = mlist[y].size()
            for k in range(limit):
                a = mlist[y][k]
                for j in range(by4r[a].size()):
                    if by4r[a][j] == r:
                        b = by4b[a][j]
                        key = <long long> x * n + b
                        if not memb[key]:
                            memb[key] = 1; mlist[x].push_back(b); mq.push_back(key)
            if memb[<long long> y * n + C_BOTTOM]:
                key = <long long> x * n + C_BOTTOM
                if not memb[key]:
                    memb[key] = 1; mlist[x].push_back(C_BOTTOM); mq.push_back(key)

    subs = []
    for x in range(n):
        row = set()
        for k in range(mlist[x].size()):
            row.add(mlist[x][k])
        subs.append(row)
    rel = []
    for r in range(n_roles):
        pairs = set()
        for ekey in eset[r]:
            pairs.add((<int> ((ekey / n) % n), <int> (ekey % n)))
        rel.append(pairs)
    return subs, rel
