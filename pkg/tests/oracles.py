"""Independent reference computations used by the tests.

These deliberately avoid the package's own elimination and enumeration code.
"""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

from hgcalc.hairygraph import HairyGraph, canonicalize, degree, is_valid


def dense_rank(rows):
    """Rank of a dense matrix by schoolbook Gaussian elimination over Q."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    cols = len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def brute_force_basis(model, n, max_edges, degrees):
    """Canonical keys of all nonzero graphs with <= max_edges edges and degree in ``degrees``.

    Every labelled multigraph and every hair assignment is generated and
    canonicalized; duplicates collapse in a set.
    """
    found = {d: set() for d in degrees}
    ids = model.ids
    for a, b in combinations_with_replacement(ids, 2):
        g = HairyGraph.make_segment(a, b)
        d = degree(g, n, model)
        if d in found and max_edges >= 1:
            can, sign = canonicalize(g, n, model)
            if sign:
                found[d].add(can.text())
    for V in range(1, max_edges + 1):
        pairs = [(u, v) for u in range(V) for v in range(u, V)]
        for e_int in range(0, max_edges):
            for edges in combinations_with_replacement(pairs, e_int):
                for h in range(1, max_edges - e_int + 1):
                    for slots in combinations_with_replacement(range(V), h):
                        for decos in product(ids, repeat=h):
                            g = HairyGraph.make(V, edges, list(zip(slots, decos)))
                            if not is_valid(g, model)[0]:
                                continue
                            d = degree(g, n, model)
                            if d not in found:
                                continue
                            can, sign = canonicalize(g, n, model)
                            if sign:
                                found[d].add(can.text())
    return {d: sorted(s) for d, s in found.items()}


def exterior_ce_ranks(dim, structure):
    """Cohomology ranks of the CE cochain complex of a Lie algebra, by brute force.

    ``structure[(i, j)] = {k: c}`` for i < j encodes [e_i, e_j] = sum c e_k.
    The cochains are the exterior algebra on the dual basis, with
    d(e^k) = -sum_{i<j} c^k_{ij} e^i e^j extended as a derivation.
    """
    basis = {p: list(combinations(range(dim), p)) for p in range(dim + 1)}

    def wedge(a, b):
        # product of two sorted index tuples, with sign
        if set(a) & set(b):
            return 0, None
        seq = list(a) + list(b)
        sign = 1
        for x in range(len(seq)):
            for y in range(x + 1, len(seq)):
                if seq[x] > seq[y]:
                    sign = -sign
        return sign, tuple(sorted(seq))

    def d_gen(k):
        out = {}
        for (i, j), img in structure.items():
            c = img.get(k, 0)
            if c:
                out[(i, j)] = out.get((i, j), 0) - Fraction(c)
        return out

    def d_mono(mono):
        out = {}
        for pos, k in enumerate(mono):
            before, after = mono[:pos], mono[pos + 1:]
            s0 = -1 if pos % 2 else 1
            for pair, c in d_gen(k).items():
                s1, left = wedge(before, pair)
                if not s1:
                    continue
                s2, full = wedge(left, after)
                if not s2:
                    continue
                out[full] = out.get(full, 0) + s0 * s1 * s2 * c
        return out

    mats = {}
    for p in range(dim):
        rows = []
        tgt = {m: i for i, m in enumerate(basis[p + 1])}
        for mono in basis[p]:
            col = [Fraction(0)] * len(basis[p + 1])
            for full, c in d_mono(mono).items():
                col[tgt[full]] += c
            rows.append(col)
        mats[p] = rows
    ranks = {p: dense_rank(mats[p]) if mats[p] and mats[p][0] else 0 for p in mats}
    return tuple(len(basis[p]) - ranks.get(p, 0) - ranks.get(p - 1, 0) for p in range(dim + 1))
