"""The decorated hairy graph complex: differential, L-infinity operations, windows.

Sign conventions (cells as in :mod:`hgcalc.hairygraph`):

* splitting a vertex v puts one side of its half-edges on a new vertex v',
  adds an edge v -> v' and prepends the cells (v', e) to the word;
* joining a hair subset S moves the decorations of S to the front (Koszul
  sign), multiplies them in word order, replaces their external ends by a new
  vertex w and adds a new hair u -> w; the word starts with (w, e, u);
  for homotopy models a rooted tree with vertices v_1..v_p (preorder) is
  inserted instead and the word starts with (v_1, e_1, ..., v_p, e_p, u);
* d_A on a decoration carries the sign of the odd cells before it.

Ring coefficients stand to the left of graphs.  With these rules the
differential squares to zero on possibly disconnected graphs, and
``ell_k(G_1, ..., G_k)`` is the part of ``D(G_1 ... G_k)`` that touches all
components.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product as iproduct
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .coeffring import (RATIONALS, CoefficientRing, RingElement, SparseMatrix, format_rational,
                        kernel_basis, rank, echelon_rows)
from .dgca import AlgebraModel, rho_basis
from .hairygraph import (DECO, EDGE, VERTEX, GraphError, HairyGraph, RawGraph, canonicalize_raw,
                         disjoint_union, is_valid, raw_from_graph)
from .trees import internal_count, labelled_trees, leaves, preorder_paths, subtree

Terms = Dict[str, Fraction]


def _acc(out: Dict, key, value):
    x = out.get(key)
    x = value if x is None else x + value
    if x:
        out[key] = x
    else:
        out.pop(key, None)


def default_threads() -> int:
    env = os.environ.get("HGCALC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# elementary pieces on raw graphs


def _odd(kind: int, ident: int, g: RawGraph, n: int, model: AlgebraModel) -> int:
    if kind == VERTEX:
        return n & 1
    if kind == EDGE:
        return (n - 1) & 1
    return model.parities[g.deco[ident]]


def split_terms(g: RawGraph, n: int) -> List[Tuple[Fraction, RawGraph]]:
    out = []
    for v in g.internal:
        halves = []
        for e, (a, b) in g.edges.items():
            if a == v:
                halves.append((e, 0))
            if b == v:
                halves.append((e, 1))
        h = len(halves)
        if h < 4:
            continue
        halves.sort()
        rest = halves[1:]
        for size in range(2, h - 1):
            for moved in combinations(rest, size):
                new = g.copy()
                v2 = new.fresh()
                e2 = new.fresh()
                new.internal.append(v2)
                for e, end in moved:
                    a, b = new.edges[e]
                    new.edges[e] = (v2, b) if end == 0 else (a, v2)
                new.edges[e2] = (v, v2)
                new.word = [(VERTEX, v2), (EDGE, e2)] + new.word
                out.append((Fraction(1), new))
    return out


def d_a_terms(g: RawGraph, n: int, model: AlgebraModel) -> List[Tuple[Fraction, RawGraph]]:
    out = []
    odd_before = 0
    for kind, ident in g.word:
        if kind == DECO:
            image = model.differential.get(g.deco[ident])
            if image:
                sign = -1 if odd_before & 1 else 1
                for k, c in image.items():
                    new = g.copy()
                    new.deco[ident] = k
                    out.append((sign * c, new))
        odd_before += _odd(kind, ident, g, n, model)
    return out


def _tree_insertion(g: RawGraph, S: Sequence[int], tree, deco: int, rest_word) -> RawGraph:
    """Insert ``tree`` on the external nodes S (leaf i -> S[i-1]); new hair decorated by ``deco``."""
    new = g.copy()
    paths = preorder_paths(tree)
    vid = {}
    for path in paths:
        vid[path] = new.fresh()
    u = new.fresh()
    prefix = []
    leaf_parent = {}
    for path in paths:
        node = subtree(tree, path)
        for i, child in enumerate(node):
            if isinstance(child, int):
                leaf_parent[child] = vid[path]
    for path in paths:
        w = vid[path]
        e = new.fresh()
        new.internal.append(w)
        if path:
            new.edges[e] = (vid[path[:-1]], w)
        else:
            new.edges[e] = (u, w)
        prefix.extend([(VERTEX, w), (EDGE, e)])
    replace = {S[i - 1]: leaf_parent[i] for i in leaf_parent}
    for e, (a, b) in list(new.edges.items()):
        if a in replace or b in replace:
            new.edges[e] = (replace.get(a, a), replace.get(b, b))
    for x in S:
        del new.deco[x]
        new.comp.pop(x, None)
    new.deco[u] = deco
    new.comp[u] = 0
    new.word = prefix + [(DECO, u)] + rest_word
    return new


def join_terms(g: RawGraph, n: int, model: AlgebraModel, components: int = 1) -> List[Tuple[Fraction, RawGraph]]:
    """All joins of hair subsets; with ``components > 1`` only subsets touching every component."""
    ext_order = [ident for kind, ident in g.word if kind == DECO]
    if len(ext_order) < 2:
        return []
    out = []
    strict = model.is_strict
    max_tree_leaves = max(model.homotopy_leaf_counts) if not strict else 0
    # odd cells before each position
    running = 0
    odd_before = {}
    for kind, ident in g.word:
        odd_before[(kind, ident)] = running
        running += _odd(kind, ident, g, n, model)
    comp = g.comp
    need = set(range(components)) if components > 1 else None
    m = len(ext_order)
    par = model.parities

    def emit(S: List[int], value: Dict[int, Fraction], tree):
        # Koszul sign of moving the decorations of S to the front
        sign_exp = 0
        odd_in_s = 0
        for x in S:
            if par[g.deco[x]]:
                sign_exp += odd_before[(DECO, x)] - odd_in_s
                odd_in_s += 1
        sign = -1 if sign_exp & 1 else 1
        sset = set(S)
        rest_word = [c for c in g.word if not (c[0] == DECO and c[1] in sset)]
        for k, c in value.items():
            out.append((sign * c, _tree_insertion(g, S, tree, k, rest_word)))

    def rec(start: int, S: List[int], partial: Optional[Dict[int, Fraction]]):
        for j in range(start, m):
            x = ext_order[j]
            a = g.deco[x]
            if partial is None:
                prod = {a: Fraction(1)}
            else:
                prod = {}
                for i, c in partial.items():
                    res = model.products.get((i, a))
                    if res:
                        for k, v in res.items():
                            _acc(prod, k, c * v)
            S.append(x)
            if len(S) >= 2 and (need is None or need <= {comp[y] for y in S}):
                if prod:
                    emit(S, prod, tuple(range(1, len(S) + 1)))
                if not strict and len(S) <= max_tree_leaves:
                    inputs = [g.deco[y] for y in S]
                    for tree in labelled_trees(len(S)):
                        if internal_count(tree) == 1:
                            if len(S) > 2:
                                # stored table entries on corollas override the product
                                val = rho_basis(model, tree, inputs)
                                if val != prod:
                                    # replace the product term already emitted
                                    corr = {k: val.get(k, Fraction(0)) - prod.get(k, Fraction(0))
                                            for k in set(val) | set(prod)}
                                    corr = {k: v for k, v in corr.items() if v}
                                    if corr:
                                        emit(S, corr, tree)
                            continue
                        val = rho_basis(model, tree, inputs)
                        if val:
                            emit(S, val, tree)
            if prod or not strict:
                rec(j + 1, S, prod if prod else {})
            S.pop()

    rec(0, [], None)
    return out


def graph_differential_terms(g: RawGraph, n: int, model: AlgebraModel) -> List[Tuple[Fraction, RawGraph]]:
    return split_terms(g, n) + join_terms(g, n, model) + d_a_terms(g, n, model)


# ---------------------------------------------------------------------------
# the complex for a fixed model and n


class GraphComplex:
    """HGC_{A,n}: canonical graphs are identified by their text key."""

    def __init__(self, model: AlgebraModel, n: int):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.model = model
        self.n = int(n)
        self._raw: Dict[str, RawGraph] = {}
        self._graph: Dict[str, HairyGraph] = {}
        self._degree: Dict[str, int] = {}
        self._d: Dict[str, Terms] = {}
        self._ell: Dict[Tuple[str, ...], Terms] = {}

    def __repr__(self):
        return f"GraphComplex({self.model.name}, n={self.n})"

    @property
    def codimension(self) -> int:
        """Delta = n - dim(A) - 3."""
        return self.n - self.model.dimension - 3

    # graphs -----------------------------------------------------------------
    def graph(self, key: str) -> HairyGraph:
        g = self._graph.get(key)
        if g is None:
            g = HairyGraph.from_text(key)
            self._graph[key] = g
        return g

    def raw(self, key: str) -> RawGraph:
        r = self._raw.get(key)
        if r is None:
            r = raw_from_graph(self.graph(key), self.model)
            self._raw[key] = r
        return r

    def degree(self, key: str) -> int:
        d = self._degree.get(key)
        if d is None:
            g = self.graph(key)
            d = (self.n - 1) * g.edge_count - self.n * g.vertices - sum(
                self.model.degrees[self.model.index[a]] for a in g.decorations)
            self._degree[key] = d
        return d

    def edges(self, key: str) -> int:
        return self.graph(key).edge_count

    def parity(self, key: str) -> int:
        return self.degree(key) & 1

    def canonical(self, g: HairyGraph) -> Tuple[str, int]:
        ok, reason = is_valid(g, self.model)
        if not ok:
            raise GraphError(reason)
        c = canonicalize_raw(raw_from_graph(g, self.model), self.n, self.model, want_key=True)
        self._graph.setdefault(c.key, c.graph)
        return c.key, c.sign

    def _collect(self, terms: Iterable[Tuple[Fraction, RawGraph]]) -> Terms:
        out: Terms = {}
        for coeff, raw in terms:
            c = canonicalize_raw(raw, self.n, self.model)
            if c.sign:
                if c.key not in self._graph:
                    self._graph[c.key] = c.graph
                _acc(out, c.key, coeff * c.sign)
        return out

    # operations on basis graphs ------------------------------------------------
    def d_key(self, key: str) -> Terms:
        """The differential of a canonical basis graph."""
        out = self._d.get(key)
        if out is None:
            out = self._collect(graph_differential_terms(self.raw(key), self.n, self.model))
            self._d[key] = out
        return out

    def ell_keys(self, keys: Sequence[str]) -> Terms:
        """ell_k on basis graphs, read off the ordered product G_1 ... G_k."""
        keys = tuple(keys)
        if len(keys) == 1:
            return self.d_key(keys[0])
        out = self._ell.get(keys)
        if out is None:
            prod = disjoint_union([self.raw(k) for k in keys])
            out = self._collect(join_terms(prod, self.n, self.model, components=len(keys)))
            self._ell[keys] = out
        return out

    # vectors ----------------------------------------------------------------------
    def vector(self, terms: Mapping, ring: CoefficientRing = RATIONALS) -> "GraphVector":
        """Build a vector from ``{HairyGraph or key: coefficient}``, canonicalizing graphs."""
        out: Dict[str, RingElement] = {}
        for g, c in terms.items():
            if isinstance(g, str):
                key, sign = self.canonical(HairyGraph.from_text(g))
            else:
                key, sign = self.canonical(g)
            if not sign:
                continue
            coeff = c if isinstance(c, RingElement) else ring.scalar(c)
            _acc(out, key, coeff * sign)
        return GraphVector(self, out, ring)

    def basis_vector(self, key: str, ring: CoefficientRing = RATIONALS) -> "GraphVector":
        return GraphVector(self, {key: ring.one()}, ring)


class GraphVector:
    """Finite combination of canonical graphs with coefficients in a ring."""

    __slots__ = ("complex", "terms", "ring")

    def __init__(self, cx: GraphComplex, terms: Mapping[str, RingElement], ring: CoefficientRing = RATIONALS):
        self.complex = cx
        self.ring = ring
        self.terms: Dict[str, RingElement] = {k: v for k, v in terms.items() if v}

    @classmethod
    def from_rational(cls, cx: GraphComplex, terms: Mapping[str, Fraction],
                      ring: CoefficientRing = RATIONALS) -> "GraphVector":
        return cls(cx, {k: ring.scalar(v) for k, v in terms.items() if v}, ring)

    def zero_like(self) -> "GraphVector":
        return GraphVector(self.complex, {}, self.ring)

    def _check(self, other: "GraphVector"):
        if other.complex is not self.complex or other.ring != self.ring:
            raise ValueError("vectors live in different complexes or rings")

    def __add__(self, other: "GraphVector") -> "GraphVector":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return GraphVector(self.complex, out, self.ring)

    def __neg__(self):
        return GraphVector(self.complex, {k: -v for k, v in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, r) -> "GraphVector":
        """Left multiplication ``r * v`` (Koszul-free since r stands on the left)."""
        if not isinstance(r, RingElement):
            r = self.ring.scalar(r)
        return GraphVector(self.complex, {k: r * v for k, v in self.terms.items()}, self.ring)

    __rmul__ = scale

    def __eq__(self, other):
        return (isinstance(other, GraphVector) and other.complex is self.complex
                and self.ring == other.ring and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, g) -> RingElement:
        if isinstance(g, str):
            return self.terms.get(g, self.ring.zero())
        key, sign = self.complex.canonical(g)
        if not sign:
            return self.ring.zero()
        return self.terms.get(key, self.ring.zero()) * sign

    def rational_terms(self) -> Dict[str, Fraction]:
        out = {}
        for k, v in self.terms.items():
            if set(v.terms) - {self.ring.one_monomial}:
                raise ValueError("vector has non-constant coefficients")
            out[k] = v.constant()
        return out

    def degrees(self) -> set:
        """Total degrees (graph degree minus coefficient degree) that occur."""
        out = set()
        for k, v in self.terms.items():
            gd = self.complex.degree(k)
            for mono in v.terms:
                out.add(gd - self.ring.monomial_degree(mono))
        return out

    def min_edges(self) -> Optional[int]:
        if not self.terms:
            return None
        return min(self.complex.edges(k) for k in self.terms)

    def substitute(self, values: Mapping[str, object], ring: Optional[CoefficientRing] = None) -> "GraphVector":
        """Substitute ring generators; the result keeps the ring unless ``ring`` is given."""
        out = {}
        for k, v in self.terms.items():
            w = v.substitute(values)
            if ring is not None:
                w = _change_ring(w, ring)
            if w:
                out[k] = w
        return GraphVector(self.complex, out, ring or self.ring)

    def sorted_items(self):
        return sorted(self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({v})*{k}" for k, v in self.sorted_items())

    __repr__ = __str__

    def to_json(self) -> List[dict]:
        return [{"graph": k, "coeff": str(v)} for k, v in self.sorted_items()]


def _change_ring(r: RingElement, ring: CoefficientRing) -> RingElement:
    out = {}
    for mono, c in r.terms.items():
        names = r.ring.monomial_names(mono)
        out[ring.monomial({nm: names.count(nm) for nm in set(names)})] = c
    return ring.element(out)


def promote(v: GraphVector, ring: CoefficientRing) -> GraphVector:
    if v.ring == ring:
        return v
    return GraphVector(v.complex, {k: _change_ring(c, ring) for k, c in v.terms.items()}, ring)


def extend_ring(ring: CoefficientRing, extra: Sequence[Tuple[str, int]], nilpotent: bool = True) -> CoefficientRing:
    """Adjoin generators (square-zero when ``nilpotent``) to a ring."""
    gens = list(zip(ring.names, ring.degrees)) + list(extra)
    nil = {ring.names[i]: c for i, c in enumerate(ring.caps) if c is not None and ring.degrees[i] % 2 == 0}
    if nilpotent:
        nil.update({name: 1 for name, deg in extra if deg % 2 == 0})
    diff = {}
    for i, img in ring._diff.items():
        diff[ring.names[i]] = [(c, dict(zip(*_names_exps(ring, mono)))) for mono, c in img.items()]
    return CoefficientRing(gens, truncation=ring.truncation, nilpotency=nil, differential=diff)


def _names_exps(ring: CoefficientRing, mono):
    names = [ring.names[i] for i, e in enumerate(mono) if e]
    exps = [e for e in mono if e]
    return names, exps


# ---------------------------------------------------------------------------
# differential, curvature and ell


def differential(v: GraphVector) -> GraphVector:
    """D(r G) = d_R(r) G + (-1)^{|r|} r delta(G)."""
    cx, ring = v.complex, v.ring
    out: Dict[str, RingElement] = {}
    for key, coeff in v.terms.items():
        dr = coeff.d()
        if dr:
            _acc(out, key, dr)
        even = RingElement(ring, {m: c for m, c in coeff.terms.items() if not ring.monomial_parity(m)})
        odd = RingElement(ring, {m: c for m, c in coeff.terms.items() if ring.monomial_parity(m)})
        signed = even - odd
        if not signed:
            continue
        for k2, c2 in cx.d_key(key).items():
            _acc(out, k2, signed * c2)
    return GraphVector(cx, out, ring)


def _split_parity(v: GraphVector):
    """Terms (key, homogeneous-parity coefficient)."""
    ring = v.ring
    items = []
    for key, coeff in sorted(v.terms.items()):
        parts: Dict[int, Dict] = {}
        for m, c in coeff.terms.items():
            parts.setdefault(ring.monomial_parity(m), {})[m] = c
        for p in sorted(parts):
            items.append((key, p, RingElement(ring, parts[p])))
    return items


def curvature(x: GraphVector, k_max: int = 4, max_edges: Optional[int] = None,
              include_ring_differential: bool = True) -> GraphVector:
    """sum_{k=1}^{k_max} (1/k!) ell_k(x, ..., x), plus d_R(x) for rings with a differential.

    ``x`` must have total degree 0: each graph of degree d carries a
    coefficient of ring degree d.  Terms with more than ``max_edges`` edges are
    dropped.
    """
    cx, ring = x.complex, x.ring
    items = _split_parity(x)
    for key, p, coeff in items:
        gd = cx.degree(key)
        for mono in coeff.terms:
            if ring.monomial_degree(mono) != gd:
                raise ValueError("curvature needs an element of total degree 0")
    out: Dict[str, RingElement] = {}
    if include_ring_differential:
        for key, p, coeff in items:
            dr = coeff.d()
            if dr and (max_edges is None or cx.edges(key) <= max_edges):
                _acc(out, key, dr)
    T = len(items)
    for k in range(1, k_max + 1):
        for combo in combinations_with_replacement(range(T), k):
            # coefficient product with Koszul signs of pulling coefficients left
            coeff = ring.one()
            graph_par = 0
            sign_exp = 0
            for idx in combo:
                key, p, c = items[idx]
                sign_exp += graph_par * p
                coeff = coeff * c
                if not coeff:
                    break
                graph_par ^= cx.parity(key)
            if not coeff:
                continue
            mult = 1
            for idx in set(combo):
                mult *= factorial(combo.count(idx))
            total_par = 0
            for idx in combo:
                total_par ^= items[idx][1]
            sign_exp += total_par
            keys = tuple(items[idx][0] for idx in combo)
            if max_edges is not None and sum(cx.edges(kk) for kk in keys) > max_edges:
                continue
            ell = cx.ell_keys(keys)
            if not ell:
                continue
            scale = Fraction(-1 if sign_exp & 1 else 1, mult)
            scaled = coeff * scale
            for k2, c2 in ell.items():
                if max_edges is not None and cx.edges(k2) > max_edges:
                    continue
                _acc(out, k2, scaled * c2)
    return GraphVector(cx, out, ring)


def _polarization_ring(base: CoefficientRing, degrees: Sequence[int]) -> Tuple[CoefficientRing, List[str]]:
    names = [f"~p{j:03d}" for j in range(len(degrees))]
    return extend_ring(base, list(zip(names, degrees))), names


def _homogeneous_degree(v: GraphVector) -> int:
    degs = {v.complex.degree(k) for k in v.terms}
    if len(degs) != 1:
        raise ValueError("polarization needs homogeneous arguments")
    return degs.pop()


def _polarize(base: Optional[GraphVector], args: Sequence[GraphVector], k_max: int) -> GraphVector:
    """Coefficient of eps_1...eps_k in curvature(base + sum eps_j y_j), sign removed."""
    cx = args[0].complex
    if any(not y for y in args):
        return GraphVector(cx, {}, RATIONALS)
    degrees = [_homogeneous_degree(y) for y in args]
    ring, names = _polarization_ring(RATIONALS, degrees)
    x = GraphVector(cx, {}, ring)
    if base is not None:
        x = x + promote(base, ring)
    for name, y in zip(names, args):
        x = x + promote(y, ring).scale(ring.gen(name))
    U = curvature(x, k_max=k_max, include_ring_differential=False)
    target = ring.monomial({nm: 1 for nm in names})
    # (e_1 y_1)...(e_k y_k) = (-1)^{sum_{a<b} |y_a||e_b|} e_1...e_k y_1...y_k and D(e G) = (-1)^{|e|} e D(G)
    sign_exp = sum(degrees)
    for a in range(len(degrees)):
        for b in range(a + 1, len(degrees)):
            sign_exp += degrees[a] * degrees[b]
    sign = -1 if sign_exp & 1 else 1
    out = {}
    for key, c in U.terms.items():
        val = c.terms.get(target)
        if val:
            out[key] = sign * val
    return GraphVector.from_rational(cx, out)


def ell(args: Sequence[GraphVector], k_max: Optional[int] = None) -> GraphVector:
    """ell_k(y_1, ..., y_k) by polarization of the curvature (k = 1 is the differential)."""
    if not args:
        raise ValueError("ell needs at least one argument")
    return _polarize(None, args, k_max=len(args))


def ell_direct(args: Sequence[GraphVector]) -> GraphVector:
    """ell_k through the gluing formula, used to cross-check the polarization."""
    cx = args[0].complex
    items = [sorted(y.rational_terms().items()) for y in args]
    out: Terms = {}
    for combo in iproduct(*items):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        for k2, c2 in cx.ell_keys(tuple(k for k, _ in combo)).items():
            _acc(out, k2, coeff * c2)
    return GraphVector.from_rational(cx, out)


def bracket(a: GraphVector, b: GraphVector) -> GraphVector:
    return ell([a, b])


def twisted_ell(m: GraphVector, args: Sequence[GraphVector], k_max: int = 4) -> GraphVector:
    """ell^m_k(y_1..y_k) = sum_i (1/i!) ell_{i+k}(m, ..., m, y_1, ..., y_k), truncated at k_max."""
    m.rational_terms()
    return _polarize(m, args, k_max=k_max)


def filtration_degree(v: GraphVector) -> Optional[int]:
    return v.min_edges()


# ---------------------------------------------------------------------------
# windows


def complete_edge_bound(model: AlgebraModel, n: int, d: int) -> int:
    """Edge count above which no graph of degree <= d exists.

    Uses deg >= (n-3)(g-1) + H(1+Delta) with V <= 2g-2+H, so E <= 3g-3+2H.
    """
    delta = n - model.dimension - 3
    if delta < 0:
        raise ValueError(f"codimension Delta = {delta} < 0: no finite edge bound is available")
    if n < 4:
        raise ValueError("n >= 4 is needed for an edge bound")
    best = 0
    g = 0
    while (n - 3) * (g - 1) + (1 + delta) <= d:
        H = 1
        while (n - 3) * (g - 1) + H * (1 + delta) <= d:
            if g > 0 or H >= 2:
                best = max(best, 3 * g - 3 + 2 * H)
            H += 1
        g += 1
    return best


def _degree_in(n, V, E, lo_sum, hi_sum, dmin, dmax) -> bool:
    top = (n - 1) * E - n * V - lo_sum
    bottom = (n - 1) * E - n * V - hi_sum
    return not (top < dmin or bottom > dmax)


def _shapes(V: int, E_int: int, H: int) -> List[Tuple[Tuple[Tuple[int, int], ...], Tuple[int, ...]]]:
    """Connected multigraphs on V vertices with E_int edges and hair counts, one per iso class."""
    pairs = [(i, j) for i in range(V) for j in range(i, V)]
    dummy = AlgebraModel("shape", [("h", 0)])
    seen = {}
    for edges in combinations_with_replacement(pairs, E_int):
        val = [0] * V
        for i, j in edges:
            val[i] += 1
            val[j] += 1
        # connectivity
        parent = list(range(V))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in edges:
            parent[find(i)] = find(j)
        if len({find(x) for x in range(V)}) != 1:
            continue
        for hairs in _compositions(H, V):
            if any(val[v] + hairs[v] < 3 for v in range(V)):
                continue
            hair_list = [(v, "h") for v in range(V) for _ in range(hairs[v])]
            raw = raw_from_graph(HairyGraph.make(V, edges, hair_list), dummy)
            key = canonicalize_raw(raw, 2, dummy, want_key=True).key
            if key not in seen:
                seen[key] = (tuple(edges), tuple(hairs))
    return [seen[k] for k in sorted(seen)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _decorate_shape(args) -> List[Tuple[int, str]]:
    model, n, shape, dmin, dmax = args
    edges, hairs = shape
    V = len(hairs)
    E = len(edges) + sum(hairs)
    base = (n - 1) * E - n * V
    degs = model.degrees
    nb = len(model.ids)
    per_vertex = [list(combinations_with_replacement(range(nb), h)) for h in hairs]
    found = {}
    for choice in iproduct(*per_vertex):
        total = sum(degs[a] for grp in choice for a in grp)
        d = base - total
        if d < dmin or d > dmax:
            continue
        hair_list = [(v, model.ids[a]) for v, grp in enumerate(choice) for a in grp]
        raw = raw_from_graph(HairyGraph.make(V, edges, hair_list), model)
        c = canonicalize_raw(raw, n, model)
        if c.sign:
            found[c.key] = d
    return sorted((d, k) for k, d in found.items())


def enumerate_graphs(model: AlgebraModel, n: int, dmin: int, dmax: int, max_edges: int,
                     threads: int = 1) -> Dict[int, List[str]]:
    """All nonzero canonical graphs with degree in [dmin, dmax] and at most max_edges edges."""
    out: Dict[int, set] = {d: set() for d in range(dmin, dmax + 1)}
    if max_edges >= 1:
        nb = len(model.ids)
        for a in range(nb):
            for b in range(a, nb):
                d = (n - 1) - model.degrees[a] - model.degrees[b]
                if dmin <= d <= dmax:
                    raw = raw_from_graph(HairyGraph.make_segment(model.ids[a], model.ids[b]), model)
                    c = canonicalize_raw(raw, n, model)
                    if c.sign:
                        out[d].add(c.key)
    lo, hi = min(model.degrees), max(model.degrees)
    jobs = []
    for V in range(1, max_edges + 1):
        for E_int in range(V - 1, max_edges):
            for H in range(1, max_edges - E_int + 1):
                if 3 * V > 2 * E_int + H:
                    continue
                E = E_int + H
                if not _degree_in(n, V, E, H * lo, H * hi, dmin, dmax):
                    continue
                for shape in _shapes(V, E_int, H):
                    jobs.append((model, n, shape, dmin, dmax))
    if threads > 1 and len(jobs) > 8:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_decorate_shape, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_decorate_shape(j) for j in jobs]
    for res in results:
        for d, k in res:
            out[d].add(k)
    return {d: sorted(keys) for d, keys in out.items()}


class ComplexWindow:
    """Basis of HGC_{A,n} in a degree interval, with an edge bound."""

    def __init__(self, cx: GraphComplex, dmin: int, dmax: int, max_edges: int,
                 basis: Dict[int, List[str]], certified: Dict[int, bool]):
        self.complex = cx
        self.dmin, self.dmax = dmin, dmax
        self.max_edges = max_edges
        self.basis = basis
        self.certified = certified
        self.index = {d: {k: i for i, k in enumerate(keys)} for d, keys in basis.items()}

    @property
    def model(self):
        return self.complex.model

    @property
    def n(self):
        return self.complex.n

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def all_keys(self) -> List[str]:
        return [k for d in sorted(self.basis) for k in self.basis[d]]

    def graphs(self, d: int) -> List[HairyGraph]:
        return [self.complex.graph(k) for k in self.basis.get(d, ())]

    def column(self, terms: Mapping[str, Fraction], d: int, strict: bool = True) -> Dict[int, Fraction]:
        """Coordinates of an element of degree d in the window basis."""
        idx = self.index.get(d, {})
        col = {}
        for k, v in terms.items():
            if k in idx:
                col[idx[k]] = v
            elif strict and v:
                raise ValueError(f"graph {k} of degree {d} is outside the window basis")
        return col

    def differential_matrix(self, d: int) -> SparseMatrix:
        """Matrix of delta: C_d -> C_{d-1}."""
        return self.operator_matrix(d, self.complex.d_key)

    def operator_matrix(self, d: int, op) -> SparseMatrix:
        src = self.basis.get(d, [])
        tgt_deg = d - 1
        strict = self.certified.get(tgt_deg, False)
        cols = [self.column(op(k), tgt_deg, strict=strict) for k in src]
        return SparseMatrix.from_columns(self.dim(tgt_deg), cols)


def enumerate_basis(model: AlgebraModel, n: int, window: Tuple[int, int],
                    max_edges: Optional[int] = None, threads: int = 1,
                    complex_: Optional[GraphComplex] = None) -> ComplexWindow:
    """Enumerate the window; certificates say whether the edge bound is sufficient."""
    dmin, dmax = window
    if dmin > dmax:
        raise ValueError("empty degree interval")
    cx = complex_ or GraphComplex(model, n)
    bounds: Dict[int, Optional[int]] = {}
    for d in range(dmin, dmax + 1):
        try:
            bounds[d] = complete_edge_bound(model, n, d)
        except ValueError:
            bounds[d] = None
    if max_edges is None:
        if bounds[dmax] is None:
            raise ValueError("no edge bound is available (Delta < 0 or n < 4); pass max_edges")
        max_edges = max(b for b in bounds.values() if b is not None)
    basis = enumerate_graphs(model, n, dmin, dmax, max_edges, threads=threads)
    certified = {d: bounds[d] is not None and max_edges >= bounds[d] for d in range(dmin, dmax + 1)}
    return ComplexWindow(cx, dmin, dmax, max_edges, basis, certified)


# ---------------------------------------------------------------------------
# homology


def _representatives(d_out: SparseMatrix, d_in: SparseMatrix) -> List[List[Fraction]]:
    """Kernel vectors of d_out completing the image of d_in to a basis of the kernel."""
    ker = kernel_basis(d_out)
    image_rows = [dict(c) for c in d_in.column_dicts() if c]
    current = echelon_rows(image_rows)
    reps = []
    for v in ker:
        row = {i: x for i, x in enumerate(v) if x}
        trial = echelon_rows(list(current) + [row])
        if len(trial) > len(current):
            reps.append(v)
            current = trial
    return reps


def homology(window: ComplexWindow, twist: Optional["Twist"] = None, degrees: Optional[Iterable[int]] = None,
             allow_uncertified: bool = False) -> Dict[int, dict]:
    """Ranks and representatives in each degree d whose neighbours are in the window.

    A degree is certified when d-1, d and d+1 are; uncertified degrees are
    refused unless ``allow_uncertified`` (then they are flagged).
    """
    cx = window.complex
    op = cx.d_key if twist is None else twist.apply_key
    if degrees is None:
        degrees = range(window.dmin + 1, window.dmax)
    report = {}
    for d in degrees:
        if d - 1 < window.dmin or d + 1 > window.dmax:
            raise ValueError(f"degree {d} needs degrees {d - 1}..{d + 1} in the window")
        cert = all(window.certified.get(x, False) for x in (d - 1, d, d + 1))
        if not cert and not allow_uncertified:
            raise ValueError(f"window is not certified around degree {d}")
        d_out = window.operator_matrix(d, op)
        d_in = window.operator_matrix(d + 1, op)
        if not (d_out @ d_in).is_zero():
            raise ArithmeticError(f"differential does not square to zero at degree {d}")
        r_out, r_in = rank(d_out), rank(d_in)
        h = window.dim(d) - r_out - r_in
        reps = []
        for v in _representatives(d_out, d_in):
            terms = {window.basis[d][i]: x for i, x in enumerate(v) if x}
            reps.append(GraphVector.from_rational(cx, terms))
        report[d] = {"dim": window.dim(d), "certified": cert, "homologyRank": h, "representatives": reps}
    return report


def square_zero_check(window: ComplexWindow, twist: Optional["Twist"] = None) -> Dict[int, bool]:
    """delta o delta = 0 as a matrix identity for every degree pair inside the window."""
    cx = window.complex
    op = cx.d_key if twist is None else twist.apply_key
    out = {}
    for d in range(window.dmin + 2, window.dmax + 1):
        a = window.operator_matrix(d, op)
        b = window.operator_matrix(d - 1, op)
        out[d] = (b @ a).is_zero()
    return out


# ---------------------------------------------------------------------------
# twisting


class Twist:
    """Operations of HGC twisted by a Maurer-Cartan element m (over Q)."""

    def __init__(self, m: GraphVector, k_max: int = 4):
        self.m = m
        self.k_max = k_max
        self.complex = m.complex
        self._cache: Dict[str, Terms] = {}

    def apply_key(self, key: str) -> Terms:
        out = self._cache.get(key)
        if out is None:
            y = self.complex.basis_vector(key)
            out = twisted_ell(self.m, [y], k_max=self.k_max).rational_terms()
            self._cache[key] = out
        return out

    def apply(self, v: GraphVector) -> GraphVector:
        out: Terms = {}
        for k, c in v.rational_terms().items():
            for k2, c2 in self.apply_key(k).items():
                _acc(out, k2, c * c2)
        return GraphVector.from_rational(self.complex, out)

    def bracket(self, args: Sequence[GraphVector]) -> GraphVector:
        return twisted_ell(self.m, args, k_max=self.k_max)


def twist(m: GraphVector, window: Optional[ComplexWindow] = None, k_max: int = 4, check: bool = True):
    """Twisted differential; with a window also its matrices and the square-zero check."""
    from .mcgauge import verify_mc_exact  # local import: mcgauge depends on this module
    if check and not verify_mc_exact(m, k_max=k_max):
        raise ValueError("twisting element is not Maurer-Cartan")
    tw = Twist(m, k_max=k_max)
    if window is None:
        return tw
    matrices = {}
    for d in range(window.dmin + 1, window.dmax + 1):
        matrices[d] = window.operator_matrix(d, tw.apply_key)
    squares = {}
    for d in range(window.dmin + 2, window.dmax + 1):
        squares[d] = (matrices[d - 1] @ matrices[d]).is_zero()
    return tw, matrices, squares


def twisted_square_zero(tw: Twist, keys: Iterable[str]) -> bool:
    """(d^m)^2 = 0 evaluated exactly on the given graphs (no window truncation)."""
    for k in keys:
        once = tw.apply(tw.complex.basis_vector(k))
        if tw.apply(once):
            return False
    return True


# ---------------------------------------------------------------------------
# homotopy morphisms


class HomotopyMorphism:
    """Tables psi_| (linear part) and psi_T (trees) of a homotopy morphism source -> target.

    ``linear`` maps source basis ids to target elements; ``trees`` lists
    ``(tree text, source input ids, target element)``.  psi_T has degree
    ``-(number of internal vertices of T)``.
    """

    def __init__(self, source: AlgebraModel, target: AlgebraModel,
                 linear: Mapping[str, Mapping[str, object]],
                 trees: Iterable[Tuple[str, Sequence[str], Mapping[str, object]]] = ()):
        from .coeffring import parse_rational
        from .trees import decorated_canonical, parse_tree
        self.source, self.target = source, target
        self.linear: Dict[int, Dict[int, Fraction]] = {}
        for a, image in linear.items():
            if a not in source.index:
                raise ValueError(f"unknown source id {a!r}")
            out = {}
            for b, c in image.items():
                if b not in target.index:
                    raise ValueError(f"unknown target id {b!r}")
                if target.degrees[target.index[b]] != source.degrees[source.index[a]]:
                    raise ValueError(f"psi_| does not preserve the degree of {a}")
                q = parse_rational(c)
                if q:
                    out[target.index[b]] = q
            self.linear[source.index[a]] = out
        missing = set(range(len(source.ids))) - set(self.linear)
        if missing:
            raise ValueError("psi_| must be given on every source basis element")
        self.trees: Dict[str, Dict[int, Fraction]] = {}
        self.tree_leaf_counts = set()
        for text, inputs, image in trees:
            tree = parse_tree(text) if isinstance(text, str) else text
            inputs = tuple(inputs)
            if len(inputs) != len(leaves(tree)):
                raise ValueError(f"arity mismatch for psi on {text}")
            want = sum(source.degrees[source.index[x]] for x in inputs) - internal_count(tree)
            out = {}
            for b, c in image.items():
                if target.degrees[target.index[b]] != want:
                    raise ValueError(f"psi on {text} must land in degree {want}")
                q = parse_rational(c)
                if q:
                    out[target.index[b]] = q
            key, sign, _ = decorated_canonical(tree, inputs, [source.parities[source.index[x]] for x in inputs])
            if sign and out:
                self.trees[key] = {k: sign * v for k, v in out.items()}
                self.tree_leaf_counts.add(len(inputs))

    @classmethod
    def identity(cls, model: AlgebraModel) -> "HomotopyMorphism":
        return cls(model, model, {a: {a: 1} for a in model.ids})

    def psi_tree(self, tree, inputs: Sequence[int]) -> Dict[int, Fraction]:
        from .trees import decorated_canonical
        src = self.source
        key, sign, _ = decorated_canonical(tree, [src.ids[i] for i in inputs], [src.parities[i] for i in inputs])
        if not sign:
            return {}
        val = self.trees.get(key)
        if not val:
            return {}
        return {k: sign * v for k, v in val.items()}


def _set_partitions(items: Sequence[int]):
    if not items:
        yield []
        return
    first, rest = items[0], list(items[1:])
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _psi_terms(psi: HomotopyMorphism, g: RawGraph, n: int, components: int) -> List[Tuple[Fraction, RawGraph]]:
    src, tgt = psi.source, psi.target
    ext = [ident for kind, ident in g.word if kind == DECO]
    max_leaves = max(psi.tree_leaf_counts) if psi.tree_leaf_counts else 1
    out = []
    for part in _set_partitions(ext):
        blocks = [b for b in part if len(b) > 1]
        if any(len(b) > max_leaves for b in blocks):
            continue
        if components > 1:
            parent = list(range(components))

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            for b in blocks:
                for y in b[1:]:
                    parent[find(g.comp[y])] = find(g.comp[b[0]])
            if len({find(c) for c in range(components)}) != 1:
                continue
        choices = []
        for b in blocks:
            inputs = [g.deco[x] for x in b]
            opts = []
            for tree in labelled_trees(len(b)):
                val = psi.psi_tree(tree, inputs)
                if val:
                    opts.append((tree, val))
            choices.append(opts)
        if any(not c for c in choices):
            continue
        trivial = [x for x in ext if not any(x in b for b in blocks)]
        for combo in iproduct(*choices):
            cur = g.copy()
            parity = {x: src.parities[g.deco[x]] for x in ext}
            sign = 1
            pending = {}
            for b, (tree, val) in zip(blocks, combo):
                running, odd_in, exp = 0, 0, 0
                before = {}
                for kind, ident in cur.word:
                    before[(kind, ident)] = running
                    running += parity[ident] if kind == DECO else (n & 1 if kind == VERTEX else (n - 1) & 1)
                for x in b:
                    if parity[x]:
                        exp += before[(DECO, x)] - odd_in
                        odd_in += 1
                if exp & 1:
                    sign = -sign
                bset = set(b)
                rest = [c for c in cur.word if not (c[0] == DECO and c[1] in bset)]
                cur = _tree_insertion(cur, b, tree, -1, rest)
                u = [i for k, i in cur.word if k == DECO][0]
                parity[u] = (sum(src.degrees[g.deco[x]] for x in b) - internal_count(tree)) & 1
                pending[u] = val
            for x in trivial:
                pending[x] = psi.linear[g.deco[x]]
            keys = sorted(pending)
            for pick in iproduct(*(sorted(pending[x].items()) for x in keys)):
                new = cur.copy()
                coeff = Fraction(sign)
                for x, (k, c) in zip(keys, pick):
                    new.deco[x] = k
                    coeff *= c
                out.append((coeff, new))
    return out


def apply_homotopy_morphism(psi: HomotopyMorphism, v: GraphVector, r: int = 1,
                            target: Optional[GraphComplex] = None) -> GraphVector:
    """Psi_r(v, ..., v): forests glued on the hairs of r copies of v, connected result.

    The value is the unnormalized r-fold application (no 1/r! factor).
    """
    if r < 1:
        raise ValueError("arity must be at least 1")
    if v.complex.model is not psi.source and not v.complex.model.same_structure(psi.source):
        raise ValueError("vector does not live over the source model")
    cx = v.complex
    tx = target or GraphComplex(psi.target, cx.n)
    items = sorted(v.rational_terms().items())
    out: Terms = {}
    for combo in iproduct(items, repeat=r):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        raws = [cx.raw(k) for k, _ in combo]
        g = raws[0] if r == 1 else disjoint_union(raws)
        for c2, raw in _psi_terms(psi, g, cx.n, r):
            can = canonicalize_raw(raw, tx.n, tx.model)
            if can.sign:
                tx._graph.setdefault(can.key, can.graph)
                _acc(out, can.key, coeff * c2 * can.sign)
    return GraphVector.from_rational(tx, out)


# ---------------------------------------------------------------------------
# L-infinity tables and Chevalley-Eilenberg complexes


class LinfTable:
    """Finite L-infinity data: labels with degrees and brackets on sorted index tuples.

    ``brackets[(i_1 <= ... <= i_k)] = {j: c}``; ``k_max`` is the largest arity
    present (None when all higher brackets are known to vanish).
    """

    def __init__(self, labels: Sequence[str], degrees: Sequence[int],
                 brackets: Mapping[Tuple[int, ...], Mapping[int, object]], k_max: Optional[int] = None,
                 meta: Optional[dict] = None):
        from .coeffring import parse_rational
        self.labels = list(labels)
        self.degrees = list(int(d) for d in degrees)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")
        self.brackets: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
        for key, out in brackets.items():
            key = tuple(key)
            order = sorted(range(len(key)), key=lambda i: key[i])
            sign = _koszul_perm_sign([key[i] for i in order], key, self.degrees)
            skey = tuple(sorted(key))
            want = sum(self.degrees[i] for i in key) - 1
            vals = {}
            for j, c in out.items():
                q = parse_rational(c)
                if q:
                    if self.degrees[j] != want:
                        raise ValueError(f"bracket on {[self.labels[i] for i in key]} has wrong degree")
                    vals[j] = sign * q
            if vals:
                if _repeated_odd(skey, self.degrees):
                    raise ValueError("bracket of a repeated odd element must vanish")
                self.brackets[skey] = vals
        self.k_max = k_max
        self.meta = dict(meta or {})

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def ell(self, inputs: Sequence[int]) -> Dict[int, Fraction]:
        """ell_k on inputs in the given order (graded symmetric)."""
        skey = tuple(sorted(inputs))
        val = self.brackets.get(skey)
        if not val:
            return {}
        sign = _koszul_perm_sign(list(inputs), skey, self.degrees)
        return {j: sign * c for j, c in val.items()}

    def to_json(self) -> dict:
        return {
            "labels": [{"id": l, "degree": d} for l, d in zip(self.labels, self.degrees)],
            "brackets": [{"inputs": [self.labels[i] for i in key],
                          "output": [{"id": self.labels[j], "coeff": format_rational(c)}
                                     for j, c in sorted(val.items())]}
                         for key, val in sorted(self.brackets.items())],
            "kMax": self.k_max,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LinfTable":
        labels = [x["id"] for x in data["labels"]]
        degrees = [int(x["degree"]) for x in data["labels"]]
        idx = {l: i for i, l in enumerate(labels)}
        brackets: Dict[Tuple[int, ...], Dict[int, object]] = {}
        for b in data.get("brackets", []):
            key = tuple(idx[x] for x in b["inputs"])
            if len(key) < 1:
                raise ValueError("brackets need at least one input")
            acc = brackets.setdefault(key, {})
            for o in b["output"]:
                acc[idx[o["id"]]] = o["coeff"]
        return cls(labels, degrees, brackets, data.get("kMax"), data.get("meta"))


def _koszul_perm_sign(target: Sequence[int], source: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of rearranging the sequence ``source`` into ``target`` (odd entries count)."""
    src = list(source)
    used = [False] * len(src)
    pos = []
    for x in target:
        for i, y in enumerate(src):
            if not used[i] and y == x:
                used[i] = True
                pos.append(i)
                break
    sign = 1
    for a in range(len(pos)):
        if degrees[src[pos[a]]] % 2 == 0:
            continue
        for b in range(a + 1, len(pos)):
            if degrees[src[pos[b]]] % 2 and pos[a] > pos[b]:
                sign = -sign
    return sign


def _repeated_odd(key: Sequence[int], degrees: Sequence[int]) -> bool:
    return any(key[i] == key[i + 1] and degrees[key[i]] % 2 for i in range(len(key) - 1))


def extract_linf(window: ComplexWindow, twist: Optional[Twist] = None, k_max: int = 4) -> LinfTable:
    """Brackets of (twisted) HGC on the window basis in degrees >= 0, computed by polarization.

    Degree-0 basis elements appear only as possible targets of ell_1.
    """
    cx = window.complex
    labels, degrees = [], []
    for d in range(max(0, window.dmin), window.dmax + 1):
        for k in window.basis.get(d, []):
            labels.append(k)
            degrees.append(d)
    index = {k: i for i, k in enumerate(labels)}
    gens = [i for i, d in enumerate(degrees) if d >= 1]
    brackets: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
    top = window.dmax
    vectors = {i: cx.basis_vector(labels[i]) for i in gens}
    for k in range(1, k_max + 1):
        for combo in combinations_with_replacement(gens, k):
            out_deg = sum(degrees[i] for i in combo) - 1
            if out_deg > top:
                continue
            if _repeated_odd(combo, degrees):
                continue
            args = [vectors[i] for i in combo]
            val = (twisted_ell(twist.m, args, k_max=twist.k_max) if twist is not None else ell(args))
            strict = window.certified.get(out_deg, False)
            col = {}
            for key, c in val.rational_terms().items():
                if key in index:
                    col[index[key]] = c
                elif strict:
                    raise ValueError(f"bracket output {key} is outside the certified window")
            if col:
                brackets[combo] = col
    meta = {"model": window.model.name, "n": window.n, "degrees": [window.dmin, window.dmax],
            "maxEdges": window.max_edges, "twisted": twist is not None}
    return LinfTable(labels, degrees, brackets, k_max=k_max, meta=meta)


def _positive_generators(table: LinfTable, positive_truncation: bool):
    """Generators as vectors over the table labels: degrees >= 2 and ker(ell_1) in degree 1."""
    if not positive_truncation:
        if any(d <= 0 for d in table.degrees):
            raise ValueError("CE of a table with generators in degree <= 0 is infinite; use positive truncation")
        return [{i: Fraction(1)} for i in range(len(table.labels))], list(table.degrees)
    ones = [i for i, d in enumerate(table.degrees) if d == 1]
    zeros = [i for i, d in enumerate(table.degrees) if d == 0]
    zpos = {j: r for r, j in enumerate(zeros)}
    cols = []
    for i in ones:
        col = {}
        for j, c in table.ell((i,)).items():
            col[zpos[j]] = c
        cols.append(col)
    ker = kernel_basis(SparseMatrix.from_columns(len(zeros), cols)) if ones else []
    gens = [{ones[r]: x for r, x in enumerate(v) if x} for v in ker]
    degs = [1] * len(gens)
    for i, d in enumerate(table.degrees):
        if d >= 2:
            gens.append({i: Fraction(1)})
            degs.append(d)
    return gens, degs


def ce_cohomology(table: LinfTable, positive_truncation: bool = False, degree_bound: int = 6) -> dict:
    """Ranks of the Chevalley-Eilenberg (co)homology of the table in degrees 0..degree_bound."""
    gens, degs = _positive_generators(table, positive_truncation)
    G = len(gens)
    window = table.meta.get("degrees")
    if window is not None:
        # chains of degree N use brackets with outputs up to N - 1, so a window
        # cut at degree top gives exact ranks only up to N = top
        degree_bound = min(degree_bound, int(window[1]))
    # coordinates of old labels in the new generators (for degree >= 1 outputs)
    from .coeffring import solve as _solve

    def express(vec: Dict[int, Fraction], deg: int) -> Dict[int, Fraction]:
        if not vec:
            return {}
        cand = [g for g in range(G) if degs[g] == deg]
        labels_of_deg = sorted({i for g in cand for i in gens[g]} | set(vec))
        pos = {i: r for r, i in enumerate(labels_of_deg)}
        M = SparseMatrix.from_columns(len(labels_of_deg), [{pos[i]: c for i, c in gens[g].items()} for g in cand])
        rhs = [vec.get(i, Fraction(0)) for i in labels_of_deg]
        sol = _solve(M, rhs)
        if sol is None:
            raise ArithmeticError("bracket output leaves the truncated algebra")
        return {cand[r]: x for r, x in enumerate(sol) if x}

    cache: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}

    def bracket(inputs: Tuple[int, ...]) -> Dict[int, Fraction]:
        # inputs sorted generator indices
        if inputs in cache:
            return cache[inputs]
        acc: Dict[int, Fraction] = {}
        for pick in iproduct(*(sorted(gens[g].items()) for g in inputs)):
            c = Fraction(1)
            for _, x in pick:
                c *= x
            for j, y in table.ell(tuple(i for i, _ in pick)).items():
                _acc(acc, j, c * y)
        out_deg = sum(degs[g] for g in inputs) - 1
        res = {}
        if acc:
            if out_deg <= 0:
                res = {}
            else:
                res = express(acc, out_deg)
        cache[inputs] = res
        return res

    # monomials by total degree
    def monomials(total: int, start: int = 0) -> List[Tuple[int, ...]]:
        if total == 0:
            return [()]
        out = []
        for g in range(start, G):
            d = degs[g]
            if d > total:
                continue
            nxt = g + 1 if d % 2 else g
            for rest in monomials(total - d, nxt):
                out.append((g,) + rest)
        return out

    basis = {N: monomials(N) for N in range(0, degree_bound + 2)}
    if table.k_max is not None:
        for N in range(0, degree_bound + 2):
            for mono in basis[N]:
                if len(mono) > table.k_max:
                    for size in range(table.k_max + 1, len(mono) + 1):
                        for sub in combinations(mono, size):
                            if sum(degs[g] for g in sub) - 1 <= max(table.degrees, default=0):
                                raise ValueError(
                                    f"CE degree {N} needs brackets of arity {size} > k_max = {table.k_max}")
    index = {N: {m: i for i, m in enumerate(basis[N])} for N in basis}

    def Q(mono: Tuple[int, ...]) -> Dict[Tuple[int, ...], Fraction]:
        out: Dict[Tuple[int, ...], Fraction] = {}
        m = len(mono)
        for size in range(1, m + 1):
            for S in combinations(range(m), size):
                Sset = set(S)
                rest = [mono[i] for i in range(m) if i not in Sset]
                # Koszul sign of (x_S, x_rest)
                order = list(S) + [i for i in range(m) if i not in Sset]
                sign = 1
                for a in range(m):
                    if degs[mono[order[a]]] % 2 == 0:
                        continue
                    for b in range(a + 1, m):
                        if degs[mono[order[b]]] % 2 and order[a] > order[b]:
                            sign = -sign
                val = bracket(tuple(mono[i] for i in S))
                for c, x in val.items():
                    if degs[c] % 2 and c in rest:
                        continue
                    # move c into sorted position among rest
                    passed = sum(degs[y] for y in rest if y < c)
                    s2 = -1 if (degs[c] % 2) and (passed % 2) else 1
                    new = tuple(sorted(rest + [c]))
                    _acc(out, new, sign * s2 * x)
        return out

    mats = {}
    for N in range(1, degree_bound + 2):
        cols = []
        for mono in basis[N]:
            col = {}
            for tgt, c in Q(mono).items():
                col[index[N - 1][tgt]] = c
            cols.append(col)
        mats[N] = SparseMatrix.from_columns(len(basis[N - 1]), cols)
    for N in range(2, degree_bound + 2):
        if not (mats[N - 1] @ mats[N]).is_zero():
            raise ArithmeticError(f"CE differential does not square to zero at degree {N}")
    ranks = {}
    for N in range(0, degree_bound + 1):
        r_out = rank(mats[N]) if N >= 1 else 0
        r_in = rank(mats[N + 1])
        ranks[N] = len(basis[N]) - r_out - r_in
    return {"ranks": ranks, "generators": G, "degreeBound": degree_bound,
            "truncationApproximate": bool(table.meta.get("maxEdges") is not None),
            "positiveTruncation": positive_truncation}
