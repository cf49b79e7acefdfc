"""Maurer-Cartan elements at tree level, gauge paths and the UTT quotient."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .coeffring import (RATIONALS, CoefficientRing, RingElement, SparseMatrix, interval_ring,
                        polynomial_ring, rank, rref_rows, solve)
from .dgca import AlgebraModel
from .hgcomplex import (GraphComplex, GraphVector, complete_edge_bound, curvature, enumerate_graphs,
                        promote, split_terms, _acc)
from .hairygraph import HairyGraph


def _delta(model: AlgebraModel, n: int) -> int:
    delta = n - model.dimension - 3
    if delta < 0:
        raise ValueError(f"codimension Delta = {delta} < 0: the tree-level description does not apply")
    return delta


def exact_k_max(model: AlgebraModel, n: int, out_degree: int = -1) -> int:
    """Arity beyond which ell_k cannot produce graphs of degree <= out_degree.

    Each input has at least one edge and ell_k adds at least one, so outputs
    of ell_k have more than k edges, while graphs of degree <= out_degree
    have at most complete_edge_bound(out_degree) edges.  Curvatures of
    degree-0 elements land in degree -1; for paths over Q[t, dt] the graph
    degrees go up to 0.
    """
    return max(1, complete_edge_bound(model, n, out_degree) - 1)


def degree_zero_tree_basis(model: AlgebraModel, n: int, cx: Optional[GraphComplex] = None,
                           threads: int = 1) -> List[str]:
    """All nonzero degree-0 graphs (they are trees when Delta >= 0), by edge count then text."""
    _delta(model, n)
    bound = complete_edge_bound(model, n, 0)
    keys = enumerate_graphs(model, n, 0, 0, bound, threads=threads)[0]
    cx = cx or GraphComplex(model, n)
    for k in keys:
        if not cx.graph(k).is_tree:
            raise AssertionError(f"non-tree graph {k} in degree 0")
    return sorted(keys, key=lambda k: (cx.edges(k), k))


class ObstructionSystem:
    """Coefficients of the curvature of sum_i lambda_i G_i, one polynomial per graph."""

    def __init__(self, complex_: GraphComplex, basis: Sequence[str], ring: CoefficientRing,
                 unknowns: Sequence[str], equations: Dict[str, RingElement]):
        self.complex = complex_
        self.basis = list(basis)
        self.ring = ring
        self.unknowns = list(unknowns)
        self.equations = dict(sorted(equations.items()))

    def __len__(self):
        return len(self.equations)

    def to_json(self) -> List[dict]:
        return [{"graph": k, "poly": str(p)} for k, p in self.equations.items()]


def unknown_names(count: int) -> List[str]:
    return [f"λ{i + 1}" for i in range(count)]


def mc_candidate(cx: GraphComplex, basis: Sequence[str]) -> Tuple[GraphVector, CoefficientRing, List[str]]:
    names = unknown_names(len(basis))
    ring = polynomial_ring(names, truncation=max(8, exact_k_max(cx.model, cx.n) + 1))
    terms = {k: ring.gen(nm) for k, nm in zip(basis, names)}
    return GraphVector(cx, terms, ring), ring, names


def mc_obstruction_system(c: GraphVector, k_max: Optional[int] = None) -> ObstructionSystem:
    """Curvature coefficients of a degree-0 candidate with polynomial coefficients."""
    cx = c.complex
    if k_max is None:
        k_max = exact_k_max(cx.model, cx.n)
    U = curvature(c, k_max=k_max)
    for k in U.terms:
        if not cx.graph(k).is_tree or cx.degree(k) != -1:
            raise AssertionError(f"curvature term {k} is not a degree -1 tree")
    names = list(c.ring.names)
    return ObstructionSystem(cx, sorted(c.terms), c.ring, names, U.terms)


def classify_system(system: ObstructionSystem) -> dict:
    """Solve systems whose polynomials are all monomials or all linear."""
    ring = system.ring
    polys = list(system.equations.values())
    if not polys:
        return {"kind": "free", "description": "every parameter value is Maurer-Cartan"}
    if all(len(p.terms) == 1 for p in polys):
        supports = []
        for p in polys:
            (mono, _), = p.terms.items()
            supports.append(frozenset(ring.names[i] for i, e in enumerate(mono) if e))
        if any(not s for s in supports):
            return {"kind": "empty", "description": "a nonzero constant obstruction: no solutions"}
        branches = _minimal_hitting_sets(supports)
        desc = " or ".join("(" + ", ".join(f"{v}=0" for v in b) + ")" if len(b) > 1 else f"{b[0]}=0"
                           for b in branches)
        return {"kind": "monomial", "branches": [list(b) for b in branches], "description": desc}
    linear = all(sum(mono) == 1 for p in polys for mono in p.terms)
    if linear:
        idx = {nm: i for i, nm in enumerate(ring.names)}
        rows = []
        for p in polys:
            row = {}
            for mono, c in p.terms.items():
                j = [i for i, e in enumerate(mono) if e][0]
                row[j] = c
            rows.append(row)
        from .coeffring import kernel_basis
        M = SparseMatrix(len(rows), len(ring.names), {(r, j): c for r, row in enumerate(rows) for j, c in row.items()})
        ker = kernel_basis(M)
        return {"kind": "linear", "kernel": [[str(x) for x in v] for v in ker],
                "description": f"solution space of dimension {len(ker)}"}
    return {"kind": "unsupported", "description": "system is neither monomial nor linear"}


def _minimal_hitting_sets(supports: Sequence[frozenset]) -> List[Tuple[str, ...]]:
    universe = sorted(set().union(*supports))
    found: List[frozenset] = []
    from itertools import combinations
    for size in range(1, len(universe) + 1):
        for combo in combinations(universe, size):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if all(s & sup for sup in supports):
                found.append(s)
    return [tuple(sorted(f)) for f in found]


def verify_mc_exact(m: GraphVector, k_max: int = 4) -> bool:
    return not curvature(m, k_max=k_max)


def verify_mc(m: GraphVector, k_max: Optional[int] = None) -> bool:
    """Curvature of a rational degree-0 element vanishes (exact at tree level when Delta >= 0)."""
    cx = m.complex
    _delta(cx.model, cx.n)
    if any(d != 0 for d in m.degrees()):
        raise ValueError("verify_mc needs a degree-0 element")
    if k_max is None:
        k_max = exact_k_max(cx.model, cx.n)
    return verify_mc_exact(m, k_max=k_max)


# ---------------------------------------------------------------------------
# gauge paths


def gauge_path(cx: GraphComplex, terms: Dict, ring: Optional[CoefficientRing] = None) -> GraphVector:
    """Build a path from ``{graph: coefficient}`` over Q[t] + Q[t] dt (coefficients as ring elements or strings)."""
    ring = ring or interval_ring()
    out = {}
    for g, c in terms.items():
        if isinstance(c, str):
            c = parse_interval_coefficient(ring, c)
        out[g] = c
    return cx.vector(out, ring)


def parse_interval_coefficient(ring: CoefficientRing, text: str) -> RingElement:
    """Parse sums like ``1 - 2*t + t^2*dt`` (integer or p/q coefficients)."""
    from .coeffring import parse_rational
    s = text.replace(" ", "").replace("-", "+-")
    result = ring.zero()
    for part in s.split("+"):
        if not part:
            continue
        coeff = Fraction(1)
        mono = ring.one()
        for f in part.split("*"):
            neg = f.startswith("-")
            if neg:
                coeff = -coeff
                f = f[1:]
            if not f:
                continue
            base, _, exp = f.partition("^")
            if base in ring.index:
                e = int(exp) if exp else 1
                for _ in range(e):
                    mono = mono * ring.gen(base)
            else:
                coeff *= parse_rational(f)
        result = result + mono * coeff
    return result


def evaluate_endpoint(p: GraphVector, t_value: int) -> GraphVector:
    """Evaluate a path at t = t_value with dt -> 0, as a rational vector."""
    q = p.substitute({"t": t_value, "dt": 0})
    return GraphVector.from_rational(p.complex, {k: v.constant() for k, v in q.terms.items()})


def gauge_path_check(p: GraphVector, k_max: Optional[int] = None) -> Tuple[bool, GraphVector, GraphVector]:
    """The path is Maurer-Cartan over Q[t, dt]; returns the endpoints at t = 0 and t = 1."""
    cx = p.complex
    if k_max is None:
        k_max = exact_k_max(cx.model, cx.n, 0)
    U = curvature(p, k_max=k_max)
    return (not U), evaluate_endpoint(p, 0), evaluate_endpoint(p, 1)


def gauge_search(m0: GraphVector, m1: GraphVector, max_t_degree: int = 2,
                 k_max: Optional[int] = None) -> Optional[GraphVector]:
    """Find a path (1-t) m0 + t m1 + b(t) dt with b of degree <= max_t_degree over degree-1 trees."""
    cx = m0.complex
    if k_max is None:
        k_max = exact_k_max(cx.model, cx.n, 0)
    ring = interval_ring()
    t, dt = ring.gen("t"), ring.gen("dt")
    base = promote(m0, ring).scale(ring.one() - t) + promote(m1, ring).scale(t)
    U0 = curvature(base, k_max=k_max)
    if _strip_dt(U0, ring, keep_dt=False):
        return None
    bound = complete_edge_bound(cx.model, cx.n, 1)
    trees = [k for k in enumerate_graphs(cx.model, cx.n, 1, 1, bound)[1] if cx.graph(k).is_tree]
    unknowns = [(k, r) for k in trees for r in range(max_t_degree + 1)]
    coords: Dict[Tuple[str, Tuple[int, ...]], int] = {}

    def flatten(v: GraphVector) -> Dict[int, Fraction]:
        out = {}
        for k, c in v.terms.items():
            for mono, x in c.terms.items():
                pos = coords.setdefault((k, mono), len(coords))
                out[pos] = out.get(pos, Fraction(0)) + x
        return out

    rhs = flatten(_strip_dt(U0, ring, keep_dt=True))
    cols = []
    for k, r in unknowns:
        coeff = dt
        for _ in range(r):
            coeff = t * coeff
        trial = curvature(base + GraphVector(cx, {k: coeff}, ring), k_max=k_max)
        diff = _strip_dt(trial, ring, keep_dt=True) - _strip_dt(U0, ring, keep_dt=True)
        cols.append(flatten(diff))
    size = len(coords)
    M = SparseMatrix.from_columns(size, cols)
    b = [0] * size
    for i, x in rhs.items():
        b[i] = -x
    sol = solve(M, b) if size else [Fraction(0)] * len(unknowns)
    if sol is None:
        return None
    path = base
    for (k, r), x in zip(unknowns, sol):
        if x:
            coeff = dt * x
            for _ in range(r):
                coeff = t * coeff
            path = path + GraphVector(cx, {k: coeff}, ring)
    ok, _, _ = gauge_path_check(path, k_max=k_max)
    return path if ok else None


def _strip_dt(v: GraphVector, ring: CoefficientRing, keep_dt: bool) -> GraphVector:
    j = ring.index["dt"]
    out = {}
    for k, c in v.terms.items():
        part = {m: x for m, x in c.terms.items() if bool(m[j]) == keep_dt}
        if part:
            out[k] = RingElement(ring, part)
    return GraphVector(v.complex, out, ring)


# ---------------------------------------------------------------------------
# UTT


class UTTSpace:
    """Unitrivalent trees of one degree modulo IHX relations."""

    def __init__(self, cx: GraphComplex, degree: int):
        model, n = cx.model, cx.n
        _delta(model, n)
        self.complex = cx
        self.degree = degree
        bound = max(complete_edge_bound(model, n, degree + 1), 1)
        graphs = enumerate_graphs(model, n, degree, degree + 1, bound)
        self.trees = [k for k in graphs[degree] if cx.graph(k).is_tree and cx.graph(k).is_unitrivalent]
        self.index = {k: i for i, k in enumerate(self.trees)}
        quads = [k for k in graphs[degree + 1] if _one_four_valent(cx.graph(k))]
        # columns reversed so that pivots fall on the latest trees
        size = len(self.trees)
        rows = []
        for k in quads:
            image = cx._collect(split_terms(cx.raw(k), n))
            row = {}
            for k2, c in image.items():
                if k2 in self.index:
                    row[size - 1 - self.index[k2]] = c
            if row:
                rows.append(row)
        self.relations = rref_rows(rows)
        self.pivots = {size - 1 - p for p, _ in self.relations}
        self.retained = [k for i, k in enumerate(self.trees) if i not in self.pivots]

    @property
    def dim(self) -> int:
        return len(self.retained)

    def project(self, v: GraphVector) -> Dict[str, Fraction]:
        size = len(self.trees)
        vec = {}
        for k, c in v.rational_terms().items():
            if k in self.index:
                vec[size - 1 - self.index[k]] = c
        for p, row in self.relations:
            x = vec.get(p)
            if x:
                for j, y in row.items():
                    _acc(vec, j, -x * y)
        return {self.trees[size - 1 - j]: c for j, c in sorted(vec.items(), reverse=True) if c}


def _one_four_valent(g: HairyGraph) -> bool:
    if not g.is_tree or g.segment is not None:
        return False
    vals = sorted(g.valences)
    return bool(vals) and vals[-1] == 4 and all(x == 3 for x in vals[:-1])


class UTTElement:
    def __init__(self, space: UTTSpace, coords: Dict[str, Fraction]):
        self.space = space
        self.coords = coords

    def is_zero(self) -> bool:
        return not self.coords

    def __bool__(self):
        return bool(self.coords)

    def to_json(self):
        return [{"graph": k, "coeff": str(c)} for k, c in sorted(self.coords.items())]


def utt_project(v: GraphVector, space: Optional[UTTSpace] = None) -> UTTElement:
    """Image in UTT: non-trees and non-unitrivalent trees die, then reduce modulo IHX."""
    degs = {v.complex.degree(k) for k in v.terms}
    if not degs:
        deg = 0 if space is None else space.degree
    elif len(degs) > 1:
        raise ValueError("utt_project needs a homogeneous vector")
    else:
        deg = degs.pop()
    space = space or UTTSpace(v.complex, deg)
    return UTTElement(space, space.project(v))


def utt_h0(model: AlgebraModel, n: int, cx: Optional[GraphComplex] = None) -> dict:
    """H_0 of UTT with the differential induced by d_A."""
    cx = cx or GraphComplex(model, n)
    spaces = {d: UTTSpace(cx, d) for d in (-1, 0, 1)}

    def matrix(d: int) -> SparseMatrix:
        src, tgt = spaces[d], spaces[d - 1]
        pos = {k: i for i, k in enumerate(tgt.retained)}
        cols = []
        for k in src.retained:
            from .hgcomplex import d_a_terms
            image = cx._collect(d_a_terms(cx.raw(k), n, model))
            proj = tgt.project(GraphVector.from_rational(cx, image))
            cols.append({pos[k2]: c for k2, c in proj.items()})
        return SparseMatrix.from_columns(len(tgt.retained), cols)

    d0, d1 = matrix(0), matrix(1)
    r = spaces[0].dim - rank(d0) - rank(d1)
    return {"rank": r, "basis": spaces[0].retained, "ihxRelations": len(spaces[0].relations)}
