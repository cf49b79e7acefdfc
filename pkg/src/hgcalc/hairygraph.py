"""Hairy graphs: validity, degree and canonical form with orientation sign.

Cells and their degrees: an internal vertex has degree -n, an edge (internal
edge, hair edge or the segment edge) has degree n-1 and a decoration a has
degree -|a|.  The orientation of a graph is an ordering of its cells up to the
Koszul rule (only odd cells count) and, for n odd, a direction on every edge.

The standard word of a :class:`HairyGraph` lists the internal vertices in
order, then the internal edges as listed (with their listed direction), then
the hair edges (internal vertex -> external end) in hair order, then the
decorations in hair order.  For the segment the edge runs from the first end
to the second.  Canonical graphs are chosen so that their standard word is the
canonical word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .dgca import AlgebraModel


class GraphError(ValueError):
    """Malformed or invalid graph."""


@dataclass(frozen=True)
class HairyGraph:
    vertices: int
    edges: Tuple[Tuple[int, int], ...] = ()
    hairs: Tuple[Tuple[int, str], ...] = ()
    segment: Optional[Tuple[str, str]] = None

    @classmethod
    def make(cls, vertices: int, edges=(), hairs=(), segment=None) -> "HairyGraph":
        return cls(int(vertices), tuple((int(u), int(v)) for u, v in edges),
                   tuple((int(v), str(a)) for v, a in hairs),
                   None if segment is None else (str(segment[0]), str(segment[1])))

    @classmethod
    def make_segment(cls, a: str, b: str) -> "HairyGraph":
        return cls(0, (), (), (str(a), str(b)))

    @classmethod
    def from_json(cls, data) -> "HairyGraph":
        if not isinstance(data, dict):
            raise GraphError("graph JSON must be an object")
        extra = set(data) - {"vertices", "edges", "hairs", "segment"}
        if extra:
            raise GraphError(f"unknown graph keys {sorted(extra)}")
        try:
            seg = data.get("segment")
            if seg is not None:
                if len(seg) != 2:
                    raise GraphError("segment needs two decorations")
                return cls.make(0, (), (), seg)
            return cls.make(data["vertices"], data.get("edges", []), data.get("hairs", []))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"malformed graph JSON: {exc}") from exc

    def to_json(self) -> dict:
        if self.segment is not None:
            return {"vertices": 0, "edges": [], "hairs": [], "segment": list(self.segment)}
        return {"vertices": self.vertices, "edges": [list(e) for e in self.edges],
                "hairs": [[v, a] for v, a in self.hairs]}

    def text(self) -> str:
        """One-line text form; for canonical graphs this is the canonical key."""
        if self.segment is not None:
            return f"S[{self.segment[0]},{self.segment[1]}]"
        edges = ",".join(f"{u}-{v}" for u, v in self.edges)
        hairs = ",".join(f"{v}:{a}" for v, a in self.hairs)
        return f"G{self.vertices}[{edges}|{hairs}]"

    __str__ = text

    @classmethod
    def from_text(cls, text: str) -> "HairyGraph":
        text = text.strip()
        try:
            if text.startswith("S[") and text.endswith("]"):
                a, b = text[2:-1].split(",")
                return cls.make_segment(a, b)
            if text.startswith("G") and text.endswith("]"):
                head, body = text[1:-1].split("[", 1)
                edge_part, hair_part = body.split("|", 1)
                edges = [tuple(map(int, e.split("-"))) for e in edge_part.split(",") if e]
                hairs = []
                for h in hair_part.split(","):
                    if h:
                        v, a = h.split(":", 1)
                        hairs.append((int(v), a))
                return cls.make(int(head), edges, hairs)
        except ValueError as exc:
            raise GraphError(f"malformed graph text {text!r}") from exc
        raise GraphError(f"malformed graph text {text!r}")

    # simple invariants ---------------------------------------------------
    @property
    def hair_count(self) -> int:
        return 2 if self.segment is not None else len(self.hairs)

    @property
    def edge_count(self) -> int:
        """Internal edges plus hairs (the segment counts as one edge)."""
        if self.segment is not None:
            return 1
        return len(self.edges) + len(self.hairs)

    @property
    def decorations(self) -> Tuple[str, ...]:
        if self.segment is not None:
            return self.segment
        return tuple(a for _, a in self.hairs)

    @property
    def genus(self) -> int:
        if self.segment is not None:
            return 0
        return len(self.edges) - self.vertices + 1

    @property
    def valences(self) -> List[int]:
        val = [0] * self.vertices
        for u, v in self.edges:
            val[u] += 1
            val[v] += 1
        for v, _ in self.hairs:
            val[v] += 1
        return val

    @property
    def is_tree(self) -> bool:
        return self.genus == 0

    @property
    def is_unitrivalent(self) -> bool:
        return self.is_tree and all(x == 3 for x in self.valences)


def is_valid(g: HairyGraph, model: Optional[AlgebraModel] = None) -> Tuple[bool, str]:
    """Check connectivity, valence >= 3, at least one hair and known decorations."""
    if model is not None:
        for a in g.decorations:
            if a not in model.index:
                return False, f"unknown decoration {a!r}"
    if g.segment is not None:
        if g.vertices or g.edges or g.hairs:
            return False, "a segment has no internal vertices, edges or hairs"
        return True, ""
    if g.vertices <= 0:
        return False, "a graph without internal vertices must be the segment"
    for u, v in g.edges:
        if not (0 <= u < g.vertices and 0 <= v < g.vertices):
            return False, f"edge ({u}, {v}) refers to a missing vertex"
    for v, _ in g.hairs:
        if not 0 <= v < g.vertices:
            return False, f"hair at missing vertex {v}"
    if not g.hairs:
        return False, "at least one hair is required"
    val = g.valences
    for v, x in enumerate(val):
        if x < 3:
            return False, f"vertex {v} has valence {x} < 3"
    parent = list(range(g.vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        parent[find(u)] = find(v)
    if len({find(v) for v in range(g.vertices)}) != 1:
        return False, "graph is disconnected"
    return True, ""


def degree(g: HairyGraph, n: int, model: AlgebraModel) -> int:
    """(n-1) #E - n #V - sum |a|, where #E counts internal edges and hairs."""
    total = 0
    for a in g.decorations:
        if a not in model.index:
            raise GraphError(f"unknown decoration {a!r}")
        total += model.degrees[model.index[a]]
    return (n - 1) * g.edge_count - n * g.vertices - total


# ---------------------------------------------------------------------------
# working representation


VERTEX, EDGE, DECO = 0, 1, 2


class RawGraph:
    """Mutable graph with integer node ids and an explicit cell word.

    ``internal`` lists internal vertex ids, ``deco`` maps external node ids to
    basis indices, ``edges`` maps edge ids to directed endpoint pairs and
    ``word`` is the ordered list of cells ``(kind, id)``.  ``comp`` records the
    component of every external node (used when gluing several graphs).
    """

    __slots__ = ("internal", "deco", "edges", "word", "comp", "next_id")

    def __init__(self, internal, deco, edges, word, comp=None, next_id=None):
        self.internal = list(internal)
        self.deco = dict(deco)
        self.edges = dict(edges)
        self.word = list(word)
        self.comp = dict(comp) if comp is not None else {x: 0 for x in self.deco}
        if next_id is None:
            ids = list(self.internal) + list(self.deco) + list(self.edges)
            next_id = (max(ids) + 1) if ids else 0
        self.next_id = next_id

    def copy(self) -> "RawGraph":
        return RawGraph(self.internal, self.deco, self.edges, self.word, self.comp, self.next_id)

    def fresh(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def edge_of_external(self) -> Dict[int, int]:
        out = {}
        for e, (a, b) in self.edges.items():
            if a in self.deco:
                out[a] = e
            if b in self.deco:
                out[b] = e
        return out


def raw_from_graph(g: HairyGraph, model: AlgebraModel) -> RawGraph:
    idx = model.index
    if g.segment is not None:
        a, b = g.segment
        return RawGraph([], {0: idx[a], 1: idx[b]}, {2: (0, 1)},
                        [(EDGE, 2), (DECO, 0), (DECO, 1)], next_id=3)
    V = g.vertices
    internal = list(range(V))
    deco = {V + i: idx[a] for i, (_, a) in enumerate(g.hairs)}
    nid = V + len(g.hairs)
    edges = {}
    word = [(VERTEX, v) for v in internal]
    for u, v in g.edges:
        edges[nid] = (u, v)
        word.append((EDGE, nid))
        nid += 1
    for i, (v, _) in enumerate(g.hairs):
        edges[nid] = (v, V + i)
        word.append((EDGE, nid))
        nid += 1
    word.extend((DECO, V + i) for i in range(len(g.hairs)))
    return RawGraph(internal, deco, edges, word, next_id=nid)


def disjoint_union(graphs: Sequence[RawGraph]) -> RawGraph:
    """Product of graphs: ids shifted apart, words concatenated, components tagged."""
    internal, deco, edges, word, comp = [], {}, {}, [], {}
    offset = 0
    for k, g in enumerate(graphs):
        shift = offset
        internal.extend(v + shift for v in g.internal)
        for x, a in g.deco.items():
            deco[x + shift] = a
            comp[x + shift] = k
        for e, (a, b) in g.edges.items():
            edges[e + shift] = (a + shift, b + shift)
        word.extend((kind, i + shift) for kind, i in g.word)
        offset += g.next_id
    return RawGraph(internal, deco, edges, word, comp, next_id=offset)


def cell_parity(kind: int, ident: int, g: RawGraph, n: int, model: AlgebraModel) -> int:
    if kind == VERTEX:
        return n & 1
    if kind == EDGE:
        return (n - 1) & 1
    return model.parities[g.deco[ident]]


def graph_parity(g: RawGraph, n: int, model: AlgebraModel) -> int:
    p = (len(g.internal) * n + len(g.edges) * (n - 1)) & 1
    for a in g.deco.values():
        p ^= model.parities[a]
    return p


def raw_degree(g: RawGraph, n: int, model: AlgebraModel) -> int:
    return (n - 1) * len(g.edges) - n * len(g.internal) - sum(model.degrees[a] for a in g.deco.values())


# ---------------------------------------------------------------------------
# canonical labeling


def _refine(colors: List[int], adj: List[List[int]]) -> List[int]:
    count = len(set(colors))
    while True:
        sigs = [(colors[u], tuple(sorted(colors[w] for w in adj[u]))) for u in range(len(colors))]
        order = sorted(set(sigs))
        index = {s: i for i, s in enumerate(order)}
        new = [index[s] for s in sigs]
        if len(order) == count:
            return new
        colors, count = new, len(order)


def _individualize(colors: List[int], u: int) -> List[int]:
    sigs = [(c, 0 if v == u else 1) for v, c in enumerate(colors)]
    order = sorted(set(sigs))
    index = {s: i for i, s in enumerate(order)}
    return [index[s] for s in sigs]


class Canonical:
    """Result of canonicalization: key, canonical graph and sign (0 if the graph vanishes)."""

    __slots__ = ("key", "graph", "sign")

    def __init__(self, key: str, graph: Optional[HairyGraph], sign: int):
        self.key = key
        self.graph = graph
        self.sign = sign


def canonicalize_raw(g: RawGraph, n: int, model: AlgebraModel, want_key: bool = False) -> Canonical:
    """Canonical form of a connected raw graph and the sign relating orientations.

    When the graph vanishes by orientation the search is skipped unless
    ``want_key`` is set; the returned key is then empty.
    """
    nodes = list(g.internal) + sorted(g.deco)
    local = {u: i for i, u in enumerate(nodes)}
    N = len(nodes)
    V = len(g.internal)
    adj: List[List[int]] = [[] for _ in range(N)]
    pair_count: Dict[Tuple[int, int], int] = {}
    vanishes = False
    for e, (a, b) in g.edges.items():
        la, lb = local[a], local[b]
        adj[la].append(lb)
        if la != lb:
            adj[lb].append(la)
        else:
            adj[la].append(la)
            if n & 1:
                vanishes = True
        key = (min(la, lb), max(la, lb))
        pair_count[key] = pair_count.get(key, 0) + 1
    if not (n & 1) and any(c > 1 for c in pair_count.values()):
        vanishes = True
    if vanishes and not want_key:
        return Canonical("", None, 0)
    # twin hairs: equal decorations on one internal vertex
    twin_class = list(range(N))
    seen: Dict[Tuple[int, int], int] = {}
    for x in g.deco:
        lx = local[x]
        nb = adj[lx]
        if len(nb) == 1 and nb[0] < V:
            k = (nb[0], g.deco[x])
            if k in seen:
                if ((n - 1) + model.degrees[g.deco[x]]) & 1:
                    vanishes = True
                    if not want_key:
                        return Canonical("", None, 0)
                twin_class[lx] = seen[k]
            else:
                seen[k] = lx
    init = [(0, 0) if i < V else (1, g.deco[nodes[i]]) for i in range(N)]
    order = sorted(set(init))
    colors = [order.index(c) for c in init]
    colors = _refine(colors, adj)

    best_cert = None
    best_labels: List[List[int]] = []

    def search(colors):
        nonlocal best_cert, best_labels
        size: Dict[int, int] = {}
        for c in colors:
            size[c] = size.get(c, 0) + 1
        if len(size) == N:
            cert = tuple(sorted(
                (min(colors[local[a]], colors[local[b]]), max(colors[local[a]], colors[local[b]]))
                for a, b in g.edges.values()))
            if best_cert is None or cert < best_cert:
                best_cert, best_labels = cert, [colors]
            elif cert == best_cert:
                best_labels.append(colors)
            return
        target = min((s, c) for c, s in size.items() if s > 1)[1]
        tried = set()
        for u in range(N):
            if colors[u] != target or twin_class[u] in tried:
                continue
            tried.add(twin_class[u])
            search(_refine(_individualize(colors, u), adj))

    search(colors)
    labels = best_labels[0]
    graph = _graph_from_labels(g, labels, local, V, model)
    key = graph.text()
    if vanishes:
        return Canonical(key, graph, 0)
    signs = {_labeling_sign(g, colors_, local, V, n, model) for colors_ in best_labels}
    if len(signs) > 1:
        return Canonical(key, graph, 0)
    return Canonical(key, graph, signs.pop())


def _canonical_edge_order(g: RawGraph, labels, local, V):
    """Edge ids in canonical word order with their canonical directions."""
    internal_edges, outer = [], []
    for e, (a, b) in g.edges.items():
        la, lb = labels[local[a]], labels[local[b]]
        if la < V and lb < V:
            internal_edges.append(((min(la, lb), max(la, lb)), e, la <= lb))
        else:
            # hair edges point away from the internal vertex; the segment goes up
            outer.append((max(la, lb), e, la < lb))
    internal_edges.sort(key=lambda t: t[0])
    outer.sort(key=lambda t: t[0])
    return internal_edges, outer


def _labeling_sign(g: RawGraph, labels, local, V, n, model) -> int:
    internal_edges, outer = _canonical_edge_order(g, labels, local, V)
    pos: Dict[Tuple[int, int], int] = {}
    for v in g.internal:
        pos[(VERTEX, v)] = labels[local[v]]
    k = V
    flips = 0
    for _, e, forward in internal_edges + outer:
        pos[(EDGE, e)] = k
        k += 1
        if not forward:
            flips += 1
    base = k
    for x in g.deco:
        pos[(DECO, x)] = base + labels[local[x]] - V
    seq = []
    for kind, ident in g.word:
        if kind == VERTEX:
            odd = n & 1
        elif kind == EDGE:
            odd = (n - 1) & 1
        else:
            odd = model.parities[g.deco[ident]]
        if odd:
            seq.append(pos[(kind, ident)])
    inv = 0
    for i in range(len(seq)):
        si = seq[i]
        for j in range(i + 1, len(seq)):
            if si > seq[j]:
                inv += 1
    if n & 1:
        inv += flips
    return -1 if inv & 1 else 1


def _graph_from_labels(g: RawGraph, labels, local, V, model) -> HairyGraph:
    ids = model.ids
    ext_by_label = sorted((labels[local[x]], x) for x in g.deco)
    if V == 0:
        (_, x1), (_, x2) = ext_by_label
        return HairyGraph(0, (), (), (ids[g.deco[x1]], ids[g.deco[x2]]))
    edges = []
    attach = {}
    for e, (a, b) in g.edges.items():
        la, lb = labels[local[a]], labels[local[b]]
        if la < V and lb < V:
            edges.append((min(la, lb), max(la, lb)))
        elif la < V:
            attach[lb] = la
        else:
            attach[la] = lb
    edges.sort()
    hairs = tuple((attach[lab], ids[g.deco[x]]) for lab, x in ext_by_label)
    return HairyGraph(V, tuple(edges), hairs, None)


def canonicalize(g: HairyGraph, n: int, model: AlgebraModel) -> Tuple[HairyGraph, int]:
    """Canonical representative and the sign s with g = s * canonical (0 if g vanishes)."""
    ok, reason = is_valid(g, model)
    if not ok:
        raise GraphError(reason)
    c = canonicalize_raw(raw_from_graph(g, model), n, model, want_key=True)
    return c.graph, c.sign


# convenient constructors --------------------------------------------------


def segment(a: str, b: str) -> HairyGraph:
    return HairyGraph.make_segment(a, b)


def tripod(a: str, b: str, c: str) -> HairyGraph:
    return HairyGraph.make(1, (), [(0, a), (0, b), (0, c)])


def corolla(*decorations: str) -> HairyGraph:
    return HairyGraph.make(1, (), [(0, a) for a in decorations])


def h_graph(a: str, b: str, c: str, d: str) -> HairyGraph:
    """Two vertices joined by an edge, hairs a, b on the first and c, d on the second."""
    return HairyGraph.make(2, [(0, 1)], [(0, a), (0, b), (1, c), (1, d)])
