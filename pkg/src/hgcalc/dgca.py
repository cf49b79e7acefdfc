"""Finite non-unital dg commutative algebra models, optionally with higher products.

Elements are dicts ``{basis index: Fraction}``.  The optional homotopy data
assigns to a decorated rooted tree (a tree whose leaves carry basis elements)
an element of the algebra; entries are stored in canonical form so that
relabelled trees and permuted inputs are resolved with Koszul signs.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from itertools import product as iproduct
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .coeffring import format_rational, parse_rational
from .trees import (RootedTree, Tree, contract_at, decorated_canonical, format_tree,
                    internal_count, koszul_sign, labelled_trees, leaves, parse_tree,
                    permutation_sign, preorder_paths, relabel, replace_at, subtree)

Element = Dict[int, Fraction]

_ID_RE = re.compile(r"^[^\s(),;|:\[\]]+$")


class ModelError(ValueError):
    """Malformed model input or a failed validation."""


def _clean(elem: Mapping[int, Fraction]) -> Element:
    return {k: v for k, v in elem.items() if v}


def _add_into(acc: Element, elem: Mapping[int, Fraction], scale: Fraction = Fraction(1)):
    for k, v in elem.items():
        x = acc.get(k, Fraction(0)) + scale * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


class AlgebraModel:
    """A finite-dimensional non-unital graded-commutative dg algebra.

    ``products`` maps ``(i, j)`` to an element; missing commutativity partners
    are filled in by the Koszul rule.  ``differential`` maps ``i`` to ``d(e_i)``.
    ``homotopy`` maps ``(tree string, input id tuple)`` to an element.
    """

    def __init__(self, name: str, basis: Sequence[Tuple[str, int]],
                 products: Optional[Mapping[Tuple[int, int], Mapping[int, object]]] = None,
                 differential: Optional[Mapping[int, Mapping[int, object]]] = None,
                 homotopy: Optional[Iterable[Tuple[str, Sequence[str], Mapping[int, object]]]] = None):
        self.name = str(name)
        self.ids: Tuple[str, ...] = tuple(str(b[0]) for b in basis)
        self.degrees: Tuple[int, ...] = tuple(int(b[1]) for b in basis)
        if len(set(self.ids)) != len(self.ids):
            raise ModelError("duplicate basis ids")
        for bid in self.ids:
            if not _ID_RE.match(bid):
                raise ModelError(f"basis id {bid!r} contains reserved characters")
        self.index = {bid: i for i, bid in enumerate(self.ids)}
        self.parities = tuple(d & 1 for d in self.degrees)
        given: Dict[Tuple[int, int], Element] = {}
        for (i, j), res in (products or {}).items():
            self._check_index(i)
            self._check_index(j)
            acc: Element = {}
            for k, c in res.items():
                self._check_index(k)
                _add_into(acc, {k: parse_rational(c)})
            if (i, j) in given:
                raise ModelError(f"duplicate product entry {self.ids[i]}*{self.ids[j]}")
            given[(i, j)] = acc
        table = dict(given)
        for (i, j), res in given.items():
            if (j, i) not in table:
                s = -1 if self.parities[i] & self.parities[j] else 1
                table[(j, i)] = {k: s * v for k, v in res.items()}
        self.products: Dict[Tuple[int, int], Element] = {k: v for k, v in table.items() if v}
        diff: Dict[int, Element] = {}
        for i, res in (differential or {}).items():
            self._check_index(i)
            acc = {}
            for k, c in res.items():
                self._check_index(k)
                _add_into(acc, {k: parse_rational(c)})
            if acc:
                diff[i] = acc
        self.differential = diff
        self.homotopy_entries: List[Tuple[str, Tuple[str, ...], Element]] = []
        self.homotopy: Dict[str, Element] = {}
        self._homotopy_conflicts: List[dict] = []
        self.homotopy_leaf_counts: set = set()
        for tree_text, inputs, res in (homotopy or ()):
            tree = parse_tree(tree_text) if isinstance(tree_text, str) else tree_text
            inputs = tuple(inputs)
            if len(inputs) != len(leaves(tree)):
                raise ModelError(f"homotopy entry {format_tree(tree)} has wrong input count")
            for x in inputs:
                if x not in self.index:
                    raise ModelError(f"unknown basis id {x!r} in homotopy entry")
            acc = {}
            for k, c in res.items():
                self._check_index(k)
                _add_into(acc, {k: parse_rational(c)})
            self.homotopy_entries.append((format_tree(tree), inputs, acc))
            key, sign, _ = decorated_canonical(tree, inputs, [self.parities[self.index[x]] for x in inputs])
            self.homotopy_leaf_counts.add(len(inputs))
            if sign == 0:
                if acc:
                    self._homotopy_conflicts.append({
                        "axiom": "homotopy-symmetry", "tuple": [format_tree(tree)] + list(inputs),
                        "detail": "entry on a decorated tree with an odd automorphism must vanish"})
                continue
            value = {k: sign * v for k, v in acc.items()}
            if key in self.homotopy and self.homotopy[key] != value:
                self._homotopy_conflicts.append({
                    "axiom": "homotopy-symmetry", "tuple": [format_tree(tree)] + list(inputs),
                    "detail": "entries related by relabelling disagree"})
            self.homotopy[key] = value

    def _check_index(self, i):
        if not isinstance(i, int) or not 0 <= i < len(self.ids):
            raise ModelError(f"unknown basis index {i!r}")

    @property
    def is_strict(self) -> bool:
        return not self.homotopy_entries

    @property
    def dimension(self) -> int:
        """Largest basis degree (the dim(A) of the codimension formula)."""
        return max(self.degrees) if self.degrees else 0

    def __len__(self):
        return len(self.ids)

    def __repr__(self):
        return f"AlgebraModel({self.name!r}, {len(self.ids)} basis elements)"

    def element(self, spec: Mapping[str, object]) -> Element:
        out: Element = {}
        for bid, c in spec.items():
            if bid not in self.index:
                raise ModelError(f"unknown basis id {bid!r}")
            _add_into(out, {self.index[bid]: parse_rational(c)})
        return out

    def basis_element(self, bid: str) -> Element:
        return self.element({bid: 1})

    def d(self, elem: Mapping[int, Fraction]) -> Element:
        out: Element = {}
        for i, c in elem.items():
            img = self.differential.get(i)
            if img:
                _add_into(out, img, c)
        return out

    def degree_of(self, elem: Mapping[int, Fraction]) -> Optional[int]:
        degs = {self.degrees[i] for i in elem}
        if len(degs) == 1:
            return degs.pop()
        return None if degs else 0

    def signature(self):
        """Structure constants keyed by ids, used for equality checks."""
        prods = {(self.ids[i], self.ids[j]): {self.ids[k]: v for k, v in r.items()}
                 for (i, j), r in self.products.items()}
        diff = {self.ids[i]: {self.ids[k]: v for k, v in r.items()} for i, r in self.differential.items()}
        hom = {k: {self.ids[i]: v for i, v in r.items()} for k, r in self.homotopy.items() if r}
        return (tuple(zip(self.ids, self.degrees)),
                sorted((k, sorted(v.items())) for k, v in prods.items()),
                sorted((k, sorted(v.items())) for k, v in diff.items()),
                sorted((k, sorted(v.items())) for k, v in hom.items()))

    def same_structure(self, other: "AlgebraModel") -> bool:
        return self.signature() == other.signature()


# ---------------------------------------------------------------------------
# operations


def multiply(model: AlgebraModel, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Element:
    """Bilinear extension of the product table."""
    out: Element = {}
    for i, x in a.items():
        model._check_index(i)
        for j, y in b.items():
            model._check_index(j)
            res = model.products.get((i, j))
            if res:
                _add_into(out, res, x * y)
    return out


def multiply_basis(model: AlgebraModel, i: int, j: int) -> Element:
    return model.products.get((i, j), {})


def iterated_product(model: AlgebraModel, args: Sequence[Mapping[int, Fraction]]) -> Element:
    acc: Element = dict(args[0])
    for a in args[1:]:
        acc = multiply(model, acc, a)
        if not acc:
            return {}
    return acc


def _as_shape(tree) -> Tree:
    if isinstance(tree, RootedTree):
        return tree.shape
    if isinstance(tree, str):
        return parse_tree(tree)
    return tree


def rho_basis(model: AlgebraModel, tree: Tree, inputs: Sequence[int]) -> Element:
    """rho^T on basis inputs; leaf ``i`` of ``tree`` receives ``inputs[i-1]``."""
    p = internal_count(tree)
    if p == 1 and (model.is_strict or len(inputs) == 2):
        return iterated_product(model, [{i: Fraction(1)} for i in _leaf_order_inputs(tree, inputs)])
    if model.is_strict:
        return {}
    labels = [model.ids[i] for i in inputs]
    key, sign, _ = decorated_canonical(tree, labels, [model.parities[i] for i in inputs])
    if sign == 0:
        return {}
    val = model.homotopy.get(key)
    if val is None:
        if p == 1:
            return iterated_product(model, [{i: Fraction(1)} for i in _leaf_order_inputs(tree, inputs)])
        return {}
    return {k: sign * v for k, v in val.items()}


def _leaf_order_inputs(tree: Tree, inputs: Sequence[int]) -> List[int]:
    # a corolla: product taken in leaf-label order
    return [inputs[i] for i in range(len(inputs))]


def rho(model: AlgebraModel, tree, args: Sequence[Mapping[int, Fraction]]) -> Element:
    """Multilinear evaluation of rho^T; leaf i receives ``args[i-1]``."""
    shape = _as_shape(tree)
    r = len(leaves(shape))
    if r != len(args):
        raise ModelError(f"tree has {r} leaves but {len(args)} arguments were given")
    out: Element = {}
    if any(not a for a in args):
        return out
    for combo in iproduct(*(sorted(a.items()) for a in args)):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        res = rho_basis(model, shape, [i for i, _ in combo])
        if res:
            _add_into(out, res, coeff)
    return out


# ---------------------------------------------------------------------------
# validation


def validate(model: AlgebraModel, tree_bound: int = 3, leaf_bound: int = 4) -> List[dict]:
    """List every violated axiom; empty iff the model is a valid (homotopy) dgca."""
    report: List[dict] = []
    ids, degs, par = model.ids, model.degrees, model.parities
    n = len(ids)

    def violation(axiom, tup, detail):
        report.append({"axiom": axiom, "tuple": [ids[i] if isinstance(i, int) else i for i in tup],
                       "detail": detail})

    zero_deg = [i for i in range(n) if degs[i] == 0]
    for i in range(n):
        if degs[i] < 0:
            violation("positivity", (i,), "basis degrees must be non-negative")
    for i in zero_deg:
        for j in zero_deg:
            want = {j: Fraction(1)} if i == j else {}
            if multiply_basis(model, i, j) != want:
                violation("degree-zero-idempotent", (i, j),
                          "degree-0 basis elements must be orthogonal idempotents")
        if model.differential.get(i):
            violation("degree-zero-idempotent", (i,), "degree-0 basis elements must be closed")
    for (i, j), res in model.products.items():
        for k in res:
            if degs[k] != degs[i] + degs[j]:
                violation("product-degree", (i, j), f"term {ids[k]} has the wrong degree")
    for i, res in model.differential.items():
        for k in res:
            if degs[k] != degs[i] + 1:
                violation("differential-degree", (i,), f"term {ids[k]} has the wrong degree")
    for i in range(n):
        for j in range(i, n):
            ab = multiply_basis(model, i, j)
            ba = multiply_basis(model, j, i)
            s = -1 if par[i] & par[j] else 1
            if ab != {k: s * v for k, v in ba.items()}:
                violation("commutativity", (i, j), "ab != (-1)^{|a||b|} ba")
    for i in range(n):
        for j in range(n):
            ij = multiply_basis(model, i, j)
            for k in range(n):
                left = multiply(model, ij, {k: Fraction(1)})
                right = multiply(model, {i: Fraction(1)}, multiply_basis(model, j, k))
                if left != right:
                    violation("associativity", (i, j, k), "(ab)c != a(bc)")
    for i in range(n):
        if model.d(model.d({i: Fraction(1)})):
            violation("d-squared", (i,), "d(d(a)) != 0")
    for i in range(n):
        for j in range(n):
            lhs = model.d(multiply_basis(model, i, j))
            rhs: Element = {}
            _add_into(rhs, multiply(model, model.d({i: Fraction(1)}), {j: Fraction(1)}))
            s = -1 if par[i] else 1
            _add_into(rhs, multiply(model, {i: Fraction(1)}, model.d({j: Fraction(1)})), Fraction(s))
            if lhs != rhs:
                violation("leibniz", (i, j), "d(ab) != d(a)b + (-1)^{|a|} a d(b)")
    if not model.is_strict:
        report.extend(model._homotopy_conflicts)
        report.extend(_validate_homotopy(model, tree_bound, leaf_bound))
    return report


def _validate_homotopy(model: AlgebraModel, tree_bound: int, leaf_bound: int) -> List[dict]:
    report: List[dict] = []
    ids, degs = model.ids, model.degrees
    for tree_text, inputs, res in model.homotopy_entries:
        tree = parse_tree(tree_text)
        p = internal_count(tree)
        want = sum(degs[model.index[x]] for x in inputs) + 1 - p
        for k in res:
            if degs[k] != want:
                report.append({"axiom": "homotopy-degree", "tuple": [tree_text] + list(inputs),
                               "detail": f"term {ids[k]} should have degree {want}"})
        if p == 1 and len(inputs) == 2:
            prod = multiply_basis(model, model.index[inputs[0]], model.index[inputs[1]])
            if prod != res:
                report.append({"axiom": "homotopy-product", "tuple": [tree_text] + list(inputs),
                               "detail": "the binary corolla must equal the product"})
    max_leaves = min(leaf_bound, max(model.homotopy_leaf_counts | {2}) + 1)
    n = len(ids)
    for r in range(2, max_leaves + 1):
        for tree in labelled_trees(r):
            if internal_count(tree) > tree_bound:
                continue
            for inputs in iproduct(range(n), repeat=r):
                value = coherence_defect(model, tree, inputs)
                if value:
                    report.append({"axiom": "homotopy-coherence",
                                   "tuple": [format_tree(tree)] + [ids[i] for i in inputs],
                                   "detail": "structure relation fails: " + format_element(model, value)})
    return report


def coherence_defect(model: AlgebraModel, tree: Tree, inputs: Sequence[int]) -> Element:
    """Left side of the tree structure relation; zero for a coherent model.

    For a tree T with orientation o (preorder of its vertices) and inputs
    a_1..a_r it is

        (-1)^p d rho(T; a) + sum_j (-1)^{|a_1|+..+|a_{j-1}|} rho(T; .., d a_j, ..)
        + sum_c (-1)^{pos(c)} rho(T/e_c; a)
        + sum_c kappa * shuffle * (-1)^{p2 (1 - p1)} rho(T1; rho(T2; a_S2), a_rest)

    where c runs over non-root vertices, e_c is the edge above c, T2 is the
    subtree at c and T1 is T with T2 replaced by a single leaf placed first.
    """
    par = model.parities
    p = internal_count(tree)
    args = [{i: Fraction(1)} for i in inputs]
    out: Element = {}
    _add_into(out, model.d(rho(model, tree, args)), Fraction(-1 if p & 1 else 1))
    prefix = 0
    for j, a in enumerate(inputs):
        da = model.d({a: Fraction(1)})
        if da:
            new_args = list(args)
            new_args[j] = da
            _add_into(out, rho(model, tree, new_args), Fraction(-1 if prefix else 1))
        prefix ^= par[a]
    paths = preorder_paths(tree)
    for pos, path in enumerate(paths):
        if not path:
            continue
        contracted = contract_at(tree, path)
        _add_into(out, rho(model, contracted, args), Fraction(-1 if pos & 1 else 1))
        # nested composition at c = path
        t2 = subtree(tree, path)
        s2 = sorted(leaves(t2))
        rest = [x for x in range(1, len(inputs) + 1) if x not in s2]
        p2 = internal_count(t2)
        p1 = p - p2
        kappa = koszul_sign([x - 1 for x in s2 + rest], [par[i] for i in inputs])
        # vertex shuffle: o = (A, o2, B) while the composite word is (A, B, o2)
        sub_positions = [k for k, q in enumerate(paths) if tuple(q[:len(path)]) == tuple(path)]
        after = sum(1 for k in range(len(paths)) if k > sub_positions[-1])
        shuffle = -1 if (p2 * after) & 1 else 1
        sign = kappa * shuffle * (-1 if (p2 * (1 - p1)) & 1 else 1)
        t2_relabelled = relabel(t2, {x: k + 1 for k, x in enumerate(s2)})
        inner = rho(model, t2_relabelled, [args[x - 1] for x in s2])
        if not inner:
            continue
        hole = 10 ** 6
        t1 = replace_at(tree, path, hole)
        mapping = {hole: 1}
        mapping.update({x: k + 2 for k, x in enumerate(rest)})
        t1 = relabel(t1, mapping)
        outer = rho(model, t1, [inner] + [args[x - 1] for x in rest])
        _add_into(out, outer, Fraction(sign))
    return out


# ---------------------------------------------------------------------------
# builders, tensor products and JSON


_BUILTIN_RE = re.compile(r"^(sphere|wedge|disjoint):(\d+(,\d+)*)$")


def sphere(m: int) -> AlgebraModel:
    if m < 1:
        raise ModelError("sphere dimension must be positive")
    return AlgebraModel(f"sphere:{m}", [("w", m)])


def wedge(dims: Sequence[int]) -> AlgebraModel:
    if not dims or any(m < 1 for m in dims):
        raise ModelError("wedge dimensions must be positive")
    return AlgebraModel("wedge:" + ",".join(map(str, dims)),
                        [(f"w{i + 1}", m) for i, m in enumerate(dims)])


def disjoint(dims: Sequence[int]) -> AlgebraModel:
    if not dims or any(m < 1 for m in dims):
        raise ModelError("sphere dimensions must be positive")
    r = len(dims)
    basis = [(f"1_{i + 1}", 0) for i in range(r)] + [(f"w{i + 1}", m) for i, m in enumerate(dims)]
    prods = {}
    for i in range(r):
        prods[(i, i)] = {i: 1}
        prods[(i, r + i)] = {r + i: 1}
    return AlgebraModel("disjoint:" + ",".join(map(str, dims)), basis, prods)


def s1xs2() -> AlgebraModel:
    return AlgebraModel("s1xs2", [("a", 1), ("b", 2), ("ab", 3)], {(0, 1): {2: 1}})


def s2xs2() -> AlgebraModel:
    return AlgebraModel("s2xs2", [("w1", 2), ("w2", 2), ("w1w2", 4)], {(0, 1): {2: 1}})


def build_builtin(spec: str) -> AlgebraModel:
    """Build one of the named example models."""
    spec = spec.strip()
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
    if spec == "s1xs2":
        return s1xs2()
    if spec == "s2xs2":
        return s2xs2()
    if spec.startswith("product:"):
        parts = re.findall(r"sphere:\d+", spec[len("product:"):])
        if len(parts) < 2 or ",".join(parts) != spec[len("product:"):]:
            raise ModelError(f"malformed product spec {spec!r}")
        model = build_builtin(parts[0])
        for part in parts[1:]:
            model = tensor(model, build_builtin(part))
        model.name = spec
        return model
    m = _BUILTIN_RE.match(spec)
    if not m:
        raise ModelError(f"malformed builtin spec {spec!r}")
    kind = m.group(1)
    dims = [int(x) for x in m.group(2).split(",")]
    if kind == "sphere":
        if len(dims) != 1:
            raise ModelError("sphere takes one dimension")
        return sphere(dims[0])
    if kind == "wedge":
        return wedge(dims)
    return disjoint(dims)


def tensor(a: AlgebraModel, b: AlgebraModel) -> AlgebraModel:
    """Reduced part of the unital tensor product (Q + A) (x) (Q + B)."""
    for model in (a, b):
        problems = validate(model)
        if problems:
            raise ModelError(f"model {model.name} is invalid: {problems[0]['axiom']}")
        if not model.is_strict:
            raise ModelError("tensor products of homotopy models are not supported")
    ONE = -1
    pairs: List[Tuple[int, int]] = [(i, ONE) for i in range(len(a))]
    pairs += [(ONE, j) for j in range(len(b))]
    pairs += [(i, j) for i in range(len(a)) for j in range(len(b))]

    def pid(pair):
        i, j = pair
        left = a.ids[i] if i != ONE else "1"
        right = b.ids[j] if j != ONE else "1"
        return f"{left}⊗{right}"

    def pdeg(pair):
        i, j = pair
        return (a.degrees[i] if i != ONE else 0) + (b.degrees[j] if j != ONE else 0)

    index = {p: k for k, p in enumerate(pairs)}

    def mult_side(model, x, y):
        if x == ONE:
            return {y: Fraction(1)} if y != ONE else {ONE: Fraction(1)}
        if y == ONE:
            return {x: Fraction(1)}
        return multiply_basis(model, x, y)

    def par(model, x):
        return 0 if x == ONE else model.parities[x]

    prods = {}
    for p1 in pairs:
        for p2 in pairs:
            (x1, y1), (x2, y2) = p1, p2
            s = -1 if par(b, y1) & par(a, x2) else 1
            left = mult_side(a, x1, x2)
            right = mult_side(b, y1, y2)
            res = {}
            for u, cu in left.items():
                for v, cv in right.items():
                    if u == ONE and v == ONE:
                        continue
                    res[index[(u, v)]] = res.get(index[(u, v)], Fraction(0)) + s * cu * cv
            res = _clean(res)
            if res:
                prods[(index[p1], index[p2])] = res
    diff = {}
    for p in pairs:
        x, y = p
        res = {}
        if x != ONE:
            for u, c in a.differential.get(x, {}).items():
                res[index[(u, y)]] = res.get(index[(u, y)], Fraction(0)) + c
        if y != ONE:
            s = -1 if par(a, x) else 1
            for v, c in b.differential.get(y, {}).items():
                res[index[(x, v)]] = res.get(index[(x, v)], Fraction(0)) + s * c
        res = _clean(res)
        if res:
            diff[index[p]] = res
    return AlgebraModel(f"tensor({a.name},{b.name})", [(pid(p), pdeg(p)) for p in pairs], prods, diff)


def _parse_combination(entries, index, where) -> Dict[int, Fraction]:
    if not isinstance(entries, list):
        raise ModelError(f"{where}: result must be a list")
    out: Dict[int, Fraction] = {}
    for term in entries:
        if not isinstance(term, dict) or "basis" not in term or "coeff" not in term:
            raise ModelError(f"{where}: terms need 'basis' and 'coeff'")
        if term["basis"] not in index:
            raise ModelError(f"{where}: unknown basis id {term['basis']!r}")
        try:
            c = parse_rational(term["coeff"])
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"{where}: bad coefficient {term['coeff']!r}") from exc
        k = index[term["basis"]]
        out[k] = out.get(k, Fraction(0)) + c
    return out


def model_from_dict(data: Mapping) -> AlgebraModel:
    if not isinstance(data, dict):
        raise ModelError("model JSON must be an object")
    for key in ("name", "basis"):
        if key not in data:
            raise ModelError(f"model JSON lacks {key!r}")
    allowed = {"name", "basis", "products", "differential", "homotopy"}
    extra = set(data) - allowed
    if extra:
        raise ModelError(f"unknown model keys {sorted(extra)}")
    basis = []
    for entry in data["basis"]:
        if not isinstance(entry, dict) or "id" not in entry or "degree" not in entry:
            raise ModelError("basis entries need 'id' and 'degree'")
        if not isinstance(entry["degree"], int) or isinstance(entry["degree"], bool):
            raise ModelError("basis degrees must be integers")
        basis.append((str(entry["id"]), entry["degree"]))
    index = {bid: i for i, (bid, _) in enumerate(basis)}
    prods = {}
    for entry in data.get("products", []):
        try:
            key = (index[entry["left"]], index[entry["right"]])
        except (KeyError, TypeError) as exc:
            raise ModelError(f"bad product entry {entry!r}") from exc
        if key in prods:
            raise ModelError(f"duplicate product entry {entry['left']}*{entry['right']}")
        prods[key] = _parse_combination(entry.get("result"), index, "product")
    diff = {}
    for entry in data.get("differential", []):
        try:
            key = index[entry["on"]]
        except (KeyError, TypeError) as exc:
            raise ModelError(f"bad differential entry {entry!r}") from exc
        diff[key] = _parse_combination(entry.get("result"), index, "differential")
    hom = []
    for entry in data.get("homotopy", []) or []:
        try:
            tree = parse_tree(entry["tree"])
            inputs = list(entry["inputs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"bad homotopy entry {entry!r}") from exc
        hom.append((format_tree(tree), inputs, _parse_combination(entry.get("result"), index, "homotopy")))
    return AlgebraModel(str(data["name"]), basis, prods, diff, hom)


def load_json(path) -> AlgebraModel:
    """Load and validate a model file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path} is not valid JSON: {exc}") from exc
    model = model_from_dict(data)
    problems = validate(model)
    if problems:
        first = problems[0]
        raise ModelError(f"model {model.name} fails {first['axiom']} at {first['tuple']}")
    return model


def _combination_json(model: AlgebraModel, elem: Mapping[int, Fraction]) -> List[dict]:
    return [{"basis": model.ids[k], "coeff": format_rational(v)} for k, v in sorted(elem.items())]


def model_to_dict(model: AlgebraModel) -> dict:
    """JSON form; each unordered product pair is written once."""
    prods = []
    for (i, j), res in sorted(model.products.items()):
        if i > j and (j, i) in model.products:
            continue
        prods.append({"left": model.ids[i], "right": model.ids[j], "result": _combination_json(model, res)})
    out = {
        "name": model.name,
        "basis": [{"id": bid, "degree": deg} for bid, deg in zip(model.ids, model.degrees)],
        "products": prods,
        "differential": [{"on": model.ids[i], "result": _combination_json(model, res)}
                         for i, res in sorted(model.differential.items())],
    }
    if model.homotopy_entries:
        out["homotopy"] = [{"tree": t, "inputs": list(inp), "result": _combination_json(model, res)}
                           for t, inp, res in model.homotopy_entries]
    return out


def format_element(model: AlgebraModel, elem: Mapping[int, Fraction]) -> str:
    if not elem:
        return "0"
    parts = []
    for k, v in sorted(elem.items()):
        c = format_rational(v)
        parts.append(model.ids[k] if v == 1 else f"{c}*{model.ids[k]}")
    return " + ".join(parts)


def swap_map(a: AlgebraModel, b: AlgebraModel) -> Dict[str, Tuple[str, int]]:
    """Basis map tensor(a,b) -> tensor(b,a): x⊗y goes to (-1)^{|x||y|} y⊗x."""
    out = {}
    for i, (left, right) in enumerate(
            [(x, "1") for x in a.ids] + [("1", y) for y in b.ids] + [(x, y) for x in a.ids for y in b.ids]):
        px = a.parities[a.index[left]] if left != "1" else 0
        py = b.parities[b.index[right]] if right != "1" else 0
        out[f"{left}⊗{right}"] = (f"{right}⊗{left}", -1 if px & py else 1)
    return out
