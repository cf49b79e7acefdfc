import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hgcalc import build_builtin
from hgcalc.coeffring import interval_ring, polynomial_ring
from hgcalc.dgca import AlgebraModel
from hgcalc.hairygraph import corolla, h_graph, segment, tripod
from hgcalc.hgcomplex import GraphComplex, GraphVector, curvature, d_a_terms, differential, enumerate_basis
from hgcalc.mcgauge import (ObstructionSystem, classify_system, degree_zero_tree_basis, exact_k_max, gauge_path,
                            gauge_path_check, gauge_search, mc_candidate, mc_obstruction_system, utt_h0,
                            utt_project, verify_mc)

W = "w1w2"


def test_degree_zero_bases(complex_of):
    cx = complex_of("s1xs2", 6)
    basis = degree_zero_tree_basis(cx.model, 6, cx)
    assert set(basis) == {cx.canonical(segment("b", "ab"))[0], cx.canonical(tripod("ab", "ab", "ab"))[0]}
    assert [cx.edges(k) for k in basis] == [1, 3]
    cx = complex_of("s2xs2", 7)
    basis = degree_zero_tree_basis(cx.model, 7, cx)
    assert basis == sorted(basis, key=lambda k: (cx.edges(k), k))
    assert basis[2] == cx.canonical(h_graph(W, W, W, W))[0]
    assert degree_zero_tree_basis(build_builtin("wedge:1,1"), 6) == []
    with pytest.raises(ValueError):
        degree_zero_tree_basis(build_builtin("sphere:3"), 5)


def test_obstruction_systems(complex_of):
    cx = complex_of("s2xs2", 7)
    basis = degree_zero_tree_basis(cx.model, 7, cx)
    c, ring, names = mc_candidate(cx, basis)
    system = mc_obstruction_system(c)
    T = cx.canonical(tripod(W, W, W))[0]
    lam = ring.gen(names[0]) * ring.gen(names[1])
    assert list(system.equations) == [T]
    assert system.equations[T] in (lam, -lam)
    assert system.to_json()[0]["graph"] == T
    kind = classify_system(system)
    assert kind["kind"] == "monomial"
    assert sorted(kind["branches"]) == [[names[0]], [names[1]]]
    for spec, n in [("sphere:3", 6), ("sphere:3", 7), ("s1xs2", 6), ("disjoint:2,2", 5)]:
        cx = complex_of(spec, n)
        c, _, _ = mc_candidate(cx, degree_zero_tree_basis(cx.model, n, cx))
        assert len(mc_obstruction_system(c)) == 0


def test_exact_arity_is_enough(complex_of):
    # higher brackets than exact_k_max add nothing to the curvature
    rng = random.Random(3)
    for spec, n in [("s2xs2", 7), ("s1xs2", 6), ("s2xs2", 9)]:
        cx = complex_of(spec, n)
        basis = degree_zero_tree_basis(cx.model, n, cx)
        k = exact_k_max(cx.model, n)
        for _ in range(5):
            x = GraphVector.from_rational(cx, {b: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for b in basis})
            assert curvature(x, k_max=k) == curvature(x, k_max=k + 2)


def _system(names, polys):
    ring = polynomial_ring(names)
    cx = GraphComplex(build_builtin("sphere:3"), 7)
    eqs = {f"g{i}": p(ring) for i, p in enumerate(polys)}
    return ObstructionSystem(cx, [], ring, names, eqs)


def test_classify_kinds():
    assert classify_system(_system(["x"], []))["kind"] == "free"
    assert classify_system(_system(["x"], [lambda r: r.one() * 2]))["kind"] == "empty"
    lin = classify_system(_system(["x", "y", "z"], [lambda r: r.gen("x") + r.gen("y"), lambda r: r.gen("z")]))
    assert lin["kind"] == "linear" and len(lin["kernel"]) == 1
    mono = classify_system(_system(["x", "y", "z"], [lambda r: r.gen("x") * r.gen("y"),
                                                     lambda r: r.gen("y") * r.gen("z")]))
    assert sorted(mono["branches"]) == [["x", "z"], ["y"]]
    other = classify_system(_system(["x", "y"], [lambda r: r.gen("x") * r.gen("y") + r.gen("x")]))
    assert other["kind"] == "unsupported"


def test_verify_mc(complex_of):
    cx = complex_of("s2xs2", 7)
    L1, L2 = cx.vector({segment("w1", W): 1}), cx.vector({segment("w2", W): 1})
    assert verify_mc(L1) and verify_mc(L2)
    assert not verify_mc(L1 + L2)
    assert verify_mc(GraphVector(cx, {}))
    cx = complex_of("s1xs2", 6)
    assert verify_mc(cx.vector({segment("b", "ab"): Fraction(-2, 3), tripod("ab", "ab", "ab"): 5}))
    with pytest.raises(ValueError):
        verify_mc(cx.vector({segment("a", "ab"): 1}))
    with pytest.raises(ValueError):
        verify_mc(GraphComplex(build_builtin("sphere:3"), 5).vector({tripod("w", "w", "w"): 1}))


def test_gauge_paths(complex_of):
    cx = complex_of("s1xs2", 6)
    Lb = segment("b", "ab")
    ok, m0, m1 = gauge_path_check(gauge_path(cx, {Lb: "1"}))
    assert ok and m0 == m1 == cx.vector({Lb: 1})
    # moving along the tripod without a dt correction is not Maurer-Cartan
    ok, _, _ = gauge_path_check(gauge_path(cx, {Lb: "1", tripod("ab", "ab", "ab"): "t"}))
    assert not ok
    ring = interval_ring()
    p = gauge_path(cx, {Lb: ring.one() * 2}, ring)
    assert gauge_path_check(p)[0]


def test_gauge_search(complex_of):
    cx = complex_of("s1xs2", 6)
    m0 = cx.vector({segment("b", "ab"): 1})
    m1 = cx.vector({segment("b", "ab"): 1, tripod("ab", "ab", "ab"): 1})
    path = gauge_search(m0, m1)
    assert path is not None
    ok, e0, e1 = gauge_path_check(path)
    assert ok and e0 == m0 and e1 == m1
    cx = complex_of("s2xs2", 7)
    L1, L2 = cx.vector({segment("w1", W): 1}), cx.vector({segment("w2", W): 1})
    # the straight line from L1 to L2 passes through non-MC points
    assert gauge_search(L1, L2) is None


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(bool),
       st.fractions(min_value=-3, max_value=3, max_denominator=3))
def test_gauge_equivalent_endpoints_are_mc(a, b):
    cx = GraphComplex(build_builtin("s1xs2"), 6)
    Lb, T = segment("b", "ab"), tripod("ab", "ab", "ab")
    m0 = cx.vector({Lb: a})
    m1 = cx.vector({Lb: a, T: b})
    path = gauge_search(m0, m1)
    assert path is not None
    ok, e0, e1 = gauge_path_check(path)
    assert ok and verify_mc(e0) and verify_mc(e1)


def test_utt_examples(complex_of):
    cx = complex_of("s2xs2", 7)
    assert utt_project(cx.vector({h_graph(W, W, W, W): 1})).is_zero()
    assert not utt_project(cx.vector({tripod(W, W, W): 1})).is_zero()
    # four-valent vertices and loops die
    assert utt_project(cx.vector({corolla(W, W, W, W): 1})).is_zero()
    assert utt_project(GraphVector(cx, {})).is_zero()
    with pytest.raises(ValueError):
        utt_project(cx.vector({tripod(W, W, W): 1, segment("w1", W): 1}))
    with pytest.raises(ValueError):
        utt_project(GraphComplex(build_builtin("sphere:3"), 5).vector({tripod("w", "w", "w"): 1}))


def test_utt_h0_values():
    assert utt_h0(build_builtin("s2xs2"), 7)["rank"] == 2
    assert utt_h0(build_builtin("s2xs2"), 7)["ihxRelations"] == 1
    assert utt_h0(build_builtin("s1xs2"), 6)["rank"] == 2
    assert utt_h0(build_builtin("sphere:3"), 7)["rank"] == 1
    assert utt_h0(build_builtin("wedge:1,1"), 6)["rank"] == 0


@pytest.mark.parametrize("model,n", [
    (AlgebraModel("dx", [("x", 2), ("y", 3)], differential={0: {1: 1}}), 6),
    (build_builtin("s2xs2"), 7),
    (build_builtin("s1xs2"), 6),
])
def test_projection_intertwines_differentials(model, n):
    # on unitrivalent trees delta only acts through d_A, up to terms UTT forgets
    cx = GraphComplex(model, n)
    w = enumerate_basis(model, n, (-1, 1), complex_=cx)
    for k in w.basis[0] + w.basis[1]:
        g = cx.graph(k)
        if not (g.is_tree and g.is_unitrivalent):
            continue
        v = cx.basis_vector(k)
        via_da = GraphVector.from_rational(cx, cx._collect(d_a_terms(cx.raw(k), n, model)))
        assert utt_project(differential(v)).coords == utt_project(via_da).coords
