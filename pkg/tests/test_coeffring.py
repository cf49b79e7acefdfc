from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from hgcalc.coeffring import (CoefficientRing, SparseMatrix, format_rational, homology_rank, interval_ring,
                              kernel_basis, parse_rational, polynomial_ring, rank, ring_multiply, solve)
from oracles import dense_rank

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def test_parse_and_format():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(-4) == -4
    assert format_rational(Fraction(-2, 4)) == "-1/2"
    assert format_rational(Fraction(6, 3)) == "2"
    with pytest.raises(ValueError):
        parse_rational("")
    with pytest.raises(ValueError):
        parse_rational(1.5)


def test_odd_square_vanishes():
    ring = CoefficientRing([("e1", 1), ("e2", -1)])
    e1 = ring.gen("e1")
    assert (e1 * e1).is_zero()


def test_interval_ring_products():
    ring = interval_ring()
    t, dt = ring.gen("t"), ring.gen("dt")
    assert ring_multiply(t, dt) == ring_multiply(dt, t)
    assert str(ring_multiply(t, dt)) in ("t*dt", "dt*t")
    assert (dt * dt).is_zero()
    assert t.d() == dt
    assert (t * t).d() == t * dt * 2


def test_rational_parameters():
    ring = polynomial_ring(["l1", "l2"])
    a = ring.gen("l1") * Fraction(2, 3)
    b = ring.gen("l2") * Fraction(3, 4)
    assert a * b == ring.gen("l1") * ring.gen("l2") * Fraction(1, 2)


def test_mismatched_rings():
    a = polynomial_ring(["x"]).gen("x")
    b = polynomial_ring(["y"]).gen("y")
    with pytest.raises(ValueError):
        ring_multiply(a, b)


def test_truncation_drops_high_monomials():
    ring = polynomial_ring(["x"], truncation=3)
    x = ring.gen("x")
    assert (x * x * x).degrees() == {0}
    assert (x * x * x * x).is_zero()


def _all_monomials(ring, top=3):
    out = []
    for exps in product(range(top + 1), repeat=len(ring.names)):
        mono = ring.monomial(dict(zip(ring.names, exps)))
        if ring._admissible(mono):
            out.append(ring.element({mono: 1}))
    return out


@pytest.mark.parametrize("gens", [
    [("a", 1), ("b", 1), ("c", 2), ("d", 3)],
    [("x", 0), ("y", -1), ("z", 2), ("w", -3)],
])
def test_ring_axioms_exhaustive(gens):
    ring = CoefficientRing(gens, truncation=4)
    monos = _all_monomials(ring, top=2)
    for a in monos:
        for b in monos:
            ab, ba = a * b, b * a
            da, db = ring.monomial_parity(*a.terms), ring.monomial_parity(*b.terms)
            assert ab == (ba * (-1 if da * db else 1))
    for a in monos[:12]:
        for b in monos[:12]:
            for c in monos[:12]:
                assert (a * b) * c == a * (b * c)


def test_leibniz_rule():
    ring = CoefficientRing([("t", 0), ("dt", 1), ("u", 2), ("du", 3)], truncation=6,
                           differential={"t": [(1, {"dt": 1})], "u": [(1, {"du": 1})]})
    gens = [ring.gen(x) for x in ("t", "dt", "u", "du")]
    elems = gens + [gens[0] * gens[2], gens[1] * gens[2], gens[1] * gens[3] + gens[2] * 2]
    for a in elems:
        assert a.d().d().is_zero()
        for b in elems:
            sign = -1 if (a.parity() or 0) else 1
            assert (a * b).d() == a.d() * b + a * b.d() * sign


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(rationals, min_size=6, max_size=6), min_size=6, max_size=6))
def test_rank_matches_dense_oracle(rows):
    M = SparseMatrix.from_dense(rows)
    assert rank(M) == dense_rank(rows)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(rationals, min_size=8, max_size=8), min_size=5, max_size=5))
def test_kernel_basis(rows):
    M = SparseMatrix.from_dense(rows)
    ker = kernel_basis(M)
    for v in ker:
        assert all(x == 0 for x in M.apply(v))
    assert len(ker) == M.cols - rank(M)
    assert dense_rank(ker) == len(ker) if ker else True


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_rank_nullity(r, c, data):
    rows = data.draw(st.lists(st.lists(st.sampled_from([0, 0, 0, 1, -1, 2, Fraction(1, 3)]),
                                       min_size=c, max_size=c), min_size=r, max_size=r))
    M = SparseMatrix.from_dense(rows)
    assert rank(M) + len(kernel_basis(M)) == c
    assert rank(M) == rank(M.transpose())


def test_small_examples():
    assert rank(SparseMatrix(3, 3)) == 0
    assert rank(SparseMatrix.identity(4)) == 4
    assert kernel_basis(SparseMatrix.identity(3)) == []
    ker = kernel_basis(SparseMatrix.from_dense([[1, 1]]))
    assert len(ker) == 1 and ker[0][0] == -ker[0][1] != 0


def test_solve():
    M = SparseMatrix.from_dense([[1, 2], [3, 4]])
    assert solve(M, [5, 6]) == [Fraction(-4), Fraction(9, 2)]
    assert solve(SparseMatrix.from_dense([[1, 1], [1, 1]]), [1, 2]) is None


def test_homology_rank():
    zero = SparseMatrix(3, 3)
    assert homology_rank(zero, zero) == 3
    assert homology_rank(SparseMatrix(3, 3), SparseMatrix.identity(3)) == 0
    # Q --1--> Q --0--> Q: the middle homology vanishes
    assert homology_rank(SparseMatrix.from_dense([[1]]), SparseMatrix.from_dense([[0]])) == 0
    with pytest.raises(ValueError):
        homology_rank(SparseMatrix.identity(2), SparseMatrix.identity(2))
