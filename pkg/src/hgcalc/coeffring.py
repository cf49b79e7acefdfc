"""Exact rationals, graded-commutative parameter rings and sparse linear algebra over Q.

Rationals are :class:`fractions.Fraction`.  Ring degrees are cohomological; a
ring element ``r`` of degree ``k`` paired with a graph of homological degree
``k`` gives a total-degree-0 element.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]


def parse_rational(value) -> Fraction:
    """Read ``"p/q"``, ``"p"``, an int or a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational")
        return Fraction(text)
    raise ValueError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# parameter rings


class CoefficientRing:
    """Finitely generated graded-commutative Q-algebra.

    ``generators`` is a sequence of ``(name, degree)``; generators are stored in
    lexicographic order of their names.  Odd generators square to zero; an
    even generator may be declared nilpotent through ``nilpotency`` (maximum
    exponent kept).  ``differential`` maps a generator name to a list of
    ``(coeff, {name: exponent})`` terms and is extended as a derivation.
    Monomials whose total exponent exceeds ``truncation`` are dropped.
    """

    def __init__(
        self,
        generators: Sequence[Tuple[str, int]] = (),
        truncation: int = 8,
        nilpotency: Optional[Mapping[str, int]] = None,
        differential: Optional[Mapping[str, Sequence[Tuple[object, Mapping[str, int]]]]] = None,
    ):
        gens = sorted((str(name), int(deg)) for name, deg in generators)
        names = [g[0] for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        self.names: Tuple[str, ...] = tuple(names)
        self.degrees: Tuple[int, ...] = tuple(g[1] for g in gens)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.truncation = int(truncation)
        caps = []
        nilpotency = dict(nilpotency or {})
        for name, deg in gens:
            if deg % 2:
                caps.append(1)
            elif name in nilpotency:
                caps.append(int(nilpotency[name]))
            else:
                caps.append(None)
        unknown = set(nilpotency) - set(self.names)
        if unknown:
            raise ValueError(f"nilpotency for unknown generators {sorted(unknown)}")
        self.caps: Tuple[Optional[int], ...] = tuple(caps)
        self._odd = tuple(i for i, d in enumerate(self.degrees) if d % 2)
        self._diff: Dict[int, Dict[Monomial, Fraction]] = {}
        for name, terms in (differential or {}).items():
            if name not in self.index:
                raise ValueError(f"differential of unknown generator {name!r}")
            image: Dict[Monomial, Fraction] = {}
            for coeff, mono in terms:
                key = self.monomial(mono)
                image[key] = image.get(key, Fraction(0)) + parse_rational(coeff)
            want = self.degrees[self.index[name]] + 1
            for key in image:
                if self.monomial_degree(key) != want:
                    raise ValueError(f"differential of {name} is not of degree {want}")
            self._diff[self.index[name]] = {k: v for k, v in image.items() if v}
        self.one_monomial: Monomial = (0,) * len(self.names)

    # identity is structural so rings built twice compare equal
    def _key(self):
        return (self.names, self.degrees, self.caps, self.truncation,
                tuple(sorted((i, tuple(sorted(t.items()))) for i, t in self._diff.items())))

    def __eq__(self, other):
        return isinstance(other, CoefficientRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"CoefficientRing({gens})"

    # monomials ----------------------------------------------------------------
    def monomial(self, exps: Mapping[str, int]) -> Monomial:
        out = [0] * len(self.names)
        for name, e in exps.items():
            if name not in self.index:
                raise ValueError(f"unknown generator {name!r}")
            out[self.index[name]] += int(e)
        return tuple(out)

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def monomial_parity(self, mono: Monomial) -> int:
        return sum(mono[i] for i in self._odd) & 1

    def _admissible(self, mono: Monomial) -> bool:
        if sum(mono) > self.truncation:
            return False
        for e, cap in zip(mono, self.caps):
            if cap is not None and e > cap:
                return False
        return True

    def multiply_monomials(self, a: Monomial, b: Monomial) -> Tuple[int, Optional[Monomial]]:
        """Return ``(sign, a*b)``; the monomial is None when the product vanishes."""
        prod = tuple(x + y for x, y in zip(a, b))
        if not self._admissible(prod):
            return 0, None
        # moving each odd factor of b left past the odd factors of a with larger index
        swaps = 0
        odd = self._odd
        for j in odd:
            if b[j]:
                for i in odd:
                    if i > j and a[i]:
                        swaps += 1
        return (-1 if swaps & 1 else 1), prod

    def monomial_names(self, mono: Monomial) -> Tuple[str, ...]:
        out: List[str] = []
        for name, e in zip(self.names, mono):
            out.extend([name] * e)
        return tuple(out)

    # elements -----------------------------------------------------------------
    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return RingElement(self, {self.one_monomial: Fraction(1)})

    def scalar(self, q) -> "RingElement":
        q = parse_rational(q)
        return RingElement(self, {self.one_monomial: q} if q else {})

    def gen(self, name: str) -> "RingElement":
        mono = self.monomial({name: 1})
        if not self._admissible(mono):
            return self.zero()
        return RingElement(self, {mono: Fraction(1)})

    def element(self, terms: Mapping[Monomial, object]) -> "RingElement":
        out = {}
        for mono, c in terms.items():
            c = parse_rational(c)
            if c and self._admissible(tuple(mono)):
                out[tuple(mono)] = out.get(tuple(mono), Fraction(0)) + c
        return RingElement(self, {k: v for k, v in out.items() if v})

    def monomial_derivative(self, mono: Monomial) -> Dict[Monomial, Fraction]:
        """d applied to a monomial, extended as a graded derivation."""
        out: Dict[Monomial, Fraction] = {}
        prefix_parity = 0
        for i, e in enumerate(mono):
            if not e:
                continue
            image = self._diff.get(i)
            if image:
                # d(x^e) = e x^(e-1) dx for even x; sign from factors before x
                before = tuple(mono[j] if j < i else 0 for j in range(len(mono)))
                rest_here = list(mono)
                for j in range(len(mono)):
                    if j <= i:
                        rest_here[j] = 0
                power = e - 1
                mult = e if self.degrees[i] % 2 == 0 else 1
                sign = -1 if prefix_parity else 1
                for img_mono, coeff in image.items():
                    # before * x^(e-1) * img * after
                    left = list(before)
                    left[i] = power
                    s1, m1 = self.multiply_monomials(tuple(left), img_mono)
                    if m1 is None:
                        continue
                    s2, m2 = self.multiply_monomials(m1, tuple(rest_here))
                    if m2 is None:
                        continue
                    c = coeff * mult * sign * s1 * s2
                    out[m2] = out.get(m2, Fraction(0)) + c
            if self.degrees[i] % 2:
                prefix_parity ^= e & 1
        return {k: v for k, v in out.items() if v}


class RingElement:
    """Immutable element of a :class:`CoefficientRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CoefficientRing, terms: Mapping[Monomial, Fraction]):
        self.ring = ring
        self.terms: Dict[Monomial, Fraction] = dict(terms)

    def _check(self, other: "RingElement"):
        if not isinstance(other, RingElement) or other.ring != self.ring:
            raise ValueError("ring elements over different rings")

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            self._check(other)
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return RingElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RingElement):
            q = parse_rational(other)
            if not q:
                return self.ring.zero()
            return RingElement(self.ring, {k: v * q for k, v in self.terms.items()})
        return ring_multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, RingElement):
            return ring_multiply(other, self)
        return self * other

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {self.ring.monomial_degree(m) for m in self.terms}

    def degree(self) -> Optional[int]:
        """Homogeneous degree, or None if mixed (0 for the zero element)."""
        degs = self.degrees()
        if not degs:
            return 0
        return degs.pop() if len(degs) == 1 else None

    def parity(self) -> Optional[int]:
        pars = {self.ring.monomial_parity(m) for m in self.terms}
        if not pars:
            return 0
        return pars.pop() if len(pars) == 1 else None

    def constant(self) -> Fraction:
        return self.terms.get(self.ring.one_monomial, Fraction(0))

    def d(self) -> "RingElement":
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            for m2, c2 in self.ring.monomial_derivative(mono).items():
                out[m2] = out.get(m2, Fraction(0)) + c * c2
        return RingElement(self.ring, {k: v for k, v in out.items() if v})

    def substitute(self, values: Mapping[str, object]) -> "RingElement":
        """Set the named generators to rational values (odd ones only to 0)."""
        idx = {self.ring.index[n]: parse_rational(v) for n, v in values.items()}
        for i, v in idx.items():
            if self.ring.degrees[i] % 2 and v:
                raise ValueError("odd generators can only be set to 0")
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            coeff = c
            new = list(mono)
            for i, v in idx.items():
                if mono[i]:
                    coeff *= v ** mono[i]
                    new[i] = 0
            if coeff:
                key = tuple(new)
                out[key] = out.get(key, Fraction(0)) + coeff
        return RingElement(self.ring, {k: v for k, v in out.items() if v})

    def coefficient(self, names: Mapping[str, int]) -> Fraction:
        return self.terms.get(self.ring.monomial(names), Fraction(0))

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        ring = self.ring
        return sorted(self.terms.items(),
                      key=lambda kv: (sum(kv[0]), ring.monomial_names(kv[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            names = self.ring.monomial_names(mono)
            body = "*".join(names)
            if not body:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{format_rational(c)}*{body}")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    __repr__ = __str__


def ring_multiply(a: RingElement, b: RingElement) -> RingElement:
    """Graded-commutative product with Koszul signs and truncation."""
    a._check(b)
    ring = a.ring
    out: Dict[Monomial, Fraction] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign, mono = ring.multiply_monomials(ma, mb)
            if mono is None:
                continue
            out[mono] = out.get(mono, Fraction(0)) + sign * ca * cb
    return RingElement(ring, {k: v for k, v in out.items() if v})


RATIONALS = CoefficientRing(())


def polynomial_ring(names: Sequence[str], truncation: int = 8) -> CoefficientRing:
    """Q[λ1,...] with even degree-0 parameters."""
    return CoefficientRing([(n, 0) for n in names], truncation=truncation)


def interval_ring(truncation: int = 8) -> CoefficientRing:
    """Polynomial forms on the interval: t in degree 0, dt in degree 1, d(t) = dt."""
    return CoefficientRing([("t", 0), ("dt", 1)], truncation=truncation,
                           differential={"t": [(1, {"dt": 1})]})


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Rational matrix stored as ``{(row, col): value}`` without zero entries.

    Matrices act on column vectors: a map C -> D has ``cols = dim C``.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[Tuple[int, int], object]] = None):
        self.rows = int(rows)
        self.cols = int(cols)
        clean: Dict[Tuple[int, int], Fraction] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
            v = parse_rational(v)
            if v:
                clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[object]]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            for j, v in enumerate(row):
                ent[(i, j)] = v
        return cls(nrows, ncols, ent)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                ent[(i, j)] = v
        return cls(rows, len(columns), ent)

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def column_dicts(self) -> List[Dict[int, Fraction]]:
        cols: List[Dict[int, Fraction]] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def apply(self, vector: Sequence[object]) -> List[Fraction]:
        if len(vector) != self.cols:
            raise ValueError("dimension mismatch")
        out = [Fraction(0)] * self.rows
        for (r, c), v in self.entries.items():
            x = vector[c]
            if x:
                out[r] += v * x
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: Dict[Tuple[int, int], Fraction] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                key = (r, c)
                out[key] = out.get(key, Fraction(0)) + v * w
        return SparseMatrix(self.rows, other.cols, out)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_row(row: Mapping[int, Fraction]) -> Dict[int, int]:
    """Scale a rational row to a primitive integer row."""
    den = 1
    for v in row.values():
        den = den * v.denominator // gcd(den, v.denominator)
    ints = {c: int(v * den) for c, v in row.items() if v}
    return _primitive(ints)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    if row:
        lead = min(row)
        if row[lead] < 0:
            row = {c: -v for c, v in row.items()}
    return row


def _bitsize(row: Mapping[int, int]) -> int:
    return sum(abs(v).bit_length() for v in row.values())


def echelon_rows(rows: Iterable[Mapping[int, Fraction]]) -> List[Dict[int, int]]:
    """Fraction-free row echelon form of the given rows.

    Columns are processed in increasing order; among the rows whose leading
    column is the current one, the row of smallest bit-size is the pivot.
    Rows are kept primitive (content divided out) to control growth.
    """
    buckets: Dict[int, List[Dict[int, int]]] = {}
    for row in rows:
        r = _integer_row(row)
        if r:
            buckets.setdefault(min(r), []).append(r)
    pivots: List[Dict[int, int]] = []
    while buckets:
        col = min(buckets)
        group = buckets.pop(col)
        group.sort(key=lambda r: (_bitsize(r), sorted(r.items())))
        pivot = group[0]
        pivots.append(pivot)
        p = pivot[col]
        for r in group[1:]:
            a = r[col]
            g = gcd(p, a)
            mp, ma = p // g, a // g
            new: Dict[int, int] = {}
            for c, v in r.items():
                new[c] = v * mp
            for c, v in pivot.items():
                x = new.get(c, 0) - ma * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            new = _primitive(new)
            if new:
                buckets.setdefault(min(new), []).append(new)
    return pivots


def rank(M: SparseMatrix) -> int:
    """Exact rank over Q."""
    if not M.entries:
        return 0
    return len(echelon_rows(M.row_dicts()))


def rref_rows(rows: Iterable[Mapping[int, Fraction]]) -> List[Tuple[int, Dict[int, Fraction]]]:
    """Reduced row echelon form as ``[(pivot column, row with pivot 1)]``."""
    ech = echelon_rows(rows)
    reduced: List[Tuple[int, Dict[int, Fraction]]] = []
    for r in ech:
        col = min(r)
        p = r[col]
        reduced.append((col, {c: Fraction(v, p) for c, v in r.items()}))
    # back substitution, last pivot first
    for i in range(len(reduced) - 1, -1, -1):
        col_i, row_i = reduced[i]
        for j in range(i):
            col_j, row_j = reduced[j]
            f = row_j.get(col_i)
            if f:
                for c, v in row_i.items():
                    x = row_j.get(c, Fraction(0)) - f * v
                    if x:
                        row_j[c] = x
                    else:
                        row_j.pop(c, None)
    return reduced


def kernel_basis(M: SparseMatrix) -> List[List[Fraction]]:
    """Basis of the right kernel ``{v : M v = 0}``."""
    reduced = rref_rows(M.row_dicts())
    pivot_cols = {c for c, _ in reduced}
    basis = []
    for free in range(M.cols):
        if free in pivot_cols:
            continue
        v = [Fraction(0)] * M.cols
        v[free] = Fraction(1)
        for col, row in reduced:
            x = row.get(free)
            if x:
                v[col] = -x
        basis.append(v)
    return basis


def solve(M: SparseMatrix, b: Sequence[object]) -> Optional[List[Fraction]]:
    """One solution of ``M x = b`` or None if inconsistent."""
    if len(b) != M.rows:
        raise ValueError("dimension mismatch")
    rows = M.row_dicts()
    aug = M.cols
    for i, v in enumerate(b):
        v = parse_rational(v)
        if v:
            rows[i][aug] = v
    reduced = rref_rows(rows)
    x = [Fraction(0)] * M.cols
    for col, row in reduced:
        if col == aug:
            return None
        x[col] = row.get(aug, Fraction(0))
    return x


def homology_rank(d_in: SparseMatrix, d_out: SparseMatrix) -> int:
    """``dim ker(d_out) - rank(d_in)`` for ``C' --d_in--> C --d_out--> C''``."""
    if d_in.rows != d_out.cols:
        raise ValueError("composable dimensions required")
    if not (d_out @ d_in).is_zero():
        raise ValueError("d_out . d_in is nonzero; sign convention error upstream")
    return d_out.cols - rank(d_out) - rank(d_in)


def span_rank(vectors: Iterable[Mapping[int, Fraction]]) -> int:
    return len(echelon_rows(vectors))
