"""Exact rational linear algebra and univariate polynomial utilities.

Scalars are `fractions.Fraction` (aliased Rat): always reduced, denominator
positive. Matrices are immutable row-major tuples of Fractions; elimination
(det / rank / kernel) runs fraction-free (Bareiss) on integer-scaled rows so
intermediate entries stay minors of the input instead of blowing up.
Polynomials are ascending coefficient tuples over Fractions.

Real-root counting is by Sturm chains with exact rational arithmetic.
Irreducibility over Q is certified, not factored: rational-root test plus
factor-degree patterns of reductions modulo small primes. `Inconclusive` is a
legal verdict; no Zassenhaus/van Hoeij style factorization is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Rat = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/4' or '5', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    """Serialize p/q with the /q omitted when q == 1."""
    x = rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# matrices


class QMatrix:
    """Immutable matrix of Fractions, row-major."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rs = tuple(tuple(rat(x) for x in row) for row in rows)
        if not rs or not rs[0]:
            raise ValueError("empty matrix")
        w = len(rs[0])
        if any(len(r) != w for r in rs):
            raise ValueError("ragged rows")
        object.__setattr__(self, "rows", rs)

    def __setattr__(self, *a):
        raise AttributeError("QMatrix is immutable")

    # -- construction helpers

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "QMatrix":
        es = [rat(e) for e in entries]
        n = len(es)
        return cls([[es[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "QMatrix":
        cs = [list(c) for c in cols]
        return cls([[cs[j][i] for j in range(len(cs))] for i in range(len(cs[0]))])

    @classmethod
    def column(cls, entries: Sequence) -> "QMatrix":
        return cls([[e] for e in entries])

    # -- shape and access

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i + 1, self.ncols)
        )

    # -- arithmetic

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._shape_match(other)
        return QMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._shape_match(other)
        return QMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def __neg__(self) -> "QMatrix":
        return QMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            return self._matmul(other)
        return QMatrix([[a * rat(other) for a in r] for r in self.rows])

    def __rmul__(self, other):
        return QMatrix([[rat(other) * a for a in r] for r in self.rows])

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        return self._matmul(other)

    def _matmul(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        ocols = other.columns()
        return QMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in ocols] for r in self.rows]
        )

    def _shape_match(self, other: "QMatrix"):
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("shape mismatch")

    def transpose(self) -> "QMatrix":
        return QMatrix([self.col(j) for j in range(self.ncols)])

    def trace(self) -> Fraction:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        return sum((self.rows[i][i] for i in range(self.nrows)), _ZERO)

    def scale(self, c) -> "QMatrix":
        return self * c

    # -- elimination-backed queries (free functions do the work)

    def det(self) -> Fraction:
        return det(self)

    def rank(self) -> int:
        return rank(self)

    def inverse(self) -> "QMatrix":
        return inverse(self)

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector, as a tuple."""
        vs = [rat(x) for x in v]
        if len(vs) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, vs)) for r in self.rows)

    # -- equality, hashing, display

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(rat_str(x) for x in r) for r in self.rows)
        return f"QMatrix[{body}]"

    def to_lists(self) -> list:
        return [list(r) for r in self.rows]


def mat_to_json(M: QMatrix) -> list:
    return [[rat_str(x) for x in r] for r in M.rows]


def mat_from_json(rows) -> QMatrix:
    return QMatrix([[rat(x) for x in r] for r in rows])


def vec_to_json(v: Sequence) -> list:
    return [rat_str(rat(x)) for x in v]


def vec_from_json(entries) -> tuple:
    return tuple(rat(x) for x in entries)


# ---------------------------------------------------------------------------
# fraction-free elimination

def _int_rows(M: QMatrix) -> tuple[list[list[int]], list[int]]:
    """Scale each row to integers; return rows and the row scale factors."""
    out, scales = [], []
    for r in M.rows:
        l = 1
        for x in r:
            l = l * x.denominator // math.gcd(l, x.denominator)
        out.append([int(x * l) for x in r])
        scales.append(l)
    return out, scales


def det(M: QMatrix) -> Fraction:
    """Determinant via fraction-free Bareiss elimination."""
    if not M.is_square:
        raise ValueError("determinant of a non-square matrix")
    a, scales = _int_rows(M)
    n = len(a)
    sgn, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sgn = -sgn
                    break
            else:
                return _ZERO
        pkk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ri, rk = a[i], a[k]
            for j in range(k + 1, n):
                ri[j] = (pkk * ri[j] - aik * rk[j]) // prev
            ri[k] = 0
        prev = pkk
    d = Fraction(sgn * a[n - 1][n - 1])
    for s in scales:
        d /= s
    return d


def _echelon(a: list[list[int]]) -> list[int]:
    """In-place fraction-free row echelon; returns the pivot column list."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots: list[int] = []
    r, prev = 0, 1
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            a[r], a[pr] = a[pr], a[r]
        pc = a[r][c]
        for i in range(r + 1, nrows):
            aic = a[i][c]
            ri, rr = a[i], a[r]
            for j in range(c, ncols):
                ri[j] = (pc * ri[j] - aic * rr[j]) // prev
        pivots.append(c)
        prev = pc
        r += 1
    return pivots


def rank(M: QMatrix) -> int:
    a, _ = _int_rows(M)
    return len(_echelon(a))


def rref_rows(M: QMatrix) -> tuple[list[tuple], list[int]]:
    """Reduced row echelon form: (nonzero rows, pivot columns).

    Rows are normalized to leading coefficient 1 with pivot columns cleared,
    so the output is the canonical basis of the row space.
    """
    rows = [list(r) for r in M.rows]
    nrows, ncols = len(rows), M.ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pc = rows[r][c]
        rows[r] = [x / pc for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return [tuple(rows[i]) for i in range(len(pivots))], pivots


def _primitive_signed(v: Sequence[Fraction]) -> tuple:
    """Scale a rational vector to primitive integers, first nonzero positive."""
    l = 1
    for x in v:
        l = l * x.denominator // math.gcd(l, x.denominator)
    ints = [int(x * l) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


def kernel_basis(M: QMatrix) -> list[tuple]:
    """Canonical basis of the right kernel.

    Vectors are primitive integer tuples (first nonzero entry positive),
    ordered by their free-column index in the echelon form.
    """
    a, _ = _int_rows(M)
    pivots = _echelon(a)
    ncols = M.ncols
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [_ZERO] * ncols
        v[f] = _ONE
        # back-substitute the pivot coordinates, bottom row first
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            s = sum((Fraction(a[r][j]) * v[j] for j in range(c + 1, ncols)), _ZERO)
            v[c] = -s / a[r][c]
        basis.append(_primitive_signed(v))
    return basis


def solve_unique(M: QMatrix, b: Sequence) -> tuple:
    """Solve M x = b, requiring a unique solution."""
    bs = [rat(x) for x in b]
    if len(bs) != M.nrows:
        raise ValueError("right-hand side length mismatch")
    aug = QMatrix([list(r) + [bs[i]] for i, r in enumerate(M.rows)])
    a, _ = _int_rows(aug)
    pivots = _echelon(a)
    ncols = M.ncols
    if ncols in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) != ncols:
        raise ValueError("linear system is underdetermined")
    x = [_ZERO] * ncols
    for r in range(ncols - 1, -1, -1):
        c = pivots[r]
        s = sum((Fraction(a[r][j]) * x[j] for j in range(c + 1, ncols)), _ZERO)
        x[c] = (Fraction(a[r][ncols]) - s) / a[r][c]
    return tuple(x)


def inverse(M: QMatrix) -> QMatrix:
    if not M.is_square:
        raise ValueError("inverse of a non-square matrix")
    n = M.nrows
    cols = []
    for j in range(n):
        e = [_ONE if i == j else _ZERO for i in range(n)]
        cols.append(solve_unique(M, e))
    return QMatrix.from_columns(cols)


def char_poly(M: QMatrix) -> "QPoly":
    """Monic characteristic polynomial det(t·I − M), by Faddeev–LeVerrier."""
    if not M.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = M.nrows
    I = QMatrix.identity(n)
    coeffs = [_ONE]  # c_0 = 1 for t^n
    A = M
    c = -A.trace()
    coeffs.append(c)
    for k in range(2, n + 1):
        A = M @ (A + c * I)
        c = -A.trace() / k
        coeffs.append(c)
    return QPoly(list(reversed(coeffs)))


# ---------------------------------------------------------------------------
# polynomials


class QPoly:
    """Univariate polynomial over Q, ascending coefficients, trailing zeros stripped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("QPoly is immutable")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, QPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.is_zero:
            return "QPoly[0]"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            t = "" if (k > 0 and abs(c) == 1) else rat_str(abs(c))
            if k > 1:
                t += f"t^{k}"
            elif k == 1:
                t += "t"
            elif not t:
                t = rat_str(abs(c))
            terms.append(("-" if c < 0 else "+", t))
        s = " ".join(f"{op} {t}" for op, t in terms)
        return "QPoly[" + (s[2:] if s.startswith("+ ") else s) + "]"

    def __add__(self, other: "QPoly") -> "QPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return QPoly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    def __sub__(self, other: "QPoly") -> "QPoly":
        return self + (-other)

    def __neg__(self) -> "QPoly":
        return QPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, QPoly):
            return QPoly([c * rat(other) for c in self.coeffs])
        if self.is_zero or other.is_zero:
            return QPoly([])
        out = [_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def divmod(self, other: "QPoly") -> tuple["QPoly", "QPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q = [_ZERO] * max(0, self.degree - other.degree + 1)
        r = list(self.coeffs)
        d, lead = other.degree, other.lead
        while len(r) - 1 >= d and any(c != 0 for c in r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < d:
                break
            k = len(r) - 1 - d
            f = r[-1] / lead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                r[k + i] -= f * c
            r.pop()
        return QPoly(q), QPoly(r)

    def __mod__(self, other: "QPoly") -> "QPoly":
        return self.divmod(other)[1]

    def derivative(self) -> "QPoly":
        return QPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "QPoly":
        if self.is_zero:
            return self
        l = self.lead
        return QPoly([c / l for c in self.coeffs])

    def eval(self, x) -> Fraction:
        x = rat(x)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_matrix(self, M: QMatrix) -> QMatrix:
        n = M.nrows
        acc = QMatrix([[0] * n for _ in range(n)])
        for c in reversed(self.coeffs):
            acc = acc @ M + c * QMatrix.identity(n)
        return acc

    def primitive_int(self) -> tuple[int, ...]:
        """Integer coefficients with content 1, leading coefficient positive."""
        if self.is_zero:
            raise ValueError("zero polynomial")
        l = 1
        for c in self.coeffs:
            l = l * c.denominator // math.gcd(l, c.denominator)
        ints = [int(c * l) for c in self.coeffs]
        g = 0
        for x in ints:
            g = math.gcd(g, abs(x))
        ints = [x // g for x in ints]
        if ints[-1] < 0:
            ints = [-x for x in ints]
        return tuple(ints)

    def to_json(self) -> list:
        return [rat_str(c) for c in self.coeffs]


def poly_gcd(a: QPoly, b: QPoly) -> QPoly:
    """Monic gcd by the Euclidean algorithm."""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic() if not a.is_zero else a


# ---------------------------------------------------------------------------
# Sturm chains


def _sturm_chain(p: QPoly) -> list[QPoly]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero and chain[-1].degree >= 1:
        chain.append(-(chain[-2] % chain[-1]))
    if chain[-1].is_zero:
        chain.pop()
    return chain


def _variations(signs: Iterable[int]) -> int:
    seq = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(seq, seq[1:]) if a != b)


def _sign_at_neg_inf(q: QPoly) -> int:
    return sign(q.lead) * (-1) ** (q.degree & 1)


def sturm_distinct_real_roots(p: QPoly) -> int:
    """Number of distinct real roots of p, counted over (−∞, ∞)."""
    if p.is_zero:
        raise ValueError("zero polynomial has no root count")
    if p.degree == 0:
        return 0
    chain = _sturm_chain(p)
    v_lo = _variations(_sign_at_neg_inf(q) for q in chain)
    v_hi = _variations(sign(q.lead) for q in chain)
    return v_lo - v_hi


def _roots_in(chain: list[QPoly], lo: Fraction, hi: Fraction) -> int:
    """Distinct roots in the half-open interval (lo, hi]."""
    v_lo = _variations(sign(q.eval(lo)) for q in chain)
    v_hi = _variations(sign(q.eval(hi)) for q in chain)
    return v_lo - v_hi


def cauchy_root_bound(p: QPoly) -> Fraction:
    """B with all real roots strictly inside (−B, B)."""
    if p.is_zero or p.degree == 0:
        return _ONE
    lead = abs(p.lead)
    return _ONE + max(abs(c) / lead for c in p.coeffs[:-1]) if p.degree else _ONE


def isolate_real_roots(p: QPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals (lo, hi], one distinct real root in each,
    ordered increasingly."""
    if p.is_zero:
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return []
    chain = _sturm_chain(p)
    B = cauchy_root_bound(p)
    out: list[tuple[Fraction, Fraction]] = []

    def split(lo: Fraction, hi: Fraction, count: int):
        if count == 0:
            return
        if count == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        # avoid landing on a root of any chain member at the cut point
        k = 3
        while p.eval(mid) == 0:
            mid += (hi - lo) / k
            k += 2
        left = _roots_in(chain, lo, mid)
        split(lo, mid, left)
        split(mid, hi, count - left)

    split(-B, B, _roots_in(chain, -B, B))
    out.sort(key=lambda iv: iv[0])
    return out


# ---------------------------------------------------------------------------
# rational roots and irreducibility certificates


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: QPoly) -> list[Fraction]:
    """All rational roots, each listed once, ascending."""
    ints = list(p.primitive_int())
    roots = set()
    while ints[0] == 0:
        roots.add(_ZERO)
        ints = ints[1:]
    if len(ints) > 1:
        a0, an = ints[0], ints[-1]
        for q in _divisors(an):
            for r in _divisors(a0):
                if math.gcd(r, q) != 1:
                    continue
                for cand in (Fraction(r, q), Fraction(-r, q)):
                    acc = _ZERO
                    for c in reversed(ints):
                        acc = acc * cand + c
                    if acc == 0:
                        roots.add(cand)
    return sorted(roots)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes() -> Iterable[int]:
    n = 2
    while True:
        if _is_prime(n):
            yield n
        n += 1


# GF(p)[t] helpers on ascending int-coefficient lists

def _gf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _gf_trim(out)


def _gf_mod(a, f, p):
    a = a[:]
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] * inv_lead % p
        k = len(a) - 1 - df
        for i, y in enumerate(f):
            a[k + i] = (a[k + i] - c * y) % p
        a.pop()
    return _gf_trim(a)


def _gf_gcd(a, b, p):
    a, b = _gf_trim(a[:]), _gf_trim(b[:])
    while b:
        a, b = b, _gf_mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def _gf_powmod(base, e, f, p):
    result = [1]
    base = _gf_mod(base[:], f, p)
    while e:
        if e & 1:
            result = _gf_mod(_gf_mul(result, base, p), f, p)
        base = _gf_mod(_gf_mul(base, base, p), f, p)
        e >>= 1
    return result


def _gf_deriv(a, p):
    return _gf_trim([k * c % p for k, c in enumerate(a)][1:])


def _gf_factor_degrees(f: list[int], p: int) -> Optional[tuple[int, ...]]:
    """Factor-degree multiset of a squarefree f over GF(p); None if not squarefree."""
    f = [c % p for c in f]
    f = _gf_trim(f)
    if len(f) - 1 < 1:
        return None
    g = _gf_gcd(f, _gf_deriv(f, p), p)
    if len(g) - 1 >= 1:
        return None
    inv = pow(f[-1], p - 2, p)
    f = [c * inv % p for c in f]
    degrees = []
    h = [0, 1]  # t
    rest = f
    d = 0
    while len(rest) - 1 >= 1:
        d += 1
        if 2 * d > len(rest) - 1:
            degrees.append(len(rest) - 1)
            break
        h = _gf_powmod(h, p, rest, p)
        diff = h[:] + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p  # h - t
        g = _gf_gcd(rest, _gf_trim(diff), p)
        deg_g = len(g) - 1
        if deg_g > 0:
            degrees.extend([d] * (deg_g // d))
            q, r = _gf_full_div(rest, g, p)
            assert not r
            rest = q
            h = _gf_mod(h, rest, p) if len(rest) - 1 >= 1 else h
    return tuple(sorted(degrees))


def _gf_full_div(a, b, p):
    a = a[:]
    q = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] * inv_lead % p
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] = (a[k + i] - c * y) % p
        a.pop()
    return _gf_trim(q), _gf_trim(a)


class IrredVerdict(Enum):
    IRREDUCIBLE = "Irreducible"
    REDUCIBLE = "Reducible"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class IrredCertificate:
    verdict: IrredVerdict
    witness: Union[int, Fraction, QPoly, None]
    patterns: tuple[tuple[int, tuple[int, ...]], ...]

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, QPoly):
            wj = {"factor": w.to_json()}
        elif isinstance(w, Fraction):
            wj = {"root": rat_str(w)}
        elif isinstance(w, int):
            wj = {"prime": w}
        else:
            wj = None
        return {
            "verdict": self.verdict.value,
            "witness": wj,
            "patterns": [[p, list(d)] for p, d in self.patterns],
        }


def _subset_sums(multiset: tuple[int, ...]) -> frozenset:
    sums = {0}
    for d in multiset:
        sums |= {s + d for s in sums}
    return frozenset(sums)


def _monic_factor_search(ints: tuple[int, ...], degrees: set[int]) -> Optional[QPoly]:
    """Trial division by monic integer quadratics; desk-scale confirmation only."""
    if ints[-1] != 1 or 2 not in degrees:
        return None
    p = QPoly(ints)
    height = 1 + sum(abs(c) for c in ints)
    for c0 in _divisors(ints[0]) or [1]:
        for c in (c0, -c0):
            for b in range(-height, height + 1):
                cand = QPoly([c, b, 1])
                q, r = p.divmod(cand)
                if r.is_zero and q.degree >= 1:
                    return cand
    return None


def irreducible_over_Q(p: QPoly, prime_budget: int = 25) -> IrredCertificate:
    """Certified irreducibility test over Q.

    Order of attack: squarefree check (a repeated factor is already a witness),
    rational-root scan, then factor-degree patterns of reductions modulo the
    first `prime_budget` usable primes (those dividing neither the leading
    coefficient nor the discriminant). Inconclusive is a legal outcome.
    """
    if p.is_zero or p.degree < 1:
        raise ValueError("irreducibility requires a nonconstant polynomial")
    ints = p.primitive_int()
    deg = len(ints) - 1
    pq = QPoly(ints)

    g = poly_gcd(pq, pq.derivative())
    if g.degree >= 1:
        return IrredCertificate(IrredVerdict.REDUCIBLE, QPoly(g.primitive_int()), ())

    roots = rational_roots(pq)
    if roots:
        if deg == 1:
            pass  # a linear polynomial is its own root witness and irreducible
        else:
            return IrredCertificate(IrredVerdict.REDUCIBLE, roots[0], ())

    patterns: list[tuple[int, tuple[int, ...]]] = []
    allowed = frozenset(range(deg + 1))
    used = 0
    examined = 0
    for q in primes():
        examined += 1
        if examined > 50 * prime_budget + 200:
            break
        if used >= prime_budget:
            break
        if ints[-1] % q == 0:
            continue
        degs = _gf_factor_degrees(list(ints), q)
        if degs is None:  # q divides the discriminant
            continue
        used += 1
        patterns.append((q, degs))
        if degs == (deg,):
            return IrredCertificate(IrredVerdict.IRREDUCIBLE, q, tuple(patterns))
        allowed &= _subset_sums(degs)
        if not (allowed & frozenset(range(1, deg))):
            return IrredCertificate(IrredVerdict.IRREDUCIBLE, None, tuple(patterns))

    if deg == 1:
        # budget exhausted without a usable prime; still certain
        return IrredCertificate(IrredVerdict.IRREDUCIBLE, None, tuple(patterns))
    if deg <= 3:
        # no rational root and degree <= 3: any factorization would be linear
        return IrredCertificate(IrredVerdict.IRREDUCIBLE, None, tuple(patterns))

    factor = _monic_factor_search(ints, set(allowed))
    if factor is not None:
        return IrredCertificate(IrredVerdict.REDUCIBLE, factor, tuple(patterns))
    return IrredCertificate(IrredVerdict.INCONCLUSIVE, None, tuple(patterns))
