"""Rational decomposition, congruence levels, and bounded same-sign runs.

The decomposition solver turns gamma = a b with a commuting with rho and
b commuting with tau into a linear problem: b = a^{-1} gamma commutes with
tau exactly when a tau = (gamma tau gamma^{-1}) a, so a lies in the kernel
of a stacked 2m^2 x m^2 system. The remaining nonlinearity is picking an
invertible kernel element; determinant restricted to the kernel span is a
polynomial of degree <= m in each coefficient, so testing a (m+1)^d grid
certifies emptiness when the grid is affordable, and the solver reports
undecided rather than guessing when it is not.

The deep-congruence machinery behind the same-sign statement (double
cosets, p-adic identity neighborhoods) is replaced by what it predicts:
enumerate gamma = I + p^n K inside an entry bound with det = 1, intersect
each transported flat, and report every transverse sign.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .projlink import ProjPoint
from .qkernel import (
    QMatrix,
    _is_prime,
    det,
    kernel_basis,
    mat_to_json,
    rat,
)
from .symspace import (
    FlatX,
    IntersectionKind,
    SPDPoint,
    flat_from_tau,
    intersect,
    intersection_sign,
    subspace_from_rho,
)


class CommutantError(ValueError):
    """The joint commutant of (tau, rho) is larger than the scalars."""


@dataclass(frozen=True)
class CongruenceLevel:
    p: int
    n: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.n < 1:
            raise ValueError("level exponent must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.n


@dataclass(frozen=True)
class Decomposition:
    a: QMatrix
    b: QMatrix


@dataclass(frozen=True)
class PtoqResult:
    kind: str  # "solved" | "no_solution" | "undecided"
    decomposition: Optional[Decomposition]
    kernel_dim: int


@dataclass(frozen=True)
class SignedHit:
    gamma: QMatrix
    point: SPDPoint
    sign: int


class Orientation(Enum):
    PRESERVING = "Preserving"
    REVERSING = "Reversing"


# ---------------------------------------------------------------------------
# linear systems over the m^2 matrix entries


def _intertwine_rows(P: QMatrix, Q: QMatrix) -> list[list[Fraction]]:
    """Equations x P - Q x = 0, unknowns x_{kl} flattened row-major."""
    m = P.nrows
    rows = []
    for i in range(m):
        for j in range(m):
            row = [rat(0)] * (m * m)
            for l in range(m):
                row[i * m + l] += P[l, j]
            for k in range(m):
                row[k * m + j] -= Q[i, k]
            rows.append(row)
    return rows


def _unflatten(v: Sequence, m: int) -> QMatrix:
    return QMatrix([list(v[i * m : (i + 1) * m]) for i in range(m)])


def scalar_commutant_check(tau: QMatrix, rho: QMatrix) -> bool:
    """True iff the only matrices commuting with both are the scalars."""
    if not (tau.is_square and rho.is_square and tau.nrows == rho.nrows):
        raise ValueError("inputs must be square of equal size")
    rows = _intertwine_rows(tau, tau) + _intertwine_rows(rho, rho)
    return len(kernel_basis(QMatrix(rows))) == 1


_COMBO_TRIES = 64
_GRID_LIMIT = 40000


def ptoq_solve(gamma: QMatrix, tau: QMatrix, rho: QMatrix) -> PtoqResult:
    """Split gamma = a b with [a, rho] = 1 and [b, tau] = 1, exactly.

    Deterministic: the random kernel combinations are drawn from a fixed
    seed. When the certified grid would be too large and no invertible
    element was found, the result is undecided, never a silent NoSolution.
    """
    m = gamma.nrows
    if not (gamma.is_square and tau.nrows == m and rho.nrows == m):
        raise ValueError("inputs must be square of equal size")
    if det(gamma) == 0:
        raise ValueError("gamma must be invertible")
    gi = gamma.inverse()
    rows = _intertwine_rows(tau, gamma @ tau @ gi) + _intertwine_rows(rho, rho)
    ker = kernel_basis(QMatrix(rows))
    d = len(ker)
    if d == 0:
        return PtoqResult("no_solution", None, 0)
    basis = [_unflatten(v, m) for v in ker]

    def finish(a: QMatrix) -> PtoqResult:
        a = _normalize_on_fixed_line(a, rho)
        b = a.inverse() @ gamma
        assert b @ tau == tau @ b  # guaranteed by the system
        return PtoqResult("solved", Decomposition(a=a, b=b), d)

    for a in basis:
        if det(a) != 0:
            return finish(a)
    rng = random.Random(0)
    for _ in range(_COMBO_TRIES):
        coeffs = [rng.randint(-3, 3) for _ in range(d)]
        a = _combine(basis, coeffs)
        if det(a) != 0:
            return finish(a)
    # det on the kernel span is a polynomial of degree <= m in each of the
    # d coefficients; vanishing on {0..m}^d forces it to vanish identically
    if (m + 1) ** d > _GRID_LIMIT:
        return PtoqResult("undecided", None, d)
    for coeffs in itertools.product(range(m + 1), repeat=d):
        a = _combine(basis, coeffs)
        if det(a) != 0:
            return finish(a)
    return PtoqResult("no_solution", None, d)


def _combine(basis: list[QMatrix], coeffs: Sequence[int]) -> QMatrix:
    out = basis[0].scale(coeffs[0])
    for B, c in zip(basis[1:], coeffs[1:]):
        out = out + B.scale(c)
    return out


def _normalize_on_fixed_line(a: QMatrix, rho: QMatrix) -> QMatrix:
    """Rescale a so that a v = v on rho's fixed line, when that line exists.

    a commutes with rho, so it preserves the +1 eigenspace; when that space
    is one-dimensional the action there is a nonzero scalar.
    """
    m = rho.nrows
    plus = kernel_basis(rho - QMatrix.identity(m))
    if len(plus) != 1:
        return a
    v = plus[0]
    av = a.apply(v)
    i = next(k for k, x in enumerate(v) if x != 0)
    lam = av[i] / v[i]
    if lam == 0 or av != tuple(lam * x for x in v):
        return a
    return a.scale(1 / lam)


def decomposition_valid(
    dec: Decomposition, gamma: QMatrix, tau: QMatrix, rho: QMatrix
) -> bool:
    return (
        det(dec.a) != 0
        and dec.a @ dec.b == gamma
        and dec.a @ rho == rho @ dec.a
        and dec.b @ tau == tau @ dec.b
    )


# ---------------------------------------------------------------------------
# orientation and congruence levels


def orientation_on_L(gamma: QMatrix, L) -> Orientation:
    """Whether the integer matrix acts as +1 or -1 on the fixed line L."""
    pt = L if isinstance(L, ProjPoint) else ProjPoint(L)
    _require_integer(gamma)
    v = pt.rep
    gv = gamma.apply(v)
    if gv == v:
        return Orientation.PRESERVING
    if gv == tuple(-x for x in v):
        return Orientation.REVERSING
    if all(x == 0 for x in gv):
        raise ValueError("gamma is singular on L")
    # proportional with ratio other than +-1, or not fixed at all
    raise ValueError("gamma does not fix L with scalar +-1")


def _require_integer(gamma: QMatrix):
    if any(
        gamma[i, j].denominator != 1
        for i in range(gamma.nrows)
        for j in range(gamma.ncols)
    ):
        raise ValueError("matrix must have integer entries")


def _vp(x: int, p: int) -> int:
    x = abs(x)
    n = 0
    while x % p == 0:
        x //= p
        n += 1
    return n


def min_level_v(v: Sequence, p: int) -> int:
    """Least n with 2v nonzero mod p^n, for primitive integer v."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    rep = (v if isinstance(v, ProjPoint) else ProjPoint(v)).rep
    return 1 + min(_vp(2 * x, p) for x in rep if x != 0)


def min_level_separate(gamma: QMatrix, p: int) -> int:
    """Least n with gamma not congruent to I mod p^n."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    _require_integer(gamma)
    m = gamma.nrows
    diffs = [
        int(gamma[i, j] - (1 if i == j else 0))
        for i in range(m)
        for j in range(m)
    ]
    if all(x == 0 for x in diffs):
        raise ValueError("gamma is the identity")
    return 1 + min(_vp(x, p) for x in diffs if x != 0)


# ---------------------------------------------------------------------------
# bounded enumeration


def _entry_ranges(m: int, q: int, bound: int) -> list[range]:
    """Per-entry ranges of K so that I + q K stays inside the entry bound."""
    out = []
    for i in range(m):
        for j in range(m):
            base = 1 if i == j else 0
            lo = -((bound + base) // q)
            hi = (bound - base) // q
            out.append(range(lo, hi + 1))
    return out


def _candidates(m: int, q: int, bound: int):
    for ks in itertools.product(*_entry_ranges(m, q, bound)):
        rows = [
            [(1 if i == j else 0) + q * ks[i * m + j] for j in range(m)]
            for i in range(m)
        ]
        yield rows


def _int_det(rows: list[list[int]]) -> int:
    return int(det(QMatrix(rows)))


def _evaluate(rows: list[list[int]], X: FlatX, Y) -> Optional[SignedHit]:
    gamma = QMatrix(rows)
    moved = X.transport(gamma)
    res = intersect(moved, Y)
    if res.kind is not IntersectionKind.TRANSVERSE_POINT:
        return None
    s = intersection_sign(moved, Y, res.point)
    return SignedHit(gamma=gamma, point=res.point, sign=s)


def enumerate_same_sign(
    tau: QMatrix,
    rho: QMatrix,
    level: CongruenceLevel,
    entry_bound: int,
    workers: int = 1,
) -> list[SignedHit]:
    """Every det-1 integer gamma = I mod p^n within the entry bound whose
    transported flat meets the subspace transversely, with its sign.

    Results are sorted by (max absolute entry, entries lex) so reports are
    reproducible regardless of worker count.
    """
    if not scalar_commutant_check(tau, rho):
        raise CommutantError("joint commutant of (tau, rho) is not scalar")
    X = flat_from_tau(tau)
    Y = subspace_from_rho(rho)
    q = level.modulus
    survivors = [
        rows for rows in _candidates(X.m, q, entry_bound) if _int_det(rows) == 1
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = [
                h
                for h in pool.map(lambda r: _evaluate(r, X, Y), survivors)
                if h is not None
            ]
    else:
        hits = [h for h in (_evaluate(r, X, Y) for r in survivors) if h is not None]

    def key(h: SignedHit):
        entries = [
            int(h.gamma[i, j]) for i in range(X.m) for j in range(X.m)
        ]
        return (max(abs(x) for x in entries), entries)

    return sorted(hits, key=key)


def signed_hit_to_json(h: SignedHit) -> dict:
    return {
        "gamma": [[int(x) for x in row] for row in h.gamma.to_lists()],
        "point": mat_to_json(h.point.Z),
        "sign": h.sign,
    }
