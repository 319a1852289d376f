"""Synthesis of certified intersection patterns and rationalization.

The pattern family lives at explicit rational coordinates: every flat's
frame shares the points e_1, ..., e_{m-2} and pinches a thin pair
e_{m-1} -+ eps_i * e_m around e_{m-1}, with eps_i = thinness * i. Every
line-plane pair uses the same line (1, ..., 1, 0) and a plane whose
(m-1)-st coefficient s_j sits strictly between eps_j and eps_{j+1}. Then
pair j links frame i exactly when s_j > eps_i, i.e. exactly when i <= j,
which is the upper-triangular pattern. Certification never trusts this
arithmetic: every cell is decided by both the projective criterion and the
symmetric-space oracle and the two must agree.

Rationalization snaps float targets to bounded-denominator rationals. A
library of small integer symmetric base matrices with certified irreducible
characteristic polynomials is scanned; the base eigenframe (ascending
eigenvalue order) is transported onto the target frame by an exactly
rational conjugator, index-pairing the columns so that orientation data
survive the snap. Floats enter nowhere else.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .projlink import (
    Arrangement,
    GeneralPositionError,
    LinkDecision,
    LinePlanePair,
    link_decision,
)
from .qkernel import (
    IrredCertificate,
    IrredVerdict,
    QMatrix,
    char_poly,
    det,
    irreducible_over_Q,
    rank,
    rat,
    sturm_distinct_real_roots,
)
from .symspace import (
    FlatX,
    IntersectionKind,
    SubspaceY,
    flat_from_tau,
    intersect,
    intersection_sign,
    involution_for_pair,
    subspace_from_rho,
)


class SynthesisBudgetError(RuntimeError):
    """A retry or search budget ran out before certification succeeded."""


RETRY_BUDGET = 32


@dataclass(frozen=True)
class CellWitness:
    """Per-cell certificate: criterion verdict, oracle verdict, point sign."""

    link: Optional[str]
    oracle: str
    sign: Optional[int]


@dataclass(frozen=True)
class RationalizedTau:
    tau: QMatrix
    base: QMatrix
    conjugator: QMatrix
    irred: IrredCertificate
    sturm_count: int
    frame_distance: Fraction
    unit_base_det: bool


@dataclass(frozen=True)
class PatternFlat:
    flat: FlatX
    arrangement: Optional[Arrangement] = None
    rationalized: Optional[RationalizedTau] = None


@dataclass(frozen=True)
class PatternSubspace:
    subspace: SubspaceY
    pair: Optional[LinePlanePair] = None


@dataclass(frozen=True)
class Pattern:
    N: int
    m: int
    flats: tuple[PatternFlat, ...]
    subspaces: tuple[PatternSubspace, ...]
    matrix: tuple[tuple[int, ...], ...]
    certificate: tuple[tuple[CellWitness, ...], ...]

    def is_upper_triangular_nonzero_diagonal(self) -> bool:
        return all(
            (self.matrix[i][j] != 0) == (i <= j)
            for i in range(self.N)
            for j in range(self.N)
        )


def pattern_rank(p: Union[Pattern, Sequence[Sequence[int]]]) -> int:
    rows = p.matrix if isinstance(p, Pattern) else p
    return rank(QMatrix(rows))


def tau_for_arrangement(arr: Arrangement) -> QMatrix:
    """A rational matrix whose eigenlines are the frame points, with
    eigenvalue k+1 on column k (ascending along the frame order)."""
    F = arr.frame_matrix()
    return F @ QMatrix.diagonal(list(range(1, arr.m + 1))) @ F.inverse()


def _certify_cell(
    flat: PatternFlat, sub: PatternSubspace
) -> Optional[CellWitness]:
    """Decide one cell by both routes; None when they cannot be certified."""
    res = intersect(flat.flat, sub.subspace)
    if res.kind is IntersectionKind.DEGENERATE:
        return None
    if flat.arrangement is not None and sub.pair is not None:
        try:
            decision = link_decision(flat.arrangement, sub.pair)
        except GeneralPositionError:
            return None
        linked = decision is LinkDecision.LINKED
        if linked != (res.kind is IntersectionKind.TRANSVERSE_POINT):
            return None  # routes disagree: treat as uncertified, never pick one
        link_str = decision.value
    else:
        link_str = None
    if res.kind is IntersectionKind.TRANSVERSE_POINT:
        s = intersection_sign(flat.flat, sub.subspace, res.point)
        return CellWitness(link=link_str, oracle=res.kind.value, sign=s)
    return CellWitness(link=link_str, oracle=res.kind.value, sign=None)


def _certify_pattern(
    flats: Sequence[PatternFlat], subspaces: Sequence[PatternSubspace]
) -> Optional[tuple[tuple, tuple]]:
    N = len(flats)
    matrix, cert = [], []
    for i in range(N):
        mrow, crow = [], []
        for j in range(N):
            w = _certify_cell(flats[i], subspaces[j])
            if w is None:
                return None
            mrow.append(w.sign if w.sign is not None else 0)
            crow.append(w)
        matrix.append(tuple(mrow))
        cert.append(tuple(crow))
    return tuple(matrix), tuple(cert)


def _pattern_coordinates(N: int, m: int, thinness: Fraction, rotation: Fraction):
    eps = [thinness * i for i in range(1, N + 2)]
    flats = []
    for i in range(N):
        pts = [[1 if r == k else 0 for r in range(m)] for k in range(m - 2)]
        a = [0] * m
        a[m - 2], a[m - 1] = 1, -eps[i]
        b = [0] * m
        b[m - 2], b[m - 1] = 1, eps[i]
        arr = Arrangement(pts + [a, b])
        flats.append(
            PatternFlat(flat=flat_from_tau(tau_for_arrangement(arr)), arrangement=arr)
        )
    line = [1] * (m - 1) + [0]
    subspaces = []
    for j in range(N):
        s_j = eps[j] + rotation * (eps[j + 1] - eps[j])
        plane = [1] * (m - 2) + [s_j, 1]
        pair = LinePlanePair(line, plane)
        subspaces.append(
            PatternSubspace(
                subspace=subspace_from_rho(involution_for_pair(line, plane)),
                pair=pair,
            )
        )
    return flats, subspaces


def synthesize_pattern(
    N: int,
    m: int,
    thinness: Union[Fraction, int, str] = Fraction(1, 4),
    rotation: Union[Fraction, int, str] = Fraction(1, 2),
    retry_budget: int = RETRY_BUDGET,
) -> Pattern:
    """Certified pattern of N flats and N subspaces meeting iff i <= j.

    thinness controls the pinch of the frame pairs, rotation the placement
    of each plane inside its target gap. If certification fails, both are
    halved and the construction retried, up to the retry budget.
    """
    if N < 1 or m < 2:
        raise ValueError("need N >= 1 and m >= 2")
    thinness, rotation = rat(thinness), rat(rotation)
    if thinness <= 0 or rotation <= 0:
        raise ValueError("thinness and rotation must be positive")
    for _ in range(retry_budget):
        flats, subspaces = _pattern_coordinates(N, m, thinness, rotation)
        certified = _certify_pattern(flats, subspaces)
        if certified is not None:
            matrix, cert = certified
            p = Pattern(
                N=N,
                m=m,
                flats=tuple(flats),
                subspaces=tuple(subspaces),
                matrix=matrix,
                certificate=cert,
            )
            if p.is_upper_triangular_nonzero_diagonal() and pattern_rank(p) == N:
                return p
        thinness /= 2
        rotation /= 2
    raise SynthesisBudgetError(
        f"no certified pattern for N={N}, m={m} within {retry_budget} retries"
    )


def certify_pattern_stability(p: Pattern, snapped: Pattern) -> bool:
    """Cellwise equality of the two sign matrices (same shape required)."""
    if p.N != snapped.N or p.m != snapped.m:
        raise ValueError("patterns have different shapes")
    return p.matrix == snapped.matrix


# ---------------------------------------------------------------------------
# base-matrix library for rationalization


@dataclass(frozen=True)
class _BaseEntry:
    tau0: QMatrix
    cert: IrredCertificate
    frame: tuple  # eigenvector columns, ascending eigenvalues (floats)


_BASE_CACHE: dict[tuple[int, int], list[_BaseEntry]] = {}
_BASE_ITERS: dict[tuple[int, int], object] = {}
_MAX_ENTRY_BOUND = 5


def _symmetric_candidates(m: int):
    """Integer symmetric matrices, ordered by max entry size then lex."""
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    for B in range(1, _MAX_ENTRY_BOUND + 1):
        for upper in itertools.product(range(-B, B + 1), repeat=len(pairs)):
            if max(abs(x) for x in upper) != B:
                continue
            rows = [[0] * m for _ in range(m)]
            for (i, j), x in zip(pairs, upper):
                rows[i][j] = x
                rows[j][i] = x
            yield QMatrix(rows)


def _base_stream(m: int, count: int, prime_budget: int = 25) -> list[_BaseEntry]:
    """First `count` certified-irreducible base matrices for size m."""
    key = (m, prime_budget)
    cache = _BASE_CACHE.setdefault(key, [])
    it = _BASE_ITERS.setdefault(key, _symmetric_candidates(m))
    while len(cache) < count:
        tau0 = next(it, None)
        if tau0 is None:
            break
        p = char_poly(tau0)
        if sturm_distinct_real_roots(p) != m:
            continue
        cert = irreducible_over_Q(p, prime_budget=prime_budget)
        if cert.verdict is not IrredVerdict.IRREDUCIBLE:
            continue
        evals, evecs = np.linalg.eigh(np.array(tau0.to_lists(), dtype=float))
        order = np.argsort(evals)
        frame = tuple(map(tuple, evecs[:, order].T.tolist()))
        cache.append(_BaseEntry(tau0=tau0, cert=cert, frame=frame))
    return cache[:count]


def _snap(x, bound: int) -> Fraction:
    f = x if isinstance(x, Fraction) else Fraction(float(x))
    return f.limit_denominator(bound)


def _column_sin_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Max over columns of the sine of the angle between the spanned lines.

    Computed from the projection residual, not 1 - cos^2, so nearly
    parallel columns report ~1e-16 rather than ~1e-8.
    """
    worst = 0.0
    for j in range(A.shape[1]):
        u, v = A[:, j], B[:, j]
        nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
        if nu == 0.0 or nv == 0.0:
            return 1.0
        r = u - v * (float(np.dot(v, u)) / (nv * nv))
        worst = max(worst, min(1.0, float(np.linalg.norm(r)) / nu))
    return worst


def rationalize_tau(
    target_frame: Sequence[Sequence],
    denom_bound: int = 64,
    require_irreducible: bool = True,
    scan: int = 40,
    prime_budget: int = 25,
) -> RationalizedTau:
    """Rational tau with certified irreducible characteristic polynomial
    whose eigenframe approximates the target frame.

    target_frame is a list of m vectors (the desired eigenlines, in order;
    they are index-paired with the base eigenframe's ascending-eigenvalue
    columns, which is what keeps orientation data stable). The conjugator
    is snapped to denominators <= denom_bound, so tau = g tau0 g^{-1} holds
    exactly while the frame distance is a float-measured, rationally
    rounded upper bound.
    """
    m = len(target_frame)
    T = np.array([[float(x) for x in v] for v in target_frame], dtype=float).T
    if abs(np.linalg.det(T)) < 1e-9 * max(1.0, float(np.abs(T).max())) ** m:
        raise ValueError("target frame is degenerate")

    entries = _base_stream(m, scan, prime_budget)
    if not entries:
        raise SynthesisBudgetError(
            f"no integer symmetric base with certified irreducible "
            f"characteristic polynomial found for m={m}"
        )
    best = None
    for entry in entries:
        if require_irreducible and entry.cert.verdict is not IrredVerdict.IRREDUCIBLE:
            continue
        F0 = np.array(entry.frame, dtype=float).T  # orthonormal columns
        for j in range(m):  # align eigh's arbitrary column signs with the target
            if float(np.dot(T[:, j], F0[:, j])) < 0:
                F0[:, j] = -F0[:, j]
        g_float = T @ F0.T
        g_float = g_float / float(np.abs(g_float).max())
        g = QMatrix([[_snap(x, denom_bound) for x in row] for row in g_float.tolist()])
        if det(g) == 0:
            continue
        achieved = np.array(
            [[float(x) for x in row] for row in g.to_lists()], dtype=float
        ) @ F0
        dist = _column_sin_distance(achieved, T)
        if best is None or dist < best[0]:
            best = (dist, entry, g)
        if dist < 1e-12:
            break
    if best is None:
        raise SynthesisBudgetError("no invertible snapped conjugator found")
    dist, entry, g = best
    tau = g @ entry.tau0 @ g.inverse()
    count = sturm_distinct_real_roots(char_poly(tau))
    assert count == m  # similar to the base matrix
    return RationalizedTau(
        tau=tau,
        base=entry.tau0,
        conjugator=g,
        irred=entry.cert,
        sturm_count=count,
        frame_distance=Fraction(math.ceil(dist * 10**9), 10**9),
        unit_base_det=det(entry.tau0) == 1,
    )


def rationalize_pair(
    target_line: Sequence,
    target_plane: Sequence,
    denom_bound: int = 64,
) -> tuple[LinePlanePair, QMatrix]:
    """Snap a (line, plane functional) target to bounded denominators and
    return the pair with its exact involution."""
    line = [_snap(x, denom_bound) for x in target_line]
    plane = [_snap(x, denom_bound) for x in target_plane]
    if all(x == 0 for x in line) or all(x == 0 for x in plane):
        raise ValueError("snapped line or plane collapsed to zero")
    if sum(a * b for a, b in zip(line, plane)) == 0:
        raise GeneralPositionError("snapped line lies inside the snapped plane")
    pair = LinePlanePair(line, plane)
    rho = involution_for_pair(pair.line.rep, pair.plane.functional)
    return pair, rho


def rationalize_pattern(
    p: Pattern,
    denom_bound: int = 64,
    max_rounds: int = 6,
    frame_noise: Optional[Sequence[Sequence[Sequence[float]]]] = None,
    pair_noise: Optional[Sequence[tuple]] = None,
    require_irreducible: bool = True,
    prime_budget: int = 25,
) -> tuple[Pattern, int]:
    """Snap a certified pattern to rationalized flats and pairs, growing
    denom_bound by 4x per round until the sign matrix certifies identically.

    frame_noise, when given, holds one float frame (m vectors) per flat to
    use as the snap target instead of the pattern's own frame; pair_noise
    likewise holds (line, plane) float targets per subspace. Snapped cells
    are certified by the oracle alone: the snapped tau has an irreducible
    characteristic polynomial, so there is no rational eigenframe to hand
    to the projective criterion. Returns the snapped pattern and the bound
    that certified.
    """
    targets = []
    for i, pf in enumerate(p.flats):
        if frame_noise is not None:
            targets.append(frame_noise[i])
        else:
            F = pf.arrangement.frame_matrix()
            targets.append(
                [[float(F[r, c]) for r in range(p.m)] for c in range(p.m)]
            )
    pair_targets = []
    for j, ps in enumerate(p.subspaces):
        if pair_noise is not None:
            pair_targets.append(pair_noise[j])
        else:
            pair_targets.append(
                (
                    [float(x) for x in ps.subspace.line],
                    [float(x) for x in ps.subspace.plane],
                )
            )

    bound = denom_bound
    for _ in range(max_rounds):
        try:
            flats = []
            for tgt in targets:
                rt = rationalize_tau(
                    tgt,
                    denom_bound=bound,
                    require_irreducible=require_irreducible,
                    prime_budget=prime_budget,
                )
                flats.append(
                    PatternFlat(flat=flat_from_tau(rt.tau), rationalized=rt)
                )
            subspaces = []
            for line_t, plane_t in pair_targets:
                pair, rho = rationalize_pair(line_t, plane_t, denom_bound=bound)
                subspaces.append(
                    PatternSubspace(subspace=subspace_from_rho(rho), pair=pair)
                )
            certified = _certify_pattern(flats, subspaces)
        except (GeneralPositionError, ValueError):
            certified = None
        if certified is not None:
            matrix, cert = certified
            snapped = Pattern(
                N=p.N,
                m=p.m,
                flats=tuple(flats),
                subspaces=tuple(subspaces),
                matrix=matrix,
                certificate=cert,
            )
            if certify_pattern_stability(p, snapped):
                return snapped, bound
        bound *= 4
    raise SynthesisBudgetError(
        f"pattern did not restabilize within {max_rounds} rounds "
        f"(last denominator bound {bound // 4})"
    )


# ---------------------------------------------------------------------------
# serialization


def _witness_to_json(w: CellWitness) -> dict:
    return {"link": w.link, "oracle": w.oracle, "sign": w.sign}


def pattern_to_json(p: Pattern) -> dict:
    from .projlink import arrangement_to_json, pair_to_json
    from .qkernel import mat_to_json

    flats = []
    for pf in p.flats:
        rec = {"tau": mat_to_json(pf.flat.tau)}
        if pf.arrangement is not None:
            rec["arrangement"] = arrangement_to_json(pf.arrangement)
        if pf.rationalized is not None:
            rt = pf.rationalized
            rec["rationalized"] = {
                "base": mat_to_json(rt.base),
                "conjugator": mat_to_json(rt.conjugator),
                "irreducible": rt.irred.to_json(),
                "sturm_count": rt.sturm_count,
                "frame_distance": str(rt.frame_distance),
                "unit_base_det": rt.unit_base_det,
            }
        flats.append(rec)
    subs = []
    for ps in p.subspaces:
        rec = {"rho": mat_to_json(ps.subspace.rho)}
        if ps.pair is not None:
            rec.update(pair_to_json(ps.pair))
        subs.append(rec)
    return {
        "N": p.N,
        "m": p.m,
        "flats": flats,
        "subspaces": subs,
        "matrix": [list(row) for row in p.matrix],
        "certificate": [
            [_witness_to_json(w) for w in row] for row in p.certificate
        ],
    }


def pattern_from_json(obj: dict) -> Pattern:
    from .projlink import arrangement_from_json, pair_from_json
    from .qkernel import mat_from_json

    flats = []
    for rec in obj["flats"]:
        arr = (
            arrangement_from_json(rec["arrangement"])
            if "arrangement" in rec
            else None
        )
        flats.append(
            PatternFlat(flat=flat_from_tau(mat_from_json(rec["tau"])), arrangement=arr)
        )
    subs = []
    for rec in obj["subspaces"]:
        pair = pair_from_json(rec) if "line" in rec else None
        subs.append(
            PatternSubspace(
                subspace=subspace_from_rho(mat_from_json(rec["rho"])), pair=pair
            )
        )
    matrix = tuple(tuple(int(x) for x in row) for row in obj["matrix"])
    cert = tuple(
        tuple(
            CellWitness(link=w["link"], oracle=w["oracle"], sign=w["sign"])
            for w in row
        )
        for row in obj.get("certificate", [])
    )
    return Pattern(
        N=obj["N"],
        m=obj["m"],
        flats=tuple(flats),
        subspaces=tuple(subs),
        matrix=matrix,
        certificate=cert,
    )
