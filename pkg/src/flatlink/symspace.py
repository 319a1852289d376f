"""Exact model of H = SL_m(R)/SO(m) as positive-definite symmetric matrices.

Points are stored projectively: a PD matrix up to positive scale, with the
det = 1 normalization deferred (the m-th root of a rational determinant is
usually irrational, and every predicate used here is scale-invariant).

The maximal flat attached to a regular tau is the PD part of the linear
space {Z symmetric : tau Z = Z tau^T}; the geodesic subspace attached to an
involution rho with eigenvalues (-1, ..., -1, 1) is the PD part of
{Z : rho Z rho^T = Z}. Both memberships are linear, so intersection is an
exact kernel computation and transversality is a rank statement. This route
never consults the projective linking criterion; it is the module the
criterion is tested against.

Symmetric coordinates are ordered lexicographically on index pairs (i, j)
with i <= j throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .qkernel import (
    QMatrix,
    QPoly,
    char_poly,
    det,
    kernel_basis,
    mat_from_json,
    mat_to_json,
    rat,
    sign,
    sturm_distinct_real_roots,
)


def sym_pairs(m: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(m) for j in range(i, m)]


def sym_dim(m: int) -> int:
    return m * (m + 1) // 2


def vec_sym(M: QMatrix) -> tuple:
    """Upper-triangle coordinates of a symmetric matrix, pair-lex order."""
    return tuple(M[i, j] for i, j in sym_pairs(M.nrows))


def unvec_sym(v: Sequence, m: int) -> QMatrix:
    vs = [rat(x) for x in v]
    if len(vs) != sym_dim(m):
        raise ValueError("wrong length for symmetric coordinates")
    rows = [[None] * m for _ in range(m)]
    for (i, j), x in zip(sym_pairs(m), vs):
        rows[i][j] = x
        rows[j][i] = x
    return QMatrix(rows)


def _sym_basis_element(m: int, i: int, j: int) -> QMatrix:
    rows = [[0] * m for _ in range(m)]
    rows[i][j] = 1
    rows[j][i] = 1
    return QMatrix(rows)


def leading_principal_minors(M: QMatrix) -> list[Fraction]:
    return [
        det(QMatrix([r[: k + 1] for r in M.rows[: k + 1]]))
        for k in range(M.nrows)
    ]


def is_positive_definite(M: QMatrix) -> bool:
    return M.is_symmetric() and all(d > 0 for d in leading_principal_minors(M))


@dataclass(frozen=True)
class SPDPoint:
    """Positive definite symmetric matrix up to positive scale."""

    Z: QMatrix
    determinant: Fraction

    def __init__(self, Z: QMatrix):
        if not Z.is_symmetric():
            raise ValueError("point matrix must be symmetric")
        minors = leading_principal_minors(Z)
        if not all(d > 0 for d in minors):
            raise ValueError("point matrix must be positive definite")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "determinant", minors[-1])

    @property
    def m(self) -> int:
        return self.Z.nrows


# ---------------------------------------------------------------------------
# membership systems


def _membership_rows(image, m: int, strict: bool) -> QMatrix:
    """Rows of the linear system image(Z) = 0 on symmetric coordinates.

    `image` sends a symmetric basis element to a matrix; equations are read
    off the upper triangle of the image, strictly above the diagonal when
    the image is always antisymmetric.
    """
    pairs = sym_pairs(m)
    eq_pairs = [(i, j) for i in range(m) for j in range(i + (1 if strict else 0), m)]
    cols = []
    for (k, l) in pairs:
        img = image(_sym_basis_element(m, k, l))
        cols.append([img[i, j] for (i, j) in eq_pairs])
    return QMatrix.from_columns(cols)


def flat_membership_system(tau: QMatrix) -> QMatrix:
    """System whose kernel is {Z symmetric : tau Z = Z tau^T}."""
    # tau Z - Z tau^T is antisymmetric for symmetric Z, so the strict upper
    # triangle carries all the constraints
    return _membership_rows(
        lambda B: tau @ B - B @ tau.transpose(), tau.nrows, strict=True
    )


def subspace_membership_system(rho: QMatrix) -> QMatrix:
    """System whose kernel is {Z symmetric : rho Z rho^T = Z}."""
    return _membership_rows(
        lambda B: rho @ B @ rho.transpose() - B, rho.nrows, strict=False
    )


# ---------------------------------------------------------------------------
# the two geodesic objects


@dataclass(frozen=True)
class FlatX:
    """Maximal flat: PD part of the m-dimensional space {Z : tau Z = Z tau^T}.

    solution_basis is the canonical kernel basis of the membership system in
    symmetric pair-lex coordinates; the orientation tag names the frame
    convention used by intersection_sign (powers of tau applied to the
    anchor point, which transport cleanly under conjugation).
    """

    tau: QMatrix
    solution_basis: tuple[QMatrix, ...]
    orientation: str = "tau-powers"

    def contains(self, Z: QMatrix) -> bool:
        return (
            Z.is_symmetric() and self.tau @ Z == Z @ self.tau.transpose()
        )

    @property
    def m(self) -> int:
        return self.tau.nrows

    def transport(self, g: QMatrix) -> "FlatX":
        """The flat of g tau g^{-1}, with the basis carried along as g B g^T."""
        gi = g.inverse()
        gt = g.transpose()
        return FlatX(
            tau=g @ self.tau @ gi,
            solution_basis=tuple(g @ B @ gt for B in self.solution_basis),
            orientation=self.orientation,
        )


def flat_from_tau(tau: QMatrix) -> FlatX:
    if not tau.is_square:
        raise ValueError("tau must be square")
    if det(tau) == 0:
        raise ValueError("tau must be invertible")
    m = tau.nrows
    p = char_poly(tau)
    if sturm_distinct_real_roots(p) != m:
        raise ValueError("tau must have m distinct real eigenvalues")
    basis = kernel_basis(flat_membership_system(tau))
    assert len(basis) == m  # regular semisimple: one dimension per eigenline
    return FlatX(tau=tau, solution_basis=tuple(unvec_sym(v, m) for v in basis))


@dataclass(frozen=True)
class SubspaceY:
    """Minset of an involution with eigenvalues (-1, ..., -1, 1).

    line is the +1 eigenvector, plane the functional cutting the -1
    eigenspace, both canonical primitive integer vectors.
    """

    rho: QMatrix
    line: tuple
    plane: tuple
    orientation: str = "line-then-plane-pairs"

    def contains(self, Z: QMatrix) -> bool:
        return Z.is_symmetric() and self.rho @ Z @ self.rho.transpose() == Z

    @property
    def m(self) -> int:
        return self.rho.nrows


def subspace_from_rho(rho: QMatrix) -> SubspaceY:
    if not rho.is_square:
        raise ValueError("rho must be square")
    m = rho.nrows
    I = QMatrix.identity(m)
    if rho @ rho != I:
        raise ValueError("rho must be an involution")
    plus = kernel_basis(rho - I)
    minus = kernel_basis(rho + I)
    if len(plus) != 1 or len(minus) != m - 1:
        raise ValueError("rho must have eigenvalue signature (+1, -1^(m-1))")
    functional = kernel_basis(QMatrix(minus))
    assert len(functional) == 1
    return SubspaceY(rho=rho, line=plus[0], plane=functional[0])


def involution_for_pair(line: Sequence, plane: Sequence) -> QMatrix:
    """The involution fixing `line` and negating the kernel of `plane`."""
    v = [rat(x) for x in line]
    u = [rat(x) for x in plane]
    uv = sum(a * b for a, b in zip(u, v))
    if uv == 0:
        raise ValueError("line lies inside the plane")
    m = len(v)
    return QMatrix(
        [[2 * v[i] * u[j] / uv - (1 if i == j else 0) for j in range(m)] for i in range(m)]
    )


# ---------------------------------------------------------------------------
# intersection


class IntersectionKind(Enum):
    EMPTY = "Empty"
    TRANSVERSE_POINT = "TransversePoint"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class IntersectionResult:
    kind: IntersectionKind
    point: Optional[SPDPoint]
    sign: Optional[int]
    kernel_dim: int

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "kernel_dim": self.kernel_dim}
        out["point"] = mat_to_json(self.point.Z) if self.point else None
        out["sign"] = self.sign
        return out


def _joint_system(X: FlatX, Y: SubspaceY) -> QMatrix:
    a = flat_membership_system(X.tau)
    b = subspace_membership_system(Y.rho)
    return QMatrix(list(a.rows) + list(b.rows))


def intersect(X: FlatX, Y: SubspaceY) -> IntersectionResult:
    """Exact intersection of the two PD solution sets.

    The joint membership system is linear; a one-dimensional kernel whose
    line carries a PD representative is a transverse intersection point.
    Higher-dimensional kernels are reported as Degenerate, never perturbed.
    """
    if X.m != Y.m:
        raise ValueError("dimension mismatch")
    ker = kernel_basis(_joint_system(X, Y))
    k = len(ker)
    if k != 1:
        return IntersectionResult(IntersectionKind.DEGENERATE, None, None, k)
    Z0 = unvec_sym(ker[0], X.m)
    for cand in (Z0, -Z0):
        if all(d > 0 for d in leading_principal_minors(cand)):
            return IntersectionResult(
                IntersectionKind.TRANSVERSE_POINT, SPDPoint(cand), None, 1
            )
    return IntersectionResult(IntersectionKind.EMPTY, None, None, 1)


# ---------------------------------------------------------------------------
# orientation sign


def _coords_in_span(frame_vecs: list[tuple], target: tuple) -> tuple:
    """Coefficients of target in the span of frame_vecs (must be exact)."""
    cols = [tuple(v) for v in frame_vecs] + [tuple(-rat(x) for x in target)]
    ker = kernel_basis(QMatrix.from_columns(cols))
    if len(ker) != 1 or ker[0][-1] == 0:
        raise ValueError("frame is dependent or does not span the target")
    t = ker[0][-1]
    return tuple(c / t for c in ker[0][:-1])


def _oriented_lifts(frame: list[QMatrix], Z: QMatrix):
    """Drop one frame vector against the anchor Z, tracking orientation.

    Writing Z = sum c_k F_k, remove the first k with c_k != 0 and return
    (sign(c_k) * (-1)^k, remaining frame). Prepending Z to the remainder
    then represents the same orientation of the span regardless of which
    index was dropped.
    """
    vecs = [vec_sym(F) for F in frame]
    coords = _coords_in_span(vecs, vec_sym(Z))
    k = next(i for i, c in enumerate(coords) if c != 0)
    sigma = sign(coords[k]) * (-1) ** k
    return sigma, [F for i, F in enumerate(frame) if i != k]


def default_x_frame(X: FlatX, Z: QMatrix) -> list[QMatrix]:
    """Ordered spanning frame of the tau-solution space anchored at Z:
    (Z, tau Z, tau^2 Z, ...). Conjugation-equivariant by construction."""
    frame = [Z]
    for _ in range(X.m - 1):
        frame.append(X.tau @ frame[-1])
    return frame


def default_y_frame(Y: SubspaceY) -> list[QMatrix]:
    """Ordered spanning frame of the rho-solution space: the line square
    first, then symmetrized products of the plane-kernel basis, pair-lex."""
    m = Y.m
    v = list(Y.line)
    w = kernel_basis(QMatrix([Y.plane]))
    assert len(w) == m - 1
    frame = [QMatrix([[v[i] * v[j] for j in range(m)] for i in range(m)])]
    for a in range(m - 1):
        for b in range(a, m - 1):
            wa, wb = w[a], w[b]
            frame.append(
                QMatrix(
                    [
                        [wa[i] * wb[j] + wb[i] * wa[j] for j in range(m)]
                        for i in range(m)
                    ]
                )
            )
    return frame


def intersection_sign(
    X: FlatX,
    Y: SubspaceY,
    at: SPDPoint,
    x_frame: Optional[list[QMatrix]] = None,
    y_frame: Optional[list[QMatrix]] = None,
) -> int:
    """Orientation sign of the transverse crossing at `at`.

    The sign is the determinant sign of the square matrix whose columns
    are: the point itself, then the Y-frame with one vector dropped against
    the point, then the X-frame likewise, all in symmetric pair-lex
    coordinates, corrected by the two drop orientations. Same-sign
    statements across a family are meaningful; the absolute sign is a
    convention pinned by the m = 2 reference case.
    """
    Z = at.Z
    if not X.contains(Z):
        raise ValueError("point does not lie on the flat")
    if not Y.contains(Z):
        raise ValueError("point does not lie on the subspace")
    if len(kernel_basis(_joint_system(X, Y))) != 1:
        raise ValueError("intersection at the point is not transverse")

    xf = x_frame if x_frame is not None else default_x_frame(X, Z)
    yf = y_frame if y_frame is not None else default_y_frame(Y)
    sx, x_lifts = _oriented_lifts(xf, Z)
    sy, y_lifts = _oriented_lifts(yf, Z)

    cols = [vec_sym(Z)] + [vec_sym(B) for B in y_lifts] + [vec_sym(B) for B in x_lifts]
    if len(cols) != sym_dim(X.m):
        raise ValueError("frames have the wrong total size")
    d = det(QMatrix.from_columns(cols))
    if d == 0:
        raise ValueError("frames do not span: non-transverse configuration")
    return sx * sy * sign(d)


def apply_isometry(g: QMatrix, Z: SPDPoint) -> SPDPoint:
    """Model action of GL_m: Z -> g Z g^T (exact)."""
    if det(g) == 0:
        raise ValueError("g must be invertible")
    return SPDPoint(g @ Z.Z @ g.transpose())


# ---------------------------------------------------------------------------
# serialization


def flat_to_json(X: FlatX) -> dict:
    return {"tau": mat_to_json(X.tau)}


def flat_from_json(obj: dict) -> FlatX:
    return flat_from_tau(mat_from_json(obj["tau"]))


def subspace_to_json(Y: SubspaceY) -> dict:
    return {"rho": mat_to_json(Y.rho)}


def subspace_from_json(obj: dict) -> SubspaceY:
    if "rho" in obj:
        return subspace_from_rho(mat_from_json(obj["rho"]))
    return subspace_from_rho(involution_for_pair(
        [rat(x) for x in obj["line"]], [rat(x) for x in obj["plane"]]
    ))
