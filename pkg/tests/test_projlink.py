import random
from fractions import Fraction

import pytest

from flatlink.projlink import (
    Arrangement,
    GeneralPositionError,
    LinkDecision,
    LinePlanePair,
    ProjHyperplane,
    ProjPoint,
    arrangement_from_json,
    arrangement_to_json,
    common_flags,
    hyperplane_V,
    in_general_position,
    link_decision,
    pair_from_json,
    pair_to_json,
    plane_meets_simplex,
    simplex_of,
    transform_arrangement,
    transform_pair,
)
from flatlink.qkernel import QMatrix, det, kernel_basis, solve_unique


def std_frame(m):
    return Arrangement([[1 if i == j else 0 for j in range(m)] for i in range(m)])


def rnd_config(rng, m, bound=4):
    """Random frame + pair, resampled until constructible and general."""
    while True:
        try:
            arr = Arrangement(
                [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(m)]
            )
            lp = LinePlanePair(
                [rng.randint(-bound, bound) for _ in range(m)],
                [rng.randint(-bound, bound) for _ in range(m)],
            )
        except (ValueError, GeneralPositionError):
            continue
        if in_general_position(arr, lp):
            return arr, lp


def rnd_gl(rng, m, bound=3):
    while True:
        g = QMatrix([[rng.randint(-bound, bound) for _ in range(m)] for _ in range(m)])
        if det(g) != 0:
            return g


def test_canonical_representatives():
    assert ProjPoint([2, -4]).rep == (1, -2)
    assert ProjPoint([-2, 4]).rep == (1, -2)
    assert ProjPoint([Fraction(1, 2), Fraction(1, 3)]).rep == (3, 2)
    assert ProjHyperplane([0, -5, 10]).functional == (0, 1, -2)
    with pytest.raises(ValueError):
        ProjPoint([0, 0])


def test_arrangement_and_pair_invariants():
    with pytest.raises(GeneralPositionError):
        Arrangement([[1, 0], [2, 0]])
    with pytest.raises(GeneralPositionError):
        LinePlanePair([1, 0], [0, 1])  # line inside plane
    arr = std_frame(2)
    assert arr.m == 2


def test_in_general_position_examples():
    arr = std_frame(2)
    lp = LinePlanePair([1, 1], [1, -2])
    assert in_general_position(arr, lp)

    # repeated point: L equals a frame point
    assert not in_general_position(arr, LinePlanePair([1, 0], [1, -2]))

    # plane through a frame point
    assert not in_general_position(arr, LinePlanePair([1, 1], [1, 0]))


def test_hyperplane_V():
    assert hyperplane_V(std_frame(3), 1) == ProjHyperplane([1, 0, 0])
    assert hyperplane_V(std_frame(2), 2) == ProjHyperplane([0, 1])
    arr = Arrangement([[1, 0, 0], [0, 1, 0], [1, 1, 1]])
    # through e_1 and e_2 only: the coordinate plane x_3 = 0
    assert hyperplane_V(arr, 3) == ProjHyperplane([0, 0, 1])
    with pytest.raises(IndexError):
        hyperplane_V(arr, 0)
    with pytest.raises(IndexError):
        hyperplane_V(arr, 4)


def test_hyperplane_V_vanishing_property():
    rng = random.Random(5)
    for _ in range(30):
        m = rng.randint(2, 5)
        try:
            arr = Arrangement(
                [[rng.randint(-4, 4) for _ in range(m)] for _ in range(m)]
            )
        except GeneralPositionError:
            continue
        for i in range(1, m + 1):
            V = hyperplane_V(arr, i)
            for k, p in enumerate(arr.points, start=1):
                if k == i:
                    assert V.eval(p) != 0
                else:
                    assert V.eval(p) == 0


def test_simplex_of():
    arr = std_frame(2)
    assert simplex_of(arr, ProjPoint([1, 1])).signs == (1, 1)
    assert simplex_of(arr, ProjPoint([1, -1])).signs == (1, -1)
    assert simplex_of(std_frame(3), ProjPoint([1, 2, 3])).signs == (1, 1, 1)
    # canonicalization folds antipodal labels together
    assert simplex_of(arr, ProjPoint([-1, 1])).signs == (1, -1)
    with pytest.raises(GeneralPositionError):
        simplex_of(arr, ProjPoint([1, 0]))


def test_plane_meets_simplex():
    arr = std_frame(2)
    sigma = simplex_of(arr, ProjPoint([1, 1]))
    assert not plane_meets_simplex(ProjHyperplane([1, 1]), arr, sigma)
    assert plane_meets_simplex(ProjHyperplane([2, -1]), arr, sigma)
    arr3 = std_frame(3)
    sigma3 = simplex_of(arr3, ProjPoint([1, 1, 1]))
    assert not plane_meets_simplex(ProjHyperplane([1, 1, 1]), arr3, sigma3)
    with pytest.raises(GeneralPositionError):
        plane_meets_simplex(ProjHyperplane([1, 0]), arr, sigma)


def test_link_decision_fixed_cases():
    arr = std_frame(2)
    assert link_decision(arr, LinePlanePair([1, 1], [1, 1])) is LinkDecision.LINKED
    assert (
        link_decision(arr, LinePlanePair([1, 1], [2, -1])) is LinkDecision.NOT_LINKED
    )
    arr3 = std_frame(3)
    assert (
        link_decision(arr3, LinePlanePair([1, 1, 1], [1, 1, 1]))
        is LinkDecision.LINKED
    )
    with pytest.raises(GeneralPositionError):
        link_decision(arr, LinePlanePair([1, 1], [1, 0]))


def test_common_flags_fixed_cases():
    arr = Arrangement([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    lp = LinePlanePair([1, 1, 1], [1, 1, 1])
    l_prime, q = common_flags(arr, lp)
    assert l_prime == ProjPoint([0, 1, -1])
    assert q == ProjHyperplane([0, 1, -1])

    # m=2 edge case: Q vanishes on L alone
    arr2 = std_frame(2)
    lp2 = LinePlanePair([1, 1], [1, -2])
    l_prime2, q2 = common_flags(arr2, lp2)
    assert q2.eval(lp2.line) == 0
    assert lp2.plane.eval(l_prime2) == 0


def test_common_flags_incidences():
    rng = random.Random(17)
    for _ in range(40):
        m = rng.randint(2, 5)
        arr, lp = rnd_config(rng, m)
        try:
            l_prime, q = common_flags(arr, lp)
        except GeneralPositionError:
            continue
        # L' sits on P and on the line through the last two frame points
        assert lp.plane.eval(l_prime) == 0
        M = QMatrix.from_columns(
            [arr.points[m - 2].rep, arr.points[m - 1].rep, l_prime.rep]
        )
        assert M.rank() == 2
        # Q contains L and the first m-2 frame points
        assert q.eval(lp.line) == 0
        for p in arr.points[: m - 2]:
            assert q.eval(p) == 0


def test_gl_equivariance_and_permutation_invariance():
    rng = random.Random(29)
    for _ in range(60):
        m = rng.randint(2, 4)
        arr, lp = rnd_config(rng, m)
        d = link_decision(arr, lp)

        g = rnd_gl(rng, m)
        garr, glp = transform_arrangement(g, arr), transform_pair(g, lp)
        assert in_general_position(garr, glp)
        assert link_decision(garr, glp) is d

        perm = list(range(m))
        rng.shuffle(perm)
        parr = Arrangement([arr.points[i] for i in perm])
        assert link_decision(parr, lp) is d


def test_scale_invariance():
    arr = Arrangement([[2, 0], [0, -3]])
    lp = LinePlanePair([Fraction(1, 2), Fraction(1, 2)], [5, 5])
    assert arr.points[0] == ProjPoint([1, 0])
    assert link_decision(arr, lp) is LinkDecision.LINKED


def _restrict_to_Q(arr, lp, q):
    """Inductive data inside the hyperplane Q, in kernel-basis coordinates."""
    m = arr.m
    B = QMatrix.from_columns(kernel_basis(QMatrix([q.functional])))

    # point on line(L_{m-1} L_m) where q vanishes
    a, b = arr.points[m - 2], arr.points[m - 1]
    qa, qb = q.eval(a), q.eval(b)
    lpp = [qb * x - qa * y for x, y in zip(a.rep, b.rep)]

    def in_Q_coords(vec):
        # kernel of [B | -vec] gives (w, t) with B w = t vec
        aug_cols = [B.col(j) for j in range(m - 1)] + [tuple(-v for v in vec)]
        ker = kernel_basis(QMatrix.from_columns(aug_cols))
        assert len(ker) == 1 and ker[0][-1] != 0
        return [x / ker[0][-1] for x in ker[0][:-1]]

    new_pts = [in_Q_coords([Fraction(x) for x in p.rep]) for p in arr.points[: m - 2]]
    new_pts.append(in_Q_coords([Fraction(x) for x in lpp]))
    new_line = in_Q_coords([Fraction(x) for x in lp.line.rep])
    # restricted functional: u composed with B
    u = lp.plane.functional
    new_plane = [
        sum(Fraction(u[i]) * B[i, j] for i in range(m)) for j in range(m - 1)
    ]
    return Arrangement(new_pts), LinePlanePair(new_line, new_plane)


def _circle_reduction(arr, lp):
    """m=2 data on the line through the last two frame points.

    Frame: L_{m-1}, L_m in line coordinates. Pair: the point where Q crosses
    the line, against the functional vanishing where P crosses it.
    """
    m = arr.m
    _, q = common_flags(arr, lp)
    a, b = arr.points[m - 2], arr.points[m - 1]
    ua, ub = lp.plane.eval(a), lp.plane.eval(b)
    qa, qb = q.eval(a), q.eval(b)
    # in (s, t) coordinates s*a + t*b: P crosses at (ub, -ua), Q at (qb, -qa)
    sub_arr = Arrangement([[1, 0], [0, 1]])
    sub_lp = LinePlanePair([qb, -qa], [ua, ub])  # (ua, ub) vanishes at (ub, -ua)
    return sub_arr, sub_lp


def test_recursion_consistency_on_the_lines():
    # Linked iff, for every edge of the simplex, the m=2 decision on the
    # line through that edge's vertices (against the two points where P and
    # the complementary hyperplane cross it) is Linked. P meets the simplex
    # exactly when it crosses at least one open edge.
    rng = random.Random(83)
    done = 0
    while done < 40:
        m = rng.randint(3, 5)
        arr, lp = rnd_config(rng, m)
        edge_answers = []
        degenerate = False
        for i in range(m):
            for j in range(i + 1, m):
                order = [k for k in range(m) if k not in (i, j)] + [i, j]
                parr = Arrangement([arr.points[k] for k in order])
                try:
                    sub_arr, sub_lp = _circle_reduction(parr, lp)
                except (GeneralPositionError, ValueError):
                    degenerate = True
                    break
                if not in_general_position(sub_arr, sub_lp):
                    degenerate = True
                    break
                edge_answers.append(link_decision(sub_arr, sub_lp))
            if degenerate:
                break
        if degenerate:
            continue
        main = link_decision(arr, lp)
        if main is LinkDecision.LINKED:
            assert all(a is LinkDecision.LINKED for a in edge_answers)
        else:
            assert any(a is LinkDecision.NOT_LINKED for a in edge_answers)
        done += 1


def test_linked_descends_to_Q():
    # a Linked decision stays Linked on the data cut down into Q; the
    # converse direction is not claimed (and is false in general)
    rng = random.Random(103)
    done = 0
    while done < 15:
        m = rng.randint(3, 4)
        arr, lp = rnd_config(rng, m)
        if link_decision(arr, lp) is not LinkDecision.LINKED:
            continue
        try:
            _, q = common_flags(arr, lp)
            sub_arr, sub_lp = _restrict_to_Q(arr, lp, q)
        except (GeneralPositionError, ValueError, AssertionError):
            continue
        if not in_general_position(sub_arr, sub_lp):
            continue
        assert link_decision(sub_arr, sub_lp) is LinkDecision.LINKED
        done += 1


def test_json_round_trip():
    arr = Arrangement([[1, 0], [1, 1]])
    lp = LinePlanePair([2, 1], [1, -3])
    assert arrangement_from_json(arrangement_to_json(arr)) == arr
    assert pair_from_json(pair_to_json(lp)) == lp
    obj = arrangement_to_json(arr)
    assert obj["m"] == 2 and obj["points"][1] == ["1", "1"]
