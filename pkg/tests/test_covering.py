import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lozicert.covering import (
    CoverStatus,
    CoverVerdict,
    MarkedQuadrilateral,
    build_matrix,
    certify,
    charpoly,
    check_cover,
    entropy_lower_bound,
    reference_boxes,
    reference_vertices,
    singularity_clearance,
)
from lozicert.geometry import Point, square
from lozicert.lozi import BASE_PARAMS, LoziParams, orbit_itinerary
from lozicert.trapping import trapping_region_for

from _support import fiber_spot_check, small

JUMP = LoziParams(F(1401, 1000), F(2, 5))
GOLDEN = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def boxes():
    return reference_boxes(F(1, 1000))


def test_reference_examples(boxes):
    n1, n2 = boxes
    assert check_cover(JUMP, 4, n1, n1).status is CoverStatus.COVERED
    assert check_cover(JUMP, 4, n1, n2).status is CoverStatus.COVERED
    assert check_cover(JUMP, 4, n2, n1).status is CoverStatus.COVERED
    v = check_cover(JUMP, 4, n2, n2)
    assert v.status is CoverStatus.NOT_COVERED and v.reason.startswith("S2")


def test_identity_never_covers(boxes):
    for b in boxes:
        assert check_cover(JUMP, 0, b, b).status is CoverStatus.NOT_COVERED


def test_clearance_examples(boxes):
    ok, it = singularity_clearance(JUMP, 4, boxes[0].vertices)
    f2_signs = orbit_itinerary(JUMP, Point(F(0), F(15, 29)), 4)
    assert ok and it == f2_signs
    assert singularity_clearance(BASE_PARAMS, 1, square(-1, -1, 2))[0] is False
    r = trapping_region_for(BASE_PARAMS)
    assert singularity_clearance(BASE_PARAMS, 4, r, strict=True)[0] is False


def test_reference_vertices():
    v = reference_vertices(F(1, 1000))
    assert v["A"] == Point(F(0), F(15, 29) - F(1, 1000))

    def slope(p, q):
        return (q.y - p.y) / (q.x - p.x)

    assert slope(v["A"], v["B"]) == slope(v["D"], v["C"]) == F(9, 2)
    with pytest.raises(ValueError):
        reference_vertices(0)
    n1, _ = reference_boxes(F(1, 1000), F(15, 29))
    # ABCD is clockwise, so the stored order is B, A, D, C
    assert {frozenset(e) for e in n1.vertical_edges} == {frozenset((v["A"], v["B"])), frozenset((v["C"], v["D"]))}


def test_fiber_spot_check(boxes):
    for ni in boxes:
        for nj in boxes:
            if check_cover(JUMP, 4, ni, nj).covered:
                assert fiber_spot_check(JUMP, 4, ni, nj, 50)


def test_relabel_invariance(boxes):
    for ni in boxes:
        for nj in boxes:
            base = check_cover(JUMP, 4, ni, nj).status
            assert check_cover(JUMP, 4, ni.swapped(), nj).status is base
            assert check_cover(JUMP, 4, ni, nj.swapped()).status is base


def test_marked_quadrilateral_validation():
    cw = MarkedQuadrilateral([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.vertices == (Point(F(0), F(1)), Point(F(0), F(0)), Point(F(1), F(0)), Point(F(1), F(1)))
    with pytest.raises(ValueError):
        MarkedQuadrilateral([(0, 0), (1, 0), (1, 1)])
    with pytest.raises(ValueError):
        MarkedQuadrilateral([(0, 0), (1, 1), (1, 0), (0, 1)])
    rotated = MarkedQuadrilateral.from_json({"vertices": [["0", "0"], ["0", "1"], ["1", "1"], ["1", "0"]],
                                              "vertical": [[1, 2], [3, 0]]})
    assert {frozenset(e) for e in rotated.vertical_edges} == {
        frozenset({Point(F(0), F(1)), Point(F(1), F(1))}), frozenset({Point(F(1), F(0)), Point(F(0), F(0))})}


def test_nonparallel_strip_is_indeterminate(boxes):
    kite = MarkedQuadrilateral([(0, 0), (F(-1, 10), 1), (2, 1), (1, 0)])
    v = check_cover(JUMP, 4, boxes[0], kite)
    assert v.status is CoverStatus.INDETERMINATE


@st.composite
def trapezoids(draw):
    # vertical edges on parallel lines of slope ``k``; positive orientation
    k = draw(st.fractions(min_value=-5, max_value=5, max_denominator=10))
    x0, y0 = draw(small), draw(small)
    w = draw(st.fractions(min_value=F(1, 5), max_value=3, max_denominator=10))
    h1 = draw(st.fractions(min_value=F(1, 5), max_value=3, max_denominator=10))
    h2 = draw(st.fractions(min_value=F(1, 5), max_value=3, max_denominator=10))
    s = draw(st.fractions(min_value=-1, max_value=1, max_denominator=10))
    v0 = Point(x0, y0)
    v1 = Point(x0 + h1, y0 + k * h1)
    v3 = Point(x0 + s, y0 - w)
    v2 = Point(v3.x + h2, v3.y + k * h2)
    try:
        return MarkedQuadrilateral([v0, v1, v2, v3])
    except ValueError:
        return None


@given(trapezoids())
def test_strip_lemma(q):
    if q is None:
        return
    (a0, a1), (b0, _) = q.vertical_edges
    n = (-(a1.y - a0.y), a1.x - a0.x)
    lo, hi = sorted((n[0] * a0.x + n[1] * a0.y, n[0] * b0.x + n[1] * b0.y))
    assert all(lo <= n[0] * v.x + n[1] * v.y <= hi for v in q.vertices)


def _verdict(status):
    return CoverVerdict(status)


def test_build_matrix_examples():
    c, n = CoverStatus.COVERED, CoverStatus.NOT_COVERED
    assert build_matrix([[_verdict(n)] * 2] * 2).tolist() == [[0, 0], [0, 0]]
    assert build_matrix([[_verdict(c)] * 3] * 3).tolist() == [[1] * 3] * 3
    assert build_matrix([[_verdict(CoverStatus.INDETERMINATE)]]).tolist() == [[0]]


def test_entropy_examples():
    eb = entropy_lower_bound(np.array([[1, 1], [1, 0]]), 4)
    assert 0.1203 < eb.bound < 0.12031
    assert eb.spectral_radius <= GOLDEN and GOLDEN - eb.spectral_radius <= 1e-9
    assert entropy_lower_bound(np.array([[1]]), 1).bound == 0
    assert entropy_lower_bound(np.array([[1, 1], [1, 1]]), 1).bound == pytest.approx(math.log(2), abs=1e-15)
    assert entropy_lower_bound(np.zeros((3, 3), dtype=int), 4).bound == 0
    with pytest.raises(ValueError):
        entropy_lower_bound(np.array([[2]]), 1)


def test_charpoly():
    assert charpoly([[1, 1], [1, 0]]) == [1, -1, -1]


binary = st.integers(2, 6).flatmap(
    lambda p: st.lists(st.lists(st.integers(0, 1), min_size=p, max_size=p), min_size=p, max_size=p))


@settings(max_examples=60, deadline=None)
@given(binary, st.integers(1, 4))
def test_bound_never_exceeds_truth(m, n):
    a = np.array(m)
    rho = max(abs(np.linalg.eigvals(a)))
    eb = entropy_lower_bound(a, n)
    assert eb.spectral_radius <= rho + 1e-9
    assert eb.bound <= max(math.log(rho), 0) / n + 1e-12 if rho > 0 else eb.bound == 0


@settings(max_examples=60, deadline=None)
@given(binary, st.data())
def test_demoting_never_raises_bound(m, data):
    a = np.array(m)
    ones = list(zip(*np.nonzero(a)))
    if not ones:
        return
    i, j = data.draw(st.sampled_from(ones))
    b = a.copy()
    b[i, j] = 0
    assert entropy_lower_bound(b, 1).bound <= entropy_lower_bound(a, 1).bound


def test_certify_report(boxes):
    rep = certify(JUMP, 4, list(boxes))
    doc = rep.to_json()
    assert doc["matrix"] == [[1, 1], [1, 0]]
    assert doc["verdicts"][1][1]["status"] == "NotCovered"
    assert doc["verdicts"][0][0]["clipped"] is not None
