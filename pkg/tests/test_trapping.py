from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lozicert.fixed_points import f2_point
from lozicert.geometry import ConvexPolygon, Point, contains_polygon, intersect_polygons, square
from lozicert.lozi import BASE_PARAMS, LoziParams, compose_branch
from lozicert.trapping import (
    FragmentBudgetExceeded,
    image_piecewise,
    segment_family_params,
    split_by_itinerary,
    stable_slope,
    trapping_region_for,
    trapping_vertices,
    verify_trapping,
)

from _support import n_fold, small, squares

P = BASE_PARAMS
Q = Point.of
F1, F2 = Q(F(-20, 29), F(35, 29)), Q(0, F(15, 29))


def test_image_examples():
    one = image_piecewise(P, 1, square(1, 0, 1))
    assert [it for it, _, _ in one.pieces] == ["+"]
    two = image_piecewise(P, 1, square(-1, -1, 2))
    assert sorted(it for it, _, _ in two.pieces) == ["+", "-"]
    r = trapping_region_for(P)
    assert all(contains_polygon(r, img) for img in image_piecewise(P, 4, r).images)


def test_hexagon_matches_listed_vertices():
    v = trapping_vertices(P)
    assert v["R1"] == Q(F(-20, 29), F(35, 29) + F(1, 5))
    assert v["R2"] == Q(F(-20, 29) + F(1, 10), F(35, 29) - F(1, 4))
    assert v["R3"] == Q(0, F(15, 29) - F(1, 4))
    assert v["R4"] == Q(F(-1, 5), F(15, 29) + F(1, 2))
    assert v["F1"] == F1 and v["F2"] == F2
    assert len(trapping_region_for(P)) == 6


def test_stable_slope():
    assert stable_slope(P) == F(-5, 2)
    v = trapping_vertices(P)
    for a, b in ((v["F1"], v["R2"]), (v["F2"], v["R4"])):
        assert (b.y - a.y) / (b.x - a.x) == F(-5, 2)
    # float cross-check against the branch Jacobian at F1
    m = np.array([[float(x) for x in row] for row in compose_branch(P, "-+-+").linear])
    w, vecs = np.linalg.eig(m)
    s = vecs[:, np.argmin(abs(w))]
    assert abs(s[1] / s[0] + 2.5) <= 1e-12


def test_default_pass_and_failures():
    assert verify_trapping(P, 4, trapping_region_for(P), 2).passed
    bumped = LoziParams(P.a + F(1, 100), P.b)
    cert = verify_trapping(bumped, 4, trapping_region_for(P), 1)
    assert not cert.passed and cert.offending[0] == 1


def test_sleeve_fails_with_witness():
    d = F(1, 100)
    sleeve = ConvexPolygon.from_points([F1 + Q(d, d), F2 + Q(d, d), F2 - Q(d, d), F1 - Q(d, d)])
    cert = verify_trapping(P, 4, sleeve, 1)
    assert not cert.passed
    step, it, poly = cert.offending
    assert step == 1 and not contains_polygon(sleeve, poly)


@pytest.mark.parametrize("eps2", [F(1, 1000), F(-1, 1000)])
def test_perturbed_hexagon(eps2):
    p = segment_family_params(eps2)
    assert trapping_vertices(p)["F2"] == f2_point(p)
    cert = verify_trapping(p, 4, trapping_region_for(p), 2)
    assert cert.passed
    assert all(s.area == s.expected_area for s in cert.steps)


@settings(max_examples=40, deadline=None)
@given(squares(), st.integers(1, 4))
def test_area_bookkeeping(src, n):
    img = image_piecewise(P, n, src)
    assert img.total_area() == abs(P.b) ** n * src.area()


@settings(max_examples=40, deadline=None)
@given(squares(), st.integers(1, 4))
def test_fragments_partition(src, n):
    frags = [f for _, f in split_by_itinerary(P, n, src)]
    assert sum(f.area() for f in frags) == src.area()
    for i in range(len(frags)):
        for j in range(i + 1, len(frags)):
            assert intersect_polygons(frags[i], frags[j]) is None


def test_monotone_in_steps():
    r = trapping_region_for(P)
    bumped = LoziParams(P.a + F(1, 100), P.b)
    for params in (P, bumped):
        for k in (2, 3):
            if verify_trapping(params, 4, r, k).passed:
                assert verify_trapping(params, 4, r, k - 1).passed


def test_segment_endpoints_fixed():
    assert n_fold(P, F1, 4) == F1 and n_fold(P, F2, 4) == F2


def test_budget_error():
    with pytest.raises(FragmentBudgetExceeded):
        image_piecewise(P, 8, square(-3, -3, 6), budget=8)


def test_contraction_diagnostic():
    cert = verify_trapping(P, 4, trapping_region_for(P), 2, segment=(F1, F2))
    d1, d2 = (s.max_distance_to_segment for s in cert.steps)
    assert d2 < d1


def test_steps_must_be_positive():
    with pytest.raises(ValueError):
        verify_trapping(P, 4, trapping_region_for(P), 0)


def test_region_needs_segment_family():
    with pytest.raises(ValueError):
        trapping_region_for(LoziParams(F(3, 2), F(2, 5)))
