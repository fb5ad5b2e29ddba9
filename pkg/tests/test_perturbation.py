from fractions import Fraction as F

import pytest

from lozicert.covering import VERTEX_OFFSETS
from lozicert.fixed_points import f2_point
from lozicert.geometry import Point
from lozicert.lozi import orbit_itinerary
from lozicert.perturbation import (
    VERTEX_NAMES,
    coefficient_drift,
    covering_family_check,
    exact_vertex_image,
    jump_params,
    vertex_expansion,
)
from lozicert.trapping import segment_family_params


def test_examples():
    a = vertex_expansion(0, "A")
    assert (a.x_lin, a.y_lin) == (F(30476, 18125), F(-6363, 3625))
    assert a.constant == Point(F(0), F(15, 29))
    h = vertex_expansion(0, "H")
    assert (h.x_lin, h.y_lin) == (F(113584, 54375), F(-22917, 10875))


@pytest.mark.parametrize("vid", VERTEX_NAMES)
@pytest.mark.parametrize("eps2", [F(0), F(1, 1000)])
def test_linear_term_matches_exact_images(vid, eps2):
    # independent oracle: exact rational images at two small eps1 values
    pair = vertex_expansion(eps2, vid)
    for e in (F(1, 10**4), F(1, 10**5)):
        img = exact_vertex_image(e, eps2, vid)
        assert abs(img.x - pair.constant.x - pair.x_lin * e) <= 100 * e * e
        assert abs(img.y - pair.constant.y - pair.y_lin * e) <= 100 * e * e


def test_drift():
    assert coefficient_drift(0).max_drift == 0
    d = coefficient_drift(F(1, 1000)).max_drift
    assert 0 < d < F(1, 10)
    table = coefficient_drift(F(-1, 1000))
    h = f2_point(segment_family_params(F(-1, 1000)))
    assert all(r.constant == h for r in table.rows)


@pytest.mark.parametrize("eps2", [F(0), F(1, 1000), F(-1, 1000)])
def test_constant_term_law(eps2):
    base = segment_family_params(eps2)
    h = f2_point(base).y
    for vid in VERTEX_NAMES:
        assert vertex_expansion(eps2, vid).constant == exact_vertex_image(0, eps2, vid) == Point(F(0), h)


def test_sign_log_follows_vertex_orbits():
    p = jump_params(F(1, 10**6), 0)
    for vid in VERTEX_NAMES:
        dx, dy = VERTEX_OFFSETS[vid]
        e = F(1, 10**6)
        pt = Point(dx * e, F(15, 29) + dy * e)
        assert vertex_expansion(0, vid).signs == orbit_itinerary(p, pt, 4)


def test_sign_log_matches_f2_orbit_when_vertex_is_right_of_axis():
    f2_signs = orbit_itinerary(segment_family_params(0), Point(F(0), F(15, 29)), 4)
    for vid in VERTEX_NAMES:
        if VERTEX_OFFSETS[vid][0] >= 0:
            assert vertex_expansion(0, vid).signs == f2_signs


def test_regime_flag():
    assert not vertex_expansion(F(1, 1000), "A").outside_regime
    assert vertex_expansion(F(1, 10), "A").outside_regime
    with pytest.raises(KeyError):
        vertex_expansion(0, "Z")


def test_truncated_display():
    a = vertex_expansion(0, "A")
    assert a.truncated() == (F(168, 100), F(-175, 100))
    assert a.rounded() == (1.68, -1.76)


def test_family_check():
    rep = covering_family_check(F(1, 10000), F(1, 1000))
    assert rep.matrix.tolist() == [[1, 1], [1, 0]]
    wide = covering_family_check(F(1, 2), 0)
    assert wide.matrix.size == 2
