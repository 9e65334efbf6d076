from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from farey_lab.dynamics import (
    FAREY_TRIANGLE,
    IDENTITY,
    ConvexPolygon,
    ExactPoint,
    HalfPlane,
    PieceMap,
    compose,
    farey_map,
    farey_map_lattice,
    label_range,
    piece_polygon,
    polygon_area,
    pullback_region,
    region_index,
    tail_polygon,
)
from farey_lab.farey import farey_arrays
from farey_lab.serialize import polygon_from_dict, polygon_to_dict

P = ExactPoint
half = Fraction(1, 2)


def test_map_examples():
    assert farey_map(P(Fraction(3, 5), Fraction(4, 5))) == P(Fraction(4, 5), 1)
    assert farey_map(P(1, 1)) == P(1, 1)
    assert region_index(P(Fraction(3, 5), Fraction(4, 5))) == 2
    assert region_index(P(1, 1)) == 2
    assert region_index(P(Fraction(2, 5), Fraction(4, 5))) == 1
    assert farey_map_lattice(5, 3, 4) == (4, 5)


def test_outside_triangle_rejected():
    for pt in (P(half, half), P(0, 0), P(Fraction(6, 5), half)):
        with pytest.raises(ValueError):
            region_index(pt)
    with pytest.raises(ValueError):
        farey_map_lattice(5, 2, 3)


def test_triangle_and_first_piece():
    assert FAREY_TRIANGLE.area == half
    T1 = piece_polygon(1)
    assert T1.area == Fraction(1, 6)
    assert set(T1.vertices) == {P(0, 1), P(1, 1), P(Fraction(1, 3), Fraction(2, 3))}


@pytest.mark.parametrize("k", range(2, 30))
def test_piece_area_closed_form(k):
    # independent closed form for k >= 2
    assert piece_polygon(k).area == Fraction(4, k * (k + 1) * (k + 2))


def test_pieces_plus_tail():
    total = Fraction(0)
    for K in range(1, 101):
        total += piece_polygon(K).area
        assert total + tail_polygon(K).area == half
    assert tail_polygon(100).area == Fraction(2, 101 * 102)
    assert half - total < half / 50


@pytest.mark.parametrize("k", range(1, 21))
def test_piece_map_determinant_and_area(k):
    f = PieceMap(k)
    assert f.determinant == 1
    (a, b), (c, d) = f.matrix
    (p, q), (r, s) = f.inverse
    assert (a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s) == (1, 0, 0, 1)
    T = piece_polygon(k)
    assert f.image(T).area == T.area


def test_images_tile_triangle():
    images = [PieceMap(k).image(piece_polygon(k)) for k in range(1, 21)]
    for j, A in enumerate(images):
        # each image lies in the closed triangle
        assert all(-pt.x + 1 >= 0 and -pt.y + 1 >= 0 and pt.x + pt.y >= 1 for pt in A.vertices)
        for B in images[j + 1:]:
            assert A.intersect(B).area == 0
    assert sum(A.area for A in images) + tail_polygon(20).area == half


def test_pullback_examples():
    assert pullback_region((1, 1)).is_empty
    for k in (1, 4, 9):
        assert pullback_region((k,)) == piece_polygon(k)
    assert pullback_region((1, 2)).area == Fraction(1, 30)


def test_pullback_frequency_matches_area():
    # pattern (nu_2(gamma_i), nu_2(gamma_{i+1})) = (1, 2) at Q = 10^4
    Q = 10_000
    _, q = farey_arrays(Q)
    u = np.concatenate(([1], q[:-1]))
    lab = (Q + u) // q
    hits = int(np.sum((lab == 1) & (np.roll(lab, -1) == 2)))
    expected = 6 / np.pi ** 2 * float(pullback_region((1, 2)).area)
    assert abs(hits / Q ** 2 - expected) / expected < 0.01


def _orbit_labels(pt, n):
    out = []
    for _ in range(n):
        out.append(region_index(pt))
        pt = farey_map(pt)
    return tuple(out)


@st.composite
def triangle_points(draw, Q_max=60):
    Q = draw(st.integers(1, Q_max))
    v = draw(st.integers(1, Q))
    u = draw(st.integers(Q - v + 1, Q))
    return P(Fraction(u, Q), Fraction(v, Q))


@given(triangle_points(), st.integers(1, 5))
def test_pullback_membership_is_orbit_labels(pt, n):
    xs = _orbit_labels(pt, n)
    R = pullback_region(xs)
    assert R.contains(pt.x, pt.y)
    other = xs[:-1] + (xs[-1] + 1,)
    assert not pullback_region(other).contains(pt.x, pt.y)


@given(triangle_points())
def test_map_preserves_triangle(pt):
    img = farey_map(pt)
    assert FAREY_TRIANGLE.contains(img.x, img.y)
    k = region_index(pt)
    assert piece_polygon(k).contains(pt.x, pt.y)
    assert PieceMap(k).image(piece_polygon(k)).contains(img.x, img.y)


@given(st.lists(st.integers(1, 8), min_size=1, max_size=4))
def test_pullback_regions_nested(xs):
    R = pullback_region(xs)
    parent = pullback_region(xs[:-1]) if len(xs) > 1 else FAREY_TRIANGLE
    assert R.area <= parent.area
    assert all(parent.contains(v.x, v.y) or not R.contains(v.x, v.y) for v in R.vertices)


def test_children_partition_parent():
    # the regions (xs, k) over all k cover the region xs
    for xs in [(1,), (2,), (3, 1), (2, 2)]:
        R = pullback_region(xs)
        total = sum(pullback_region(xs + (k,)).area for k in range(1, 400))
        assert R.area - total < Fraction(1, 10 ** 3)
        assert total <= R.area


def test_label_range_bounds_children():
    for xs in [(1,), (2,), (5,), (2, 3), (1, 4)]:
        R = pullback_region(xs)
        A = IDENTITY
        for x in xs:
            A = compose(x, A)
        lo, hi = label_range(R, A)
        for k in range(1, 60):
            area = pullback_region(xs + (k,)).area
            if area > 0:
                assert lo <= k and (hi is None or k <= hi)


@st.composite
def halfplanes(draw):
    a = draw(st.integers(-5, 5))
    b = draw(st.integers(-5, 5))
    assume(a or b)
    c = Fraction(draw(st.integers(-10, 10)), draw(st.integers(1, 5)))
    return HalfPlane(a, b, c, draw(st.booleans()))


@given(st.lists(halfplanes(), max_size=4), triangle_points())
def test_clip_membership(hs, pt):
    R = FAREY_TRIANGLE.clip_all(hs)
    inside = FAREY_TRIANGLE.contains(pt.x, pt.y) and all(h.contains(pt.x, pt.y) for h in hs)
    assert R.contains(pt.x, pt.y) == inside
    assert 0 <= R.area <= half
    if R.is_empty:
        assert R.area == 0


@given(st.lists(halfplanes(), max_size=3))
def test_clip_complement_areas(hs):
    h = hs[0] if hs else HalfPlane(1, -2, 0)
    R = FAREY_TRIANGLE.clip_all(hs[1:])
    flipped = HalfPlane(-h.alpha, -h.beta, -h.gamma, not h.strict)
    assert R.clip(h).area + R.clip(flipped).area == R.area


def test_polygon_round_trip():
    R = pullback_region((2, 3, 1))
    assert polygon_from_dict(polygon_to_dict(R)) == R
    assert polygon_area(ConvexPolygon((), (), ())) == 0
