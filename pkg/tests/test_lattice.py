from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from farey_lab.dynamics import FAREY_TRIANGLE, ConvexPolygon, HalfPlane
from farey_lab.farey import totient_sum
from farey_lab.lattice import (
    ResiduePairSet,
    count_report,
    euler_factor,
    lemma2_residual_sweep,
    main_term,
    main_term_factor,
    naive_visible_count,
    reports_to_csv,
    visible_count,
)

from polygons import random_polygon

box = ConvexPolygon.rectangle


def test_square_example():
    S = ResiduePairSet(2, frozenset({(1, 0)}))
    omega = box(1, 4, 1, 4)
    assert visible_count(omega, S) == 4
    assert visible_count(omega, S, method="rows") == 4
    assert naive_visible_count(omega, S) == 4
    assert visible_count(omega, ResiduePairSet(2, frozenset())) == 0


@pytest.mark.parametrize("Q", [1, 2, 10, 97, 500])
def test_scaled_triangle_counts_farey_pairs(Q):
    S = ResiduePairSet.everything(1)
    assert visible_count(FAREY_TRIANGLE.scaled(Q), S) == totient_sum(Q)


def test_euler_factor_and_main_term():
    assert euler_factor(1) == 1
    assert euler_factor(6) == Fraction(3, 2)
    assert euler_factor(12) == Fraction(3, 2)
    assert main_term_factor(Fraction(7, 3), 4, 2) == Fraction(7, 3) * Fraction(4, 3)
    Q = 100
    assert main_term(box(0, Q, 0, Q), ResiduePairSet.everything(1)) == pytest.approx(6 / math.pi ** 2 * Q * Q)
    flat = box(0, 5, 2, 2)
    assert main_term(flat, ResiduePairSet.everything(3)) == 0


def test_residue_pair_set_validation():
    with pytest.raises(ValueError):
        ResiduePairSet(4, frozenset({(2, 1)}))
    S = ResiduePairSet(6, frozenset({(7, -1)}))
    assert S.pairs == frozenset({(1, 5)})
    assert (13, 11) in S
    assert ResiduePairSet.coprime(6).is_product()
    assert len(ResiduePairSet.everything(6)) == 12
    assert not ResiduePairSet(6, frozenset({(1, 0), (5, 1)})).is_product()


@st.composite
def polygons(draw, size=120):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_polygon(np.random.default_rng(seed), size=size, cuts=draw(st.integers(0, 4)))


@st.composite
def pair_sets(draw):
    d = draw(st.sampled_from([1, 2, 3, 4, 5, 6, 10, 12]))
    units = [a for a in range(d) if math.gcd(a, d) == 1]
    all_pairs = [(a, b) for a in units for b in range(d)]
    chosen = draw(st.sets(st.sampled_from(all_pairs), max_size=len(all_pairs)))
    return ResiduePairSet(d, frozenset(chosen))


@given(polygons(), pair_sets())
def test_counting_methods_agree(omega, S):
    n = naive_visible_count(omega, S)
    assert visible_count(omega, S, "sieve") == n
    assert visible_count(omega, S, "rows") == n


@given(polygons(), pair_sets(), st.integers(-4, 4), st.integers(-4, 4), st.integers(-300, 300), st.booleans())
def test_additivity_over_a_cut(omega, S, a, b, c, strict):
    if a == 0 and b == 0:
        a = 1
    h = HalfPlane(a, b, c, strict)
    other = HalfPlane(-a, -b, -c, not strict)
    assert visible_count(omega.clip(h), S) + visible_count(omega.clip(other), S) == visible_count(omega, S)


@given(polygons(), pair_sets(), pair_sets())
def test_additivity_over_pair_sets(omega, S, T):
    if S.d != T.d:
        T = ResiduePairSet(S.d, frozenset())
    union = S.union(T)
    both = ResiduePairSet(S.d, S.pairs & T.pairs)
    assert visible_count(omega, union) == visible_count(omega, S) + visible_count(omega, T) - visible_count(omega, both)


@given(polygons(), pair_sets(), st.integers(-4, 4), st.integers(-4, 4), st.integers(-300, 300))
def test_monotone_in_region(omega, S, a, b, c):
    if a == 0 and b == 0:
        b = 1
    assert visible_count(omega.clip(HalfPlane(a, b, c)), S) <= visible_count(omega, S)


def test_density_at_2000():
    Q = 2000
    n = visible_count(FAREY_TRIANGLE.scaled(Q), ResiduePairSet.everything(1))
    assert abs(n / Q ** 2 - 3 / math.pi ** 2) / (3 / math.pi ** 2) < 0.02
    sq = visible_count(box(1, Q, 1, Q), ResiduePairSet.everything(1))
    assert abs(sq / Q ** 2 - 6 / math.pi ** 2) < 0.02 * 6 / math.pi ** 2


def test_residual_sweep_and_csv():
    shapes = [FAREY_TRIANGLE, box(0, 1, 0, Fraction(1, 2))]
    S = ResiduePairSet.coprime(6)
    reports = lemma2_residual_sweep(shapes, S, [50, 200, 800])
    assert len(reports) == 6
    for r in reports:
        assert r.d == 6 and r.pairs == 4
        # O(area/Q + perimeter log Q) with a modest constant at these sizes
        assert r.normalized_residual < 5
    text = reports_to_csv(reports)
    lines = text.split("\n")
    assert lines[0].startswith("Q,d,area_num") and text.endswith("\n") and "\r" not in text
    assert len(lines) == 8


def test_count_report_fields():
    r = count_report(FAREY_TRIANGLE, ResiduePairSet.everything(1), 100)
    assert r.exact == totient_sum(100)
    assert r.area == 5000
    assert r.residual == pytest.approx(r.exact - 3 / math.pi ** 2 * 10 ** 4)
