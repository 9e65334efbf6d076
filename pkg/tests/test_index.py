from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from farey_lab import farey as fr
from farey_lab.farey import FareyFraction as F
from farey_lab.index import (
    continuant,
    ell_index,
    flanking_neighbours,
    identity_value,
    identity_violations,
    index_identity_check,
    index_window,
    kronecker_two,
    lemma1_check,
    mediant_chain,
    signed_arguments,
    two_index,
    two_index_array,
)

from oracles import farey_by_sorting


def test_two_index_examples():
    assert two_index(5, [F(1, 3), F(2, 5), F(1, 2)]) == 1
    assert two_index(5, [F(2, 5), F(1, 2), F(3, 5)]) == 5
    assert two_index(5, [F(1, 2), F(3, 5), F(2, 3)]) == 1


def test_two_index_rejects_gaps():
    with pytest.raises(ValueError):
        two_index(5, [F(1, 3), F(1, 2), F(3, 5)])


def test_ell_index_examples():
    # gamma_4 = 2/5 in F_5
    assert ell_index(5, 4, 3) == 4
    assert ell_index(5, 4, 2) == 1
    assert all(ell_index(Q, i, 1) == 1 for Q in (1, 5, 17) for i in range(-3, 30))


def test_continuant_examples():
    assert continuant(()) == 1
    assert continuant((1, 1, 1)) == 3
    assert continuant((-1, 5)) == -4
    assert continuant((7,)) == 7


def test_kronecker_two():
    assert kronecker_two(4) == 0
    assert kronecker_two(7) == 1
    assert kronecker_two(5) == -1
    assert [kronecker_two(n) for n in range(1, 17)] == \
        [1, 0, -1, 0, -1, 0, 1, 0, 1, 0, -1, 0, -1, 0, 1, 0]


def test_identity_examples():
    assert index_identity_check(5, 4, 3)
    assert signed_arguments([1, 5]) == [-1, 5]
    assert identity_value([1, 5]) == 4
    assert identity_value([]) == 1


@given(st.lists(st.integers(-6, 6), max_size=7))
def test_continuant_recurrences(xs):
    # forward recurrence K_l = x_l K_{l-1} + K_{l-2} and the reversal symmetry
    k_prev, k_cur = 0, 1
    for x in xs:
        k_prev, k_cur = k_cur, x * k_cur + k_prev
    assert continuant(xs) == k_cur
    assert continuant(xs[::-1]) == k_cur


@given(st.lists(st.integers(1, 12), min_size=1, max_size=6))
def test_identity_value_matches_index_recurrence(xs):
    # nu_0 = 0, nu_1 = 1, nu_{j+1} = x_j nu_j - nu_{j-1}
    nu_prev, nu = 0, 1
    for x in xs:
        nu_prev, nu = nu, x * nu - nu_prev
    assert identity_value(xs) == nu


def _ell_index_naive(Q, i, ell):
    seq = farey_by_sorting(Q)
    n = len(seq)

    def gamma(j):
        shift, r = divmod(j - 1, n)
        return seq[r] + shift

    left, right = gamma(i - 1), gamma(i + ell - 1)
    return right.numerator * left.denominator - left.numerator * right.denominator


@given(st.integers(1, 30), st.integers(-40, 80), st.integers(1, 6))
def test_ell_index_matches_sorting_oracle(Q, i, ell):
    assert ell_index(Q, i, ell) == _ell_index_naive(Q, i, ell)


@given(st.integers(1, 120), st.integers(1, 7))
def test_identity_holds(Q, ell):
    n = fr.totient_sum(Q)
    for i in range(1, n + 1, max(1, n // 40)):
        assert index_identity_check(Q, i, ell)


@pytest.mark.parametrize("Q", [1, 2, 3, 10, 57, 200])
def test_identity_sweep_vectorised(Q):
    assert identity_violations(Q, 6) == []


def test_two_index_array_matches_scalar():
    Q = 37
    arr = two_index_array(Q, extra=3)
    n = fr.totient_sum(Q)
    assert arr.shape == (n + 3,)
    assert all(arr[i - 1] == ell_index(Q, i, 2) for i in range(1, n + 4))
    # the label formula floor((Q + q_{i-1}) / q_i)
    ea, eq = fr.extended_arrays(Q, before=1, after=0)
    assert np.array_equal(arr[:n], (Q + eq[:-1]) // eq[1:])


def test_neighbourhood_check_examples():
    assert lemma1_check(5, 1) == []
    assert lemma1_check(1, 1) == []
    with pytest.raises(ValueError):
        lemma1_check(5, 0)


def test_neighbourhood_check_detects_injected_fault():
    Q = 50
    nu2 = two_index_array(Q).copy()
    i = int(np.flatnonzero(nu2 >= 9)[0])
    nu2[i + 1] = 7
    bad = lemma1_check(Q, 2, nu2)
    assert bad and bad[0].i == i + 1 and bad[0].found == 7
    assert "expected 1" in str(bad[0])


@pytest.mark.parametrize("Q", [2, 5, 11, 40])
def test_neighbourhood_check_small(Q):
    for k in range(1, 6):
        assert lemma1_check(Q, k) == []


def test_window_str_shows_fractions():
    w = index_window(5, 4, 3)
    assert [str(f) for f in w.fractions] == ["1/3", "2/5", "1/2", "3/5"]
    assert "2/5" in str(w)


def test_mediant_chain_example():
    ch = mediant_chain(5, 5)    # gamma_5 = 1/2
    assert (ch.left, ch.right) == (F(0, 1), F(1, 1))
    assert (ch.M, ch.N) == (2, 2)
    assert ch.b(2) == F(2, 5) and ch.c(2) == F(3, 5)
    assert ch.two_index == 5


def test_flanking_neighbours():
    assert flanking_neighbours(F(2, 5)) == (F(1, 3), F(1, 2))
    assert flanking_neighbours(F(3, 1)) == (F(2, 1), F(4, 1))


@given(st.integers(1, 80), st.data())
def test_mediant_chain_formula(Q, data):
    n = fr.totient_sum(Q)
    i = data.draw(st.integers(1, n))
    ch = mediant_chain(Q, i)
    nu2 = ell_index(Q, i, 2)
    assert ch.two_index == nu2
    assert ch.M + ch.N + (2 if ch.base.q == 1 else 1) == nu2
    # the chain ends are the actual neighbours of gamma_i in F_Q
    assert ch.b(ch.M) == fr.fraction_at(Q, i - 1)
    assert ch.c(ch.N) == fr.fraction_at(Q, i + 1)
