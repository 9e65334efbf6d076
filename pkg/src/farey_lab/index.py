"""ell-indices of the Farey sequence and the continuant identity behind them.

For gamma_i in F_Q the ell-index is

    nu_ell(gamma_i) = a_{i+ell-1} q_{i-1} - a_{i-1} q_{i+ell-1},

the gap numerator across ell consecutive steps.  It is recovered from the
2-indices alone by

    nu_ell(gamma_i) = (2ell-1 | 2) K_{ell-1}(-nu_2(gamma_i), nu_2(gamma_{i+1}), ...,
                                           (-1)^{ell-1} nu_2(gamma_{i+ell-2}))

with K the continuant and (.|2) the Kronecker symbol at 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np

from farey_lab.farey import FareyFraction, det, extended_arrays, farey_arrays, fraction_at


@dataclass(frozen=True)
class IndexWindow:
    """gamma_{i-1}, ..., gamma_{i+ell-1} of the extended F_Q (ell + 1 terms)."""

    Q: int
    i: int
    ell: int
    fractions: tuple[FareyFraction, ...]

    def __post_init__(self):
        if len(self.fractions) != self.ell + 1:
            raise ValueError("window must hold ell + 1 fractions")

    def __str__(self) -> str:
        body = ", ".join(str(f) for f in self.fractions)
        return f"Q={self.Q} i={self.i} ell={self.ell}: [{body}]"


def index_window(Q: int, i: int, ell: int) -> IndexWindow:
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return IndexWindow(Q, i, ell, tuple(fraction_at(Q, j) for j in range(i - 1, i + ell)))


def _check_consecutive(Q: int, fractions: Sequence[FareyFraction]) -> None:
    for left, right in zip(fractions, fractions[1:]):
        if det(left, right) != 1 or left.q + right.q <= Q:
            raise ValueError(f"{left}, {right} are not consecutive in F_{Q}")


def two_index(Q: int, window: IndexWindow | Sequence[FareyFraction]) -> int:
    """nu_2 of the middle term of three consecutive fractions."""
    fractions = window.fractions if isinstance(window, IndexWindow) else tuple(window)
    if len(fractions) != 3:
        raise ValueError("two_index needs exactly three fractions")
    _check_consecutive(Q, fractions)
    before, _, after = fractions
    return det(before, after)


def ell_index(Q: int, i: int, ell: int) -> int:
    window = index_window(Q, i, ell)
    return det(window.fractions[0], window.fractions[-1])


def continuant(xs: Sequence[int]) -> int:
    """K_n(x_1, ..., x_n) with K_0 = 1, K_1 = x_1, K_n = x_n K_{n-1} + K_{n-2}."""
    prev, cur = 0, 1
    for x in xs:
        prev, cur = cur, x * cur + prev
    return cur


def kronecker_two(n: int) -> int:
    """Kronecker symbol (n | 2)."""
    if n % 2 == 0:
        return 0
    return 1 if n % 8 in (1, 7) else -1


def signed_arguments(nu2s: Sequence[int]) -> list[int]:
    """(-x_1, x_2, -x_3, ...): the alternating signs fed to the continuant."""
    return [x if j % 2 else -x for j, x in enumerate(nu2s)]


def identity_value(nu2s: Sequence[int]) -> int:
    """Right-hand side of the index identity for a tuple of ell - 1 two-indices."""
    ell = len(nu2s) + 1
    return kronecker_two(2 * ell - 1) * continuant(signed_arguments(nu2s))


def index_identity_check(Q: int, i: int, ell: int) -> bool:
    if ell < 1:
        raise ValueError("ell must be >= 1")
    nu2s = [ell_index(Q, j, 2) for j in range(i, i + ell - 1)]
    return ell_index(Q, i, ell) == identity_value(nu2s)


# -- vectorised sweeps over a whole period -------------------------------

def two_index_array(Q: int, extra: int = 0) -> np.ndarray:
    """nu_2(gamma_i) for i = 1 .. N + extra, from the defining determinant."""
    ea, eq = extended_arrays(Q, before=1, after=extra + 1)
    return ea[2:] * eq[:-2] - ea[:-2] * eq[2:]


def identity_violations(Q: int, ell_max: int) -> list[IndexWindow]:
    """Every window of F_Q with ell <= ell_max where the identity fails."""
    n = farey_arrays(Q)[0].shape[0]
    ea, eq = extended_arrays(Q, before=1, after=ell_max)
    nu2 = two_index_array(Q, extra=ell_max)
    bad: list[IndexWindow] = []
    for ell in range(1, ell_max + 1):
        lhs = ea[ell:ell + n] * eq[:n] - ea[:n] * eq[ell:ell + n]
        prev = np.zeros(n, dtype=np.int64)
        cur = np.ones(n, dtype=np.int64)
        for j in range(ell - 1):
            x = nu2[j:j + n] if j % 2 else -nu2[j:j + n]
            prev, cur = cur, x * cur + prev
        rhs = kronecker_two(2 * ell - 1) * cur
        for i in np.flatnonzero(lhs != rhs):
            bad.append(index_window(Q, int(i) + 1, ell))
    return bad


@dataclass(frozen=True)
class NeighbourhoodViolation:
    Q: int
    k: int
    i: int
    offset: int
    expected: int
    found: int
    window: IndexWindow

    def __str__(self) -> str:
        return (f"Q={self.Q} k={self.k}: nu_2(gamma_{{{self.i}{self.offset:+d}}}) = {self.found}, "
                f"expected {self.expected}; {self.window}")


def lemma1_check(Q: int, k: int, nu2: np.ndarray | None = None) -> list[NeighbourhoodViolation]:
    """Scan F_Q for a large 2-index not flanked by 1 and then k - 1 twos.

    Whenever nu_2(gamma_i) >= 4k + 1 the neighbours must satisfy
    nu_2(gamma_{i+-1}) = 1 and nu_2(gamma_{i+-j}) = 2 for 2 <= j <= k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if nu2 is None:
        nu2 = two_index_array(Q)
    n = nu2.shape[0]
    out: list[NeighbourhoodViolation] = []
    for i in np.flatnonzero(nu2 >= 4 * k + 1):
        for j in range(1, k + 1):
            expected = 1 if j == 1 else 2
            for off in (-j, j):
                found = int(nu2[(i + off) % n])
                if found != expected:
                    centre = int(i) + 1
                    window = index_window(Q, centre - k + 1, 2 * k)
                    out.append(NeighbourhoodViolation(Q, k, centre, off, expected, found, window))
    return out


@dataclass(frozen=True)
class MediantChain:
    """Mediant chains through gamma_i = a_i/q_i.

    a'/q' < gamma_i < a''/q'' are the neighbours of gamma_i in F_{q_i};
    b_m/r_m = (a' + m a_i)/(q' + m q_i) and c_m/s_m = (a'' + m a_i)/(q'' + m q_i),
    and M, N are the largest m with r_m <= Q, s_m <= Q.
    """

    Q: int
    base: FareyFraction
    left: FareyFraction
    right: FareyFraction
    M: int
    N: int

    def b(self, m: int) -> FareyFraction:
        return FareyFraction(self.left.a + m * self.base.a, self.left.q + m * self.base.q)

    def c(self, m: int) -> FareyFraction:
        return FareyFraction(self.right.a + m * self.base.a, self.right.q + m * self.base.q)

    @property
    def two_index(self) -> int:
        return (self.b(self.M).q + self.c(self.N).q) // self.base.q


def flanking_neighbours(f: FareyFraction) -> tuple[FareyFraction, FareyFraction]:
    """Neighbours of f in F_{f.q} (periodic extension, so n/1 gets (n-1)/1, (n+1)/1)."""
    a, q = f
    if q == 1:
        return FareyFraction(a - 1, 1), FareyFraction(a + 1, 1)
    ql = pow(a, -1, q)
    left = FareyFraction((a * ql - 1) // q, ql)
    return left, FareyFraction(a - left.a, q - ql)


def mediant_chain(Q: int, i: int) -> MediantChain:
    base = fraction_at(Q, i)
    left, right = flanking_neighbours(base)
    M = (Q - left.q) // base.q
    N = (Q - right.q) // base.q
    chain = MediantChain(Q, base, left, right, M, N)
    nu2 = ell_index(Q, i, 2)
    if (chain.b(M).q + chain.c(N).q) != nu2 * base.q:
        raise AssertionError(f"(r_M + s_N)/q_i != nu_2 at {base} in F_{Q}")
    # q_i = 1 has q' + q'' = 2 q_i, which shifts the count by one
    if base.q > 1 and M + N + 1 != nu2:
        raise AssertionError(f"M + N + 1 != nu_2 at {base} in F_{Q}")
    for m in range(M + 1):
        b = chain.b(m)
        if gcd(b.a, b.q) != 1:
            raise AssertionError(f"b_{m} = {b} is not reduced")
    for m in range(N + 1):
        c = chain.c(m)
        if gcd(c.a, c.q) != 1:
            raise AssertionError(f"c_{m} = {c} is not reduced")
    return chain
