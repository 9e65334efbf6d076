"""Farey sequences F_Q, the restricted sets F_{Q,d} and their gap numerators.

Fractions live in (0, 1]; 0/1 only ever appears as the periodic image of
1/1 (gamma_0 = gamma_N - 1), which seeds the next-term recurrence.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterator, NamedTuple

import numpy as np

from farey_lab import _kernels


class FareyFraction(NamedTuple):
    """Reduced fraction a/q with q > 0."""

    a: int
    q: int

    def __str__(self) -> str:
        return f"{self.a}/{self.q}"

    def shift(self, n: int) -> "FareyFraction":
        """gamma + n, the periodic image one or more periods away."""
        return FareyFraction(self.a + n * self.q, self.q)

    def as_fraction(self):
        from fractions import Fraction

        return Fraction(self.a, self.q)

    @classmethod
    def parse(cls, text: str) -> "FareyFraction":
        a, _, q = text.partition("/")
        return reduced(int(a), int(q or 1))


def reduced(a: int, q: int) -> FareyFraction:
    if q == 0:
        raise ValueError("zero denominator")
    if q < 0:
        a, q = -a, -q
    g = gcd(a, q)
    return FareyFraction(a // g, q // g)


def det(left: FareyFraction, right: FareyFraction) -> int:
    """Numerator of right - left over the product of denominators."""
    return left.q * right.a - left.a * right.q


def farey_next(Q: int, prev: FareyFraction, cur: FareyFraction) -> FareyFraction:
    """Successor of `cur` in the periodically extended F_Q."""
    if det(prev, cur) != 1:
        raise ValueError(f"{prev} and {cur} are not unimodular neighbours")
    t = (Q + prev.q) // cur.q
    return FareyFraction(t * cur.a - prev.a, t * cur.q - prev.q)


@dataclass
class FareyCursor:
    """Walks the extended sequence three terms at a time.

    `index` is the position of `cur`: gamma_index == cur, and
    gamma_{i + N(Q)} = gamma_i + 1.
    """

    Q: int
    prev: FareyFraction = FareyFraction(0, 1)
    cur: FareyFraction = None
    index: int = 1

    def __post_init__(self):
        if self.Q < 1:
            raise ValueError("Q must be >= 1")
        if self.cur is None:
            self.cur = FareyFraction(1, self.Q)

    def peek(self) -> FareyFraction:
        return farey_next(self.Q, self.prev, self.cur)

    def advance(self) -> FareyFraction:
        self.prev, self.cur = self.cur, self.peek()
        self.index += 1
        return self.cur


def farey_sequence(Q: int) -> Iterator[FareyFraction]:
    """Yield F_Q in increasing order from 1/Q to 1/1."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    cursor = FareyCursor(Q)
    yield cursor.cur
    while cursor.cur.q != 1:
        yield cursor.advance()


def restricted_sequence(Q: int, d: int) -> Iterator[FareyFraction]:
    """Yield F_{Q,d}: the terms of F_Q whose denominator is coprime to d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    for f in farey_sequence(Q):
        if gcd(f.q, d) == 1:
            yield f


def totient_sum(Q: int) -> int:
    """#F_Q = phi(1) + ... + phi(Q)."""
    return int(_kernels.totient_table(Q)[1:].sum())


def restricted_count(Q: int, d: int) -> int:
    """#F_{Q,d}."""
    phi = _kernels.totient_table(Q)
    qs = np.arange(Q + 1)
    mask = np.gcd(qs, d) == 1
    mask[0] = False
    return int(phi[mask].sum())


@lru_cache(maxsize=8)
def _arrays(Q: int) -> tuple[np.ndarray, np.ndarray]:
    a, q = _kernels.farey_arrays(Q, totient_sum(Q))
    a.setflags(write=False)
    q.setflags(write=False)
    return a, q


def farey_arrays(Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Materialised numerators/denominators of gamma_1 .. gamma_N (read-only)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if Q > 20_000:
        raise ValueError("materialising F_Q is limited to Q <= 20000; stream instead")
    return _arrays(Q)


def extended_arrays(Q: int, before: int = 1, after: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Arrays for gamma_{1-before} .. gamma_{N+after} with the periodic shift applied.

    Element j of the result is gamma_{j + 1 - before}.
    """
    a, q = farey_arrays(Q)
    n = a.shape[0]
    reps_lo = -(-before // n)
    reps_hi = -(-after // n)
    blocks_a = [a + s * q for s in range(-reps_lo, reps_hi + 1)]
    blocks_q = [q] * (reps_lo + reps_hi + 1)
    ea = np.concatenate(blocks_a)
    eq = np.concatenate(blocks_q)
    start = reps_lo * n - before
    stop = reps_lo * n + n + after
    return ea[start:stop], eq[start:stop]


def fraction_at(Q: int, i: int) -> FareyFraction:
    """gamma_i of the periodically extended F_Q, for any integer i."""
    a, q = farey_arrays(Q)
    shift, r = divmod(i - 1, a.shape[0])
    return FareyFraction(int(a[r]) + shift * int(q[r]), int(q[r]))


@dataclass
class GapHistogram:
    Q: int
    d: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, k: int) -> int:
        return self.counts.get(k, 0)

    def to_dict(self) -> dict:
        return {
            "Q": self.Q,
            "d": self.d,
            "counts": {str(k): self.counts[k] for k in sorted(self.counts)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "GapHistogram":
        return cls(int(obj["Q"]), int(obj["d"]), {int(k): int(v) for k, v in obj["counts"].items()})

    @classmethod
    def from_json(cls, text: str) -> "GapHistogram":
        return cls.from_dict(json.loads(text))


def gap_numerator_counts_reference(Q: int, d: int) -> GapHistogram:
    """Pure-integer streaming version; slow, but has no width limits."""
    counts: dict[int, int] = {}
    first = None
    last = None
    for f in restricted_sequence(Q, d):
        if first is None:
            first = f
        else:
            k = det(last, f)
            counts[k] = counts.get(k, 0) + 1
        last = f
    # wrap-around gap: last (always 1/1) to first + 1
    k = det(last, first.shift(1))
    counts[k] = counts.get(k, 0) + 1
    return GapHistogram(Q, d, dict(sorted(counts.items())))


def gap_numerator_counts(Q: int, d: int) -> GapHistogram:
    """N_{Q,d}(k) for every k that occurs, with circular gap convention."""
    if Q < 1 or d < 1:
        raise ValueError("Q and d must be >= 1")
    if Q > _kernels.MAX_FAST_Q:
        return gap_numerator_counts_reference(Q, d)
    cap = 2 * Q + 2
    dense, overflow = _kernels.gap_histogram(Q, d, cap)
    counts = {int(k): int(c) for k, c in enumerate(dense) if c}
    for k in overflow.tolist():
        counts[k] = counts.get(k, 0) + 1
    return GapHistogram(Q, d, dict(sorted(counts.items())))
