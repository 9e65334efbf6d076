"""Visible lattice points in convex regions under residue constraints mod d."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from farey_lab.dynamics import ConvexPolygon, HalfPlane


@dataclass(frozen=True)
class ResiduePairSet:
    """Admissible classes (a, b) mod d with a coprime to d.

    Residues are the canonical representatives 0 .. d-1.
    """

    d: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        fixed = frozenset((a % self.d, b % self.d) for a, b in self.pairs)
        for a, _ in fixed:
            if gcd(a, self.d) != 1:
                raise ValueError(f"first residue {a} is not coprime to {self.d}")
        object.__setattr__(self, "pairs", fixed)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (a % self.d, b % self.d) in self.pairs

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def union(self, other: "ResiduePairSet") -> "ResiduePairSet":
        if other.d != self.d:
            raise ValueError("moduli differ")
        return ResiduePairSet(self.d, self.pairs | other.pairs)

    def is_product(self) -> bool:
        """Whether the pairs form a rectangle A x B."""
        firsts = {a for a, _ in self.pairs}
        seconds = {b for _, b in self.pairs}
        return len(firsts) * len(seconds) == len(self.pairs)

    @classmethod
    def product(cls, d: int, A: Iterable[int], B: Iterable[int]) -> "ResiduePairSet":
        B = list(B)
        return cls(d, frozenset((a, b) for a in A for b in B))

    @classmethod
    def coprime(cls, d: int) -> "ResiduePairSet":
        units = [a for a in range(d) if gcd(a, d) == 1]
        return cls.product(d, units, units)

    @classmethod
    def everything(cls, d: int) -> "ResiduePairSet":
        """All pairs with the first residue a unit."""
        units = [a for a in range(d) if gcd(a, d) == 1]
        return cls.product(d, units, range(d))


def prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def euler_factor(d: int) -> Fraction:
    """prod_{p | d} (1 - p^-2)^-1."""
    r = Fraction(1)
    for p in prime_factors(d):
        r *= Fraction(p * p, p * p - 1)
    return r


def _integer_constraints(poly: ConvexPolygon) -> list[tuple[int, int, int, bool]]:
    out = []
    for h in poly.constraints:
        coeffs = [Fraction(h.alpha), Fraction(h.beta), Fraction(h.gamma)]
        m = lcm(*(c.denominator for c in coeffs))
        a, b, c = (int(x * m) for x in coeffs)
        out.append((a, b, c, h.strict))
    return out


def _row_bounds(cons, m: int, y_lo: int, y_hi: int) -> tuple[int, int]:
    lo, hi = y_lo, y_hi
    for a, b, c, strict in cons:
        rest = a * m + c          # need rest + b y >= 0 (or > 0)
        if b > 0:
            bound = -rest // b + 1 if strict else -(rest // b)
            lo = max(lo, bound)
        elif b < 0:
            nb = -b
            bound = -((-rest) // nb) - 1 if strict else rest // nb
            hi = min(hi, bound)
        elif rest < 0 or (strict and rest == 0):
            return 1, 0
    return lo, hi


def _rows(poly: ConvexPolygon):
    if poly.is_empty:
        return
    x0, x1, y0, y1 = poly.bounding_box()
    cons = _integer_constraints(poly)
    ylo, yhi = math.ceil(y0), math.floor(y1)
    for m in range(math.ceil(x0), math.floor(x1) + 1):
        lo, hi = _row_bounds(cons, m, ylo, yhi)
        if lo <= hi:
            yield m, lo, hi


def _by_first(S: ResiduePairSet) -> dict[int, list[int]]:
    rows: dict[int, list[int]] = {}
    for a, b in S.sorted_pairs():
        rows.setdefault(a, []).append(b)
    return rows


def _count_rows(poly: ConvexPolygon, S: ResiduePairSet) -> int:
    d = S.d
    seconds = _by_first(S)
    total = 0
    for m, lo, hi in _rows(poly):
        for b in seconds.get(m % d, ()):
            start = lo + (b - lo) % d
            for y in range(start, hi + 1, d):
                if gcd(m, y) == 1:
                    total += 1
    return total


@lru_cache(maxsize=4)
def _squarefree_divisors_table(n: int) -> list[list[tuple[int, int]]]:
    """For each m <= n, the pairs (e, mu(e)) over squarefree e | m."""
    spf = list(range(n + 1))
    for p in range(2, int(n ** 0.5) + 1):
        if spf[p] == p:
            for m in range(p * p, n + 1, p):
                if spf[m] == m:
                    spf[m] = p
    table: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    for m in range(1, n + 1):
        divs = [(1, 1)]
        r = m
        while r > 1:
            p = spf[r]
            while r % p == 0:
                r //= p
            divs += [(e * p, -mu) for e, mu in divs]
        table[m] = divs
    return table


def _count_in_class(lo: int, hi: int, c: int, modulus: int) -> int:
    """#{y in [lo, hi] : y = c mod modulus}."""
    return (hi - c) // modulus - (lo - 1 - c) // modulus


def _count_sieve(poly: ConvexPolygon, S: ResiduePairSet) -> int:
    d = S.d
    seconds = _by_first(S)
    total = 0
    rows = list(_rows(poly))
    if not rows:
        return 0
    top = max(abs(m) for m, _, _ in rows)
    divisors = _squarefree_divisors_table(max(top, 1))
    for m, lo, hi in rows:
        bs = seconds.get(m % d)
        if not bs:
            continue
        if m == 0:
            # gcd(0, y) = |y|: only y = +-1 is visible
            total += sum(1 for y in (-1, 1) if lo <= y <= hi and (y % d) in bs)
            continue
        for e, mu in divisors[abs(m)]:
            # e | m and m is a unit mod d, so gcd(e, d) = 1 and CRT applies
            de = d * e
            inv = pow(e, -1, d) if d > 1 else 0
            for b in bs:
                c = e * ((b * inv) % d) if d > 1 else 0
                total += mu * _count_in_class(lo, hi, c, de)
    return total


def visible_count(omega: ConvexPolygon, S: ResiduePairSet, method: str = "sieve") -> int:
    """#{(m, n) in omega : gcd(m, n) = 1, (m, n) mod d in S}, strictness honoured."""
    if not S.pairs or omega.is_empty:
        return 0
    if method == "sieve":
        return _count_sieve(omega, S)
    if method == "rows":
        return _count_rows(omega, S)
    raise ValueError(f"unknown method {method!r}")


def main_term_factor(area: Fraction, n_pairs: int, d: int) -> Fraction:
    """The exact part of the main term: area |S| / d^2 times the Euler factor."""
    return Fraction(area) * n_pairs / (d * d) * euler_factor(d)


def main_term(omega: ConvexPolygon, S: ResiduePairSet) -> float:
    return 6 * float(main_term_factor(omega.area, len(S), S.d)) / math.pi ** 2


@dataclass(frozen=True)
class CountReport:
    Q: int
    d: int
    pairs: int
    exact: int
    main_term: float
    area: Fraction
    perimeter: float

    @property
    def residual(self) -> float:
        return self.exact - self.main_term

    @property
    def normalized_residual(self) -> float:
        scale = float(self.area) / self.Q + self.perimeter * math.log(self.Q)
        return abs(self.residual) / scale if scale > 0 else 0.0


def count_report(shape: ConvexPolygon, S: ResiduePairSet, Q: int, method: str = "sieve") -> CountReport:
    omega = shape.scaled(Q)
    return CountReport(Q, S.d, len(S), visible_count(omega, S, method), main_term(omega, S),
                       omega.area, omega.perimeter())


def lemma2_residual_sweep(shapes: Sequence[ConvexPolygon], S: ResiduePairSet,
                          Q_list: Sequence[int], method: str = "sieve") -> list[CountReport]:
    """Exact counts against the main term for unit-scale shapes blown up by each Q."""
    return [count_report(shape, S, Q, method) for shape in shapes for Q in Q_list]


CSV_COLUMNS = ["Q", "d", "area_num", "area_den", "pairs", "exact", "main_term", "residual",
               "normalized_residual"]


def reports_to_csv(reports: Iterable[CountReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.Q, r.d, r.area.numerator, r.area.denominator, r.pairs, r.exact,
                    repr(r.main_term), repr(r.residual), repr(r.normalized_residual)])
    return buf.getvalue()


def naive_visible_count(omega: ConvexPolygon, S: ResiduePairSet) -> int:
    """Test every lattice point of the bounding box; no sieving, no row logic."""
    if omega.is_empty or not S.pairs:
        return 0
    x0, x1, y0, y1 = omega.bounding_box()
    xs = np.arange(math.ceil(x0), math.floor(x1) + 1, dtype=np.int64)
    ys = np.arange(math.ceil(y0), math.floor(y1) + 1, dtype=np.int64)
    if xs.size == 0 or ys.size == 0:
        return 0
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    keep = np.gcd(X, Y) == 1
    for a, b, c, strict in _integer_constraints(omega):
        v = a * X + b * Y + c
        keep &= (v > 0) if strict else (v >= 0)
    d = S.d
    allowed = np.zeros((d, d), dtype=bool)
    for a, b in S.pairs:
        allowed[a, b] = True
    keep &= allowed[X % d, Y % d]
    return int(keep.sum())
