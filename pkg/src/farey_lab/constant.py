"""The constant c(d, k) in N_{Q,d}(k) ~ c(d, k) Q^2, and the checks around it.

A gap of F_{Q,d} that skips ell - 1 terms of F_Q is described by the
2-indices x = (x_1, ..., x_{ell-1}) of the skipped terms and by the residues
of the first two denominators mod d.  The gap numerator is the index
identity evaluated at x, the admissible starting points form the region
T_{x_1} cap T^{-1} T_{x_2} cap ..., and the residues must make every skipped
denominator share a factor with d while both endpoints stay coprime to it.
Summing (number of residue pairs) x (area) over all x with identity value k
and applying the visible-point density gives c(d, k).

Tuples are found by a depth-first walk over prefixes, pruned as soon as a
prefix has zero area or no residue pair can keep the run going.
"""
from __future__ import annotations

import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from farey_lab import _kernels
from farey_lab.dynamics import (
    FAREY_TRIANGLE,
    IDENTITY,
    ConvexPolygon,
    compose,
    label_constraints,
    label_range,
    pullback_region,
)
from farey_lab.farey import farey_arrays, gap_numerator_counts
from farey_lab.index import identity_value
from farey_lab.lattice import ResiduePairSet, euler_factor, main_term_factor, visible_count
from farey_lab.serialize import polygon_from_dict, polygon_to_dict, rational_from_dict, rational_to_dict


class KMaxWarning(UserWarning):
    """The entry bound K_max may have cut off admissible tuples."""


class RunBoundWarning(UserWarning):
    """The run-length cap L stopped the tuple walk before it died out."""


def run_bound(d: int) -> int:
    return 4 * d ** 3


def default_k_max(k: int, ell: int) -> int:
    return 4 * (k + ell) + 1


# -- run lengths -----------------------------------------------------------

@dataclass(frozen=True)
class RunLengthReport:
    Q: int
    d: int
    max_run: int

    @property
    def bound(self) -> int:
        return run_bound(self.d)

    @property
    def ok(self) -> bool:
        return self.max_run < self.bound


def max_gap_runs(Q: int, ds: Sequence[int]) -> list[RunLengthReport]:
    """One pass over F_Q for several moduli at once."""
    runs = _kernels.max_runs(Q, np.asarray(ds, dtype=np.int64))
    return [RunLengthReport(Q, int(d), int(r)) for d, r in zip(ds, runs)]


def max_gap_run(Q: int, d: int) -> RunLengthReport:
    report = max_gap_runs(Q, [d])[0]
    if not report.ok:
        raise AssertionError(f"run of {report.max_run} >= 4d^3 in F_{Q} for d={d}")
    return report


# -- residues -------------------------------------------------------------

def residue_pairs(xs: Sequence[int], d: int) -> ResiduePairSet:
    """Classes (q_{i-1}, q_i) mod d that make x a gap of F_{Q,d}.

    r_0 = a, r_1 = b, r_{j+1} = x_j r_j - r_{j-1}; r_0 and r_ell must be
    units mod d and r_1 .. r_{ell-1} must not be.
    """
    ell = len(xs) + 1
    keep = set()
    for a in range(d):
        if gcd(a, d) != 1:
            continue
        for b in range(d):
            r = [a, b]
            for x in xs:
                r.append((x * r[-1] - r[-2]) % d)
            if gcd(r[ell], d) == 1 and all(gcd(r[j], d) > 1 for j in range(1, ell)):
                keep.add((a, b))
    return ResiduePairSet(d, frozenset(keep))


# -- tuple records ----------------------------------------------------------

@dataclass(frozen=True)
class TupleRecord:
    ell: int
    xs: tuple[int, ...]
    region: ConvexPolygon
    area: Fraction
    pair_set: ResiduePairSet

    @property
    def weight(self) -> Fraction:
        """|pairs| x area, this tuple's share of the sum defining c."""
        return len(self.pair_set) * self.area

    def contribution(self) -> float:
        d = self.pair_set.d
        return 6 * float(main_term_factor(self.area, len(self.pair_set), d)) / math.pi ** 2

    def to_dict(self) -> dict:
        return {
            "l": self.ell,
            "xs": list(self.xs),
            "area": rational_to_dict(self.area),
            "pairs": len(self.pair_set),
            "contribution": self.contribution(),
            "pair_set": [list(p) for p in self.pair_set.sorted_pairs()],
            "region": polygon_to_dict(self.region),
        }

    @classmethod
    def from_dict(cls, obj: dict, d: int) -> "TupleRecord":
        pairs = frozenset(tuple(p) for p in obj["pair_set"])
        return cls(int(obj["l"]), tuple(obj["xs"]), polygon_from_dict(obj["region"]),
                   rational_from_dict(obj["area"]), ResiduePairSet(d, pairs))


def _children(poly: ConvexPolygon, A, K_max: int):
    """(x, child region, composed map) for every label cutting poly with positive area."""
    lo, hi = label_range(poly, A)
    top = K_max if hi is None else min(hi, K_max)
    for x in range(lo, top + 1):
        child = poly.clip_all(h.pullback(A) for h in label_constraints(x))
        if child.area > 0:
            yield x, child, compose(x, A)


def admissible_tuples(ell: int, k: int, K_max: int) -> list[tuple[int, ...]]:
    """(ell-1)-tuples with entries <= K_max, identity value k and a region of positive area."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if K_max < k + 2:
        raise ValueError("K_max must be at least k + 2")
    if ell == 1:
        return [()] if k == 1 else []
    found: list[tuple[int, ...]] = []
    stack = [((), FAREY_TRIANGLE, IDENTITY, 0, 1)]
    while stack:
        xs, poly, A, nu_prev, nu = stack.pop()
        for x, child, B in _children(poly, A, K_max):
            nxt = x * nu - nu_prev
            ys = xs + (x,)
            if len(ys) == ell - 1:
                if nxt == k:
                    found.append(ys)
            else:
                stack.append((ys, child, B, nu, nxt))
    found.sort()
    if any(K_max in xs for xs in found):
        warnings.warn(f"an admissible tuple for ell={ell}, k={k} reaches K_max={K_max}", KMaxWarning)
    return found


@dataclass(frozen=True)
class _Walk:
    records: tuple[TupleRecord, ...]
    depth: int          # largest ell at which some prefix was still alive
    truncated: bool     # stopped by the run-length cap

    @property
    def weight(self) -> Fraction:
        return sum((r.weight for r in self.records), Fraction(0))

    def touches(self, K_max: int) -> bool:
        return any(K_max in r.xs for r in self.records)


@lru_cache(maxsize=256)
def _walk(d: int, k: int, K_max: int, L: int) -> _Walk:
    unit = [gcd(a, d) == 1 for a in range(d)]
    records: list[TupleRecord] = []
    if k == 1:
        records.append(TupleRecord(1, (), FAREY_TRIANGLE, FAREY_TRIANGLE.area, ResiduePairSet.coprime(d)))
    # state: (a, b, r_{j}, r_{j+1}) with r_1 .. r_j all non-units so far
    start = [(a, b, a, b) for a in range(d) if unit[a] for b in range(d) if not unit[b]]
    stack = [((), FAREY_TRIANGLE, IDENTITY, start, 0, 1)] if start else []
    depth = 1
    truncated = False
    while stack:
        xs, poly, A, states, nu_prev, nu = stack.pop()
        ell = len(xs) + 2
        if ell > L:
            truncated = True
            continue
        depth = max(depth, ell)
        for x, child, B in _children(poly, A, K_max):
            moved = [(a, b, r1, (x * r1 - r0) % d) for a, b, r0, r1 in states]
            done = [s for s in moved if unit[s[3]]]
            alive = [s for s in moved if not unit[s[3]]]
            nxt = x * nu - nu_prev
            ys = xs + (x,)
            if nxt == k and done:
                pairs = ResiduePairSet(d, frozenset((a, b) for a, b, _, _ in done))
                records.append(TupleRecord(ell, ys, child, child.area, pairs))
            if alive:
                stack.append((ys, child, B, alive, nu, nxt))
    records.sort(key=lambda r: (r.ell, r.xs))
    return _Walk(tuple(records), depth, truncated)


@dataclass(frozen=True)
class ConstantReport:
    d: int
    k: int
    exact_factor: Fraction
    breakdown: tuple[TupleRecord, ...]
    L_used: int
    K_max_used: int
    L_bound: int
    warnings: tuple[str, ...] = ()

    @property
    def c_value(self) -> float:
        return float(self.exact_factor) / math.pi ** 2

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "c": self.c_value,
            "exact_factor": rational_to_dict(self.exact_factor),
            "L_used": self.L_used,
            "L_bound": self.L_bound,
            "K_max_used": self.K_max_used,
            "warnings": list(self.warnings),
            "breakdown": [r.to_dict() for r in self.breakdown],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ConstantReport":
        d = int(obj["d"])
        return cls(d, int(obj["k"]), rational_from_dict(obj["exact_factor"]),
                   tuple(TupleRecord.from_dict(r, d) for r in obj["breakdown"]),
                   int(obj["L_used"]), int(obj["K_max_used"]), int(obj["L_bound"]),
                   tuple(obj.get("warnings", ())))


def _factor(walk: _Walk, d: int) -> Fraction:
    return 6 * euler_factor(d) * walk.weight / (d * d)


def compute_constant(d: int, k: int, K_max: int | None = None,
                     L_override: int | None = None) -> ConstantReport:
    """c(d, k) as an exact rational multiple of 1/pi^2.

    Without K_max the entry bound starts at 4(k + 2) + 1 and is doubled
    until the records stop changing (relative change <= 1e-12) and no record
    uses the bound itself.
    """
    if d < 1 or k < 1:
        raise ValueError("d and k must be >= 1")
    L = L_override or run_bound(d)
    notes: list[str] = []
    if K_max is None:
        K = default_k_max(k, 2)
        walk = _walk(d, k, K, L)
        while True:
            K2 = max(2 * K, default_k_max(k, walk.depth))
            nxt = _walk(d, k, K2, L)
            f1, f2 = _factor(walk, d), _factor(nxt, d)
            if abs(f2 - f1) <= Fraction(1, 10 ** 12) * f2 and not nxt.touches(K2):
                break
            K, walk = K2, nxt
        walk, K = nxt, K2
    else:
        K = K_max
        walk = _walk(d, k, K, L)
        if walk.touches(K):
            notes.append(f"a contributing tuple reaches K_max={K}")
        deepest = max((r.ell for r in walk.records), default=1)
        if K < default_k_max(k, deepest):
            notes.append(f"K_max={K} is below the default bound {default_k_max(k, deepest)}")
    if walk.truncated:
        msg = f"tuple walk still alive at the run cap L={L}"
        notes.append(msg)
        warnings.warn(msg, RunBoundWarning)
    for msg in notes:
        if "K_max" in msg:
            warnings.warn(msg, KMaxWarning)
    return ConstantReport(d, k, _factor(walk, d), walk.records, walk.depth, K, L, tuple(notes))


# -- empirical side ---------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    Q: int
    N: int
    c: float

    @property
    def ratio(self) -> float:
        return self.N / self.Q ** 2

    @property
    def residual(self) -> float:
        return self.N - self.c * self.Q ** 2

    @property
    def scaled_residual(self) -> float:
        return self.residual / (self.Q * math.log(self.Q))

    def to_dict(self) -> dict:
        return {"Q": self.Q, "N": self.N, "N_over_Q2": self.ratio, "c": self.c,
                "residual": self.residual, "residual_over_QlogQ": self.scaled_residual}


def _gap_count(args) -> int:
    Q, d, k = args
    return gap_numerator_counts(Q, d)[k]


def convergence_report(d: int, k: int, Q_list: Sequence[int], workers: int = 1,
                       K_max: int | None = None) -> list[ConvergenceRow]:
    c = compute_constant(d, k, K_max).c_value
    jobs = [(Q, d, k) for Q in Q_list]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            counts = list(pool.map(_gap_count, jobs))
    else:
        counts = [_gap_count(j) for j in jobs]
    return [ConvergenceRow(Q, n, c) for Q, n in zip(Q_list, counts)]


WindowKey = tuple[int, int, tuple[int, ...], tuple[int, int]]


@lru_cache(maxsize=16)
def classify_windows(Q: int, d: int) -> Counter:
    """Count F_{Q,d} gaps by (k, ell, 2-index tuple, residue pair of the start)."""
    a, q = farey_arrays(Q)
    ea = np.concatenate(([0], a))
    eq = np.concatenate(([1], q))   # position 0 is gamma_0 = 0/1
    keep = np.flatnonzero(np.gcd(eq, d) == 1)
    s, t = keep[:-1], keep[1:]
    ks = ea[t] * eq[s] - ea[s] * eq[t]
    ells = t - s
    nu2 = np.zeros_like(eq)
    nu2[1:] = (Q + eq[:-1]) // eq[1:]
    first = eq[s] % d
    second = eq[s + 1] % d
    out: Counter = Counter()
    short = ells == 1
    if short.any():
        keys, n = np.unique(np.stack([ks[short], first[short], second[short]]), axis=1,
                            return_counts=True)
        for (kk, r0, r1), c in zip(keys.T.tolist(), n.tolist()):
            out[(kk, 1, (), (r0, r1))] += c
    nu2_list = nu2.tolist()
    for j in np.flatnonzero(~short).tolist():
        lo, hi = int(s[j]), int(t[j])
        key = (int(ks[j]), hi - lo, tuple(nu2_list[lo + 1:hi]), (int(first[j]), int(second[j])))
        out[key] += 1
    return out


@dataclass
class CrossValidation:
    d: int
    k: int
    Q: int
    observed: dict[tuple[int, tuple[int, ...]], int] = field(default_factory=dict)
    predicted: dict[tuple[int, tuple[int, ...]], float] = field(default_factory=dict)
    by_ell: dict[int, int] = field(default_factory=dict)
    missing_tuples: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    missing_pairs: list[tuple[int, tuple[int, ...], tuple[int, int]]] = field(default_factory=list)
    total: int = 0
    histogram_total: int = 0
    max_ell: int = 0

    @property
    def ok(self) -> bool:
        return not self.missing_tuples and not self.missing_pairs and self.total == self.histogram_total

    def to_dict(self) -> dict:
        rows = []
        for key in sorted(set(self.observed) | set(self.predicted)):
            rows.append({"l": key[0], "xs": list(key[1]), "observed": self.observed.get(key, 0),
                         "predicted": self.predicted.get(key, 0.0)})
        return {
            "d": self.d, "k": self.k, "Q": self.Q, "ok": self.ok,
            "total": self.total, "histogram_total": self.histogram_total,
            "by_l": {str(l): n for l, n in sorted(self.by_ell.items())},
            "max_l": self.max_ell,
            "missing_tuples": [[l, list(xs)] for l, xs in self.missing_tuples],
            "missing_pairs": [[l, list(xs), list(p)] for l, xs, p in self.missing_pairs],
            "rows": rows,
        }


def tuple_cross_validation(d: int, k: int, Q_check: int, K_max: int | None = None) -> CrossValidation:
    """Check every gap of F_{Q_check, d} with numerator k against the enumeration."""
    report = compute_constant(d, k, K_max)
    records = {(r.ell, r.xs): r for r in report.breakdown}
    cv = CrossValidation(d, k, Q_check)
    for (kk, ell, xs, pair), n in sorted(classify_windows(Q_check, d).items()):
        if kk != k:
            continue
        key = (ell, xs)
        cv.observed[key] = cv.observed.get(key, 0) + n
        cv.by_ell[ell] = cv.by_ell.get(ell, 0) + n
        cv.total += n
        cv.max_ell = max(cv.max_ell, ell)
        rec = records.get(key)
        if rec is None:
            if key not in cv.missing_tuples:
                cv.missing_tuples.append(key)
        elif pair not in rec.pair_set:
            cv.missing_pairs.append((ell, xs, pair))
    for key, rec in records.items():
        cv.predicted[key] = rec.contribution() * Q_check ** 2
    cv.histogram_total = gap_numerator_counts(Q_check, d)[k]
    return cv


def region_count_mismatches(d: int, k: int, Q: int, K_max: int | None = None,
                            method: str = "sieve") -> list[tuple[int, tuple[int, ...], int, int]]:
    """Records whose lattice count in Q·region differs from the window count.

    Each entry is (ell, xs, lattice count, window count); empty means the
    region/residue description is exact at this Q.
    """
    report = compute_constant(d, k, K_max)
    observed: Counter = Counter()
    for (kk, ell, xs, _), n in classify_windows(Q, d).items():
        if kk == k:
            observed[(ell, xs)] += n
    bad = []
    seen = set()
    for rec in report.breakdown:
        key = (rec.ell, rec.xs)
        seen.add(key)
        lattice = visible_count(rec.region.scaled(Q), rec.pair_set, method)
        if lattice != observed.get(key, 0):
            bad.append((rec.ell, rec.xs, lattice, observed.get(key, 0)))
    for key, n in observed.items():
        if key not in seen:
            bad.append((key[0], key[1], 0, n))
    return bad


def record_for(xs: Sequence[int], d: int) -> TupleRecord:
    """A TupleRecord for an arbitrary tuple, whatever its identity value."""
    region = pullback_region(xs)
    return TupleRecord(len(xs) + 1, tuple(xs), region, region.area, residue_pairs(xs, d))


def tuple_value(xs: Sequence[int]) -> int:
    return identity_value(xs)
