"""Exhaustive sweeps used by `farey-lab verify` and the acceptance suite.

Each sweep returns a SweepResult; `first` holds a printable description of
the first violation found.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from farey_lab import index
from farey_lab.dynamics import ExactPoint, farey_map, region_index
from farey_lab.farey import farey_arrays


@dataclass
class SweepResult:
    name: str
    scope: str
    checked: int = 0
    violations: int = 0
    first: str | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def fail(self, detail: str, n: int = 1) -> None:
        if self.first is None:
            self.first = detail
        self.violations += n


def identity_sweep(Q_max: int, ell_max: int) -> SweepResult:
    res = SweepResult("index identity", f"Q<={Q_max}, l<={ell_max}")
    for Q in range(1, Q_max + 1):
        bad = index.identity_violations(Q, ell_max)
        res.checked += farey_arrays(Q)[0].shape[0] * ell_max
        if bad:
            w = bad[0]
            lhs = index.det(w.fractions[0], w.fractions[-1])
            res.fail(f"{w}; nu_l = {lhs}", len(bad))
    return res


def mediant_insertion(q_prev: np.ndarray, a_prev: np.ndarray, Q: int):
    """F_Q from F_{Q-1} (both with the leading 0/1) by inserting mediants of denominator Q."""
    at = np.flatnonzero(q_prev[:-1] + q_prev[1:] == Q) + 1
    return (np.insert(q_prev, at, Q),
            np.insert(a_prev, at, a_prev[at - 1] + a_prev[at]))


def dynamics_sweep(Q_max: int, exact_upto: int = 40) -> tuple[SweepResult, SweepResult]:
    """Orbit identity and label/index correspondence for every Q <= Q_max.

    The reference sequence is grown by mediant insertion, independently of
    the next-term recurrence.  For Q <= exact_upto every point also goes
    through the Fraction-valued map.
    """
    orbit = SweepResult("orbit identity", f"Q<={Q_max}")
    labels = SweepResult("label = 2-index", f"Q<={Q_max}")
    q = np.array([1, 1], dtype=np.int64)
    a = np.array([0, 1], dtype=np.int64)
    for Q in range(1, Q_max + 1):
        if Q > 1:
            q, a = mediant_insertion(q, a, Q)
        ga, gq = farey_arrays(Q)
        if not (np.array_equal(ga, a[1:]) and np.array_equal(gq, q[1:])):
            orbit.fail(f"Q={Q}: recurrence and mediant insertion disagree")
        n = q.shape[0] - 1
        # pairs (q_{j-1}, q_j) for j = 1 .. N and the successor q_{j+1}
        u, v = q[:-1], q[1:]
        succ = np.concatenate((q[2:], q[1:2]))
        w = ((Q + u) // v) * v - u
        orbit.checked += n
        bad = np.flatnonzero(w != succ)
        if bad.size:
            j = int(bad[0]) + 1
            orbit.fail(f"Q={Q}, j={j}: T({u[j-1]}/{Q}, {v[j-1]}/{Q}) second coordinate "
                       f"{w[j-1]}/{Q}, expected {succ[j-1]}/{Q}", bad.size)
        a_next = np.concatenate((a[2:], a[1:2] + q[1:2]))
        nu2 = a_next * u - a[:-1] * succ
        lab = (Q + u) // v
        labels.checked += n
        bad = np.flatnonzero(nu2 != lab)
        if bad.size:
            j = int(bad[0]) + 1
            labels.fail(f"Q={Q}, j={j}: label {lab[j-1]} but nu_2 = {nu2[j-1]}", bad.size)
        if Q <= exact_upto:
            for j in range(n):
                p = ExactPoint(Fraction(int(u[j]), Q), Fraction(int(v[j]), Q))
                img = farey_map(p)
                if img != ExactPoint(Fraction(int(v[j]), Q), Fraction(int(succ[j]), Q)):
                    orbit.fail(f"Q={Q}: exact map sends {p} to {img}")
                if region_index(p) != nu2[j]:
                    labels.fail(f"Q={Q}: region_index{p} = {region_index(p)}, nu_2 = {nu2[j]}")
    return orbit, labels


def neighbourhood_sweep(Q_max: int, k_max: int) -> SweepResult:
    res = SweepResult("large 2-index neighbourhoods", f"Q<={Q_max}, k<={k_max}")
    for Q in range(1, Q_max + 1):
        nu2 = index.two_index_array(Q)
        for k in range(1, k_max + 1):
            bad = index.lemma1_check(Q, k, nu2)
            res.checked += int((nu2 >= 4 * k + 1).sum())
            if bad:
                res.fail(str(bad[0]), len(bad))
    return res
