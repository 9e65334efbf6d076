"""Random convex polygons for the lattice tests."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from farey_lab.dynamics import ConvexPolygon, HalfPlane


def cut_through(p, q, keep_left: bool, strict: bool) -> HalfPlane:
    """Half-plane bounded by the line through p and q."""
    (x0, y0), (x1, y1) = p, q
    a, b = y0 - y1, x1 - x0
    c = -(a * x0 + b * y0)
    if not keep_left:
        a, b, c = -a, -b, -c
    return HalfPlane(a, b, c, strict)


def random_polygon(rng: np.random.Generator, size: int = 500, cuts: int = 3) -> ConvexPolygon:
    x0, x1 = sorted(rng.integers(0, size + 1, 2).tolist())
    y0, y1 = sorted(rng.integers(0, size + 1, 2).tolist())
    x1, y1 = max(x1, x0 + 1), max(y1, y0 + 1)
    poly = ConvexPolygon.rectangle(Fraction(x0, 1), Fraction(x1, 1), Fraction(y0, 1), Fraction(y1, 1))
    for _ in range(cuts):
        # lines through rational points inside the box
        p = (Fraction(int(rng.integers(2 * x0, 2 * x1 + 1)), 2), Fraction(int(rng.integers(2 * y0, 2 * y1 + 1)), 2))
        q = (Fraction(int(rng.integers(3 * x0, 3 * x1 + 1)), 3), Fraction(int(rng.integers(3 * y0, 3 * y1 + 1)), 3))
        if p == q:
            continue
        poly = poly.clip(cut_through(p, q, bool(rng.integers(2)), bool(rng.integers(2))))
    return poly
