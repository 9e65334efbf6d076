"""The Farey triangle, the Farey map and its pieces as exact convex polygons.

T = {(x, y) in [0,1]^2 : x + y > 1},  T(x, y) = (y, floor((1+x)/y) y - x),
T_k = {(x, y) in T : floor((1+x)/y) = k}.

Regions are kept in two forms at once: the defining half-planes (exact,
with strictness, used for membership) and the vertex list of the closure
(used for area and bounding boxes).  No floating point anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = int | Fraction


@dataclass(frozen=True)
class ExactPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def __iter__(self):
        return iter((self.x, self.y))

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


@dataclass(frozen=True)
class HalfPlane:
    """alpha x + beta y + gamma >= 0, or > 0 when strict."""

    alpha: Rational
    beta: Rational
    gamma: Rational
    strict: bool = False

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("degenerate half-plane")

    def value(self, x: Rational, y: Rational) -> Rational:
        return self.alpha * x + self.beta * y + self.gamma

    def contains(self, x: Rational, y: Rational) -> bool:
        v = self.value(x, y)
        return v > 0 if self.strict else v >= 0

    def scaled(self, Q: int) -> "HalfPlane":
        """The same constraint on Q times the plane."""
        return HalfPlane(self.alpha, self.beta, self.gamma * Q, self.strict)

    def pullback(self, matrix: "Matrix") -> "HalfPlane":
        """{p : A p satisfies self} for an integer matrix A."""
        (p, q), (r, s) = matrix
        return HalfPlane(self.alpha * p + self.beta * r, self.alpha * q + self.beta * s,
                         self.gamma, self.strict)


Matrix = tuple[tuple[int, int], tuple[int, int]]
IDENTITY: Matrix = ((1, 0), (0, 1))


@dataclass(frozen=True)
class ConvexPolygon:
    """Intersection of half-planes together with the vertices of its closure.

    vertices run counter-clockwise; edge_strict[j] belongs to the edge from
    vertices[j] to vertices[j+1].  An empty region has no vertices.
    """

    vertices: tuple[ExactPoint, ...]
    edge_strict: tuple[bool, ...]
    constraints: tuple[HalfPlane, ...]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def area(self) -> Fraction:
        return polygon_area(self)

    def contains(self, x: Rational, y: Rational) -> bool:
        return all(h.contains(x, y) for h in self.constraints)

    def clip(self, h: HalfPlane) -> "ConvexPolygon":
        vertices, flags = _clip(self.vertices, self.edge_strict, h)
        constraints = self.constraints + (h,)
        if 0 < len(vertices) < 3:
            # a point or segment survives only if some point of it meets
            # every constraint (strict ones can kill the whole closure)
            probes = list(vertices)
            if len(vertices) == 2:
                p, q = vertices
                probes.append(ExactPoint((p.x + q.x) / 2, (p.y + q.y) / 2))
            if not any(all(c.contains(pt.x, pt.y) for c in constraints) for pt in probes):
                vertices, flags = (), ()
        return ConvexPolygon(vertices, flags, constraints)

    def clip_all(self, hs: Iterable[HalfPlane]) -> "ConvexPolygon":
        poly = self
        for h in hs:
            poly = poly.clip(h)
        return poly

    def scaled(self, Q: int) -> "ConvexPolygon":
        return ConvexPolygon(
            tuple(ExactPoint(p.x * Q, p.y * Q) for p in self.vertices),
            self.edge_strict,
            tuple(h.scaled(Q) for h in self.constraints),
        )

    def bounding_box(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)

    def perimeter(self) -> float:
        n = len(self.vertices)
        if n < 2:
            return 0.0
        total = 0.0
        for j in range(n):
            p, q = self.vertices[j], self.vertices[(j + 1) % n]
            total += float((q.x - p.x) ** 2 + (q.y - p.y) ** 2) ** 0.5
        return total

    def intersect(self, other: "ConvexPolygon") -> "ConvexPolygon":
        return self.clip_all(other.constraints)

    @classmethod
    def from_halfplanes(cls, hs: Sequence[HalfPlane], box: "ConvexPolygon") -> "ConvexPolygon":
        """Clip a bounding polygon (whose own constraints are kept) by hs."""
        return box.clip_all(hs)

    @classmethod
    def rectangle(cls, x0: Rational, x1: Rational, y0: Rational, y1: Rational) -> "ConvexPolygon":
        """The closed box [x0, x1] x [y0, y1]."""
        if x0 > x1 or y0 > y1:
            raise ValueError("empty rectangle")
        vs = (ExactPoint(x0, y0), ExactPoint(x1, y0), ExactPoint(x1, y1), ExactPoint(x0, y1))
        hs = (HalfPlane(1, 0, -x0), HalfPlane(-1, 0, x1), HalfPlane(0, 1, -y0), HalfPlane(0, -1, y1))
        return cls(vs, (False,) * 4, hs)


def _clip(vertices, flags, h: HalfPlane):
    """Sutherland-Hodgman step against one half-plane on closures."""
    if not vertices:
        return (), ()
    n = len(vertices)
    vals = [h.value(p.x, p.y) for p in vertices]
    out: list[tuple[ExactPoint, bool]] = []
    for j in range(n):
        p, q = vertices[j], vertices[(j + 1) % n]
        vp, vq = vals[j], vals[(j + 1) % n]
        f = flags[j]
        if vp >= 0:
            if vq >= 0:
                out.append((p, f))
            elif vp == 0:
                out.append((p, h.strict))
            else:
                out.append((p, f))
                out.append((_cut(p, q, vp, vq), h.strict))
        elif vq > 0:
            out.append((_cut(p, q, vp, vq), f))
    # collapse repeated vertices, keeping the flag of the last copy
    merged: list[tuple[ExactPoint, bool]] = []
    for p, f in out:
        if merged and merged[-1][0] == p:
            merged[-1] = (p, f)
        else:
            merged.append((p, f))
    # a trailing copy of the first vertex only closes a zero-length edge
    while len(merged) > 1 and merged[0][0] == merged[-1][0]:
        merged.pop()
    return tuple(p for p, _ in merged), tuple(f for _, f in merged)


def _cut(p: ExactPoint, q: ExactPoint, vp, vq) -> ExactPoint:
    t = Fraction(vp) / (vp - vq)
    return ExactPoint(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))


def polygon_area(P: ConvexPolygon) -> Fraction:
    """Shoelace area; zero for empty or degenerate closures."""
    vs = P.vertices
    n = len(vs)
    if n < 3:
        return Fraction(0)
    s = Fraction(0)
    for j in range(n):
        p, q = vs[j], vs[(j + 1) % n]
        s += p.x * q.y - q.x * p.y
    return abs(s) / 2


# -- the triangle, the map and its pieces --------------------------------

TRIANGLE_CONSTRAINTS = (
    HalfPlane(1, 1, -1, strict=True),   # x + y > 1
    HalfPlane(-1, 0, 1),                # x <= 1
    HalfPlane(0, -1, 1),                # y <= 1
)

FAREY_TRIANGLE = ConvexPolygon(
    (ExactPoint(1, 0), ExactPoint(1, 1), ExactPoint(0, 1)),
    (False, False, True),
    TRIANGLE_CONSTRAINTS,
)


def label_constraints(k: int) -> tuple[HalfPlane, HalfPlane]:
    """k y <= 1 + x < (k + 1) y, i.e. floor((1+x)/y) = k."""
    return HalfPlane(1, -k, 1), HalfPlane(-1, k + 1, -1, strict=True)


def tail_constraint(K: int) -> HalfPlane:
    """(1+x)/y >= K + 1, the union of T_k over k > K."""
    return HalfPlane(1, -(K + 1), 1)


@dataclass(frozen=True)
class PieceMap:
    """The restriction of the Farey map to T_k: (x, y) -> (y, k y - x)."""

    k: int

    @property
    def matrix(self) -> Matrix:
        return ((0, 1), (-1, self.k))

    @property
    def inverse(self) -> Matrix:
        return ((self.k, -1), (1, 0))

    @property
    def determinant(self) -> int:
        (p, q), (r, s) = self.matrix
        return p * s - q * r

    def __call__(self, p: ExactPoint) -> ExactPoint:
        return ExactPoint(p.y, self.k * p.y - p.x)

    def image(self, P: ConvexPolygon) -> ConvexPolygon:
        return ConvexPolygon(
            tuple(self(p) for p in P.vertices),
            P.edge_strict,
            tuple(h.pullback(self.inverse) for h in P.constraints),
        )


def compose(k: int, A: Matrix) -> Matrix:
    """PieceMap(k).matrix @ A."""
    (p, q), (r, s) = A
    return (r, s), (k * r - p, k * s - q)


def _in_triangle(p: ExactPoint) -> bool:
    return FAREY_TRIANGLE.contains(p.x, p.y)


def region_index(p: ExactPoint) -> int:
    """floor((1 + x)/y): the label k with p in T_k."""
    if not _in_triangle(p):
        raise ValueError(f"{p} is not in the Farey triangle")
    return int((1 + p.x) // p.y)


def farey_map(p: ExactPoint) -> ExactPoint:
    return PieceMap(region_index(p))(p)


def farey_map_lattice(Q: int, u: int, v: int) -> tuple[int, int]:
    """The Farey map on the lattice (1/Q) Z^2, in integer coordinates."""
    if not (u <= Q and v <= Q and u + v > Q):
        raise ValueError(f"({u}, {v})/{Q} is not in the Farey triangle")
    return v, ((Q + u) // v) * v - u


def piece_polygon(k: int) -> ConvexPolygon:
    if k < 1:
        raise ValueError("k must be >= 1")
    return FAREY_TRIANGLE.clip_all(label_constraints(k))


def tail_polygon(K: int) -> ConvexPolygon:
    return FAREY_TRIANGLE.clip(tail_constraint(K))


def pullback_region(xs: Sequence[int]) -> ConvexPolygon:
    """T_{x_1} cap T^{-1} T_{x_2} cap ... cap T^{-(n-1)} T_{x_n}."""
    poly = FAREY_TRIANGLE
    A = IDENTITY
    for x in xs:
        if x < 1:
            raise ValueError("tuple entries must be >= 1")
        poly = poly.clip_all(h.pullback(A) for h in label_constraints(x))
        if poly.is_empty:
            break
        A = compose(x, A)
    return poly


def label_range(P: ConvexPolygon, A: Matrix) -> tuple[int, int | None]:
    """Range of floor((1+u)/v) over (u, v) = A p with p in the closure of P.

    The upper end is None when v vanishes somewhere on the closure.  Only
    labels in this range can cut P in a set of positive area.
    """
    (p, q), (r, s) = A
    lo = hi = None
    unbounded = False
    for pt in P.vertices:
        u = p * pt.x + q * pt.y
        v = r * pt.x + s * pt.y
        if v <= 0:
            unbounded = True
            continue
        t = (1 + u) / v
        lo = t if lo is None else min(lo, t)
        hi = t if hi is None else max(hi, t)
    if lo is None:
        return 1, None
    return max(1, int(lo // 1)), None if unbounded else int(hi // 1)
