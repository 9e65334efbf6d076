"""JSON forms of exact rationals and polygons (decimal strings, never floats)."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from farey_lab.dynamics import ConvexPolygon, ExactPoint, HalfPlane


def rational_to_dict(r) -> dict:
    r = Fraction(r)
    return {"num": str(r.numerator), "den": str(r.denominator)}


def rational_from_dict(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def _s(r) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def polygon_to_dict(P: ConvexPolygon) -> dict:
    return {
        "vertices": [[_s(p.x), _s(p.y)] for p in P.vertices],
        "edge_strict": list(P.edge_strict),
        "constraints": [[_s(h.alpha), _s(h.beta), _s(h.gamma), h.strict] for h in P.constraints],
    }


def polygon_from_dict(obj: dict) -> ConvexPolygon:
    return ConvexPolygon(
        tuple(ExactPoint(Fraction(x), Fraction(y)) for x, y in obj["vertices"]),
        tuple(bool(f) for f in obj["edge_strict"]),
        tuple(HalfPlane(Fraction(a), Fraction(b), Fraction(c), bool(s)) for a, b, c, s in obj["constraints"]),
    )


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
