#!/usr/bin/env python3
"""Exact visible counts in scaled shapes against the density main term.

Shapes are the Farey triangle, its first pieces and a few pullback regions;
the normalized residual is |exact - main| / (area/Q + perimeter log Q).
"""
from __future__ import annotations

import argparse
import sys

from farey_lab.dynamics import FAREY_TRIANGLE, piece_polygon, pullback_region
from farey_lab.lattice import ResiduePairSet, lemma2_residual_sweep, reports_to_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=6)
    ap.add_argument("--Q-list", default="100,200,400,800,1600")
    ap.add_argument("--pairs", choices=("coprime", "everything"), default="coprime")
    args = ap.parse_args()
    Qs = [int(t) for t in args.Q_list.split(",")]
    S = getattr(ResiduePairSet, args.pairs)(args.d)
    shapes = [FAREY_TRIANGLE, piece_polygon(1), piece_polygon(3), pullback_region((1, 2)),
              pullback_region((2, 2, 1))]
    sys.stdout.write(reports_to_csv(lemma2_residual_sweep(shapes, S, Qs)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
