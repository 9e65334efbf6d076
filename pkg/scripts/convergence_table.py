#!/usr/bin/env python3
"""N_{Q,d}(k)/Q^2 against c(d,k) over a ladder of Q, as CSV on stdout."""
from __future__ import annotations

import argparse
import csv
import sys

from farey_lab.constant import compute_constant, convergence_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", default="1:1,2:1,2:3,3:1,4:1,6:1,6:2,10:1",
                    help="comma-separated d:k pairs")
    ap.add_argument("--Q-list", default="1000,2000,4000,8000,10000")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    Qs = [int(t) for t in args.Q_list.split(",")]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "k", "c_times_pi2", "c", "Q", "N", "N_over_Q2", "rel_err", "residual_over_QlogQ"])
    for case in args.cases.split(","):
        d, k = (int(t) for t in case.split(":"))
        report = compute_constant(d, k)
        for row in convergence_report(d, k, Qs, args.workers):
            rel = (row.ratio - row.c) / row.c if row.c else float("nan")
            w.writerow([d, k, str(report.exact_factor), repr(row.c), row.Q, row.N,
                        repr(row.ratio), f"{rel:.3e}", f"{row.scaled_residual:.5f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
