#!/usr/bin/env python3
"""Longest run of F_Q terms with denominators sharing a factor with d."""
from __future__ import annotations

import argparse
import sys

from farey_lab.constant import max_gap_runs, run_bound


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ds", default="2,4,6,10,12,14,15,30,210")
    ap.add_argument("--Q-list", default="100,1000,3000,10000")
    args = ap.parse_args()
    ds = [int(t) for t in args.ds.split(",")]
    print("Q," + ",".join(f"d={d}" for d in ds))
    worst = dict.fromkeys(ds, 0)
    for Q in (int(t) for t in args.Q_list.split(",")):
        runs = max_gap_runs(Q, ds)
        print(f"{Q}," + ",".join(str(r.max_run) for r in runs))
        for r in runs:
            worst[r.d] = max(worst[r.d], r.max_run)
    print("bound," + ",".join(str(run_bound(d)) for d in ds))
    return 0 if all(worst[d] < run_bound(d) for d in ds) else 1


if __name__ == "__main__":
    sys.exit(main())
