"""farey-lab: command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 completed with warnings.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from farey_lab import __version__
from farey_lab import checks
from farey_lab.constant import (
    KMaxWarning,
    RunBoundWarning,
    compute_constant,
    convergence_report,
    default_k_max,
    record_for,
    admissible_tuples,
    tuple_cross_validation,
)
from farey_lab.farey import gap_numerator_counts, restricted_sequence
from farey_lab.serialize import dumps, sha256_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_WARN = 0, 1, 2, 3


@dataclass
class JobConfig:
    command: str
    Q: int | None = None
    Q_list: list[int] | None = None
    Q_max: int | None = None
    d: int = 1
    k: int = 1
    l: int | None = None
    l_max: int | None = None
    K_max: int | None = None
    neighbourhood_k: int | None = None
    convergence: list[int] | None = None
    cross_validate: int | None = None
    count_only: bool = False
    out: str | None = None
    format: str = "json"
    workers: int = 1


@dataclass
class RunManifest:
    version: str
    config: dict
    wall_time: float
    digests: dict[str, str] = field(default_factory=dict)


def positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def int_list(text: str) -> list[int]:
    try:
        out = [positive_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}: {exc}")
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def default_workers() -> int:
    env = os.environ.get("FAREY_LAB_WORKERS")
    if env:
        try:
            return positive_int(env)
        except argparse.ArgumentTypeError:
            pass
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="farey-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"farey-lab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write output here (plus PATH.manifest.json)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--workers", type=positive_int, default=default_workers())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("farey", parents=[common], help="list F_Q or F_{Q,d}")
    p.add_argument("--Q", type=positive_int, required=True)
    p.add_argument("--d", type=positive_int, default=1)
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("gaps", parents=[common], help="gap numerator histogram N_{Q,d}(k)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--Q", type=positive_int)
    g.add_argument("--Q-list", type=int_list)
    p.add_argument("--d", type=positive_int, default=1)

    p = sub.add_parser("verify", parents=[common], help="exhaustive identity and dynamics sweeps")
    p.add_argument("--Q-max", type=positive_int, default=300)
    p.add_argument("--l-max", type=positive_int, default=6)
    p.add_argument("--neighbourhood-k", type=positive_int, default=5,
                   help="largest k for the large 2-index neighbourhood check")

    p = sub.add_parser("constant", parents=[common], help="the asymptotic constant c(d,k)")
    p.add_argument("--d", type=positive_int, required=True)
    p.add_argument("--k", type=positive_int, required=True)
    p.add_argument("--K-max", type=positive_int)
    p.add_argument("--l-max", type=positive_int, help="cap on run length (default 4d^3)")
    p.add_argument("--convergence", type=int_list, metavar="LIST")
    p.add_argument("--cross-validate", type=positive_int, metavar="Q")

    p = sub.add_parser("regions", parents=[common], help="dump tuple regions and residue sets")
    p.add_argument("--d", type=positive_int, required=True)
    p.add_argument("--k", type=positive_int, required=True)
    p.add_argument("--l", type=positive_int)
    p.add_argument("--l-max", type=positive_int)
    p.add_argument("--K-max", type=positive_int)
    return parser


def config_from_args(args: argparse.Namespace) -> JobConfig:
    cfg = JobConfig(command=args.command, workers=args.workers, out=args.out)
    for name in ("Q", "Q_list", "Q_max", "d", "k", "l", "l_max", "K_max", "neighbourhood_k",
                 "convergence", "cross_validate", "count_only"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    # verify defaults to a plain summary table
    cfg.format = args.format or {"gaps": "csv", "verify": "table"}.get(args.command, "json")
    return cfg


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands: each returns (text, exit code) -------------------------------

def cmd_farey(cfg: JobConfig):
    if cfg.count_only:
        return f"{sum(1 for _ in restricted_sequence(cfg.Q, cfg.d))}\n", EXIT_OK
    return "".join(f"{f}\n" for f in restricted_sequence(cfg.Q, cfg.d)), EXIT_OK


def _histogram(args):
    Q, d = args
    return gap_numerator_counts(Q, d)


def cmd_gaps(cfg: JobConfig):
    Qs = cfg.Q_list or [cfg.Q]
    jobs = [(Q, cfg.d) for Q in Qs]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            hists = list(pool.map(_histogram, jobs))
    else:
        hists = [_histogram(j) for j in jobs]
    if cfg.format == "json":
        body = hists[0].to_dict() if cfg.Q_list is None else [h.to_dict() for h in hists]
        return dumps(body), EXIT_OK
    if cfg.Q_list is None:
        return _csv(sorted(hists[0].counts.items()), ["k", "count"]), EXIT_OK
    rows = [(h.Q, h.d, k, n) for h in hists for k, n in sorted(h.counts.items())]
    return _csv(rows, ["Q", "d", "k", "count"]), EXIT_OK


def cmd_verify(cfg: JobConfig):
    Q_max = cfg.Q_max or 300
    results = [checks.identity_sweep(Q_max, cfg.l_max or 6)]
    results += list(checks.dynamics_sweep(Q_max))
    results.append(checks.neighbourhood_sweep(Q_max, cfg.neighbourhood_k or 5))
    if cfg.format == "json":
        text = dumps([asdict(r) for r in results])
    else:
        lines = [f"{'check':32} {'scope':22} {'checked':>10} {'violations':>10}"]
        for r in results:
            lines.append(f"{r.name:32} {r.scope:22} {r.checked:>10} {r.violations:>10}")
        for r in results:
            if not r.ok:
                lines.append(f"FIRST VIOLATION [{r.name}]: {r.first}")
        text = "\n".join(lines) + "\n"
    return text, EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def _record_rows(records):
    return [(r.ell, " ".join(map(str, r.xs)), r.area.numerator, r.area.denominator,
             repr(float(r.area)), len(r.pair_set), repr(r.contribution())) for r in records]


RECORD_HEADER = ["l", "xs", "area_num", "area_den", "area", "pairs", "contribution"]


def cmd_constant(cfg: JobConfig):
    code = EXIT_OK
    report = compute_constant(cfg.d, cfg.k, cfg.K_max, cfg.l_max)
    body = report.to_dict()
    rows = None
    if cfg.convergence:
        rows = convergence_report(cfg.d, cfg.k, cfg.convergence, cfg.workers, cfg.K_max)
        body["convergence"] = [r.to_dict() for r in rows]
    if cfg.cross_validate:
        cv = tuple_cross_validation(cfg.d, cfg.k, cfg.cross_validate, cfg.K_max)
        body["cross_validation"] = cv.to_dict()
        if not cv.ok:
            code = EXIT_FAIL
    if cfg.format == "json":
        return dumps(body), code
    if rows is not None:
        header = ["Q", "N", "N_over_Q2", "c", "residual", "residual_over_QlogQ"]
        return _csv([[repr(v) if isinstance(v, float) else v for v in r.to_dict().values()]
                     for r in rows], header), code
    return _csv(_record_rows(report.breakdown), RECORD_HEADER), code


def cmd_regions(cfg: JobConfig):
    if cfg.l is not None:
        K = cfg.K_max or default_k_max(cfg.k, cfg.l)
        records = [record_for(xs, cfg.d) for xs in admissible_tuples(cfg.l, cfg.k, K)]
    else:
        records = list(compute_constant(cfg.d, cfg.k, cfg.K_max, cfg.l_max).breakdown)
        if cfg.l_max is not None:
            records = [r for r in records if r.ell <= cfg.l_max]
    if cfg.format == "csv":
        return _csv(_record_rows(records), RECORD_HEADER), EXIT_OK
    return dumps({"d": cfg.d, "k": cfg.k, "records": [r.to_dict() for r in records]}), EXIT_OK


COMMANDS = {
    "farey": cmd_farey,
    "gaps": cmd_gaps,
    "verify": cmd_verify,
    "constant": cmd_constant,
    "regions": cmd_regions,
}


def run(cfg: JobConfig) -> int:
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        text, code = COMMANDS[cfg.command](cfg)
    flagged = [w for w in caught if issubclass(w.category, (KMaxWarning, RunBoundWarning))]
    for w in flagged:
        print(f"warning: {w.message}", file=sys.stderr)
    if flagged and code == EXIT_OK:
        code = EXIT_WARN
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        echo = {k: v for k, v in asdict(cfg).items() if k != "workers"}
        manifest = RunManifest(__version__, echo, time.perf_counter() - start,
                               {os.path.basename(cfg.out): sha256_text(text)})
        with open(cfg.out + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(asdict(manifest)))
    else:
        sys.stdout.write(text)
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return run(config_from_args(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
