"""Command-line entry point: ``hk generate | stats | exp <name> | oracle verify``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .core import HkParams, Multigraph, read_edge_csv, sample_step, write_edge_csv
from .errors import HkError
from .oracle import verify_marginals
from .rng import HkRng, coin_threshold
from .stats import IncrementalStats, StatsSnapshot, snapshot_from_graph

log = logging.getLogger("holme_kim")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(float(x)) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _num(text: str) -> int:
    # accept 1e6 style
    return int(float(text))


def snapshot_path(edges_path: str | Path) -> Path:
    p = Path(edges_path)
    return p.with_name(p.stem + ".stats.json")


def generate_files(params: HkParams, T: int, out: str | Path) -> tuple[Path, StatsSnapshot]:
    """Grow to ``T``, write the edge CSV at ``out`` and its snapshot JSON beside it."""
    if T < 1:
        raise ValueError(f"--t must be >= 1, got {T}")
    rng = HkRng(params.seed)
    thr = coin_threshold(params.p)
    g = Multigraph.initial(params.m)
    st = IncrementalStats(params)
    for _ in range(T - 1):
        trace = sample_step(g, params, rng, _thr=thr)
        st.update(trace, g)
        g.commit(trace.endpoints)
    write_edge_csv(g, out)
    snap = st.snapshot(per_vertex=False)
    sp = snapshot_path(out)
    try:
        sp.write_text(snap.to_json() + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write snapshot to {str(sp)!r}: {exc}") from exc
    return sp, snap


def _write_snapshot(snap: StatsSnapshot, fmt: str, out: str | None) -> None:
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        if fmt == "json":
            fh.write(snap.to_json() + "\n")
        else:
            d = snap.to_dict()
            d["degree_hist"] = json.dumps(d["degree_hist"])
            w = csv.DictWriter(fh, fieldnames=list(d), lineterminator="\n")
            w.writeheader()
            w.writerow(d)
    finally:
        if out:
            fh.close()


def cmd_generate(args) -> int:
    params = HkParams(args.m, args.p, args.seed)
    sp, snap = generate_files(params, args.t, args.out)
    print(f"wrote {args.out} and {sp} (t={snap.t}, c_loc={snap.c_loc:.6g}, c_glo={snap.c_glo:.6g})",
          file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    g, m = read_edge_csv(args.edges)
    snap = replace(snapshot_from_graph(g, per_vertex=False), m=m, p=args.p, seed=args.seed)
    _write_snapshot(snap, args.format, args.out)
    return 0


def cmd_exp(args) -> int:
    config = ex.ExperimentConfig(
        m=args.m, p=args.p, t_max=args.t, n_seeds=args.seeds, base_seed=args.seed,
        checkpoints=args.checkpoints, output_path=args.out, format=args.format,
    )
    name = args.name
    if name == "degree-law":
        res = ex.degree_law(config, d_report_max=args.d_max)
    elif name == "degree-bounds":
        res = ex.degree_bounds(config, tracked_vertex=args.track)
    elif name == "vertex-clustering":
        res = ex.vertex_clustering(config, degree_threshold=args.threshold)
    else:
        res = ex.EXPERIMENTS[name](config)
    if args.out:
        res.write()
    elif config.format == "json":
        sys.stdout.write(res.to_json() + "\n")
    else:
        res.write_csv(sys.stdout)
    log.info("summary: %s", json.dumps(res.summary))
    return 0


def cmd_oracle(args) -> int:
    report = verify_marginals(args.m, args.p, args.depth)
    print(json.dumps(report.to_dict(), indent=2))
    for c in report.failures():
        print(f"MISMATCH {c.name}: {c.detail}", file=sys.stderr)
    return 0 if report.passed else 1


def _add_model_flags(p: argparse.ArgumentParser, t_default: int) -> None:
    p.add_argument("--m", type=int, default=2, help="edges per new vertex (>= 2)")
    p.add_argument("--p", type=float, default=0.5, help="triad formation probability")
    p.add_argument("--t", type=_num, default=t_default, help="final time (number of vertices)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (base seed for multi-seed runs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hk", description="Holme-Kim random multigraph toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="grow one graph; write edges CSV and stats JSON")
    _add_model_flags(g, 1000)
    g.add_argument("--out", required=True, help="edge list CSV path; stats go to <stem>.stats.json")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="statistics of an edge list written by 'generate'")
    s.add_argument("edges")
    s.add_argument("--p", type=float, default=None, help="recorded in the output only")
    s.add_argument("--seed", type=int, default=None, help="recorded in the output only")
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("exp", help="run a theorem-checking experiment")
    e.add_argument("name", choices=sorted(ex.EXPERIMENTS))
    _add_model_flags(e, 10_000)
    e.add_argument("--seeds", type=int, default=1, help="number of seeds (base seed + k)")
    e.add_argument("--checkpoints", type=_int_list, default=None,
                   help="comma-separated times; default is a 10^(1/4) geometric grid")
    e.add_argument("--out", default=None)
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--d-max", type=int, default=None, help="degree-law: largest degree reported")
    e.add_argument("--track", type=int, default=10, help="degree-bounds: tracked vertex")
    e.add_argument("--threshold", type=int, default=50, help="vertex-clustering: minimum degree")
    e.set_defaults(func=cmd_exp)

    o = sub.add_parser("oracle", help="exact enumeration checks")
    osub = o.add_subparsers(dest="action", required=True)
    v = osub.add_parser("verify", help="check one-step marginals exactly on all small states")
    v.add_argument("--m", type=int, default=2)
    v.add_argument("--p", type=str, default="1/2", help="rational, e.g. 1/2 or 0.25")
    v.add_argument("--depth", type=int, default=2, choices=(0, 1, 2, 3))
    v.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (HkError, ValueError, OSError) as exc:
        print(f"hk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
