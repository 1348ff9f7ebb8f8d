"""``bench`` command line: run, mutate, report, plot."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .. import domains
from ..ppddl import parse_domain, serialize_domain
from .experiment import parse_manifest, run_experiment
from .mutate import mutate_chain
from .report import _write_csv, aggregate, delays, load_runs, plot, summary


def _cmd_run(args) -> int:
    path = Path(args.manifest)
    m = parse_manifest(path.read_text(), str(path.parent))
    if args.out:
        m.out = args.out
    elif not Path(m.out).is_absolute():
        m.out = str(path.parent / m.out)
    if args.workers:
        m.workers = args.workers
    runs = run_experiment(m)
    failed = [r for r in runs if r.error]
    for r in runs:
        status = "FAILED" if r.error else f"goals={r.total_goals}"
        print(f"{r.method:14s} seed={r.seed:<4d} {status}")
    print(f"wrote {m.out}")
    return 1 if failed else 0


def _cmd_mutate(args) -> int:
    if not Path(args.domain).exists() and domains.is_bundled(args.domain):
        d = domains.load_domain(args.domain)
    else:
        d = parse_domain(Path(args.domain).read_text())
    chain = mutate_chain(d, args.seed, args.chain)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for i, (dom, spec) in enumerate(chain, 1):
        record = {"step": i, "seed": spec.seed, "action": spec.action, "edits": [asdict(e) for e in spec.edits]}
        print(json.dumps(record, sort_keys=True))
        if out:
            (out / f"domain-{i}.pddl").write_text(serialize_domain(dom))
    if not out and chain:
        print(serialize_domain(chain[-1][0]))
    return 0


def _cmd_report(args) -> int:
    runs = load_runs(args.inp)
    out = Path(args.out)
    if out.suffix == ".csv":
        out.parent.mkdir(parents=True, exist_ok=True)
        _write_csv(out, aggregate(runs))
        _write_csv(out.with_name(out.stem + "-summary.csv"), summary(runs))
        _write_csv(out.with_name(out.stem + "-delays.csv"), delays(runs))
        plot(runs, out.parent)
    else:
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "aggregate.csv", aggregate(runs))
        _write_csv(out / "summary.csv", summary(runs))
        _write_csv(out / "delays.csv", delays(runs))
        plot(runs, out)
    return 0


def _cmd_plot(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for p in plot(load_runs(args.inp), out):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run every (method, seed) pair of a manifest")
    r.add_argument("--manifest", required=True)
    r.add_argument("--out", help="output directory (overrides the manifest)")
    r.add_argument("--workers", type=int, default=0)
    r.set_defaults(func=_cmd_run)
    m = sub.add_parser("mutate", help="print a chain of random single-action mutations")
    m.add_argument("--domain", required=True, help="domain file or bundled domain name")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--chain", type=int, default=1)
    m.add_argument("--out", help="directory for the mutated domain files")
    m.set_defaults(func=_cmd_mutate)
    rep = sub.add_parser("report", help="aggregate CSV and SVG figure from a metrics file")
    rep.add_argument("--in", dest="inp", required=True)
    rep.add_argument("--out", required=True, help="CSV path or output directory")
    rep.set_defaults(func=_cmd_report)
    pl = sub.add_parser("plot", help="SVG figure only")
    pl.add_argument("--in", dest="inp", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=_cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
