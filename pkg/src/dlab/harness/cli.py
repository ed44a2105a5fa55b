"""Command-line entry point: ``dlab run|sweep|dec|eluder|design|accept``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config


def _read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def cmd_run(args) -> int:
    from .run import run_experiment

    cfg = load_config(args.config)
    if args.out:
        cfg.out = args.out
    if not cfg.out:
        print("no output path: pass --out or set 'out' in the config", file=sys.stderr)
        return 2
    ledgers = run_experiment(cfg)
    for led in ledgers:
        print(f"{cfg.key} seed={led.seed} T={len(led.inst)} cum_regret={led.total:.6g}")
    return 0


def cmd_sweep(args) -> int:
    from .ledger import write_atomic
    from .sweep import summary_csv, sweep

    root = Path(args.dir)
    paths = sorted(p for p in root.glob("*.json"))
    if not paths:
        print(f"no *.json configs in {root}", file=sys.stderr)
        return 2
    configs, failed = [], []
    for p in paths:
        try:
            cfg = load_config(p)
        except ConfigError as exc:
            failed.append(f"{p.name}: {exc}")
            continue
        if not cfg.out:
            cfg.out = str(root / f"{p.stem}.csv")
        cfg.name = cfg.name or p.stem
        configs.append(cfg)
    rows = sweep(configs, args.jobs)
    text = summary_csv(rows)
    write_atomic(root / "summary.csv", text)
    sys.stdout.write(text)
    failed += [f"{r.config}: {r.error.splitlines()[0]}" for r in rows if r.status != "ok"]
    for line in failed:
        print(f"failed: {line}", file=sys.stderr)
    return 1 if failed else 0


def cmd_dec(args) -> int:
    from ..dec_lab import DecProblem, GridDecProblem, dec_offset

    spec = _read_json(args.problem)
    gamma = float(spec["gamma"])
    if "grid" in spec:
        prob = GridDecProblem(np.asarray(spec["grid"], dtype=float), np.asarray(spec["ref_means"], dtype=float), gamma)
    else:
        prob = DecProblem(np.asarray(spec["means"], dtype=float), np.asarray(spec["ref_means"], dtype=float),
                          gamma, spec.get("divergence", "sq"))
    cert = dec_offset(prob, iters=int(spec.get("iters", 2000)), tol=float(spec.get("tol", 1e-3)),
                      method=spec.get("method", "lp"))
    print(json.dumps(cert.to_json()))
    return 0


def cmd_eluder(args) -> int:
    from ..dec_lab import eluder_dimension

    spec = _read_json(args.cls)
    res = eluder_dimension(np.asarray(spec["values"], dtype=float), args.eps, spec.get("fstar"))
    print(json.dumps({"value": res.value, "witness_eps": res.witness_eps, "flagged": res.flagged}))
    return 0


def cmd_design(args) -> int:
    from ..numprob import g_optimal_design

    spec = _read_json(args.points)
    pts = spec["points"] if isinstance(spec, dict) else spec
    res = g_optimal_design(np.asarray(pts, dtype=float), tol=args.tol)
    print(json.dumps({
        "design": res.design.probs.tolist(), "leverages": res.leverages.tolist(), "rank": res.rank,
        "max_leverage": res.max_leverage, "iterations": res.iterations, "converged": res.converged,
    }))
    return 0


def cmd_accept(args) -> int:
    from .acceptance import CRITERIA, run_all

    numbers = args.only or sorted(CRITERIA)
    results = []
    for n in numbers:
        res = run_all([n])[0]
        print(res.line(), flush=True)
        results.append(res)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlab", description="Interactive decision-making experiment harness.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one config and write its regret CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("sweep", help="run every *.json config in a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("dec", help="solve an offset DEC problem and print its certificate")
    p.add_argument("--problem", required=True)
    p.set_defaults(fn=cmd_dec)

    p = sub.add_parser("eluder", help="exact eluder dimension of a finite class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(fn=cmd_eluder)

    p = sub.add_parser("design", help="G-optimal design of a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(fn=cmd_design)

    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="*")
    p.set_defaults(fn=cmd_accept)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, KeyError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
