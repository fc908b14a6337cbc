"""Command line entry point: ``fairmatch {solve,simulate,generate,reduce,bench}``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import approx, bench, exact, online, reductions
from .model import (NotApplicable, ValidationError, assignment_to_dict, dumps_instance,
                    load_instance, make_assignment)

EXIT_OK, EXIT_INVALID, EXIT_INAPPLICABLE = 0, 2, 3


def _avgdeg(inst, order):
    g, rmap = approx.edge_item_reduction(inst)
    seq = [rmap.forward[e] for e in approx.resolve_edge_order(inst, order)]
    return make_assignment(inst, (rmap.backward[v] for v in approx.avg_degree_gmis(g, seq)))


SOLVERS = {
    "greedy": lambda inst, order: approx.greedy_cmm(inst, order),
    "flow": lambda inst, order: exact.flow_laminar(inst),
    "typeip": lambda inst, order: exact.type_ip(inst),
    "seq-half": lambda inst, order: exact.half_approx_multi(inst),
    "avgdeg": _avgdeg,
    "brute": lambda inst, order: exact.brute_force(inst),
}


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _ranking(inst, spec: str | None):
    if spec is None:
        return None
    if spec.startswith("random:"):
        rng = np.random.default_rng(int(spec.split(":", 1)[1]))
        return [inst.platforms[i] for i in rng.permutation(len(inst.platforms))]
    return spec.split(",")


def cmd_solve(args) -> int:
    inst = load_instance(args.inp)
    asg = SOLVERS[args.algo](inst, args.order)
    _write(args.out, json.dumps(assignment_to_dict(inst, asg)) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst = load_instance(args.inp)
    rep = online.competitive_trials(inst, args.trials, args.seed, _ranking(inst, args.ranking))
    if args.report:
        _write(args.report, rep.to_csv())
    print(f"trials={rep.trials} opt={rep.opt_value} mean={float(rep.mean):.4f} "
          f"stddev={rep.stddev:.4f} min={float(rep.min):.4f} max={float(rep.max):.4f}")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.config:
        cfg = bench.GenConfig.from_dict(json.loads(Path(args.config).read_text(encoding="utf-8")))
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
    else:
        cfg = bench.preset(args.preset, seed=args.seed or 0)
    _write(args.out, dumps_instance(bench.generate(cfg)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    text = Path(args.inp).read_text(encoding="utf-8")
    _write(args.out, dumps_instance(reductions.reduce_file(args.source, text)))
    return EXIT_OK


def load_suite(path: str):
    """Suite file: ``{"instances": [...], "algorithms": [...], "repetitions": n,
    "master_seed": s, "workers": w}``; each instance entry has a ``name`` and
    one of ``preset`` (with optional ``seed``), ``config`` or ``file``."""
    base = Path(path).parent
    suite = json.loads(Path(path).read_text(encoding="utf-8"))
    unknown = set(suite) - {"instances", "algorithms", "repetitions", "master_seed", "workers"}
    if unknown:
        raise bench.ConfigError(f"unknown suite keys {sorted(unknown)}")
    instances = {}
    for k, entry in enumerate(suite.get("instances", [])):
        name = entry.get("name", f"inst{k}")
        if "preset" in entry:
            instances[name] = bench.generate(bench.preset(entry["preset"], seed=entry.get("seed", 0)))
        elif "config" in entry:
            instances[name] = bench.generate(bench.GenConfig.from_dict(entry["config"]))
        elif "file" in entry:
            instances[name] = load_instance(base / entry["file"])
        else:
            raise bench.ConfigError(f"instance {name!r} needs 'preset', 'config' or 'file'")
    kwargs = {k: suite[k] for k in ("repetitions", "master_seed", "workers") if k in suite}
    return instances, suite.get("algorithms", ["greedy_cmm", "flow_laminar"]), kwargs


def cmd_bench(args) -> int:
    instances, algorithms, kwargs = load_suite(args.suite)
    try:
        report = bench.run_experiment(instances, algorithms, **kwargs)
    except ValueError as exc:
        raise bench.ConfigError(str(exc)) from None
    if args.report:
        _write(args.report, report.to_csv())
    print(report.table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairmatch", description="Matching under class quotas.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("--algo", choices=sorted(SOLVERS), default="greedy")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--order", default="input", help="input | weight | random:<seed>")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="random-order online trials")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ranking", help="random:<seed> or comma-separated platforms")
    p.add_argument("--report")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="synthetic course-allocation instance")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(bench.PRESETS))
    src.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reduce", help="build a CMM instance from another problem")
    p.add_argument("--from", dest="source", required=True, choices=["mis", "gmis", "ranking", "simmatch"])
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bench", help="run a solver comparison suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotApplicable as exc:
        print(f"fairmatch: not applicable: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (ValidationError, bench.ConfigError, json.JSONDecodeError, KeyError, TypeError,
            ValueError, OSError) as exc:
        print(f"fairmatch: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
