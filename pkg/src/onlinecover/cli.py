"""Command line entry point: ``onlinecover {gen,run,check,opt}``.

Exit codes: 0 success, 1 a property or feasibility check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ._validation import to_mask
from .baselines import brute_opt
from .bench import TrialConfig, format_csv, format_jsonl, run_trials
from .checks import MAX_CHECK_N, check_structure, check_time_monotone
from .engine import VARIANTS, TimeMonotonicityError
from .functions import MAX_TABLE_N, GroundSet
from .instances import GENERATOR_KINDS, InstanceError, generate, load_instance, save_instance

PROPERTIES = ("monotone", "submodular", "3-increasing", "time-monotone")


def _seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onlinecover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--t", type=int, default=25, dest="T")
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="run the online algorithm over seeds")
    r.add_argument("--instance", required=True)
    r.add_argument("--variant", default="generic", choices=VARIANTS)
    r.add_argument("--eps", type=float, default=1.0)
    r.add_argument("--seeds", type=_seeds, default=(0,))
    r.add_argument("--log", help="JSONL output path")
    r.add_argument("--summary", help="CSV output path")
    r.add_argument("--no-opt", action="store_true", help="skip brute-force OPT")

    c = sub.add_parser("check", help="check a structural property of an instance")
    c.add_argument("--instance", required=True)
    c.add_argument("--property", required=True, choices=PROPERTIES)

    o = sub.add_parser("opt", help="brute-force optimum of one prefix function")
    o.add_argument("--instance", required=True)
    o.add_argument("--at-time", type=int, required=True)
    return p


def _err(msg: str) -> None:
    print(f"onlinecover: {msg}", file=sys.stderr)


def cmd_gen(args) -> int:
    inst = generate(args.kind, n=args.n, T=args.T, density=args.density, seed=args.seed)
    save_instance(inst, args.out)
    print(f"wrote {args.kind} instance (n={inst.n}, T={len(inst.stream)}) to {args.out}")
    return 0


def _write(path, text):
    if path:
        Path(path).write_text(text)


def cmd_run(args) -> int:
    inst = load_instance(args.instance)
    cfg = TrialConfig(
        instance=args.instance,
        variant=args.variant,
        eps=args.eps,
        seeds=args.seeds,
        log=args.log,
        summary=args.summary,
        compute_opt=not args.no_opt and inst.n <= MAX_TABLE_N,
    )
    try:
        trials = run_trials(inst, cfg)
    except TimeMonotonicityError as exc:
        _err(f"{exc}; aborting")
        return 1
    if not inst.stream:
        _write(cfg.log, "")
        _write(cfg.summary, format_csv([]))
        print("empty stream, nothing to do")
        return 0
    _write(cfg.log, format_jsonl(trials, cfg))
    _write(cfg.summary, format_csv(trials))
    bad = [t.seed for t in trials if not t.feasible]
    for t in trials:
        last = t.steps[-1]
        print(f"seed={t.seed} cost={last['cost']:g} ratio={last['ratio']:.4g} violations={t.violations}")
    if bad:
        _err(f"infeasible cover for seeds {bad}")
        return 1
    return 0


def _format_witness(prop, witness, ground: GroundSet) -> str:
    def fmt(s):
        return ground.format(to_mask(s, ground.n))

    if prop == "time-monotone":
        t, s = witness
        return f"t={t}, S={fmt(s)}"
    if prop == "monotone":
        s, j = witness
        return f"S={fmt(s)}, j={ground.label(j)}"
    if prop == "submodular":
        s, i, j = witness
        return f"S={fmt(s)}, i={ground.label(i)}, j={ground.label(j)}"
    a, s = witness
    return f"A={fmt(a)}, S={fmt(s)}"


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    ground = GroundSet(inst.n, tuple(inst.labels) if inst.labels else None)
    funcs = inst.functions()
    if args.property == "time-monotone":
        if inst.n > MAX_TABLE_N:
            _err(f"time-monotonicity check needs n <= {MAX_TABLE_N}")
            return 2
        res = check_time_monotone(funcs)
        where = "stream"
    else:
        if inst.n > MAX_CHECK_N:
            _err(f"structure checks need n <= {MAX_CHECK_N}")
            return 2
        res, where = None, "stream"
        for t, f in enumerate(funcs, start=1):
            res = check_structure(f, args.property)
            if not res.passed:
                where = f"f^({t})"
                break
        if res is None:
            print(f"{args.property}: pass (empty stream)")
            return 0
    if res.passed:
        print(f"{args.property}: pass")
        return 0
    print(f"{args.property}: FAIL on {where}, witness {_format_witness(args.property, res.witness, ground)}")
    if res.detail:
        print(res.detail)
    return 1


def cmd_opt(args) -> int:
    inst = load_instance(args.instance)
    f = inst.function_at(args.at_time)
    res = brute_opt(f, inst.costs)
    ground = GroundSet(inst.n, tuple(inst.labels) if inst.labels else None)
    print(json.dumps({"t": args.at_time, "cover": sorted(res.cover), "label": ground.format(to_mask(res.cover, inst.n)),
                      "cost": res.cost}))
    return 0


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "check": cmd_check, "opt": cmd_opt}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, ValueError, OSError, json.JSONDecodeError) as exc:
        _err(str(exc))
        return 2

