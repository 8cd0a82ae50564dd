"""Trial orchestration: run the engine over instances and seeds, emit JSONL and CSV."""
from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ._validation import mask_to_set
from .baselines import brute_opt, competitive_report
from .checks import MAX_CHECK_N, check_structure, check_time_monotone
from .engine import VARIANTS, OnlineSubmodularCover, TimeMonotonicityError
from .functions import MAX_TABLE_N
from .instances import Instance, InstanceError, generate

__all__ = [
    "CSV_COLUMNS",
    "TrialConfig",
    "TrialResult",
    "opt_sequence",
    "run_trial",
    "run_trials",
    "format_jsonl",
    "format_csv",
    "SuiteRun",
    "SUITE_KINDS",
    "bundled_suite",
    "suite_summary",
]

CSV_COLUMNS = (
    "t",
    "seed",
    "alg_cost",
    "opt_cost",
    "ratio",
    "frac_cost",
    "rounds_k",
    "violations_fixed",
    "greedy_adds",
    "oracle_calls",
)


@dataclass(frozen=True)
class TrialConfig:
    instance: str | None = None
    variant: str = "generic"
    eps: float = 1.0
    seeds: tuple[int, ...] = (0,)
    log: str | None = None
    summary: str | None = None
    check_time_monotone: bool = True
    check_family: bool = True
    compute_opt: bool = True

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("need at least one seed")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


@dataclass
class TrialResult:
    seed: int
    steps: list[dict] = field(default_factory=list)
    violations: int = 0
    feasible: bool = True
    error: str | None = None

    @property
    def final_ratio(self) -> float:
        return self.steps[-1]["ratio"] if self.steps else math.nan


def opt_sequence(instance: Instance) -> list[float] | None:
    """Brute-force ``OPT_t`` for every prefix, or ``None`` when ``n`` is too large."""
    if instance.n > MAX_TABLE_N:
        return None
    return [brute_opt(f, instance.costs).cost for f in instance.functions()]


def _precheck(instance: Instance, cfg: TrialConfig):
    funcs = instance.functions()
    if cfg.check_time_monotone and instance.n <= MAX_TABLE_N:
        res = check_time_monotone(funcs)
        if not res.passed:
            t, subset = res.witness
            # stream positions count from 0
            raise TimeMonotonicityError(t, subset)
    if cfg.variant == "three-increasing" and cfg.check_family and not instance.coverage_only:
        if instance.n > MAX_CHECK_N:
            raise InstanceError("three-increasing variant needs a coverage stream or n <= 14 for checking")
        for t, f in enumerate(funcs, start=1):
            res = check_structure(f, "3-increasing")
            if not res.passed:
                raise InstanceError(f"f^({t}) is not 3-increasing (witness {res.witness})")
    return funcs


def run_trial(instance: Instance, variant: str, eps: float, seed: int, opts: Sequence[float] | None = None,
              functions=None) -> TrialResult:
    """One engine run over the whole stream."""
    funcs = instance.functions() if functions is None else functions
    est = OnlineSubmodularCover(variant=variant, eps=eps, random_state=seed)
    out = TrialResult(seed=seed)
    for i, f_t in enumerate(funcs):
        est.partial_fit(f_t, costs=instance.costs, fmin=instance.fmin, fmax=instance.fmax)
        step = est.history_[-1]
        opt = opts[i] if opts is not None else math.nan
        if opts is None:
            ratio = math.nan
        else:
            ratio = competitive_report([step.cost], [opt]).ratios[0]
        out.feasible &= step.feasible
        out.steps.append(
            {
                "type": "step",
                "seed": seed,
                "t": step.t,
                "cover": sorted(mask_to_set(step.cover)),
                "sampled": sorted(mask_to_set(step.sampled)),
                "greedy": list(step.greedy),
                "rounds": step.rounds,
                "violations": step.violations,
                "frac_cost": step.frac_cost,
                "cost": step.cost,
                "opt_cost": opt,
                "ratio": ratio,
                "oracle_calls": step.oracle_calls,
                "remaining": step.remaining,
                "feasible": step.feasible,
                "rows": step.rows,
            }
        )
    out.violations = getattr(est, "n_violations_", 0)
    return out


def run_trials(instance: Instance, cfg: TrialConfig) -> list[TrialResult]:
    funcs = _precheck(instance, cfg)
    opts = opt_sequence(instance) if cfg.compute_opt else None
    return [run_trial(instance, cfg.variant, cfg.eps, s, opts, funcs) for s in cfg.seeds]


def _num(v):
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return float(f"{v:.12g}")
    if isinstance(v, (np.floating,)):
        return _num(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def summary_record(trials: Sequence[TrialResult], cfg: TrialConfig) -> dict:
    final = [t.final_ratio for t in trials if t.steps]
    finite = [r for r in final if not math.isnan(r)]
    return {
        "type": "summary",
        "variant": cfg.variant,
        "eps": cfg.eps,
        "seeds": list(cfg.seeds),
        "runs": len(trials),
        "all_feasible": all(t.feasible for t in trials),
        "max_violations": max((t.violations for t in trials), default=0),
        "median_final_ratio": float(np.median(finite)) if finite else math.nan,
        "max_ratio": max((s["ratio"] for t in trials for s in t.steps if not math.isnan(s["ratio"])), default=math.nan),
    }


def format_jsonl(trials: Sequence[TrialResult], cfg: TrialConfig) -> str:
    lines = [json.dumps(_num(s), sort_keys=True) for t in trials for s in t.steps]
    lines.append(json.dumps(_num(summary_record(trials, cfg)), sort_keys=True))
    return "\n".join(lines) + "\n"


def format_csv(trials: Sequence[TrialResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for trial in trials:
        for s in trial.steps:
            row = [
                s["t"],
                s["seed"],
                s["cost"],
                s["opt_cost"],
                s["ratio"],
                s["frac_cost"],
                s["rounds"],
                s["violations"],
                len(s["greedy"]),
                s["oracle_calls"],
            ]
            w.writerow(["" if isinstance(v, float) and math.isnan(v) else (f"{v:.12g}" if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


# -- bundled regression suite ---------------------------------------------------
SUITE_KINDS = ("set-cover-stream", "prefix-coverage", "partition-matroid")
SUITE_NS = (8, 10, 12)
SUITE_TS = (15, 25)
SUITE_SEEDS = tuple(range(20))


@dataclass
class SuiteRun:
    kind: str
    n: int
    T: int
    seed: int
    variant: str
    instance: Instance
    functions: list
    opts: list[float]
    trial: TrialResult

    @property
    def config(self) -> tuple[str, int, int, str]:
        return (self.kind, self.n, self.T, self.variant)


def bundled_suite(kinds=SUITE_KINDS, ns=SUITE_NS, ts=SUITE_TS, seeds=SUITE_SEEDS, eps: float = 1.0):
    """Yield one :class:`SuiteRun` per (kind, n, T, seed, variant).

    The instance seed doubles as the engine seed. Coverage kinds also run the
    three-increasing variant.
    """
    for kind in kinds:
        variants = ("generic",) if kind == "partition-matroid" else ("generic", "three-increasing")
        for n in ns:
            for T in ts:
                for seed in seeds:
                    inst = generate(kind, n=n, T=T, seed=seed)
                    funcs = inst.functions()
                    opts = opt_sequence(inst)
                    for v in variants:
                        trial = run_trial(inst, v, eps, seed, opts, funcs)
                        yield SuiteRun(kind, n, T, seed, v, inst, funcs, opts, trial)


def suite_summary(runs) -> list[dict]:
    """Per configuration: median final ratio and max ratio over all seeds and steps."""
    groups: dict[tuple, list[SuiteRun]] = {}
    for r in runs:
        groups.setdefault(r.config, []).append(r)
    out = []
    for (kind, n, T, variant), rs in groups.items():
        out.append(
            {
                "kind": kind,
                "n": n,
                "T": T,
                "variant": variant,
                "median_ratio": float(np.median([r.trial.final_ratio for r in rs])),
                "max_ratio": max(s["ratio"] for r in rs for s in r.trial.steps),
                "max_violations": max(r.trial.violations for r in rs),
            }
        )
    return _num(out)
