"""Offline baselines and brute-force ground truth."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_costs, mask_to_set
from .functions import MAX_TABLE_N, SetFunction

__all__ = [
    "OptResult",
    "CompetitiveReport",
    "wolsey_greedy",
    "brute_opt",
    "marginal_bounds",
    "competitive_report",
    "summarize_reports",
]


@dataclass(frozen=True)
class OptResult:
    cover: frozenset[int]
    cost: float
    evaluated: int = 0


def _tau(f: SetFunction, tau):
    if tau is not None:
        return tau
    return 0.0 if f.is_integer else 1e-9 * max(1.0, float(f.values_of([f.full])[0]))


def wolsey_greedy(f: SetFunction, costs, tau: float | None = None) -> OptResult:
    """Density greedy: repeatedly add the element maximizing gain per unit cost.

    Zero-cost elements with positive gain go first; ties resolve to the lower index.
    """
    c = check_costs(costs, f.n)
    tau = _tau(f, tau)
    chosen = 0
    evaluated = 0
    while True:
        g = f.contract(chosen)
        vals = g.values_of([0] + [1 << j for j in range(f.n)])
        evaluated += f.n + 1
        gains = vals[1:] - vals[0]
        best, best_key = None, None
        for j in range(f.n):
            if chosen >> j & 1 or gains[j] <= tau:
                continue
            ratio = math.inf if c[j] == 0 else gains[j] / c[j]
            key = (ratio, -j)
            if best_key is None or key > best_key:
                best, best_key = j, key
        if best is None:
            cover = mask_to_set(chosen)
            return OptResult(cover, float(sum(c[j] for j in cover)), evaluated)
        chosen |= 1 << best


def _subset_costs(c: np.ndarray) -> np.ndarray:
    out = np.zeros(1)
    for cj in c:
        out = np.concatenate([out, out + cj])
    return out


def brute_opt(f: SetFunction, costs, tol: float | None = None, table: np.ndarray | None = None) -> OptResult:
    """Cheapest ``S`` with ``f(S) = f(N)`` by enumerating all ``2**n`` subsets.

    Ties go to the smallest bitmask.
    """
    if f.n > MAX_TABLE_N:
        raise ValueError(f"brute force needs n <= {MAX_TABLE_N}, got n={f.n}")
    c = check_costs(costs, f.n)
    if table is None:
        table = f.table()
    if tol is None:
        tol = 0.0 if f.is_integer else 1e-9 * max(1.0, abs(float(table[-1])))
    covers = table >= table[-1] - tol
    subset_cost = np.where(covers, _subset_costs(c), np.inf)
    best = int(np.argmin(subset_cost))
    return OptResult(mask_to_set(best), float(subset_cost[best]), table.size)


def marginal_bounds(functions: Sequence[SetFunction], tol: float = 1e-12) -> tuple[float, float]:
    """Exact ``(fmin, fmax)``: smallest nonzero and largest marginal over all functions, sets and elements."""
    fmin, fmax = math.inf, 0.0
    for f in functions:
        if f.n > MAX_TABLE_N:
            raise ValueError(f"exact marginal bounds need n <= {MAX_TABLE_N}")
        table = f.table()
        idx = np.arange(table.size, dtype=np.int64)
        for j in range(f.n):
            free = idx[(idx >> j) & 1 == 0]
            gains = table[free | (1 << j)] - table[free]
            fmax = max(fmax, float(gains.max()))
            pos = gains[gains > tol]
            if pos.size:
                fmin = min(fmin, float(pos.min()))
    if not math.isfinite(fmin):
        fmin = fmax = 0.0
    return fmin, fmax


@dataclass
class CompetitiveReport:
    ratios: list[float] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)

    @property
    def max(self) -> float:
        return max(self.ratios) if self.ratios else math.nan

    @property
    def median(self) -> float:
        return float(np.median(self.ratios)) if self.ratios else math.nan

    def summary(self) -> dict:
        return {"max_ratio": self.max, "median_ratio": self.median, "steps": len(self.ratios), "flagged": self.flagged}


def competitive_report(alg_costs: Sequence[float], opt_costs: Sequence[float]) -> CompetitiveReport:
    """Per-step ratio ``cost(S_t) / OPT_t``.

    Steps with ``OPT_t = 0`` score 1 when the algorithm also paid nothing and
    ``inf`` (listed in ``flagged``) otherwise.
    """
    if len(alg_costs) != len(opt_costs):
        raise ValueError("need one OPT value per step")
    report = CompetitiveReport()
    for t, (a, o) in enumerate(zip(alg_costs, opt_costs), start=1):
        if o > 0:
            report.ratios.append(a / o)
        elif a == 0:
            report.ratios.append(1.0)
        else:
            report.ratios.append(math.inf)
            report.flagged.append(t)
    return report


def summarize_reports(reports: Sequence[CompetitiveReport]) -> dict:
    """Mean over seeds of the per-run max and median ratios."""
    if not reports:
        return {"runs": 0}
    maxes = [r.max for r in reports if r.ratios]
    medians = [r.median for r in reports if r.ratios]
    return {
        "runs": len(reports),
        "mean_max_ratio": float(np.mean(maxes)) if maxes else math.nan,
        "mean_median_ratio": float(np.mean(medians)) if medians else math.nan,
        "max_ratio": float(np.max(maxes)) if maxes else math.nan,
    }
