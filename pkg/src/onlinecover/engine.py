"""Online submodular cover by fractional LP + randomized rounding with alterations.

Per time step the estimator contracts the new function by everything already
bought, runs ``k`` rounds of "separate, then sample", and finishes with
cheapest-first greedy alterations so the output is always a full cover.

Variants:

``generic``
    violated rows found by exponential-clock separation on the contracted function;
``three-increasing``
    the same search run on every anchored function ``I(v; . | committed)``,
    with ``k`` driven by ``fmax`` instead of the remaining coverage;
``slow-explicit``
    every violated row of the full LP is enumerated (``2**n`` rows, or
    ``n * 2**n`` anchored rows with ``explicit_anchored=True``) before rounding.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_costs, check_random_state, mask_to_set
from .checks import check_time_monotone
from .functions import MAX_TABLE_N, CostVector, SetFunction
from .lp import SATISFACTION_RTOL, CoveringRow, OnlineCoveringLP, row_from_violation
from .separation import find_violated

__all__ = [
    "VARIANTS",
    "EngineConfig",
    "RoundingState",
    "TimeStepResult",
    "TimeMonotonicityError",
    "compute_rounds",
    "rounding_gamma",
    "separation_delta",
    "sample_round",
    "greedy_alterations",
    "explicit_rows",
    "OnlineSubmodularCover",
]

VARIANTS = ("generic", "three-increasing", "slow-explicit")


class TimeMonotonicityError(ValueError):
    """The stream handed to the engine is not time-monotone."""

    def __init__(self, t: int, subset: frozenset[int]):
        self.t = t
        self.subset = subset
        shown = "{" + ",".join(map(str, sorted(subset))) + "}"
        super().__init__(
            f"stream is not time-monotone at t={t}: S={shown} covers f^({t}) but not f^({t - 1})"
        )


def compute_rounds(t: int, remaining: float, fmin: float, gamma: float) -> int:
    """``ceil(ln(t^2 * remaining / fmin) / ln(1/gamma))``, at least 1; 0 when nothing remains."""
    if remaining <= 0:
        return 0
    if fmin <= 0:
        raise ValueError("fmin must be positive")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    k = math.ceil(math.log(t * t * remaining / fmin) / math.log(1 / gamma))
    return max(1, k)


def rounding_gamma(eps: float) -> float:
    return 1 - 1 / (math.e * (1 + eps))


def separation_delta(cmin: float, c_total: float, k: int, t: int, floor: float = 1e-6) -> float:
    """Failure probability per separation call; ``floor`` kicks in for all-zero costs."""
    if c_total <= 0 or cmin <= 0:
        return floor
    return min(0.5, 6 * cmin / (math.pi**2 * k * t * t * c_total))


@dataclass(frozen=True)
class EngineConfig:
    variant: str = "generic"
    eps: float = 1.0
    tol: float | None = None
    seed: int | None = None
    max_explicit_n: int = 14
    explicit_anchored: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.tol is not None and self.tol < 0:
            raise ValueError("tol must be nonnegative")


@dataclass
class RoundingState:
    """Committed sampled set ``R``, alteration set ``G`` and per-element inclusion bookkeeping.

    ``log_miss[j]`` is ``sum over rounds of log(1 - x_j)``, so the cumulative
    inclusion probability is ``q_j = 1 - exp(log_miss[j])``.
    """

    n: int
    sampled: int = 0
    greedy: int = 0
    log_miss: np.ndarray = None
    rounds: int = 0
    violations: int = 0

    def __post_init__(self):
        if self.log_miss is None:
            self.log_miss = np.zeros(self.n)

    @property
    def committed(self) -> int:
        return self.sampled | self.greedy

    @property
    def q(self) -> np.ndarray:
        return -np.expm1(self.log_miss)


def sample_round(x: np.ndarray, state: RoundingState, seed=None) -> int:
    """One round of independent rounding; returns the bitmask of newly committed elements.

    Each element outside ``R`` joins with probability ``(q_new - q_old) / (1 - q_old)``
    where ``q_new = 1 - (1 - q_old)(1 - x_j)``, which equals ``x_j``.
    """
    rng = check_random_state(seed)
    x = np.asarray(x, dtype=float)
    u = rng.random(state.n)
    with np.errstate(divide="ignore"):
        state.log_miss = state.log_miss + np.log1p(-x)
    new = 0
    for j in np.flatnonzero(u < x):
        bit = 1 << int(j)
        if not state.committed & bit:
            new |= bit
    state.sampled |= new
    state.rounds += 1
    return new


def greedy_alterations(f: SetFunction, costs, tau: float = 0.0) -> list[int]:
    """Add the cheapest element with marginal above ``tau`` until none is left.

    ``f`` should already be contracted by everything committed. Ties in cost go
    to the lower index. Returns the picked elements in order.
    """
    costs = check_costs(costs, f.n)
    picked: list[int] = []
    g = f
    while True:
        vals = g.values_of([0] + [1 << j for j in range(f.n)])
        gains = vals[1:] - vals[0]
        candidates = [j for j in range(f.n) if gains[j] > tau]
        if not candidates:
            return picked
        j = min(candidates, key=lambda i: (costs[i], i))
        picked.append(j)
        g = g.contract(1 << j)


def explicit_rows(f: SetFunction, anchored: bool = False, tol: float = 1e-12):
    """All nontrivial rows of the LP for ``f`` as ``(anchor, S, coefficient matrix, rhs)`` blocks.

    Yields one block per anchor (``None`` for the plain rows).
    """
    if f.n > MAX_TABLE_N:
        raise ValueError(f"explicit rows need n <= {MAX_TABLE_N}")
    table = f.table()
    idx = np.arange(1 << f.n, dtype=np.int64)
    funcs = [(None, table)]
    if anchored:
        funcs = [(v, table[1 << v] + table - table[idx | (1 << v)]) for v in range(f.n)]
    for v, g in funcs:
        rhs = g[-1] - g
        coefs = np.stack([g[idx | (1 << j)] - g for j in range(f.n)], axis=1)
        keep = rhs > tol
        yield v, idx[keep], coefs[keep], rhs[keep]


@dataclass
class TimeStepResult:
    t: int
    cover: int
    sampled: int
    greedy: list[int]
    rounds: int
    violations: int
    frac_cost: float
    cost: float
    oracle_calls: int
    remaining: float
    feasible: bool
    rows: list[dict] = field(default_factory=list)

    @property
    def cover_set(self) -> frozenset[int]:
        return mask_to_set(self.cover)

    def to_dict(self) -> dict:
        return asdict(self)


class OnlineSubmodularCover(BaseEstimator):
    """Maintain a monotone chain of covers for a time-monotone stream of submodular functions.

    Parameters
    ----------
    variant : {"generic", "three-increasing", "slow-explicit"}
    eps : float in (0, 1]
        Separation margin; also sets the per-round contraction factor.
    tol : float or None
        Marginal threshold for greedy alterations. ``None`` means 0 for
        integer-valued oracles and ``1e-9 * fmin`` otherwise.
    max_explicit_n : int
        Largest ground set the slow-explicit variant accepts.
    explicit_anchored : bool
        Slow-explicit only: enumerate the anchored rows instead of the plain ones.
    random_state : int, Generator or None

    Attributes
    ----------
    cover_ : frozenset of int
        Current committed cover.
    x_ : ndarray
        Current fractional LP solution.
    history_ : list of TimeStepResult
    n_violations_ : int
        Separation fixes over the whole run.
    """

    def __init__(
        self,
        variant: str = "generic",
        eps: float = 1.0,
        tol: float | None = None,
        max_explicit_n: int = 14,
        explicit_anchored: bool = False,
        random_state=None,
    ):
        self.variant = variant
        self.eps = eps
        self.tol = tol
        self.max_explicit_n = max_explicit_n
        self.explicit_anchored = explicit_anchored
        self.random_state = random_state

    # -- sklearn-style entry points ----------------------------------------
    def fit(self, stream: Sequence[SetFunction], costs, fmin: float, fmax: float | None = None):
        self._initialize(costs, fmin, fmax)
        for f_t in stream:
            self.advance(f_t)
        return self

    def partial_fit(self, f_t: SetFunction, costs=None, fmin: float | None = None, fmax: float | None = None):
        if not hasattr(self, "state_"):
            if costs is None or fmin is None:
                raise ValueError("the first partial_fit call needs costs and fmin")
            self._initialize(costs, fmin, fmax)
        self.advance(f_t)
        return self

    def predict(self, f: SetFunction | None = None) -> np.ndarray:
        """Indicator vector of the current cover (``f`` is accepted for API symmetry and ignored)."""
        self._check_initialized()
        return np.array([self.state_.committed >> j & 1 for j in range(self.n_)], dtype=bool)

    # -- state -------------------------------------------------------------
    def _initialize(self, costs, fmin, fmax):
        self.config_ = EngineConfig(
            variant=self.variant,
            eps=float(self.eps),
            tol=self.tol,
            seed=self.random_state if isinstance(self.random_state, int) else None,
            max_explicit_n=self.max_explicit_n,
            explicit_anchored=self.explicit_anchored,
        )
        costs = np.asarray(costs, dtype=float)
        self.n_ = costs.size
        self.costs_ = CostVector(costs)
        if fmin is None or not fmin > 0:
            raise ValueError("fmin must be a positive number")
        if self.variant == "three-increasing" and (fmax is None or fmax < fmin):
            raise ValueError("the three-increasing variant needs fmax >= fmin")
        if self.variant == "slow-explicit" and self.n_ > self.max_explicit_n:
            raise ValueError(f"slow-explicit variant is limited to n <= {self.max_explicit_n}")
        self.fmin_ = float(fmin)
        self.fmax_ = None if fmax is None else float(fmax)
        self.rng_ = check_random_state(self.random_state)
        self.lp_ = OnlineCoveringLP(self.costs_.c)
        self.state_ = RoundingState(self.n_)
        self.history_: list[TimeStepResult] = []
        self.t_ = 0
        self.n_violations_ = 0
        self._previous: SetFunction | None = None

    def _check_initialized(self):
        if not hasattr(self, "state_"):
            raise RuntimeError("estimator has not seen any function yet; call fit or partial_fit")

    @property
    def cover_(self) -> frozenset[int]:
        self._check_initialized()
        return mask_to_set(self.state_.committed)

    @property
    def x_(self) -> np.ndarray:
        self._check_initialized()
        return self.lp_.x.copy()

    def cover_cost(self) -> float:
        return self.costs_.total(self.state_.committed)

    def _tau(self, f: SetFunction) -> float:
        if self.tol is not None:
            return float(self.tol)
        return 0.0 if f.is_integer else 1e-9 * self.fmin_

    # -- one time step -------------------------------------------------------
    def advance(self, f_t: SetFunction) -> TimeStepResult:
        """Process the next function of the stream and return what was bought."""
        self._check_initialized()
        if f_t.n != self.n_:
            raise ValueError(f"function has n={f_t.n}, expected {self.n_}")
        self.t_ += 1
        t = self.t_
        cfg = self.config_
        state = self.state_
        calls0 = f_t.oracle_calls
        tau = self._tau(f_t)

        if cfg.variant == "slow-explicit" and self._previous is not None:
            res = check_time_monotone([self._previous, f_t])
            if not res.passed:
                # positions in the stream count from 0
                raise TimeMonotonicityError(t - 1, res.witness[1])
        self._previous = f_t

        start = state.committed
        remaining = float(f_t.contract(start).values_of([f_t.full])[0])
        rows: list[dict] = []
        violations = 0
        sampled = 0
        k = 0
        if remaining > tau:
            if cfg.variant == "slow-explicit":
                gamma = math.exp(-1)
                scale = self.fmax_ if cfg.explicit_anchored and self.fmax_ is not None else remaining
            else:
                gamma = rounding_gamma(cfg.eps)
                scale = self.fmax_ if cfg.variant == "three-increasing" else remaining
            k = compute_rounds(t, scale, self.fmin_, gamma)
            if cfg.variant == "slow-explicit":
                rows.extend(self._submit_explicit(f_t, t))
            delta = separation_delta(self.costs_.cmin, self.costs_.total(), k, t)
            for _ in range(k):
                if cfg.variant != "slow-explicit":
                    fixed = self._separate(f_t, t, delta, rows)
                    violations += fixed
                sampled |= sample_round(self.lp_.x, state, self.rng_)

        g = f_t.contract(state.committed)
        picked = greedy_alterations(g, self.costs_.c, tau)
        for j in picked:
            state.greedy |= 1 << j

        cover = state.committed
        covered, full = f_t.values_of([cover, f_t.full])
        slack = 0.0 if f_t.is_integer else self.n_ * tau + 1e-9 * max(1.0, abs(full))
        result = TimeStepResult(
            t=t,
            cover=cover,
            sampled=sampled & ~start,
            greedy=picked,
            rounds=k,
            violations=violations,
            frac_cost=self.lp_.fractional_cost(),
            cost=self.costs_.total(cover),
            oracle_calls=f_t.oracle_calls - calls0,
            remaining=remaining,
            feasible=bool(covered >= full - slack and cover & start == start),
            rows=rows,
        )
        self.history_.append(result)
        return result

    def _submit(self, row: CoveringRow, rows: list[dict]) -> float:
        before = self.lp_.mass()
        gained = self.lp_.submit(row)
        if gained > 0:
            rows.append({**row.to_dict(), "mass_before": before, "mass_delta": gained})
        return gained

    def _separate(self, f_t: SetFunction, t: int, delta: float, rows: list[dict]) -> int:
        """Fix violated rows until the search comes back empty; returns the number of fixes."""
        cfg = self.config_
        fixes = 0
        while True:
            committed = self.state_.committed
            g = f_t.contract(committed)
            found = None
            if cfg.variant == "generic":
                report = find_violated(g, self.lp_.x, cfg.eps, delta, self.rng_)
                if report is not None:
                    found = (None, report)
            else:
                gains = g.values_of([1 << v for v in range(self.n_)])
                for v in range(self.n_):
                    if gains[v] <= 0:
                        continue
                    report = find_violated(g.anchor(v), self.lp_.x, cfg.eps, delta, self.rng_)
                    if report is not None:
                        found = (v, report)
                        break
            if found is None:
                return fixes
            anchor, report = found
            row = row_from_violation(f_t, committed | report.subset, anchor=anchor, t=t)
            if self._submit(row, rows) <= 0:
                raise RuntimeError("separation returned a row the LP already satisfies")
            fixes += 1
            self.n_violations_ += 1
            self.state_.violations += 1

    def _submit_explicit(self, f_t: SetFunction, t: int) -> list[dict]:
        rows: list[dict] = []
        for v, subsets, coefs, rhs in explicit_rows(f_t, anchored=self.config_.explicit_anchored):
            # one forward pass suffices: x only grows, so fixed rows stay fixed
            pos = 0
            while pos < rhs.size:
                short = coefs[pos:] @ self.lp_.x < rhs[pos:] * (1 - SATISFACTION_RTOL)
                hit = np.flatnonzero(short)
                if not hit.size:
                    break
                i = pos + int(hit[0])
                pos = i + 1
                row = CoveringRow(
                    {j: float(a) for j, a in enumerate(coefs[i]) if a > 0},
                    float(rhs[i]),
                    t=t,
                    subset=int(subsets[i]),
                    anchor=v,
                )
                self._submit(row, rows)
        return rows
