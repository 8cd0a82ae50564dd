"""Online fractional covering LP with rows arriving one at a time.

The solution ``x`` only ever grows, so every accepted row stays satisfied.
A violated row (normalized to right-hand side 1) is fixed by one
multiplicative-plus-seed step

    x_j <- min(1, x_j * (1 + theta * a_j / c_j) + theta * a_j / (d * c_j))

over the row's support of size ``d``, with the smallest ``theta`` that makes
the row tight. Each coordinate is linear in ``theta`` until it saturates, so
the row's left-hand side is piecewise linear and ``theta`` is solved for
exactly by walking the saturation breakpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_costs, check_element, to_mask
from .functions import SetFunction

__all__ = [
    "CoveringRow",
    "TrivialRowError",
    "InfeasibleRowError",
    "row_from_violation",
    "OnlineCoveringLP",
    "SATISFACTION_RTOL",
]

SATISFACTION_RTOL = 1e-9


class TrivialRowError(ValueError):
    """The requested row has (near) zero right-hand side: nothing to cover."""


class InfeasibleRowError(ValueError):
    """Even ``x = 1`` on the support cannot satisfy the row."""


@dataclass(frozen=True)
class CoveringRow:
    """``sum_j coefs[j] * x_j >= rhs`` with its generating ``(t, S, anchor)``."""

    coefs: dict[int, float]
    rhs: float
    t: int = 0
    subset: int = 0
    anchor: int | None = None

    def __post_init__(self):
        if not self.rhs > 0:
            raise ValueError("row right-hand side must be positive")
        if any(a < 0 for a in self.coefs.values()):
            raise ValueError("row coefficients must be nonnegative")

    @property
    def key(self) -> tuple:
        return (self.t, self.anchor, self.subset)

    def lhs(self, x: np.ndarray) -> float:
        return float(sum(a * x[j] for j, a in self.coefs.items()))

    def satisfied(self, x: np.ndarray, rtol: float = SATISFACTION_RTOL) -> bool:
        return self.lhs(x) >= self.rhs * (1 - rtol)

    def to_dict(self) -> dict:
        return {"t": self.t, "anchor": self.anchor, "S": self.subset, "b": self.rhs}


def row_from_violation(
    f: SetFunction, subset, anchor: int | None = None, t: int = 0, tol: float = 1e-12
) -> CoveringRow:
    """Covering row ``sum_j g_S(j) x_j >= g_S(N)`` for ``g = f`` or ``g = I_f(anchor; .)``.

    Raises :class:`TrivialRowError` when ``g_S(N) <= tol``.
    """
    mask = to_mask(subset, f.n)
    g = f if anchor is None else f.anchor(check_element(anchor, f.n))
    n = f.n
    masks = [mask] + [mask | 1 << j for j in range(n)] + [f.full]
    vals = g.values_of(masks)
    base, gains, top = vals[0], vals[1:-1] - vals[0], vals[-1] - vals[0]
    if top <= tol:
        raise TrivialRowError("row already satisfied: contracted function has nothing left to cover")
    coefs = {j: float(a) for j, a in enumerate(gains) if a > 0}
    return CoveringRow(coefs, float(top), t=t, subset=mask, anchor=anchor)


@dataclass
class OnlineCoveringLP:
    """Monotone online solver for ``min c.x`` subject to arriving covering rows and ``0 <= x <= 1``."""

    costs: np.ndarray
    x: np.ndarray = field(init=False)
    rows: dict = field(init=False, default_factory=dict)
    mass_history: list = field(init=False, default_factory=list)
    n_updates: int = field(init=False, default=0)

    def __post_init__(self):
        self.costs = check_costs(self.costs, len(np.atleast_1d(self.costs)))
        # free elements are taken outright
        self.x = np.where(self.costs == 0, 1.0, 0.0)

    @property
    def n(self) -> int:
        return self.costs.size

    def fractional_cost(self) -> float:
        return float(self.costs @ self.x)

    def mass(self) -> float:
        return float(self.x.sum())

    def submit(self, row: CoveringRow) -> float:
        """Accept ``row``, raising ``x`` if needed; returns the increase of ``sum_j x_j``."""
        self.rows.setdefault(row.key, row)
        if row.satisfied(self.x):
            return 0.0
        support = np.array(sorted(row.coefs), dtype=np.int64)
        a = np.array([row.coefs[j] for j in support]) / row.rhs
        if a.sum() < 1 - SATISFACTION_RTOL:
            raise InfeasibleRowError(f"row cannot be satisfied: max lhs {a.sum() * row.rhs} < {row.rhs}")
        before = self.x.copy()
        self.x[support] = _tighten(self.x[support], a, self.costs[support])
        if not row.satisfied(self.x):
            # cost ratios beyond float range underflow the step; saturate cheapest-first
            for j in support[np.argsort(self.costs[support], kind="stable")]:
                self.x[j] = 1.0
                if row.satisfied(self.x):
                    break
        if np.any(self.x < before):
            raise AssertionError("online LP update decreased a coordinate")
        delta = float(self.x.sum() - before.sum())
        self.n_updates += 1
        self.mass_history.append(delta)
        return delta

    def is_feasible(self) -> bool:
        return all(r.satisfied(self.x) for r in self.rows.values())


def _tighten(x: np.ndarray, a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Smallest multiplicative-plus-seed step making ``a . x >= 1``."""
    d = a.size
    lhs = float(a @ x)
    if lhs >= 1:
        return x
    slope = np.zeros(d)
    paid = c > 0
    if paid.any():
        # theta is free up to scale; dividing by the cheapest cost keeps slopes <= a(x + 1/d)
        slope[paid] = a[paid] * (x[paid] + 1.0 / d) * (c[paid].min() / c[paid])
    active = (x < 1) & (slope > 0)
    brk = np.full(d, np.inf)
    with np.errstate(over="ignore"):
        brk[active] = (1 - x[active]) / slope[active]
    # an infinite breakpoint means the slope underflowed; the caller's fallback handles it
    active &= np.isfinite(brk)
    order = np.argsort(brk, kind="stable")
    rate = float(a[active] @ slope[active])
    theta_prev, level = 0.0, lhs
    for j in order:
        if not active[j]:
            continue
        reach = level + rate * (brk[j] - theta_prev)
        if reach >= 1:
            break
        level, theta_prev = reach, brk[j]
        rate -= a[j] * slope[j]
    with np.errstate(over="ignore", divide="ignore"):
        theta = theta_prev + (1 - level) / rate if rate > 0 else theta_prev
        step = np.where(active, x + theta * np.where(active, slope, 0.0), x)
    return np.minimum(1.0, np.maximum(step, x))
