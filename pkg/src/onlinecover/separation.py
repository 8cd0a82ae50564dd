"""Exponential-clock search for covering constraints violated by a wide margin.

Each element with ``x_i > 0`` gets a clock ``h_i ~ Exp(x_i)``; the candidate
set is the prefix of the clock order with the smallest linearization.
Elements the oracle reports as null (zero marginal everywhere) are left out
of the scan: they never change a prefix's linearization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_point, check_random_state, mask_to_set
from .functions import SetFunction

__all__ = ["ClockDraw", "ViolationReport", "draw_clocks", "clock_prefix_candidate", "find_violated", "n_attempts"]

_BATCH = 16


@dataclass(frozen=True)
class ClockDraw:
    times: np.ndarray
    order: tuple[int, ...]


@dataclass(frozen=True)
class ViolationReport:
    subset: int
    value: float
    threshold: float
    attempts: int

    @property
    def elements(self) -> frozenset[int]:
        return mask_to_set(self.subset)

    def to_dict(self) -> dict:
        return {"C": self.subset, "value": self.value, "threshold": self.threshold, "attempts": self.attempts}


def n_attempts(eps: float, delta: float) -> int:
    return max(1, math.ceil(3.0 / eps * math.log(1.0 / delta)))


def _uniforms(rng: np.random.Generator, shape) -> np.ndarray:
    # strictly inside (0, 1) so -log(u) is finite
    return np.maximum(rng.random(shape), np.finfo(float).tiny)


def _times(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    h = np.full(u.shape, np.inf)
    pos = x > 0
    h[..., pos] = -np.log(u[..., pos]) / x[pos]
    return h


def draw_clocks(x, seed=None) -> ClockDraw:
    x = np.asarray(x, dtype=float)
    rng = check_random_state(seed)
    h = _times(x, _uniforms(rng, x.size))
    finite = np.flatnonzero(np.isfinite(h))
    order = finite[np.argsort(h[finite], kind="stable")]
    return ClockDraw(h, tuple(int(j) for j in order))


def _scan(f: SetFunction, x: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best prefix (bitmask) and its linearization for each row of uniforms ``u``."""
    n = f.n
    null = f.null_mask()
    active = np.array([j for j in range(n) if x[j] > 0 and not null >> j & 1], dtype=np.int64)
    n_att = u.shape[0]
    if active.size == 0:
        base = float(f.values_of([0])[0])
        return np.zeros(n_att, dtype=np.int64), np.full(n_att, base)
    z = active.size
    h = -np.log(u[:, active]) / x[active]
    order = active[np.argsort(h, axis=1, kind="stable")]  # (A, z), ties keep lower index first

    prefix = np.zeros((n_att, z + 1, n), dtype=bool)
    for i in range(1, z + 1):
        prefix[:, i] = prefix[:, i - 1]
        prefix[np.arange(n_att), i, order[:, i - 1]] = True
    rows = np.repeat(prefix[:, :, None, :], z + 1, axis=2)
    rows[:, :, np.arange(1, z + 1), active] = True
    vals = f.evaluate(rows.reshape(-1, n)).reshape(n_att, z + 1, z + 1)
    gains = vals[:, :, 1:] - vals[:, :, :1]
    lin = vals[:, :, 0] + gains @ x[active]
    best = np.argmin(lin, axis=1)
    weights = np.int64(1) << order
    cum = np.concatenate([np.zeros((n_att, 1), dtype=np.int64), np.cumsum(weights, axis=1)], axis=1)
    masks = cum[np.arange(n_att), best]
    return masks, lin[np.arange(n_att), best]


def clock_prefix_candidate(f: SetFunction, x, seed=None) -> tuple[frozenset[int], float]:
    """Draw one clock ordering and return the prefix minimizing the linearization."""
    x = check_point(x, f.n)
    rng = check_random_state(seed)
    masks, values = _scan(f, x, _uniforms(rng, (1, f.n)))
    return mask_to_set(int(masks[0])), float(values[0])


def find_violated(
    f: SetFunction, x, eps: float = 1.0, delta: float = 0.01, seed=None, tol: float = 1e-12
) -> ViolationReport | None:
    """Look for ``C`` with linearization below ``(1 - eps/2) f(N)``.

    Runs up to ``ceil(3/eps * ln(1/delta))`` independent clock draws and returns
    the first success, or ``None``. All draws are taken from the seed up
    front, so the result does not depend on batching.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    x = check_point(x, f.n)
    f_full = float(f.values_of([f.full])[0])
    if f_full <= tol:
        return None
    threshold = (1 - eps / 2) * f_full
    rng = check_random_state(seed)
    total = n_attempts(eps, delta)
    u = _uniforms(rng, (total, f.n))
    for start in range(0, total, _BATCH):
        masks, values = _scan(f, x, u[start : start + _BATCH])
        hit = np.flatnonzero(values < threshold)
        if hit.size:
            k = int(hit[0])
            return ViolationReport(int(masks[k]), float(values[k]), threshold, start + k + 1)
    return None
