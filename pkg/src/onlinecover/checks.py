"""Exhaustive structure checkers for small ground sets.

Costs at ``n = 14`` (the cap): monotone and submodular checks touch
``n * 2**n`` and ``n**2 * 2**n / 2`` table entries; the ``m``-increasing check
touches ``C(n, m) * 2**m * 2**n``. All of them run off one ``2**n`` table.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._validation import mask_to_set
from .functions import MAX_TABLE_N, SetFunction

__all__ = ["CheckResult", "check_structure", "check_time_monotone", "MAX_CHECK_N"]

MAX_CHECK_N = 14


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    prop: str
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.passed


def _default_tol(functions: Sequence[SetFunction], tables: Sequence[np.ndarray]) -> float:
    if all(f.is_integer for f in functions):
        return 0.0
    scale = max((float(np.abs(t).max()) for t in tables if t.size), default=1.0)
    return 1e-9 * max(scale, 1.0)


def check_structure(f: SetFunction, prop: str, m: int | None = None, tol: float | None = None) -> CheckResult:
    """Exhaustively test ``prop`` on ``f``.

    ``prop`` is ``"monotone"``, ``"submodular"`` or ``"m-increasing"`` (with ``m``
    given, or spelled ``"3-increasing"``). On failure the witness is
    ``(S, j)`` for monotonicity, ``(S, i, j)`` for submodularity and ``(A, S)``
    for ``m``-increasing, all sets as frozensets.
    """
    if f.n > MAX_CHECK_N:
        raise ValueError(f"exhaustive checks are capped at n={MAX_CHECK_N}, got n={f.n}")
    prop_l = prop.lower()
    if prop_l.endswith("-increasing") and prop_l != "m-increasing":
        m = int(prop_l.split("-")[0])
        prop_l = "m-increasing"
    table = f.table()
    if tol is None:
        tol = _default_tol([f], [table])
    n = f.n
    idx = np.arange(1 << n, dtype=np.int64)

    if prop_l == "monotone":
        for j in range(n):
            bit = 1 << j
            free = idx[(idx & bit) == 0]
            bad = np.flatnonzero(table[free | bit] < table[free] - tol)
            if bad.size:
                s = int(free[bad[0]])
                return CheckResult(False, prop, (mask_to_set(s), j), f"f(S+{j}) < f(S)")
        return CheckResult(True, prop)

    if prop_l == "submodular":
        for i, j in combinations(range(n), 2):
            bi, bj = 1 << i, 1 << j
            free = idx[(idx & (bi | bj)) == 0]
            lhs = table[free | bi] + table[free | bj]
            rhs = table[free | bi | bj] + table[free]
            bad = np.flatnonzero(lhs < rhs - tol)
            if bad.size:
                s = int(free[bad[0]])
                return CheckResult(False, prop, (mask_to_set(s), i, j), "diminishing returns violated")
        return CheckResult(True, prop)

    if prop_l == "m-increasing":
        if m is None or m < 1:
            raise ValueError("m-increasing check needs m >= 1")
        if m > n:
            return CheckResult(True, f"{m}-increasing", detail="vacuous: m > n")
        for a in combinations(range(n), m):
            amask = sum(1 << j for j in a)
            free = idx[(idx & amask) == 0]
            total = np.zeros(free.size)
            for r in range(m + 1):
                for drop in combinations(a, r):
                    keep = amask & ~sum(1 << j for j in drop)
                    total += (-1) ** r * table[free | keep]
            bad = np.flatnonzero(total < -tol)
            if bad.size:
                s = int(free[bad[0]])
                return CheckResult(
                    False, f"{m}-increasing", (frozenset(a), mask_to_set(s)), f"derivative {total[bad[0]]:g} < 0"
                )
        return CheckResult(True, f"{m}-increasing")

    raise ValueError(f"unknown property {prop!r}")


def check_time_monotone(stream: Sequence[SetFunction], tol: float | None = None) -> CheckResult:
    """Check that every full cover of ``f^(t)`` is a full cover of ``f^(t-1)``.

    ``t`` indexes positions in ``stream`` starting at 0, so the witness
    ``(t, S)`` names the later function of the offending pair.
    """
    stream = list(stream)
    if not stream:
        return CheckResult(True, "time-monotone")
    n = stream[0].n
    if n > MAX_TABLE_N:
        raise ValueError(f"time-monotonicity check needs n <= {MAX_TABLE_N}, got n={n}")
    tables = [f.table() for f in stream]
    if tol is None:
        tol = _default_tol(stream, tables)
    for t in range(1, len(stream)):
        now, before = tables[t], tables[t - 1]
        covers_now = now >= now[-1] - tol
        covers_before = before >= before[-1] - tol
        bad = np.flatnonzero(covers_now & ~covers_before)
        if bad.size:
            s = int(bad[0])
            return CheckResult(False, "time-monotone", (t, mask_to_set(s)), f"cover of f^({t}) misses f^({t - 1})")
    return CheckResult(True, "time-monotone")
