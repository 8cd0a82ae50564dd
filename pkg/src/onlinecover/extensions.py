"""Marginals, linearizations, extensions and mutual coverage of set functions."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from ._validation import check_element, check_point, check_random_state, mask_to_set, members_matrix, to_mask
from .functions import MAX_TABLE_N, SetFunction

__all__ = [
    "marginal",
    "linearization",
    "linearization_many",
    "covering_extension_exact",
    "multilinear_exact",
    "multilinear_estimate",
    "mutual_coverage",
    "derivative",
    "anchored_function",
]


def marginal(f: SetFunction, j: int, subset=0) -> float:
    """Gain ``f(S + j) - f(S)``."""
    j = check_element(j, f.n)
    mask = to_mask(subset, f.n)
    if mask >> j & 1:
        return 0.0
    lo, hi = f.values_of([mask, mask | 1 << j])
    return float(hi - lo)


def linearization(f: SetFunction, subset, x) -> float:
    """``f(S) + sum_j f_S(j) * x_j``."""
    x = check_point(x, f.n)
    mask = to_mask(subset, f.n)
    return float(linearization_many(f, np.array([mask]), x)[0])


def linearization_many(f: SetFunction, masks: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorized linearization at several anchor sets, skipping zero coordinates of ``x``."""
    masks = np.asarray(masks, dtype=np.int64)
    support = np.flatnonzero(x > 0)
    base = members_matrix(masks, f.n)
    rows = [base]
    for j in support:
        plus = base.copy()
        plus[:, j] = True
        rows.append(plus)
    vals = f.evaluate(np.concatenate(rows)).reshape(len(rows), len(masks))
    gains = vals[1:] - vals[0]
    return vals[0] + x[support] @ gains


def covering_extension_exact(f: SetFunction, x) -> tuple[float, frozenset[int]]:
    """Minimum linearization over all ``2**n`` anchor sets, with a minimizing set.

    Ties go to the smallest bitmask. Cost is ``(n + 1) * 2**n`` table lookups.
    """
    if f.n > MAX_TABLE_N:
        raise ValueError(f"covering extension by enumeration needs n <= {MAX_TABLE_N}, got {f.n}")
    x = check_point(x, f.n)
    table = f.table()
    idx = np.arange(1 << f.n, dtype=np.int64)
    lin = table.copy()
    for j in np.flatnonzero(x > 0):
        lin += (table[idx | (1 << int(j))] - table) * x[j]
    best = int(np.argmin(lin))
    return float(lin[best]), mask_to_set(best)


def _subset_probabilities(x: np.ndarray) -> np.ndarray:
    n = x.size
    probs = np.ones(1)
    for j in range(n):
        probs = np.concatenate([probs * (1 - x[j]), probs * x[j]])
    return probs


def multilinear_exact(f: SetFunction, x):
    """``E[f(R)]`` with each element in ``R`` independently with probability ``x_j``.

    Enumerates all ``2**n`` sets. If ``x`` holds :class:`~fractions.Fraction`
    entries the sum is carried out in exact rational arithmetic.
    """
    if f.n > MAX_TABLE_N:
        raise ValueError(f"exact multilinear extension needs n <= {MAX_TABLE_N}, got {f.n}")
    if any(isinstance(v, Fraction) for v in x):
        xs = [Fraction(v) for v in x]
        if len(xs) != f.n or any(not 0 <= v <= 1 for v in xs):
            raise ValueError("point must have n coordinates in [0, 1]")
        table = f.table()
        total = Fraction(0)
        for mask in range(1 << f.n):
            if table[mask] == 0:
                continue
            p = Fraction(1)
            for j in range(f.n):
                p *= xs[j] if mask >> j & 1 else 1 - xs[j]
            total += p * Fraction(table[mask])
        return total
    x = check_point(x, f.n)
    return float(_subset_probabilities(x) @ f.table())


def multilinear_estimate(f: SetFunction, x, samples: int = 100_000, seed=None) -> tuple[float, float]:
    """Monte-Carlo estimate of the multilinear extension; returns ``(mean, standard error)``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x = check_point(x, f.n)
    rng = check_random_state(seed)
    chunk = 20_000
    vals = []
    remaining = samples
    while remaining:
        m = min(chunk, remaining)
        vals.append(f.evaluate(rng.random((m, f.n)) < x))
        remaining -= m
    v = np.concatenate(vals)
    stderr = float(v.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return float(v.mean()), stderr


def mutual_coverage(f: SetFunction, a, b, c=0) -> float:
    """``f_C(A) + f_C(B) - f_C(A + B)``."""
    a, b, c = (to_mask(s, f.n) for s in (a, b, c))
    fc, fa, fb, fab = f.values_of([c, a | c, b | c, a | b | c])
    return float((fa - fc) + (fb - fc) - (fab - fc))


def derivative(f: SetFunction, a, subset=0) -> float:
    """Discrete derivative ``sum_{B <= A} (-1)^|B| f((S + A) - B)``."""
    a, s = to_mask(a, f.n), to_mask(subset, f.n)
    elems = [j for j in range(f.n) if a >> j & 1]
    if len(elems) > 16:
        raise ValueError("derivative order too large for enumeration")
    top = s | a
    masks, signs = [], []
    for r in range(len(elems) + 1):
        for drop in combinations(elems, r):
            m = top
            for j in drop:
                m &= ~(1 << j)
            masks.append(m)
            signs.append(-1 if r % 2 else 1)
    return float(np.asarray(signs) @ f.values_of(masks))


def anchored_function(f: SetFunction, v: int) -> SetFunction:
    """``B -> I_f({v}; B)``, the mutual coverage with a fixed element."""
    return f.anchor(v)

