"""Value-oracle set functions.

Every oracle maps a subset of the ground set ``{0, ..., n-1}`` to a
nonnegative number. Evaluation is batched: ``evaluate`` takes a boolean
membership matrix with one row per queried subset, which lets the
separation and checking code query thousands of subsets per numpy call.

Oracles are immutable once built. The only mutable piece is the shared call
counter, which is bookkeeping and never influences a returned value.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ._validation import all_members, check_costs, check_element, full_mask, members_matrix, to_mask

__all__ = [
    "GroundSet",
    "CostVector",
    "SetFunction",
    "ContractedFunction",
    "AnchoredFunction",
    "ExplicitTable",
    "WeightedCoverage",
    "PartitionMatroidRank",
    "ModularFunction",
    "PrefixSum",
    "MAX_TABLE_N",
]

MAX_TABLE_N = 20


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set needs at least one element")
        if self.n > 62:
            raise ValueError("ground sets are limited to 62 elements (int64 bitmasks)")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("need exactly one label per element")

    def label(self, j: int) -> str:
        return self.labels[j] if self.labels else str(j)

    def format(self, mask: int) -> str:
        names = [self.label(j) for j in range(self.n) if mask >> j & 1]
        return "{" + ",".join(names) + "}"


@dataclass(frozen=True)
class CostVector:
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "c", check_costs(self.c, len(np.atleast_1d(self.c))))

    @property
    def cmax(self) -> float:
        return float(self.c.max())

    @property
    def cmin(self) -> float:
        positive = self.c[self.c > 0]
        return float(positive.min()) if positive.size else 0.0

    def total(self, mask: int | None = None) -> float:
        if mask is None:
            return float(self.c.sum())
        return float(sum(self.c[j] for j in range(len(self.c)) if mask >> j & 1))


class _CallCounter:
    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


class SetFunction:
    """Base class for value oracles over ``n`` elements.

    Subclasses implement ``_evaluate(members) -> ndarray``. Derived oracles
    (contractions, anchored functions) share the parent's call counter.
    """

    is_integer: bool = False

    def __init__(self, n: int, counter: _CallCounter | None = None):
        if n < 1 or n > 62:
            raise ValueError(f"ground set size must be in [1, 62], got {n}")
        self.n = int(n)
        self._counter = counter if counter is not None else _CallCounter()

    # -- evaluation -------------------------------------------------------
    def _evaluate(self, members: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, members: np.ndarray) -> np.ndarray:
        """Values on each row of a boolean membership matrix of shape ``(m, n)``."""
        members = np.asarray(members, dtype=bool)
        if members.ndim != 2 or members.shape[1] != self.n:
            raise ValueError(f"membership matrix must have shape (m, {self.n})")
        self._counter.count += members.shape[0]
        return np.asarray(self._evaluate(members), dtype=float)

    def values_of(self, masks: Iterable[int]) -> np.ndarray:
        return self.evaluate(members_matrix(list(masks), self.n))

    def value(self, subset) -> float:
        mask = to_mask(subset, self.n)
        return float(self.evaluate(members_matrix([mask], self.n))[0])

    __call__ = value

    def table(self) -> np.ndarray:
        """All ``2**n`` values, indexed by bitmask."""
        if self.n > MAX_TABLE_N:
            raise ValueError(f"exhaustive table needs n <= {MAX_TABLE_N}, got {self.n}")
        return self.evaluate(all_members(self.n))

    @property
    def oracle_calls(self) -> int:
        return self._counter.count

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def null_mask(self) -> int:
        """Elements whose marginal is zero against every set (as far as the family knows)."""
        return 0

    # -- derived oracles --------------------------------------------------
    def contract(self, subset) -> SetFunction:
        """The contraction ``S -> f(S | T) - f(T)``."""
        mask = to_mask(subset, self.n)
        if mask == 0:
            return self
        return ContractedFunction(self, mask)

    def anchor(self, v: int) -> SetFunction:
        """Mutual coverage with ``{v}`` as a function of its second argument."""
        return AnchoredFunction(self, check_element(v, self.n))


class ContractedFunction(SetFunction):
    def __init__(self, base: SetFunction, mask: int):
        if isinstance(base, ContractedFunction):
            mask |= base.mask
            base = base.base
        super().__init__(base.n, base._counter)
        self.base = base
        self.mask = mask
        self.is_integer = base.is_integer
        self._row = members_matrix([mask], base.n)
        self._offset = float(base._evaluate(self._row)[0])

    def _evaluate(self, members):
        return self.base._evaluate(members | self._row) - self._offset

    def null_mask(self) -> int:
        return self.base.null_mask() | self.mask

    def contract(self, subset) -> SetFunction:
        mask = to_mask(subset, self.n)
        if mask & ~self.mask == 0:
            return self
        return ContractedFunction(self.base, self.mask | mask)

    def __repr__(self):
        return f"ContractedFunction({self.base!r}, mask={self.mask:#x})"


class AnchoredFunction(SetFunction):
    """``B -> f(v) + f(B) - f(B + v)``; monotone, zero on the empty set."""

    def __init__(self, base: SetFunction, v: int):
        super().__init__(base.n, base._counter)
        self.base = base
        self.v = v
        self.is_integer = base.is_integer
        self._vrow = np.zeros((1, base.n), dtype=bool)
        self._vrow[0, v] = True
        self._fv = float(base._evaluate(self._vrow)[0])

    def _evaluate(self, members):
        return self._fv + self.base._evaluate(members) - self.base._evaluate(members | self._vrow)

    def null_mask(self) -> int:
        return self.base.null_mask()

    def __repr__(self):
        return f"AnchoredFunction({self.base!r}, v={self.v})"


def _as_weights(weights, size: int) -> tuple[np.ndarray, bool]:
    w = np.ones(size) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (size,):
        raise ValueError(f"expected {size} weights, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    integer = bool(np.all(w == np.round(w)) and np.all(np.abs(w) < 2**52))
    return (w.astype(np.int64) if integer else w), integer


class ExplicitTable(SetFunction):
    """All ``2**n`` values listed by bitmask (``n <= 20``)."""

    def __init__(self, values: Sequence[float], n: int | None = None, counter=None):
        vals = np.asarray(values, dtype=float)
        if n is None:
            n = int(round(np.log2(max(vals.size, 1))))
        if vals.shape != (1 << n,):
            raise ValueError(f"explicit table for n={n} needs {1 << n} values, got {vals.size}")
        if n > MAX_TABLE_N:
            raise ValueError(f"explicit tables are capped at n={MAX_TABLE_N}")
        if vals[0] != 0:
            raise ValueError("explicit table must have f(empty) = 0")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError("explicit table values must be finite and nonnegative")
        super().__init__(n, counter)
        self.is_integer = bool(np.all(vals == np.round(vals)))
        self.values = vals
        self.values.flags.writeable = False
        self._pow = 1 << np.arange(n, dtype=np.int64)

    def _evaluate(self, members):
        return self.values[members.astype(np.int64) @ self._pow]

    def __repr__(self):
        return f"ExplicitTable(n={self.n})"


class WeightedCoverage(SetFunction):
    """Each element covers a set of weighted items; ``f(S)`` is the weight of the union.

    ``covers`` is either a boolean matrix of shape ``(n, n_items)`` or a sequence
    with one iterable of item ids per element.
    """

    def __init__(self, covers, weights=None, n_items: int | None = None, counter=None):
        items = _as_item_matrix(covers, n_items)
        super().__init__(items.shape[0], counter)
        self.weights, self.is_integer = _as_weights(weights, items.shape[1])
        self.items = items
        self.items.flags.writeable = False
        self._itemsf = items.astype(float)

    @property
    def n_items(self) -> int:
        return self.items.shape[1]

    def _evaluate(self, members):
        if self.n_items == 0:
            return np.zeros(members.shape[0])
        covered = (members.astype(float) @ self._itemsf) > 0
        return covered @ self.weights

    def null_mask(self) -> int:
        live = (self.items & (self.weights > 0)).any(axis=1)
        return sum(1 << j for j in range(self.n) if not live[j])

    def contract(self, subset) -> SetFunction:
        mask = to_mask(subset, self.n)
        if mask == 0:
            return self
        taken = self.items[members_matrix([mask], self.n)[0]].any(axis=0)
        return WeightedCoverage(self.items[:, ~taken], self.weights[~taken], counter=self._counter)

    def anchor(self, v: int) -> SetFunction:
        v = check_element(v, self.n)
        mine = self.items[v]
        return WeightedCoverage(self.items[:, mine], self.weights[mine], counter=self._counter)

    def __repr__(self):
        return f"WeightedCoverage(n={self.n}, n_items={self.n_items})"


def _as_item_matrix(covers, n_items):
    if isinstance(covers, np.ndarray) and covers.ndim == 2:
        return np.asarray(covers, dtype=bool).copy()
    covers = [list(c) for c in covers]
    if n_items is None:
        n_items = 1 + max((i for c in covers for i in c), default=-1)
    items = np.zeros((len(covers), n_items), dtype=bool)
    for j, c in enumerate(covers):
        for i in c:
            if not 0 <= i < n_items:
                raise IndexError(f"item id {i} out of range")
            items[j, i] = True
    return items


class PartitionMatroidRank(SetFunction):
    """``f(S) = sum_p min(capacity_p, |S & part_p|)`` over disjoint parts."""

    is_integer = True

    def __init__(self, n: int, parts: Sequence[Iterable[int]], capacities: Sequence[int], counter=None):
        super().__init__(n, counter)
        parts = [sorted(set(p)) for p in parts]
        if len(parts) != len(capacities):
            raise ValueError("need one capacity per part")
        seen: set[int] = set()
        self._parts = np.zeros((n, len(parts)), dtype=np.int64)
        for k, p in enumerate(parts):
            for j in p:
                check_element(j, n)
                if j in seen:
                    raise ValueError(f"element {j} appears in more than one part")
                seen.add(j)
                self._parts[j, k] = 1
        caps = np.asarray(capacities, dtype=np.int64)
        if np.any(caps < 0):
            raise ValueError("capacities must be nonnegative")
        self.parts = tuple(tuple(p) for p in parts)
        self.capacities = tuple(int(c) for c in caps)
        self._caps = caps

    def _evaluate(self, members):
        counts = members.astype(np.int64) @ self._parts
        return np.minimum(counts, self._caps).sum(axis=1)

    def null_mask(self) -> int:
        live = (self._parts * (self._caps > 0)).any(axis=1)
        return sum(1 << j for j in range(self.n) if not live[j])

    def __repr__(self):
        return f"PartitionMatroidRank(n={self.n}, parts={len(self.parts)})"


class ModularFunction(SetFunction):
    """``f(S) = sum of weights in S``."""

    def __init__(self, weights, counter=None):
        w = np.asarray(weights, dtype=float)
        super().__init__(w.size, counter)
        self.weights, self.is_integer = _as_weights(w, w.size)

    def _evaluate(self, members):
        return members @ self.weights

    def null_mask(self) -> int:
        return sum(1 << j for j in range(self.n) if self.weights[j] == 0)


class PrefixSum(SetFunction):
    """Running sum ``g_1 + ... + g_t`` of arrived functions.

    Coverage summands are merged into one coverage oracle over the disjoint
    union of their items, which evaluates to the same values.
    """

    def __init__(self, components: Sequence[SetFunction], n: int | None = None, counter=None):
        comps = list(components)
        if n is None:
            if not comps:
                raise ValueError("empty sum needs an explicit n")
            n = comps[0].n
        if any(g.n != n for g in comps):
            raise ValueError("all summands must share the ground set")
        super().__init__(n, counter)
        coverage = [g for g in comps if isinstance(g, WeightedCoverage)]
        rest = [g for g in comps if not isinstance(g, WeightedCoverage)]
        if len(coverage) > 1:
            merged = WeightedCoverage(
                np.hstack([g.items for g in coverage]),
                np.concatenate([g.weights.astype(float) for g in coverage]),
                counter=self._counter,
            )
            coverage = [merged]
        self.components = tuple(coverage + rest)
        self.is_integer = all(g.is_integer for g in self.components)

    def _evaluate(self, members):
        out = np.zeros(members.shape[0])
        for g in self.components:
            out = out + g._evaluate(members)
        return out

    def null_mask(self) -> int:
        mask = full_mask(self.n)
        for g in self.components:
            mask &= g.null_mask()
        return mask

    def contract(self, subset) -> SetFunction:
        mask = to_mask(subset, self.n)
        if mask == 0:
            return self
        return PrefixSum([g.contract(mask) for g in self.components], self.n, self._counter)

    def anchor(self, v: int) -> SetFunction:
        return PrefixSum([g.anchor(v) for g in self.components], self.n, self._counter)

    def __repr__(self):
        return f"PrefixSum({list(self.components)!r})"
