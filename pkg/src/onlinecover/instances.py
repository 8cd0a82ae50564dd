"""Instance files, stream semantics and generators.

An instance is JSON of the form::

    {"n": 3, "labels": ["a", "b", "y"], "costs": [1, 1, 1], "fmin": 1, "fmax": 9,
     "stream": [{"kind": "explicit_table", "values": [...]}, ...]}

Event kinds: ``coverage_increment`` (``sets``: one item-id list per element,
``item_weights``), ``explicit_table`` (``values`` by bitmask) and
``partition_matroid`` (``parts``, ``capacities``). Coverage and matroid
events are increments added to the running sum; an explicit table replaces
it. An optional ``"mode": "add" | "set"`` on an event overrides that default.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_random_state
from .baselines import marginal_bounds
from .checks import MAX_CHECK_N, check_structure, check_time_monotone
from .functions import (
    ExplicitTable,
    ModularFunction,
    PartitionMatroidRank,
    PrefixSum,
    SetFunction,
    WeightedCoverage,
)

__all__ = [
    "EVENT_KINDS",
    "GENERATOR_KINDS",
    "InstanceError",
    "Instance",
    "load_instance",
    "save_instance",
    "generate",
    "verify_declared",
    "random_oracle",
    "ORACLE_FAMILIES",
    "appendix_b_function",
]

EVENT_KINDS = ("coverage_increment", "explicit_table", "partition_matroid")
GENERATOR_KINDS = ("set-cover-stream", "prefix-coverage", "partition-matroid", "appendix-b", "appendix-a")
_DEFAULT_MODE = {"coverage_increment": "add", "partition_matroid": "add", "explicit_table": "set"}


class InstanceError(ValueError):
    pass


@dataclass
class Instance:
    n: int
    costs: list[float]
    fmin: float
    fmax: float
    stream: list[dict]
    labels: list[str] | None = None
    kind: str | None = None
    properties: dict[str, bool] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InstanceError("n must be a positive integer")
        if len(self.costs) != self.n or any(not c >= 0 for c in self.costs):
            raise InstanceError(f"costs must be {self.n} nonnegative numbers")
        if self.labels is not None and len(self.labels) != self.n:
            raise InstanceError("labels must name every element")
        if self.stream and not self.fmin > 0:
            raise InstanceError("fmin must be positive")
        if self.fmax < self.fmin:
            raise InstanceError("fmax must be >= fmin")
        for i, ev in enumerate(self.stream):
            self._check_event(i, ev)

    def _check_event(self, i: int, ev: dict):
        kind = ev.get("kind")
        if kind not in EVENT_KINDS:
            raise InstanceError(f"event {i}: unknown kind {kind!r}")
        if ev.get("mode", _DEFAULT_MODE[kind]) not in ("add", "set"):
            raise InstanceError(f"event {i}: mode must be 'add' or 'set'")
        if kind == "coverage_increment":
            if len(ev.get("sets", [])) != self.n:
                raise InstanceError(f"event {i}: need one item list per element")
        elif kind == "explicit_table":
            if len(ev.get("values", [])) != 1 << self.n:
                raise InstanceError(f"event {i}: explicit table needs 2^n values")
        elif len(ev.get("parts", [])) != len(ev.get("capacities", [])):
            raise InstanceError(f"event {i}: need one capacity per part")

    # -- semantics ---------------------------------------------------------
    def event_function(self, ev: dict) -> SetFunction:
        kind = ev["kind"]
        if kind == "coverage_increment":
            sets = ev["sets"]
            n_items = len(ev.get("item_weights", [])) or 1 + max((i for s in sets for i in s), default=-1)
            weights = ev.get("item_weights") or [1] * n_items
            return WeightedCoverage(sets, weights, n_items=n_items)
        if kind == "explicit_table":
            return ExplicitTable(ev["values"], self.n)
        return PartitionMatroidRank(self.n, ev["parts"], ev["capacities"])

    def functions(self) -> list[SetFunction]:
        """The prefix functions ``f^(1), ..., f^(T)``, one per event."""
        out: list[SetFunction] = []
        parts: list[SetFunction] = []
        for ev in self.stream:
            g = self.event_function(ev)
            if ev.get("mode", _DEFAULT_MODE[ev["kind"]]) == "set":
                parts = [g]
            else:
                parts = parts + [g]
            out.append(PrefixSum(parts, self.n))
        return out

    def function_at(self, t: int) -> SetFunction:
        """``f^(t)`` with ``t`` counted from 1; ``t = 0`` is the zero function."""
        if t == 0:
            return ModularFunction(np.zeros(self.n))
        if not 1 <= t <= len(self.stream):
            raise InstanceError(f"time {t} outside 1..{len(self.stream)}")
        return self.functions()[t - 1]

    @property
    def coverage_only(self) -> bool:
        return all(ev["kind"] == "coverage_increment" for ev in self.stream)

    # -- (de)serialization -----------------------------------------------
    def to_dict(self) -> dict:
        d = {"n": self.n}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        d.update(costs=list(self.costs), fmin=self.fmin, fmax=self.fmax)
        if self.kind:
            d["kind"] = self.kind
        if self.properties:
            d["properties"] = dict(self.properties)
        if self.params:
            d["params"] = dict(self.params)
        d["stream"] = self.stream
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Instance:
        try:
            return cls(
                n=int(d["n"]),
                costs=[float(c) for c in d["costs"]],
                fmin=float(d["fmin"]),
                fmax=float(d["fmax"]),
                stream=list(d.get("stream", [])),
                labels=d.get("labels"),
                kind=d.get("kind"),
                properties=dict(d.get("properties", {})),
                params=dict(d.get("params", {})),
            )
        except KeyError as exc:
            raise InstanceError(f"instance is missing field {exc.args[0]!r}") from None


def load_instance(path) -> Instance:
    with open(path) as fh:
        return Instance.from_dict(json.load(fh))


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance.to_dict()) + "\n")


# -- declared properties ----------------------------------------------------
def verify_declared(instance: Instance) -> list[str]:
    """Check every declared property; returns a list of mismatches (empty when all hold).

    Structural properties are checked on the last prefix function,
    time-monotonicity on the whole stream. Skipped when ``n > 14``.
    """
    if instance.n > MAX_CHECK_N or not instance.stream:
        return []
    funcs = instance.functions()
    problems = []
    for prop, expected in instance.properties.items():
        if prop == "time-monotone":
            got = check_time_monotone(funcs).passed
        else:
            got = check_structure(funcs[-1], prop).passed
        if got != expected:
            problems.append(f"{prop}: declared {expected}, found {got}")
    return problems


# -- generators -------------------------------------------------------------
def _costs(rng, n, max_cost):
    if max_cost <= 1:
        return [1.0] * n
    return [float(c) for c in rng.integers(1, max_cost + 1, size=n)]


def _bounds(instance_stream_funcs, n, fallback):
    if n <= MAX_CHECK_N:
        return marginal_bounds(instance_stream_funcs)
    return fallback


def _covering_column(rng, n, density):
    while True:
        col = rng.random(n) < density
        if col.any():
            return col


def generate(
    kind: str,
    n: int = 10,
    T: int = 25,
    density: float = 0.3,
    seed=0,
    max_cost: int | None = None,
    check: bool = True,
) -> Instance:
    """Build an instance of the given kind; deterministic given ``seed``.

    ``max_cost`` defaults to 1 (unit costs) for set-cover streams and 4 for
    the other random kinds. With ``check=True`` the declared properties are
    verified (``n <= 14``) and a mismatch raises :class:`InstanceError`.
    """
    if kind not in GENERATOR_KINDS:
        raise InstanceError(f"unknown generator kind {kind!r}; choose from {GENERATOR_KINDS}")
    if n < 1 or T < 0 or not 0 < density <= 1:
        raise InstanceError("need n >= 1, T >= 0 and density in (0, 1]")
    rng = check_random_state(seed)
    params = {"n": n, "T": T, "density": density, "seed": seed}

    if kind == "appendix-b":
        inst = Instance(
            n=3,
            labels=["a", "b", "y"],
            costs=[1.0, 1.0, 1.0],
            fmin=1.0,
            fmax=9.0,
            stream=[{"kind": "explicit_table", "values": list(APPENDIX_B_VALUES)}],
            kind=kind,
            properties={"monotone": True, "submodular": True, "3-increasing": False},
        )
    elif kind == "appendix-a":
        zeros = [0] * (1 << n)
        indicator = [1 if mask & 1 else 0 for mask in range(1 << n)]
        inst = Instance(
            n=n,
            costs=[1.0] * n,
            fmin=1.0,
            fmax=1.0,
            stream=[
                {"kind": "explicit_table", "values": zeros},
                {"kind": "explicit_table", "values": indicator},
                {"kind": "explicit_table", "values": zeros},
            ],
            kind=kind,
            properties={"time-monotone": False},
            params={"n": n},
        )
    elif kind == "set-cover-stream":
        costs = _costs(rng, n, 1 if max_cost is None else max_cost)
        stream = []
        for _ in range(T):
            col = _covering_column(rng, n, density)
            stream.append({"kind": "coverage_increment", "sets": [[0] if c else [] for c in col], "item_weights": [1]})
        inst = Instance(
            n=n,
            costs=costs,
            fmin=1.0,
            fmax=1.0,
            stream=stream,
            kind=kind,
            properties={"monotone": True, "submodular": True, "3-increasing": True, "time-monotone": True},
            params=params,
        )
    elif kind == "prefix-coverage":
        costs = _costs(rng, n, 4 if max_cost is None else max_cost)
        stream, weights_seen = [], []
        for _ in range(T):
            m = int(rng.integers(1, 4))
            cols = np.stack([_covering_column(rng, n, density) for _ in range(m)], axis=1)
            w = [int(v) for v in rng.integers(1, 4, size=m)]
            weights_seen.extend(w)
            stream.append(
                {
                    "kind": "coverage_increment",
                    "sets": [[i for i in range(m) if cols[j, i]] for j in range(n)],
                    "item_weights": w,
                }
            )
        inst = Instance(n=n, costs=costs, fmin=1.0, fmax=1.0, stream=stream, kind=kind, params=params)
        fallback = (float(min(weights_seen, default=1)), float(sum(weights_seen) or 1))
        inst.fmin, inst.fmax = _bounds(inst.functions(), n, fallback) if T else (1.0, 1.0)
        inst.properties = {"monotone": True, "submodular": True, "3-increasing": True, "time-monotone": True}
    else:  # partition-matroid
        costs = _costs(rng, n, 4 if max_cost is None else max_cost)
        stream = []
        for _ in range(T):
            members = np.flatnonzero(_covering_column(rng, n, density))
            rng.shuffle(members)
            n_parts = int(rng.integers(1, min(2, members.size) + 1))
            parts = [sorted(int(j) for j in p) for p in np.array_split(members, n_parts)]
            caps = [int(rng.integers(1, min(2, len(p)) + 1)) for p in parts]
            stream.append({"kind": "partition_matroid", "parts": parts, "capacities": caps})
        inst = Instance(n=n, costs=costs, fmin=1.0, fmax=1.0, stream=stream, kind=kind, params=params)
        inst.fmin, inst.fmax = _bounds(inst.functions(), n, (1.0, float(T or 1))) if T else (1.0, 1.0)
        inst.properties = {"monotone": True, "submodular": True, "time-monotone": True}

    if check:
        problems = verify_declared(inst)
        if problems:
            raise InstanceError("generated instance fails its declared properties: " + "; ".join(problems))
    return inst


# bitmask order over (a, b, y) = bits (0, 1, 2)
APPENDIX_B_VALUES = (0, 9, 1, 10, 1, 10, 2, 10)


def appendix_b_function() -> ExplicitTable:
    return ExplicitTable(APPENDIX_B_VALUES, 3)


# -- random oracles for property tests -------------------------------------
ORACLE_FAMILIES = ("coverage", "matroid", "facility", "budget", "concave")


def random_oracle(rng, n: int, family: str) -> SetFunction:
    """Random monotone submodular oracle; every family but ``concave`` is integer-valued."""
    rng = check_random_state(rng)
    if family == "coverage":
        m = int(rng.integers(1, 2 * n + 1))
        items = rng.random((n, m)) < rng.uniform(0.15, 0.6)
        return WeightedCoverage(items, rng.integers(1, 5, size=m))
    if family == "matroid":
        perm = rng.permutation(n)
        cuts = np.sort(rng.choice(np.arange(1, n), size=min(n - 1, int(rng.integers(0, 3))), replace=False))
        parts = [list(map(int, p)) for p in np.split(perm, cuts) if len(p)]
        caps = [int(rng.integers(1, len(p) + 1)) for p in parts]
        return PartitionMatroidRank(n, parts, caps)
    masks = np.arange(1 << n)
    members = (masks[:, None] >> np.arange(n)) & 1
    if family == "facility":
        w = rng.integers(0, 6, size=(int(rng.integers(1, 5)), n))
        vals = np.array([int(w[:, m == 1].max(axis=1).sum()) if m.any() else 0 for m in members])
        return ExplicitTable(vals, n)
    if family == "budget":
        w = rng.integers(0, 5, size=n)
        cap = int(rng.integers(1, max(2, int(w.sum())) + 1))
        return ExplicitTable(np.minimum(members @ w, cap), n)
    if family == "concave":
        w = rng.uniform(0, 2, size=n)
        return ExplicitTable(np.sqrt(members @ w), n)
    raise ValueError(f"unknown oracle family {family!r}")
