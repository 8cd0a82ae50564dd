"""Input validation helpers shared by the public API.

Subsets are represented internally as Python ``int`` bitmasks (bit ``j`` set
means element ``j`` is present). Public functions accept either a bitmask or
any iterable of element ids.
"""
from __future__ import annotations

from collections.abc import Iterable
from numbers import Integral

import numpy as np

__all__ = [
    "check_random_state",
    "to_mask",
    "mask_to_set",
    "full_mask",
    "check_element",
    "check_point",
    "check_costs",
    "members_matrix",
    "all_members",
]


def full_mask(n: int) -> int:
    return (1 << n) - 1


def to_mask(subset, n: int) -> int:
    """Convert ``subset`` (bitmask or iterable of ids) into a bitmask over ``n`` elements."""
    if isinstance(subset, (Integral, np.integer)) and not isinstance(subset, bool):
        mask = int(subset)
        if mask < 0 or mask >> n:
            raise ValueError(f"bitmask {mask:#x} does not fit a ground set of size {n}")
        return mask
    if not isinstance(subset, Iterable):
        raise TypeError(f"expected a bitmask or an iterable of element ids, got {type(subset).__name__}")
    mask = 0
    for j in subset:
        mask |= 1 << check_element(j, n)
    return mask


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return frozenset(out)


def check_element(j, n: int) -> int:
    if not isinstance(j, (Integral, np.integer)) or isinstance(j, bool):
        raise TypeError(f"element id must be an integer, got {j!r}")
    j = int(j)
    if not 0 <= j < n:
        raise IndexError(f"element id {j} out of range for ground set of size {n}")
    return j


def check_point(x, n: int) -> np.ndarray:
    """Validate a fractional point in ``[0, 1]^n`` and return it as a float array."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"point must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("point coordinates must lie in [0, 1]")
    return arr


def check_costs(costs, n: int) -> np.ndarray:
    arr = np.asarray(costs, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"costs must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("costs must be finite and nonnegative")
    return arr


def members_matrix(masks, n: int) -> np.ndarray:
    """Boolean membership matrix of shape ``(len(masks), n)``."""
    masks = np.asarray(masks, dtype=np.int64).reshape(-1, 1)
    return (masks >> np.arange(n, dtype=np.int64)) & 1 == 1


def all_members(n: int) -> np.ndarray:
    """Membership matrix of all ``2**n`` subsets, row index equal to the bitmask."""
    return members_matrix(np.arange(1 << n, dtype=np.int64), n)


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int, a ``SeedSequence`` or a ``Generator`` into a ``Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.RandomState):
        raise TypeError("legacy RandomState is not supported; pass an int or a numpy Generator")
    return np.random.default_rng(seed)
