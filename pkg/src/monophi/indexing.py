"""Index bookkeeping for product state spaces.

Product states are flattened little-endian: the first element varies fastest,
so the flat index of a configuration (s_0, ..., s_{n-1}) over element sizes
(d_0, ..., d_n-1) is s_0 + d_0*(s_1 + d_1*(s_2 + ...)).  This convention is
fixed package-wide and matches the documented file format of the CLI.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np


def product_dim(dims: tuple[int, ...]) -> int:
    out = 1
    for d in dims:
        out *= d
    return out


def flatten_index(config: tuple[int, ...], dims: tuple[int, ...]) -> int:
    """Flat little-endian index of a per-element configuration."""
    idx = 0
    for s, d in zip(reversed(config), reversed(dims)):
        idx = idx * d + s
    return idx


def unflatten_index(idx: int, dims: tuple[int, ...]) -> tuple[int, ...]:
    config = []
    for d in dims:
        config.append(idx % d)
        idx //= d
    return tuple(config)


def all_configs(dims: tuple[int, ...]):
    """All configurations in flat-index order."""
    for idx in range(product_dim(dims)):
        yield unflatten_index(idx, dims)


def as_axes(flat: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    """Reshape a flat vector so that axis i indexes element i."""
    return flat.reshape(dims, order="F")


def from_axes(arr: np.ndarray) -> np.ndarray:
    return arr.reshape(-1, order="F")


def reorder_permutation(dims: tuple[int, ...], order: tuple[int, ...]) -> np.ndarray:
    """Flat permutation moving elements into ``order``.

    Returns ``perm`` with ``perm[src] = dst`` where ``dst`` is the flat index
    of the reordered configuration over the permuted element sizes.
    """
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise ValueError(f"not a permutation of {n} elements: {order}")
    src = np.arange(product_dim(dims)).reshape(dims, order="F")
    # dst[t_0..t_{k}] over permuted dims equals src at s_{order[a]} = t_a
    dst = src.transpose(order)
    out = np.empty(product_dim(dims), dtype=np.intp)
    out[dst.reshape(-1, order="F")] = np.arange(product_dim(dims))
    return out


@lru_cache(maxsize=4096)
def front_permutation(dims: tuple[int, ...], subset: tuple[int, ...]) -> np.ndarray:
    """Cached flat permutation moving ``subset`` elements to the front.

    ``perm[src] = dst`` where dst indexes the (subset, complement) ordering.
    """
    order = subset + complement(subset, len(dims))
    perm = reorder_permutation(dims, order)
    perm.flags.writeable = False
    return perm


def subset_masks(n: int):
    """All subsets of range(n) as sorted tuples, in ascending bitmask order."""
    for mask in range(1 << n):
        yield tuple(i for i in range(n) if mask >> i & 1)


def mask_of(subset: tuple[int, ...]) -> int:
    out = 0
    for i in subset:
        out |= 1 << i
    return out


def complement(subset: tuple[int, ...], n: int) -> tuple[int, ...]:
    inside = set(subset)
    return tuple(i for i in range(n) if i not in inside)


def subsets_of(subset: tuple[int, ...]):
    """All sub-subsets, ascending by size then lexicographically."""
    for k in range(len(subset) + 1):
        yield from combinations(subset, k)
