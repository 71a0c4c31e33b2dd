"""Element-induced decompositions of a space and their order structure.

A decomposition splits a space into a chosen subset of elements and its
complement via a causal, co-causal permutation isomorphism.  Only
element-induced decompositions are built here; the containment preorder and
equivalence therefore reduce to subset combinatorics on the chosen indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .core import Process, Space, compose, identity, reorder_elements, subspace
from .errors import CompositionError, ValidationError
from .indexing import complement as complement_of
from .indexing import mask_of, subset_masks


@dataclass(frozen=True, eq=False)
class Decomposition:
    """A split of ``parent`` into the ``left`` elements and the rest."""

    parent: Space
    left: tuple[int, ...]
    iso: Process
    iso_inv: Process

    @property
    def right(self) -> tuple[int, ...]:
        return complement_of(self.left, self.parent.n_elements)

    @property
    def left_space(self) -> Space:
        return subspace(self.parent, self.left)

    @property
    def right_space(self) -> Space:
        return subspace(self.parent, self.right)

    @property
    def is_full(self) -> bool:
        """The trivial split keeping everything on the left."""
        return len(self.left) == self.parent.n_elements

    @property
    def is_empty(self) -> bool:
        """The trivial split keeping nothing on the left."""
        return not self.left

    def __repr__(self):
        return f"Decomposition(left={self.left}, of {self.parent})"


def split(space: Space, left) -> Decomposition:
    """The decomposition of ``space`` keeping elements ``left`` first."""
    left = tuple(sorted(left))
    if any(i < 0 or i >= space.n_elements for i in left):
        raise ValidationError(f"element indices out of range: {left}")
    if len(set(left)) != len(left):
        raise ValidationError("duplicate element indices")
    right = complement_of(left, space.n_elements)
    iso = reorder_elements(space, left + right)
    inv_order = [0] * space.n_elements
    for slot, i in enumerate(left + right):
        inv_order[i] = slot
    iso_inv = reorder_elements(iso.cod, tuple(inv_order))
    return Decomposition(space, left, iso, iso_inv)


def complement(d: Decomposition) -> Decomposition:
    return split(d.parent, d.right)


@dataclass(frozen=True, eq=False)
class DecompositionSet:
    """All element-induced decompositions of a space, one per subset."""

    parent: Space

    @cached_property
    def members(self) -> tuple[Decomposition, ...]:
        return tuple(split(self.parent, subset)
                     for subset in subset_masks(self.parent.n_elements))

    def member(self, left) -> Decomposition:
        left = tuple(sorted(left))
        return self.members[mask_of(left)]

    @property
    def full(self) -> Decomposition:
        return self.members[-1]

    @property
    def empty(self) -> Decomposition:
        return self.members[0]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, d):
        return (isinstance(d, Decomposition) and d.parent == self.parent
                and all(i < self.parent.n_elements for i in d.left))


def element_decompositions(space: Space) -> DecompositionSet:
    return DecompositionSet(space)


def restrict(dset: DecompositionSet, d: Decomposition) -> DecompositionSet:
    """Decompositions of the left part that extend to decompositions in ``dset``."""
    if d not in dset:
        raise CompositionError("decomposition does not belong to the set")
    return DecompositionSet(d.left_space)


def precedes(d1: Decomposition, d2: Decomposition) -> bool:
    """Containment preorder: the left part of ``d1`` sits inside that of ``d2``."""
    if d1.parent != d2.parent:
        raise CompositionError("decompositions of different spaces")
    return set(d1.left) <= set(d2.left)


def equivalent(d1: Decomposition, d2: Decomposition) -> bool:
    if d1.parent != d2.parent:
        raise CompositionError("decompositions of different spaces")
    return d1.left == d2.left


def check_isomorphism(d: Decomposition, tol: float = 1e-10) -> bool:
    """Inverse laws for the pair (iso, iso_inv)."""
    import numpy as np

    left = compose(d.iso, d.iso_inv)
    right = compose(d.iso_inv, d.iso)
    return (np.allclose(left.payload, identity(d.parent).payload, atol=tol)
            and np.allclose(right.payload, identity(d.iso.cod).payload, atol=tol))
