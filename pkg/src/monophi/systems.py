"""Dynamical systems over a space: conditioning, subsystems and cuts."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import (CLASSICAL, Process, Space, State, compose, discard, identity,
                   is_causal, mass, mixed_process, restrict_state, state_as_process,
                   subspace, tensor)
from .decompositions import DecompositionSet, element_decompositions, split
from .errors import UnsupportedOperationError, ValidationError
from .indexing import complement as complement_of

TOL_CI = 1e-9


@dataclass(frozen=True, eq=False)
class System:
    """A space together with a causal one-step evolution.

    ``reverse`` optionally fixes an explicit reversed evolution; when absent
    the adjoint of ``evolution`` plays that role in cause computations.
    """

    space: Space
    evolution: Process
    reverse: Process | None = None
    tol_causal: float = 1e-9

    def __post_init__(self):
        if self.evolution.dom != self.space or self.evolution.cod != self.space:
            raise ValidationError("evolution must act on the system space")
        if not is_causal(self.evolution, self.tol_causal):
            raise ValidationError("evolution is not causal")
        if self.reverse is not None:
            if self.reverse.dom != self.space or self.reverse.cod != self.space:
                raise ValidationError("reverse evolution must act on the system space")
            if self.backend == CLASSICAL and self.reverse.payload.sum() <= 0:
                raise ValidationError("reverse evolution carries no mass")

    @property
    def backend(self) -> str:
        return self.space.backend

    @property
    def n_elements(self) -> int:
        return self.space.n_elements

    @cached_property
    def decompositions(self) -> DecompositionSet:
        return element_decompositions(self.space)

    def validate_state(self, s: State, tol: float | None = None) -> None:
        tol = self.tol_causal if tol is None else tol
        if s.space != self.space:
            raise ValidationError("state lives on a different space")
        if abs(mass(s) - 1.0) > tol:
            raise ValidationError("state is not normalised")

    def __repr__(self):
        return f"System({self.space})"


def conditioned_process(process: Process, system_space: Space, s: State,
                        keep: tuple[int, ...]) -> Process:
    """Restrict a space endomorphism to ``keep``, freezing the complement.

    The complement inputs are clamped to the restriction of ``s`` and the
    complement outputs are discarded.
    """
    keep = tuple(sorted(keep))
    d = split(system_space, keep)
    frozen = restrict_state(s, d.right)
    pad = tensor(identity(d.left_space), state_as_process(frozen))
    inner = compose(compose(compose(pad, d.iso_inv), process), d.iso)
    return compose(inner, tensor(identity(d.left_space), discard(d.right_space)))


def subsystem(system: System, s: State, keep: tuple[int, ...]) -> System:
    """The subsystem on ``keep`` whose evolution is conditioned on ``s``."""
    keep = tuple(sorted(keep))
    evolution = conditioned_process(system.evolution, system.space, s, keep)
    reverse = None
    if system.reverse is not None:
        reverse = conditioned_process(system.reverse, system.space, s, keep)
    return System(subspace(system.space, keep), evolution, reverse, system.tol_causal)


def marginal_channel(process: Process, inputs_from: tuple[int, ...],
                     outputs_to: tuple[int, ...]) -> Process:
    """A space endomorphism seen from ``inputs_from`` to ``outputs_to``.

    Complement inputs are fed the completely mixed state and complement
    outputs are discarded.
    """
    din = split(process.dom, tuple(sorted(inputs_from)))
    dout = split(process.cod, tuple(sorted(outputs_to)))
    pad = tensor(identity(din.left_space), mixed_process(din.right_space))
    head = compose(compose(pad, din.iso_inv), process)
    return compose(compose(head, dout.iso),
                   tensor(identity(dout.left_space), discard(dout.right_space)))


def _cut_process(process: Process, part: tuple[int, ...], other: tuple[int, ...]) -> Process:
    d = split(process.dom, part)
    left = marginal_channel(process, part, part)
    right = marginal_channel(process, other, other)
    return compose(compose(d.iso, tensor(left, right)), d.iso_inv)


def symmetric_cut(system: System, part: tuple[int, ...]) -> System:
    """Sever all influence between ``part`` and its complement.

    The cut evolution is the side-by-side composite of the two noised
    marginal channels, reassembled in element order; an explicit reverse
    evolution undergoes the same surgery.  The bipartition is unordered:
    cutting at the complement yields the identical system.
    """
    part = tuple(sorted(part))
    n = system.n_elements
    if not part or len(part) == n:
        raise ValidationError("cut needs a nontrivial bipartition")
    other = complement_of(part, n)
    if other[0] < part[0]:
        part, other = other, part  # canonical side, so cut(J) == cut(J')
    evolution = _cut_process(system.evolution, part, other)
    reverse = None
    if system.reverse is not None:
        reverse = _cut_process(system.reverse, part, other)
    return System(system.space, evolution, reverse, system.tol_causal)


def element_channel(system: System, i: int) -> Process:
    """The per-element channel: full input, output marginalised to element ``i``."""
    dout = split(system.space, (i,))
    return compose(compose(system.evolution, dout.iso),
                   tensor(identity(dout.left_space), discard(dout.right_space)))


def directional_requires_no_reverse(system: System) -> None:
    if system.reverse is not None:
        raise UnsupportedOperationError(
            "directional cuts are undefined for systems with an explicit reverse evolution")


def is_conditionally_independent(system: System, tol: float = TOL_CI) -> bool:
    """Whether the joint table factors into its per-element channels."""
    if system.backend != CLASSICAL:
        raise UnsupportedOperationError("conditional independence is a classical notion")
    return bool(np.max(np.abs(_recombined_table(system) - system.evolution.payload)) <= tol)


def _recombined_table(system: System) -> np.ndarray:
    dim = system.space.dim
    table = np.ones((dim, 1))
    for i in range(system.n_elements):
        ti = element_channel(system, i).payload
        table = np.einsum("sx,st->stx", table, ti).reshape(dim, -1)
    return table


def directional_cut(system: System, part: tuple[int, ...], *,
                    validate: bool = True, tol: float = TOL_CI) -> System:
    """Replace every influence from ``part`` onto the rest with noise.

    Requires a conditionally independent classical evolution; influences into
    ``part`` are kept intact.  The result is conditionally independent again.
    """
    if system.backend != CLASSICAL:
        raise UnsupportedOperationError("directional cuts need the classical copy map")
    directional_requires_no_reverse(system)
    part = tuple(sorted(part))
    n = system.n_elements
    if validate and not is_conditionally_independent(system, tol):
        raise ValidationError("evolution is not conditionally independent")
    dims = system.space.factors
    dim = system.space.dim
    noised = {}
    for i in range(n):
        ti = element_channel(system, i).payload
        if i in part:
            noised[i] = ti
        else:
            # average the inputs belonging to ``part``
            axes = ti.reshape(dims + (dims[i],), order="F")
            avg = axes.mean(axis=tuple(part), keepdims=True)
            noised[i] = np.broadcast_to(avg, axes.shape).reshape(dim, dims[i], order="F")
    table = np.ones((dim, 1))
    for i in range(n):
        table = np.einsum("sx,st->stx", table, noised[i]).reshape(dim, -1)
    return System(system.space, Process(system.space, system.space, table),
                  tol_causal=system.tol_causal)
