"""Cause and effect repertoires.

A repertoire describes how the current state of a mechanism subset constrains
the next (effect) or previous (cause) state of a purview subset.  Two recipes
are implemented:

* ``generic`` - push the mechanism state, padded with noise, through the
  evolution (effect) or through the reversed evolution (cause), then
  marginalise onto the purview.  Cause values are normalised and become the
  zero state when no mass survives.
* ``iit3`` - classical-only factorised recipe: effects multiply out over
  purview elements, causes multiply pointwise over mechanism elements with a
  single global normalisation.

Repertoires are state transformers rather than stored processes: the cause
normalisation is state dependent, so no single linear map represents it.
Classical evaluation runs on raw vectors with cached index permutations; the
equivalent composite of explicit pad/evolve/marginalise processes is kept as
the reference semantics and cross-checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import classical as cl
from .core import (CLASSICAL, Scalar, State, apply, dagger, mass, mixed,
                   restrict_state, subspace, tensor_states, unit_space, zero_state)
from .decompositions import split
from .errors import CompositionError, UnsupportedOperationError, ValidationError
from .indexing import complement as complement_of
from .indexing import front_permutation, product_dim
from .systems import System

TOL_ZERO = 1e-12

CAUSE = "cause"
EFFECT = "effect"
GENERIC = "generic"
IIT3 = "iit3"


@dataclass(frozen=True)
class RepertoireValue:
    """A repertoire output: a causal state or the zero state.

    ``lam`` is the normalisation scalar applied on the cause side (zero when
    the raw value vanished); effect values carry no normalisation.
    """

    state: State
    lam: Scalar | None = None

    @property
    def is_zero(self) -> bool:
        return self.state.zero


def _check_subsets(system: System, *subsets):
    n = system.n_elements
    for sub in subsets:
        if any(i < 0 or i >= n for i in sub) or len(set(sub)) != len(sub):
            raise ValidationError(f"invalid element subset {sub}")


# ---------------------------------------------------------------------------
# raw classical pipeline
# ---------------------------------------------------------------------------

def _pad_vector(m_vec: np.ndarray, factors: tuple[int, ...],
                mechanism: tuple[int, ...]) -> np.ndarray:
    """Distribution over the full space: mechanism state times uniform noise."""
    n = len(factors)
    rest_dim = product_dim(factors) // max(product_dim(tuple(factors[i] for i in mechanism)), 1)
    fill = np.full(factors[::-1], 1.0 / rest_dim)
    if mechanism:
        m_axes = m_vec.reshape(tuple(factors[i] for i in mechanism), order="F")
        m_rev = m_axes.transpose(tuple(reversed(range(len(mechanism)))))
        shape = [1] * n
        for i in mechanism:
            shape[n - 1 - i] = factors[i]
        fill = fill * m_rev.reshape(shape)
    else:
        fill = fill * float(m_vec.reshape(()) if m_vec.size == 1 else m_vec.sum())
    return fill.reshape(-1)


def _classical_push(table: np.ndarray, m_vec: np.ndarray, factors: tuple[int, ...],
                    mechanism: tuple[int, ...], purview: tuple[int, ...]) -> np.ndarray:
    padded = _pad_vector(m_vec, factors, mechanism)
    return cl.marginalize(padded @ table, factors, purview)


# ---------------------------------------------------------------------------
# single-value entry points
# ---------------------------------------------------------------------------

def _reversed_evolution(system: System):
    return system.reverse if system.reverse is not None else dagger(system.evolution)


def _push(system: System, m: State, mechanism: tuple[int, ...],
          purview: tuple[int, ...], process) -> State:
    """Pad the mechanism state with noise, evolve, marginalise onto the purview."""
    if m.space != subspace(system.space, mechanism):
        raise CompositionError("mechanism state lives on the wrong space")
    if system.backend == CLASSICAL:
        vec = _classical_push(process.payload, m.payload, system.space.factors,
                              mechanism, purview)
        return State(subspace(system.space, purview), vec)
    d = split(system.space, mechanism)
    padded = apply(d.iso_inv, tensor_states(m, mixed(d.right_space)))
    return restrict_state(apply(process, padded), purview)


def effect_repertoire(system: System, m: State, mechanism, purview,
                      variant: str = GENERIC) -> RepertoireValue:
    """Distribution over the purview's next state given the mechanism state."""
    mechanism, purview = tuple(sorted(mechanism)), tuple(sorted(purview))
    _check_subsets(system, mechanism, purview)
    if variant == GENERIC:
        return RepertoireValue(_push(system, m, mechanism, purview, system.evolution))
    if variant != IIT3:
        raise ValidationError(f"unknown repertoire variant {variant!r}")
    if system.backend != CLASSICAL:
        raise UnsupportedOperationError("iit3 repertoires need the classical backend")
    if len(purview) <= 1:
        return RepertoireValue(_push(system, m, mechanism, purview, system.evolution))
    combined = np.ones(1)
    for j in purview:
        factor = _classical_push(system.evolution.payload, m.payload,
                                 system.space.factors, mechanism, (j,))
        combined = cl.kron_vec(factor, combined)
    return RepertoireValue(State(subspace(system.space, purview), combined))


def cause_repertoire(system: System, m: State, mechanism, purview,
                     variant: str = GENERIC, *, normalized: bool = True,
                     tol_zero: float = TOL_ZERO) -> RepertoireValue:
    """Distribution over the purview's previous state given the mechanism state.

    With ``normalized=False`` the raw reversed-evolution value is returned
    (only the generic recipe supports this).
    """
    mechanism, purview = tuple(sorted(mechanism)), tuple(sorted(purview))
    _check_subsets(system, mechanism, purview)
    if variant == GENERIC:
        raw = _push(system, m, mechanism, purview, _reversed_evolution(system))
        if not normalized:
            return RepertoireValue(raw)
        return _normalize(raw, tol_zero)
    if variant != IIT3:
        raise ValidationError(f"unknown repertoire variant {variant!r}")
    if system.backend != CLASSICAL:
        raise UnsupportedOperationError("iit3 repertoires need the classical backend")
    if not normalized:
        raise UnsupportedOperationError("the iit3 cause recipe is inherently normalised")
    if len(mechanism) == 1:
        raw = _push(system, m, mechanism, purview, _reversed_evolution(system))
        return _normalize(raw, tol_zero)
    target = subspace(system.space, purview)
    if len(mechanism) == 0:
        # empty pointwise product: the uniform distribution over the purview
        return RepertoireValue(State(target, np.full(target.dim, 1.0 / target.dim)),
                               Scalar(1.0 / target.dim))
    reverse = _reversed_evolution(system)
    product = np.ones(target.dim)
    for pos, element in enumerate(mechanism):
        m_i = restrict_state(m, (pos,))
        raw = _push(system, m_i, (element,), purview, reverse)
        factor = _normalize(raw, tol_zero)
        if factor.is_zero:
            return RepertoireValue(zero_state(target), Scalar(0.0))
        product = product * factor.state.payload
    total = float(product.sum())
    if total <= tol_zero:
        return RepertoireValue(zero_state(target), Scalar(0.0))
    return RepertoireValue(State(target, product / total), Scalar(1.0 / total))


def _normalize(raw: State, tol_zero: float) -> RepertoireValue:
    total = mass(raw)
    if total <= tol_zero:
        return RepertoireValue(zero_state(raw.space), Scalar(0.0))
    return RepertoireValue(State(raw.space, raw.payload / total), Scalar(1.0 / total))


def repertoire(system: System, direction: str, m: State, mechanism, purview,
               variant: str = GENERIC, *, tol_zero: float = TOL_ZERO) -> RepertoireValue:
    if direction == EFFECT:
        return effect_repertoire(system, m, mechanism, purview, variant)
    if direction == CAUSE:
        return cause_repertoire(system, m, mechanism, purview, variant, tol_zero=tol_zero)
    raise ValidationError(f"unknown direction {direction!r}")


def unit_state(system: System) -> State:
    space = unit_space(system.backend)
    if system.backend == CLASSICAL:
        return State(space, np.ones(1))
    return State(space, np.ones((1, 1), dtype=complex))


# ---------------------------------------------------------------------------
# memoised evaluation at a fixed global state
# ---------------------------------------------------------------------------

class RepertoireEvaluator:
    """Memoised repertoire values of one system at one global state.

    Values are cached per (direction, mechanism, purview) with the mechanism
    state fixed to the restriction of the global state; safe to share because
    every computation is pure.
    """

    def __init__(self, system: System, state: State, variant: str = GENERIC,
                 tol_zero: float = TOL_ZERO):
        system.validate_state(state)
        if variant == IIT3 and system.backend != CLASSICAL:
            raise UnsupportedOperationError("iit3 repertoires need the classical backend")
        self.system = system
        self.state = state
        self.variant = variant
        self.tol_zero = tol_zero
        self._values: dict = {}
        self._mstates: dict = {}
        self._spaces: dict = {}

    def _subspace(self, subset: tuple[int, ...]):
        out = self._spaces.get(subset)
        if out is None:
            out = subspace(self.system.space, subset)
            self._spaces[subset] = out
        return out

    def _mstate(self, mechanism: tuple[int, ...]) -> State:
        out = self._mstates.get(mechanism)
        if out is None:
            if self.system.backend == CLASSICAL:
                vec = cl.marginalize(self.state.payload, self.system.space.factors, mechanism)
                out = State(self._subspace(mechanism), vec)
            else:
                out = restrict_state(self.state, mechanism)
            self._mstates[mechanism] = out
        return out

    def value(self, direction: str, mechanism: tuple[int, ...],
              purview: tuple[int, ...]) -> RepertoireValue:
        key = (direction, mechanism, purview)
        out = self._values.get(key)
        if out is None:
            out = repertoire(self.system, direction, self._mstate(mechanism),
                             mechanism, purview, self.variant, tol_zero=self.tol_zero)
            self._values[key] = out
        return out

    def extended(self, direction: str, mechanism: tuple[int, ...],
                 purview: tuple[int, ...]) -> RepertoireValue:
        """The purview value padded with the unconstrained value, over the full space."""
        key = (direction, mechanism, purview, "ext")
        out = self._values.get(key)
        if out is None:
            out = self._extend(direction, self.value(direction, mechanism, purview), purview)
            self._values[key] = out
        return out

    def decomposed(self, direction: str, m_part: tuple[int, ...], p_part: tuple[int, ...],
                   mechanism: tuple[int, ...], purview: tuple[int, ...]) -> RepertoireValue:
        """The split-apart value for one pair of mechanism/purview decompositions."""
        if not set(m_part) <= set(mechanism) or not set(p_part) <= set(purview):
            raise CompositionError("split parts must come from the restricted decompositions")
        m_rest = tuple(i for i in mechanism if i not in set(m_part))
        p_rest = tuple(i for i in purview if i not in set(p_part))
        v1 = self.value(direction, m_part, p_part)
        v2 = self.value(direction, m_rest, p_rest)
        if v1.is_zero or v2.is_zero:
            return RepertoireValue(zero_state(self.system.space),
                                   Scalar(0.0) if direction == CAUSE else None)
        if not purview:
            return self._extend(direction, RepertoireValue(v1.state), purview)
        factors_p = tuple(self.system.space.factors[i] for i in purview)
        rel = tuple(purview.index(j) for j in p_part)
        if self.system.backend == CLASSICAL:
            combined = cl.kron_vec(v2.state.payload, v1.state.payload)
            over_p = State(self._subspace(purview),
                           combined[front_permutation(factors_p, rel)])
        else:
            d = split(self._subspace(purview), rel)
            over_p = apply(d.iso_inv, tensor_states(v1.state, v2.state))
        return self._extend(direction, RepertoireValue(over_p), purview)

    def _extend(self, direction: str, value: RepertoireValue,
                purview: tuple[int, ...]) -> RepertoireValue:
        if value.is_zero:
            return RepertoireValue(zero_state(self.system.space), value.lam)
        rest = complement_of(purview, self.system.n_elements)
        unconstrained = self.value(direction, (), rest)
        if unconstrained.is_zero:
            return RepertoireValue(zero_state(self.system.space), value.lam)
        if self.system.backend == CLASSICAL:
            combined = cl.kron_vec(unconstrained.state.payload, value.state.payload)
            full = State(self.system.space,
                         combined[front_permutation(self.system.space.factors, purview)])
        else:
            d = split(self.system.space, purview)
            full = apply(d.iso_inv, tensor_states(value.state, unconstrained.state))
        return RepertoireValue(full, value.lam)


def extended_repertoire(system: System, state: State, direction: str, mechanism, purview,
                        variant: str = GENERIC, *, tol_zero: float = TOL_ZERO) -> RepertoireValue:
    ev = RepertoireEvaluator(system, state, variant, tol_zero)
    return ev.extended(direction, tuple(sorted(mechanism)), tuple(sorted(purview)))


def decomposed_repertoire(system: System, state: State, direction: str,
                          mechanism_part, purview_part, mechanism, purview,
                          variant: str = GENERIC, *, tol_zero: float = TOL_ZERO) -> RepertoireValue:
    ev = RepertoireEvaluator(system, state, variant, tol_zero)
    return ev.decomposed(direction, tuple(sorted(mechanism_part)), tuple(sorted(purview_part)),
                         tuple(sorted(mechanism)), tuple(sorted(purview)))


def is_weakly_causal(system: System, direction: str, mechanism, purview,
                     variant: str = GENERIC, *, normalized: bool = True,
                     tol: float = 1e-8, samples: int = 6, seed: int = 7) -> bool:
    """Check that causal mechanism states map to causal-or-zero values.

    Classical systems are checked on every basis state of the mechanism;
    quantum systems on basis projectors plus a seeded sample of random
    density matrices.
    """
    mechanism, purview = tuple(sorted(mechanism)), tuple(sorted(purview))
    _check_subsets(system, mechanism, purview)
    m_space = subspace(system.space, mechanism)
    states = []
    if system.backend == CLASSICAL:
        for a in range(m_space.dim):
            payload = np.zeros(m_space.dim)
            payload[a] = 1.0
            states.append(State(m_space, payload))
    else:
        for a in range(m_space.dim):
            payload = np.zeros((m_space.dim, m_space.dim), dtype=complex)
            payload[a, a] = 1.0
            states.append(State(m_space, payload))
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            g = rng.normal(size=(m_space.dim, m_space.dim)) + 1j * rng.normal(size=(m_space.dim, m_space.dim))
            rho = g @ g.conj().T
            states.append(State(m_space, rho / np.trace(rho).real))
    for m in states:
        if direction == EFFECT:
            value = effect_repertoire(system, m, mechanism, purview, variant)
        else:
            value = cause_repertoire(system, m, mechanism, purview, variant,
                                     normalized=normalized)
        total = mass(value.state)
        if not (abs(total - 1.0) <= tol or abs(total) <= tol):
            return False
    return True
