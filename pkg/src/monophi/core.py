"""Common process-theory layer shared by the classical and quantum backends.

Spaces, processes and states are immutable values; every operation here is a
pure function that dispatches on the backend tag.  Classical payloads are
real tables/vectors, quantum payloads are Choi matrices/density matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import classical as cl
from . import quantum as qu
from .errors import CompositionError, ValidationError
from .indexing import product_dim, reorder_permutation

CLASSICAL = "classical"
QUANTUM = "quantum"

TOL_CAUSAL = 1e-9
TOL_EXACT = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Space:
    """A system object: a backend tag plus an ordered element factorisation.

    ``factors[i]`` is the size (classical) or Hilbert dimension (quantum) of
    element ``i``; element 0 is the fastest-varying index of the flattened
    product.  Classical spaces carry a ground metric on the flattened set.
    """

    backend: str
    factors: tuple[int, ...]
    metric: np.ndarray | None = None

    def __post_init__(self):
        if self.backend not in (CLASSICAL, QUANTUM):
            raise ValidationError(f"unknown backend {self.backend!r}")
        if any(d < 1 for d in self.factors):
            raise ValidationError("element sizes must be positive")
        object.__setattr__(self, "factors", tuple(int(d) for d in self.factors))
        if self.backend == CLASSICAL:
            metric = self.metric if self.metric is not None else _default_metric(self.factors)
            metric = np.asarray(metric, dtype=float)
            if metric.shape != (self.dim, self.dim):
                raise ValidationError("ground metric has the wrong shape")
            object.__setattr__(self, "metric", _freeze(metric))
        elif self.metric is not None:
            raise ValidationError("quantum spaces do not carry a ground metric")
        # private memo for distances under this space's metric
        object.__setattr__(self, "_distances", {})

    @property
    def dim(self) -> int:
        return product_dim(self.factors)

    @property
    def n_elements(self) -> int:
        return len(self.factors)

    def __eq__(self, other):
        # identity is structural; the metric is carried data (tensoring two
        # subspaces cannot reconstruct a non-sum parent metric, so it stays
        # out of the identity and distance() reads it off its arguments)
        return (isinstance(other, Space)
                and self.backend == other.backend
                and self.factors == other.factors)

    def __hash__(self):
        return hash((self.backend, self.factors))

    def __repr__(self):
        return f"Space({self.backend}, {self.factors})"


def _default_metric(factors: tuple[int, ...]) -> np.ndarray:
    """Per-element point metrics combined by the sum rule (Hamming for bits)."""
    metric = np.zeros((1, 1))
    for d in factors:
        metric = cl.sum_metric(metric, cl.point_metric(d))
    return metric


def unit_space(backend: str) -> Space:
    return Space(backend, ())


def classical_space(factors, metric: np.ndarray | None = None,
                    element_metrics: list[np.ndarray] | None = None) -> Space:
    if element_metrics is not None:
        if metric is not None:
            raise ValidationError("pass either a full metric or per-element tables")
        if len(element_metrics) != len(tuple(factors)):
            raise ValidationError("one metric table per element required")
        metric = np.zeros((1, 1))
        for table in element_metrics:
            cl.check_metric(np.asarray(table, dtype=float))
            metric = cl.sum_metric(metric, np.asarray(table, dtype=float))
    return Space(CLASSICAL, tuple(factors), metric)


def quantum_space(factors) -> Space:
    return Space(QUANTUM, tuple(factors))


def subspace(space: Space, keep: tuple[int, ...]) -> Space:
    """The space of the kept elements (ascending order)."""
    keep = tuple(sorted(keep))
    factors = tuple(space.factors[i] for i in keep)
    if space.backend == CLASSICAL:
        return Space(CLASSICAL, factors, cl.restrict_metric(space.metric, space.factors, keep))
    return Space(QUANTUM, factors)


def tensor_space(a: Space, b: Space) -> Space:
    if a.backend != b.backend:
        raise CompositionError("cannot combine spaces from different backends")
    if a.backend == CLASSICAL:
        return Space(CLASSICAL, a.factors + b.factors, cl.sum_metric(a.metric, b.metric))
    return Space(QUANTUM, a.factors + b.factors)


@dataclass(frozen=True, eq=False)
class Process:
    """A morphism between spaces; payload layout depends on the backend."""

    dom: Space
    cod: Space
    payload: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dom.backend != self.cod.backend:
            raise CompositionError("process endpoints live in different backends")
        if self.backend == CLASSICAL:
            payload = np.asarray(self.payload, dtype=float)
            if payload.shape != (self.dom.dim, self.cod.dim):
                raise ValidationError("classical table shape mismatch")
            if payload.size and payload.min() < -1e-10:
                raise ValidationError("classical table has negative entries")
        else:
            payload = np.asarray(self.payload, dtype=complex)
            d = self.dom.dim * self.cod.dim
            if payload.shape != (d, d):
                raise ValidationError("Choi matrix shape mismatch")
        object.__setattr__(self, "payload", _freeze(payload))

    @property
    def backend(self) -> str:
        return self.dom.backend

    def __repr__(self):
        return f"Process({self.dom} -> {self.cod})"


@dataclass(frozen=True, eq=False)
class State:
    """A state of a space: probability vector or density matrix, or zero."""

    space: Space
    payload: np.ndarray = field(repr=False)
    zero: bool = False

    def __post_init__(self):
        if self.space.backend == CLASSICAL:
            payload = np.asarray(self.payload, dtype=float)
            if payload.shape != (self.space.dim,):
                raise ValidationError("distribution has the wrong length")
            if payload.size and payload.min() < -1e-10:
                raise ValidationError("distribution has negative entries")
        else:
            payload = np.asarray(self.payload, dtype=complex)
            if payload.shape != (self.space.dim, self.space.dim):
                raise ValidationError("density matrix has the wrong shape")
        object.__setattr__(self, "payload", _freeze(payload))

    @property
    def backend(self) -> str:
        return self.space.backend


@dataclass(frozen=True)
class Scalar:
    """A nonnegative number; the scalar fragment of either backend."""

    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValidationError("scalars are nonnegative")

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value * other.value)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def identity(space: Space) -> Process:
    if space.backend == CLASSICAL:
        return Process(space, space, cl.identity_table(space.dim))
    return Process(space, space, qu.identity_choi(space.dim))


def discard(space: Space) -> Process:
    unit = unit_space(space.backend)
    if space.backend == CLASSICAL:
        return Process(space, unit, cl.discard_table(space.dim))
    return Process(space, unit, qu.discard_choi(space.dim))


def mixed(space: Space) -> State:
    if space.backend == CLASSICAL:
        return State(space, cl.mixed_vector(space.dim))
    return State(space, qu.mixed_state(space.dim))


def mixed_process(space: Space) -> Process:
    unit = unit_space(space.backend)
    if space.backend == CLASSICAL:
        return Process(unit, space, cl.mixed_vector(space.dim)[None, :])
    return Process(unit, space, qu.mixed_choi(space.dim))


def zero_process(dom: Space, cod: Space) -> Process:
    if dom.backend == CLASSICAL:
        return Process(dom, cod, np.zeros((dom.dim, cod.dim)))
    d = dom.dim * cod.dim
    return Process(dom, cod, np.zeros((d, d), dtype=complex))


def zero_state(space: Space) -> State:
    if space.backend == CLASSICAL:
        return State(space, np.zeros(space.dim), zero=True)
    return State(space, np.zeros((space.dim, space.dim), dtype=complex), zero=True)


def point_state(space: Space, index: int) -> State:
    if space.backend == CLASSICAL:
        payload = np.zeros(space.dim)
        payload[index] = 1.0
        return State(space, payload)
    payload = np.zeros((space.dim, space.dim), dtype=complex)
    payload[index, index] = 1.0
    return State(space, payload)


def swap(a: Space, b: Space) -> Process:
    """The wire crossing a (x) b -> b (x) a."""
    joint = tensor_space(a, b)
    n_a = a.n_elements
    order = tuple(range(n_a, joint.n_elements)) + tuple(range(n_a))
    return reorder_elements(joint, order)


def reorder_elements(space: Space, order: tuple[int, ...]) -> Process:
    """Permutation process moving element ``order[k]`` to slot ``k``."""
    perm = reorder_permutation(space.factors, order)
    cod_factors = tuple(space.factors[i] for i in order)
    if space.backend == CLASSICAL:
        cod = Space(CLASSICAL, cod_factors, cl.permute_metric(space.metric, perm))
        return Process(space, cod, cl.permutation_table(perm))
    cod = Space(QUANTUM, cod_factors)
    u = np.zeros((space.dim, space.dim), dtype=complex)
    u[perm, np.arange(space.dim)] = 1.0
    return Process(space, cod, qu.unitary_channel(u))


# ---------------------------------------------------------------------------
# the algebra
# ---------------------------------------------------------------------------

def compose(f: Process, g: Process) -> Process:
    """``f`` followed by ``g`` (i.e. the composite g o f)."""
    if f.cod != g.dom:
        raise CompositionError(f"cannot compose: {f.cod} != {g.dom}")
    if f.backend == CLASSICAL:
        return Process(f.dom, g.cod, cl.compose_tables(f.payload, g.payload))
    dims = (f.dom.dim, f.cod.dim, g.cod.dim)
    return Process(f.dom, g.cod, qu.compose_choi(f.payload, g.payload, dims))


def tensor(f: Process, g: Process) -> Process:
    if f.backend != g.backend:
        raise CompositionError("cannot tensor processes from different backends")
    dom = tensor_space(f.dom, g.dom)
    cod = tensor_space(f.cod, g.cod)
    if f.backend == CLASSICAL:
        return Process(dom, cod, cl.tensor_tables(f.payload, g.payload))
    payload = qu.tensor_choi(f.payload, g.payload,
                             (f.dom.dim, f.cod.dim), (g.dom.dim, g.cod.dim))
    return Process(dom, cod, payload)


def tensor_states(a: State, b: State) -> State:
    space = tensor_space(a.space, b.space)
    if a.zero or b.zero:
        return zero_state(space)
    if a.backend == CLASSICAL:
        return State(space, np.kron(b.payload, a.payload))
    return State(space, np.kron(b.payload, a.payload))


def apply(f: Process, s: State) -> State:
    if f.dom != s.space:
        raise CompositionError("state does not live on the process domain")
    if s.zero:
        return zero_state(f.cod)
    if f.backend == CLASSICAL:
        return State(f.cod, cl.apply_table(s.payload, f.payload))
    return State(f.cod, qu.apply_choi(f.payload, s.payload, f.dom.dim, f.cod.dim))


def dagger(f: Process) -> Process:
    if f.backend == CLASSICAL:
        return Process(f.cod, f.dom, cl.dagger_table(f.payload))
    return Process(f.cod, f.dom, qu.dagger_choi(f.payload, f.dom.dim, f.cod.dim))


def state_as_process(s: State) -> Process:
    if s.backend == CLASSICAL:
        return Process(unit_space(CLASSICAL), s.space, s.payload[None, :])
    return Process(unit_space(QUANTUM), s.space, s.payload.reshape(1, s.space.dim, 1, s.space.dim).reshape(s.space.dim, s.space.dim))


def process_as_state(p: Process) -> State:
    if p.dom.dim != 1:
        raise CompositionError("only processes from the trivial space are states")
    if p.backend == CLASSICAL:
        return State(p.cod, p.payload[0])
    return State(p.cod, p.payload.reshape(1, p.cod.dim, 1, p.cod.dim).reshape(p.cod.dim, p.cod.dim))


def scalar_value(p: Process) -> float:
    """The number carried by a process from the trivial space to itself."""
    if p.dom.dim != 1 or p.cod.dim != 1:
        raise CompositionError("not a scalar process")
    return float(np.real(p.payload.reshape(())))


def mass(s: State) -> float:
    """Total probability mass / trace."""
    if s.zero:
        return 0.0
    if s.backend == CLASSICAL:
        return float(s.payload.sum())
    return float(np.real(np.trace(s.payload)))


def is_causal_state(s: State, tol: float = TOL_CAUSAL) -> bool:
    return s.zero or abs(mass(s) - 1.0) <= tol


def is_causal(f: Process, tol: float = TOL_CAUSAL) -> bool:
    """Whether discarding the output equals discarding the input."""
    if f.backend == CLASSICAL:
        return cl.is_row_stochastic(f.payload, tol)
    return qu.is_tp(f.payload, f.dom.dim, f.cod.dim, tol)


def is_cocausal(f: Process, tol: float = TOL_CAUSAL) -> bool:
    """Whether the process preserves the completely mixed state."""
    if f.backend == CLASSICAL:
        return cl.preserves_uniform(f.payload, tol)
    return qu.is_unital_scaled(f.payload, f.dom.dim, f.cod.dim, tol)


def restrict_state(s: State, keep: tuple[int, ...]) -> State:
    """Marginalise / partial-trace onto the kept elements."""
    keep = tuple(sorted(keep))
    target = subspace(s.space, keep)
    if s.zero:
        return zero_state(target)
    if s.backend == CLASSICAL:
        return State(target, cl.marginalize(s.payload, s.space.factors, keep))
    return State(target, qu.partial_trace(s.payload, s.space.factors, keep))


def distance(a: State, b: State) -> float:
    """Backend metric on causal states, extended to the zero state.

    The zero state sits at distance ``mass(other)`` from everything else, so
    comparisons against vanished repertoire values stay well defined.
    """
    if a.space != b.space:
        raise CompositionError("states live on different spaces")
    if a.zero and b.zero:
        return 0.0
    if a.zero:
        return mass(b)
    if b.zero:
        return mass(a)
    if a.backend != CLASSICAL:
        return qu.trace_distance(a.payload, b.payload)
    key = (a.payload.tobytes(), b.payload.tobytes())
    cache = a.space._distances
    out = cache.get(key)
    if out is None:
        out = cl.emd(a.payload, b.payload, a.space.metric)
        cache[key] = out
        cache[(key[1], key[0])] = out
    return out
