"""The integration pipeline: phi, concepts, Q-shapes, complexes.

Every search here is exhaustive and deterministic: subsets are enumerated in
ascending bitmask order, minima keep the first witness, and tie-breaking
among near-equal scores follows fixed rules (documented per function), so
repeated runs and any task-level parallelism give identical results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .core import (State, Process, apply, compose, discard, distance, identity,
                   mixed, mixed_process, restrict_state, tensor, tensor_states)
from .decompositions import Decomposition, DecompositionSet, split
from .errors import ValidationError
from .indexing import mask_of, subset_masks, subsets_of
from .repertoires import CAUSE, EFFECT, GENERIC, IIT3, RepertoireEvaluator, RepertoireValue
from .systems import System, directional_cut, subsystem, symmetric_cut

SYMMETRIC = "symmetric"
DIRECTIONAL = "directional"


@dataclass(frozen=True)
class EngineConfig:
    """Knobs of the pipeline; defaults give the generic recipe."""

    variant: str = GENERIC          # repertoire recipe: generic | iit3
    cut_kind: str = SYMMETRIC       # system cuts: symmetric | directional
    tol_zero: float = 1e-12         # mass below which a raw cause value is zero
    tie_tol: float = 1e-9           # scores closer than this tie-break structurally
    phi_zero_tol: float = 1e-12     # integration below this collapses to exactly 0.0
    threads: int = 1                # worker threads for independent mechanism scans

    def __post_init__(self):
        if self.variant not in (GENERIC, IIT3):
            raise ValidationError(f"unknown variant {self.variant!r}")
        if self.cut_kind not in (SYMMETRIC, DIRECTIONAL):
            raise ValidationError(f"unknown cut kind {self.cut_kind!r}")
        if self.threads < 1:
            raise ValidationError("threads must be positive")


@dataclass(frozen=True)
class PhiResult:
    """Integration of one repertoire value with its minimising split."""

    value: float
    mechanism_part: tuple[int, ...] | None
    purview_part: tuple[int, ...] | None
    zero_repertoire: bool = False


@dataclass(frozen=True)
class CoreRepertoire:
    purview: tuple[int, ...]
    phi: float
    value: RepertoireValue
    mechanism_part: tuple[int, ...] | None
    purview_part: tuple[int, ...] | None


@dataclass(frozen=True)
class Concept:
    """A mechanism's core cause and core effect with their shared intensity."""

    mechanism: tuple[int, ...]
    phi: float
    cause: CoreRepertoire
    effect: CoreRepertoire


@dataclass(frozen=True)
class QShape:
    """Concepts (or None, when phi vanished) per nonempty mechanism subset."""

    elements: tuple[int, ...]
    concepts: dict[tuple[int, ...], Concept | None]

    def present(self):
        return {m: c for m, c in self.concepts.items() if c is not None}


@dataclass(frozen=True)
class Cut:
    kind: str
    part: tuple[int, ...]


@dataclass(frozen=True)
class SystemPhiResult:
    value: float
    cut: Cut | None
    qshape: QShape


@dataclass(frozen=True)
class Experience:
    """The most integrated subsystem with its Q-shape embedded in the host."""

    elements: tuple[int, ...]
    phi: float
    qshape: QShape
    cut: Cut | None
    subsystem_results: dict[tuple[int, ...], "SystemPhiResult"]

    @property
    def subsystem_phis(self) -> dict[tuple[int, ...], float]:
        return {part: r.value for part, r in self.subsystem_results.items()}


def _clamp(value: float, tol: float) -> float:
    return value if value > tol else 0.0


def split_pairs(mechanism: tuple[int, ...], purview: tuple[int, ...]):
    """Admissible split pairs, one representative per unordered pairing.

    The two pairings that reproduce the undecomposed value (everything in the
    first part, or everything in the second) are excluded.
    """
    m_set, p_set = set(mechanism), set(purview)
    for m_part in subsets_of(mechanism):
        for p_part in subsets_of(purview):
            if len(m_part) == len(mechanism) and len(p_part) == len(purview):
                continue
            if not m_part and not p_part:
                continue
            m_rest = tuple(i for i in mechanism if i not in set(m_part))
            p_rest = tuple(i for i in purview if i not in set(p_part))
            key = (mask_of(m_part), mask_of(p_part))
            comp = (mask_of(m_rest), mask_of(p_rest))
            if comp < key:
                continue  # complement pairing already enumerated
            yield m_part, p_part


def repertoire_phi(system: System, state: State, direction: str, mechanism, purview,
                   config: EngineConfig = EngineConfig(), *,
                   evaluator: RepertoireEvaluator | None = None) -> PhiResult:
    """Minimal distance between a repertoire value and its split versions."""
    mechanism, purview = tuple(sorted(mechanism)), tuple(sorted(purview))
    ev = evaluator or RepertoireEvaluator(system, state, config.variant, config.tol_zero)
    ext = ev.extended(direction, mechanism, purview)
    if ext.is_zero:
        return PhiResult(0.0, None, None, zero_repertoire=True)
    best = None
    witness = (None, None)
    for m_part, p_part in split_pairs(mechanism, purview):
        dec = ev.decomposed(direction, m_part, p_part, mechanism, purview)
        d = distance(ext.state, dec.state)
        if best is None or d < best:
            best = d
            witness = (m_part, p_part)
    if best is None:
        return PhiResult(0.0, None, None)
    return PhiResult(_clamp(best, config.phi_zero_tol), witness[0], witness[1])


def _core(ev: RepertoireEvaluator, direction: str, mechanism: tuple[int, ...],
          config: EngineConfig) -> CoreRepertoire:
    """The purview with maximal phi; near-ties prefer fewer, then lower, elements."""
    results = []
    for purview in subset_masks(ev.system.n_elements):
        r = repertoire_phi(ev.system, ev.state, direction, mechanism, purview,
                           config, evaluator=ev)
        results.append((purview, r))
    top = max(r.value for _, r in results)
    candidates = [(p, r) for p, r in results if r.value >= top - config.tie_tol]
    purview, r = min(candidates, key=lambda pr: (len(pr[0]), pr[0]))
    return CoreRepertoire(purview, r.value, ev.extended(direction, mechanism, purview),
                          r.mechanism_part, r.purview_part)


def concept(system: System, state: State, mechanism,
            config: EngineConfig = EngineConfig(), *,
            evaluator: RepertoireEvaluator | None = None) -> Concept | None:
    """The mechanism's concept, or None when its integration vanishes."""
    mechanism = tuple(sorted(mechanism))
    if not mechanism:
        raise ValidationError("concepts need a nonempty mechanism")
    ev = evaluator or RepertoireEvaluator(system, state, config.variant, config.tol_zero)
    cause = _core(ev, CAUSE, mechanism, config)
    effect = _core(ev, EFFECT, mechanism, config)
    phi = min(cause.phi, effect.phi)
    if phi <= 0.0:
        return None
    return Concept(mechanism, phi, cause, effect)


def qshape(system: System, state: State,
           config: EngineConfig = EngineConfig()) -> QShape:
    """Concepts for every nonempty mechanism, in ascending mask order."""
    ev = RepertoireEvaluator(system, state, config.variant, config.tol_zero)
    mechanisms = [m for m in subset_masks(system.n_elements) if m]
    if config.threads > 1 and len(mechanisms) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            found = list(pool.map(
                lambda m: concept(system, state, m, config, evaluator=ev), mechanisms))
    else:
        found = [concept(system, state, m, config, evaluator=ev) for m in mechanisms]
    return QShape(tuple(range(system.n_elements)), dict(zip(mechanisms, found)))


def proto_distance(x: State, r: float, y: State, t: float) -> float:
    """Distance on (state, intensity) pairs: scaled state distance plus gap."""
    low = min(r, t)
    out = abs(r - t)
    if low > 0.0:
        out += low * distance(x, y)
    return out


def qshape_distance(q1: QShape, q2: QShape, space) -> float:
    """Sum of proto-experience distances; missing concepts count as (mixed, 0)."""
    if q1.concepts.keys() != q2.concepts.keys():
        raise ValidationError("Q-shapes index different mechanism sets")
    fill = mixed(space)
    total = 0.0
    for m in q1.concepts:
        for side in ("cause", "effect"):
            total += _pe_term(q1.concepts[m], q2.concepts[m], side, fill)
    return total


def _pe_term(c1: Concept | None, c2: Concept | None, side: str, fill: State) -> float:
    x, r = (getattr(c1, side).value.state, c1.phi) if c1 is not None else (fill, 0.0)
    y, t = (getattr(c2, side).value.state, c2.phi) if c2 is not None else (fill, 0.0)
    return proto_distance(x, r, y, t)


def enumerate_cuts(n: int, kind: str):
    """Nontrivial bipartitions: unordered for symmetric cuts, ordered otherwise."""
    for part in subset_masks(n):
        if not part or len(part) == n:
            continue
        if kind == SYMMETRIC and 0 not in part:
            continue  # unordered: keep the side containing element 0
        yield part


def _cut_system(system: System, part: tuple[int, ...], kind: str) -> System:
    if kind == SYMMETRIC:
        return symmetric_cut(system, part)
    return directional_cut(system, part)


def system_phi(system: System, state: State,
               config: EngineConfig = EngineConfig()) -> SystemPhiResult:
    """Integration of the Q-shape over all admissible cuts of the system."""
    q = qshape(system, state, config)
    if system.n_elements <= 1:
        return SystemPhiResult(0.0, None, q)
    best = None
    witness = None
    for part in enumerate_cuts(system.n_elements, config.cut_kind):
        cut_sys = _cut_system(system, part, config.cut_kind)
        qc = qshape(cut_sys, state, config)
        d = qshape_distance(q, qc, system.space)
        if best is None or d < best:
            best = d
            witness = Cut(config.cut_kind, part)
    return SystemPhiResult(_clamp(best, config.phi_zero_tol), witness, q)


def _embed_qshape(q: QShape, host_elements: tuple[int, ...], system: System) -> QShape:
    """Re-index a subsystem Q-shape and pad its states onto the host space."""
    d = split(system.space, host_elements)
    pad = mixed(d.right_space)
    out: dict[tuple[int, ...], Concept | None] = {}
    for m_rel, c in q.concepts.items():
        m_abs = tuple(host_elements[i] for i in m_rel)
        if c is None:
            out[m_abs] = None
            continue
        out[m_abs] = Concept(
            m_abs, c.phi,
            _embed_core(c.cause, host_elements, d, pad),
            _embed_core(c.effect, host_elements, d, pad))
    return QShape(tuple(range(system.n_elements)), out)


def _embed_core(core: CoreRepertoire, host_elements: tuple[int, ...],
                d: Decomposition, pad: State) -> CoreRepertoire:
    state = apply(d.iso_inv, tensor_states(core.value.state, pad))
    remap = lambda sub: None if sub is None else tuple(host_elements[i] for i in sub)
    return CoreRepertoire(remap(core.purview), core.phi,
                          RepertoireValue(state, core.value.lam),
                          remap(core.mechanism_part), remap(core.purview_part))


def major_complex(system: System, state: State,
                  config: EngineConfig = EngineConfig()) -> Experience:
    """The subsystem with the most integrated Q-shape, embedded in the host.

    Near-equal scores prefer more elements, then the lexicographically
    smallest index set.
    """
    results: dict[tuple[int, ...], SystemPhiResult] = {}
    for part in subset_masks(system.n_elements):
        if not part:
            continue
        sub = subsystem(system, state, part)
        results[part] = system_phi(sub, restrict_state(state, part), config)
    if not results:
        return Experience((), 0.0, QShape((), {}), None, {})
    top = max(r.value for r in results.values())
    candidates = [p for p, r in results.items() if r.value >= top - config.tie_tol]
    winner = min(candidates, key=lambda p: (-len(p), p))
    embedded = _embed_qshape(results[winner].qshape, winner, system)
    return Experience(winner, results[winner].value, embedded, results[winner].cut, results)


# ---------------------------------------------------------------------------
# integration of process families over decomposition sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyIntegration:
    value: float
    pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    empty_minimization: bool = False


def restriction_family(process: Process):
    """The default family: noise the discarded parts of a process.

    ``member(d_in, d_out)`` feeds the complement of ``d_in`` the completely
    mixed state and discards the complement of ``d_out``.
    """
    def member(d_in: Decomposition, d_out: Decomposition) -> Process:
        pad = tensor(identity(d_in.left_space), mixed_process(d_in.right_space))
        head = compose(compose(pad, d_in.iso_inv), process)
        return compose(compose(head, d_out.iso),
                       tensor(identity(d_out.left_space), discard(d_out.right_space)))

    return member


def family_integration(process: Process, family, dset_in: DecompositionSet,
                       dset_out: DecompositionSet, dist) -> FamilyIntegration:
    """Minimal distance from a process to its recombined split versions.

    ``family(d_in, d_out)`` supplies the building block between the left
    parts; the candidate recombines it with the block between the right
    parts.  The two pairings reproducing the full process are excluded; an
    empty candidate list yields 0 with the empty-minimization flag set.
    """
    best = None
    witness = None
    for d_in in dset_in:
        for d_out in dset_out:
            if d_in.is_full and d_out.is_full:
                continue
            if d_in.is_empty and d_out.is_empty:
                continue
            block = family(d_in, d_out)
            co_block = family(dset_in.member(d_in.right), dset_out.member(d_out.right))
            candidate = compose(compose(d_in.iso, tensor(block, co_block)), d_out.iso_inv)
            d = dist(process, candidate)
            if best is None or d < best:
                best = d
                witness = (d_in.left, d_out.left)
    if best is None:
        return FamilyIntegration(0.0, None, empty_minimization=True)
    return FamilyIntegration(best, witness)
