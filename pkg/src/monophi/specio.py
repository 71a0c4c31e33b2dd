"""System description files and machine-readable reports.

A system file is JSON with the following shape (complex numbers are
``[re, im]`` pairs everywhere):

    {
      "backend": "classical" | "quantum",
      "elements": [{"name": "A", "size": 2}, ...],     # "dim" for quantum
      "dynamics": [[...], ...]                          # classical TPM, or
                  {"kraus": [matrix, ...]} | {"choi": matrix},
      "reverse_dynamics": ...,                          # optional, same format
      "metric": "point" | "table",                      # classical only
      "metric_tables": [table, ...],                    # with "table", optional
      "mode": "generic" | "iit3",
      "cut": "symmetric" | "directional",
      "state": [0, 1, ...] | {"distribution": [...]} | {"density": matrix}
    }

Product states are indexed little-endian: the first listed element varies
fastest, so the TPM row for configuration (s_0, s_1, ...) is
``s_0 + size_0 * (s_1 + size_1 * (...))``, and likewise for columns.

The default metric is "table" with per-element point metrics combined by the
sum rule (Hamming distance for binary elements); "point" selects the global
point metric on the product set, under which classical distances coincide
with the trace distance of the basis-diagonal quantum embedding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import classical as cl
from . import quantum as qu
from .core import CLASSICAL, QUANTUM, Process, Space, State, classical_space, quantum_space
from .engine import DIRECTIONAL, SYMMETRIC, EngineConfig
from .errors import MonophiError, ValidationError
from .indexing import flatten_index
from .repertoires import GENERIC, IIT3
from .systems import System, is_conditionally_independent

MAX_QUANTUM_DIM = 64


class SpecParseError(MonophiError):
    """The file is not a well-formed system description."""


@dataclass
class LoadedSystem:
    system: System
    state: State
    names: tuple[str, ...]
    config: EngineConfig
    metric_kind: str
    raw: dict


def _complex_array(data, what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SpecParseError(f"{what} must be a matrix of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _as_matrix(data, what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=object)
    if arr.ndim == 3:
        return _complex_array(data, what)
    if arr.ndim == 2:
        return np.asarray(data, dtype=float).astype(complex)
    raise SpecParseError(f"{what} must be a matrix")


def load(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecParseError(f"cannot read system file: {exc}") from exc
    if not isinstance(raw, dict):
        raise SpecParseError("system file must hold a JSON object")
    return raw


def _parse_elements(raw: dict, backend: str):
    elements = raw.get("elements")
    if not isinstance(elements, list) or not elements:
        raise SpecParseError("'elements' must be a nonempty list")
    names, sizes = [], []
    size_key = "size" if backend == CLASSICAL else "dim"
    for pos, el in enumerate(elements):
        if not isinstance(el, dict):
            raise SpecParseError("each element must be an object")
        names.append(str(el.get("name", f"e{pos}")))
        size = el.get(size_key, el.get("size", el.get("dim")))
        if not isinstance(size, int) or size < 1:
            raise SpecParseError(f"element {names[-1]!r} needs a positive '{size_key}'")
        sizes.append(size)
    if len(set(names)) != len(names):
        raise SpecParseError("element names must be unique")
    return tuple(names), tuple(sizes)


def _parse_space(raw: dict, backend: str, sizes) -> tuple[Space, str]:
    if backend == QUANTUM:
        return quantum_space(sizes), "trace"
    kind = raw.get("metric", "table")
    if kind == "point":
        dim = int(np.prod(sizes))
        return Space(CLASSICAL, sizes, cl.point_metric(dim)), "point"
    if kind != "table":
        raise SpecParseError("metric must be 'point' or 'table'")
    tables = raw.get("metric_tables")
    if tables is None:
        return classical_space(sizes), "table"
    if not isinstance(tables, list) or len(tables) != len(sizes):
        raise SpecParseError("metric_tables needs one table per element")
    parsed = [np.asarray(t, dtype=float) for t in tables]
    return classical_space(sizes, element_metrics=parsed), "table"


def _parse_dynamics(raw_dyn, space: Space, what: str) -> Process:
    if space.backend == CLASSICAL:
        table = np.asarray(raw_dyn, dtype=float)
        if table.shape != (space.dim, space.dim):
            raise SpecParseError(f"{what} must be a {space.dim}x{space.dim} table")
        return Process(space, space, table)
    if not isinstance(raw_dyn, dict):
        raise SpecParseError(f"{what} must give 'kraus' or 'choi'")
    if "kraus" in raw_dyn:
        ops = [_as_matrix(k, f"{what} Kraus operator") for k in raw_dyn["kraus"]]
        return Process(space, space, qu.kraus_to_choi(ops))
    if "choi" in raw_dyn:
        choi = _as_matrix(raw_dyn["choi"], f"{what} Choi matrix")
        return Process(space, space, choi)
    raise SpecParseError(f"{what} must give 'kraus' or 'choi'")


def _parse_state(raw_state, space: Space, names) -> State:
    if isinstance(raw_state, str):
        parts = [p.strip() for p in raw_state.split(",")]
        raw_state = [int(p) for p in parts]
    if isinstance(raw_state, list) and all(isinstance(x, int) for x in raw_state):
        if len(raw_state) != space.n_elements:
            raise SpecParseError("basis state needs one value per element")
        for value, size, name in zip(raw_state, space.factors, names):
            if not 0 <= value < size:
                raise SpecParseError(f"basis value {value} out of range for element {name!r}")
        idx = flatten_index(tuple(raw_state), space.factors)
        if space.backend == CLASSICAL:
            payload = np.zeros(space.dim)
            payload[idx] = 1.0
            return State(space, payload)
        payload = np.zeros((space.dim, space.dim), dtype=complex)
        payload[idx, idx] = 1.0
        return State(space, payload)
    if isinstance(raw_state, dict) and "distribution" in raw_state:
        if space.backend != CLASSICAL:
            raise SpecParseError("distribution states are classical")
        return State(space, np.asarray(raw_state["distribution"], dtype=float))
    if isinstance(raw_state, dict) and "density" in raw_state:
        if space.backend != QUANTUM:
            raise SpecParseError("density states are quantum")
        return State(space, _as_matrix(raw_state["density"], "state density"))
    raise SpecParseError("state must be a basis label, distribution or density matrix")


def build(raw: dict, *, mode: str | None = None, cut: str | None = None,
          state: str | None = None, threads: int = 1,
          tol_causal: float = 1e-9, tol_zero: float = 1e-12) -> LoadedSystem:
    """Construct the system, state and engine configuration from parsed JSON."""
    backend = raw.get("backend")
    if backend not in (CLASSICAL, QUANTUM):
        raise SpecParseError("backend must be 'classical' or 'quantum'")
    names, sizes = _parse_elements(raw, backend)
    space, metric_kind = _parse_space(raw, backend, sizes)
    evolution = _parse_dynamics(raw.get("dynamics"), space, "dynamics")
    reverse = None
    if raw.get("reverse_dynamics") is not None:
        reverse = _parse_dynamics(raw["reverse_dynamics"], space, "reverse_dynamics")
    mode = mode or raw.get("mode", GENERIC)
    cut = cut or raw.get("cut", DIRECTIONAL if mode == IIT3 else SYMMETRIC)
    if mode not in (GENERIC, IIT3):
        raise SpecParseError("mode must be 'generic' or 'iit3'")
    if cut not in (SYMMETRIC, DIRECTIONAL):
        raise SpecParseError("cut must be 'symmetric' or 'directional'")
    raw_state = state if state is not None else raw.get("state")
    if raw_state is None:
        raise SpecParseError("no state given (file key 'state' or --state)")
    parsed_state = _parse_state(raw_state, space, names)
    config = EngineConfig(variant=mode, cut_kind=cut, tol_zero=tol_zero, threads=threads)
    system = System(space, evolution, reverse, tol_causal=tol_causal)
    if backend == QUANTUM and space.dim > MAX_QUANTUM_DIM:
        raise ValidationError(f"total Hilbert dimension {space.dim} exceeds {MAX_QUANTUM_DIM}")
    return LoadedSystem(system, parsed_state, names, config, metric_kind, raw)


def validate(raw: dict, *, mode: str | None = None, cut: str | None = None,
             state: str | None = None, tol_causal: float = 1e-9,
             tol_zero: float = 1e-12, tol_cptp: float = 1e-8) -> list[str]:
    """All invariant violations of a parsed system file, as readable strings."""
    problems: list[str] = []
    backend = raw.get("backend")
    if backend not in (CLASSICAL, QUANTUM):
        return ["backend must be 'classical' or 'quantum'"]
    names, sizes = _parse_elements(raw, backend)
    space, _ = _parse_space(raw, backend, sizes)
    mode = mode or raw.get("mode", GENERIC)
    cut = cut or raw.get("cut", DIRECTIONAL if mode == IIT3 else SYMMETRIC)

    if backend == CLASSICAL:
        table = np.asarray(raw.get("dynamics"), dtype=float)
        if table.shape != (space.dim, space.dim):
            return [f"dynamics must be a {space.dim}x{space.dim} table"]
        if table.min() < 0:
            problems.append("dynamics table has negative entries")
        sums = table.sum(axis=1)
        for row in np.flatnonzero(np.abs(sums - 1.0) > tol_causal):
            problems.append(f"dynamics row {row} sums to {sums[row]!r} (not causal)")
    else:
        if space.dim > MAX_QUANTUM_DIM:
            problems.append(f"total Hilbert dimension {space.dim} exceeds {MAX_QUANTUM_DIM}")
        evolution = _parse_dynamics(raw.get("dynamics"), space, "dynamics")
        if not qu.is_cp(evolution.payload, tol_cptp):
            problems.append("dynamics is not completely positive")
        if not qu.is_tp(evolution.payload, space.dim, space.dim, tol_cptp):
            problems.append("dynamics is not trace preserving")

    reverse_raw = raw.get("reverse_dynamics")
    if reverse_raw is not None:
        if backend == CLASSICAL:
            rev = np.asarray(reverse_raw, dtype=float)
            if rev.shape != (space.dim, space.dim):
                problems.append(f"reverse_dynamics must be a {space.dim}x{space.dim} table")
            elif rev.min() < 0 or rev.sum() <= 0:
                problems.append("reverse_dynamics must be nonnegative with positive mass")
        else:
            rev = _parse_dynamics(reverse_raw, space, "reverse_dynamics")
            if not qu.is_cp(rev.payload, tol_cptp):
                problems.append("reverse_dynamics is not completely positive")

    if mode == IIT3:
        if backend != CLASSICAL:
            problems.append("mode 'iit3' requires the classical backend")
    if cut == DIRECTIONAL and backend != CLASSICAL:
        problems.append("directional cuts require the classical backend")

    raw_state = state if state is not None else raw.get("state")
    parsed_state = None
    if raw_state is None:
        problems.append("no state given")
    else:
        try:
            parsed_state = _parse_state(raw_state, space, names)
        except (SpecParseError, ValidationError) as exc:
            problems.append(f"state: {exc}")
    if parsed_state is not None:
        total = (parsed_state.payload.sum() if backend == CLASSICAL
                 else np.trace(parsed_state.payload).real)
        if abs(total - 1.0) > tol_causal:
            problems.append(f"state mass {total!r} is not 1")
        if backend == QUANTUM and not qu.is_psd(parsed_state.payload):
            problems.append("state density matrix is not positive semi-definite")

    if problems:
        return problems

    # structural checks that need a constructed system
    system = System(space, _parse_dynamics(raw.get("dynamics"), space, "dynamics"),
                    None if reverse_raw is None else
                    _parse_dynamics(reverse_raw, space, "reverse_dynamics"))
    if backend == CLASSICAL and (mode == IIT3 or cut == DIRECTIONAL):
        if not is_conditionally_independent(system):
            problems.append("dynamics is not conditionally independent "
                            "(required by iit3 mode and directional cuts)")
    from .repertoires import is_weakly_causal

    full = tuple(range(space.n_elements))
    for direction in ("cause", "effect"):
        variant = mode if backend == CLASSICAL else GENERIC
        if problems:
            break
        if not is_weakly_causal(system, direction, full, full, variant):
            problems.append(f"configured {direction} repertoire is not weakly causal")
    return problems


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _round_trip_float(x: float) -> float:
    return float(x)


def _state_json(state: State):
    if state.zero:
        return None
    if state.backend == CLASSICAL:
        return [float(x) for x in state.payload]
    return [[[float(z.real), float(z.imag)] for z in row] for row in state.payload]


def _names_of(subset, names) -> list[str]:
    return [names[i] for i in subset]


def _core_json(core, names):
    return {
        "purview": _names_of(core.purview, names),
        "phi": _round_trip_float(core.phi),
        "minimizing_split": None if core.mechanism_part is None else {
            "mechanism_part": _names_of(core.mechanism_part, names),
            "purview_part": _names_of(core.purview_part, names),
        },
        "repertoire": _state_json(core.value.state),
        "normalization": None if core.value.lam is None else _round_trip_float(core.value.lam.value),
    }


def qshape_json(shape, names) -> list[dict]:
    out = []
    for mechanism, conc in shape.concepts.items():
        entry: dict = {"mechanism": _names_of(mechanism, names)}
        if conc is None:
            entry["phi"] = 0.0
            entry["concept"] = None
        else:
            entry["phi"] = _round_trip_float(conc.phi)
            entry["concept"] = {
                "cause": _core_json(conc.cause, names),
                "effect": _core_json(conc.effect, names),
            }
        out.append(entry)
    return out


def cut_json(cut, names):
    if cut is None:
        return None
    return {"kind": cut.kind, "part": _names_of(cut.part, names)}


def render_report(payload: dict) -> str:
    """Deterministic JSON: fixed key order, repr round-trip floats, newline end."""
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n"
