"""Command line front-end.

Exit codes: 0 ok, 1 validation failure, 2 parse error, 3 resource limit.
All reports are deterministic JSON; repeated runs on the same inputs are
byte-identical regardless of --threads.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__, specio
from .engine import major_complex, qshape, concept as build_concept
from .errors import MonophiError, ResourceLimitError, ValidationError
from .repertoires import CAUSE, EFFECT, RepertoireEvaluator
from .specio import LoadedSystem, SpecParseError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_LIMIT = 3

DEFAULT_MAX_ELEMENTS = 4


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("spec", help="path to the system description JSON")
    parser.add_argument("--mode", choices=["generic", "iit3"], default=None,
                        help="repertoire recipe (overrides the file)")
    parser.add_argument("--cut", choices=["symmetric", "directional"], default=None,
                        help="system cut style (overrides the file)")
    parser.add_argument("--state", default=None,
                        help="basis label like '1,0' or a JSON file with the state")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for mechanism scans (results identical)")
    parser.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS,
                        help="refuse exhaustive search above this many elements")
    parser.add_argument("--output", default=None, help="write the report here instead of stdout")
    parser.add_argument("--tol-causal", type=float, default=1e-9)
    parser.add_argument("--tol-zero", type=float, default=1e-12)


def _parse_state_arg(value):
    if value is None:
        return None
    if os.path.exists(value):
        import json

        with open(value, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return value


def _load(args) -> LoadedSystem:
    raw = specio.load(args.spec)
    loaded = specio.build(raw, mode=args.mode, cut=args.cut,
                          state=_parse_state_arg(args.state), threads=args.threads,
                          tol_causal=args.tol_causal, tol_zero=args.tol_zero)
    if loaded.system.n_elements > args.max_elements:
        raise ResourceLimitError(
            f"{loaded.system.n_elements} elements exceed the exhaustive-search limit "
            f"({args.max_elements}); raise --max-elements to accept the runtime")
    return loaded


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_header(loaded: LoadedSystem, args) -> dict:
    return {
        "engine": {"name": "monophi", "version": __version__},
        "backend": loaded.system.backend,
        "elements": [{"name": n, "size": d}
                     for n, d in zip(loaded.names, loaded.system.space.factors)],
        "indexing": "little-endian (first element varies fastest)",
        "metric": loaded.metric_kind,
        "mode": loaded.config.variant,
        "cut": loaded.config.cut_kind,
        "state": specio._state_json(loaded.state),
        "tolerances": {"causal": args.tol_causal, "zero": args.tol_zero,
                       "tie": loaded.config.tie_tol, "phi_zero": loaded.config.phi_zero_tol},
    }


def cmd_validate(args) -> int:
    raw = specio.load(args.spec)
    problems = specio.validate(raw, mode=args.mode, cut=args.cut,
                               state=_parse_state_arg(args.state),
                               tol_causal=args.tol_causal, tol_zero=args.tol_zero)
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def cmd_phi(args) -> int:
    loaded = _load(args)
    result = major_complex(loaded.system, loaded.state, loaded.config)
    full = tuple(range(loaded.system.n_elements))
    full_result = result.subsystem_results[full]
    report = _report_header(loaded, args)
    report["qshape"] = specio.qshape_json(full_result.qshape, loaded.names)
    report["system"] = {
        "phi": float(full_result.value),
        "minimizing_cut": specio.cut_json(full_result.cut, loaded.names),
    }
    report["subsystems"] = [
        {"elements": specio._names_of(part, loaded.names), "phi": float(value)}
        for part, value in result.subsystem_phis.items()
    ]
    report["major_complex"] = {
        "elements": specio._names_of(result.elements, loaded.names),
        "Phi": float(result.phi),
        "minimizing_cut": specio.cut_json(result.cut, loaded.names),
        "qshape_embedded": specio.qshape_json(result.qshape, loaded.names),
    }
    _emit(args, specio.render_report(report))
    return EXIT_OK


def cmd_qshape(args) -> int:
    loaded = _load(args)
    shape = qshape(loaded.system, loaded.state, loaded.config)
    report = _report_header(loaded, args)
    report["qshape"] = specio.qshape_json(shape, loaded.names)
    _emit(args, specio.render_report(report))
    return EXIT_OK


def _parse_subset(arg: str | None, names, what: str) -> tuple[int, ...]:
    if arg is None or arg.strip() in ("", "-"):
        return ()
    out = []
    for token in arg.split(","):
        token = token.strip()
        if token not in names:
            raise ValidationError(f"unknown element {token!r} in {what}")
        out.append(names.index(token))
    if len(set(out)) != len(out):
        raise ValidationError(f"duplicate element in {what}")
    return tuple(sorted(out))


def cmd_concept(args) -> int:
    loaded = _load(args)
    mechanism = _parse_subset(args.mechanism, loaded.names, "--mechanism")
    if not mechanism:
        raise ValidationError("--mechanism must name at least one element")
    conc = build_concept(loaded.system, loaded.state, mechanism, loaded.config)
    report = _report_header(loaded, args)
    report["mechanism"] = specio._names_of(mechanism, loaded.names)
    if conc is None:
        report["phi"] = 0.0
        report["concept"] = None
    else:
        report["phi"] = float(conc.phi)
        report["concept"] = {"cause": specio._core_json(conc.cause, loaded.names),
                             "effect": specio._core_json(conc.effect, loaded.names)}
    _emit(args, specio.render_report(report))
    return EXIT_OK


def cmd_repertoire(args) -> int:
    loaded = _load(args)
    names = loaded.names
    mechanism = _parse_subset(args.mechanism, names, "--mechanism")
    purview = _parse_subset(args.purview, names, "--purview")
    direction = args.direction
    ev = RepertoireEvaluator(loaded.system, loaded.state, loaded.config.variant,
                             loaded.config.tol_zero)
    value = ev.value(direction, mechanism, purview)
    extended = ev.extended(direction, mechanism, purview)
    report = _report_header(loaded, args)
    report["direction"] = direction
    report["mechanism"] = specio._names_of(mechanism, names)
    report["purview"] = specio._names_of(purview, names)
    report["value"] = specio._state_json(value.state)
    report["normalization"] = None if value.lam is None else float(value.lam.value)
    report["extended"] = specio._state_json(extended.state)
    if args.split_mechanism is not None or args.split_purview is not None:
        m_part = _parse_subset(args.split_mechanism, names, "--split-mechanism")
        p_part = _parse_subset(args.split_purview, names, "--split-purview")
        dec = ev.decomposed(direction, m_part, p_part, mechanism, purview)
        report["decomposed"] = {
            "mechanism_part": specio._names_of(m_part, names),
            "purview_part": specio._names_of(p_part, names),
            "value": specio._state_json(dec.state),
        }
    _emit(args, specio.render_report(report))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monophi",
        description="Integrated-information analysis of classical and quantum systems")
    parser.add_argument("--version", action="version", version=f"monophi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file against all invariants")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("phi", help="full pipeline: Q-shape, system phi, major complex")
    _add_common(p)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("qshape", help="concepts for every mechanism")
    _add_common(p)
    p.set_defaults(func=cmd_qshape)

    p = sub.add_parser("concept", help="the concept of one mechanism")
    _add_common(p)
    p.add_argument("--mechanism", required=True, help="comma list of element names")
    p.set_defaults(func=cmd_concept)

    p = sub.add_parser("repertoire", help="evaluate one repertoire")
    _add_common(p)
    p.add_argument("--direction", choices=[CAUSE, EFFECT], required=True)
    p.add_argument("--mechanism", default=None,
                   help="comma list of element names ('-' or omitted = unconstrained)")
    p.add_argument("--purview", required=True, help="comma list of element names")
    p.add_argument("--split-mechanism", default=None,
                   help="first part of a mechanism split ('-' = empty)")
    p.add_argument("--split-purview", default=None,
                   help="first part of a purview split ('-' = empty)")
    p.set_defaults(func=cmd_repertoire)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except MonophiError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
