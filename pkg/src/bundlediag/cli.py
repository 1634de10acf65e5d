"""Command-line front end.

Exit status is the machine-readable result: ``classify`` returns 0, 10 or 20
for noncontextual, logically and strongly contextual models. Failures use the
sysexits range (64 usage, 65 bad data, 66 missing input, 73 cannot write).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

from bundlediag.model import EmpiricalModel, ModelError, dumps_model, loads_model, outcome_key, support_of
from bundlediag.presets import PRESETS, generate_model, preset, preset_state
from bundlediag.quantum import GHZ_WORDS, QuantumError, RankOneProduct, StateVector, ZeroProduct, lemma_table
from bundlediag.render import RenderError, emit_bundle, emit_trace
from bundlediag.scenario import Scenario, ScenarioError, Section, scenario_from_dict
from bundlediag.solver import (
    LOGICAL,
    NONCONTEXTUAL,
    STRONG,
    CertificateError,
    NotParityModel,
    ParityContradiction,
    build_parity_system,
    classify,
    enumerate_global_sections,
    extend_section,
    parity_obstruction,
    parse_seed,
)

EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66
EX_SOFTWARE = 70
EX_CANTCREAT = 73

EXIT_BY_LEVEL = {NONCONTEXTUAL: 0, LOGICAL: 10, STRONG: 20}

_DATA_ERRORS = (ModelError, ScenarioError, QuantumError, RenderError)


class CliError(Exception):
    def __init__(self, message: str, status: int) -> None:
        super().__init__(message)
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        raise CliError(message, EX_USAGE)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", EX_NOINPUT) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EX_NOINPUT) from None


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EX_CANTCREAT) from None


def _load(path: str) -> EmpiricalModel:
    return loads_model(_read_text(path))


def _model_from_input(path: str) -> EmpiricalModel:
    """A scenario file with Pauli words and either ``preset`` or ``amplitudes``."""
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ModelError(f"{path} must contain a JSON object")
    if "amplitudes" in data:
        psi = StateVector.from_pairs(data["amplitudes"])
    elif "preset" in data:
        psi = preset_state(data["preset"])
    else:
        raise ModelError("input needs either 'preset' or 'amplitudes' to define the state")
    scenario = scenario_from_dict(data)
    return generate_model(scenario, psi, preset=data.get("preset"), notes=tuple(data.get("notes", ())))


def parse_assignment(scenario: Scenario, text: str) -> Section:
    """``"X_A1 X_B1"`` or ``"X_A=1, X_B=1"``; the longest matching observable name wins."""
    ids = sorted(scenario.ids, key=len, reverse=True)
    mapping: dict[str, int] = {}
    for token in re.split(r"[\s,]+", text.strip()):
        if not token:
            continue
        if "=" in token:
            name, _, value = token.partition("=")
        else:
            name = next((i for i in ids if token.startswith(i) and token[len(i):].isdigit()), "")
            value = token[len(name):]
        if name not in scenario.ids or not value.isdigit():
            raise ModelError(f"cannot read assignment token {token!r}")
        if name in mapping:
            raise ModelError(f"observable {name!r} assigned twice")
        v = int(value)
        if v >= scenario.arity(name):
            raise ModelError(f"outcome {v} out of range for {name!r}")
        mapping[name] = v
    if not mapping:
        raise ModelError("empty assignment")
    return Section.of(mapping)


# -- subcommands -------------------------------------------------------------


def cmd_gen(args, out) -> int:
    if args.preset:
        _, model = preset(args.preset)
    else:
        model = _model_from_input(args.input)
    text = dumps_model(model)
    if args.output:
        _write_text(args.output, text)
        print(f"wrote {args.output}", file=out)
    else:
        out.write(text)
    return 0


def cmd_classify(args, out) -> int:
    model = _load(args.file)
    result = classify(support_of(model))
    print(result.level, file=out)
    print("certificate:", file=out)
    print(json.dumps(result.witness, indent=2, ensure_ascii=False), file=out)
    for note in model.notes:
        print(f"note: {note}", file=out)
    if args.output:
        _write_text(args.output, dumps_model(model, extra={"certificate": result.to_dict()}))
    return EXIT_BY_LEVEL[result.level]


def cmd_parity(args, out) -> int:
    sm = support_of(_load(args.file))
    system = build_parity_system(sm)
    if isinstance(system, NotParityModel):
        print(f"not a parity model: context {system.context}: {system.reason}", file=out)
        return 0
    print(f"variables: {' '.join(system.variables)}", file=out)
    for line in system.describe():
        print(f"  {line}", file=out)
    verdict = parity_obstruction(system)
    if isinstance(verdict, ParityContradiction):
        print(f"inconsistent: rows {' + '.join(verdict.rows)} sum to 0 = 1", file=out)
        print("verdict: strongly_contextual", file=out)
    else:
        shown = " ".join(f"{k}={v}" for k, v in verdict.assignment.items)
        print(f"consistent: {shown}", file=out)
        print("verdict: parity gives no obstruction", file=out)
    return 0


def cmd_trace(args, out) -> int:
    sm = support_of(_load(args.file))
    seed = parse_seed(sm, args.seed)
    result = extend_section(sm, seed)
    _write_text(args.output, emit_trace(result.trace))
    if result.success:
        print(f"extends: {result.extension}", file=out)
    else:
        print(f"no extension of {args.seed}; {len(result.trace)} trace nodes", file=out)
    print(f"wrote {args.output}", file=out)
    return 0


def cmd_oracle(args, out) -> int:
    sm = support_of(_load(args.file))
    found = enumerate_global_sections(sm)
    ids = sm.scenario.ids
    print(f"{len(found)} global section(s)", file=out)
    if found:
        print("  " + " ".join(ids), file=out)
    for g in found:
        print("  " + outcome_key(g.values_for(ids)), file=out)
    return 0


def cmd_render(args, out) -> int:
    model = _load(args.file)
    sm = support_of(model)
    highlight = parse_assignment(sm.scenario, args.highlight) if args.highlight else None
    fmt = args.format or ("latex" if Path(args.output).suffix in (".tex", ".latex") else "svg")
    _write_text(args.output, emit_bundle(sm, highlight, format=fmt))
    print(f"wrote {args.output}", file=out)
    return 0


def cmd_lemma(args, out) -> int:
    words = args.words.split(",") if args.words else list(GHZ_WORDS)
    print("signs  minus  product    trace", file=out)
    for signs, res in lemma_table(words):
        pattern = "".join("+" if s > 0 else "-" for s in signs)
        minus = signs.count(-1)
        if isinstance(res, ZeroProduct):
            kind, tr = "zero", 0.0
        elif isinstance(res, RankOneProduct):
            kind, tr = "rank-one", res.trace.real
        else:
            kind, tr = f"rank-{res.rank}", res.trace.real
        print(f"{pattern:<6} {minus:>5}  {kind:<9} {tr:6.3f}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bundlediag", description="Sheaf-theoretic contextuality checker and diagram tool.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a model file from a preset or a state file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--input", help="scenario JSON with Pauli words plus 'preset' or 'amplitudes'")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("classify", help="decide the contextuality level with a certificate")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="write the model with its certificate attached")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("parity", help="print the GF(2) parity system and its verdict")
    p.add_argument("file")
    p.set_defaults(func=cmd_parity)

    p = sub.add_parser("trace", help="write the extension search tree as DOT")
    p.add_argument("file")
    p.add_argument("--seed", required=True, help='context and outcome digits, e.g. "C1:111"')
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("oracle", help="list all global sections by exhaustive search")
    p.add_argument("file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="draw the bundle diagram as SVG or LaTeX picture")
    p.add_argument("file")
    p.add_argument("--highlight", help='assignment such as "X_A1 X_B1 Z_A0 Z_B0"')
    p.add_argument("--format", choices=("svg", "latex"))
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("lemma", help="projector products over all sign patterns")
    p.add_argument("--words", help="comma-separated Pauli words (default XXX,XYY,YXY,YYX)")
    p.set_defaults(func=cmd_lemma)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except CliError as exc:
        print(f"bundlediag: {exc}", file=sys.stderr)
        return exc.status
    except _DATA_ERRORS as exc:
        print(f"bundlediag: {exc}", file=sys.stderr)
        return EX_DATAERR
    except CertificateError as exc:
        print(f"bundlediag: internal certificate check failed: {exc}", file=sys.stderr)
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
