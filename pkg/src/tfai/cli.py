"""Command-line interface: analyze, validate-kb, gen-stencils, eval, serve.

Exit codes: 0 success, 2 input/usage error, 3 KB validation error. The `eval`
subcommand exits 0 only when recall is 1.0, so it can gate CI.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .diagram import DiagramParseError
from .engine import analyze
from .evaluation import BaselineError, compute_coverage, load_baseline
from .kb import (
    KbError,
    KbValidationError,
    KnowledgeBase,
    OBJECTIVE_TOKENS,
    load_kb,
    parse_objectives,
    validate_kb,
)
from .reporting import FORMATS, RenderOptions, render
from .stencils import DEFAULT_ANNOTATION_KEY, generate_stencil_library

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_KB_INVALID = 3


def _fail(message: str, code: int = EXIT_INPUT_ERROR) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_kb_file(path: str) -> KnowledgeBase:
    with open(path, "rb") as fh:
        return load_kb(fh)


def _default_annotation_key() -> str:
    return os.environ.get("TFAI_ANNOTATION_KEY", DEFAULT_ANNOTATION_KEY)


def _cmd_analyze(args) -> int:
    try:
        kb = _load_kb_file(args.kb)
    except KbValidationError as exc:
        for finding in exc.report.errors:
            print(f"error: {finding.path}: {finding.message}", file=sys.stderr)
        return EXIT_KB_INVALID
    except (KbError, OSError) as exc:
        return _fail(str(exc))

    try:
        objectives = parse_objectives(args.objectives.split(","))
    except ValueError as exc:
        return _fail(str(exc))

    try:
        with open(args.diagram, "rb") as fh:
            diagram_bytes = fh.read()
    except OSError as exc:
        return _fail(str(exc))

    try:
        report = analyze(diagram_bytes, objectives, kb, args.annotation_key)
    except DiagramParseError as exc:
        return _fail(f"[{exc.code}] {exc}")

    rendered = render(report, RenderOptions(format=args.format))
    if args.out:
        Path(args.out).write_bytes(rendered)
    else:
        sys.stdout.buffer.write(rendered)
        if not rendered.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate_kb(args) -> int:
    try:
        with open(args.kb, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        return _fail(str(exc))
    try:
        document = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        return _fail(f"not a JSON document: {exc}")

    report = validate_kb(document)
    if not report.findings:
        print("OK: knowledge base is valid, no findings")
        return EXIT_OK
    for finding in report.findings:
        print(f"{finding.severity}: {finding.path}: {finding.message}")
    if report.ok:
        print(f"OK: valid with {len(report.warnings)} warning(s)")
        return EXIT_OK
    print(f"FAILED: {len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return EXIT_KB_INVALID


def _cmd_gen_stencils(args) -> int:
    try:
        kb = _load_kb_file(args.kb)
    except KbValidationError as exc:
        for finding in exc.report.errors:
            print(f"error: {finding.path}: {finding.message}", file=sys.stderr)
        return EXIT_KB_INVALID
    except (KbError, OSError) as exc:
        return _fail(str(exc))
    data = generate_stencil_library(kb, args.annotation_key)
    Path(args.out).write_bytes(data)
    print(f"wrote stencil library for {len(kb.assets)} assets to {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    try:
        with open(args.report, "rb") as fh:
            report_doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read report: {exc}")
    try:
        with open(args.baseline, "rb") as fh:
            baseline = load_baseline(fh)
    except (OSError, BaselineError) as exc:
        return _fail(f"cannot read baseline: {exc}")

    metrics = compute_coverage(report_doc, baseline)
    print(json.dumps(metrics.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK if metrics.recall == 1.0 else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    kb_path = args.kb or os.environ.get("TFAI_KB")
    if not kb_path:
        return _fail("no knowledge base given (use --kb or TFAI_KB)")
    try:
        kb = _load_kb_file(kb_path)
    except KbValidationError as exc:
        for finding in exc.report.errors:
            print(f"error: {finding.path}: {finding.message}", file=sys.stderr)
        return EXIT_KB_INVALID
    except (KbError, OSError) as exc:
        return _fail(str(exc))

    port = args.port if args.port is not None else int(os.environ.get("TFAI_PORT", "8000"))
    app = create_app(kb, annotation_key=args.annotation_key, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfai",
        description="Asset-driven threat modeling for AI-based systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a diagram against a knowledge base")
    p.add_argument("--diagram", required=True, help="diagrams.net file (.xml/.drawio)")
    p.add_argument("--kb", required=True, help="knowledge base JSON file")
    p.add_argument(
        "--objectives",
        required=True,
        help=f"comma-separated objectives ({', '.join(OBJECTIVE_TOKENS)})",
    )
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--annotation-key", default=_default_annotation_key())
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("validate-kb", help="validate a knowledge base file")
    p.add_argument("--kb", required=True)
    p.set_defaults(func=_cmd_validate_kb)

    p = sub.add_parser("gen-stencils", help="generate the diagrams.net stencil library")
    p.add_argument("--kb", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--annotation-key", default=_default_annotation_key())
    p.set_defaults(func=_cmd_gen_stencils)

    p = sub.add_parser("eval", help="measure report coverage against an expert baseline")
    p.add_argument("--report", required=True, help="canonical JSON threat report")
    p.add_argument("--baseline", required=True, help="baseline model JSON file")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--kb", help="knowledge base file (or TFAI_KB)")
    p.add_argument("--port", type=int, help="port (or TFAI_PORT, default 8000)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--annotation-key", default=_default_annotation_key())
    p.add_argument("--ui-dir", help="directory with the web UI bundle to serve")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
