"""Batch CLI for headless analysis plus the service launcher.

Exit codes: 2 bad arguments, 3 parse/load errors, 4 degenerate operator
chain.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ChainTooDeep, DegenerateChain, EmptySelection, MelodyscopeError
from .musicxml import parse_musicxml
from .operators import OperatorId
from .session import (
    AnalysisSession,
    heatmap,
    heatmap_csv,
    heatmap_json,
    load_session,
    save_session,
)
from .service import set_json

EXIT_BAD_ARGS = 2
EXIT_PARSE_ERROR = 3
EXIT_DEGENERATE = 4

CORPUS_ENV_VAR = "MELODYSCOPE_CORPUS"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DegenerateChain as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (MelodyscopeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="melodyscope",
        description="Semi-automatic melodic pattern analysis of MusicXML scores.",
    )
    subparsers = parser.add_subparsers(required=True)

    analyze = subparsers.add_parser(
        "analyze", help="search one score for a pattern and its variants"
    )
    analyze.add_argument("--score", required=True, help="MusicXML file (.musicxml/.xml/.mxl)")
    analyze.add_argument(
        "--select",
        required=True,
        metavar="VOICE:FIRST:LAST",
        help="voice index and first/last note indices, e.g. 0:0:7",
    )
    analyze.add_argument(
        "--ops",
        default="",
        metavar="O1,O2,...",
        help="operator chain to expand from the selection",
    )
    analyze.add_argument("--out", help="write the JSON report here instead of stdout")
    analyze.set_defaults(handler=cmd_analyze)

    heatmap_cmd = subparsers.add_parser(
        "heatmap", help="coverage table of one session, or a pair comparison"
    )
    heatmap_cmd.add_argument("sessions", nargs="+", help="one or two session JSON files")
    heatmap_cmd.add_argument("--score", help="MusicXML file the session(s) analyze")
    heatmap_cmd.add_argument(
        "--corpus",
        default=os.environ.get(CORPUS_ENV_VAR),
        help=f"corpus directory to resolve the score id (default ${CORPUS_ENV_VAR})",
    )
    heatmap_cmd.add_argument("--format", choices=("csv", "json"), default="csv")
    heatmap_cmd.add_argument("--out", help="write here instead of stdout")
    heatmap_cmd.set_defaults(handler=cmd_heatmap)

    serve = subparsers.add_parser("serve", help="run the HTTP service")
    serve.add_argument(
        "--corpus",
        default=os.environ.get(CORPUS_ENV_VAR, "."),
        help=f"corpus directory (default ${CORPUS_ENV_VAR} or cwd)",
    )
    serve.add_argument("--sessions", default="./sessions", help="session storage dir")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument(
        "--cors-origin",
        action="append",
        default=[],
        help="origin allowed to call the API (repeatable)",
    )
    serve.set_defaults(handler=cmd_serve)

    return parser


def cmd_analyze(args) -> int:
    try:
        voice_index, first_index, last_index = _parse_selection(args.select)
        ops = _parse_ops(args.ops)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS

    score = parse_musicxml(Path(args.score))
    if not 0 <= voice_index < len(score.voices):
        print(
            f"error: voice index {voice_index} out of range "
            f"(score has {len(score.voices)} voices)",
            file=sys.stderr,
        )
        return EXIT_BAD_ARGS
    voice = score.voices[voice_index]
    for index in (first_index, last_index):
        if not 0 <= index < len(voice.notes):
            print(
                f"error: note index {index} out of range "
                f"(voice {voice.id} has {len(voice.notes)} notes)",
                file=sys.stderr,
            )
            return EXIT_BAD_ARGS

    session = AnalysisSession(session_id="cli", score=score)
    try:
        node, selection = session.select(
            voice.id,
            voice.notes[first_index].id,
            voice.notes[last_index].id,
        )
    except EmptySelection as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS

    availability = {
        op.value: count for op, count in session.operators_for(node.id).items()
    }

    occurrences = None
    current = node
    try:
        for op in ops:
            current, _edge, result, _bridges = session.apply(current.id, op)
            occurrences = result
    except ChainTooDeep as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS

    report = {
        "score": {
            "id": score.id,
            "title": score.title,
            "composer": score.composer,
            "voices": [v.id for v in score.voices],
        },
        "selection": set_json(selection),
        "availability": availability,
        "occurrences": set_json(occurrences) if occurrences is not None else None,
        "graph": session.graph.to_dict(),
    }
    _write_output(json.dumps(report, indent=2, sort_keys=True), args.out)
    return 0


def cmd_heatmap(args) -> int:
    if len(args.sessions) > 2:
        print("error: at most two sessions can be compared", file=sys.stderr)
        return EXIT_BAD_ARGS

    documents = []
    for path in args.sessions:
        try:
            documents.append(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_PARSE_ERROR

    score_path = _resolve_score(args, documents[0])
    if score_path is None:
        print(
            "error: give --score, or --corpus (or $" + CORPUS_ENV_VAR + ") "
            "containing the session's score",
            file=sys.stderr,
        )
        return EXIT_PARSE_ERROR
    score = parse_musicxml(score_path)

    sessions = [load_session(doc, score) for doc in documents]
    rows = heatmap(sessions[0], sessions[1] if len(sessions) == 2 else None)
    encoded = heatmap_csv(rows) if args.format == "csv" else heatmap_json(rows)
    _write_output(encoded, args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        corpus_dir=Path(args.corpus),
        session_dir=Path(args.sessions),
        port=args.port,
        cors_origins=tuple(args.cors_origin),
    )
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _parse_selection(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"selection must be VOICE:FIRST:LAST, got {text!r}")
    try:
        voice_index, first_index, last_index = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"selection indices must be integers, got {text!r}") from None
    if min(voice_index, first_index, last_index) < 0:
        raise ValueError("selection indices must be >= 0")
    return voice_index, first_index, last_index


def _parse_ops(text: str) -> list[OperatorId]:
    if not text.strip():
        return []
    return [OperatorId.parse(token) for token in text.split(",") if token.strip()]


def _resolve_score(args, document: dict) -> Path | None:
    if args.score:
        return Path(args.score)
    if not args.corpus:
        return None
    score_id = document.get("score_id", "")
    for suffix in (".musicxml", ".xml", ".mxl"):
        candidate = Path(args.corpus) / f"{score_id}{suffix}"
        if candidate.exists():
            return candidate
    return None


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


if __name__ == "__main__":
    sys.exit(main())
