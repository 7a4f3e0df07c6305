"""Command-line interface: run traces, fuzz the grammar, serve sessions, REPL."""

from __future__ import annotations

import argparse
import json
import sys

from ..automaton import Mode
from ..dialogue import DialogueSession, default_scene_text
from ..errors import StacktalkError
from ..scene import load_scene


def _scene_text(path: str | None) -> str:
    if path is None:
        return default_scene_text()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _add_lexicon_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--load-lexicon", metavar="FILE", help="gesture lexicon to preload")
    parser.add_argument("--save-lexicon", metavar="FILE", help="write learned gestures on exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stacktalk", description="multimodal pushdown dialogue engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replay a trace file against a scene")
    p_run.add_argument("--scene", metavar="FILE", help="scene file (default: shipped tabletop)")
    p_run.add_argument("--trace", metavar="FILE", required=True)
    p_run.add_argument("--mode", choices=[m.value for m in Mode], default="npda")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", metavar="FILE", help="write the full record log as JSON lines")
    _add_lexicon_flags(p_run)

    p_repl = sub.add_parser("repl", help="interactive session on stdin/stdout")
    p_repl.add_argument("--scene", metavar="FILE")
    p_repl.add_argument("--mode", choices=[m.value for m in Mode], default="npda")
    p_repl.add_argument("--seed", type=int, default=0)
    _add_lexicon_flags(p_repl)

    p_fuzz = sub.add_parser("fuzz", help="replay sampled grammatical move sequences")
    p_fuzz.add_argument("--max-len", type=int, required=True)
    p_fuzz.add_argument("--count", type=int, required=True)
    p_fuzz.add_argument("--seed", type=int, required=True)
    p_fuzz.add_argument("--scene", metavar="FILE")
    p_fuzz.add_argument("--out", metavar="FILE", help="write the report to a file")

    p_serve = sub.add_parser("serve", help="websocket session service for the UI")
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--scene", metavar="FILE")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--debug-stack", action="store_true", help="send stack_debug frames")
    p_serve.add_argument("--frontend", metavar="DIR", help="static UI directory to serve at /")
    p_serve.add_argument("--load-lexicon", metavar="FILE")

    return parser


def _cmd_run(args) -> int:
    from .trace import run_trace

    if args.scene is None:
        import tempfile

        with tempfile.NamedTemporaryFile("w", suffix=".yaml", delete=False) as fh:
            fh.write(default_scene_text())
            scene_path = fh.name
    else:
        scene_path = args.scene
    result = run_trace(
        scene_path,
        args.trace,
        mode=Mode(args.mode) if args.mode != "npda" else None,
        seed=args.seed,
        load_lexicon=args.load_lexicon,
        save_lexicon=args.save_lexicon,
    )
    for record in result.records:
        speaker = "you  " if record.direction == "human" else "agent"
        print(f"[{record.time:03d}] {speaker} {json.dumps(record.payload, sort_keys=True)}")
    for line in result.diagnostics:
        print(f"!! {line}", file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for record in result.records:
                fh.write(
                    json.dumps(
                        {
                            "time": record.time,
                            "direction": record.direction,
                            "payload": record.payload,
                            "config_digest": record.config_digest,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
    return result.exit_status


def _cmd_repl(args) -> int:
    from .repl import repl

    scene = load_scene(_scene_text(args.scene))
    session = DialogueSession(
        scene, seed=args.seed, mode=Mode(args.mode) if args.mode != "npda" else None
    )
    if args.load_lexicon:
        session.load_gestures(args.load_lexicon)
    try:
        repl(session)
    finally:
        if args.save_lexicon:
            session.save_gestures(args.save_lexicon)
    return 0


def _cmd_fuzz(args) -> int:
    from .fuzzing import fuzz

    report = fuzz(args.max_len, args.count, args.seed, scene_text=_scene_text(args.scene))
    text = report.to_text()
    print(text, end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if report.ok else 1


def _cmd_serve(args) -> int:
    from .server import serve

    serve(
        args.port,
        _scene_text(args.scene),
        host=args.host,
        seed=args.seed,
        debug_stack=args.debug_stack,
        frontend_dir=args.frontend,
        lexicon_path=args.load_lexicon,
    )
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "repl":
            return _cmd_repl(args)
        if args.command == "fuzz":
            return _cmd_fuzz(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except StacktalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
