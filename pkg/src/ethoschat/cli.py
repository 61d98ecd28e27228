"""Command-line entry points.

    ethoschat solve <file.lp> [--limit N] [--query ATOM --mode cautious|brave]
    ethoschat learn --windows w.jsonl --background b.lp --modes m.lp [--out h.lp]
    ethoschat replay [--windows scenarios.jsonl] [--store DIR]
    ethoschat serve [--store DIR] [--port P] [--host H]
    ethoschat train [--store DIR]     interactive training phase
    ethoschat chat [--store DIR]      interactive test phase

The store directory defaults to $ETHOSCHAT_STORE, then ./ethoschat-store.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import data_text
from .engine import DialogueEngine, Scenario
from .errors import EthosChatError
from .learner import ExampleWindow, learn_stream
from .modes import parse_mode_text
from .parser import parse_atom, parse_program
from .solver import answer_sets, entails
from .store import JournalStore


def _default_store() -> str:
    return os.environ.get("ETHOSCHAT_STORE", "ethoschat-store")


def _open_engine(store_dir: str) -> DialogueEngine:
    store = JournalStore(store_dir)
    engine = DialogueEngine(store)
    if store.is_empty:
        engine.seed(data_text("background.lp"), data_text("modes.lp"))
    return engine


def cmd_solve(args: argparse.Namespace) -> int:
    program = parse_program(Path(args.file).read_text("utf-8"))
    if args.query:
        atom = parse_atom(args.query)
        result = entails(program, atom, mode=args.mode)
        print("true" if result else "false")
        return 0
    models = answer_sets(program, limit=args.limit)
    if not models:
        print("no answer sets")
        return 1
    for model in models:
        print(model.render())
    return 0


def _load_windows(path: str, head_predicates: list[str]) -> list[ExampleWindow]:
    windows = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            windows.append(
                ExampleWindow.from_payload(json.loads(line), head_predicates)
            )
    return windows


def cmd_learn(args: argparse.Namespace) -> int:
    background = parse_program(Path(args.background).read_text("utf-8"))
    modes = parse_mode_text(Path(args.modes).read_text("utf-8"))
    heads = [d.predicate for d in modes if d.kind == "head"]
    windows = _load_windows(args.windows, heads)
    result = learn_stream(windows, background, modes)
    for entry in result.hypothesis.revision_log:
        print(f"{entry.window_id}: {entry.action}")
        for line in entry.after:
            print(f"    {line}")
    if result.quarantined:
        print("quarantined windows:", file=sys.stderr)
        for window_id, reason in result.quarantined:
            print(f"  {window_id}: {reason}", file=sys.stderr)
    hypothesis_text = result.hypothesis.render()
    if args.out:
        Path(args.out).write_text(hypothesis_text + "\n", "utf-8")
    else:
        print("final hypothesis:")
        print(hypothesis_text or "  (empty)")
    return 1 if result.quarantined else 0


def _scenario_lines(path: str | None):
    text = Path(path).read_text("utf-8") if path else data_text("demo_scenarios.jsonl")
    for line in text.splitlines():
        if line.strip():
            yield json.loads(line)


def cmd_replay(args: argparse.Namespace) -> int:
    engine = _open_engine(args.store)
    for body in _scenario_lines(args.windows):
        scenario = Scenario.from_json(body, require_label=True)
        step = engine.run_training_step(scenario)
        print(f"{step.window_id}: {step.action}")
        for line in step.after:
            print(f"    {line}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(args.store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _prompt(text: str) -> str:
    try:
        return input(text).strip()
    except EOFError:
        return ""


def _read_scenario(engine: DialogueEngine, want_label: bool) -> Scenario | None:
    product = _prompt("product asked about> ")
    if not product:
        return None
    handle = _prompt("response handle> ")
    if not handle:
        return None
    print("annotations (comma-separated), vocabulary:")
    print("  " + ", ".join(engine.annotation_vocabulary()))
    raw = _prompt("annotations> ")
    annotations = tuple(a.strip() for a in raw.split(",") if a.strip())
    label = None
    if want_label:
        label = _prompt("label (ethical/unethical)> ")
    return Scenario(product=product, handle=handle, annotations=annotations, label=label or None)


def cmd_train(args: argparse.Namespace) -> int:
    engine = _open_engine(args.store)
    print("training phase; empty product ends the session")
    while True:
        scenario = _read_scenario(engine, want_label=True)
        if scenario is None:
            return 0
        try:
            step = engine.run_training_step(scenario)
        except EthosChatError as err:
            print(f"rejected: {err}")
            continue
        print(f"verdict before training: {step.verdict_before.status}")
        print(f"revision: {step.action}")
        for line in step.after:
            print(f"    {line}")


def cmd_chat(args: argparse.Namespace) -> int:
    engine = _open_engine(args.store)
    print("test phase; empty product ends the session")
    while True:
        scenario = _read_scenario(engine, want_label=False)
        if scenario is None:
            return 0
        try:
            verdict = engine.evaluate_response(scenario)
        except EthosChatError as err:
            print(f"error: {err}")
            continue
        print(f"verdict: {verdict.status}")
        for fired in verdict.fired_rules:
            print(f"    because: {fired.rule}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ethoschat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute answer sets of a program file")
    p.add_argument("file")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--query", default=None)
    p.add_argument("--mode", choices=("cautious", "brave"), default="cautious")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("learn", help="run the learner over a window stream")
    p.add_argument("--windows", required=True)
    p.add_argument("--background", required=True)
    p.add_argument("--modes", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("replay", help="replay labeled scenarios through training")
    p.add_argument("--windows", default=None, help="scenario jsonl (default: bundled demo)")
    p.add_argument("--store", default=_default_store())
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--store", default=_default_store())
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("train", help="interactive training phase")
    p.add_argument("--store", default=_default_store())
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("chat", help="interactive test phase")
    p.add_argument("--store", default=_default_store())
    p.set_defaults(func=cmd_chat)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EthosChatError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
