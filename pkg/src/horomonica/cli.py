"""Command line front end.

Subcommands cover chord queries, the Markoff tree, surface group info,
session script playback, arpeggio rendering, melody compilation, viewport
export, and the NDJSON session server.  ``--json`` switches stdout to a
machine readable document; exit codes are 0 on success, 1 on a domain
error (for example a triple that is not a chord), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .audio import arpeggio, compile_melody, render_wav
from .chords import chord_obstruction, is_chord, markoff_tree, realize_chord
from .farey import ExtendedRational
from .session import Session, SessionConfig, serve
from .surfaces import builtin_group, classify, load_coset_table
from .tessellation import new_patch, viewport_json, viewport_svg

__all__ = ["run_command", "main"]


def _emit(args, lines, doc) -> None:
    """Print either plain text lines or one JSON document."""
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _config(args) -> SessionConfig:
    return SessionConfig.load(args.config)


# ------------------------------------------------------------------ chords

def _cmd_chord_check(args) -> int:
    a, b, c = args.triple
    obstruction = chord_obstruction((a, b, c))
    doc = {"triple": [a, b, c], "chord": obstruction is None, "obstruction": obstruction}
    if obstruction is None:
        _emit(args, ["chord"], doc)
        return 0
    _emit(args, [f"not a chord ({obstruction})"], doc)
    return 1


def _cmd_chord_realize(args) -> int:
    a, b, c = args.triple
    obstruction = chord_obstruction((a, b, c))
    if obstruction is not None:
        doc = {"triple": [a, b, c], "chord": False, "obstruction": obstruction}
        _emit(args, [f"not a chord ({obstruction})"], doc)
        return 1
    vertices = realize_chord((a, b, c))
    names = [str(x) for x in vertices]
    doc = {
        "triple": [a, b, c],
        "chord": True,
        "certificate": {"vertices": names, "lambdas": [a, b, c]},
    }
    text = f"chord realized at vertices {', '.join(names)} (x_i opposite the side of lambda_i)"
    _emit(args, [text], doc)
    return 0


def _cmd_chord_sweep(args) -> int:
    bound = args.bound
    if bound < 1:
        raise ValueError(f"--max must be at least 1, got {bound}")
    chords = [
        (a, b, c)
        for a in range(1, bound + 1)
        for b in range(a, bound + 1)
        for c in range(b, bound + 1)
        if is_chord((a, b, c))
    ]
    lines = [f"{a} {b} {c}" for a, b, c in chords]
    doc = {"max": bound, "count": len(chords), "chords": [list(t) for t in chords]}
    _emit(args, lines, doc)
    return 0


def _cmd_markoff(args) -> int:
    if args.depth < 0:
        raise ValueError(f"--depth must be nonnegative, got {args.depth}")
    triples = sorted(markoff_tree(args.depth))
    text = ",".join(f"({a},{b},{c})" for a, b, c in triples)
    doc = {"depth": args.depth, "triples": [list(t) for t in triples]}
    _emit(args, [text], doc)
    return 0


# ---------------------------------------------------------------- surfaces

def _cmd_surface_info(args) -> int:
    try:
        table = load_coset_table(args.group)
    except FileNotFoundError:
        # Not a file; builtin_group rejects the name and lists what exists.
        table = builtin_group(args.group)
    surface = classify(table)
    edges = table.n // 2
    triangles = table.n // 3
    text = (
        f"g={surface.genus}, s={surface.punctures}, "
        f"edges={edges}, triangles={triangles}"
    )
    doc = {
        "group": table.name,
        "genus": surface.genus,
        "punctures": surface.punctures,
        "darts": table.n,
        "edges": edges,
        "triangles": triangles,
    }
    _emit(args, [text], doc)
    return 0


# ----------------------------------------------------------------- scripts

def _load_script(path: str) -> dict:
    """Read a session script file.

    A bare JSON list is shorthand for a universal tuning script; the full
    form is an object with "mode", optional "group" and "tuning", and a
    list of protocol messages under "events".
    """
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    if isinstance(doc, list):
        doc = {"mode": "universal", "tuning": doc, "events": []}
    if not isinstance(doc, dict):
        raise ValueError("script must be a JSON list or object")
    mode = doc.get("mode", "universal")
    if mode not in ("universal", "equivariant"):
        raise ValueError(f"unknown script mode {mode!r}")
    if mode == "equivariant" and "group" not in doc:
        raise ValueError("equivariant script needs a group")
    tuning = doc.get("tuning", [])
    events = doc.get("events", [])
    if not isinstance(tuning, list) or not isinstance(events, list):
        raise ValueError("script tuning and events must be lists")
    return {
        "mode": mode,
        "group": doc.get("group"),
        "tuning": tuning,
        "events": events,
    }


def _run_script(script: dict, config: SessionConfig) -> Session:
    session = Session(config)
    if script["mode"] == "equivariant":
        replies = session.handle(
            {"type": "mode", "equivariant": True, "group": script["group"]}
        )
        for reply in replies:
            if reply["type"] == "error":
                raise ValueError(f"mode: {reply['reason']}")
    if script["mode"] == "universal":
        session.patch.apply_tuning_script(script["tuning"])
    else:
        for index, edge_id in enumerate(script["tuning"]):
            try:
                session.quotient.flip(edge_id)
            except (ValueError, ArithmeticError, TypeError) as exc:
                raise ValueError(f"tuning step {index}: {exc}") from exc
    for index, message in enumerate(script["events"]):
        for reply in session.handle(message):
            if reply["type"] == "error":
                raise ValueError(f"event {index}: {reply['reason']}")
    return session


def _score_summary(session: Session) -> tuple[list[str], dict]:
    score = session.score()
    duration = max((e.t + e.dur for e in score.events), default=0.0)
    lines = [
        f"notes: {len(score.events)}",
        f"duration: {duration:.3f} s",
    ]
    doc = {
        "notes": len(score.events),
        "duration": duration,
        "digest": session.state_digest(),
        "score": [e.to_json() for e in score.events],
    }
    return lines, doc


def _cmd_script_run(args) -> int:
    config = _config(args)
    script = _load_script(args.file)
    session = _run_script(script, config)
    lines, doc = _score_summary(session)
    lines.insert(0, f"events: {len(script['events'])}")
    doc["events"] = len(script["events"])
    if args.wav:
        blob = session.render_wav()
        with open(args.wav, "wb") as handle:
            handle.write(blob)
        lines.append(f"wrote {args.wav} ({len(blob)} bytes)")
        doc["wav"] = args.wav
    _emit(args, lines, doc)
    return 0


def _cmd_melody_compile(args) -> int:
    with open(args.file, encoding="utf-8") as handle:
        doc = json.load(handle)
    if not isinstance(doc, list) or not all(
        isinstance(m, int) and not isinstance(m, bool) for m in doc
    ):
        raise ValueError("melody file must be a JSON list of integers")
    tuning, taps = compile_melody(doc)
    script = {"mode": "universal", "tuning": tuning, "events": taps}
    if args.json:
        print(json.dumps(script, sort_keys=True))
    else:
        print(json.dumps(script, indent=2))
    return 0


# ---------------------------------------------------------------- arpeggio

def _cmd_arpeggio(args) -> int:
    config = _config(args)
    if args.tempo <= 0:
        raise ValueError(f"--tempo must be positive, got {args.tempo}")
    if args.window < 0:
        raise ValueError(f"--window must be nonnegative, got {args.window}")
    center = ExtendedRational.parse(args.center)
    patch = new_patch()
    score = arpeggio(
        patch,
        center,
        args.window,
        1.0 / args.tempo,
        n_shift=config.n_shift,
        tempering=config.tempering_object(),
    )
    lines = [f"{e.t:.3f}s {e.freq:.3f}Hz" for e in score.events]
    doc = {
        "center": str(center),
        "window": args.window,
        "tempo": args.tempo,
        "events": [e.to_json() for e in score.events],
    }
    if args.wav:
        blob = render_wav(score, config.synth())
        with open(args.wav, "wb") as handle:
            handle.write(blob)
        lines.append(f"wrote {args.wav} ({len(blob)} bytes)")
        doc["wav"] = args.wav
    _emit(args, lines, doc)
    return 0


# ---------------------------------------------------------------- viewport

def _cmd_viewport(args) -> int:
    if args.gen < 0:
        raise ValueError(f"--gen must be nonnegative, got {args.gen}")
    patch = new_patch()
    if args.format == "svg":
        print(viewport_svg(patch, args.gen))
    else:
        print(json.dumps(viewport_json(patch, args.gen), sort_keys=True))
    return 0


# ------------------------------------------------------------------- serve

def _cmd_serve(args) -> int:
    config = _config(args)
    try:
        serve(args.port, config=config)
    except KeyboardInterrupt:
        pass
    return 0


# ------------------------------------------------------------------ parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horomonica",
        description="Farey tessellation instrument: chords, surfaces, audio.",
    )
    parser.add_argument(
        "--json", action="store_true", help="machine readable JSON on stdout"
    )
    parser.add_argument(
        "--config",
        metavar="PATH",
        default=None,
        help="session config file (default: $HOROMONICA_CONFIG if set)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    chord = sub.add_parser("chord", help="triangular chord queries")
    chord_sub = chord.add_subparsers(dest="subcommand", required=True)
    check = chord_sub.add_parser("check", help="test whether a triple is a chord")
    check.add_argument("triple", nargs=3, type=int, metavar="N")
    check.set_defaults(func=_cmd_chord_check)
    realize = chord_sub.add_parser("realize", help="ideal triangle realizing a chord")
    realize.add_argument("triple", nargs=3, type=int, metavar="N")
    realize.set_defaults(func=_cmd_chord_realize)
    sweep = chord_sub.add_parser("sweep", help="all chords with entries up to a bound")
    sweep.add_argument("--max", dest="bound", type=int, required=True)
    sweep.set_defaults(func=_cmd_chord_sweep)

    markoff = sub.add_parser("markoff", help="Markoff triples within a flip depth")
    markoff.add_argument("--depth", type=int, required=True)
    markoff.set_defaults(func=_cmd_markoff)

    surface = sub.add_parser("surface", help="surface group catalog")
    surface_sub = surface.add_subparsers(dest="subcommand", required=True)
    info = surface_sub.add_parser("info", help="genus, punctures, cell counts")
    info.add_argument("group", help="builtin name or coset table JSON path")
    info.set_defaults(func=_cmd_surface_info)

    script = sub.add_parser("script", help="session script playback")
    script_sub = script.add_subparsers(dest="subcommand", required=True)
    run = script_sub.add_parser("run", help="run a tuning or session script")
    run.add_argument("file")
    run.add_argument("--wav", metavar="PATH", help="render the score to a WAV file")
    run.set_defaults(func=_cmd_script_run)

    melody = sub.add_parser("melody", help="hemitone melody compiler")
    melody_sub = melody.add_subparsers(dest="subcommand", required=True)
    compile_ = melody_sub.add_parser(
        "compile", help="compile a hemitone list into a session script"
    )
    compile_.add_argument("file")
    compile_.set_defaults(func=_cmd_melody_compile)

    arp = sub.add_parser("arpeggio", help="ride a decoration horocycle")
    arp.add_argument("--center", default="1/0", metavar="p/q")
    arp.add_argument("--window", type=float, default=5.0, metavar="L")
    arp.add_argument("--tempo", type=float, default=2.0, metavar="X",
                     help="horocyclic arc length units per second")
    arp.add_argument("--wav", metavar="PATH", help="render the score to a WAV file")
    arp.set_defaults(func=_cmd_arpeggio)

    viewport = sub.add_parser("viewport", help="export the pristine tessellation")
    viewport.add_argument("--gen", type=int, default=2)
    viewport.add_argument("--format", choices=("json", "svg"), default="json")
    viewport.set_defaults(func=_cmd_viewport)

    server = sub.add_parser("serve", help="NDJSON session server")
    server.add_argument("--port", type=int, required=True)
    server.set_defaults(func=_cmd_serve)

    return parser


def run_command(argv=None) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError, OverflowError) as exc:
        if args.json:
            print(json.dumps({"error": str(exc)}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
