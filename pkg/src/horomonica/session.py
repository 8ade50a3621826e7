"""Interactive instrument sessions and the newline-delimited JSON protocol.

A session is a deterministic state machine: client messages mutate the
tessellation (universal mode) or the quotient triangulation (equivariant
mode), produce tone and tessellation responses, and append to a replayable
log.  Timestamps come from a logical clock that advances a fixed amount per
sound-producing message, so a finished log renders to bit-identical audio.
"""

from __future__ import annotations

import hashlib
import json
import os
import socketserver
from dataclasses import dataclass

from .audio import (
    EQUAL,
    A0_HZ,
    NoteEvent,
    Score,
    SynthConfig,
    Tempering,
    freq_of_lambda,
    hold_frequency,
    pythagorean,
    render_wav,
)
from .farey import ExtendedRational, geodesic_arc
from .surfaces import (
    QuotientTriangulation,
    builtin_group,
    classify,
    develop,
    load_coset_table,
)
from .tessellation import EdgeKey, TriangleKey, new_patch, viewport_json

__all__ = [
    "SessionConfig",
    "Session",
    "save_session",
    "load_session",
    "make_server",
    "serve",
    "CONFIG_ENV",
]

CONFIG_ENV = "HOROMONICA_CONFIG"

TAP_SECONDS = 0.3
LIFT_DEPTH = 2
LIFT_COLLAR = 2


@dataclass(frozen=True)
class SessionConfig:
    """Session-wide knobs; loadable from the file named by HOROMONICA_CONFIG."""

    tempering: str = "equal"
    root: int = 0
    n_shift: int = 4
    untuned: bool = False
    seconds_per_event: float = 0.5
    sample_rate: int = 44100
    waveforms: tuple[str, ...] = ("sine",)

    def tempering_object(self) -> Tempering:
        if self.tempering == "equal":
            return EQUAL
        if self.tempering == "pythagorean":
            return pythagorean(self.root)
        raise ValueError(f"unknown tempering {self.tempering!r}")

    def synth(self) -> SynthConfig:
        return SynthConfig(
            sample_rate=self.sample_rate, waveforms=tuple(self.waveforms)
        )

    def to_json(self) -> dict:
        return {
            "tempering": self.tempering,
            "root": self.root,
            "n_shift": self.n_shift,
            "untuned": self.untuned,
            "seconds_per_event": self.seconds_per_event,
            "sample_rate": self.sample_rate,
            "waveforms": list(self.waveforms),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SessionConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        kwargs = dict(doc)
        if "waveforms" in kwargs:
            kwargs["waveforms"] = tuple(kwargs["waveforms"])
        cfg = cls(**kwargs)
        cfg.tempering_object()
        cfg.synth()
        return cfg

    @classmethod
    def load(cls, path: str | None = None) -> "SessionConfig":
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        with open(path, encoding="utf-8") as handle:
            return cls.from_json(json.load(handle))


def _arc_json(a: ExtendedRational, b: ExtendedRational) -> dict:
    """Disk geometry of the geodesic {a, b}, in the viewport arc schema."""
    arc = geodesic_arc(a, b)
    doc = {
        "kind": arc.kind,
        "start": [arc.start.x, arc.start.y],
        "end": [arc.end.x, arc.end.y],
    }
    if arc.kind == "arc":
        doc["center"] = [arc.center.x, arc.center.y]
        doc["radius"] = arc.radius
    return doc


def _parse_edge(value) -> EdgeKey:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(s, str) for s in value)
    ):
        raise ValueError("edge must be a pair of rational strings")
    return EdgeKey.of(ExtendedRational.parse(value[0]), ExtendedRational.parse(value[1]))


class ProtocolError(ValueError):
    pass


class Session:
    """One instrument: mode, geometric state, logical clock, log, score."""

    def __init__(self, config: SessionConfig | None = None):
        self.config = config or SessionConfig()
        self.mode = "universal"
        self.group: str | None = None
        self.patch = new_patch()
        self.quotient: QuotientTriangulation | None = None
        self.log: list[dict] = []
        self.clock = 0.0
        self.events: list[NoteEvent] = []
        self.viewport_gen = 2
        self._holds: dict[int, dict] = {}
        self._next_hold = 0

    # ------------------------------------------------------------- helpers

    def state_digest(self) -> str:
        if self.mode == "universal":
            doc = {
                "mode": "universal",
                "removed": sorted(e.to_json() for e in self.patch.removed),
                "added": sorted(e.to_json() for e in self.patch.added),
            }
        else:
            q = self.quotient
            doc = {
                "mode": "equivariant",
                "group": self.group,
                "phi": q.phi,
                "lambdas": sorted(q.lambdas.items()),
                "parity": sorted(q._parity.items()),
            }
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def score(self) -> Score:
        meta = {
            "kind": "session",
            "mode": self.mode,
            "tempering": self.config.tempering,
            "n_shift": self.config.n_shift,
        }
        if self.group:
            meta["group"] = self.group
        return Score(list(self.events), meta)

    def render_wav(self) -> bytes:
        return render_wav(self.score(), self.config.synth())

    def _tempering(self) -> Tempering:
        return self.config.tempering_object()

    def _never_tuned(self) -> bool:
        if self.mode == "universal":
            return not self.patch.history
        return not self.quotient.history

    def _tone_frequency(self, lam: int) -> float:
        if self.config.untuned and self._never_tuned():
            return A0_HZ
        return freq_of_lambda(lam, self.config.n_shift, self._tempering())

    def _tessellation_response(self) -> dict:
        if self.mode == "universal":
            doc = viewport_json(self.patch, self.viewport_gen)
            return {"type": "tessellation", **doc}
        q = self.quotient
        lifted = develop(q, LIFT_DEPTH, collar=LIFT_COLLAR)
        edges = [{"edge_id": e, "lambda": q.lambda_of(e)} for e in q.edges()]
        triangles = []
        for face in q.faces():
            triangles.append(
                {
                    "tri_id": face[0],
                    "darts": list(face),
                    "chord": list(q.chord_of_face(face)),
                }
            )
        lift_edges = [
            {
                "a": str(ek.a),
                "b": str(ek.b),
                "lambda": q.lambda_of(q.edge_id(lifted.edge_labels[ek])),
                "edge_id": q.edge_id(lifted.edge_labels[ek]),
                "arc": _arc_json(ek.a, ek.b),
            }
            for ek in lifted.consistent_edges
        ]
        return {
            "type": "tessellation",
            "group": self.group,
            "edges": edges,
            "triangles": triangles,
            "lift": {"depth": LIFT_DEPTH, "edges": lift_edges},
        }

    def _tone(self, freq: float, dur: float = TAP_SECONDS, ch: int = 0) -> dict:
        self.events.append(NoteEvent(self.clock, dur, freq, 1.0, ch))
        return {"type": "tone", "freq": freq, "dur": dur, "ch": ch, "t": self.clock}

    # ------------------------------------------------------------ addressing

    def _edge_lambda(self, msg: dict) -> int:
        """Resolve the mode-appropriate edge address to its lambda."""
        if self.mode == "universal":
            if "edge" not in msg:
                if "edge_id" in msg:
                    raise ProtocolError("edge ids address equivariant sessions only")
                raise ProtocolError("missing edge")
            ek = _parse_edge(msg["edge"])
            return self.patch.lambda_of(ek)
        if "edge_id" not in msg:
            if "edge" in msg:
                raise ProtocolError("endpoint pairs address universal sessions only")
            raise ProtocolError("missing edge_id")
        e = msg["edge_id"]
        if not isinstance(e, int) or isinstance(e, bool):
            raise ProtocolError("edge_id must be an integer")
        return self.quotient.lambda_of(e)

    # -------------------------------------------------------------- handling

    def handle(self, msg) -> list[dict]:
        """Process one client message; returns the server responses.

        Errors never change state and are not logged; every response
        carries the session mode.
        """
        try:
            if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
                raise ProtocolError("message must be an object with a type")
            handler = getattr(self, "_on_" + msg["type"], None)
            if handler is None:
                raise ProtocolError(f"unknown message type {msg['type']!r}")
            responses = handler(msg)
        except (ProtocolError, ValueError, ArithmeticError, OSError) as exc:
            return [{"type": "error", "reason": str(exc), "mode": self.mode}]
        self.log.append(msg)
        for r in responses:
            r.setdefault("mode", self.mode)
        return responses

    def _advance(self):
        self.clock += self.config.seconds_per_event

    def _on_hello(self, msg: dict) -> list[dict]:
        if msg.get("version") != 1:
            raise ProtocolError("unsupported protocol version")
        return [{"type": "hello", "version": 1}]

    def _on_mode(self, msg: dict) -> list[dict]:
        if not isinstance(msg.get("equivariant"), bool):
            raise ProtocolError("mode needs a boolean 'equivariant'")
        if self._holds:
            raise ProtocolError("stop active holds before switching modes")
        if msg["equivariant"]:
            name = msg.get("group", "commutator")
            try:
                table = load_coset_table(name)
            except FileNotFoundError:
                # Not a file; builtin_group rejects the name with the catalog.
                table = builtin_group(name)
            quotient = QuotientTriangulation(table)
            self.mode = "equivariant"
            self.group = table.name or str(name)
            self.quotient = quotient
            self.patch = new_patch()
        else:
            self.mode = "universal"
            self.group = None
            self.quotient = None
            self.patch = new_patch()
        return [self._tessellation_response()]

    def _on_viewport(self, msg: dict) -> list[dict]:
        gen = msg.get("gen", self.viewport_gen)
        if not isinstance(gen, int) or isinstance(gen, bool) or gen < 0:
            raise ProtocolError("gen must be a non-negative integer")
        self.viewport_gen = gen
        return [self._tessellation_response()]

    def _on_tap(self, msg: dict) -> list[dict]:
        lam = self._edge_lambda(msg)
        out = [self._tone(self._tone_frequency(lam))]
        self._advance()
        return out

    def _on_pedal_tap(self, msg: dict) -> list[dict]:
        if self.mode == "universal":
            if "edge" not in msg:
                raise ProtocolError(
                    "edge ids address equivariant sessions only"
                    if "edge_id" in msg
                    else "missing edge"
                )
            ek = _parse_edge(msg["edge"])
            if not self.patch.contains_edge(ek):
                raise ProtocolError(f"edge {ek} is not in the tessellation")
            new_lam = self.patch.flip(ek).lam_f
        else:
            if "edge_id" not in msg:
                raise ProtocolError(
                    "endpoint pairs address universal sessions only"
                    if "edge" in msg
                    else "missing edge_id"
                )
            e = msg["edge_id"]
            if not isinstance(e, int) or isinstance(e, bool):
                raise ProtocolError("edge_id must be an integer")
            new_lam = self.quotient.flip(e)
        out = [self._tessellation_response(), self._tone(self._tone_frequency(new_lam))]
        self._advance()
        return out

    def _on_triangle_tap(self, msg: dict) -> list[dict]:
        if self.mode == "universal":
            verts = msg.get("vertices")
            if (
                not isinstance(verts, (list, tuple))
                or len(verts) != 3
                or not all(isinstance(v, str) for v in verts)
            ):
                raise ProtocolError("vertices must be three rational strings")
            tri = TriangleKey.of(*(ExtendedRational.parse(v) for v in verts))
            if tri not in self.patch._triangles:
                raise ProtocolError(f"{tri} is not a face of the tessellation")
            chord = tuple(sorted(self.patch.lambda_of(e) for e in tri.edges()))
        else:
            dart = msg.get("tri_id")
            if not isinstance(dart, int) or isinstance(dart, bool):
                raise ProtocolError("tri_id must be an integer dart")
            if not 0 <= dart < self.quotient.n:
                raise ProtocolError(f"no dart {dart}")
            chord = self.quotient.chord_of_face(self.quotient.face_of(dart))
        out = [
            self._tone(self._tone_frequency(lam), ch=ch)
            for ch, lam in enumerate(chord)
        ]
        self._advance()
        return out

    def _on_hold_start(self, msg: dict) -> list[dict]:
        lam = self._edge_lambda(msg)
        d = msg.get("d", 0.0)
        if not isinstance(d, (int, float)) or isinstance(d, bool):
            raise ProtocolError("d must be a number")
        freq = hold_frequency(lam, float(d), self.config.n_shift, self._tempering())
        hold_id = self._next_hold
        self._next_hold += 1
        self._holds[hold_id] = {"lam": lam, "freq": freq, "since": self.clock}
        response = {
            "type": "tone_start",
            "hold_id": hold_id,
            "freq": freq,
            "ch": 0,
            "t": self.clock,
        }
        self._advance()
        return [response]

    def _require_hold(self, msg: dict) -> tuple[int, dict]:
        hold_id = msg.get("hold_id")
        if hold_id not in self._holds:
            raise ProtocolError(f"no active hold {hold_id!r}")
        return hold_id, self._holds[hold_id]

    def _flush_hold_segment(self, hold: dict):
        dur = self.clock - hold["since"]
        if dur > 0:
            self.events.append(NoteEvent(hold["since"], dur, hold["freq"], 1.0, 0))

    def _on_hold_move(self, msg: dict) -> list[dict]:
        hold_id, hold = self._require_hold(msg)
        d = msg.get("d")
        if not isinstance(d, (int, float)) or isinstance(d, bool):
            raise ProtocolError("d must be a number")
        freq = hold_frequency(
            hold["lam"], float(d), self.config.n_shift, self._tempering()
        )
        self._flush_hold_segment(hold)
        hold["freq"] = freq
        hold["since"] = self.clock
        response = {
            "type": "tone_start",
            "hold_id": hold_id,
            "freq": freq,
            "ch": 0,
            "t": self.clock,
        }
        self._advance()
        return [response]

    def _on_hold_stop(self, msg: dict) -> list[dict]:
        hold_id, hold = self._require_hold(msg)
        self._flush_hold_segment(hold)
        del self._holds[hold_id]
        response = {"type": "tone_stop", "hold_id": hold_id, "t": self.clock}
        self._advance()
        return [response]


# ------------------------------------------------------------- persistence

def _log_digest(config: SessionConfig, log: list[dict]) -> str:
    blob = json.dumps(
        {"config": config.to_json(), "log": log},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def save_session(session: Session, path: str) -> None:
    doc = {
        "version": 1,
        "config": session.config.to_json(),
        "log": session.log,
        "digest": _log_digest(session.config, session.log),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=1)
        handle.write("\n")


def replay_session(config: SessionConfig, log: list[dict]) -> Session:
    """Feed a log through a fresh session; any error entry is a hard fault."""
    session = Session(config)
    for index, msg in enumerate(log):
        responses = session.handle(msg)
        for r in responses:
            if r["type"] == "error":
                raise ValueError(f"log entry {index}: {r['reason']}")
    return session


def load_session(path: str) -> Session:
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    for key in ("version", "config", "log", "digest"):
        if key not in doc:
            raise ValueError(f"session file missing field {key!r}")
    if doc["version"] != 1:
        raise ValueError(f"unsupported session version {doc['version']!r}")
    config = SessionConfig.from_json(doc["config"])
    if _log_digest(config, doc["log"]) != doc["digest"]:
        raise ValueError("digest mismatch: session log was modified")
    return replay_session(config, doc["log"])


# ------------------------------------------------------------------ server

class _SessionHandler(socketserver.StreamRequestHandler):
    def handle(self):
        session = Session(self.server.session_config)
        for raw in self.rfile:
            line = raw.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as exc:
                responses = [
                    {"type": "error", "reason": f"bad JSON: {exc}", "mode": session.mode}
                ]
            else:
                responses = session.handle(msg)
            for r in responses:
                self.wfile.write(json.dumps(r).encode() + b"\n")
            self.wfile.flush()


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def make_server(
    host: str = "127.0.0.1", port: int = 0, config: SessionConfig | None = None
) -> socketserver.TCPServer:
    """Newline-delimited JSON server; one independent session per connection."""
    server = _Server((host, port), _SessionHandler)
    server.session_config = config or SessionConfig()
    return server


def serve(port: int, host: str = "127.0.0.1", config: SessionConfig | None = None):
    with make_server(host, port, config) as server:
        bound_host, bound_port = server.server_address[:2]
        print(f"listening on {bound_host}:{bound_port}", flush=True)
        server.serve_forever()
