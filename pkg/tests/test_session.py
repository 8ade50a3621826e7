"""Session state machine, wire protocol, persistence, and the NDJSON server."""

import json
import socket
import threading

import pytest

from horomonica.audio import A0_HZ, EQUAL, freq_of_lambda, hold_frequency, pythagorean
from horomonica.session import (
    CONFIG_ENV,
    Session,
    SessionConfig,
    load_session,
    make_server,
    replay_session,
    save_session,
)

REL_TOL = 1e-9

LAM1 = freq_of_lambda(1)
LAM2 = freq_of_lambda(2)


def ok(responses):
    """Assert no error response and return the list unchanged."""
    assert all(r["type"] != "error" for r in responses), responses
    return responses


def err(responses):
    """Assert a single error response and return its reason."""
    assert len(responses) == 1 and responses[0]["type"] == "error", responses
    return responses[0]["reason"]


def equivariant_session(group="commutator", config=None):
    s = Session(config)
    ok(s.handle({"type": "mode", "equivariant": True, "group": group}))
    return s


# ---------------------------------------------------------------- config

def test_config_roundtrip():
    cfg = SessionConfig(tempering="pythagorean", root=3, n_shift=2, untuned=True)
    assert SessionConfig.from_json(cfg.to_json()) == cfg


def test_config_rejects_unknown_keys():
    doc = SessionConfig().to_json()
    doc["volume"] = 11
    with pytest.raises(ValueError, match="volume"):
        SessionConfig.from_json(doc)


def test_config_rejects_bad_tempering():
    with pytest.raises(ValueError, match="tempering"):
        SessionConfig.from_json({"tempering": "meantone"})


def test_config_load_from_env(tmp_path, monkeypatch):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"tempering": "pythagorean", "root": 2}))
    monkeypatch.setenv(CONFIG_ENV, str(path))
    cfg = SessionConfig.load()
    assert cfg.tempering == "pythagorean" and cfg.root == 2


def test_config_load_default_without_env(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    assert SessionConfig.load() == SessionConfig()


# ----------------------------------------------------------------- hello

def test_hello_acknowledged_with_mode():
    s = Session()
    (r,) = ok(s.handle({"type": "hello", "version": 1}))
    assert r == {"type": "hello", "version": 1, "mode": "universal"}


def test_hello_rejects_other_versions():
    assert "version" in err(Session().handle({"type": "hello", "version": 2}))


def test_unknown_message_type_rejected():
    assert "unknown" in err(Session().handle({"type": "warp"}))
    assert Session().handle(["not", "an", "object"])[0]["type"] == "error"


# ------------------------------------------------------------------ taps

def test_pedal_tap_on_fresh_universal_session():
    s = Session()
    tess, tone = ok(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))
    assert tess["type"] == "tessellation"
    assert tone["type"] == "tone"
    assert tone["freq"] == pytest.approx(LAM2, rel=REL_TOL)
    assert tone["t"] == 0.0
    assert tone["mode"] == "universal"


def test_untuned_tap_sounds_the_anchor_burst():
    s = Session(SessionConfig(untuned=True))
    (tone,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert tone["freq"] == A0_HZ
    ok(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))
    (tone,) = ok(s.handle({"type": "tap", "edge": ["1/1", "-1/1"]}))
    assert tone["freq"] == pytest.approx(LAM2, rel=REL_TOL)


def test_tap_uses_lambda_frequency_by_default():
    s = Session()
    (tone,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert tone["freq"] == pytest.approx(LAM1, rel=REL_TOL)


def test_equivariant_pedal_tap_sounds_the_new_lambda():
    s = equivariant_session()
    tess, tone = ok(s.handle({"type": "pedal_tap", "edge_id": 0}))
    assert tone["freq"] == pytest.approx(LAM2, rel=REL_TOL)
    assert tess["type"] == "tessellation"
    assert tone["mode"] == "equivariant"


def test_tap_on_missing_edge_is_an_error():
    s = Session()
    assert "not in the tessellation" in err(
        s.handle({"type": "pedal_tap", "edge": ["0/1", "2/1"]})
    )


def test_pythagorean_config_shapes_tap_frequency():
    cfg = SessionConfig(tempering="pythagorean", root=0)
    s = Session(cfg)
    ok(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))
    (tone,) = ok(s.handle({"type": "tap", "edge": ["1/1", "-1/1"]}))
    assert tone["freq"] == pytest.approx(
        freq_of_lambda(2, tempering=pythagorean(0)), rel=REL_TOL
    )


# ----------------------------------------------------------- mode safety

def test_mode_switch_returns_quotient_tessellation():
    s = Session()
    (tess,) = ok(s.handle({"type": "mode", "equivariant": True, "group": "commutator"}))
    assert tess["type"] == "tessellation"
    assert [e["edge_id"] for e in tess["edges"]] == [0, 1, 2]
    assert all(e["lambda"] == 1 for e in tess["edges"])
    assert {t["tri_id"] for t in tess["triangles"]} == {0, 1}
    assert tess["lift"]["edges"], "lift should carry developed edges"
    assert tess["mode"] == "equivariant"


def test_universal_session_rejects_edge_ids():
    s = Session()
    assert "equivariant" in err(s.handle({"type": "tap", "edge_id": 0}))
    assert "equivariant" in err(s.handle({"type": "pedal_tap", "edge_id": 0}))


def test_equivariant_session_rejects_endpoint_pairs():
    s = equivariant_session()
    assert "universal" in err(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert "universal" in err(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))


def test_mode_needs_boolean_flag():
    assert "boolean" in err(Session().handle({"type": "mode", "equivariant": 1}))


def test_mode_rejects_unknown_group():
    assert "unknown group" in err(
        Session().handle({"type": "mode", "equivariant": True, "group": "nope"})
    )


def test_switching_back_to_universal_resets_the_patch():
    s = equivariant_session()
    ok(s.handle({"type": "pedal_tap", "edge_id": 0}))
    ok(s.handle({"type": "mode", "equivariant": False}))
    assert s.mode == "universal"
    assert not s.patch.history
    (tone,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert tone["freq"] == pytest.approx(LAM1, rel=REL_TOL)


# ------------------------------------------------- errors preserve state

def test_error_responses_leave_state_and_log_unchanged():
    s = Session()
    ok(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))
    digest = s.state_digest()
    log_len = len(s.log)
    clock = s.clock
    err(s.handle({"type": "pedal_tap", "edge": ["0/1", "3/1"]}))
    err(s.handle({"type": "tap", "edge_id": 4}))
    err(s.handle({"type": "nonsense"}))
    assert s.state_digest() == digest
    assert len(s.log) == log_len
    assert s.clock == clock


def test_equivariant_error_leaves_state_unchanged():
    s = equivariant_session()
    digest = s.state_digest()
    assert "unknown edge id" in err(s.handle({"type": "pedal_tap", "edge_id": 9}))
    assert s.state_digest() == digest


# ------------------------------------------------------------------ clock

def test_clock_advances_per_sound_event():
    s = Session()
    (t0,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    (t1,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/1"]}))
    assert (t0["t"], t1["t"]) == (0.0, 0.5)
    ok(s.handle({"type": "viewport", "gen": 1}))
    (t2,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert t2["t"] == 1.0, "viewport queries do not advance the clock"


def test_clock_speed_is_configurable():
    s = Session(SessionConfig(seconds_per_event=0.25))
    ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    (tone,) = ok(s.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert tone["t"] == 0.25


# -------------------------------------------------------------- viewport

def test_viewport_returns_geometry():
    s = Session()
    (tess,) = ok(s.handle({"type": "viewport", "gen": 1}))
    assert tess["type"] == "tessellation"
    assert tess["generation"] == 1
    assert len(tess["edges"]) == 5
    for field in ("a", "b", "lambda", "arc", "frets", "orient"):
        assert field in tess["edges"][0]


def test_viewport_gen_is_sticky_for_pedal_taps():
    s = Session()
    ok(s.handle({"type": "viewport", "gen": 1}))
    tess, _ = ok(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/1"]}))
    assert tess["generation"] == 1


def test_viewport_rejects_bad_generation():
    assert "gen" in err(Session().handle({"type": "viewport", "gen": -1}))
    assert "gen" in err(Session().handle({"type": "viewport", "gen": "big"}))
    assert "gen" in err(Session().handle({"type": "viewport", "gen": True}))


# --------------------------------------------------------- triangle taps

def test_triangle_tap_plays_the_chord_on_three_channels():
    s = Session()
    ok(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))
    tones = ok(
        s.handle({"type": "triangle_tap", "vertices": ["0/1", "1/1", "-1/1"]})
    )
    assert [t["ch"] for t in tones] == [0, 1, 2]
    freqs = sorted(t["freq"] for t in tones)
    want = sorted([LAM1, LAM1, LAM2])
    assert freqs == pytest.approx(want, rel=REL_TOL)
    assert len({t["t"] for t in tones}) == 1, "chord tones are simultaneous"


def test_triangle_tap_rejects_non_faces():
    s = Session()
    assert "not a face" in err(
        s.handle({"type": "triangle_tap", "vertices": ["0/1", "1/1", "-1/1"]})
    )
    assert "three rational" in err(
        s.handle({"type": "triangle_tap", "vertices": ["0/1", "1/1"]})
    )


def test_equivariant_triangle_tap_uses_face_ids():
    s = equivariant_session()
    tones = ok(s.handle({"type": "triangle_tap", "tri_id": 0}))
    assert [t["ch"] for t in tones] == [0, 1, 2]
    assert all(t["freq"] == pytest.approx(LAM1, rel=REL_TOL) for t in tones)
    assert "no dart" in err(s.handle({"type": "triangle_tap", "tri_id": 6}))


# ------------------------------------------------------------------ holds

def test_hold_lifecycle_produces_segments():
    s = Session()
    (start,) = ok(s.handle({"type": "hold_start", "edge": ["0/1", "1/0"], "d": 0.0}))
    assert start["type"] == "tone_start"
    assert start["freq"] == pytest.approx(hold_frequency(1, 0.0), rel=REL_TOL)
    hold_id = start["hold_id"]
    (moved,) = ok(s.handle({"type": "hold_move", "hold_id": hold_id, "d": 0.824}))
    assert moved["type"] == "tone_start"
    assert moved["freq"] == pytest.approx(hold_frequency(1, 0.824), rel=REL_TOL)
    (stop,) = ok(s.handle({"type": "hold_stop", "hold_id": hold_id}))
    assert stop["type"] == "tone_stop" and stop["hold_id"] == hold_id
    segs = [(e.t, e.dur, e.freq) for e in s.events]
    assert segs[0] == pytest.approx((0.0, 0.5, hold_frequency(1, 0.0)), rel=REL_TOL)
    assert segs[1] == pytest.approx((0.5, 0.5, hold_frequency(1, 0.824)), rel=REL_TOL)


def test_hold_ids_are_sequential_and_validated():
    s = Session()
    (a,) = ok(s.handle({"type": "hold_start", "edge": ["0/1", "1/0"]}))
    (b,) = ok(s.handle({"type": "hold_start", "edge": ["0/1", "1/1"]}))
    assert (a["hold_id"], b["hold_id"]) == (0, 1)
    assert "no active hold" in err(s.handle({"type": "hold_stop", "hold_id": 7}))
    assert "no active hold" in err(s.handle({"type": "hold_move", "hold_id": 7, "d": 1}))


def test_hold_move_requires_numeric_distance():
    s = Session()
    (start,) = ok(s.handle({"type": "hold_start", "edge": ["0/1", "1/0"]}))
    reason = err(s.handle({"type": "hold_move", "hold_id": start["hold_id"], "d": "up"}))
    assert "number" in reason


def test_mode_switch_blocked_while_holding():
    s = Session()
    ok(s.handle({"type": "hold_start", "edge": ["0/1", "1/0"]}))
    assert "holds" in err(s.handle({"type": "mode", "equivariant": True}))
    assert s.mode == "universal"


# ------------------------------------------------------------ persistence

def drive(session, messages):
    for msg in messages:
        ok(session.handle(msg))


def session_walk():
    """A session touching every sounding message type plus a mode switch."""
    s = Session()
    drive(
        s,
        [
            {"type": "hello", "version": 1},
            {"type": "viewport", "gen": 1},
            {"type": "pedal_tap", "edge": ["0/1", "1/0"]},
            {"type": "tap", "edge": ["1/1", "-1/1"]},
            {"type": "triangle_tap", "vertices": ["0/1", "1/1", "-1/1"]},
            {"type": "hold_start", "edge": ["0/1", "1/1"], "d": 0.0},
        ],
    )
    (start,) = [r for r in s.handle({"type": "hold_move", "hold_id": 0, "d": 1.0})]
    assert start["type"] == "tone_start"
    drive(s, [{"type": "hold_stop", "hold_id": 0}])
    return s


def test_fresh_session_roundtrip(tmp_path):
    path = tmp_path / "fresh.json"
    s = Session()
    save_session(s, str(path))
    loaded = load_session(str(path))
    assert loaded.state_digest() == s.state_digest()
    assert loaded.log == [] and loaded.clock == 0.0


def test_session_roundtrip_reproduces_state_and_wav(tmp_path):
    s = session_walk()
    path = tmp_path / "walk.json"
    save_session(s, str(path))
    loaded = load_session(str(path))
    assert loaded.state_digest() == s.state_digest()
    assert loaded.log == s.log
    assert loaded.clock == s.clock
    assert [e.to_json() for e in loaded.events] == [e.to_json() for e in s.events]
    assert loaded.render_wav() == s.render_wav()


def test_twenty_flip_roundtrip_preserves_diff_sets(tmp_path):
    s = Session()
    edge = ["0/1", "1/0"]
    for _ in range(20):
        tess, tone = ok(s.handle({"type": "pedal_tap", "edge": edge}))
        flipped = s.patch.history[-1]
        edge = [str(flipped.new_edge.a), str(flipped.new_edge.b)]
    assert len(s.patch.history) == 20
    path = tmp_path / "twenty.json"
    save_session(s, str(path))
    loaded = load_session(str(path))
    assert loaded.patch.removed == s.patch.removed
    assert loaded.patch.added == s.patch.added
    assert loaded.render_wav() == s.render_wav()


def test_equivariant_roundtrip(tmp_path):
    s = equivariant_session("gamma2")
    ids = s.quotient.edges()
    # On the thrice punctured sphere a flip blocks the other two edges, so
    # tune by double flips (which still mark parity) and end on a fresh one.
    for edge_id in (ids[0], ids[0], ids[1], ids[1], ids[2]):
        ok(s.handle({"type": "pedal_tap", "edge_id": edge_id}))
    path = tmp_path / "eq.json"
    save_session(s, str(path))
    loaded = load_session(str(path))
    assert loaded.mode == "equivariant" and loaded.group == "gamma2"
    assert loaded.quotient.lambdas == s.quotient.lambdas
    assert loaded.state_digest() == s.state_digest()


def test_tampered_log_is_rejected(tmp_path):
    s = session_walk()
    path = tmp_path / "walk.json"
    save_session(s, str(path))
    doc = json.loads(path.read_text())
    doc["log"][2]["edge"] = ["0/1", "1/1"]
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="digest mismatch"):
        load_session(str(path))


def test_replay_error_reports_log_position():
    cfg = SessionConfig()
    log = [
        {"type": "tap", "edge": ["0/1", "1/0"]},
        {"type": "pedal_tap", "edge": ["0/1", "5/1"]},
    ]
    with pytest.raises(ValueError, match="log entry 1"):
        replay_session(cfg, log)


def test_load_rejects_missing_fields(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"version": 1, "log": []}))
    with pytest.raises(ValueError, match="config"):
        load_session(str(path))
    path.write_text(json.dumps({"version": 9, "config": {}, "log": [], "digest": "x"}))
    with pytest.raises(ValueError, match="version"):
        load_session(str(path))


def test_replay_determinism_from_log_alone():
    s = session_walk()
    replayed = replay_session(s.config, [dict(m) for m in s.log])
    assert replayed.state_digest() == s.state_digest()
    assert replayed.render_wav() == s.render_wav()


# ---------------------------------------------------------------- server

def rpc(stream, msg):
    stream.write(json.dumps(msg) + "\n")
    stream.flush()
    return json.loads(stream.readline())


def test_ndjson_server_sessions_are_independent():
    server = make_server(port=0)
    host, port = server.server_address
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        with socket.create_connection((host, port), timeout=5) as first:
            f = first.makefile("rw", encoding="utf-8", newline="\n")
            assert rpc(f, {"type": "hello", "version": 1})["type"] == "hello"
            replies = [
                rpc(f, {"type": "pedal_tap", "edge": ["0/1", "1/0"]}),
                json.loads(f.readline()),
            ]
            kinds = {r["type"] for r in replies}
            assert kinds == {"tessellation", "tone"}
        with socket.create_connection((host, port), timeout=5) as second:
            f = second.makefile("rw", encoding="utf-8", newline="\n")
            tone = rpc(f, {"type": "tap", "edge": ["0/1", "1/0"]})
            assert tone["freq"] == pytest.approx(LAM1, rel=REL_TOL)
            assert tone["t"] == 0.0, "second connection starts a fresh session"
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)


def test_ndjson_server_reports_bad_json():
    server = make_server(port=0)
    host, port = server.server_address
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        with socket.create_connection((host, port), timeout=5) as conn:
            f = conn.makefile("rw", encoding="utf-8", newline="\n")
            f.write("{not json}\n")
            f.flush()
            reply = json.loads(f.readline())
            assert reply["type"] == "error"
            tone = rpc(f, {"type": "tap", "edge": ["0/1", "1/0"]})
            assert tone["type"] == "tone", "connection survives bad input"
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)
