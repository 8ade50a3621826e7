"""Record protocol fixtures for the UI tests from a live backend session.

Run from the repository root after installing the Python package:

    python3 frontend/scripts/record_fixtures.py

Every JSON file written here is verbatim server output; the UI tests
treat them as ground truth so that no displayed number is invented
client side.
"""

import json
from pathlib import Path

from horomonica.session import Session, SessionConfig

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def must(replies):
    assert all(r["type"] != "error" for r in replies), replies
    return replies


def write(name, doc):
    path = OUT / name
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print("wrote", path.name)


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    s = Session()
    (tess,) = must(s.handle({"type": "viewport", "gen": 1}))
    write("universal_gen1.json", tess)

    flip_tess, flip_tone = must(s.handle({"type": "pedal_tap", "edge": ["0/1", "1/0"]}))
    write("flip_gen1.json", {"tessellation": flip_tess, "tone": flip_tone})

    s2 = Session()
    (eq,) = must(s2.handle({"type": "mode", "equivariant": True, "group": "commutator"}))
    write("equivariant_commutator.json", eq)

    # A fan deep enough that one edge carries lambda 48, whose served tone
    # is exactly 440 Hz under the default equal tempering.
    s3 = Session()
    for k in range(1, 48):
        must(s3.handle({"type": "pedal_tap", "edge": ["0/1", f"1/{k}"]}))
    (a4,) = must(s3.handle({"type": "tap", "edge": ["1/48", "1/0"]}))
    assert a4["freq"] == 440.0, a4
    write("tone_a4.json", a4)

    s4 = Session()
    must(s4.handle({"type": "pedal_tap", "edge": ["0/1", "1/1"]}))
    chord = must(s4.handle({"type": "triangle_tap", "vertices": ["1/2", "1/1", "1/0"]}))
    write("chord_tones.json", chord)

    (start,) = must(s4.handle({"type": "hold_start", "edge": ["0/1", "1/2"], "d": 0.0}))
    (move,) = must(s4.handle({"type": "hold_move", "hold_id": start["hold_id"], "d": 0.824}))
    (stop,) = must(s4.handle({"type": "hold_stop", "hold_id": start["hold_id"]}))
    write("hold_tones.json", [start, move, stop])

    # Untuned session: pre-flip taps sound the open string at 27.5 Hz, so
    # the fallback label pairs a served frequency with the edge's lambda.
    s5 = Session(SessionConfig(untuned=True))
    (vp,) = must(s5.handle({"type": "viewport", "gen": 1}))
    (tone,) = must(s5.handle({"type": "tap", "edge": ["0/1", "1/0"]}))
    assert tone["freq"] == 27.5, tone
    write("untuned_tap.json", {"viewport": vp, "tone": tone})


if __name__ == "__main__":
    main()
