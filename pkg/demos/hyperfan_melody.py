"""Compile a hemitone melody onto the hyperfan and render it to WAV.

Serial flips along {0/1, 1/k} open a fan of triangles at 1/0 whose k-th
edge carries lambda k, so a melody in hemitone steps becomes a list of
taps on fan edges.  The same fan realizes every chord {1, k, k+1}.
"""

from horomonica import (
    EdgeKey,
    ExtendedRational,
    INFINITY,
    Session,
    TriangleKey,
    compile_melody,
    new_patch,
)

ODE_TO_JOY = [5, 5, 6, 8, 8, 6, 5, 3, 1, 1, 3, 5, 5, 3, 3]


def main():
    tuning, taps = compile_melody(ODE_TO_JOY)
    print(f"melody of {len(taps)} notes needs {len(tuning)} tuning flips")

    patch = new_patch()
    patch.apply_tuning_script(tuning)
    top = max(ODE_TO_JOY)
    for k in range(1, top):
        tri = TriangleKey.of(
            ExtendedRational(1, k + 1), ExtendedRational(1, k), INFINITY
        )
        print(f"  fan triangle {k}: chord {patch.triangle_chord(tri)}")
    for k in range(1, top + 1):
        e = EdgeKey.of(ExtendedRational(1, k), INFINITY)
        assert patch.lambda_of(e) == k

    session = Session()
    session.patch.apply_tuning_script(tuning)
    for tap in taps:
        replies = session.handle(tap)
        assert all(r["type"] != "error" for r in replies)
    score = session.score()
    print(f"score: {len(score.events)} notes,",
          f"{max(e.t + e.dur for e in score.events):.1f} s")
    with open("hyperfan_melody.wav", "wb") as fh:
        fh.write(session.render_wav())
    print("wrote hyperfan_melody.wav")


if __name__ == "__main__":
    main()
