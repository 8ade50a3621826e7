"""Equivariant flips on the once punctured torus trace out Markoff triples.

Every flip of the three edge orbits keeps the lambda triple (x, y, z) on
the surface x^2 + y^2 + z^2 = 3xyz; this script walks the first few levels
of that tree and sounds one branch as a rising chord sequence.
"""

from horomonica import (
    SessionConfig,
    Session,
    builtin_group,
    markoff_tree,
    quotient_triangulation,
)


def triple(q):
    return tuple(sorted(q.lambdas[e] for e in q.edges()))


def main():
    q = quotient_triangulation(builtin_group("commutator"))
    print("start:", triple(q))

    print("\nfour levels of the flip tree:")
    level = {triple(q): q}
    for depth in range(1, 5):
        nxt = {}
        for state in level.values():
            for e in state.edges():
                child = state.copy()
                child.flip(e)
                nxt[triple(child)] = child
        level = nxt
        print(f"  depth {depth}:", sorted(level))

    reachable = set()
    frontier = [quotient_triangulation(builtin_group("commutator"))]
    reachable.add(triple(frontier[0]))
    for _ in range(4):
        nxt = []
        for state in frontier:
            for e in state.edges():
                child = state.copy()
                child.flip(e)
                reachable.add(triple(child))
                nxt.append(child)
        frontier = nxt
    assert reachable == markoff_tree(4)
    print("\nreachable in <= 4 flips matches the Markoff tree:", len(reachable), "triples")

    # Lambda lengths grow doubly exponentially along a branch, so three
    # flips already span two octaves; a fourth would leave audible range.
    session = Session(SessionConfig())
    session.handle({"type": "mode", "equivariant": True, "group": "commutator"})
    for edge_id in (0, 1, 2):
        for reply in session.handle({"type": "pedal_tap", "edge_id": edge_id}):
            if reply["type"] == "tone":
                print(f"  flip {edge_id}: tone {reply['freq']:8.2f} Hz at t={reply['t']}")
    with open("markoff_walk.wav", "wb") as fh:
        fh.write(session.render_wav())
    print("wrote markoff_walk.wav")


if __name__ == "__main__":
    main()
