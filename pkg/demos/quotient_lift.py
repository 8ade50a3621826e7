"""Tune a quotient surface, develop it back to the disk, and arpeggiate.

A coset table for a finite index subgroup folds the Farey tessellation
onto a punctured surface; flips there move whole edge orbits at once.
Developing the quotient unrolls the tuned triangulation around the base
triangle, and the cusp horocycle gives an arpeggio of the local lambdas.
"""

from horomonica import (
    arpeggio,
    builtin_group,
    classify,
    develop,
    quotient_triangulation,
)


def main():
    for name in ("commutator", "gamma2", "gamma3"):
        table = builtin_group(name)
        surface = classify(table)
        print(f"{name}: genus {surface.genus}, {surface.punctures} punctures,",
              f"{table.n // 2} edges, {table.n // 3} triangles")

    q = quotient_triangulation(builtin_group("commutator"))
    for e in (0, 1, 2):
        lam = q.flip(e)
        print(f"flip orbit {e}: new lambda {lam}")
    print("lambda table:", dict(sorted(q.lambdas.items())))

    lifted = develop(q, depth=3)
    print(f"developed lift: {len(lifted.consistent_edges)} consistent edges,",
          f"{len(lifted.core_edges)} in the depth-3 core")
    sample = sorted(lifted.core_edges)[:4]
    for ek in sample:
        dart = lifted.edge_labels[ek]
        print(f"  {ek} lifts dart {dart} (lambda {q.lambda_of(q.edge_id(dart))})")

    length = q.cusp_horocycle_length(0)
    print("cusp horocycle length:", length)
    score = arpeggio(q, 0, float(length), seconds_per_unit=0.5)
    print("one lap of the cusp:",
          [f"{e.t:.2f}s/{e.freq:.1f}Hz" for e in score.events])


if __name__ == "__main__":
    main()
