"""Punctured-surface quotients of the Farey tessellation.

A finite-index torsion-free subgroup of the modular group is given by the
permutation action of the generators S and T on its cosets.  Cosets label
darts (oriented edge slots) of the quotient ideal triangulation: S reverses
orientation, the composite S after T rotates a triangle, and T initially
rotates around a cusp.  Flips act on the quotient complex directly; a
finite lifted patch in the disk is rebuilt on demand for verification.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .farey import INFINITY, ONE, ZERO, ExtendedRational, lambda_length
from .tessellation import EdgeKey, TessellationPatch, TriangleKey, _between, new_patch, tau_apexes

__all__ = [
    "CosetTable",
    "SurfaceType",
    "QuotientTriangulation",
    "LiftedPatch",
    "builtin_group",
    "load_coset_table",
    "classify",
    "quotient_triangulation",
    "flip_script",
    "develop",
]


def _cycles(perm: tuple[int, ...]) -> list[tuple[int, ...]]:
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        j = perm[start]
        while j != start:
            cycle.append(j)
            seen.add(j)
            j = perm[j]
        out.append(tuple(cycle))
    return out


class CosetTable:
    """Right action of the modular group generators on cosets.

    Validated at construction: both permutations are bijections, the action
    is transitive, S is an involution and S after T has order three, and
    neither has fixed points (torsion-freeness of the subgroup).
    """

    __slots__ = ("n", "perm_S", "perm_T", "name")

    def __init__(self, perm_S, perm_T, name: str | None = None):
        self.perm_S = tuple(int(x) for x in perm_S)
        self.perm_T = tuple(int(x) for x in perm_T)
        self.n = len(self.perm_S)
        self.name = name
        self._validate()

    def _validate(self):
        n = self.n
        if len(self.perm_T) != n:
            raise ValueError("permutations act on different sets")
        for perm, label in ((self.perm_S, "S"), (self.perm_T, "T")):
            if sorted(perm) != list(range(n)):
                raise ValueError(f"perm_{label} is not a permutation of 0..{n - 1}")
        for i in range(n):
            if self.perm_S[self.perm_S[i]] != i:
                raise ValueError("perm_S is not an involution")
            if self.perm_S[i] == i:
                raise ValueError("perm_S has a fixed point (torsion)")
        phi = self.phi
        for i in range(n):
            if phi(phi(phi(i))) != i:
                raise ValueError("S after T does not have order three")
            if phi(i) == i:
                raise ValueError("S after T has a fixed point (torsion)")
        reached = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in (self.perm_S[i], self.perm_T[i]):
                if j not in reached:
                    reached.add(j)
                    frontier.append(j)
        if len(reached) != n:
            raise ValueError("action is not transitive")

    def sigma(self, i: int) -> int:
        return self.perm_S[i]

    def phi(self, i: int) -> int:
        return self.perm_S[self.perm_T[i]]

    def to_json(self) -> dict:
        return {"n": self.n, "S": list(self.perm_S), "T": list(self.perm_T)}

    @classmethod
    def from_json(cls, doc: dict, name: str | None = None) -> "CosetTable":
        if "S" not in doc or "T" not in doc:
            raise ValueError("coset table needs keys 'S' and 'T'")
        table = cls(doc["S"], doc["T"], name=name)
        if "n" in doc and int(doc["n"]) != table.n:
            raise ValueError(f"declared n={doc['n']} but permutations have length {table.n}")
        return table

    def __eq__(self, other):
        return (
            isinstance(other, CosetTable)
            and self.perm_S == other.perm_S
            and self.perm_T == other.perm_T
        )

    def __hash__(self):
        return hash((self.perm_S, self.perm_T))

    def __repr__(self):
        label = self.name or "custom"
        return f"CosetTable({label}, n={self.n})"


# Generated once from the right-regular action of PSL(2, Z/p) on itself
# (p = 2, 3), breadth-first from the identity with S before T, and from the
# abelianization Z/6 for the commutator subgroup.
_BUILTIN = {
    "gamma2": {
        "S": [1, 0, 4, 5, 2, 3],
        "T": [2, 3, 0, 1, 5, 4],
    },
    "commutator": {
        "S": [3, 4, 5, 0, 1, 2],
        "T": [1, 2, 3, 4, 5, 0],
    },
    "gamma3": {
        "S": [1, 0, 4, 6, 2, 9, 3, 8, 7, 5, 11, 10],
        "T": [2, 3, 5, 7, 8, 0, 9, 1, 10, 11, 4, 6],
    },
}


def builtin_group(name: str) -> CosetTable:
    """Catalog of built-in groups: gamma2 and gamma3 are the principal
    congruence subgroups of level 2 and 3, commutator is the commutator
    subgroup (once-punctured torus)."""
    if name not in _BUILTIN:
        known = ", ".join(sorted(_BUILTIN))
        raise ValueError(f"unknown group {name!r} (known: {known})")
    doc = _BUILTIN[name]
    return CosetTable(doc["S"], doc["T"], name=name)


def load_coset_table(source) -> CosetTable:
    """Accepts a builtin name, a JSON dict, or a path to a JSON file."""
    if isinstance(source, CosetTable):
        return source
    if isinstance(source, dict):
        return CosetTable.from_json(source)
    if isinstance(source, str) and source in _BUILTIN:
        return builtin_group(source)
    with open(source, encoding="utf-8") as handle:
        return CosetTable.from_json(json.load(handle))


@dataclass(frozen=True)
class SurfaceType:
    genus: int
    punctures: int


def classify(table: CosetTable) -> SurfaceType:
    """Surface type from orbit counts: punctures are T-cycles, the genus
    comes from the Euler characteristic 2 - 2g - s = -n/6."""
    s = len(_cycles(table.perm_T))
    doubled = 2 - s + table.n // 6
    if table.n % 6 or doubled < 0 or doubled % 2:
        raise ValueError(f"table yields non-integer or negative genus (n={table.n}, s={s})")
    g = doubled // 2
    if 2 * g - 2 + s <= 0:
        raise ValueError("surface must have negative Euler characteristic")
    return SurfaceType(g, s)


class QuotientTriangulation:
    """Ideal triangulation of the quotient surface with integer lambdas.

    Darts are coset indices; sigma pairs the two orientations of an edge
    and never changes; phi rotates each triangle and is rewired by flips.
    Edge ids are the smaller dart of each sigma-pair.
    """

    __slots__ = ("table", "phi", "lambdas", "history", "_parity")

    def __init__(self, table: CosetTable):
        self.table = table
        self.phi = [table.phi(i) for i in range(table.n)]
        self.lambdas = {min(i, table.sigma(i)): 1 for i in range(table.n)}
        self.history: list[int] = []
        # flip orientation alternates per edge so that a double flip
        # restores the labeled state exactly
        self._parity = {e: 0 for e in self.lambdas}

    # ------------------------------------------------------------- queries

    @property
    def n(self) -> int:
        return self.table.n

    def sigma(self, d: int) -> int:
        return self.table.sigma(d)

    def edge_id(self, d: int) -> int:
        return min(d, self.sigma(d))

    def edges(self) -> list[int]:
        return sorted(self.lambdas)

    def lambda_of(self, e: int) -> int:
        if e not in self.lambdas:
            raise ValueError(f"unknown edge id {e}")
        return self.lambdas[e]

    def face_of(self, d: int) -> tuple[int, int, int]:
        """Canonical phi-cycle through dart d, rotated to start at its
        smallest dart."""
        cycle = (d, self.phi[d], self.phi[self.phi[d]])
        k = cycle.index(min(cycle))
        return cycle[k:] + cycle[:k]

    def faces(self) -> list[tuple[int, int, int]]:
        return sorted({self.face_of(d) for d in range(self.n)})

    def cusps(self) -> list[tuple[int, ...]]:
        """Current cusp rotations: cycles of sigma after phi."""
        rho = tuple(self.sigma(self.phi[d]) for d in range(self.n))
        return sorted(_cycles(rho))

    def chord_of_face(self, face: tuple[int, int, int]) -> tuple[int, int, int]:
        k = face.index(min(face))
        if self.face_of(min(face)) != tuple(face[k:] + face[:k]):
            raise ValueError(f"{face} is not a face")
        lams = sorted(self.lambdas[self.edge_id(d)] for d in face)
        return (lams[0], lams[1], lams[2])

    def lambda_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.lambdas.values()))

    def copy(self) -> "QuotientTriangulation":
        dup = QuotientTriangulation(self.table)
        dup.phi = list(self.phi)
        dup.lambdas = dict(self.lambdas)
        dup.history = list(self.history)
        dup._parity = dict(self._parity)
        return dup

    def state(self):
        return (tuple(self.phi), tuple(sorted(self.lambdas.items())), tuple(sorted(self._parity.items())))

    def __eq__(self, other):
        return (
            isinstance(other, QuotientTriangulation)
            and self.table == other.table
            and self.state() == other.state()
        )

    def __hash__(self):
        return hash(self.state())

    # --------------------------------------------------------------- flips

    def flippable(self, e: int) -> bool:
        if e not in self.lambdas:
            return False
        return self.face_of(e) != self.face_of(self.sigma(e))

    def flip(self, e: int) -> int:
        """Flip the edge orbit; returns the new lambda.

        The new lambda is (lam(a2)*lam(b2) + lam(a1)*lam(b1)) / lam(e) with
        a1, a2 and b1, b2 the side darts of the two adjacent triangles read
        off with multiplicity; the division must be exact.
        """
        if e not in self.lambdas:
            raise ValueError(f"unknown edge id {e}")
        i, j = e, self.sigma(e)
        if self.face_of(i) == self.face_of(j):
            raise ValueError(f"edge {e} is self-folded and cannot be flipped")
        a1 = self.phi[i]
        a2 = self.phi[a1]
        b1 = self.phi[j]
        b2 = self.phi[b1]
        lam = self.lambdas[e]
        of = self.edge_id
        numerator = (
            self.lambdas[of(a2)] * self.lambdas[of(b2)]
            + self.lambdas[of(a1)] * self.lambdas[of(b1)]
        )
        new_lam, remainder = divmod(numerator, lam)
        if remainder:
            raise ArithmeticError(
                f"inexact exchange relation at edge {e}: {numerator} / {lam}"
            )
        if self._parity[e] == 0:
            # i becomes the dart from the far triangle's apex to the near one
            self.phi[i] = a2
            self.phi[a2] = b1
            self.phi[b1] = i
            self.phi[j] = b2
            self.phi[b2] = a1
            self.phi[a1] = j
        else:
            self.phi[i] = b2
            self.phi[b2] = a1
            self.phi[a1] = i
            self.phi[j] = a2
            self.phi[a2] = b1
            self.phi[b1] = j
        self._parity[e] ^= 1
        self.lambdas[e] = new_lam
        self.history.append(e)
        return new_lam

    def flip_parity(self, e: int) -> int:
        return self._parity[e]

    # ----------------------------------------------------------- crossings

    def cusp_horocycle_length(self, cusp_index: int) -> Fraction:
        """Total length of the decoration horocycle at a cusp: the sum of
        its corner arcs lam_opposite / (lam_left * lam_right)."""
        cycle = self.cusps()[cusp_index]
        total = Fraction(0)
        for d in cycle:
            total += self._corner_arc(d)
        return total

    def _corner_arc(self, d: int) -> Fraction:
        of = self.edge_id
        a = self.lambdas[of(d)]
        b = self.lambdas[of(self.phi[d])]
        opp = self.lambdas[of(self.phi[self.phi[d]])]
        return Fraction(opp, a * b)

    def horocycle_crossings(self, cusp_index: int, window: float) -> list[tuple[int, float]]:
        """Edge crossings (edge id, arc position) of the cusp horocycle.

        The horocycle runs through the corner arcs of its rotation cycle;
        each corner spans the width of the opposite edge.  An opposite edge
        of width over 2 is crossed twice and opens a dip into the far
        triangle, handled by exact interval subdivision; width exactly 2 is
        a tangency counted once.
        """
        cusps = self.cusps()
        if not 0 <= cusp_index < len(cusps):
            raise ValueError(f"no cusp {cusp_index}")
        cycle = cusps[cusp_index]
        start = min(cycle, key=lambda d: (self.edge_id(d), d))
        k0 = cycle.index(start)
        events: list[tuple[Fraction | float, int]] = []
        limit = Fraction(window).limit_denominator(10**9) if window else Fraction(0)
        of = self.edge_id

        def dip(a: Fraction, width: Fraction, s_left: int | Fraction, s_right, entry: int, depth: int):
            if width < 2 or depth > 64:
                return
            mid = a + width / 2
            if width == 2:
                if 0 <= mid <= limit:
                    events.append((mid, of(entry)))
                return
            shift = math.sqrt(float(width * width) / 4 - 1)
            for pos in (float(mid) - shift, float(mid) + shift):
                if 0 <= pos <= float(limit):
                    events.append((pos, of(entry)))
            lam_e = self.lambdas[of(entry)]
            lam_right = self.lambdas[of(self.phi[entry])]
            lam_left = self.lambdas[of(self.phi[self.phi[entry]])]
            s_mid = Fraction(s_left * lam_right + lam_left * s_right, lam_e)
            w_left = Fraction(lam_left, s_left * s_mid)
            w_right = Fraction(lam_right, s_mid * s_right)
            assert w_left + w_right == width
            dip(a, w_left, s_left, s_mid, self.sigma(self.phi[self.phi[entry]]), depth + 1)
            dip(a + w_left, w_right, s_mid, s_right, self.sigma(self.phi[entry]), depth + 1)

        pos = Fraction(0)
        k = k0
        while pos <= limit:
            d = cycle[k % len(cycle)]
            events.append((pos, of(d)))
            arc = self._corner_arc(d)
            s_left = self.lambdas[of(d)]
            s_right = self.lambdas[of(self.phi[d])]
            opp = self.phi[self.phi[d]]
            dip(pos, arc, s_left, s_right, self.sigma(opp), 0)
            pos += arc
            k += 1
        events.sort(key=lambda ev: (float(ev[0]), ev[1]))
        return [(e, float(p)) for p, e in events]

    # ------------------------------------------------------- serialization

    def to_json(self) -> dict:
        doc = {"table": self.table.to_json(), "history": list(self.history)}
        if self.table.name:
            doc["group"] = self.table.name
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "QuotientTriangulation":
        if "group" in doc and doc["group"] in _BUILTIN:
            table = builtin_group(doc["group"])
        else:
            table = CosetTable.from_json(doc["table"])
        q = cls(table)
        for step, e in enumerate(doc.get("history", [])):
            try:
                q.flip(int(e))
            except (ValueError, ArithmeticError) as exc:
                raise ValueError(f"history step {step}: {exc}") from exc
        return q


def quotient_triangulation(table: CosetTable) -> QuotientTriangulation:
    return QuotientTriangulation(table)


def flip_script(
    q: QuotientTriangulation, edges: list[int], repeats: int = 1
) -> tuple[QuotientTriangulation, tuple[int, ...]]:
    """Apply the edge sequence repeats times to a copy of q; returns the
    final state and the trace of new lambdas."""
    out = q.copy()
    trace = []
    for pass_index in range(repeats):
        for k, e in enumerate(edges):
            try:
                trace.append(out.flip(int(e)))
            except (ValueError, ArithmeticError) as exc:
                step = pass_index * len(edges) + k
                raise ValueError(f"step {step}: {exc}") from exc
    return out, tuple(trace)


# ---------------------------------------------------------------- lifting

def _right_apex(x: ExtendedRational, y: ExtendedRational) -> ExtendedRational:
    """Apex of the tau* triangle to the right of the oriented edge x -> y."""
    m1, m2 = tau_apexes(EdgeKey.of(x, y))
    return m1 if _between(x, m1, y) else m2


@dataclass
class LiftedPatch:
    """Disk development of a quotient triangulation around the base cell.

    Labels tie oriented lifted edges to darts.  Flips whose quadrilateral
    left the patch were skipped; edges causally downstream of a skipped
    flip are excluded from consistent_edges.  The core is the consistent
    part within combinatorial radius depth of the base cell.
    """

    patch: TessellationPatch
    table: CosetTable
    depth: int
    edge_labels: dict[EdgeKey, int]
    oriented_labels: dict[tuple[ExtendedRational, ExtendedRational], int]
    consistent_edges: list[EdgeKey]
    consistent_triangles: list[TriangleKey]
    core_edges: list[EdgeKey]
    core_triangles: list[TriangleKey]

    def lambda_pairs(self, q: QuotientTriangulation) -> list[tuple[EdgeKey, int, int]]:
        """(edge, determinant lambda, quotient lambda) over the whole
        consistent region."""
        out = []
        for ek in self.consistent_edges:
            lifted = lambda_length(ek.a, ek.b)
            out.append((ek, lifted, q.lambda_of(q.edge_id(self.edge_labels[ek]))))
        return out

    def check_consistency(self, q: QuotientTriangulation) -> None:
        for ek, lifted, quotient in self.lambda_pairs(q):
            if lifted != quotient:
                raise AssertionError(
                    f"lift mismatch at {ek}: determinant {lifted}, quotient {quotient}"
                )
        for tri in self.consistent_triangles:
            face_ids = set()
            for x, y, z in _oriented_sides(tri):
                d = self.oriented_labels.get((x, y))
                if d is None:
                    raise AssertionError(f"unlabeled side {x}->{y} of {tri}")
                face_ids.add(q.face_of(d))
            if len(face_ids) != 1:
                raise AssertionError(f"sides of {tri} label distinct quotient faces")


def _oriented_sides(tri: TriangleKey):
    """The three boundary orientations (x, y, third) having tri on the right."""
    u, v, w = tri.vertices()
    out = []
    for x, y, z in ((u, v, w), (v, w, u), (w, u, v)):
        if _between(x, z, y):
            out.append((x, y, z))
        else:
            out.append((y, x, z))
    return out


def _tau_ball(radius: int) -> tuple[list[TriangleKey], dict[TriangleKey, int]]:
    """tau* cells within dual-tree distance radius of the base cell, in
    breadth-first order."""
    base = TriangleKey.of(ZERO, ONE, INFINITY)
    rings = {base: 0}
    order = [base]
    queue = deque([base])
    while queue:
        cell = queue.popleft()
        d = rings[cell]
        if d == radius:
            continue
        for e in cell.edges():
            (third,) = [v for v in cell.vertices() if v not in (e.a, e.b)]
            m1, m2 = tau_apexes(e)
            other = m2 if m1 == third else m1
            nb = TriangleKey.of(e.a, e.b, other)
            if nb not in rings:
                rings[nb] = d + 1
                order.append(nb)
                queue.append(nb)
    return order, rings


def develop(
    q: QuotientTriangulation,
    depth: int,
    table: CosetTable | None = None,
    collar: int | None = None,
) -> LiftedPatch:
    """Replay the quotient's flip history on a lifted tau* patch.

    The patch is built with a collar beyond the requested depth; flips
    whose quadrilateral sticks out of the patch are skipped, so only the
    depth-core is guaranteed consistent (and is checked).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    table = table or q.table
    if table != q.table:
        raise ValueError("table does not match the triangulation")
    if collar is None:
        collar = max(2, len(q.history))
    cells, rings = _tau_ball(depth + collar)

    patch = new_patch()
    for cell in cells:
        patch._ensure_cell(cell)

    vertex_ring: dict[ExtendedRational, int] = {}
    for cell, ring in rings.items():
        for v in cell.vertices():
            vertex_ring[v] = min(vertex_ring.get(v, ring), ring)

    # label oriented tau* edges by darts, breadth-first from the base edge
    label: dict[tuple[ExtendedRational, ExtendedRational], int] = {}
    footprint = set(rings)
    sigma = table.sigma
    phi0 = [table.phi(i) for i in range(table.n)]
    label[(ZERO, INFINITY)] = 0
    label[(INFINITY, ZERO)] = sigma(0)
    queue = deque([(ZERO, INFINITY), (INFINITY, ZERO)])
    while queue:
        x, y = queue.popleft()
        d = label[(x, y)]
        w = _right_apex(x, y)
        if TriangleKey.of(x, y, w) not in footprint:
            continue
        nxt = (y, w)
        dn = phi0[d]
        if nxt in label:
            if label[nxt] != dn:
                raise AssertionError("inconsistent dart labeling")
            continue
        label[nxt] = dn
        label[(w, y)] = sigma(dn)
        queue.append(nxt)
        queue.append((w, y))

    # replay history, step by step, against a fresh quotient; a skipped
    # flip taints its edge, and taint spreads through quadrilaterals
    replay = QuotientTriangulation(table)
    tainted: set[EdgeKey] = set()
    for e in q.history:
        i = e
        parity = replay._parity[e]
        lifts = sorted(
            (pair for pair, d in label.items() if d == i),
            key=lambda pair: EdgeKey.of(*pair),
        )
        for x, y in lifts:
            ek = EdgeKey.of(x, y)
            if not patch.contains_edge(ek):
                continue
            if lambda_length(ek.a, ek.b) == 1 and patch._pristine_sides(ek):
                tainted.add(ek)
                continue  # quadrilateral leaves the patch
            di = label.pop((x, y))
            dj = label.pop((y, x))
            if (x, y) != (ek.a, ek.b):
                di, dj = dj, di  # di now labels (ek.a -> ek.b)
            quad_edges = {
                side for face in patch.faces_of(ek) for side in face.edges()
            }
            rec = patch.flip(ek)
            x0, x1, x2, x3 = rec.quad
            new_ek = EdgeKey.of(x1, x3)
            if tainted & quad_edges:
                tainted.add(new_ek)
            else:
                tainted.discard(new_ek)
            if parity == 0:
                label[(x3, x1)] = di
                label[(x1, x3)] = dj
            else:
                label[(x1, x3)] = di
                label[(x3, x1)] = dj
        replay.flip(e)
    if replay.state() != q.state():
        raise AssertionError("replayed history does not reproduce the quotient")

    consistent_edges = sorted(
        ek
        for ek in {EdgeKey.of(x, y) for (x, y) in label}
        if patch.contains_edge(ek) and ek not in tainted
    )
    clean = set(consistent_edges)
    consistent_triangles = sorted(
        tri for tri in patch._triangles if all(s in clean for s in tri.edges())
    )
    core_edges = [
        ek
        for ek in consistent_edges
        if max(vertex_ring.get(ek.a, depth + 1), vertex_ring.get(ek.b, depth + 1)) <= depth
    ]
    core_triangles = [
        tri
        for tri in consistent_triangles
        if all(vertex_ring.get(v, depth + 1) <= depth for v in tri.vertices())
    ]
    edge_labels = {}
    for ek in consistent_edges:
        edge_labels[ek] = label[(ek.a, ek.b)]
    lifted = LiftedPatch(
        patch=patch,
        table=table,
        depth=depth,
        edge_labels=edge_labels,
        oriented_labels=label,
        consistent_edges=consistent_edges,
        consistent_triangles=consistent_triangles,
        core_edges=core_edges,
        core_triangles=core_triangles,
    )
    lifted.check_consistency(q)
    return lifted
