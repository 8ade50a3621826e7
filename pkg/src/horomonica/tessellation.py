"""Farey tessellation patches: finite diffs, Ptolemy flips, viewports.

A patch is the Farey tessellation tau* outside a finite triangulated region
plus a diff (removed tau* edges, added edges of lambda >= 2) inside it.  The
region grows lazily by attaching tau* cells along the dual tree, so it stays
a triangulated disk.  All edge bookkeeping is integer-exact.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .audio import FRET_SPACING
from .farey import (
    INFINITY,
    ZERO,
    DiskPoint,
    ExtendedRational,
    GeodesicArc,
    Horocycle,
    MoebiusMap,
    cayley,
    center_to_infinity,
    co_mediant,
    generation,
    geodesic_arc,
    lambda_length,
    mediant,
    orient_edge,
    stern_brocot_parents,
)


@dataclass(frozen=True)
class EdgeKey:
    """Unordered edge {a, b}, stored with a < b in the total order."""

    a: ExtendedRational
    b: ExtendedRational

    @classmethod
    def of(cls, x: ExtendedRational, y: ExtendedRational) -> "EdgeKey":
        if x == y:
            raise ValueError("edge endpoints must differ")
        if y < x:
            x, y = y, x
        return cls(x, y)

    def __lt__(self, other: "EdgeKey"):
        return (self.a, self.b) < (other.a, other.b)

    def endpoints(self):
        return self.a, self.b

    def to_json(self):
        return [str(self.a), str(self.b)]

    @classmethod
    def from_json(cls, pair) -> "EdgeKey":
        x, y = pair
        return cls.of(ExtendedRational.parse(x), ExtendedRational.parse(y))

    def __str__(self):
        return f"{{{self.a}, {self.b}}}"


@dataclass(frozen=True)
class TriangleKey:
    """Unordered ideal triangle, vertices sorted by the total order."""

    u: ExtendedRational
    v: ExtendedRational
    w: ExtendedRational

    @classmethod
    def of(cls, x, y, z) -> "TriangleKey":
        vs = sorted((x, y, z))
        if vs[0] == vs[1] or vs[1] == vs[2]:
            raise ValueError("triangle vertices must be distinct")
        return cls(*vs)

    def vertices(self):
        return self.u, self.v, self.w

    def edges(self):
        return (
            EdgeKey.of(self.u, self.v),
            EdgeKey.of(self.v, self.w),
            EdgeKey.of(self.u, self.w),
        )

    def __lt__(self, other: "TriangleKey"):
        return (self.u, self.v, self.w) < (other.u, other.v, other.w)

    def to_json(self):
        return [str(self.u), str(self.v), str(self.w)]


@dataclass(frozen=True)
class FlipRecord:
    """One Ptolemy flip: quad in cyclic order, diagonals, side lambdas.

    The exchange relation lam_e * lam_f = a*c + b*d holds exactly, with
    sides a = {x0,x1}, b = {x1,x2}, c = {x2,x3}, d = {x3,x0} and diagonals
    e = {x0,x2}, f = {x1,x3}.
    """

    quad: tuple[ExtendedRational, ...]
    edge: EdgeKey
    lam_e: int
    new_edge: EdgeKey
    lam_f: int
    sides: tuple[int, int, int, int]

    def __post_init__(self):
        a, b, c, d = self.sides
        if self.lam_e * self.lam_f != a * c + b * d:
            raise ValueError("Ptolemy relation violated")


class TuningScriptError(ValueError):
    """A flip instruction failed; carries the instruction index and reason."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"instruction {index}: {reason}")


def _between(a: ExtendedRational, z: ExtendedRational, b: ExtendedRational) -> bool:
    """True when z lies on the boundary arc from a to b taken in increasing
    order (wrapping through 1/0 when a > b)."""
    if a < b:
        return a < z < b
    return z > a or z < b


def tau_apexes(e: EdgeKey):
    """The two tau* triangle apexes over a tau* edge."""
    return mediant(e.a, e.b), co_mediant(e.a, e.b)


def _tau_cell_parent(tri: TriangleKey) -> TriangleKey:
    """Parent tau* cell across the lowest-generation edge (dual tree step)."""
    vs = tri.vertices()
    gens = [generation(v) for v in vs]
    apex = vs[gens.index(max(gens))]
    rest = [v for v in vs if v != apex]
    e = EdgeKey.of(*rest)
    m1, m2 = tau_apexes(e)
    other = m2 if m1 == apex else m1
    return TriangleKey.of(rest[0], rest[1], other)


class TessellationPatch:
    """tau* with a finite flipped diff inside a lazily grown disk region."""

    def __init__(self):
        self._footprint: set[TriangleKey] = set()  # tau* cells ever attached
        self._triangles: set[TriangleKey] = set()  # current region faces
        self._edge_faces: dict[EdgeKey, set[TriangleKey]] = {}
        self.removed: set[EdgeKey] = set()
        self.added: set[EdgeKey] = set()
        self.history: list[FlipRecord] = []

    # ------------------------------------------------------------ queries

    def copy(self) -> "TessellationPatch":
        t = TessellationPatch()
        t._footprint = set(self._footprint)
        t._triangles = set(self._triangles)
        t._edge_faces = {e: set(fs) for e, fs in self._edge_faces.items()}
        t.removed = set(self.removed)
        t.added = set(self.added)
        t.history = list(self.history)
        return t

    def diff_state(self):
        """The semantic content of the patch: (removed, added) frozen."""
        return frozenset(self.removed), frozenset(self.added)

    def __eq__(self, other):
        if not isinstance(other, TessellationPatch):
            return NotImplemented
        return self.diff_state() == other.diff_state()

    def __hash__(self):
        return hash(self.diff_state())

    def contains_edge(self, e: EdgeKey) -> bool:
        if e in self.added:
            return True
        return lambda_length(e.a, e.b) == 1 and e not in self.removed

    def lambda_of(self, e: EdgeKey) -> int:
        if not self.contains_edge(e):
            raise ValueError(f"edge {e} is not in the tessellation")
        return lambda_length(e.a, e.b)

    def _pristine_sides(self, e: EdgeKey) -> list[TriangleKey]:
        """tau* cells flanking a tau* edge that are not covered by the region."""
        cells = []
        for apex in tau_apexes(e):
            cell = TriangleKey.of(e.a, e.b, apex)
            if cell not in self._footprint:
                cells.append(cell)
        return cells

    def faces_of(self, e: EdgeKey) -> list[TriangleKey]:
        """The two faces flanking a present edge (region faces or pristine
        tau* cells)."""
        if not self.contains_edge(e):
            raise ValueError(f"edge {e} is not in the tessellation")
        faces = sorted(self._edge_faces.get(e, ()))
        if lambda_length(e.a, e.b) == 1:
            faces += self._pristine_sides(e)
        if len(faces) != 2:
            raise RuntimeError(f"edge {e} has {len(faces)} faces")  # invariant
        return faces

    def adjacent_quad(self, e: EdgeKey):
        """Quad vertices (x0, x1, x2, x3) in cyclic order, diagonal {x0, x2}."""
        f1, f2 = self.faces_of(e)
        x0, x2 = e.a, e.b
        thirds = []
        for face in (f1, f2):
            (third,) = [v for v in face.vertices() if v not in (x0, x2)]
            thirds.append(third)
        if _between(x0, thirds[0], x2):
            x1, x3 = thirds
        else:
            x3, x1 = thirds
        return x0, x1, x2, x3

    def triangle_chord(self, tri: TriangleKey) -> tuple[int, int, int]:
        """Sorted lambda triple of a face; rejects non-faces."""
        for e in tri.edges():
            if not self.contains_edge(e):
                raise ValueError(f"{tri} is not a face: missing edge {e}")
        return tuple(sorted(lambda_length(e.a, e.b) for e in tri.edges()))  # type: ignore[return-value]

    # ----------------------------------------------------- region plumbing

    def _add_face(self, tri: TriangleKey):
        self._triangles.add(tri)
        for e in tri.edges():
            self._edge_faces.setdefault(e, set()).add(tri)

    def _drop_face(self, tri: TriangleKey):
        self._triangles.remove(tri)
        for e in tri.edges():
            faces = self._edge_faces[e]
            faces.remove(tri)
            if not faces:
                del self._edge_faces[e]

    def _attach_cell(self, cell: TriangleKey):
        self._footprint.add(cell)
        self._add_face(cell)

    def _ancestor_chain(self, tri: TriangleKey) -> list[TriangleKey]:
        chain = [tri]
        seen = {tri}
        while True:
            parent = _tau_cell_parent(chain[-1])
            if parent in seen:
                return chain
            chain.append(parent)
            seen.add(parent)

    def _ensure_cell(self, cell: TriangleKey):
        """Attach a tau* cell, first connecting it to the region through the
        dual tree so the region stays a disk."""
        if cell in self._footprint:
            return
        if not self._footprint:
            self._attach_cell(cell)
            return
        chain = self._ancestor_chain(cell)
        hit = next((i for i, c in enumerate(chain) if c in self._footprint), None)
        if hit is None:
            # climb from the region to the root pair, then retry
            anchor = min(self._footprint)
            for c in self._ancestor_chain(anchor):
                if c not in self._footprint:
                    self._attach_cell(c)
            chain = self._ancestor_chain(cell)
            hit = next(i for i, c in enumerate(chain) if c in self._footprint)
        for i in range(hit - 1, -1, -1):
            self._attach_cell(chain[i])

    # -------------------------------------------------------------- flips

    def flip(self, e: EdgeKey) -> FlipRecord:
        """Replace diagonal e of its quad by the opposite diagonal f.

        Lambdas are recomputed from endpoints; the exchange relation
        lam_e * lam_f = ac + bd is checked, never assumed.
        """
        if not self.contains_edge(e):
            raise ValueError(f"cannot flip {e}: not an edge of the tessellation")
        if lambda_length(e.a, e.b) == 1:
            for cell in self._pristine_sides(e):
                self._ensure_cell(cell)
        faces = sorted(self._edge_faces[e])
        if len(faces) != 2:
            raise RuntimeError(f"edge {e} has {len(faces)} region faces")
        x0, x1, x2, x3 = self.adjacent_quad(e)
        lam_e = lambda_length(x0, x2)
        lam_f = lambda_length(x1, x3)
        sides = (
            lambda_length(x0, x1),
            lambda_length(x1, x2),
            lambda_length(x2, x3),
            lambda_length(x3, x0),
        )
        f = EdgeKey.of(x1, x3)
        record = FlipRecord((x0, x1, x2, x3), e, lam_e, f, lam_f, sides)

        for face in faces:
            self._drop_face(face)
        self._add_face(TriangleKey.of(x0, x1, x3))
        self._add_face(TriangleKey.of(x1, x2, x3))

        if lam_e == 1:
            self.removed.add(e)
        else:
            self.added.remove(e)
        if lam_f == 1:
            if f not in self.removed:
                raise RuntimeError(f"new edge {f} of lambda 1 was never removed")
            self.removed.remove(f)
        else:
            self.added.add(f)
        self.history.append(record)
        return record

    def apply_tuning_script(self, script: list) -> list[FlipRecord]:
        """Apply [{"edge": ["p/q", "r/s"]}, ...] in order.

        Any invalid instruction aborts with a TuningScriptError carrying the
        index; the patch is left at the last good step.
        """
        records = []
        for i, item in enumerate(script):
            try:
                e = EdgeKey.from_json(item["edge"])
                records.append(self.flip(e))
            except TuningScriptError:
                raise
            except (KeyError, TypeError) as exc:
                raise TuningScriptError(i, f"malformed instruction: {exc}") from exc
            except (ValueError, ZeroDivisionError) as exc:
                raise TuningScriptError(i, str(exc)) from exc
        return records

    # ----------------------------------------------------------- viewport

    def tau_edges_up_to_generation(self, g: int) -> list[EdgeKey]:
        """tau* edges whose endpoints both have generation <= g; the
        negative side is the mirror image of the positive side."""
        positive: list[EdgeKey] = []

        def rec(lo, hi):
            m = mediant(lo, hi)
            if generation(m) > g:
                return
            positive.append(EdgeKey.of(lo, m))
            positive.append(EdgeKey.of(m, hi))
            rec(lo, m)
            rec(m, hi)

        if g >= 1:
            rec(ZERO, INFINITY)
        mirrored = [EdgeKey.of(-e.a, -e.b) for e in positive]
        return [EdgeKey.of(ZERO, INFINITY)] + positive + mirrored

    def edges_in_viewport(self, g: int) -> list["ViewportEdge"]:
        """All edges with both endpoint generations <= g, deterministic order."""
        keys = {e for e in self.tau_edges_up_to_generation(g) if e not in self.removed}
        keys |= {
            e
            for e in self.added
            if generation(e.a) <= g and generation(e.b) <= g
        }
        return [_viewport_edge(e) for e in sorted(keys)]

    def faces_in_viewport(self, g: int) -> list[TriangleKey]:
        keys = {v.key for v in self.edges_in_viewport(g)}
        adj: dict[ExtendedRational, set[ExtendedRational]] = {}
        for e in keys:
            adj.setdefault(e.a, set()).add(e.b)
            adj.setdefault(e.b, set()).add(e.a)
        faces = set()
        for e in keys:
            for v in adj[e.a] & adj[e.b]:
                faces.add(TriangleKey.of(e.a, v, e.b))
        return sorted(faces)

    # -------------------------------------------------- horocycle crossings

    def _tau_neighbors_by_generation(
        self, c: ExtendedRational
    ) -> Iterator[ExtendedRational]:
        """tau* neighbors of c ordered by (generation, total order)."""
        if c.is_infinity:
            yield ZERO
            n = 1
            while True:
                yield ExtendedRational(-n, 1)
                yield ExtendedRational(n, 1)
                n += 1
        elif c == ZERO:
            yield INFINITY
            s = 1
            while True:
                yield ExtendedRational(-1, s)
                yield ExtendedRational(1, s)
                s += 1
        else:
            heap = [
                (generation(u), u) for u in stern_brocot_parents(c)
            ]
            heapq.heapify(heap)
            while heap:
                _, u = heapq.heappop(heap)
                yield u
                m = mediant(c, u)
                heapq.heappush(heap, (generation(m), m))

    def _crossing_start_head(self, c: ExtendedRational) -> ExtendedRational:
        """Head of the canonical first crossing: the incident edge whose head
        is least under (generation, total order)."""
        candidates = [
            (e.a if e.b == c else e.b)
            for e in self.added
            if c in e.endpoints()
        ]
        for u in self._tau_neighbors_by_generation(c):
            if EdgeKey.of(c, u) not in self.removed:
                candidates.append(u)
                break
        return min(candidates, key=lambda u: (generation(u), u))

    def horocycle_crossings(
        self, center: ExtendedRational, window: float
    ) -> list[tuple[EdgeKey, float]]:
        """Edge crossings of the decoration horocycle at center, as
        (edge, arc position) ordered from the canonical origin.

        Computed after mapping center to 1/0, where the horocycle is the
        height-1 line: incident edges are verticals, and a non-incident edge
        {u, v} crosses iff |u - v| > 2 (tangency at exactly 2 counts once).
        """
        m = center_to_infinity(center)
        minv = m.inverse()
        x0 = _image_fraction(m, self._crossing_start_head(center))
        lim = Fraction(window).limit_denominator(10**9) if isinstance(
            window, float
        ) else Fraction(window)
        events: list[tuple] = []

        n = math.ceil(x0)
        while Fraction(n) <= x0 + lim:
            u = minv(ExtendedRational(n, 1))
            e = EdgeKey.of(center, u)
            if e not in self.removed:
                events.append((Fraction(n) - x0, e))
            n += 1

        for e in self.added:
            if center in e.endpoints():
                v = e.a if e.b == center else e.b
                x = _image_fraction(m, v)
                if 0 <= x - x0 <= lim:
                    events.append((x - x0, e))
                continue
            u = _image_fraction(m, e.a)
            v = _image_fraction(m, e.b)
            width = abs(u - v)
            if width == 2:
                pos = (u + v) / 2 - x0
                if 0 <= pos <= lim:
                    events.append((pos, e))
            elif width > 2:
                mid = float((u + v) / 2 - x0)
                off = math.sqrt(float(width * width) / 4 - 1)
                for pos in (mid - off, mid + off):
                    if 0 <= pos <= float(lim):
                        events.append((pos, e))

        events.sort(key=lambda ev: (ev[0], ev[1]))
        return [(e, float(pos)) for pos, e in events]


def _image_fraction(m: MoebiusMap, x: ExtendedRational) -> Fraction:
    y = m(x)
    if y.is_infinity:
        raise RuntimeError("image of a non-center point cannot be 1/0")
    return Fraction(y.p, y.q)


# ---------------------------------------------------------------- rendering

@dataclass(frozen=True)
class ViewportEdge:
    key: EdgeKey
    lam: int
    tail: ExtendedRational
    head: ExtendedRational
    arc: GeodesicArc
    frets: tuple[DiskPoint, ...] = field(default_factory=tuple)


def fret_points(x: ExtendedRational, y: ExtendedRational) -> tuple[DiskPoint, ...]:
    """Disk coordinates of the frets on edge {x, y}.

    Fret j sits at signed hyperbolic distance j * FRET_SPACING from the
    point equidistant to the two decoration horocycles, positive toward the
    oriented head.  The emitted index range covers the inter-horocycle span
    plus a two-fret margin.
    """
    tail, head = orient_edge(x, y)
    lam = lambda_length(x, y)
    count = math.ceil(math.log(lam) / FRET_SPACING) + 2 if lam > 1 else 2
    js = range(-count, count + 1)

    def size(v):
        return float(Horocycle.farey(v).size)

    if head.is_infinity or tail.is_infinity:
        fin = tail if head.is_infinity else head
        u = fin.p / fin.q
        h0 = math.sqrt(size(fin))  # height 1 at infinity
        sign = 1.0 if head.is_infinity else -1.0
        pts = []
        for j in js:
            z = complex(u, h0 * math.exp(sign * j * FRET_SPACING))
            pts.append(_half_plane_to_disk(z))
        return tuple(pts)

    u = tail.p / tail.q
    v = head.p / head.q
    du, dv = size(tail), size(head)
    span = abs(v - u)
    d_img = du / span  # image diameter of the tail horocycle at 0
    h_img = span / dv  # image height of the head horocycle at infinity
    h0 = math.sqrt(d_img * h_img)
    pts = []
    for j in js:
        w = complex(0.0, h0 * math.exp(j * FRET_SPACING))
        if v > u:
            z = (v * w + u) / (w + 1)  # inverse of z -> (z-u)/(v-z)
        else:
            z = (v * w - u) / (w - 1)  # inverse of z -> (z-u)/(z-v)
        pts.append(_half_plane_to_disk(z))
    return tuple(pts)


def _half_plane_to_disk(z: complex) -> DiskPoint:
    w = (z - 1j) / (z + 1j)
    return DiskPoint(w.real, w.imag)


def _viewport_edge(e: EdgeKey) -> ViewportEdge:
    tail, head = orient_edge(e.a, e.b)
    return ViewportEdge(
        key=e,
        lam=lambda_length(e.a, e.b),
        tail=tail,
        head=head,
        arc=geodesic_arc(tail, head),
        frets=fret_points(e.a, e.b),
    )


def viewport_json(patch: TessellationPatch, g: int) -> dict:
    """Viewport export: edges with lambdas, orientation, arcs, frets, faces."""
    edges = []
    for ve in patch.edges_in_viewport(g):
        arc = {
            "kind": ve.arc.kind,
            "start": [ve.arc.start.x, ve.arc.start.y],
            "end": [ve.arc.end.x, ve.arc.end.y],
        }
        if ve.arc.kind == "arc":
            arc["center"] = [ve.arc.center.x, ve.arc.center.y]
            arc["radius"] = ve.arc.radius
        edges.append(
            {
                "a": str(ve.key.a),
                "b": str(ve.key.b),
                "lambda": ve.lam,
                "orient": [str(ve.tail), str(ve.head)],
                "arc": arc,
                "frets": [[p.x, p.y] for p in ve.frets],
            }
        )
    return {
        "generation": g,
        "edges": edges,
        "triangles": [t.to_json() for t in patch.faces_in_viewport(g)],
    }


def viewport_svg(patch: TessellationPatch, g: int, size: int = 600) -> str:
    """Standalone SVG of the viewport in the unit disk."""
    half = size / 2
    scale = half * 0.96

    def pt(p: DiskPoint):
        return half + scale * p.x, half - scale * p.y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<circle cx="{half}" cy="{half}" r="{scale}" fill="white" '
        'stroke="#222" stroke-width="1.5"/>',
    ]
    max_gen = max(g, 1)
    for ve in patch.edges_in_viewport(g):
        hue = int(360 * generation(ve.head) / (max_gen + 1))
        color = f"hsl({hue}, 70%, 45%)"
        x1, y1 = pt(ve.arc.start)
        x2, y2 = pt(ve.arc.end)
        if ve.arc.kind == "diameter":
            d = f"M {x1:.3f} {y1:.3f} L {x2:.3f} {y2:.3f}"
        else:
            r = ve.arc.radius * scale
            # pick the sweep that stays inside the disk: the arc bulges
            # toward the origin, i.e. away from the Euclidean center
            cx, cy = pt(ve.arc.center)
            cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx)
            sweep = 1 if cross < 0 else 0
            d = f"M {x1:.3f} {y1:.3f} A {r:.3f} {r:.3f} 0 0 {sweep} {x2:.3f} {y2:.3f}"
        parts.append(
            f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2">'
            f"<title>{ve.key} lambda={ve.lam}</title></path>"
        )
        for p in ve.frets:
            fx, fy = pt(p)
            parts.append(
                f'<circle cx="{fx:.3f}" cy="{fy:.3f}" r="1.6" fill="{color}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)


def new_patch() -> TessellationPatch:
    """A pristine Farey tessellation (empty diff)."""
    return TessellationPatch()
