"""Extended rationals, lambda lengths, and the Farey tessellation's disk geometry.

Vertices of the tessellation are extended rationals p/q (with 1/0 for the
point at infinity).  Every combinatorial decision here is integer-exact;
floating point appears only in disk coordinates meant for rendering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

ORTHO_TOL = 1e-9  # |center|^2 - radius^2 must equal 1 within this, arcs only


class ExtendedRational:
    """A reduced fraction p/q with q >= 0; (1, 0) is the point at infinity.

    Instances are immutable and totally ordered, with 1/0 greatest and the
    rest ordered numerically.  str() gives the "p/q" form used everywhere
    externally.
    """

    __slots__ = ("p", "q")

    def __init__(self, p: int, q: int):
        if q == 0:
            if p == 0:
                raise ValueError("0/0 is not an extended rational")
            p = 1
        else:
            if q < 0:
                p, q = -p, -q
            g = math.gcd(p, q)
            if g > 1:
                p //= g
                q //= g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedRational is immutable")

    @classmethod
    def parse(cls, text: str) -> "ExtendedRational":
        """Parse "p/q" or a bare integer string."""
        s = text.strip()
        if "/" in s:
            a, b = s.split("/", 1)
            return cls(int(a), int(b))
        return cls(int(s), 1)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def __eq__(self, other):
        if not isinstance(other, ExtendedRational):
            return NotImplemented
        return self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((self.p, self.q))

    def __lt__(self, other):
        if not isinstance(other, ExtendedRational):
            return NotImplemented
        if self.q == 0:
            return False  # infinity is greatest
        if other.q == 0:
            return True
        return self.p * other.q < other.p * self.q

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return not (self <= other)

    def __ge__(self, other):
        return not (self < other)

    def __neg__(self):
        return ExtendedRational(-self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"

    def __repr__(self):
        return f"ExtendedRational({self.p}, {self.q})"


# The two vertices of the base edge.
ZERO = ExtendedRational(0, 1)
INFINITY = ExtendedRational(1, 0)
ONE = ExtendedRational(1, 1)


def reduce(p: int, q: int) -> ExtendedRational:
    """Reduced canonical form of p/q; (k, 0) maps to 1/0 for any k != 0."""
    return ExtendedRational(p, q)


def lambda_length(x: ExtendedRational, y: ExtendedRational) -> int:
    """|ps - qr| for x = p/q, y = r/s.  Farey tessellation edges have value 1.

    This is the lambda length of the geodesic (x, y) with respect to the
    Farey decoration (horocycle of diameter 1/q^2 at p/q, height 1 at 1/0).
    """
    if x == y:
        raise ValueError("lambda length requires distinct points")
    return abs(x.p * y.q - x.q * y.p)


@dataclass(frozen=True)
class Horocycle:
    """A horocycle, stored as its boundary center and a positive size.

    size is the Euclidean diameter for a finite center and the height of the
    horizontal line for center 1/0 (upper half-plane picture).
    """

    center: ExtendedRational
    size: Fraction

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("horocycle size must be positive")

    @classmethod
    def farey(cls, x: ExtendedRational) -> "Horocycle":
        """The decoration horocycle at x: diameter 1/q^2, height 1 at 1/0."""
        if x.is_infinity:
            return cls(x, Fraction(1))
        return cls(x, Fraction(1, x.q * x.q))


def lambda_length_sq(h1: Horocycle, h2: Horocycle) -> Fraction:
    """Exact squared lambda length between two horocycles.

    For distinct finite centers x, y with diameters d1, d2 this is
    (x - y)^2 / (d1 d2); with one center at 1/0 (height H) it is H / d.
    """
    if h1.center == h2.center:
        raise ValueError("lambda length requires distinct centers")
    if h1.center.is_infinity or h2.center.is_infinity:
        if h2.center.is_infinity:
            h1, h2 = h2, h1
        height = h1.size
        d = h2.size
        return height / d
    x = Fraction(h1.center.p, h1.center.q)
    y = Fraction(h2.center.p, h2.center.q)
    return (x - y) ** 2 / (h1.size * h2.size)


def lambda_length_general(h1: Horocycle, h2: Horocycle) -> float:
    """Square root of lambda_length_sq; exact when the square is perfect."""
    sq = lambda_length_sq(h1, h2)
    rn = math.isqrt(sq.numerator)
    rd = math.isqrt(sq.denominator)
    if rn * rn == sq.numerator and rd * rd == sq.denominator:
        v = Fraction(rn, rd)
        return float(v) if v.denominator > 1 else v.numerator
    return math.sqrt(sq)


def mediant(x: ExtendedRational, y: ExtendedRational) -> ExtendedRational:
    """Mediant (p+r)/(q+s) of two Farey neighbors, landing between them.

    Canonical representatives (q >= 0) are summed, which places the result
    on the boundary arc from x to y in the increasing direction.
    """
    if lambda_length(x, y) != 1:
        raise ValueError(f"{x} and {y} are not Farey neighbors")
    return ExtendedRational(x.p + y.p, x.q + y.q)


def co_mediant(x: ExtendedRational, y: ExtendedRational) -> ExtendedRational:
    """The other triangle apex over the edge {x, y}: (p-r)/(q-s) reduced."""
    if lambda_length(x, y) != 1:
        raise ValueError(f"{x} and {y} are not Farey neighbors")
    return ExtendedRational(x.p - y.p, x.q - y.q)


def generation(x: ExtendedRational) -> int:
    """Stern-Brocot depth of x from the base edge {0/1, 1/0}.

    generation(0/1) = generation(1/0) = 0, generation(-x) = generation(x),
    and the mediant of two Farey neighbors has generation one more than the
    larger of theirs.  Computed as the sum of the continued fraction
    quotients of |p|/q (each quotient is a run of same-direction steps in
    the mediant walk).
    """
    p, q = abs(x.p), x.q
    if p == 0 or q == 0:
        return 0
    total = 0
    while q:
        total += p // q
        p, q = q, p % q
    return total


def stern_brocot_parents(
    x: ExtendedRational,
) -> tuple[ExtendedRational, ExtendedRational]:
    """The Farey pair whose mediant is x (generation > 0 only).

    For negative x the mirrored walk is used; the returned pair is ordered
    by the total order.
    """
    if generation(x) == 0:
        raise ValueError("base vertices have no parents")
    if x.p < 0:
        a, b = stern_brocot_parents(-x)
        return tuple(sorted((-a, -b)))  # type: ignore[return-value]
    lo, hi = ZERO, INFINITY
    while True:
        m = mediant(lo, hi)
        if m == x:
            return lo, hi
        if x < m:
            hi = m
        else:
            lo = m


class MoebiusMap:
    """An element (a b; c d) of PSL(2, Z): determinant 1, canonical sign.

    The representative with c > 0, or c = 0 and d > 0, is stored.  Maps act
    on extended rationals by apply(); composition is *, with (M * N)(x) =
    M(N(x)).
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if a * d - b * c != 1:
            raise ValueError("determinant must be 1")
        if c < 0 or (c == 0 and d < 0):
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("MoebiusMap is immutable")

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    def apply(self, x: ExtendedRational) -> ExtendedRational:
        return ExtendedRational(self.a * x.p + self.b * x.q, self.c * x.p + self.d * x.q)

    def __call__(self, x: ExtendedRational) -> ExtendedRational:
        return self.apply(x)

    def __mul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __eq__(self, other):
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"MoebiusMap({self.a}, {self.b}, {self.c}, {self.d})"


# Generators of the modular group.  S is the order-2 rotation z -> -1/z,
# T the translation z -> z + 1, U = z -> z/(z + 1).  T^-1 = SUS, U^-1 = STS.
S = MoebiusMap(0, -1, 1, 0)
T = MoebiusMap(1, 1, 0, 1)
U = MoebiusMap(1, 0, 1, 1)


def apply(m: MoebiusMap, x: ExtendedRational) -> ExtendedRational:
    """Apply a modular transformation to an extended rational."""
    return m.apply(x)


def center_to_infinity(c: ExtendedRational) -> MoebiusMap:
    """Canonical modular map sending c to 1/0.

    Deterministic completion of the bottom row (-q, p) by the least
    non-negative Bezout coefficient.
    """
    p, q = c.p, c.q
    if q == 0:
        return MoebiusMap.identity()
    if q == 1:
        a, b = 0, 1
    else:
        a = pow(p % q, -1, q)
        b = (1 - a * p) // q
    return MoebiusMap(a, b, -q, p)


@dataclass(frozen=True)
class DiskPoint:
    """A point of the closed unit disk, 64-bit coordinates (rendering only)."""

    x: float
    y: float


def cayley(x: ExtendedRational) -> DiskPoint:
    """Boundary point of the unit disk for x under z -> (z - i)/(z + i).

    1/0 -> (1, 0), 0/1 -> (-1, 0), 1/1 -> (0, -1); coordinates are the
    exact rationals ((p^2-q^2)/(p^2+q^2), -2pq/(p^2+q^2)) emitted as floats.
    """
    p, q = x.p, x.q
    n = p * p + q * q
    return DiskPoint((p * p - q * q) / n, (-2 * p * q) / n)


def _cayley_exact(x: ExtendedRational) -> tuple[Fraction, Fraction]:
    p, q = x.p, x.q
    n = p * p + q * q
    return Fraction(p * p - q * q, n), Fraction(-2 * p * q, n)


@dataclass(frozen=True)
class GeodesicArc:
    """The disk picture of a geodesic: a diameter or a circular arc.

    Arcs store the Euclidean center and radius of a circle orthogonal to
    the unit circle (|center|^2 = 1 + radius^2).
    """

    kind: str  # "diameter" or "arc"
    start: DiskPoint
    end: DiskPoint
    center: DiskPoint | None = None
    radius: float | None = None


def geodesic_arc(x: ExtendedRational, y: ExtendedRational) -> GeodesicArc:
    """Disk rendering of the geodesic from x to y.

    The two ideal points are antipodal on the circle exactly when
    p*r == -q*s (half-plane endpoints multiply to -1); that case is a
    diameter, all others are orthogonal circular arcs.
    """
    if x == y:
        raise ValueError("geodesic needs distinct endpoints")
    u = cayley(x)
    v = cayley(y)
    if x.p * y.p == -(x.q * y.q):
        return GeodesicArc("diameter", u, v)
    ux, uy = _cayley_exact(x)
    vx, vy = _cayley_exact(y)
    det = ux * vy - uy * vx
    # Solve c.u = 1, c.v = 1: the center of the orthogonal circle through u, v.
    cx = (vy - uy) / det
    cy = (ux - vx) / det
    r2 = cx * cx + cy * cy - 1
    return GeodesicArc(
        "arc", u, v, DiskPoint(float(cx), float(cy)), math.sqrt(float(r2))
    )


def horocycle_disk_circle(h: Horocycle) -> tuple[DiskPoint, float]:
    """Euclidean (center, radius) of a horocycle's image in the unit disk.

    The image is internally tangent to the unit circle at cayley(center);
    the radius comes from the tangency relation applied to one more exactly
    mapped point of the horocycle.
    """
    c = h.center
    if c.is_infinity:
        # Line y = H maps to the circle through (H-1)/(H+1) tangent at (1, 0).
        r = Fraction(1) / (h.size + 1)
        return DiskPoint(float(1 - r), 0.0), float(r)
    px, py = _cayley_exact(c)
    # Top point of the horocycle, z0 + i*size, through the Cayley transform.
    z0 = Fraction(c.p, c.q)
    d = h.size
    # (z0 + i(d-1)) / (z0 + i(d+1)) expanded over rationals.
    den = z0 * z0 + (d + 1) ** 2
    qx = (z0 * z0 + (d - 1) * (d + 1)) / den
    qy = (z0 * (d - 1) - z0 * (d + 1)) / den
    dot = px * qx + py * qy
    dist2 = (qx - px) ** 2 + (qy - py) ** 2
    r = dist2 / (2 * (1 - dot))
    return DiskPoint(float(px * (1 - r)), float(py * (1 - r))), float(r)


def horocycle_circle(x: ExtendedRational) -> tuple[DiskPoint, float]:
    """Disk circle of the Farey decoration horocycle at x (1/0 -> center
    (1/2, 0), radius 1/2)."""
    return horocycle_disk_circle(Horocycle.farey(x))


def orient_edge(
    x: ExtendedRational, y: ExtendedRational
) -> tuple[ExtendedRational, ExtendedRational]:
    """Orient {x, y} from lower to higher generation.

    Ties go toward the larger endpoint in the total order, so the base edge
    orients as (0/1, 1/0) and {-1/1, 1/1} as (-1/1, 1/1).
    """
    gx, gy = generation(x), generation(y)
    if gx < gy or (gx == gy and x < y):
        return x, y
    return y, x
