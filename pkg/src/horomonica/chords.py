"""Triangular chords: integer triples that occur as the three lambda lengths
of an ideal triangle, with explicit and exhaustive realizations.

A positive triple is a chord exactly when

  1. each pairwise gcd divides the remaining entry, and
  2. if the total gcd n is even, at least one entry divided by n is even.

realize_chord builds a witness triangle from a coprime Bezout solution;
brute_force_realize searches denominators directly and is used to cross
check the two conditions on small ranges.  Markoff triples show up as the
chord dynamics of the once punctured torus, so their Vieta exchange tree
lives here too.
"""

from __future__ import annotations

import math

import numpy as np

from .farey import ZERO, ExtendedRational, lambda_length

__all__ = [
    "chord_obstruction",
    "is_chord",
    "realize_chord",
    "brute_force_realize",
    "bezout_witness",
    "markoff_children",
    "markoff_tree",
]


def _validate_triple(chord) -> tuple[int, int, int]:
    try:
        a, b, c = (int(x) for x in chord)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"need a triple of integers, got {chord!r}") from exc
    if min(a, b, c) < 1:
        raise ValueError(f"lambda lengths are positive, got {chord!r}")
    return a, b, c


def chord_obstruction(chord) -> str | None:
    """None when the triple is a chord, otherwise a human readable reason."""
    a, b, c = _validate_triple(chord)
    for (u, v), w in [((a, b), c), ((a, c), b), ((b, c), a)]:
        g = math.gcd(u, v)
        if w % g:
            return f"Condition 1 fails: gcd({u},{v})={g} ∤ {w}"
    n = math.gcd(a, math.gcd(b, c))
    if n % 2 == 0:
        reduced = (a // n, b // n, c // n)
        if all(r % 2 for r in reduced):
            parts = ", ".join(str(r) for r in reduced)
            return f"Condition 2 fails: gcd={n} but {parts} are all odd"
    return None


def is_chord(chord) -> bool:
    return chord_obstruction(chord) is None


def _radical(n: int) -> tuple[int, ...]:
    """Distinct prime divisors of n by trial division."""
    primes = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        primes.append(m)
    return tuple(primes)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def _coprime_bezout(a: int, b: int, c: int, n: int) -> tuple[int, int] | None:
    """Solve a*s - b*r = c with gcd(r, n*a) = gcd(s, n*b) = 1.

    Solutions form a line (r, s) = (r0, s0) + t*(a/g, b/g); only residues of
    t modulo primes of n matter, so scanning one full period of their
    product decides solvability.
    """
    g, x, y = _ext_gcd(a, b)
    if c % g:
        return None
    r0 = -y * (c // g)
    s0 = x * (c // g)
    dr = a // g
    ds = b // g
    period = 1
    for p in _radical(n):
        period *= p
    for t in range(period):
        r = r0 + dr * t
        s = s0 + ds * t
        if math.gcd(r, n * a) == 1 and math.gcd(s, n * b) == 1:
            return r, s
    return None


def bezout_witness(a: int, b: int, n: int) -> tuple[int, int]:
    """(r, s) with a*s - b*r = 1, gcd(r, n*a) = 1 and gcd(s, n*b) = 1.

    Needs gcd(a, b) = 1.  No witness exists when n is even while a and b
    are both odd: then s - r is odd, so one of r, s is even and shares a
    factor 2 with the even modulus.
    """
    if min(a, b, n) < 1:
        raise ValueError("arguments must be positive")
    if math.gcd(a, b) != 1:
        raise ValueError(f"gcd({a},{b}) != 1")
    if n % 2 == 0 and a % 2 and b % 2:
        raise ValueError(
            f"no witness for a={a}, b={b}, n={n}: "
            "n even with a, b both odd forces an even r or s"
        )
    found = _coprime_bezout(a, b, 1, n)
    if found is None:
        raise AssertionError("witness search failed on a feasible instance")
    return found


def realize_chord(
    chord,
) -> tuple[ExtendedRational, ExtendedRational, ExtendedRational]:
    """Vertices (x1, x2, x3) of an ideal triangle whose lambda lengths are
    the chord, indexed so that x_i is opposite the edge of length chord[i].
    """
    obstruction = chord_obstruction(chord)
    if obstruction is not None:
        raise ValueError(f"not a chord: {obstruction}")
    l1, l2, l3 = _validate_triple(chord)
    n = math.gcd(l1, math.gcd(l2, l3))
    a, b, c = l1 // n, l2 // n, l3 // n
    found = _coprime_bezout(a, b, c, n)
    if found is None:
        raise AssertionError("chord conditions hold but no Bezout witness")
    r, s = found
    x1 = ExtendedRational(n * b, s)
    x2 = ExtendedRational(n * a, r)
    x3 = ZERO
    assert lambda_length(x2, x3) == l1
    assert lambda_length(x1, x3) == l2
    assert lambda_length(x1, x2) == l3
    return x1, x2, x3


def brute_force_realize(
    chord, max_denominator: int = 100
) -> tuple[ExtendedRational, ExtendedRational, ExtendedRational] | None:
    """Exhaustive realization search, or None.

    Every realization can be moved so that x3 = 0/1, which pins the
    numerators of the other two vertices to the chord entries, and so that
    x2 is nonnegative; only denominators up to the bound and the sign of
    x1 remain free.
    """
    l1, l2, l3 = _validate_triple(chord)
    q = np.arange(max_denominator + 1)
    q1s = q[np.gcd(q, l2) == 1]
    q2s = q[np.gcd(q, l1) == 1]
    for sign in (1, -1):
        # lambda(x1, x2) = |sign*l2*q2 - q1*l1| must equal l3
        grid = np.abs(np.subtract.outer(-l1 * q1s, -sign * l2 * q2s))
        hits = np.argwhere(grid == l3)
        if hits.size:
            i, j = int(hits[0][0]), int(hits[0][1])
            x1 = ExtendedRational(sign * l2, int(q1s[i]))
            x2 = ExtendedRational(l1, int(q2s[j]))
            return x1, x2, ZERO
    return None


def markoff_children(triple) -> tuple[tuple[int, int, int], ...]:
    """The three Vieta exchanges of a Markoff triple, each sorted."""
    a, b, c = _validate_triple(triple)
    if a * a + b * b + c * c != 3 * a * b * c:
        raise ValueError(f"{triple!r} does not solve x^2+y^2+z^2 = 3xyz")
    out = []
    vals = (a, b, c)
    for i in range(3):
        u, v = (vals[j] for j in range(3) if j != i)
        child = list(vals)
        child[i] = 3 * u * v - vals[i]
        out.append(tuple(sorted(child)))
    return tuple(out)


def markoff_tree(depth: int) -> set[tuple[int, int, int]]:
    """Sorted Markoff triples within the given number of exchanges of
    (1, 1, 1)."""
    frontier = {(1, 1, 1)}
    seen = set(frontier)
    for _ in range(depth):
        frontier = {
            child for t in frontier for child in markoff_children(t)
        } - seen
        seen |= frontier
    return seen
