/**
 * Euclidean helpers over protocol-supplied disk geometry.  Everything here
 * operates on coordinates the server sent; the client never derives disk
 * positions from rational names.
 */

import { ArcGeometry, FRET_SPACING, Point } from "./protocol.js";

export function dist(p: Point, q: Point): number {
  return Math.hypot(p[0] - q[0], p[1] - q[1]);
}

export function norm(p: Point): number {
  return Math.hypot(p[0], p[1]);
}

/** Distance from a point to the segment [a, b]. */
export function distanceToSegment(p: Point, a: Point, b: Point): number {
  const vx = b[0] - a[0];
  const vy = b[1] - a[1];
  const len2 = vx * vx + vy * vy;
  if (len2 === 0) {
    return dist(p, a);
  }
  let t = ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2;
  t = Math.max(0, Math.min(1, t));
  return dist(p, [a[0] + t * vx, a[1] + t * vy]);
}

function angleAt(center: Point, p: Point): number {
  return Math.atan2(p[1] - center[1], p[0] - center[0]);
}

/** Normalize an angle difference into (-pi, pi]. */
function wrap(theta: number): number {
  while (theta <= -Math.PI) {
    theta += 2 * Math.PI;
  }
  while (theta > Math.PI) {
    theta -= 2 * Math.PI;
  }
  return theta;
}

export interface ArcSpan {
  center: Point;
  radius: number;
  startAngle: number;
  /** Signed sweep from startAngle; the geodesic is always the minor arc. */
  sweep: number;
}

/**
 * Angular span of a geodesic arc.  A circle orthogonal to the unit circle
 * meets the disk in its minor arc, so the sweep is the angle difference
 * wrapped into (-pi, pi].
 */
export function arcSpan(arc: ArcGeometry): ArcSpan {
  if (arc.kind !== "arc" || !arc.center || arc.radius === undefined) {
    throw new Error("arcSpan needs circular arc geometry");
  }
  const startAngle = angleAt(arc.center, arc.start);
  const endAngle = angleAt(arc.center, arc.end);
  return {
    center: arc.center,
    radius: arc.radius,
    startAngle,
    sweep: wrap(endAngle - startAngle),
  };
}

/** Distance from a point to a geodesic arc (clamped to its span). */
export function distanceToArc(p: Point, arc: ArcGeometry): number {
  if (arc.kind === "diameter") {
    return distanceToSegment(p, arc.start, arc.end);
  }
  const span = arcSpan(arc);
  const theta = wrap(angleAt(span.center, p) - span.startAngle);
  const inside =
    span.sweep >= 0 ? theta >= 0 && theta <= span.sweep : theta <= 0 && theta >= span.sweep;
  if (inside) {
    return Math.abs(dist(p, span.center) - span.radius);
  }
  return Math.min(dist(p, arc.start), dist(p, arc.end));
}

/**
 * Which side of the geodesic a point lies on, as a sign matching
 * `sideOf(reference)`.  For arcs the sides are inside/outside the circle;
 * for diameters they are the half planes of the chord.
 */
export function sideOf(p: Point, arc: ArcGeometry): number {
  if (arc.kind === "diameter") {
    const cross =
      (arc.end[0] - arc.start[0]) * (p[1] - arc.start[1]) -
      (arc.end[1] - arc.start[1]) * (p[0] - arc.start[0]);
    return Math.sign(cross);
  }
  if (!arc.center || arc.radius === undefined) {
    throw new Error("arc geometry missing center");
  }
  return Math.sign(dist(p, arc.center) - arc.radius);
}

/**
 * Fret-relative coordinate of a pointer along an edge.
 *
 * The served fret list places fret j at index mid + j (mid the middle
 * index, the distinguished fret) and at hyperbolic distance j * FRET_SPACING
 * toward the oriented head.  Projecting onto the fret polyline and
 * interpolating the index therefore yields d in the server's units.
 */
export function fretParameter(frets: Point[], p: Point): number {
  if (frets.length < 2) {
    throw new Error("an edge ships at least two fret points");
  }
  let best = Infinity;
  let bestIndex = 0;
  for (let i = 0; i + 1 < frets.length; i++) {
    const a = frets[i]!;
    const b = frets[i + 1]!;
    const vx = b[0] - a[0];
    const vy = b[1] - a[1];
    const len2 = vx * vx + vy * vy;
    let t = len2 === 0 ? 0 : ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2;
    t = Math.max(0, Math.min(1, t));
    const q: Point = [a[0] + t * vx, a[1] + t * vy];
    const d = dist(p, q);
    if (d < best) {
      best = d;
      bestIndex = i + t;
    }
  }
  const mid = (frets.length - 1) / 2;
  return (bestIndex - mid) * FRET_SPACING;
}

/**
 * How far (in disk units) the arc endpoints are from the unit circle.
 * Render tests scale this by the view to assert sub-pixel contact.
 */
export function endpointGapToUnitCircle(arc: ArcGeometry): number {
  return Math.max(Math.abs(norm(arc.start) - 1), Math.abs(norm(arc.end) - 1));
}

export interface ViewTransform {
  cx: number;
  cy: number;
  scale: number;
}

export function toScreen(view: ViewTransform, p: Point): Point {
  return [view.cx + view.scale * p[0], view.cy - view.scale * p[1]];
}

export function toDisk(view: ViewTransform, p: Point): Point {
  return [(p[0] - view.cx) / view.scale, (view.cy - p[1]) / view.scale];
}
