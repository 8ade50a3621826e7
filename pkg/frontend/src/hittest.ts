/**
 * Deterministic hit testing against the served viewport geometry.
 *
 * The nearest edge within the hit radius wins; exact ties go to the earlier
 * edge in the server's list, so repeated queries at one point always resolve
 * the same way.  A pointer inside a face but near no edge resolves to the
 * triangle.  Outside both, the hit is null and no message is ever produced
 * from it.
 */

import { distanceToArc, fretParameter, norm, sideOf } from "./geometry.js";
import { findEdge, UniversalModel, EquivariantModel, ViewportModel } from "./model.js";
import {
  EdgeData,
  LiftEdgeData,
  Point,
  QuotientTriangleData,
  TriangleAddress,
} from "./protocol.js";

export type HitTarget =
  | { kind: "edge"; edge: EdgeData; d: number }
  | { kind: "lift-edge"; edge: LiftEdgeData }
  | { kind: "triangle"; triangle: TriangleAddress }
  | { kind: "quotient-triangle"; triangle: QuotientTriangleData };

function nearestUniversalEdge(
  model: UniversalModel,
  p: Point,
  radius: number,
): { edge: EdgeData; distance: number } | null {
  let best: { edge: EdgeData; distance: number } | null = null;
  for (const edge of model.edges) {
    const distance = distanceToArc(p, edge.arc);
    if (distance <= radius && (best === null || distance < best.distance)) {
      best = { edge, distance };
    }
  }
  return best;
}

function nearestLiftEdge(
  model: EquivariantModel,
  p: Point,
  radius: number,
): { edge: LiftEdgeData; distance: number } | null {
  let best: { edge: LiftEdgeData; distance: number } | null = null;
  for (const edge of model.liftEdges) {
    const distance = distanceToArc(p, edge.arc);
    if (distance <= radius && (best === null || distance < best.distance)) {
      best = { edge, distance };
    }
  }
  return best;
}

/**
 * Point-in-face test for an ideal triangle, using only served geometry.  For
 * each side we compare which side of the geodesic the point lies on with
 * which side the opposite vertex lies on; the interior agrees with all three.
 * Sides whose edge left the viewport fall back to the straight chord between
 * the served vertex positions.
 */
export function triangleContains(
  model: UniversalModel,
  vertices: TriangleAddress,
  coords: Map<string, Point>,
  p: Point,
): boolean {
  for (let i = 0; i < 3; i++) {
    const a = vertices[i]!;
    const b = vertices[(i + 1) % 3]!;
    const c = vertices[(i + 2) % 3]!;
    const opposite = coords.get(c);
    if (opposite === undefined) {
      return false;
    }
    const edge = findEdge(model, a, b);
    let geometry = edge?.arc;
    if (geometry === undefined) {
      const pa = coords.get(a);
      const pb = coords.get(b);
      if (pa === undefined || pb === undefined) {
        return false;
      }
      geometry = { kind: "diameter", start: pa, end: pb };
    }
    const sp = sideOf(p, geometry);
    const sc = sideOf(opposite, geometry);
    if (sp === 0) {
      continue;
    }
    if (sp !== sc) {
      return false;
    }
  }
  return true;
}

/**
 * Resolve a pointer position to a model element, or null.
 *
 * `coords` should come from vertexPositions(model) for universal models; it
 * is only consulted for triangle tests.
 */
export function hitTest(
  model: ViewportModel,
  p: Point,
  radius: number,
  coords?: Map<string, Point>,
): HitTarget | null {
  if (model.mode === "universal") {
    const edgeHit = nearestUniversalEdge(model, p, radius);
    if (edgeHit !== null) {
      return { kind: "edge", edge: edgeHit.edge, d: fretParameter(edgeHit.edge.frets, p) };
    }
    // Faces live inside the disk; the side conditions alone would also
    // admit the unbounded region beyond the rim.
    if (coords !== undefined && norm(p) <= 1) {
      for (const triangle of model.triangles) {
        if (triangleContains(model, triangle, coords, p)) {
          return { kind: "triangle", triangle };
        }
      }
    }
    return null;
  }
  const liftHit = nearestLiftEdge(model, p, radius);
  if (liftHit !== null) {
    return { kind: "lift-edge", edge: liftHit.edge };
  }
  return null;
}
