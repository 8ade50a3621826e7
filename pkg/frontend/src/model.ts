/**
 * Viewport model: an immutable mirror of the last tessellation message.
 *
 * The model stores the server's edge and triangle lists verbatim.  It never
 * invents geometry, lambdas, or adjacency; every lookup below reads data the
 * server shipped.  Updates replace the whole model atomically.
 */

import {
  EdgeData,
  EquivariantTessellation,
  LiftEdgeData,
  Point,
  QuotientEdgeData,
  QuotientTriangleData,
  RationalName,
  TessellationMessage,
  TriangleAddress,
  UniversalTessellation,
} from "./protocol.js";

export interface UniversalModel {
  mode: "universal";
  generation: number;
  edges: EdgeData[];
  triangles: TriangleAddress[];
}

export interface EquivariantModel {
  mode: "equivariant";
  group: string;
  edges: QuotientEdgeData[];
  triangles: QuotientTriangleData[];
  liftDepth: number;
  liftEdges: LiftEdgeData[];
}

export type ViewportModel = UniversalModel | EquivariantModel;

function fromUniversal(msg: UniversalTessellation): UniversalModel {
  return {
    mode: "universal",
    generation: msg.generation,
    edges: msg.edges.slice(),
    triangles: msg.triangles.map((t) => t.slice() as TriangleAddress),
  };
}

function fromEquivariant(msg: EquivariantTessellation): EquivariantModel {
  return {
    mode: "equivariant",
    group: msg.group,
    edges: msg.edges.slice(),
    triangles: msg.triangles.slice(),
    liftDepth: msg.lift.depth,
    liftEdges: msg.lift.edges.slice(),
  };
}

/** Build a fresh model from a tessellation message (atomic swap point). */
export function modelFromTessellation(msg: TessellationMessage): ViewportModel {
  return msg.mode === "universal" ? fromUniversal(msg) : fromEquivariant(msg);
}

function samePair(a1: RationalName, b1: RationalName, a2: RationalName, b2: RationalName): boolean {
  return (a1 === a2 && b1 === b2) || (a1 === b2 && b1 === a2);
}

/** Find a universal edge by its unordered endpoint names. */
export function findEdge(
  model: UniversalModel,
  a: RationalName,
  b: RationalName,
): EdgeData | undefined {
  return model.edges.find((e) => samePair(e.a, e.b, a, b));
}

export function hasEdge(model: UniversalModel, a: RationalName, b: RationalName): boolean {
  return findEdge(model, a, b) !== undefined;
}

/**
 * Boundary coordinates of the viewport's vertices, read off the served arc
 * endpoints: each edge's arc start sits at its orientation tail and its arc
 * end at its orientation head.
 */
export function vertexPositions(model: UniversalModel): Map<RationalName, Point> {
  const coords = new Map<RationalName, Point>();
  for (const edge of model.edges) {
    const [tail, head] = edge.orient;
    if (!coords.has(tail)) {
      coords.set(tail, edge.arc.start);
    }
    if (!coords.has(head)) {
      coords.set(head, edge.arc.end);
    }
  }
  return coords;
}

/** Lambda of a served edge, or undefined when the model has no such edge. */
export function lambdaOf(
  model: ViewportModel,
  target: { a?: RationalName; b?: RationalName; edge_id?: number },
): number | undefined {
  if (model.mode === "universal") {
    if (target.a === undefined || target.b === undefined) {
      return undefined;
    }
    return findEdge(model, target.a, target.b)?.lambda;
  }
  return model.edges.find((e) => e.edge_id === target.edge_id)?.lambda;
}
