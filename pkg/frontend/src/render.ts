/**
 * Canvas rendering of the viewport model.
 *
 * Drawing consumes only served geometry: arcs, fret points, and orientation
 * come straight from the model.  Edge color is a pure function of protocol
 * data (the oriented head's boundary angle in universal mode, the orbit's
 * edge_id in equivariant mode), so tests can recompute it without a canvas.
 * render() also returns a scene summary describing what was drawn.
 */

import { endpointGapToUnitCircle, toScreen, ViewTransform } from "./geometry.js";
import { EquivariantModel, UniversalModel, ViewportModel } from "./model.js";
import { ArcGeometry, EdgeData, Point } from "./protocol.js";

export interface Canvas2DLike {
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(
    x: number,
    y: number,
    radius: number,
    startAngle: number,
    endAngle: number,
    anticlockwise?: boolean,
  ): void;
  stroke(): void;
  fill(): void;
}

/** Hue (degrees) derived from the edge's oriented head boundary point. */
export function orientationHue(edge: EdgeData): number {
  const head = edge.arc.end;
  const angle = Math.atan2(head[1], head[0]);
  const turns = angle / (2 * Math.PI);
  return Math.round(((turns % 1) + 1) * 360) % 360;
}

export function universalEdgeColor(edge: EdgeData): string {
  return `hsl(${orientationHue(edge)}, 70%, 45%)`;
}

/** Orbit color: every lift copy of one quotient edge shares this exactly. */
export function orbitColor(edgeId: number): string {
  const hue = Math.round(edgeId * 137.508) % 360;
  return `hsl(${hue}, 70%, 45%)`;
}

export interface DrawnEdgeSummary {
  color: string;
  kind: "arc" | "diameter";
  edgeId?: number;
  /** Endpoint distance from the unit circle, in screen pixels. */
  endpointGapPx: number;
}

export interface DrawnScene {
  unitCircle: boolean;
  edges: DrawnEdgeSummary[];
  fretTicks: number;
  distinguishedMarks: number;
  maxEndpointGapPx: number;
}

function wrap(theta: number): number {
  while (theta <= -Math.PI) {
    theta += 2 * Math.PI;
  }
  while (theta > Math.PI) {
    theta -= 2 * Math.PI;
  }
  return theta;
}

function strokeGeodesic(ctx: Canvas2DLike, view: ViewTransform, arc: ArcGeometry): void {
  ctx.beginPath();
  if (arc.kind === "diameter") {
    const s = toScreen(view, arc.start);
    const e = toScreen(view, arc.end);
    ctx.moveTo(s[0], s[1]);
    ctx.lineTo(e[0], e[1]);
  } else {
    if (!arc.center || arc.radius === undefined) {
      throw new Error("arc geometry missing center");
    }
    const c = toScreen(view, arc.center);
    const s = toScreen(view, arc.start);
    const e = toScreen(view, arc.end);
    const a0 = Math.atan2(s[1] - c[1], s[0] - c[0]);
    const a1 = Math.atan2(e[1] - c[1], e[0] - c[0]);
    const sweep = wrap(a1 - a0);
    ctx.arc(c[0], c[1], arc.radius * view.scale, a0, a1, sweep < 0);
  }
  ctx.stroke();
}

function drawFretTick(ctx: Canvas2DLike, p: Point): void {
  ctx.beginPath();
  ctx.arc(p[0], p[1], 2.5, 0, 2 * Math.PI);
  ctx.fill();
}

function drawCross(ctx: Canvas2DLike, p: Point): void {
  const r = 4;
  ctx.beginPath();
  ctx.moveTo(p[0] - r, p[1] - r);
  ctx.lineTo(p[0] + r, p[1] + r);
  ctx.moveTo(p[0] - r, p[1] + r);
  ctx.lineTo(p[0] + r, p[1] - r);
  ctx.stroke();
}

function renderUniversal(
  model: UniversalModel,
  ctx: Canvas2DLike,
  view: ViewTransform,
): DrawnScene {
  const scene: DrawnScene = {
    unitCircle: true,
    edges: [],
    fretTicks: 0,
    distinguishedMarks: 0,
    maxEndpointGapPx: 0,
  };
  for (const edge of model.edges) {
    const color = universalEdgeColor(edge);
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 1.5;
    strokeGeodesic(ctx, view, edge.arc);
    const mid = (edge.frets.length - 1) / 2;
    edge.frets.forEach((fret, index) => {
      const p = toScreen(view, fret);
      if (index === mid) {
        drawCross(ctx, p);
        scene.distinguishedMarks += 1;
      } else {
        drawFretTick(ctx, p);
        scene.fretTicks += 1;
      }
    });
    const gapPx = endpointGapToUnitCircle(edge.arc) * view.scale;
    scene.edges.push({ color, kind: edge.arc.kind, endpointGapPx: gapPx });
    scene.maxEndpointGapPx = Math.max(scene.maxEndpointGapPx, gapPx);
  }
  return scene;
}

function renderEquivariant(
  model: EquivariantModel,
  ctx: Canvas2DLike,
  view: ViewTransform,
): DrawnScene {
  const scene: DrawnScene = {
    unitCircle: true,
    edges: [],
    fretTicks: 0,
    distinguishedMarks: 0,
    maxEndpointGapPx: 0,
  };
  for (const edge of model.liftEdges) {
    const color = orbitColor(edge.edge_id);
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    strokeGeodesic(ctx, view, edge.arc);
    const gapPx = endpointGapToUnitCircle(edge.arc) * view.scale;
    scene.edges.push({ color, kind: edge.arc.kind, edgeId: edge.edge_id, endpointGapPx: gapPx });
    scene.maxEndpointGapPx = Math.max(scene.maxEndpointGapPx, gapPx);
  }
  return scene;
}

/** Draw the model and return a summary of what went on screen. */
export function render(model: ViewportModel, ctx: Canvas2DLike, view: ViewTransform): DrawnScene {
  ctx.strokeStyle = "#444";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.arc(view.cx, view.cy, view.scale, 0, 2 * Math.PI);
  ctx.stroke();
  return model.mode === "universal"
    ? renderUniversal(model, ctx, view)
    : renderEquivariant(model, ctx, view);
}
