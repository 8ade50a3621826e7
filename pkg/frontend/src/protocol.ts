/**
 * Wire protocol of the horomonica session server: newline delimited JSON
 * over a local stream socket.  The types here mirror the server schemas
 * exactly; the client never extends them.
 */

export const PROTOCOL_VERSION = 1;

/**
 * Hyperbolic distance between adjacent frets.  Fret j sits at signed
 * distance j * FRET_SPACING from the distinguished fret toward the
 * oriented head, so a pointer position interpolated between served fret
 * points converts to the d parameter of hold messages.  This constant is
 * part of the wire contract, like the schemas themselves.
 */
export const FRET_SPACING = 0.5 * Math.exp(0.5);

/** "p/q" with "1/0" for the point at infinity. */
export type RationalName = string;

export type EdgeAddress = [RationalName, RationalName];
export type TriangleAddress = [RationalName, RationalName, RationalName];

export type Point = [number, number];

export interface ArcGeometry {
  kind: "arc" | "diameter";
  start: Point;
  end: Point;
  center?: Point;
  radius?: number;
}

/** One edge of a universal viewport: geometry plus musical labels. */
export interface EdgeData {
  a: RationalName;
  b: RationalName;
  lambda: number;
  orient: EdgeAddress;
  arc: ArcGeometry;
  frets: Point[];
}

export interface QuotientEdgeData {
  edge_id: number;
  lambda: number;
}

export interface QuotientTriangleData {
  tri_id: number;
  darts: number[];
  chord: number[];
}

export interface LiftEdgeData {
  a: RationalName;
  b: RationalName;
  lambda: number;
  edge_id: number;
  arc: ArcGeometry;
}

// ------------------------------------------------------------- client side

export type ClientMessage =
  | { type: "hello"; version: number }
  | { type: "viewport"; gen: number }
  | { type: "tap"; edge: EdgeAddress }
  | { type: "tap"; edge_id: number }
  | { type: "pedal_tap"; edge: EdgeAddress }
  | { type: "pedal_tap"; edge_id: number }
  | { type: "hold_start"; edge: EdgeAddress; d: number }
  | { type: "hold_start"; edge_id: number; d: number }
  | { type: "hold_move"; hold_id: number; d: number }
  | { type: "hold_stop"; hold_id: number }
  | { type: "triangle_tap"; vertices: TriangleAddress }
  | { type: "triangle_tap"; tri_id: number }
  | { type: "mode"; equivariant: boolean; group?: string };

// ------------------------------------------------------------- server side

export type Mode = "universal" | "equivariant";

export interface ToneMessage {
  type: "tone";
  freq: number;
  dur: number;
  ch: number;
  t: number;
  mode: Mode;
}

export interface ToneStartMessage {
  type: "tone_start";
  hold_id: number;
  freq: number;
  ch: number;
  t: number;
  mode: Mode;
}

export interface ToneStopMessage {
  type: "tone_stop";
  hold_id: number;
  t: number;
  mode: Mode;
}

export interface UniversalTessellation {
  type: "tessellation";
  mode: "universal";
  generation: number;
  edges: EdgeData[];
  triangles: TriangleAddress[];
}

export interface EquivariantTessellation {
  type: "tessellation";
  mode: "equivariant";
  group: string;
  edges: QuotientEdgeData[];
  triangles: QuotientTriangleData[];
  lift: { depth: number; edges: LiftEdgeData[] };
}

export type TessellationMessage = UniversalTessellation | EquivariantTessellation;

export interface HelloMessage {
  type: "hello";
  version: number;
  mode: Mode;
}

export interface ErrorMessage {
  type: "error";
  reason: string;
  mode: Mode;
}

export type ServerMessage =
  | HelloMessage
  | ToneMessage
  | ToneStartMessage
  | ToneStopMessage
  | TessellationMessage
  | ErrorMessage;

// ----------------------------------------------------------------- guards

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

export function parseServerMessage(value: unknown): ServerMessage {
  if (!isObject(value) || typeof value["type"] !== "string") {
    throw new Error("server message must be an object with a type");
  }
  const type = value["type"];
  switch (type) {
    case "hello":
    case "tone":
    case "tone_start":
    case "tone_stop":
    case "tessellation":
    case "error":
      return value as unknown as ServerMessage;
    default:
      throw new Error(`unknown server message type ${JSON.stringify(type)}`);
  }
}

export function isUniversal(
  msg: TessellationMessage,
): msg is UniversalTessellation {
  return msg.mode === "universal";
}

export function encodeLine(msg: ClientMessage | ServerMessage): string {
  return JSON.stringify(msg) + "\n";
}

/**
 * Incremental decoder for newline delimited JSON; feed arbitrary chunks,
 * collect whole messages.
 */
export class LineDecoder {
  private buffer = "";

  /** Append a chunk and return the complete lines it unlocked, unparsed. */
  pushRaw(chunk: string): string[] {
    this.buffer += chunk;
    const out: string[] = [];
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) {
        break;
      }
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (line.length > 0) {
        out.push(line);
      }
    }
    return out;
  }

  push(chunk: string): ServerMessage[] {
    return this.pushRaw(chunk).map((line) => parseServerMessage(JSON.parse(line)));
  }
}
