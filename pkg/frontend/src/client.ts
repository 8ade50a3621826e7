/**
 * DiskUI: wires transport, model, gestures, rendering, and audio together.
 *
 * The UI is a thin shell around the protocol.  It sends gestures, mirrors
 * tessellation replies into the model, routes tone replies to the audio
 * player, and repaints from served geometry.  Every number it displays or
 * schedules (frequencies, lambdas, fret positions) originates in a server
 * message.
 */

import { AudioSink, NullSink, TonePlayer } from "./audio.js";
import { toDisk, ViewTransform } from "./geometry.js";
import { GestureRecognizer } from "./gestures.js";
import { hitTest, HitTarget } from "./hittest.js";
import { lambdaOf, modelFromTessellation, vertexPositions, ViewportModel } from "./model.js";
import { ClientMessage, Point, PROTOCOL_VERSION, ServerMessage, TriangleAddress } from "./protocol.js";
import { Canvas2DLike, DrawnScene, render } from "./render.js";
import { Transport } from "./transport.js";

export interface DiskUIOptions {
  sink?: AudioSink;
  /** Wall clock in seconds; injectable for latency tests. */
  now?: () => number;
  ctx?: Canvas2DLike;
  view?: ViewTransform;
  hitRadiusPx?: number;
  dragThreshold?: number;
  onScene?: (scene: DrawnScene, model: ViewportModel) => void;
}

const DEFAULT_VIEW: ViewTransform = { cx: 300, cy: 300, scale: 280 };

export class DiskUI {
  readonly view: ViewTransform;
  model: ViewportModel | null = null;
  /** Fallback text shown when a tone cannot be played, e.g. "A4 / λ=48". */
  lastLabel: string | null = null;
  lastError: string | null = null;
  serverVersion: number | null = null;
  /** On-screen pedal toggle: while latched, plain clicks act as pedal taps. */
  pedalLatched = false;
  /** Seconds between receiving each tone message and its scheduled start. */
  readonly latencies: number[] = [];

  private readonly transport: Transport;
  private readonly player: TonePlayer;
  private readonly now: () => number;
  private readonly ctx: Canvas2DLike | null;
  private readonly hitRadiusPx: number;
  private readonly onScene: ((scene: DrawnScene, model: ViewportModel) => void) | null;
  private readonly recognizer: GestureRecognizer;
  private coords: Map<string, Point> | undefined;
  private readonly openHolds = new Set<number>();
  /** Lambda of the most recent single-edge gesture, for tone labels. */
  private lastEdgeLambda: number | undefined;

  constructor(transport: Transport, options: DiskUIOptions = {}) {
    this.transport = transport;
    this.now = options.now ?? (() => Date.now() / 1000);
    this.player = new TonePlayer(options.sink ?? new NullSink(), this.now);
    this.ctx = options.ctx ?? null;
    this.view = options.view ?? { ...DEFAULT_VIEW };
    this.hitRadiusPx = options.hitRadiusPx ?? 12;
    this.onScene = options.onScene ?? null;
    this.recognizer = new GestureRecognizer((p) => this.resolve(p), {
      ...(options.dragThreshold !== undefined ? { dragThreshold: options.dragThreshold } : {}),
    });
    transport.onMessage((msg) => this.onServer(msg));
  }

  /** Hit test in disk coordinates, radius converted from screen pixels. */
  resolve(p: Point): HitTarget | null {
    if (this.model === null) {
      return null;
    }
    return hitTest(this.model, p, this.hitRadiusPx / this.view.scale, this.coords);
  }

  hello(): void {
    this.send({ type: "hello", version: PROTOCOL_VERSION });
  }

  requestViewport(gen: number): void {
    this.send({ type: "viewport", gen });
  }

  setMode(equivariant: boolean, group?: string): void {
    this.send(
      group === undefined ? { type: "mode", equivariant } : { type: "mode", equivariant, group },
    );
  }

  /** Explicit triangle affordance (e.g. a face list in equivariant mode). */
  tapTriangle(target: TriangleAddress | number): void {
    if (typeof target === "number") {
      this.send({ type: "triangle_tap", tri_id: target });
    } else {
      this.send({ type: "triangle_tap", vertices: target });
    }
  }

  setPedal(on: boolean): void {
    this.pedalLatched = on;
  }

  pointerDown(sx: number, sy: number, t: number, shift = false): void {
    const [x, y] = toDisk(this.view, [sx, sy]);
    this.sendAll(this.recognizer.pointerDown({ x, y, t, shift: shift || this.pedalLatched }));
  }

  pointerMove(sx: number, sy: number, t: number): void {
    const [x, y] = toDisk(this.view, [sx, sy]);
    this.sendAll(this.recognizer.pointerMove({ x, y, t }));
  }

  pointerUp(sx: number, sy: number, t: number): void {
    const [x, y] = toDisk(this.view, [sx, sy]);
    this.sendAll(this.recognizer.pointerUp({ x, y, t }));
  }

  private sendAll(msgs: ClientMessage[]): void {
    for (const msg of msgs) {
      this.send(msg);
    }
  }

  private send(msg: ClientMessage): void {
    if (
      (msg.type === "tap" || msg.type === "pedal_tap" || msg.type === "hold_start") &&
      this.model !== null
    ) {
      const target: { a?: string; b?: string; edge_id?: number } = {};
      if ("edge" in msg) {
        [target.a, target.b] = msg.edge;
      } else {
        target.edge_id = msg.edge_id;
      }
      this.lastEdgeLambda = lambdaOf(this.model, target);
    } else if (msg.type === "triangle_tap") {
      this.lastEdgeLambda = undefined;
    }
    this.transport.send(msg);
  }

  private onServer(msg: ServerMessage): void {
    const receivedAt = this.now();
    switch (msg.type) {
      case "hello":
        this.serverVersion = msg.version;
        return;
      case "error":
        this.lastError = msg.reason;
        return;
      case "tessellation": {
        const next = modelFromTessellation(msg);
        this.coords = next.mode === "universal" ? vertexPositions(next) : undefined;
        this.model = next;
        this.repaint();
        return;
      }
      case "tone": {
        const result = this.player.handleTone(msg, this.lastEdgeLambda);
        this.record(result, receivedAt);
        return;
      }
      case "tone_start": {
        const open = !this.openHolds.has(msg.hold_id);
        const result = this.player.handleToneStart(msg, open, this.lastEdgeLambda);
        this.openHolds.add(msg.hold_id);
        this.record(result, receivedAt);
        this.sendAll(this.recognizer.bindHold(msg.hold_id));
        return;
      }
      case "tone_stop": {
        this.player.handleToneStop(msg);
        this.openHolds.delete(msg.hold_id);
        return;
      }
    }
  }

  private record(result: { kind: string; at?: number; label?: string }, receivedAt: number): void {
    if (result.kind === "scheduled" && result.at !== undefined) {
      this.latencies.push(result.at - receivedAt);
    } else if (result.label !== undefined && result.label !== "") {
      this.lastLabel = result.label;
    }
  }

  private repaint(): void {
    if (this.model === null) {
      return;
    }
    if (this.ctx !== null) {
      const scene = render(this.model, this.ctx, this.view);
      if (this.onScene !== null) {
        this.onScene(scene, this.model);
      }
    } else if (this.onScene !== null) {
      const scene = render(this.model, new NullCanvas(), this.view);
      this.onScene(scene, this.model);
    }
  }

  close(): void {
    this.transport.close();
  }
}

/** Throwaway canvas so onScene works headless without a real context. */
class NullCanvas implements Canvas2DLike {
  strokeStyle = "";
  fillStyle = "";
  lineWidth = 1;
  beginPath(): void {}
  moveTo(): void {}
  lineTo(): void {}
  arc(): void {}
  stroke(): void {}
  fill(): void {}
}
