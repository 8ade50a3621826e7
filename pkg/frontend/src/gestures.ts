/**
 * Pointer gesture recognition.
 *
 * Bindings: click resolves to tap, shift+click to pedal_tap, click on a face
 * to triangle_tap, drag along an edge to hold_start / hold_move / hold_stop.
 * A gesture that resolves to no model element produces no message at all.
 *
 * Every message built here copies addresses and fret coordinates out of the
 * hit target, which in turn came from served data; the recognizer invents
 * nothing but the gesture classification itself.
 */

import { fretParameter } from "./geometry.js";
import { HitTarget } from "./hittest.js";
import { ClientMessage, EdgeData, Point } from "./protocol.js";

export interface PointerSample {
  x: number;
  y: number;
  /** Monotone wall-clock seconds; out-of-order samples are dropped. */
  t: number;
  shift?: boolean;
}

export type HitTestFn = (p: Point) => HitTarget | null;

/** Message for a completed tap-like gesture on a target, or null. */
export function tapMessage(target: HitTarget, pedal: boolean): ClientMessage | null {
  switch (target.kind) {
    case "edge": {
      const edge: [string, string] = [target.edge.a, target.edge.b];
      return pedal ? { type: "pedal_tap", edge } : { type: "tap", edge };
    }
    case "lift-edge": {
      const edge_id = target.edge.edge_id;
      return pedal ? { type: "pedal_tap", edge_id } : { type: "tap", edge_id };
    }
    case "triangle":
      return { type: "triangle_tap", vertices: target.triangle };
    case "quotient-triangle":
      return { type: "triangle_tap", tri_id: target.triangle.tri_id };
  }
}

/** hold_start for a drag beginning on a universal edge at fret coordinate d. */
export function holdStartMessage(target: HitTarget, d: number): ClientMessage | null {
  if (target.kind !== "edge") {
    return null;
  }
  return { type: "hold_start", edge: [target.edge.a, target.edge.b], d };
}

type State =
  | { name: "idle" }
  | { name: "pressed"; target: HitTarget | null; start: PointerSample; pedal: boolean }
  | { name: "holding"; edge: EdgeData; holdId: number | null; pendingD: number | null };

export interface GestureOptions {
  /** Pointer travel (disk units) that turns a press into a drag. */
  dragThreshold?: number;
}

/**
 * Stateful recognizer.  Feed it pointer samples; each call returns the
 * protocol messages the gesture produced, in order.  When the server answers
 * a hold_start with a tone_start, call bindHold with the assigned hold_id;
 * moves observed before that are buffered (latest wins) and flushed then.
 */
export class GestureRecognizer {
  private state: State = { name: "idle" };
  private lastT = -Infinity;
  private pendingStop = false;
  private readonly dragThreshold: number;
  private readonly hitTestFn: HitTestFn;

  constructor(hitTestFn: HitTestFn, options: GestureOptions = {}) {
    this.hitTestFn = hitTestFn;
    this.dragThreshold = options.dragThreshold ?? 0.02;
  }

  get holding(): boolean {
    return this.state.name === "holding";
  }

  private accept(sample: PointerSample): boolean {
    if (sample.t <= this.lastT) {
      return false;
    }
    this.lastT = sample.t;
    return true;
  }

  pointerDown(sample: PointerSample): ClientMessage[] {
    if (!this.accept(sample)) {
      return [];
    }
    const target = this.hitTestFn([sample.x, sample.y]);
    this.state = { name: "pressed", target, start: sample, pedal: sample.shift === true };
    return [];
  }

  pointerMove(sample: PointerSample): ClientMessage[] {
    if (!this.accept(sample)) {
      return [];
    }
    if (this.state.name === "pressed") {
      const { target, start } = this.state;
      if (target === null || target.kind !== "edge") {
        return [];
      }
      const travel = Math.hypot(sample.x - start.x, sample.y - start.y);
      if (travel < this.dragThreshold) {
        return [];
      }
      const d = fretParameter(target.edge.frets, [sample.x, sample.y]);
      this.state = { name: "holding", edge: target.edge, holdId: null, pendingD: null };
      return [{ type: "hold_start", edge: [target.edge.a, target.edge.b], d }];
    }
    if (this.state.name === "holding") {
      const d = fretParameter(this.state.edge.frets, [sample.x, sample.y]);
      if (this.state.holdId === null) {
        this.state.pendingD = d;
        return [];
      }
      return [{ type: "hold_move", hold_id: this.state.holdId, d }];
    }
    return [];
  }

  pointerUp(sample: PointerSample): ClientMessage[] {
    this.accept(sample);
    const state = this.state;
    this.state = { name: "idle" };
    if (state.name === "pressed") {
      if (state.target === null) {
        return [];
      }
      const msg = tapMessage(state.target, state.pedal);
      return msg === null ? [] : [msg];
    }
    if (state.name === "holding") {
      if (state.holdId === null) {
        this.pendingStop = true;
        return [];
      }
      return [{ type: "hold_stop", hold_id: state.holdId }];
    }
    return [];
  }

  /** Attach the server-assigned hold id; returns any buffered messages. */
  bindHold(holdId: number): ClientMessage[] {
    if (this.pendingStop) {
      this.pendingStop = false;
      return [{ type: "hold_stop", hold_id: holdId }];
    }
    if (this.state.name !== "holding") {
      return [];
    }
    this.state.holdId = holdId;
    if (this.state.pendingD === null) {
      return [];
    }
    const d = this.state.pendingD;
    this.state.pendingD = null;
    return [{ type: "hold_move", hold_id: holdId, d }];
  }
}
