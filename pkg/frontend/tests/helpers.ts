/** Shared test utilities: fixture loading and recording fakes. */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { AudioSink } from "../src/audio.js";
import { Canvas2DLike } from "../src/render.js";
import {
  parseServerMessage,
  ServerMessage,
  TessellationMessage,
  ToneMessage,
  ToneStartMessage,
  ToneStopMessage,
  UniversalTessellation,
} from "../src/protocol.js";

export function fixtureRaw(name: string): unknown {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf8"));
}

export function fixtureMessage(name: string): ServerMessage {
  return parseServerMessage(fixtureRaw(name));
}

export function universalGen1(): UniversalTessellation {
  const msg = fixtureMessage("universal_gen1.json");
  if (msg.type !== "tessellation" || msg.mode !== "universal") {
    throw new Error("unexpected fixture shape");
  }
  return msg;
}

export function flipGen1(): { tessellation: TessellationMessage; tone: ToneMessage } {
  const doc = fixtureRaw("flip_gen1.json") as { tessellation: unknown; tone: unknown };
  return {
    tessellation: parseServerMessage(doc.tessellation) as TessellationMessage,
    tone: parseServerMessage(doc.tone) as ToneMessage,
  };
}

export function equivariantCommutator(): TessellationMessage {
  return fixtureMessage("equivariant_commutator.json") as TessellationMessage;
}

export function chordTones(): ToneMessage[] {
  return (fixtureRaw("chord_tones.json") as unknown[]).map(
    (d) => parseServerMessage(d) as ToneMessage,
  );
}

export function holdTones(): [ToneStartMessage, ToneStartMessage, ToneStopMessage] {
  const docs = (fixtureRaw("hold_tones.json") as unknown[]).map(parseServerMessage);
  return docs as [ToneStartMessage, ToneStartMessage, ToneStopMessage];
}

export function untunedTap(): { viewport: UniversalTessellation; tone: ToneMessage } {
  const doc = fixtureRaw("untuned_tap.json") as { viewport: unknown; tone: unknown };
  return {
    viewport: parseServerMessage(doc.viewport) as UniversalTessellation,
    tone: parseServerMessage(doc.tone) as ToneMessage,
  };
}

export function toneA4(): ToneMessage {
  return fixtureMessage("tone_a4.json") as ToneMessage;
}

export type SinkCall =
  | { op: "play"; freq: number; ch: number; dur: number; at: number }
  | { op: "start"; voice: number; freq: number; ch: number; at: number }
  | { op: "move"; voice: number; freq: number; at: number }
  | { op: "stop"; voice: number; at: number };

export class RecordingSink implements AudioSink {
  readonly available = true;
  readonly calls: SinkCall[] = [];

  playTone(freq: number, ch: number, dur: number, at: number): void {
    this.calls.push({ op: "play", freq, ch, dur, at });
  }
  startVoice(voice: number, freq: number, ch: number, at: number): void {
    this.calls.push({ op: "start", voice, freq, ch, at });
  }
  moveVoice(voice: number, freq: number, at: number): void {
    this.calls.push({ op: "move", voice, freq, at });
  }
  stopVoice(voice: number, at: number): void {
    this.calls.push({ op: "stop", voice, at });
  }
}

export class RecordingCanvas implements Canvas2DLike {
  strokeStyle = "";
  fillStyle = "";
  lineWidth = 1;
  readonly ops: string[] = [];

  beginPath(): void {
    this.ops.push("beginPath");
  }
  moveTo(x: number, y: number): void {
    this.ops.push(`moveTo ${x.toFixed(1)},${y.toFixed(1)}`);
  }
  lineTo(x: number, y: number): void {
    this.ops.push(`lineTo ${x.toFixed(1)},${y.toFixed(1)}`);
  }
  arc(x: number, y: number, radius: number): void {
    this.ops.push(`arc ${x.toFixed(1)},${y.toFixed(1)} r=${radius.toFixed(1)}`);
  }
  stroke(): void {
    this.ops.push(`stroke ${this.strokeStyle}`);
  }
  fill(): void {
    this.ops.push(`fill ${this.fillStyle}`);
  }
}

/** Manually advanced clock for latency assertions. */
export class FakeClock {
  t = 0;
  now = (): number => this.t;
}
