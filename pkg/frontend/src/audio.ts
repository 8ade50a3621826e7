/**
 * Tone playback routing.
 *
 * Server tone messages are scheduled on an AudioSink as soon as they arrive;
 * held tones map to per-hold voices so overlapping holds never steal each
 * other's oscillator.  When no sink is available the player falls back to a
 * text label such as "A4 / λ=48", combining the nearest equal-tempered note
 * name for the served frequency with the lambda the caller read off the
 * model.  Frequencies are never computed locally.
 */

import { ToneMessage, ToneStartMessage, ToneStopMessage } from "./protocol.js";

export interface AudioSink {
  readonly available: boolean;
  /** One-shot tone: schedule freq on channel ch for dur seconds at time at. */
  playTone(freq: number, ch: number, dur: number, at: number): void;
  /** Open a continuous voice keyed by the server's hold id. */
  startVoice(voice: number, freq: number, ch: number, at: number): void;
  /** Retune an open voice. */
  moveVoice(voice: number, freq: number, at: number): void;
  /** Close a voice. */
  stopVoice(voice: number, at: number): void;
}

/** Sink for environments with no audio device; playback falls back to labels. */
export class NullSink implements AudioSink {
  readonly available = false;
  playTone(): void {}
  startVoice(): void {}
  moveVoice(): void {}
  stopVoice(): void {}
}

const NOTE_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"] as const;

/** Nearest equal-tempered note name with octave, A4 = 440 Hz. */
export function noteName(freq: number): string {
  if (!(freq > 0)) {
    throw new Error(`frequency must be positive, got ${freq}`);
  }
  const midi = Math.round(69 + 12 * Math.log2(freq / 440));
  const name = NOTE_NAMES[((midi % 12) + 12) % 12]!;
  const octave = Math.floor(midi / 12) - 1;
  return `${name}${octave}`;
}

/** Fallback display label for a served tone, e.g. noteLabel(440, 48) = "A4 / λ=48". */
export function noteLabel(freq: number, lambda?: number): string {
  const name = noteName(freq);
  return lambda === undefined ? name : `${name} / λ=${lambda}`;
}

export type PlaybackResult =
  | { kind: "scheduled"; at: number }
  | { kind: "label"; label: string };

/**
 * Routes tone messages to a sink.  `now` supplies wall-clock seconds; every
 * message is scheduled at the clock reading taken when it is handled, so
 * playback starts the moment the message arrives and tones handled in one
 * batch share a start time.
 */
export class TonePlayer {
  private readonly sink: AudioSink;
  private readonly now: () => number;

  constructor(sink: AudioSink, now: () => number) {
    this.sink = sink;
    this.now = now;
  }

  handleTone(msg: ToneMessage, lambda?: number): PlaybackResult {
    if (!this.sink.available) {
      return { kind: "label", label: noteLabel(msg.freq, lambda) };
    }
    const at = this.now();
    this.sink.playTone(msg.freq, msg.ch, msg.dur, at);
    return { kind: "scheduled", at };
  }

  /** First tone_start for a hold opens its voice; later ones retune it. */
  handleToneStart(msg: ToneStartMessage, open: boolean, lambda?: number): PlaybackResult {
    if (!this.sink.available) {
      return { kind: "label", label: noteLabel(msg.freq, lambda) };
    }
    const at = this.now();
    if (open) {
      this.sink.startVoice(msg.hold_id, msg.freq, msg.ch, at);
    } else {
      this.sink.moveVoice(msg.hold_id, msg.freq, at);
    }
    return { kind: "scheduled", at };
  }

  handleToneStop(msg: ToneStopMessage): PlaybackResult {
    if (!this.sink.available) {
      return { kind: "label", label: "" };
    }
    const at = this.now();
    this.sink.stopVoice(msg.hold_id, at);
    return { kind: "scheduled", at };
  }
}
