/**
 * Transport abstraction between the UI and a session server, plus an
 * in-memory implementation driven by a scripted handler.  The mock speaks
 * the same NDJSON framing as the TCP transport so tests exercise encoding
 * and decoding end to end.
 */

import { ClientMessage, encodeLine, ServerMessage } from "./protocol.js";

export type MessageHandler = (msg: ServerMessage) => void;

export interface Transport {
  send(msg: ClientMessage): void;
  onMessage(handler: MessageHandler): void;
  close(): void;
}

/** Serves scripted replies; replies are delivered synchronously on send. */
export class MockServerTransport implements Transport {
  private handlers: MessageHandler[] = [];
  private readonly respond: (msg: ClientMessage) => ServerMessage[];
  /** Every client message the mock received, in order. */
  readonly sent: ClientMessage[] = [];
  closed = false;

  constructor(respond: (msg: ClientMessage) => ServerMessage[]) {
    this.respond = respond;
  }

  send(msg: ClientMessage): void {
    if (this.closed) {
      throw new Error("transport closed");
    }
    // Outgoing messages round-trip through NDJSON framing, as on the wire.
    // Replies are delivered as parsed objects; JS re-serialization would
    // lose the sign of -0.0 coordinates the real server emits.
    const wire = encodeLine(msg);
    const echoed = JSON.parse(wire.trimEnd()) as ClientMessage;
    this.sent.push(echoed);
    for (const reply of this.respond(echoed)) {
      this.deliver(reply);
    }
  }

  onMessage(handler: MessageHandler): void {
    this.handlers.push(handler);
  }

  /** Push a server-initiated message, as if it arrived unprompted. */
  deliver(msg: ServerMessage): void {
    for (const handler of this.handlers) {
      handler(msg);
    }
  }

  close(): void {
    this.closed = true;
  }
}
