/**
 * TCP transport for Node environments.  Connects to a session server's
 * newline-delimited JSON socket and decodes replies incrementally.
 */

import * as net from "node:net";

import { ClientMessage, encodeLine, LineDecoder, parseServerMessage } from "./protocol.js";
import { MessageHandler, Transport } from "./transport.js";

export interface TcpTransportOptions {
  host?: string;
  port: number;
  /** Called for lines that fail to parse as a known server message. */
  onProtocolError?: (err: Error, line: string) => void;
}

export class TcpTransport implements Transport {
  private readonly socket: net.Socket;
  private readonly decoder = new LineDecoder();
  private handlers: MessageHandler[] = [];
  private readonly onProtocolError: (err: Error, line: string) => void;

  constructor(options: TcpTransportOptions) {
    this.onProtocolError = options.onProtocolError ?? (() => {});
    this.socket = net.createConnection({
      host: options.host ?? "127.0.0.1",
      port: options.port,
    });
    this.socket.setEncoding("utf8");
    this.socket.on("data", (chunk: string) => {
      for (const raw of this.decoder.pushRaw(chunk)) {
        try {
          const msg = parseServerMessage(JSON.parse(raw));
          for (const handler of this.handlers) {
            handler(msg);
          }
        } catch (err) {
          this.onProtocolError(err instanceof Error ? err : new Error(String(err)), raw);
        }
      }
    });
  }

  /** Resolves once the socket is connected. */
  ready(): Promise<void> {
    if (!this.socket.connecting) {
      return Promise.resolve();
    }
    return new Promise((resolve, reject) => {
      this.socket.once("connect", () => resolve());
      this.socket.once("error", (err) => reject(err));
    });
  }

  send(msg: ClientMessage): void {
    this.socket.write(encodeLine(msg));
  }

  onMessage(handler: MessageHandler): void {
    this.handlers.push(handler);
  }

  close(): void {
    this.socket.end();
    this.socket.destroy();
  }
}
