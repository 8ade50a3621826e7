/**
 * End-to-end: spawn the real session server and talk to it over TCP.
 * The replies must match the recorded fixtures byte for byte, proving the
 * UI consumes the backend purely through the wire protocol.
 */

import { ChildProcess, spawn } from "node:child_process";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServerMessage } from "../src/protocol.js";
import { TcpTransport } from "../src/transport_node.js";
import { flipGen1, universalGen1 } from "./helpers.js";

class Inbox {
  readonly messages: ServerMessage[] = [];
  private waiters: { n: number; resolve: () => void }[] = [];

  push(msg: ServerMessage): void {
    this.messages.push(msg);
    this.waiters = this.waiters.filter((w) => {
      if (this.messages.length >= w.n) {
        w.resolve();
        return false;
      }
      return true;
    });
  }

  async waitFor(n: number, timeoutMs = 5000): Promise<void> {
    if (this.messages.length >= n) {
      return;
    }
    await new Promise<void>((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error(`timed out with ${this.messages.length}/${n} messages`)),
        timeoutMs,
      );
      this.waiters.push({
        n,
        resolve: () => {
          clearTimeout(timer);
          resolve();
        },
      });
    });
  }
}

let proc: ChildProcess | null = null;
let port = 0;

beforeAll(async () => {
  proc = spawn("python3", ["-m", "horomonica", "serve", "--port", "0"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  port = await new Promise<number>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server did not announce a port")), 15000);
    let buf = "";
    proc!.stdout!.setEncoding("utf8");
    proc!.stdout!.on("data", (chunk: string) => {
      buf += chunk;
      const m = buf.match(/listening on [^:]+:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(Number(m[1]));
      }
    });
    proc!.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early with code ${code}`));
    });
  });
}, 20000);

afterAll(() => {
  proc?.kill();
});

describe("live session server", () => {
  it(
    "serves hello, viewport, and flip replies matching the fixtures",
    async () => {
      const transport = new TcpTransport({ port });
      const inbox = new Inbox();
      transport.onMessage((msg) => inbox.push(msg));
      await transport.ready();

      transport.send({ type: "hello", version: 1 });
      await inbox.waitFor(1);
      expect(inbox.messages[0]).toEqual({ type: "hello", version: 1, mode: "universal" });

      transport.send({ type: "viewport", gen: 1 });
      await inbox.waitFor(2);
      expect(inbox.messages[1]).toEqual(universalGen1());

      transport.send({ type: "pedal_tap", edge: ["0/1", "1/0"] });
      await inbox.waitFor(4);
      expect(inbox.messages[2]).toEqual(flipGen1().tessellation);
      expect(inbox.messages[3]).toEqual(flipGen1().tone);

      transport.close();
    },
    20000,
  );

  it(
    "answers a tap within the 100 ms budget at a generation-8 viewport",
    async () => {
      const transport = new TcpTransport({ port });
      const inbox = new Inbox();
      transport.onMessage((msg) => inbox.push(msg));
      await transport.ready();

      transport.send({ type: "viewport", gen: 8 });
      await inbox.waitFor(1, 15000);
      const model = inbox.messages[0];
      if (model?.type !== "tessellation" || model.mode !== "universal") {
        throw new Error("expected a universal tessellation");
      }
      expect(model.edges.length).toBeGreaterThan(500);

      const t0 = performance.now();
      transport.send({ type: "tap", edge: ["0/1", "1/0"] });
      await inbox.waitFor(2);
      const elapsedMs = performance.now() - t0;
      expect(inbox.messages[1]!.type).toBe("tone");
      expect(elapsedMs).toBeLessThan(100);

      transport.close();
    },
    30000,
  );

  it(
    "gives each connection an independent session",
    async () => {
      const transport = new TcpTransport({ port });
      const inbox = new Inbox();
      transport.onMessage((msg) => inbox.push(msg));
      await transport.ready();

      // A fresh connection still sees the pristine viewport even though the
      // previous one flipped an edge.
      transport.send({ type: "viewport", gen: 1 });
      await inbox.waitFor(1);
      expect(inbox.messages[0]).toEqual(universalGen1());

      transport.close();
    },
    20000,
  );
});
