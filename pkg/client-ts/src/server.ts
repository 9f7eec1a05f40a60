/**
 * The agent-side HTTP server: POST /act, GET /ping, plus the optional
 * /init and /episode_end lifecycle calls.
 *
 * Policy exceptions never kill the server or the match: the reply
 * degrades to an in-SDK Stop (with a valid message in the radio mode)
 * and the error is logged. Malformed requests get a 4xx and the server
 * keeps serving.
 */

import * as http from "node:http";
import type { AddressInfo } from "node:net";

import type { EpisodeInfo, Policy } from "./agent.js";
import {
  PROTO_HEADER,
  PROTOCOL_VERSION,
  STOP,
  WireFormatError,
  decodeObservation,
  encodeActResponse,
  sanitizeAction,
} from "./wire.js";

export interface ServeOptions {
  host?: string;
  port?: number;
  /** Silence the policy-failure log (used by tests). */
  quiet?: boolean;
}

export interface ServerHandle {
  url: string;
  host: string;
  port: number;
  close(): Promise<void>;
}

function readBody(req: http.IncomingMessage): Promise<Buffer> {
  return new Promise((resolve, reject) => {
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk));
    req.on("end", () => resolve(Buffer.concat(chunks)));
    req.on("error", reject);
  });
}

export function serve(policy: Policy, options: ServeOptions = {}): Promise<ServerHandle> {
  const host = options.host ?? "127.0.0.1";
  const port = options.port ?? 0;

  const server = http.createServer(async (req, res) => {
    const reply = (status: number, body: string, type = "application/json") => {
      res.writeHead(status, {
        [PROTO_HEADER]: PROTOCOL_VERSION,
        "Content-Type": type,
        "Content-Length": Buffer.byteLength(body),
      });
      res.end(body);
    };
    const fail = (status: number, message: string) =>
      reply(status, JSON.stringify({ error: message }));

    try {
      if (req.method === "GET" && req.url === "/ping") {
        reply(200, `pommer-proto ${PROTOCOL_VERSION}`, "text/plain");
        return;
      }
      if (req.method !== "POST") {
        fail(404, `unknown route ${req.method} ${req.url}`);
        return;
      }
      const body = await readBody(req);
      if (req.url === "/act") {
        let obs;
        try {
          obs = decodeObservation(body);
        } catch (err) {
          if (err instanceof WireFormatError) {
            fail(400, err.message);
            return;
          }
          throw err;
        }
        const radio = obs.message !== undefined;
        let action;
        try {
          action = sanitizeAction(policy.act(obs), radio);
        } catch (err) {
          // keep the match alive: degrade to Stop and log the failure
          if (!options.quiet) {
            console.error(`policy failed at step ${obs.step}:`, err);
          }
          action = sanitizeAction(STOP, radio);
        }
        reply(200, encodeActResponse(action));
      } else if (req.url === "/init") {
        let info: EpisodeInfo;
        try {
          info = JSON.parse(body.toString("utf-8"));
        } catch (err) {
          fail(400, `bad init payload: ${err}`);
          return;
        }
        try {
          policy.reset?.(info);
        } catch (err) {
          if (!options.quiet) {
            console.error("policy reset failed:", err);
          }
        }
        reply(200, '{"ok":true}');
      } else if (req.url === "/episode_end") {
        reply(200, '{"ok":true}');
      } else {
        fail(404, `unknown path ${req.url}`);
      }
    } catch (err) {
      fail(500, `internal error: ${err}`);
    }
  });

  return new Promise((resolve, reject) => {
    server.once("error", reject);
    server.listen(port, host, () => {
      const addr = server.address() as AddressInfo;
      resolve({
        url: `http://${host}:${addr.port}`,
        host,
        port: addr.port,
        close: () =>
          new Promise<void>((done, fail2) =>
            server.close((err) => (err ? fail2(err) : done()))
          ),
      });
    });
  });
}
