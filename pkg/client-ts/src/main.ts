/**
 * CLI entry: serve the reference random agent.
 *
 *   node dist/main.js [--port N] [--host H] [--seed S]
 *
 * Prints one JSON line when ready: {"ready":true,"url":...,"port":...}.
 */

import { RandomPolicy } from "./agent.js";
import { serve } from "./server.js";

function argValue(flag: string): string | undefined {
  const i = process.argv.indexOf(flag);
  return i >= 0 ? process.argv[i + 1] : undefined;
}

const port = Number(argValue("--port") ?? 0);
const host = argValue("--host") ?? "127.0.0.1";
const seed = Number(argValue("--seed") ?? 0);

serve(new RandomPolicy(seed), { host, port }).then(
  (handle) => {
    console.log(JSON.stringify({ ready: true, url: handle.url, port: handle.port }));
  },
  (err) => {
    console.error("failed to start:", err);
    process.exit(1);
  }
);
