/**
 * Test harness: boots the real backing service (the Python CLI's `serve`)
 * on a free port and wraps fetch so every response payload is recorded.
 * The recordings let tests assert that each number the UI displays came
 * out of a service response.
 */

import { spawn, ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const port = (srv.address() as { port: number }).port;
      srv.close(() => resolve(port));
    });
  });
}

export interface LiveService {
  baseUrl: string;
  stop(): Promise<void>;
}

export async function startService(): Promise<LiveService> {
  const port = await freePort();
  const proc: ChildProcess = spawn(
    "python3", ["-m", "tuba.cli", "serve", "--port", String(port)],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  const stderr: string[] = [];
  proc.stderr?.on("data", (chunk) => stderr.push(String(chunk)));

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 15_000;
  for (;;) {
    if (proc.exitCode !== null) {
      throw new Error(`service exited early: ${stderr.join("")}`);
    }
    try {
      await fetch(`${baseUrl}/models/none`);
      break; // any HTTP answer (404 included) means the server is up
    } catch {
      if (Date.now() > deadline) {
        proc.kill();
        throw new Error(`service did not come up: ${stderr.join("")}`);
      }
      await new Promise((resolve) => setTimeout(resolve, 50));
    }
  }
  return {
    baseUrl,
    stop: () =>
      new Promise((resolve) => {
        proc.once("exit", () => resolve());
        proc.kill();
      }),
  };
}

export interface RecordingFetch {
  fetchImpl: FetchLike;
  /** Parsed JSON of every response body, in arrival order. */
  responses: unknown[];
  requests: { path: string; body: unknown }[];
}

export function recordingFetch(): RecordingFetch {
  const responses: unknown[] = [];
  const requests: { path: string; body: unknown }[] = [];
  const fetchImpl: FetchLike = async (input, init) => {
    requests.push({
      path: String(input),
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const response = await fetch(input, init);
    const copy = response.clone();
    try {
      responses.push(await copy.json());
    } catch {
      /* non-JSON body (should not happen) */
    }
    return response;
  };
  return { fetchImpl, responses, requests };
}

/** Every number reachable inside a JSON payload. */
export function numbersIn(value: unknown, out: Set<number> = new Set()): Set<number> {
  if (typeof value === "number") {
    out.add(value);
  } else if (Array.isArray(value)) {
    for (const item of value) numbersIn(item, out);
  } else if (value !== null && typeof value === "object") {
    for (const item of Object.values(value)) numbersIn(item, out);
  }
  return out;
}
