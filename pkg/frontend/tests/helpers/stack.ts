/**
 * Spawn the real service stack for journey tests: the mock monitoring API
 * plus the widget service in offline replay mode, both on loopback.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { nodeFetch } from "./nodeFetch.js";

const HELPER_DIR = path.dirname(fileURLToPath(import.meta.url));

export interface StackQuery {
  query: string;
  widget_type: string;
  body: unknown;
}

export interface RunningStack {
  baseUrl: string;
  monitoringUrl: string;
  stop: () => void;
}

const AUTH_TOKEN = "ui-journey-token";

function portPair(): [number, number] {
  const base = 21000 + Math.floor(Math.random() * 8000);
  return [base, base + 1];
}

async function waitForHttp(url: string, timeoutMs: number, headers?: Record<string, string>): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await nodeFetch(url, { method: "GET", headers: headers ?? {} });
      if (response.status < 500) {
        return;
      }
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error(`service at ${url} did not come up: ${lastError}`);
}

export async function startStack(
  catalog: Record<string, string[]>,
  queries: StackQuery[],
): Promise<RunningStack> {
  const workDir = mkdtempSync(path.join(tmpdir(), "ui-journey-"));
  const configPath = path.join(workDir, "stack.json");
  writeFileSync(configPath, JSON.stringify({ catalog, queries }), "utf-8");
  execFileSync("python3", [
    path.join(HELPER_DIR, "build_stack_fixtures.py"),
    configPath,
    workDir,
  ]);

  const [mockPort, servePort] = portPair();
  const children: ChildProcess[] = [];
  const stop = () => {
    for (const child of children) {
      child.kill("SIGTERM");
    }
    rmSync(workDir, { recursive: true, force: true });
  };

  const mock = spawn(
    "widgetforge",
    [
      "mock-server",
      "--fixtures",
      path.join(workDir, "fixtures"),
      "--port",
      String(mockPort),
      "--auth-token",
      AUTH_TOKEN,
    ],
    { stdio: "ignore" },
  );
  children.push(mock);

  const serve = spawn(
    "widgetforge",
    ["serve", "--port", String(servePort), "--replay-file", path.join(workDir, "serve_replay.json")],
    {
      stdio: "ignore",
      env: {
        ...process.env,
        MONITORING_API_URL: `http://127.0.0.1:${mockPort}`,
        MONITORING_API_TOKEN: AUTH_TOKEN,
      },
    },
  );
  children.push(serve);

  try {
    await waitForHttp(`http://127.0.0.1:${mockPort}/api/services`, 30_000, {
      Authorization: `Bearer ${AUTH_TOKEN}`,
    });
    await waitForHttp(`http://127.0.0.1:${servePort}/api/dashboard`, 30_000);
  } catch (error) {
    stop();
    throw error;
  }

  return {
    baseUrl: `http://127.0.0.1:${servePort}`,
    monitoringUrl: `http://127.0.0.1:${mockPort}`,
    stop,
  };
}

/** Poll until the DOM predicate returns a value, or fail with `label`. */
export async function waitFor<T>(
  probe: () => T | null | undefined | false,
  label: string,
  timeoutMs = 10_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const value = probe();
    if (value !== null && value !== undefined && value !== false) {
      return value;
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${label}`);
}
