/** End-to-end acceptance: the scripted flow against the real service backed
 * by the deterministic mock model. generate -> 3 cards -> add -> edit three
 * inserted words must yield a report with novel_tokens_inserted = 3 and
 * add_clicks = 1, all numbers computed by the service.
 */
import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { EditorController } from "../src/controller.js";

const execFileAsync = promisify(execFile);
const REPO_ROOT = resolve(__dirname, "..", "..");
const PORT = 8400 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let workDir: string;
let server: ChildProcess | null = null;

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      // invalid mode: a 400 response proves the service is up without side effects
      const response = await fetch(`${BASE}/v1/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ mode: "PING" }),
      });
      if (response.status === 400) return;
    } catch {
      // not up yet
    }
    await new Promise((resolveSleep) => setTimeout(resolveSleep, 250));
  }
  throw new Error("service did not come up in time");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "editor-e2e-"));
  await execFileAsync("python3", [
    "-m", "iga.cli", "mine",
    "--corpus", join(REPO_ROOT, "tests", "data", "mini_corpus.jsonl"),
    "--tags", "contrast",
    "--out", workDir,
  ]);
  server = spawn("python3", [
    "-m", "iga.cli", "serve",
    "--backend", `mock:${join(workDir, "examples.jsonl")}`,
    "--host", "127.0.0.1",
    "--port", String(PORT),
    "--data-dir", join(workDir, "sessions"),
  ], { stdio: ["ignore", "pipe", "pipe"] });
  await waitForService();
}, 90_000);

afterAll(() => {
  server?.kill("SIGTERM");
  rmSync(workDir, { recursive: true, force: true });
});

describe("scripted flow against the live service", () => {
  it("generate -> 3 cards -> add -> edit 3 inserted words", async () => {
    const controller = new EditorController(new ApiClient(BASE), { debounceMs: 25 });
    await controller.start("IGA");
    expect(controller.state.sessionId).toBeTruthy();

    controller.setAssistantText("It was raining <contrast> trees");
    expect(controller.state.markupError).toBeNull();
    await controller.onGenerate();
    expect(controller.state.error).toBeNull();
    expect(controller.state.candidates).toHaveLength(3);

    const first = controller.state.candidates[0]!;
    await controller.onAdd(first.candidate_id);
    expect(controller.state.mainText).toBe(first.assembled);

    // three novel words strictly inside the accepted span
    const words = controller.state.mainText.split(" ");
    words.splice(2, 0, "zib", "zorp", "quix");
    controller.onEditInput(words.join(" "));
    await new Promise((resolveSleep) => setTimeout(resolveSleep, 60)); // debounce fires
    await controller.flushEdits();
    await controller.refreshReport();

    const report = controller.state.report!;
    expect(report.novel_tokens_inserted).toBe(3);
    expect(report.add_clicks).toBe(1);
    expect(report.generate_clicks).toBe(1);
    expect(report.deleted_model_tokens).toBe(0);
    expect(report.tag_usage_histogram).toEqual({ CNTRA: 1 });
  }, 60_000);

  it("mode violations surface as inline errors, not crashes", async () => {
    const controller = new EditorController(new ApiClient(BASE), { debounceMs: 25 });
    await controller.start("ILM");
    controller.setAssistantText("It was raining <contrast> trees");
    await controller.onGenerate();
    expect(controller.state.error).toMatch(/mask/);
    expect(controller.state.candidates).toHaveLength(0);
  }, 60_000);
});
