import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { EditorController, type Scheduler } from "../src/controller.js";
import type { SessionReport } from "../src/types.js";

function manualScheduler() {
  let pending: (() => void) | null = null;
  const scheduler: Scheduler = {
    set: (fn) => {
      pending = fn;
      return fn;
    },
    clear: () => {
      pending = null;
    },
  };
  return {
    scheduler,
    fire: () => {
      const fn = pending;
      pending = null;
      fn?.();
    },
    get armed() {
      return pending !== null;
    },
  };
}

function fakeReport(overrides: Partial<SessionReport> = {}): SessionReport {
  return {
    session_id: "s1",
    mode: "IGA",
    tokens: 0,
    sentences: 0,
    ai_assisted_sentences: 0,
    generate_clicks: 0,
    add_clicks: 0,
    gen_per_sentence: 0,
    add_per_sentence: 0,
    per_tag_unigram: {},
    novel_tokens_inserted: 0,
    deleted_model_tokens: 0,
    kept_model_tokens: 0,
    tag_usage_histogram: {},
    edits: 0,
    submitted: false,
    ...overrides,
  };
}

function fakeApi() {
  const calls: Array<{ method: string; args: unknown[] }> = [];
  let generateGate: (() => void) | null = null;
  const api = {
    calls,
    openGate: () => generateGate?.(),
    async createSession(mode: string) {
      calls.push({ method: "createSession", args: [mode] });
      return "s1";
    },
    async generate(sid: string, markup: string, numSamples?: number) {
      calls.push({ method: "generate", args: [sid, markup, numSamples] });
      await new Promise<void>((resolve) => {
        generateGate = resolve;
      });
      const count = numSamples ?? 3;
      return {
        request_id: "req1",
        candidates: Array.from({ length: count }, (_, i) => ({
          candidate_id: `req1.${i}`,
          assembled: `candidate ${i} text here`,
          spans: [`candidate ${i}`],
        })),
      };
    },
    async accept(sid: string, requestId: string, candidateId: string) {
      calls.push({ method: "accept", args: [sid, requestId, candidateId] });
      return "candidate 0 text here";
    },
    async edit(sid: string, text: string) {
      calls.push({ method: "edit", args: [sid, text] });
    },
    async submit(sid: string) {
      calls.push({ method: "submit", args: [sid] });
    },
    async report(sid: string) {
      calls.push({ method: "report", args: [sid] });
      return fakeReport({ add_clicks: 1 });
    },
  };
  return api;
}

function makeController(api = fakeApi()) {
  const timers = manualScheduler();
  const controller = new EditorController(api as unknown as ApiClient, {
    debounceMs: 500,
    scheduler: timers.scheduler,
  });
  return { controller, api, timers };
}

describe("EditorController", () => {
  it("clears candidates and sets pending during generate", async () => {
    const { controller, api } = makeController();
    await controller.start("IGA");
    controller.setAssistantText("It was raining <contrast> trees");
    const run = controller.onGenerate();
    expect(controller.state.pending).toBe(true);
    expect(controller.state.candidates).toEqual([]);
    api.openGate();
    await run;
    expect(controller.state.pending).toBe(false);
    expect(controller.state.candidates).toHaveLength(3);
  });

  it("honors the sample-count control", async () => {
    const { controller, api } = makeController();
    await controller.start("IGA");
    controller.setAssistantText("a <cause> b");
    controller.setNumSamples(5);
    const run = controller.onGenerate();
    api.openGate();
    await run;
    expect(controller.state.candidates).toHaveLength(5);
  });

  it("ignores add while a request is pending", async () => {
    const { controller, api } = makeController();
    await controller.start("IGA");
    controller.setAssistantText("a <cause> b");
    const run = controller.onGenerate();
    await controller.onAdd("req1.0"); // + is disabled while pending
    expect(api.calls.filter((c) => c.method === "accept")).toHaveLength(0);
    api.openGate();
    await run;
  });

  it("updates main text from the accept response and refreshes the report", async () => {
    const { controller, api } = makeController();
    await controller.start("IGA");
    controller.setAssistantText("a <cause> b");
    const run = controller.onGenerate();
    api.openGate();
    await run;
    await controller.onAdd("req1.0");
    expect(controller.state.mainText).toBe("candidate 0 text here");
    expect(controller.state.report?.add_clicks).toBe(1);
    expect(api.calls.map((c) => c.method)).toContain("report");
  });

  it("flags invalid markup locally without calling the service", async () => {
    const { controller, api } = makeController();
    await controller.start("IGA");
    controller.setAssistantText("bad <sparkle> tag");
    expect(controller.state.markupError).toMatch(/unknown tag/);
    expect(api.calls.filter((c) => c.method === "generate")).toHaveLength(0);
  });

  it("debounces edits into a single event", async () => {
    const { controller, api, timers } = makeController();
    await controller.start("IGA");
    controller.onEditInput("one");
    controller.onEditInput("one two");
    controller.onEditInput("one two three");
    expect(api.calls.filter((c) => c.method === "edit")).toHaveLength(0);
    timers.fire();
    await controller.flushEdits();
    const edits = api.calls.filter((c) => c.method === "edit");
    expect(edits).toHaveLength(1);
    expect(edits[0]!.args[1]).toBe("one two three");
  });

  it("skips no-op edits", async () => {
    const { controller, api, timers } = makeController();
    await controller.start("IGA");
    controller.onEditInput("same");
    timers.fire();
    await controller.flushEdits();
    controller.onEditInput("same");
    timers.fire();
    await controller.flushEdits();
    expect(api.calls.filter((c) => c.method === "edit")).toHaveLength(1);
  });

  it("submit flushes pending edits first", async () => {
    const { controller, api } = makeController();
    await controller.start("IGA");
    controller.onEditInput("not yet sent");
    await controller.onSubmit();
    const methods = api.calls.map((c) => c.method);
    expect(methods.indexOf("edit")).toBeLessThan(methods.indexOf("submit"));
  });

  it("never computes report numbers locally", async () => {
    const { controller } = makeController();
    await controller.start("IGA");
    expect(controller.state.report).toBeNull();
    await controller.refreshReport();
    expect(controller.state.report?.add_clicks).toBe(1); // verbatim from the service
  });
});
