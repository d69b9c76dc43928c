/** Editor state machine, independent of the DOM.
 *
 * Every user action maps onto exactly one service call (and therefore one
 * logged event); the report panel only ever shows numbers returned by the
 * service. Edits are debounced before being sent.
 */
import { ApiClient, ApiError, RetryQueue, type QueueStatus } from "./api.js";
import { validateMarkup } from "./markup.js";
import type { Candidate, Mode, SessionReport } from "./types.js";

export interface UiState {
  sessionId: string | null;
  mode: Mode;
  assistantText: string;
  markupError: string | null;
  candidates: Candidate[];
  requestId: string | null;
  mainText: string;
  numSamples: number;
  pending: boolean;
  queueStatus: QueueStatus;
  queueDepth: number;
  error: string | null;
  report: SessionReport | null;
}

export type Scheduler = {
  set: (fn: () => void, ms: number) => unknown;
  clear: (handle: unknown) => void;
};

const realScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms),
  clear: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

export interface ControllerOptions {
  debounceMs?: number;
  retryDelayMs?: number;
  scheduler?: Scheduler;
}

export class EditorController {
  readonly state: UiState = {
    sessionId: null,
    mode: "IGA",
    assistantText: "",
    markupError: null,
    candidates: [],
    requestId: null,
    mainText: "",
    numSamples: 3,
    pending: false,
    queueStatus: "idle",
    queueDepth: 0,
    error: null,
    report: null,
  };

  private listeners: Array<(state: UiState) => void> = [];
  private readonly debounceMs: number;
  private readonly scheduler: Scheduler;
  private debounceHandle: unknown = null;
  private readonly queue: RetryQueue;
  private lastSentText = "";

  constructor(
    private readonly api: ApiClient,
    options: ControllerOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? 500;
    this.scheduler = options.scheduler ?? realScheduler;
    this.queue = new RetryQueue(
      options.retryDelayMs ?? 1000,
      (status, depth) => {
        this.state.queueStatus = status;
        this.state.queueDepth = depth;
        this.notify();
      },
      (err) => {
        this.state.error = err.message;
        this.notify();
      },
    );
  }

  subscribe(listener: (state: UiState) => void): () => void {
    this.listeners.push(listener);
    listener(this.state);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async start(mode: Mode): Promise<void> {
    this.state.mode = mode;
    this.state.sessionId = await this.api.createSession(mode);
    this.lastSentText = "";
    this.notify();
  }

  setAssistantText(text: string): void {
    this.state.assistantText = text;
    this.state.markupError = text.trim() ? validateMarkup(text) : null;
    this.notify();
  }

  insertTag(token: string): void {
    const sep = this.state.assistantText && !this.state.assistantText.endsWith(" ") ? " " : "";
    this.setAssistantText(this.state.assistantText + sep + token);
  }

  setNumSamples(n: number): void {
    this.state.numSamples = Math.max(1, Math.floor(n));
    this.notify();
  }

  async onGenerate(): Promise<void> {
    if (this.state.pending || !this.state.sessionId) return;
    if (!this.state.assistantText.trim()) {
      this.state.error = "type a tagged sentence first";
      this.notify();
      return;
    }
    this.state.pending = true;
    this.state.error = null;
    this.state.candidates = [];
    this.state.requestId = null;
    this.notify();
    try {
      const response = await this.api.generate(
        this.state.sessionId,
        this.state.assistantText,
        this.state.numSamples,
      );
      this.state.candidates = response.candidates;
      this.state.requestId = response.request_id;
    } catch (err) {
      this.state.error = err instanceof ApiError ? err.message : String(err);
    } finally {
      this.state.pending = false;
      this.notify();
    }
  }

  async onAdd(candidateId: string): Promise<void> {
    if (this.state.pending || !this.state.sessionId || !this.state.requestId) return;
    const sessionId = this.state.sessionId;
    const requestId = this.state.requestId;
    this.state.pending = true;
    this.notify();
    try {
      this.state.mainText = await this.api.accept(sessionId, requestId, candidateId);
      this.lastSentText = this.state.mainText;
      await this.refreshReport();
    } catch (err) {
      this.state.error = err instanceof ApiError ? err.message : String(err);
    } finally {
      this.state.pending = false;
      this.notify();
    }
  }

  /** Called on every keystroke in the main pane; coalesced into edit events. */
  onEditInput(text: string): void {
    this.state.mainText = text;
    this.notify();
    if (this.debounceHandle !== null) {
      this.scheduler.clear(this.debounceHandle);
    }
    this.debounceHandle = this.scheduler.set(() => {
      this.debounceHandle = null;
      this.pushEdit();
    }, this.debounceMs);
  }

  private pushEdit(): void {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const text = this.state.mainText;
    if (text === this.lastSentText) return;
    this.lastSentText = text;
    this.queue.push(async () => {
      await this.api.edit(sessionId, text);
      await this.refreshReport();
    });
  }

  /** Forces out any debounced edit and waits for the queue to clear. */
  async flushEdits(): Promise<void> {
    if (this.debounceHandle !== null) {
      this.scheduler.clear(this.debounceHandle);
      this.debounceHandle = null;
      this.pushEdit();
    }
    await this.queue.flush();
  }

  async onSubmit(): Promise<void> {
    if (!this.state.sessionId) return;
    await this.flushEdits();
    await this.api.submit(this.state.sessionId);
    await this.refreshReport();
  }

  async refreshReport(): Promise<void> {
    if (!this.state.sessionId) return;
    this.state.report = await this.api.report(this.state.sessionId);
    this.notify();
  }
}
