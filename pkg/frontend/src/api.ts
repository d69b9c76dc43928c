/** Typed client for the session API plus an ordered retry queue.
 *
 * Transport failures (server down, connection reset) are retryable; API
 * errors carry the server's code/message and are not.
 */
import type { GenerateResponse, Mode, SessionReport } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly retryable: boolean,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

async function request<T>(fetchImpl: FetchLike, url: string, body?: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetchImpl(url, {
      method: body === undefined ? "GET" : "POST",
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  } catch (err) {
    throw new ApiError("network", `request failed: ${String(err)}`, true);
  }
  let payload: unknown = null;
  try {
    payload = await response.json();
  } catch {
    throw new ApiError("protocol", `non-JSON response (${response.status})`, false);
  }
  if (!response.ok) {
    const error = (payload as { error?: { code?: string; message?: string; retry?: boolean } }).error;
    throw new ApiError(
      error?.code ?? `http_${response.status}`,
      error?.message ?? `HTTP ${response.status}`,
      Boolean(error?.retry),
    );
  }
  return payload as T;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async createSession(mode: Mode): Promise<string> {
    const body = await request<{ session_id: string }>(
      this.fetchImpl,
      this.url("/v1/sessions"),
      { mode },
    );
    return body.session_id;
  }

  generate(sessionId: string, markup: string, numSamples?: number): Promise<GenerateResponse> {
    return request(this.fetchImpl, this.url(`/v1/sessions/${sessionId}/generate`), {
      markup,
      ...(numSamples === undefined ? {} : { num_samples: numSamples }),
    });
  }

  async accept(sessionId: string, requestId: string, candidateId: string): Promise<string> {
    const body = await request<{ main_text: string }>(
      this.fetchImpl,
      this.url(`/v1/sessions/${sessionId}/accept`),
      { request_id: requestId, candidate_id: candidateId },
    );
    return body.main_text;
  }

  async edit(sessionId: string, mainText: string): Promise<void> {
    await request(this.fetchImpl, this.url(`/v1/sessions/${sessionId}/edit`), {
      main_text: mainText,
    });
  }

  async submit(sessionId: string): Promise<void> {
    await request(this.fetchImpl, this.url(`/v1/sessions/${sessionId}/submit`), {});
  }

  report(sessionId: string): Promise<SessionReport> {
    return request(this.fetchImpl, this.url(`/v1/sessions/${sessionId}/report`));
  }
}

export type QueueStatus = "idle" | "sending" | "retrying";

/** Runs async tasks strictly in order; transport failures keep the task at
 * the head of the queue and retry after a delay, so nothing is lost while
 * the service is unreachable. */
export class RetryQueue {
  private tasks: Array<() => Promise<void>> = [];
  private running = false;
  private status: QueueStatus = "idle";

  constructor(
    private readonly retryDelayMs = 1000,
    private readonly onStatus: (status: QueueStatus, depth: number) => void = () => {},
    private readonly onError: (err: ApiError) => void = () => {},
    private readonly sleep: (ms: number) => Promise<void> = (ms) =>
      new Promise((resolve) => setTimeout(resolve, ms)),
  ) {}

  get depth(): number {
    return this.tasks.length;
  }

  push(task: () => Promise<void>): void {
    this.tasks.push(task);
    void this.drain();
  }

  /** Resolves once everything queued so far has been delivered. */
  async flush(): Promise<void> {
    while (this.tasks.length > 0 || this.running) {
      await this.sleep(5);
    }
  }

  private emit(status: QueueStatus): void {
    this.status = status;
    this.onStatus(status, this.tasks.length);
  }

  private async drain(): Promise<void> {
    if (this.running) return;
    this.running = true;
    while (this.tasks.length > 0) {
      const task = this.tasks[0]!;
      this.emit("sending");
      try {
        await task();
        this.tasks.shift();
      } catch (err) {
        if (err instanceof ApiError && !err.retryable) {
          this.tasks.shift();
          this.onError(err);
          continue;
        }
        this.emit("retrying");
        await this.sleep(this.retryDelayMs);
      }
    }
    this.running = false;
    this.emit("idle");
  }
}
