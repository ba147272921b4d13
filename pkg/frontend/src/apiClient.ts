/**
 * Service access. Edits funnel through DebouncedSimulator, which waits for a
 * quiet period before posting and drops responses that a newer request has
 * already superseded, so the overlay always reflects the latest edit.
 */

import type { PathFeasibility, ServiceDefaults, SimulateRequest, SimulateResponse } from "./types.js";

export const DEFAULT_DEBOUNCE_MS = 150;

export type SimulateTransport = (request: SimulateRequest) => Promise<SimulateResponse>;

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (typeof body.detail === "string") {
      return body.detail;
    }
    if (body.detail && typeof body.detail.message === "string") {
      return body.detail.message;
    }
    return JSON.stringify(body);
  } catch {
    return `HTTP ${res.status}`;
  }
}

export function httpTransport(baseUrl = "/api/v1",
                              fetchFn: typeof fetch = fetch): SimulateTransport {
  return async (request) => {
    const res = await fetchFn(`${baseUrl}/simulate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!res.ok) {
      throw new Error(await errorDetail(res));
    }
    return res.json() as Promise<SimulateResponse>;
  };
}

export async function fetchDefaults(baseUrl = "/api/v1",
                                    fetchFn: typeof fetch = fetch): Promise<ServiceDefaults> {
  const res = await fetchFn(`${baseUrl}/defaults`);
  if (!res.ok) {
    throw new Error(await errorDetail(res));
  }
  return res.json() as Promise<ServiceDefaults>;
}

export async function validatePath(request: SimulateRequest, baseUrl = "/api/v1",
                                   fetchFn: typeof fetch = fetch): Promise<PathFeasibility> {
  const res = await fetchFn(`${baseUrl}/validate-path`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ path: request.path, params: request.params }),
  });
  if (!res.ok) {
    throw new Error(await errorDetail(res));
  }
  return res.json() as Promise<PathFeasibility>;
}

export interface DebouncedSimulatorOptions {
  transport: SimulateTransport;
  onResult: (response: SimulateResponse, request: SimulateRequest) => void;
  onError?: (error: Error, request: SimulateRequest) => void;
  /** Fires when a request actually goes out. */
  onSend?: (request: SimulateRequest) => void;
  debounceMs?: number;
}

export class DebouncedSimulator {
  /** Total requests actually posted. */
  requestCount = 0;

  private readonly transport: SimulateTransport;
  private readonly onResult: DebouncedSimulatorOptions["onResult"];
  private readonly onError: DebouncedSimulatorOptions["onError"];
  private readonly onSend: DebouncedSimulatorOptions["onSend"];
  private readonly debounceMs: number;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pending: SimulateRequest | null = null;
  private inFlight = 0;
  private seq = 0;

  constructor(options: DebouncedSimulatorOptions) {
    this.transport = options.transport;
    this.onResult = options.onResult;
    this.onError = options.onError;
    this.onSend = options.onSend;
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
  }

  /** Queue a request; it goes out once edits pause for the quiet period. */
  submit(request: SimulateRequest): void {
    this.pending = request;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.debounceMs);
  }

  /** Post immediately, bypassing the quiet period (import, replay). */
  submitNow(request: SimulateRequest): void {
    this.pending = request;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.fire();
  }

  /** True while a request is queued or in flight. */
  get busy(): boolean {
    return this.timer !== null || this.pending !== null || this.inFlight > 0;
  }

  private fire(): void {
    const request = this.pending;
    if (request === null) {
      return;
    }
    this.pending = null;
    const id = ++this.seq;
    this.requestCount += 1;
    this.inFlight += 1;
    this.onSend?.(request);
    this.transport(request).then(
      (response) => {
        this.inFlight -= 1;
        // responses overtaken by a newer request are dropped
        if (id === this.seq) {
          this.onResult(response, request);
        }
      },
      (error) => {
        this.inFlight -= 1;
        if (id === this.seq) {
          this.onError?.(error instanceof Error ? error : new Error(String(error)),
                         request);
        }
      },
    );
  }
}
