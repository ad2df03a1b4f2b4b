import type { Ack, CloneLabel, PairPayload, Progress } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
  }
}

/** Thin client over the labeling service HTTP API. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`);
    }
    if (!resp.ok && resp.status !== 204) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(detail, resp.status);
    }
    return resp;
  }

  /** Next unseen pair for the rater, or null when exhausted (204). */
  async nextPair(rater: string): Promise<PairPayload | null> {
    const resp = await this.request(`/api/pair?rater=${encodeURIComponent(rater)}`);
    if (resp.status === 204) return null;
    return (await resp.json()) as PairPayload;
  }

  async submitLabel(rater: string, pairId: string, label: CloneLabel): Promise<Ack> {
    const resp = await this.request("/api/label", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ rater, pair_id: pairId, label }),
    });
    return (await resp.json()) as Ack;
  }

  async submitSkip(rater: string, pairId: string): Promise<Ack> {
    const resp = await this.request("/api/skip", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ rater, pair_id: pairId }),
    });
    return (await resp.json()) as Ack;
  }

  async progress(): Promise<Progress> {
    const resp = await this.request("/api/progress");
    return (await resp.json()) as Progress;
  }

  async exportTruth(): Promise<string> {
    const resp = await this.request("/api/export");
    return await resp.text();
  }
}
