import { ApiClient, ApiError } from "./api.js";
import type { CloneLabel, PairPayload, Progress } from "./types.js";

export type Phase = "idle" | "loading" | "showing" | "exhausted" | "error";

export interface UiState {
  phase: Phase;
  pair: PairPayload | null;
  progress: Progress | null;
  /** true while a request is in flight; label buttons must be disabled */
  pending: boolean;
  error: string | null;
  /** local count of acknowledged submissions by this rater */
  submitted: number;
}

const initial = (): UiState => ({
  phase: "idle",
  pair: null,
  progress: null,
  pending: false,
  error: null,
  submitted: 0,
});

/**
 * Labeling workbench state machine, free of DOM concerns.
 *
 * Exactly one request is in flight at any time: submit/skip calls while
 * pending are dropped, so a double-click produces a single POST. A server
 * rejection keeps the current pair on screen with an error banner.
 */
export class Workbench {
  private state: UiState = initial();

  constructor(
    private readonly api: ApiClient,
    private readonly rater: string,
    private readonly onChange: (state: UiState) => void = () => {},
  ) {}

  getState(): UiState {
    return this.state;
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  /** Initial load; also how a page refresh resumes from server state. */
  async start(): Promise<void> {
    if (this.state.pending) return;
    this.update({ phase: "loading", pending: true, error: null });
    try {
      const progress = await this.api.progress();
      const pair = await this.api.nextPair(this.rater);
      this.update({
        phase: pair === null ? "exhausted" : "showing",
        pair,
        progress,
        pending: false,
      });
    } catch (err) {
      this.update({ phase: "error", pending: false, error: describe(err) });
    }
  }

  async submit(label: CloneLabel): Promise<void> {
    await this.send((pairId) => this.api.submitLabel(this.rater, pairId, label));
  }

  async skip(): Promise<void> {
    await this.send((pairId) => this.api.submitSkip(this.rater, pairId));
  }

  /** Retry after an error without losing the displayed pair. */
  async retry(): Promise<void> {
    if (this.state.pair === null) {
      await this.start();
      return;
    }
    this.update({ phase: "showing", error: null });
  }

  private async send(post: (pairId: string) => Promise<{ progress: Progress }>): Promise<void> {
    if (this.state.pending || this.state.phase !== "showing" || this.state.pair === null) {
      return; // in-flight guard and no-pair guard
    }
    const pairId = this.state.pair.pair_id;
    this.update({ pending: true, error: null });
    let progress: Progress;
    try {
      ({ progress } = await post(pairId));
    } catch (err) {
      // rejection: keep the pair, surface the error
      this.update({ pending: false, phase: "error", error: describe(err) });
      return;
    }
    const submitted = this.state.submitted + 1;
    try {
      const pair = await this.api.nextPair(this.rater);
      this.update({
        phase: pair === null ? "exhausted" : "showing",
        pair,
        progress,
        submitted,
        pending: false,
      });
    } catch (err) {
      this.update({ pending: false, phase: "error", progress, submitted, error: describe(err) });
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status ? `${err.message} (HTTP ${err.status})` : err.message;
  }
  return String(err);
}
