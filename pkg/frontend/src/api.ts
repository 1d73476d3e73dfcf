/**
 * Typed client for the detection service.
 *
 * Every mutation carries a client-generated UUID event id, so retries and
 * double submits are unconditionally safe: the server replays the original
 * report for a duplicate id (HTTP 409), which the client treats as success.
 * Feedback posts that fail with a network error stay in a pending queue
 * and can be retried with the same id.
 */

import type {
  AdaptationReport,
  ApiErrorBody,
  FeedbackEventBody,
  FeedbackKind,
  OntologySummary,
  PredictionsResponse,
  StateSummary,
  UploadResponse,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly detail: Record<string, unknown> = {},
    /** raw response body; a duplicate-feedback 409 carries the original report here */
    public readonly payload: unknown = undefined,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export function generateEventId(): string {
  if (typeof crypto !== 'undefined' && typeof crypto.randomUUID === 'function') {
    return crypto.randomUUID();
  }
  return `${Date.now().toString(16)}-${Math.random().toString(16).slice(2, 10)}`;
}

export interface PendingFeedback {
  event: FeedbackEventBody;
  attempts: number;
  lastError: string;
}

export interface ClientOptions {
  baseUrl: string;
  tenant: string;
  fetchImpl?: FetchLike;
  now?: () => number;
}

export class ServiceClient {
  private readonly baseUrl: string;
  private readonly tenant: string;
  private readonly fetchImpl: FetchLike;
  private readonly now: () => number;
  /** feedback posts that hit a network failure, keyed by event id */
  readonly pending = new Map<string, PendingFeedback>();

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, '');
    this.tenant = options.tenant;
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
    this.now = options.now ?? (() => Date.now() / 1000);
  }

  private async request<T>(method: string, path: string, body?: BodyInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: {
        'X-Tenant': this.tenant,
        ...(typeof body === 'string' ? { 'Content-Type': 'application/json' } : {}),
      },
      body,
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : {};
    if (!response.ok) {
      const err = payload as ApiErrorBody;
      throw new ApiError(
        response.status,
        err.code ?? 'error',
        err.message ?? text,
        err.detail ?? {},
        payload,
      );
    }
    return payload as T;
  }

  async uploadTable(csv: string, name = ''): Promise<UploadResponse> {
    const query = name ? `?name=${encodeURIComponent(name)}` : '';
    return this.request<UploadResponse>('POST', `/v1/tables${query}`, csv);
  }

  /**
   * Fetch predictions; a stale-ontology conflict (409) triggers one
   * automatic refetch and flags the result so the UI can show a notice.
   */
  async getPredictions(
    tableId: string,
  ): Promise<{ response: PredictionsResponse; refetched: boolean }> {
    try {
      const response = await this.request<PredictionsResponse>(
        'GET',
        `/v1/tables/${tableId}/predictions`,
      );
      return { response, refetched: false };
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        const response = await this.request<PredictionsResponse>(
          'GET',
          `/v1/tables/${tableId}/predictions`,
        );
        return { response, refetched: true };
      }
      throw error;
    }
  }

  buildEvent(
    tableId: string,
    columnIndex: number,
    predictedType: string,
    assertedType: string,
    kind: FeedbackKind,
  ): FeedbackEventBody {
    return {
      event_id: generateEventId(),
      table_id: tableId,
      column_index: columnIndex,
      predicted_type: predictedType,
      asserted_type: assertedType,
      kind,
      timestamp: this.now(),
    };
  }

  /**
   * Post one feedback event. A 409 means the server already applied this
   * event id; the body is the original report, so it counts as success.
   * Network failures queue the event for retry under the same id.
   */
  async postFeedback(event: FeedbackEventBody): Promise<AdaptationReport> {
    try {
      const report = await this.request<AdaptationReport>(
        'POST',
        '/v1/feedback',
        JSON.stringify(event),
      );
      this.pending.delete(event.event_id);
      return report;
    } catch (error) {
      if (error instanceof ApiError) {
        if (error.status === 409) {
          // duplicate id: the body is the original report
          this.pending.delete(event.event_id);
          return error.payload as AdaptationReport;
        }
        throw error; // 4xx: a real rejection, not retryable
      }
      const entry = this.pending.get(event.event_id);
      this.pending.set(event.event_id, {
        event,
        attempts: (entry?.attempts ?? 0) + 1,
        lastError: error instanceof Error ? error.message : String(error),
      });
      throw error;
    }
  }

  /** Re-post every queued event with its original id; returns survivors. */
  async retryPending(): Promise<string[]> {
    const failed: string[] = [];
    for (const entry of [...this.pending.values()]) {
      try {
        await this.postFeedback(entry.event);
      } catch {
        failed.push(entry.event.event_id);
      }
    }
    return failed;
  }

  async getState(): Promise<StateSummary> {
    return this.request<StateSummary>('GET', '/v1/state');
  }

  async getOntology(): Promise<OntologySummary> {
    return this.request<OntologySummary>('GET', '/v1/ontology');
  }
}
