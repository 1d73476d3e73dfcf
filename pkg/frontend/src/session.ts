/**
 * Client-side review session: one table under review.
 *
 * Each column moves pending -> approved | corrected, never back and never
 * both. Every user action maps to exactly one idempotent feedback post;
 * "Continue to analysis" fans out one implicit approval per still-pending
 * column (already-reviewed columns are excluded).
 */

import { ServiceClient } from './api';
import type {
  AdaptationReport,
  ColumnPrediction,
  PredictionsResponse,
} from './types';

export type ReviewStatus = 'pending' | 'approved' | 'corrected';

export interface ColumnReview {
  columnIndex: number;
  header: string;
  prediction: ColumnPrediction;
  status: ReviewStatus;
  assertedType: string | null;
  lastError: string | null; // set when a feedback post failed (retryable)
}

export interface ContinueResult {
  posted: number;
  failed: number[]; // column indexes needing a retry indicator
}

const SAMPLE_ROW_CAP = 20;

export class ReviewSession {
  tableId = '';
  headers: string[] = [];
  sampleRows: string[][] = [];
  columns: ColumnReview[] = [];
  ontologyVersion = 0;
  modelRevision = '';
  staleNotice = false;
  lastReport: AdaptationReport | null = null;

  constructor(private readonly client: ServiceClient) {}

  async load(tableId: string): Promise<void> {
    this.tableId = tableId;
    const { response, refetched } = await this.client.getPredictions(tableId);
    this.staleNotice = refetched;
    this.applyPredictions(response, { resetStatuses: true });
  }

  /** Re-fetch predictions, keeping review statuses (used after feedback). */
  async refresh(): Promise<void> {
    const { response, refetched } = await this.client.getPredictions(this.tableId);
    this.staleNotice = refetched;
    this.applyPredictions(response, { resetStatuses: false });
  }

  private applyPredictions(
    response: PredictionsResponse,
    options: { resetStatuses: boolean },
  ): void {
    this.headers = response.headers;
    this.sampleRows = response.sample_rows.slice(0, SAMPLE_ROW_CAP);
    this.ontologyVersion = response.prediction.ontology_version;
    this.modelRevision = response.prediction.model_revision;
    const previous = new Map(this.columns.map((c) => [c.columnIndex, c]));
    this.columns = response.prediction.columns.map((prediction) => {
      const before = options.resetStatuses ? undefined : previous.get(prediction.column_index);
      return {
        columnIndex: prediction.column_index,
        header: prediction.header,
        prediction,
        status: before?.status ?? 'pending',
        assertedType: before?.assertedType ?? null,
        lastError: before?.lastError ?? null,
      };
    });
  }

  column(index: number): ColumnReview {
    const found = this.columns.find((c) => c.columnIndex === index);
    if (!found) {
      throw new Error(`no column ${index} in session`);
    }
    return found;
  }

  topType(index: number): string {
    const ranked = this.column(index).prediction.ranked;
    return ranked.length > 0 ? ranked[0].type : 'unknown';
  }

  /**
   * Correct a column to a (possibly brand-new) type name. Posts exactly one
   * explicit correction; correcting to the currently predicted type is an
   * explicit approval instead.
   */
  async correct(index: number, typeName: string): Promise<AdaptationReport> {
    const column = this.column(index);
    if (column.status !== 'pending') {
      throw new Error(`column ${index} is already ${column.status}`);
    }
    const predicted = this.topType(index);
    const asserted = typeName.trim();
    if (!asserted) {
      throw new Error('type name must be non-empty');
    }
    if (asserted === predicted) {
      return this.approve(index);
    }
    const event = this.client.buildEvent(
      this.tableId, index, predicted, asserted, 'explicit_correction',
    );
    try {
      const report = await this.client.postFeedback(event);
      column.status = 'corrected';
      column.assertedType = asserted;
      column.lastError = null;
      this.lastReport = report;
      await this.refresh();
      return report;
    } catch (error) {
      column.lastError = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  /** Explicitly approve the current prediction for one column. */
  async approve(index: number): Promise<AdaptationReport> {
    const column = this.column(index);
    if (column.status !== 'pending') {
      throw new Error(`column ${index} is already ${column.status}`);
    }
    const predicted = this.topType(index);
    const event = this.client.buildEvent(
      this.tableId, index, predicted, predicted, 'explicit_approval',
    );
    try {
      const report = await this.client.postFeedback(event);
      column.status = 'approved';
      column.assertedType = predicted;
      column.lastError = null;
      this.lastReport = report;
      return report;
    } catch (error) {
      column.lastError = error instanceof Error ? error.message : String(error);
      throw error;
    }
  }

  /**
   * "Continue to analysis": post one implicit approval per pending column.
   * Partial failures leave per-column retry indicators and the columns stay
   * pending; everything that succeeded is marked approved.
   */
  async continueToAnalysis(): Promise<ContinueResult> {
    const pending = this.columns.filter((c) => c.status === 'pending');
    let posted = 0;
    const failed: number[] = [];
    for (const column of pending) {
      const predicted = this.topType(column.columnIndex);
      const event = this.client.buildEvent(
        this.tableId, column.columnIndex, predicted, predicted, 'implicit_approval',
      );
      try {
        await this.client.postFeedback(event);
        column.status = 'approved';
        column.assertedType = predicted;
        column.lastError = null;
        posted += 1;
      } catch (error) {
        column.lastError = error instanceof Error ? error.message : String(error);
        failed.push(column.columnIndex);
      }
    }
    return { posted, failed };
  }

  pendingCount(): number {
    return this.columns.filter((c) => c.status === 'pending').length;
  }
}

/**
 * Typeahead over the tenant's effective ontology: canonical names and
 * synonyms matching the query prefix/substring, plus a create-new entry
 * when nothing matches exactly.
 */
export interface TypeSuggestion {
  typeId: string | null; // null = create new
  label: string;
  isNew: boolean;
}

export function suggestTypes(
  query: string,
  types: { id: string; canonical_name: string; synonyms: string[] }[],
  limit = 8,
): TypeSuggestion[] {
  const q = query.trim().toLowerCase();
  const out: TypeSuggestion[] = [];
  if (q) {
    for (const t of types) {
      if (t.id === 'unknown') continue;
      const names = [t.canonical_name, ...t.synonyms];
      if (names.some((n) => n.toLowerCase().includes(q))) {
        out.push({ typeId: t.id, label: t.canonical_name, isNew: false });
      }
      if (out.length >= limit) break;
    }
    const exact = types.some(
      (t) => t.canonical_name.toLowerCase() === q
        || t.synonyms.some((s) => s.toLowerCase() === q),
    );
    if (!exact) {
      out.push({ typeId: null, label: `create "${query.trim()}"`, isNew: true });
    }
  }
  return out;
}
