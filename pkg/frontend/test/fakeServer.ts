/**
 * In-memory stand-in for the detection service, implementing the slice of
 * the HTTP contract the UI depends on: idempotent feedback with 409 replay,
 * adaptation visible on refetch, weight counts following n/(n+k0), and a
 * tenant-scoped ontology overlay.
 */

import type {
  AdaptationReport,
  ColumnPrediction,
  FeedbackEventBody,
  OntologyType,
  PredictionsResponse,
  StateSummary,
} from '../src/types';

export interface FakeColumn {
  header: string;
  ranked: { type: string; confidence: number }[];
  abstained: boolean;
}

interface FakeTable {
  tableId: string;
  name: string;
  headers: string[];
  sampleRows: string[][];
  columns: FakeColumn[];
}

const PRIOR_STRENGTH = 5;

export class FakeServer {
  tables = new Map<string, FakeTable>();
  reports = new Map<string, AdaptationReport>();
  counts = new Map<string, number>();
  corrections = new Map<string, string>(); // "table:col" -> asserted type
  userTypes: string[] = [];
  feedbackPosts: FeedbackEventBody[] = [];
  /** fail the next N feedback posts with a network error */
  failNextPosts = 0;
  /** respond 409 stale-ontology to the next predictions request */
  staleOnce = false;
  private nextId = 1;
  private ontologyVersion = 1;

  builtinTypes: OntologyType[] = [
    { id: 'unknown', canonical_name: 'unknown', synonyms: [], parent_id: null, source: 'builtin' },
    { id: 'name', canonical_name: 'name', synonyms: ['person'], parent_id: null, source: 'builtin' },
    { id: 'city', canonical_name: 'city', synonyms: ['town'], parent_id: null, source: 'builtin' },
    { id: 'date', canonical_name: 'date', synonyms: ['day'], parent_id: null, source: 'builtin' },
    { id: 'revenue', canonical_name: 'revenue', synonyms: ['sales'], parent_id: null, source: 'builtin' },
  ];

  addTable(name: string, headers: string[], sampleRows: string[][], columns: FakeColumn[]): string {
    const tableId = `tab-${this.nextId++}`;
    this.tables.set(tableId, { tableId, name, headers, sampleRows, columns });
    return tableId;
  }

  private wLocal(type: string): number {
    const n = this.counts.get(type) ?? 0;
    return n / (n + PRIOR_STRENGTH);
  }

  private predictions(tableId: string): PredictionsResponse {
    const table = this.tables.get(tableId);
    if (!table) throw { status: 404, body: { code: 'not_found', message: 'no table', detail: {} } };
    const columns: ColumnPrediction[] = table.columns.map((col, idx) => {
      const asserted = this.corrections.get(`${tableId}:${idx}`);
      if (asserted) {
        // adapted: the local model now carries the asserted type
        return {
          column_index: idx,
          header: col.header,
          ranked: [{ type: asserted, confidence: this.wLocal(asserted) }],
          abstained: false,
          stages: [
            { stage: 'header', side: 'local', scores: { [asserted]: 1.0 } },
            { stage: 'classifier', side: 'local', scores: { [asserted]: 0.99 } },
          ],
        };
      }
      return {
        column_index: idx,
        header: col.header,
        ranked: col.ranked,
        abstained: col.abstained,
        stages: [
          { stage: 'header', side: 'global', scores: {} },
          {
            stage: 'classifier',
            side: 'global',
            scores: Object.fromEntries(col.ranked.map((r) => [r.type, r.confidence])),
          },
        ],
      };
    });
    return {
      table_id: tableId,
      headers: table.headers,
      prediction: {
        columns,
        ontology_version: this.ontologyVersion + this.userTypes.length,
        model_revision: `g1.e${this.reports.size}`,
      },
      sample_rows: table.sampleRows,
    };
  }

  private applyFeedback(event: FeedbackEventBody): AdaptationReport {
    const existing = this.reports.get(event.event_id);
    if (existing) {
      throw { status: 409, body: existing };
    }
    if (!this.tables.has(event.table_id)) {
      throw { status: 404, body: { code: 'not_found', message: 'no table', detail: {} } };
    }
    this.feedbackPosts.push(event);
    let report: AdaptationReport;
    if (event.kind === 'explicit_correction') {
      if (!this.builtinTypes.some((t) => t.canonical_name === event.asserted_type)
          && !this.userTypes.includes(event.asserted_type)) {
        this.userTypes.push(event.asserted_type);
      }
      this.corrections.set(`${event.table_id}:${event.column_index}`, event.asserted_type);
      this.counts.set(event.asserted_type, (this.counts.get(event.asserted_type) ?? 0) + 1);
      report = {
        event_id: event.event_id,
        new_lfs: [
          {
            lf_id: `lf:${event.event_id}:0`,
            type_id: event.asserted_type,
            provenance: event.event_id,
            body: { kind: 'numeric_range', lo: 41574.68, hi: 177351.75 },
          },
          {
            lf_id: `lf:${event.event_id}:1`,
            type_id: event.asserted_type,
            provenance: event.event_id,
            body: { kind: 'header_token', tokens: ['income'] },
          },
        ],
        n_generated: 2,
        retrained: true,
        weight_updates: { [event.asserted_type]: this.wLocal(event.asserted_type) },
      };
    } else {
      this.counts.set(event.asserted_type, (this.counts.get(event.asserted_type) ?? 0) + 1);
      report = {
        event_id: event.event_id,
        new_lfs: [],
        n_generated: 0,
        retrained: false,
        weight_updates: { [event.asserted_type]: this.wLocal(event.asserted_type) },
      };
    }
    this.reports.set(event.event_id, report);
    return report;
  }

  private state(): StateSummary {
    const weights: StateSummary['weights'] = {};
    for (const [type, count] of [...this.counts.entries()].sort()) {
      weights[type] = { count, w_local: this.wLocal(type) };
    }
    return {
      tenant_id: 'fake',
      weights,
      prior_strength: PRIOR_STRENGTH,
      labeling_functions: [...this.reports.values()].flatMap((r) => r.new_lfs),
      example_counts: { 'feedback-table': this.counts.size },
      user_types: [...this.userTypes],
      n_events: this.reports.size,
      abstain_threshold: 0.1,
      stage_gate: 0.95,
      ontology_version: this.ontologyVersion + this.userTypes.length,
      model_revision: `g1.e${this.reports.size}`,
    };
  }

  /** A FetchLike the ServiceClient can be pointed at. */
  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { 'Content-Type': 'application/json' },
      });
    try {
      if (path.startsWith('/v1/tables/') && path.endsWith('/predictions')) {
        if (this.staleOnce) {
          this.staleOnce = false;
          return respond(409, { code: 'state_error', message: 'ontology version changed', detail: { retry: true } });
        }
        const tableId = path.split('/')[3];
        return respond(200, this.predictions(tableId));
      }
      if (path.startsWith('/v1/tables')) {
        const name = new URLSearchParams(path.split('?')[1] ?? '').get('name') ?? 'pasted';
        const csv = String(init?.body ?? '');
        const lines = csv.trim().split('\n');
        const headers = lines[0]?.split(',') ?? [];
        const tableId = this.addTable(
          name,
          headers,
          lines.slice(1).map((l) => l.split(',')),
          headers.map((h) => ({ header: h, ranked: [], abstained: true })),
        );
        return respond(200, {
          table_id: tableId,
          name,
          headers,
          n_rows: lines.length - 1,
          n_columns: headers.length,
        });
      }
      if (path === '/v1/feedback') {
        if (this.failNextPosts > 0) {
          this.failNextPosts -= 1;
          throw new TypeError('fetch failed: network down');
        }
        const event = JSON.parse(String(init?.body)) as FeedbackEventBody;
        return respond(200, this.applyFeedback(event));
      }
      if (path === '/v1/state') {
        return respond(200, this.state());
      }
      if (path === '/v1/ontology') {
        const types = [
          ...this.builtinTypes,
          ...this.userTypes.map<OntologyType>((name) => ({
            id: name,
            canonical_name: name,
            synonyms: [],
            parent_id: null,
            source: 'user',
          })),
        ];
        return respond(200, { version: this.ontologyVersion + this.userTypes.length, types });
      }
      return respond(404, { code: 'not_found', message: `no route ${path}`, detail: {} });
    } catch (error) {
      const known = error as { status?: number; body?: unknown };
      if (known.status) {
        return respond(known.status, known.body);
      }
      throw error;
    }
  };
}
