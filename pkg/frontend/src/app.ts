/**
 * Browser shell: wires the session, renderers and service client together.
 *
 * Serve the detection service (`semtype serve --state-dir demo_state`) and
 * open index.html; the API base and tenant come from query parameters
 * (`?api=http://127.0.0.1:8787&tenant=demo`).
 */

import { ServiceClient } from './api';
import { renderDashboard, renderGrid, renderReportPanel, renderTopK } from './render';
import { ReviewSession, suggestTypes } from './session';
import type { OntologySummary } from './types';

interface AppElements {
  root: HTMLElement;
  grid: HTMLElement;
  report: HTMLElement;
  dashboard: HTMLElement;
  notice: HTMLElement;
  detail: HTMLElement;
}

export class App {
  private readonly session: ReviewSession;
  private ontology: OntologySummary = { version: 0, types: [] };
  private expanded: number | null = null;

  constructor(
    private readonly client: ServiceClient,
    private readonly el: AppElements,
  ) {
    this.session = new ReviewSession(client);
  }

  async openTable(tableId: string): Promise<void> {
    await this.session.load(tableId);
    this.ontology = await this.client.getOntology();
    await this.renderAll();
  }

  async uploadAndOpen(csv: string, name: string): Promise<void> {
    const uploaded = await this.client.uploadTable(csv, name);
    await this.openTable(uploaded.table_id);
  }

  private async renderAll(): Promise<void> {
    this.el.notice.textContent = this.session.staleNotice
      ? 'ontology changed while loading; predictions were refetched'
      : '';
    this.el.grid.innerHTML = renderGrid(
      this.session.headers,
      this.session.sampleRows,
      this.session.columns,
    );
    if (this.session.lastReport) {
      this.el.report.innerHTML = renderReportPanel(this.session.lastReport);
    }
    this.el.detail.innerHTML =
      this.expanded !== null ? renderTopK(this.session.column(this.expanded)) : '';
    this.el.dashboard.innerHTML = renderDashboard(await this.client.getState());
    this.bindGridEvents();
  }

  private bindGridEvents(): void {
    for (const chip of this.el.grid.querySelectorAll<HTMLElement>('.chip')) {
      chip.addEventListener('click', () => {
        this.expanded = Number(chip.dataset.column);
        this.el.detail.innerHTML = renderTopK(this.session.column(this.expanded));
      });
    }
    for (const btn of this.el.grid.querySelectorAll<HTMLElement>('.retry')) {
      btn.addEventListener('click', () => {
        void this.client.retryPending().then(() => this.renderAll());
      });
    }
  }

  /** Correct a column; duplicate submits are absorbed by the event id. */
  async correct(columnIndex: number, typeName: string): Promise<void> {
    await this.session.correct(columnIndex, typeName);
    await this.renderAll();
  }

  async approve(columnIndex: number): Promise<void> {
    await this.session.approve(columnIndex);
    await this.renderAll();
  }

  async continueToAnalysis(): Promise<void> {
    const result = await this.session.continueToAnalysis();
    this.el.notice.textContent = result.failed.length
      ? `${result.failed.length} approvals failed; use the per-column retry buttons`
      : `${result.posted} columns implicitly approved`;
    await this.renderAll();
  }

  suggest(query: string) {
    return suggestTypes(query, this.ontology.types);
  }
}

export function mount(document: Document): App {
  const params = new URLSearchParams(document.location.search);
  const client = new ServiceClient({
    baseUrl: params.get('api') ?? 'http://127.0.0.1:8787',
    tenant: params.get('tenant') ?? 'default',
  });
  const byId = (id: string): HTMLElement => {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  };
  const app = new App(client, {
    root: byId('app'),
    grid: byId('grid'),
    report: byId('report'),
    dashboard: byId('dashboard'),
    notice: byId('notice'),
    detail: byId('detail'),
  });

  byId('upload-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const input = byId('csv-input') as HTMLTextAreaElement;
    const name = (byId('table-name') as HTMLInputElement).value || 'pasted';
    void app.uploadAndOpen(input.value, name);
  });
  byId('correct-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const column = Number((byId('correct-column') as HTMLInputElement).value);
    const typeName = (byId('correct-type') as HTMLInputElement).value;
    void app.correct(column, typeName);
  });
  byId('continue-button').addEventListener('click', () => {
    void app.continueToAnalysis();
  });
  (byId('correct-type') as HTMLInputElement).addEventListener('input', (event) => {
    const query = (event.target as HTMLInputElement).value;
    const list = byId('type-suggestions');
    list.innerHTML = app
      .suggest(query)
      .map((s) => `<option value="${s.isNew ? query : s.label}">${s.label}</option>`)
      .join('');
  });

  return app;
}

declare global {
  interface Window {
    semtypeApp?: App;
  }
}

if (typeof window !== 'undefined' && typeof document !== 'undefined') {
  window.addEventListener('DOMContentLoaded', () => {
    window.semtypeApp = mount(document);
  });
}
