/**
 * HTML renderers. Pure functions from state to markup strings, so the views
 * are testable without a DOM; the app shell mounts them with innerHTML and
 * event delegation.
 */

import type { ColumnReview } from './session';
import type { AdaptationReport, LfSummary, StateSummary } from './types';

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function formatConfidence(confidence: number): string {
  return `${(confidence * 100).toFixed(0)}%`;
}

/** Which stage produced the top score, e.g. "header, 100%". */
export function provenanceBadge(column: ColumnReview): string {
  const top = column.prediction.ranked[0];
  if (!top || column.prediction.abstained) {
    return 'abstained';
  }
  let bestStage = '';
  let bestScore = -1;
  for (const trace of column.prediction.stages) {
    const score = trace.scores[top.type] ?? 0;
    if (score > bestScore) {
      bestScore = score;
      bestStage = trace.stage;
    }
  }
  return `${bestStage}, ${formatConfidence(bestScore)}`;
}

export function renderTypeChip(column: ColumnReview): string {
  const top = column.prediction.ranked[0];
  if (column.prediction.abstained || !top) {
    const label = top ? top.type : 'unknown';
    return `<span class="chip chip-unknown" data-column="${column.columnIndex}">${escapeHtml(label)}</span>`;
  }
  const label = `${escapeHtml(top.type)} ${formatConfidence(top.confidence)}`;
  return `<span class="chip chip-${column.status}" data-column="${column.columnIndex}">${label}</span>`;
}

export function renderTopK(column: ColumnReview): string {
  const rows = column.prediction.ranked
    .map(
      (entry) =>
        `<li><code>${escapeHtml(entry.type)}</code> ${formatConfidence(entry.confidence)}</li>`,
    )
    .join('');
  const badge = escapeHtml(provenanceBadge(column));
  return `<div class="topk"><span class="provenance">${badge}</span><ol>${rows}</ol></div>`;
}

export function renderGrid(
  headers: string[],
  sampleRows: string[][],
  columns: ColumnReview[],
): string {
  const chips = columns.map((c) => `<th>${renderTypeChip(c)}</th>`).join('');
  const headerCells = headers.map((h) => `<th>${escapeHtml(h)}</th>`).join('');
  const statusCells = columns
    .map((c) => {
      const retry = c.lastError
        ? `<button class="retry" data-column="${c.columnIndex}">retry</button>`
        : '';
      return `<td class="status status-${c.status}">${c.status}${retry}</td>`;
    })
    .join('');
  const bodyRows = sampleRows
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td>${escapeHtml(cell)}</td>`).join('')}</tr>`,
    )
    .join('');
  return [
    '<table class="grid">',
    `<thead><tr>${chips}</tr><tr>${headerCells}</tr><tr class="statuses">${statusCells}</tr></thead>`,
    `<tbody>${bodyRows}</tbody>`,
    '</table>',
  ].join('');
}

export function describeLfBody(lf: LfSummary): string {
  const body = lf.body;
  switch (body.kind) {
    case 'numeric_range': {
      const lo = Number(body.lo);
      const hi = Number(body.hi);
      return `numeric range [${lo.toFixed(3)}, ${hi.toFixed(3)}]`;
    }
    case 'value_set':
      return `value set of ${(body.values as string[]).length} (overlap >= ${body.min_overlap_fraction})`;
    case 'unique_ratio_band':
      return `unique ratio in [${Number(body.lo).toFixed(3)}, ${Number(body.hi).toFixed(3)}]`;
    case 'header_token':
      return `header tokens {${(body.tokens as string[]).join(', ')}}`;
    case 'co_occurrence':
      return `co-occurs with ${body.neighbor_type_id} (${body.direction})`;
    default:
      return body.kind;
  }
}

export function renderReportPanel(report: AdaptationReport): string {
  const lfs = report.new_lfs
    .map(
      (lf) =>
        `<li><code>${escapeHtml(lf.type_id)}</code> ${escapeHtml(describeLfBody(lf))}</li>`,
    )
    .join('');
  const weights = Object.entries(report.weight_updates)
    .map(([type, w]) => `<li><code>${escapeHtml(type)}</code> w_local ${w.toFixed(3)}</li>`)
    .join('');
  return [
    '<div class="report">',
    `<p>${report.new_lfs.length} labeling functions inferred, `,
    `${report.n_generated} weak examples generated, `,
    `local model ${report.retrained ? 'retrained' : 'not retrained'}.</p>`,
    lfs ? `<ul class="lfs">${lfs}</ul>` : '',
    weights ? `<ul class="weights">${weights}</ul>` : '',
    '</div>',
  ].join('');
}

/**
 * w_local following n/(n+k0): the observed points up to the current
 * confirmation count, then a short projection. The last observed index is
 * `count`, so the 0.5 marker appears exactly after k0 confirmations.
 */
export function weightTrajectory(
  count: number,
  priorStrength: number,
  projectAhead = 5,
): { n: number; wLocal: number; observed: boolean }[] {
  const points = [];
  for (let n = 0; n <= count + projectAhead; n += 1) {
    points.push({ n, wLocal: n / (n + priorStrength), observed: n <= count });
  }
  return points;
}

export function renderDashboard(state: StateSummary): string {
  const weightRows = Object.entries(state.weights)
    .map(([type, entry]) => {
      const bar = '#'.repeat(Math.round(entry.w_local * 20)).padEnd(20, '.');
      return `<tr><td><code>${escapeHtml(type)}</code></td><td>${entry.count}</td>` +
        `<td><pre class="bar">${bar}</pre></td><td>${entry.w_local.toFixed(3)}</td></tr>`;
    })
    .join('');
  const lfRows = state.labeling_functions
    .map(
      (lf) =>
        `<li><code>${escapeHtml(lf.type_id)}</code> ${escapeHtml(describeLfBody(lf))}` +
        ` <span class="provenance">from ${escapeHtml(lf.provenance || 'n/a')}</span></li>`,
    )
    .join('');
  const counts = Object.entries(state.example_counts)
    .map(([origin, count]) => `<li>${escapeHtml(origin)}: ${count}</li>`)
    .join('');
  return [
    '<div class="dashboard">',
    `<p>${state.n_events} feedback events, prior strength ${state.prior_strength}.</p>`,
    '<table class="weights-table">',
    '<thead><tr><th>type</th><th>confirmations</th><th>local influence</th><th>w_local</th></tr></thead>',
    `<tbody>${weightRows || '<tr><td colspan="4">no feedback yet; all weights 0</td></tr>'}</tbody>`,
    '</table>',
    `<ul class="lf-registry">${lfRows || '<li>no labeling functions yet</li>'}</ul>`,
    `<ul class="example-counts">${counts || '<li>no training examples yet</li>'}</ul>`,
    '</div>',
  ].join('');
}
