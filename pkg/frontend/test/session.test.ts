import { describe, expect, it } from 'vitest';

import { ServiceClient } from '../src/api';
import { ReviewSession, suggestTypes } from '../src/session';
import { FakeServer } from './fakeServer';

function setup() {
  const server = new FakeServer();
  const client = new ServiceClient({
    baseUrl: 'http://fake',
    tenant: 'acme',
    fetchImpl: server.fetch,
    now: () => 0,
  });
  const tableId = server.addTable(
    'payroll',
    ['Name', 'Income', 'City'],
    [
      ['Alice', '54000.50', 'Berlin'],
      ['Bruno', '61500.25', 'Oslo'],
    ],
    [
      { header: 'Name', ranked: [{ type: 'name', confidence: 1.0 }], abstained: false },
      { header: 'Income', ranked: [{ type: 'unknown', confidence: 0.95 }], abstained: true },
      { header: 'City', ranked: [{ type: 'city', confidence: 1.0 }], abstained: false },
    ],
  );
  const session = new ReviewSession(client);
  return { server, client, session, tableId };
}

describe('session lifecycle', () => {
  it('loads columns as pending with capped sample rows', async () => {
    const { session, tableId } = setup();
    await session.load(tableId);
    expect(session.columns.map((c) => c.status)).toEqual(['pending', 'pending', 'pending']);
    expect(session.sampleRows.length).toBeLessThanOrEqual(20);
    expect(session.pendingCount()).toBe(3);
  });

  it('status transitions only leave pending', async () => {
    const { session, tableId } = setup();
    await session.load(tableId);
    await session.correct(1, 'salary');
    await expect(session.correct(1, 'bonus')).rejects.toThrow('already corrected');
    await session.approve(0);
    await expect(session.approve(0)).rejects.toThrow('already approved');
    await expect(session.correct(0, 'city')).rejects.toThrow('already approved');
  });
});

describe('corrections', () => {
  it('posts exactly one event and the refetched grid shows the new type', async () => {
    const { server, session, tableId } = setup();
    await session.load(tableId);
    const report = await session.correct(1, 'salary');

    expect(server.feedbackPosts.length).toBe(1);
    expect(server.feedbackPosts[0].kind).toBe('explicit_correction');
    expect(report.retrained).toBe(true);
    expect(session.column(1).status).toBe('corrected');
    // refresh happened inside correct(): the prediction now reads salary
    expect(session.column(1).prediction.ranked[0].type).toBe('salary');
    expect(session.column(1).prediction.abstained).toBe(false);
  });

  it('correcting to the predicted type is an explicit approval', async () => {
    const { server, session, tableId } = setup();
    await session.load(tableId);
    await session.correct(0, 'name');
    expect(server.feedbackPosts[0].kind).toBe('explicit_approval');
    expect(session.column(0).status).toBe('approved');
  });

  it('a failed post leaves a retry indicator and keeps the column pending', async () => {
    const { server, session, tableId } = setup();
    await session.load(tableId);
    server.failNextPosts = 1;
    await expect(session.correct(1, 'salary')).rejects.toThrow();
    expect(session.column(1).status).toBe('pending');
    expect(session.column(1).lastError).toContain('network down');
  });
});

describe('continue to analysis', () => {
  it('posts implicit approvals for pending columns only', async () => {
    const { server, session, tableId } = setup();
    await session.load(tableId);
    await session.correct(1, 'salary'); // now corrected, must be excluded

    const result = await session.continueToAnalysis();
    expect(result.posted).toBe(2);
    expect(result.failed).toEqual([]);
    const implicit = server.feedbackPosts.filter((e) => e.kind === 'implicit_approval');
    expect(implicit.map((e) => e.column_index).sort()).toEqual([0, 2]);
    expect(session.pendingCount()).toBe(0);
  });

  it('partial failure leaves retry indicators on the failed columns', async () => {
    const { server, session, tableId } = setup();
    await session.load(tableId);
    server.failNextPosts = 1; // the first implicit approval will fail
    const result = await session.continueToAnalysis();
    expect(result.posted).toBe(2);
    expect(result.failed).toEqual([0]);
    expect(session.column(0).status).toBe('pending');
    expect(session.column(0).lastError).not.toBeNull();
  });
});

describe('typeahead', () => {
  const types = [
    { id: 'salary', canonical_name: 'salary', synonyms: ['wage', 'pay'] },
    { id: 'city', canonical_name: 'city', synonyms: ['town'] },
    { id: 'unknown', canonical_name: 'unknown', synonyms: [] },
  ];

  it('matches canonical names and synonyms', () => {
    expect(suggestTypes('sal', types).map((s) => s.typeId)).toContain('salary');
    expect(suggestTypes('wag', types).map((s) => s.typeId)).toContain('salary');
    expect(suggestTypes('tow', types).map((s) => s.typeId)).toContain('city');
  });

  it('never suggests the reserved unknown type', () => {
    expect(suggestTypes('unk', types).filter((s) => s.typeId === 'unknown')).toEqual([]);
  });

  it('offers create-new when nothing matches exactly', () => {
    const suggestions = suggestTypes('net margin', types);
    expect(suggestions.some((s) => s.isNew)).toBe(true);
    const exact = suggestTypes('salary', types);
    expect(exact.some((s) => s.isNew)).toBe(false);
  });

  it('empty query suggests nothing', () => {
    expect(suggestTypes('  ', types)).toEqual([]);
  });
});
