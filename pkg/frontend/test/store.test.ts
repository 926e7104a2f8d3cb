import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api.js';
import { defaultGrid, panelKey, Store } from '../src/store.js';
import { Variable } from '../src/types.js';
import { ARM_LIKE_VARIABLES, FakeServer } from './fake_server.js';

const instant = { sleep: () => Promise.resolve(), pollIntervalMs: 0 };

async function loadedStore(server = new FakeServer()) {
  const store = new Store(server, instant);
  await store.init();
  return { server, store };
}

describe('defaultGrid', () => {
  it('builds one panel per pairable kind in actuation/control/geometry order', () => {
    expect(defaultGrid(ARM_LIKE_VARIABLES)).toEqual([
      [2, 3],
      [4, 5],
      [0, 1],
    ]);
  });

  it('falls back to adjacent pairs when no kind has two variables', () => {
    const vars: Variable[] = [
      { name: 'x1', unit: '1', kind: 'geometry', lower: 0, upper: 1 },
      { name: 'x2', unit: '1', kind: 'control', lower: 0, upper: 1 },
    ];
    expect(defaultGrid(vars)).toEqual([[0, 1]]);
  });
});

describe('init', () => {
  it('loads problem, box, baseline and a section per default panel', async () => {
    const { server, store } = await loadedStore();
    expect(store.problem?.name).toBe('fake');
    expect(store.revision).toBe(0);
    expect(store.baseline).not.toBeNull();
    expect(store.panels.size).toBe(3);
    for (const panel of store.panels.values()) {
      expect(panel.section).not.toBeNull();
      expect(panel.section?.revision).toBe(0);
      expect(panel.stale).toBe(false);
    }
    expect(server.sectionRequests).toHaveLength(3);
    expect(server.sectionRequests[0]).toContain(`n=${store.sampleCount}`);
    expect(server.sectionRequests[0]).toContain('span=box');
  });

  it('tolerates a run without a baseline', async () => {
    const server = new FakeServer();
    server.hasBaseline = false;
    const store = new Store(server, instant);
    await store.init();
    expect(store.baseline).toBeNull();
  });
});

describe('applyTradeoff', () => {
  it('issues exactly one request and lands every panel on the new revision', async () => {
    const { server, store } = await loadedStore();
    const current = store.currentInterval(0)!;
    const outcome = await store.applyTradeoff('l1', current[0], current[1] * 0.8);

    expect(outcome).toEqual({ ok: true });
    expect(server.postLog).toHaveLength(1);
    expect(server.postLog[0]).toEqual({
      path: '/api/tradeoff',
      body: { dv: 'l1', lower: current[0], upper: current[1] * 0.8, revision: 0 },
    });
    expect(store.revision).toBe(1);
    expect(store.box?.mu).toBeCloseTo(0.18);
    expect(store.mutationInFlight).toBe(false);
    for (const panel of store.panels.values()) {
      expect(panel.section?.revision).toBe(1);
      expect(panel.stale).toBe(false);
    }
  });

  it('keeps the one-mutation rule: a drag during flight sends nothing', async () => {
    const { server, store } = await loadedStore();
    const current = store.currentInterval(0)!;
    const first = store.applyTradeoff('l1', current[0], current[1] * 0.8);
    const second = await store.applyTradeoff('l2', 0.3, 0.4);

    expect(second.ok).toBe(false);
    expect(second.ok === false && second.reason).toBe('busy');
    await first;
    expect(server.postLog).toHaveLength(1);
  });

  it('blocks widening drags client-side, no request sent', async () => {
    const { server, store } = await loadedStore();
    const current = store.currentInterval(0)!;
    const outcome = await store.applyTradeoff('l1', current[0] - 0.1, current[1]);

    expect(outcome.ok).toBe(false);
    expect(outcome.ok === false && outcome.reason).toBe('not_nested');
    expect(server.postLog).toHaveLength(0);
    expect(store.toast).toContain('not nested');
  });

  it('marks panels stale while the mutation is in flight', async () => {
    const { store } = await loadedStore();
    const current = store.currentInterval(0)!;
    let sawStaleDuringFlight = false;
    store.subscribe(() => {
      if (store.mutationInFlight && [...store.panels.values()].every((p) => p.stale)) {
        sawStaleDuringFlight = true;
      }
    });
    await store.applyTradeoff('l1', current[0], current[1] * 0.9);
    expect(sawStaleDuringFlight).toBe(true);
    for (const panel of store.panels.values()) {
      expect(panel.stale).toBe(false);
    }
  });

  it('snaps back on a 409 rejection: box unchanged, panels stay valid', async () => {
    const { server, store } = await loadedStore();
    server.failNextPost = new ApiError(409, 'stale_revision', 'client revision 0 is stale');
    const current = store.currentInterval(0)!;
    const outcome = await store.applyTradeoff('l1', current[0], current[1] * 0.9);

    expect(outcome.ok).toBe(false);
    expect(outcome.ok === false && outcome.reason).toBe('rejected');
    expect(store.toast).toContain('stale');
    expect(store.revision).toBe(0);
    expect(store.mutationInFlight).toBe(false);
    for (const panel of store.panels.values()) {
      expect(panel.stale).toBe(false);
      expect(panel.section?.revision).toBe(0);
    }
  });

  it('surfaces a failed re-solve through last_error without a revision bump', async () => {
    const { server, store } = await loadedStore();
    server.failNextSolve = { code: 'RestrictionInfeasibleError', message: 'no good samples' };
    const current = store.currentInterval(0)!;
    const outcome = await store.applyTradeoff('l1', current[0], current[1] * 0.9);

    expect(outcome.ok).toBe(true);
    expect(store.revision).toBe(0);
    expect(store.toast).toContain('RestrictionInfeasibleError');
  });
});

describe('panel consistency', () => {
  it('never mixes revisions: a section fetched at an old revision is stale', async () => {
    const { server, store } = await loadedStore();
    server.sectionRevisionOverride = -1; // pretend the section predates the box
    const key = panelKey([0, 1]);
    await store.refreshPanel(key);
    expect(store.panels.get(key)?.stale).toBe(true);
  });

  it('discards a slow stale fetch that lands after a newer one', async () => {
    const { server, store } = await loadedStore();
    const key = panelKey([0, 1]);

    let releaseFirst!: () => void;
    const firstGate = new Promise<void>((r) => (releaseFirst = r));
    let call = 0;
    server.sectionGate = () => {
      call += 1;
      return call === 1 ? firstGate : Promise.resolve();
    };
    server.sectionRevisionOverride = -1; // the slow fetch carries junk
    const slow = store.refreshPanel(key);
    server.sectionRevisionOverride = null;
    await store.refreshPanel(key);
    expect(store.panels.get(key)?.stale).toBe(false);

    releaseFirst();
    await slow;
    expect(store.panels.get(key)?.stale).toBe(false);
    expect(store.panels.get(key)?.section?.revision).toBe(0);
  });

  it('marks a panel stale when its fetch fails', async () => {
    const { server, store } = await loadedStore();
    const key = panelKey([0, 1]);
    server.sectionGate = () => {
      throw new ApiError(400, 'malformed_body', 'bad query');
    };
    await store.refreshPanel(key);
    expect(store.panels.get(key)?.stale).toBe(true);
    expect(store.toast).toContain('bad query');
  });
});

describe('panel management', () => {
  it('adds and removes panels and refetches on sample-count change', async () => {
    const { server, store } = await loadedStore();
    store.addPanel([1, 2]);
    await Promise.resolve();
    expect(store.panels.size).toBe(4);

    store.removePanel(panelKey([1, 2]));
    expect(store.panels.size).toBe(3);

    server.sectionRequests.length = 0;
    store.setSampleCount(123);
    await new Promise((r) => setTimeout(r, 0));
    expect(server.sectionRequests).toHaveLength(3);
    expect(server.sectionRequests.every((p) => p.includes('n=123'))).toBe(true);
  });
});
