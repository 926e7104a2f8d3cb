/**
 * Client-side state machine. Owns the box revision, enforces the
 * one-mutation-in-flight rule, and keeps every visible panel consistent
 * with the revision shown in the header: a panel whose section was fetched
 * at an older revision is marked stale and grayed until its refetch lands.
 */

import { ApiError, Transport } from './api.js';
import { isNested } from './geom.js';
import {
  BaselinePayload,
  BoxPayload,
  Interval,
  MutationAck,
  ProblemPayload,
  SectionPayload,
  Variable,
} from './types.js';

export interface PanelState {
  dims: [number, number];
  section: SectionPayload | null;
  stale: boolean;
  loading: boolean;
}

export interface StoreOptions {
  sampleCount?: number;
  pollIntervalMs?: number;
  /** Injectable so tests can run the poll loop without real timers. */
  sleep?: (ms: number) => Promise<void>;
}

export type TradeoffOutcome =
  | { ok: true }
  | { ok: false; reason: 'busy' | 'not_nested' | 'rejected'; message: string };

const DEFAULT_SAMPLES = 400;
const kindOrder: Variable['kind'][] = ['actuation', 'control', 'geometry'];

export function panelKey(dims: [number, number]): string {
  return `${dims[0]}-${dims[1]}`;
}

/**
 * Default grid: one panel per DV kind with at least two variables
 * (actuation pair, control pair, geometry pair), falling back to adjacent
 * index pairs when kinds are too small to pair.
 */
export function defaultGrid(variables: Variable[]): [number, number][] {
  const pairs: [number, number][] = [];
  for (const kind of kindOrder) {
    const idx = variables
      .map((v, i) => ({ v, i }))
      .filter((e) => e.v.kind === kind)
      .map((e) => e.i);
    if (idx.length >= 2) {
      pairs.push([idx[0], idx[1]]);
    }
  }
  if (pairs.length > 0) {
    return pairs;
  }
  for (let i = 0; i + 1 < variables.length; i += 2) {
    pairs.push([i, i + 1]);
  }
  return pairs;
}

export class Store {
  problem: ProblemPayload['problem'] | null = null;
  box: BoxPayload | null = null;
  baseline: BaselinePayload['baseline'] | null = null;
  panels = new Map<string, PanelState>();
  sampleCount: number;
  mutationInFlight = false;
  toast: string | null = null;
  showGood = true;
  showViolations = true;

  private readonly pollIntervalMs: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private listeners = new Set<() => void>();
  private fetchSeq = new Map<string, number>();

  constructor(
    private readonly transport: Transport,
    options: StoreOptions = {},
  ) {
    this.sampleCount = options.sampleCount ?? DEFAULT_SAMPLES;
    this.pollIntervalMs = options.pollIntervalMs ?? 250;
    this.sleep = options.sleep ?? ((ms) => new Promise((r) => setTimeout(r, ms)));
  }

  get revision(): number {
    return this.box?.revision ?? 0;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  async init(): Promise<void> {
    const prob = (await this.transport.get('/api/problem')) as ProblemPayload;
    this.problem = prob.problem;
    this.box = (await this.transport.get('/api/box')) as BoxPayload;
    if (this.box.status === 'solving') {
      await this.pollUntilIdle();
    }
    try {
      this.baseline = ((await this.transport.get('/api/baseline')) as BaselinePayload).baseline;
    } catch (e) {
      if (!(e instanceof ApiError && e.status === 404)) throw e;
      this.baseline = null; // run has no baseline, header just omits it
    }
    for (const dims of defaultGrid(this.problem.variables)) {
      this.panels.set(panelKey(dims), { dims, section: null, stale: false, loading: false });
    }
    this.notify();
    await this.refreshAllPanels();
  }

  addPanel(dims: [number, number]): void {
    const key = panelKey(dims);
    if (this.panels.has(key)) return;
    this.panels.set(key, { dims, section: null, stale: false, loading: false });
    this.notify();
    void this.refreshPanel(key);
  }

  removePanel(key: string): void {
    if (this.panels.delete(key)) this.notify();
  }

  setSampleCount(n: number): void {
    if (!Number.isFinite(n) || n < 1) return;
    this.sampleCount = Math.floor(n);
    void this.refreshAllPanels();
  }

  setToggles(showGood: boolean, showViolations: boolean): void {
    this.showGood = showGood;
    this.showViolations = showViolations;
    this.notify();
  }

  async refreshPanel(key: string): Promise<void> {
    const panel = this.panels.get(key);
    if (!panel) return;
    const seq = (this.fetchSeq.get(key) ?? 0) + 1;
    this.fetchSeq.set(key, seq);
    panel.loading = true;
    this.notify();
    const [i, j] = panel.dims;
    try {
      const section = (await this.transport.get(
        `/api/section?i=${i}&j=${j}&n=${this.sampleCount}&span=box`,
      )) as SectionPayload;
      if (this.fetchSeq.get(key) !== seq) return; // a newer fetch owns this panel
      // A mutation may have landed while this fetch was in the air; never
      // show a section from a different revision than the header.
      panel.section = section;
      panel.stale = section.revision !== this.revision;
    } catch (e) {
      if (this.fetchSeq.get(key) !== seq) return;
      panel.stale = true;
      this.setToast(e instanceof Error ? e.message : String(e));
    }
    panel.loading = false;
    this.notify();
  }

  async refreshAllPanels(): Promise<void> {
    await Promise.all([...this.panels.keys()].map((k) => this.refreshPanel(k)));
  }

  currentInterval(dim: number): Interval | null {
    return this.box ? this.box.intervals[dim] : null;
  }

  /**
   * Issue the trade-off for one dragged edge. Exactly one POST per call;
   * returns without a request when a mutation is already in flight or the
   * interval is not nested in the current box (widening).
   */
  async applyTradeoff(dv: string, lower: number, upper: number): Promise<TradeoffOutcome> {
    if (!this.problem || !this.box) {
      return { ok: false, reason: 'rejected', message: 'not loaded yet' };
    }
    if (this.mutationInFlight) {
      return { ok: false, reason: 'busy', message: 'another change is still solving' };
    }
    const dim = this.problem.variables.findIndex((v) => v.name === dv);
    const current = dim >= 0 ? this.box.intervals[dim] : null;
    if (current === null || !isNested([lower, upper], current)) {
      const message = `interval [${lower}, ${upper}] is not nested in the current ${dv} range`;
      this.setToast(message);
      return { ok: false, reason: 'not_nested', message };
    }

    this.mutationInFlight = true;
    for (const panel of this.panels.values()) panel.stale = true;
    this.notify();
    try {
      const ack = (await this.transport.post('/api/tradeoff', {
        dv,
        lower,
        upper,
        revision: this.revision,
      })) as MutationAck;
      if (ack.status === 'solving') {
        await this.pollUntilIdle();
      }
    } catch (e) {
      // 409 busy/stale or 422 semantic rejection: box is unchanged, panels
      // snap back to the still-valid sections.
      this.mutationInFlight = false;
      for (const panel of this.panels.values()) {
        panel.stale = panel.section !== null && panel.section.revision !== this.revision;
      }
      const message = e instanceof Error ? e.message : String(e);
      this.setToast(message);
      this.notify();
      return { ok: false, reason: 'rejected', message };
    }

    if (this.box.last_error !== null) {
      this.setToast(`${this.box.last_error.code}: ${this.box.last_error.message}`);
    }
    await this.refreshAllPanels();
    this.mutationInFlight = false;
    this.notify();
    return { ok: true };
  }

  private async pollUntilIdle(): Promise<void> {
    for (;;) {
      const box = (await this.transport.get('/api/box')) as BoxPayload;
      this.box = box;
      this.notify();
      if (box.status === 'idle') return;
      await this.sleep(this.pollIntervalMs);
    }
  }

  private setToast(message: string): void {
    this.toast = message;
    this.notify();
  }

  clearToast(): void {
    this.toast = null;
    this.notify();
  }
}
