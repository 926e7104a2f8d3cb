/** Page bootstrap: header, panel grid, add-panel controls, legend, toasts. */

import { HttpTransport } from './api.js';
import { COLOR_FIRST, COLOR_GOOD, COLOR_SECOND } from './colors.js';
import { DragController } from './drag.js';
import { PanelGeometry, renderPanel } from './scatter.js';
import { panelKey, Store } from './store.js';
import { Interval } from './types.js';

function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function fmtMu(mu: number): string {
  return mu !== 0 && mu < 1e-3 ? mu.toExponential(3) : mu.toPrecision(4);
}

class PanelView {
  readonly root: HTMLElement;
  private readonly svg: SVGSVGElement;
  private geometry: PanelGeometry | null = null;
  private preview: { dim: number; interval: Interval } | null = null;

  constructor(
    private readonly store: Store,
    private readonly key: string,
  ) {
    this.svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
    this.svg.classList.add('panel-svg');
    this.svg.setAttribute('tabindex', '0');
    const close = h('button', { class: 'panel-close', title: 'remove panel' }, '×');
    close.addEventListener('click', () => store.removePanel(key));
    this.root = h('div', { class: 'panel' }, close, this.svg);

    new DragController(this.svg, {
      geometry: () => this.geometry,
      dims: () => store.panels.get(key)?.dims ?? [0, 1],
      dvName: (dim) => store.problem?.variables[dim]?.name ?? `dv${dim}`,
      currentInterval: (dim) => store.currentInterval(dim),
      dragAllowed: () =>
        !store.mutationInFlight && !(store.panels.get(key)?.stale ?? true),
      onPreview: (preview) => {
        this.preview = preview;
        this.render();
      },
      onCommit: (dv, lower, upper) => {
        void store.applyTradeoff(dv, lower, upper);
      },
    });
  }

  render(): void {
    const panel = this.store.panels.get(this.key);
    const box = this.store.box;
    if (!panel || !box) return;
    this.geometry = renderPanel(this.svg, panel, box.intervals, {
      showGood: this.store.showGood,
      showViolations: this.store.showViolations,
      provisional: this.preview,
      baseline: this.store.baseline?.x_baseline ?? null,
    });
  }
}

class App {
  private readonly store: Store;
  private readonly header = h('div', { class: 'header' });
  private readonly toast = h('div', { class: 'toast hidden' });
  private readonly grid = h('div', { class: 'grid' });
  private readonly controls = h('div', { class: 'controls' });
  private views = new Map<string, PanelView>();

  constructor(root: HTMLElement) {
    this.store = new Store(new HttpTransport());
    root.append(this.header, this.controls, this.toast, this.grid);
    this.store.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    await this.store.init();
    this.buildControls();
    this.render();
  }

  private buildControls(): void {
    const problem = this.store.problem;
    if (!problem) return;
    const selI = h('select', { class: 'dv-select' });
    const selJ = h('select', { class: 'dv-select' });
    problem.variables.forEach((v, idx) => {
      selI.append(h('option', { value: String(idx) }, v.name));
      selJ.append(h('option', { value: String(idx) }, v.name));
    });
    selJ.selectedIndex = Math.min(1, problem.variables.length - 1);
    const add = h('button', {}, 'add panel');
    add.addEventListener('click', () => {
      const i = Number(selI.value);
      const j = Number(selJ.value);
      if (i !== j) this.store.addPanel([i, j]);
    });

    const samples = h('input', { type: 'number', value: String(this.store.sampleCount), min: '10', max: '5000', step: '50' }) as HTMLInputElement;
    samples.addEventListener('change', () => this.store.setSampleCount(Number(samples.value)));

    const goodToggle = h('input', { type: 'checkbox', checked: '' }) as HTMLInputElement;
    const violToggle = h('input', { type: 'checkbox', checked: '' }) as HTMLInputElement;
    const onToggle = () => this.store.setToggles(goodToggle.checked, violToggle.checked);
    goodToggle.addEventListener('change', onToggle);
    violToggle.addEventListener('change', onToggle);

    this.controls.append(
      h('span', { class: 'control-group' }, selI, ' × ', selJ, ' ', add),
      h('span', { class: 'control-group' }, 'samples ', samples),
      h('label', { class: 'legend' }, goodToggle, swatch(COLOR_GOOD), ' good'),
      h('label', { class: 'legend' }, violToggle, swatch(COLOR_FIRST), swatch(COLOR_SECOND), ' violations'),
    );
  }

  private render(): void {
    const { box, problem } = this.store;
    this.header.replaceChildren(
      h('span', { class: 'title' }, problem?.name ?? 'solspace'),
      h('span', {}, `revision ${this.store.revision}`),
      h('span', {}, box ? `μ ${fmtMu(box.mu)}` : ''),
      h('span', {}, box?.purity != null ? `purity ${box.purity.toFixed(4)}` : ''),
      h('span', { class: this.store.mutationInFlight ? 'status busy' : 'status' },
        this.store.mutationInFlight ? 'solving…' : (box?.status ?? 'loading')),
    );

    if (this.store.toast) {
      this.toast.textContent = this.store.toast;
      this.toast.classList.remove('hidden');
      setTimeout(() => this.store.clearToast(), 4000);
    } else {
      this.toast.classList.add('hidden');
    }

    // reconcile grid children with store panels
    for (const [key, view] of this.views) {
      if (!this.store.panels.has(key)) {
        view.root.remove();
        this.views.delete(key);
      }
    }
    for (const [key, panel] of this.store.panels) {
      let view = this.views.get(key);
      if (!view) {
        view = new PanelView(this.store, key);
        this.views.set(key, view);
        this.grid.append(view.root);
      }
      void panel;
      view.render();
    }
  }
}

function swatch(color: string): HTMLElement {
  const s = h('span', { class: 'swatch' });
  s.style.background = color;
  return s;
}

const rootEl = document.getElementById('app');
if (rootEl) {
  new App(rootEl).start().catch((e) => {
    rootEl.textContent = `failed to load: ${e instanceof Error ? e.message : e}`;
  });
}
