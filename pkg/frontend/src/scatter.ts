/** SVG scatter panel for one DV pair: samples, box rectangle, axes. */

import { COLOR_BASELINE, COLOR_BOX, pointColor } from './colors.js';
import { RectPx, Scale, valueToPx } from './geom.js';
import { PanelState } from './store.js';
import { Interval, SectionPayload } from './types.js';

export const PANEL_WIDTH = 320;
export const PANEL_HEIGHT = 280;
const MARGIN = { left: 52, right: 12, top: 10, bottom: 38 };
const N_TICKS = 5;
const SVG_NS = 'http://www.w3.org/2000/svg';

export interface PanelGeometry {
  xScale: Scale;
  yScale: Scale;
  boxRectPx: RectPx;
}

export interface RenderOptions {
  showGood: boolean;
  showViolations: boolean;
  /** While a drag is live, the provisional interval to draw instead of the
   *  box interval of the dragged dimension. */
  provisional?: { dim: number; interval: Interval } | null;
  baseline?: number[] | null;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, String(v));
  }
  return node;
}

function text(x: number, y: number, s: string, attrs: Record<string, string | number> = {}): SVGTextElement {
  const node = el('text', { x, y, 'font-size': 10, fill: '#333', ...attrs });
  node.textContent = s;
  return node;
}

function tickValues(domain: Interval): number[] {
  const [lo, hi] = domain;
  const out: number[] = [];
  for (let k = 0; k < N_TICKS; k++) {
    out.push(lo + ((hi - lo) * k) / (N_TICKS - 1));
  }
  return out;
}

function fmt(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-2)) {
    return v.toExponential(1);
  }
  return String(Number(v.toPrecision(3)));
}

export function panelGeometry(
  section: SectionPayload,
  boxIntervals: Interval[],
  provisional?: RenderOptions['provisional'],
): PanelGeometry {
  const [i, j] = section.dims;
  const xScale: Scale = {
    domain: section.ds_bounds[0],
    range: [MARGIN.left, PANEL_WIDTH - MARGIN.right],
  };
  const yScale: Scale = {
    domain: section.ds_bounds[1],
    range: [PANEL_HEIGHT - MARGIN.bottom, MARGIN.top], // inverted
  };
  let bx: Interval = boxIntervals[i];
  let by: Interval = boxIntervals[j];
  if (provisional && provisional.dim === i) bx = provisional.interval;
  if (provisional && provisional.dim === j) by = provisional.interval;
  return {
    xScale,
    yScale,
    boxRectPx: {
      x0: valueToPx(xScale, bx[0]),
      x1: valueToPx(xScale, bx[1]),
      y0: valueToPx(yScale, by[1]),
      y1: valueToPx(yScale, by[0]),
    },
  };
}

/** Rebuild the panel's SVG content; cheap enough to run per frame at n <= 2000. */
export function renderPanel(
  svg: SVGSVGElement,
  panel: PanelState,
  boxIntervals: Interval[],
  options: RenderOptions,
): PanelGeometry | null {
  svg.setAttribute('viewBox', `0 0 ${PANEL_WIDTH} ${PANEL_HEIGHT}`);
  svg.replaceChildren();
  const section = panel.section;
  if (!section) {
    svg.appendChild(text(PANEL_WIDTH / 2 - 20, PANEL_HEIGHT / 2, 'loading...'));
    return null;
  }

  const geom = panelGeometry(section, boxIntervals, options.provisional);
  const { xScale, yScale } = geom;

  // frame and ticks
  svg.appendChild(
    el('rect', {
      x: MARGIN.left,
      y: MARGIN.top,
      width: PANEL_WIDTH - MARGIN.left - MARGIN.right,
      height: PANEL_HEIGHT - MARGIN.top - MARGIN.bottom,
      fill: 'none',
      stroke: '#999',
      'stroke-width': 1,
    }),
  );
  for (const v of tickValues(xScale.domain)) {
    const px = valueToPx(xScale, v);
    svg.appendChild(el('line', {
      x1: px, x2: px,
      y1: PANEL_HEIGHT - MARGIN.bottom, y2: PANEL_HEIGHT - MARGIN.bottom + 4,
      stroke: '#999',
    }));
    svg.appendChild(text(px, PANEL_HEIGHT - MARGIN.bottom + 14, fmt(v), { 'text-anchor': 'middle' }));
  }
  for (const v of tickValues(yScale.domain)) {
    const py = valueToPx(yScale, v);
    svg.appendChild(el('line', {
      x1: MARGIN.left - 4, x2: MARGIN.left,
      y1: py, y2: py,
      stroke: '#999',
    }));
    svg.appendChild(text(MARGIN.left - 6, py + 3, fmt(v), { 'text-anchor': 'end' }));
  }
  const [nameX, nameY] = section.dv_names;
  const [unitX, unitY] = section.dv_units;
  svg.appendChild(text(PANEL_WIDTH / 2, PANEL_HEIGHT - 6, `${nameX} [${unitX}]`, { 'text-anchor': 'middle' }));
  const yLabel = text(12, PANEL_HEIGHT / 2, `${nameY} [${unitY}]`, { 'text-anchor': 'middle' });
  yLabel.setAttribute('transform', `rotate(-90 12 ${PANEL_HEIGHT / 2})`);
  svg.appendChild(yLabel);

  // sample points
  for (const p of section.points) {
    const violating = p.violated.length > 0 || p.infeasible_reason !== null;
    if (violating && !options.showViolations) continue;
    if (!violating && !options.showGood) continue;
    svg.appendChild(el('circle', {
      cx: valueToPx(xScale, p.x[0]),
      cy: valueToPx(yScale, p.x[1]),
      r: 2.4,
      fill: pointColor(p, section.requirement_ids),
      'fill-opacity': 0.75,
    }));
  }

  // baseline design marker
  const [i, j] = section.dims;
  if (options.baseline && options.baseline.length > Math.max(i, j)) {
    const cx = valueToPx(xScale, options.baseline[i]);
    const cy = valueToPx(yScale, options.baseline[j]);
    svg.appendChild(el('path', {
      d: `M ${cx - 4} ${cy - 4} L ${cx + 4} ${cy + 4} M ${cx - 4} ${cy + 4} L ${cx + 4} ${cy - 4}`,
      stroke: COLOR_BASELINE,
      'stroke-width': 1.5,
      fill: 'none',
    }));
  }

  // box projection, drawn last so its edges stay grabbable
  const r = geom.boxRectPx;
  svg.appendChild(el('rect', {
    x: r.x0,
    y: r.y0,
    width: Math.max(r.x1 - r.x0, 0),
    height: Math.max(r.y1 - r.y0, 0),
    fill: 'none',
    stroke: COLOR_BOX,
    'stroke-width': options.provisional ? 2.5 : 1.8,
    'stroke-dasharray': options.provisional ? '4 3' : 'none',
    class: 'box-rect',
  }));

  if (panel.stale) {
    svg.appendChild(el('rect', {
      x: 0, y: 0, width: PANEL_WIDTH, height: PANEL_HEIGHT,
      fill: '#ffffff', 'fill-opacity': 0.55, class: 'stale-overlay',
    }));
    svg.appendChild(text(PANEL_WIDTH / 2, 18, panel.loading ? 'refreshing...' : 'stale', {
      'text-anchor': 'middle', 'font-size': 12, fill: '#666',
    }));
  }
  return geom;
}
