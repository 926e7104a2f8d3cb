/**
 * Edge-drag interaction on a panel's box rectangle. A completed inward drag
 * calls `onCommit` exactly once with the DV name and its provisional
 * interval; releasing without movement, pressing Escape, or grabbing while
 * a mutation is in flight commits nothing.
 */

import { clampEdgeDrag, Edge, edgeHitTest, edgeTarget, pxToValue } from './geom.js';
import { PanelGeometry } from './scatter.js';
import { Interval } from './types.js';

const EDGE_TOLERANCE_PX = 6;

export interface DragHost {
  /** Geometry of the latest render, or null before the first one. */
  geometry(): PanelGeometry | null;
  dims(): [number, number];
  dvName(dim: number): string;
  currentInterval(dim: number): Interval | null;
  dragAllowed(): boolean;
  /** Live provisional interval for rendering feedback, null to clear. */
  onPreview(preview: { dim: number; interval: Interval } | null): void;
  onCommit(dv: string, lower: number, upper: number): void;
}

interface ActiveDrag {
  edge: Edge;
  dim: number;
  bound: 'lower' | 'upper';
  start: Interval;
  provisional: Interval;
  moved: boolean;
}

export class DragController {
  private active: ActiveDrag | null = null;

  constructor(
    private readonly svg: SVGSVGElement,
    private readonly host: DragHost,
  ) {
    svg.addEventListener('pointerdown', this.onDown);
    svg.addEventListener('pointermove', this.onMove);
    svg.addEventListener('pointerup', this.onUp);
    svg.addEventListener('keydown', this.onKey);
  }

  /** Cursor position in viewBox units (the svg scales with its container). */
  private toLocal(ev: PointerEvent): { x: number; y: number } | null {
    const ctm = this.svg.getScreenCTM();
    if (!ctm) return null;
    const inv = ctm.inverse();
    const x = inv.a * ev.clientX + inv.c * ev.clientY + inv.e;
    const y = inv.b * ev.clientX + inv.d * ev.clientY + inv.f;
    return { x, y };
  }

  private onDown = (ev: PointerEvent): void => {
    if (!this.host.dragAllowed()) return;
    const geom = this.host.geometry();
    const local = this.toLocal(ev);
    if (!geom || !local) return;
    const edge = edgeHitTest(local.x, local.y, geom.boxRectPx, EDGE_TOLERANCE_PX);
    if (!edge) return;
    const { dim, bound } = edgeTarget(edge, this.host.dims());
    const start = this.host.currentInterval(dim);
    if (!start) return;
    this.active = { edge, dim, bound, start, provisional: start, moved: false };
    this.svg.setPointerCapture(ev.pointerId);
    ev.preventDefault();
  };

  private onMove = (ev: PointerEvent): void => {
    const drag = this.active;
    if (!drag) {
      this.updateCursor(ev);
      return;
    }
    const geom = this.host.geometry();
    const local = this.toLocal(ev);
    if (!geom || !local) return;
    const scale = drag.edge === 'left' || drag.edge === 'right' ? geom.xScale : geom.yScale;
    const raw = pxToValue(scale, drag.edge === 'left' || drag.edge === 'right' ? local.x : local.y);
    drag.provisional = clampEdgeDrag(drag.start, drag.bound, raw);
    drag.moved = true;
    this.host.onPreview({ dim: drag.dim, interval: drag.provisional });
  };

  private onUp = (ev: PointerEvent): void => {
    const drag = this.active;
    this.active = null;
    if (!drag) return;
    this.svg.releasePointerCapture(ev.pointerId);
    this.host.onPreview(null);
    const [lo, hi] = drag.provisional;
    const changed = drag.moved && (lo !== drag.start[0] || hi !== drag.start[1]);
    if (changed) {
      this.host.onCommit(this.host.dvName(drag.dim), lo, hi);
    }
  };

  private onKey = (ev: KeyboardEvent): void => {
    if (ev.key === 'Escape' && this.active) {
      this.active = null;
      this.host.onPreview(null);
    }
  };

  private updateCursor(ev: PointerEvent): void {
    const geom = this.host.geometry();
    const local = this.toLocal(ev);
    if (!geom || !local || !this.host.dragAllowed()) {
      this.svg.style.cursor = 'default';
      return;
    }
    const edge = edgeHitTest(local.x, local.y, geom.boxRectPx, EDGE_TOLERANCE_PX);
    this.svg.style.cursor =
      edge === 'left' || edge === 'right' ? 'ew-resize'
      : edge === 'top' || edge === 'bottom' ? 'ns-resize'
      : 'default';
  }
}
