/** Pure geometry for panels and edge drags; everything here is unit-tested. */

import { Interval } from './types.js';

export interface Scale {
  domain: Interval;
  range: Interval; // pixel range; y axes pass an inverted range
}

export function valueToPx(s: Scale, v: number): number {
  const [d0, d1] = s.domain;
  const [r0, r1] = s.range;
  const t = d1 === d0 ? 0.5 : (v - d0) / (d1 - d0);
  return r0 + t * (r1 - r0);
}

export function pxToValue(s: Scale, px: number): number {
  const [d0, d1] = s.domain;
  const [r0, r1] = s.range;
  const t = r1 === r0 ? 0.5 : (px - r0) / (r1 - r0);
  return d0 + t * (d1 - d0);
}

export type Edge = 'left' | 'right' | 'bottom' | 'top';

export interface RectPx {
  x0: number;
  x1: number;
  y0: number; // smaller pixel y (top)
  y1: number;
}

/**
 * Which box edge a cursor position grabs, or null. A hit must be within
 * `tol` px of the edge line and inside the edge's span (with the same
 * tolerance, so corners are reachable).
 */
export function edgeHitTest(px: number, py: number, rect: RectPx, tol: number): Edge | null {
  const inX = px >= rect.x0 - tol && px <= rect.x1 + tol;
  const inY = py >= rect.y0 - tol && py <= rect.y1 + tol;
  if (inY && Math.abs(px - rect.x0) <= tol) return 'left';
  if (inY && Math.abs(px - rect.x1) <= tol) return 'right';
  if (inX && Math.abs(py - rect.y0) <= tol) return 'top';
  if (inX && Math.abs(py - rect.y1) <= tol) return 'bottom';
  return null;
}

/** Fraction of the current width a drag may never shrink below. */
export const MIN_WIDTH_FRACTION = 0.02;

/**
 * Clamp a dragged edge value so the interval stays nested in `current` and
 * keeps a sliver of width. Dragging outward (widening) clamps to the current
 * bound, which is what makes widening impossible to request from the UI.
 */
export function clampEdgeDrag(current: Interval, edge: 'lower' | 'upper', value: number): Interval {
  const [lo, hi] = current;
  const minWidth = (hi - lo) * MIN_WIDTH_FRACTION;
  if (edge === 'lower') {
    const v = Math.min(Math.max(value, lo), hi - minWidth);
    return [v, hi];
  }
  const v = Math.max(Math.min(value, hi), lo + minWidth);
  return [lo, v];
}

/** Is `inner` nested in `outer` (allowing exact equality of bounds)? */
export function isNested(inner: Interval, outer: Interval): boolean {
  return inner[0] >= outer[0] && inner[1] <= outer[1] && inner[0] < inner[1];
}

/** Map a panel edge to the DV dimension it controls: x edges move dim i, y edges dim j. */
export function edgeTarget(
  edge: Edge,
  dims: [number, number],
): { dim: number; bound: 'lower' | 'upper' } {
  switch (edge) {
    case 'left':
      return { dim: dims[0], bound: 'lower' };
    case 'right':
      return { dim: dims[0], bound: 'upper' };
    case 'bottom':
      return { dim: dims[1], bound: 'lower' };
    case 'top':
      return { dim: dims[1], bound: 'upper' };
  }
}
