import { SectionPoint } from './types.js';

// Must stay identical to the SVG exporter's palette.
export const COLOR_GOOD = '#2ca02c';
export const COLOR_FIRST = '#d62728';
export const COLOR_SECOND = '#1f77b4';

export const COLOR_BOX = '#000000';
export const COLOR_BASELINE = '#000000';

/**
 * Marker color for a section point, same policy as the exporter: good is
 * green, an undefined QoI or a violation of the first-listed requirement is
 * red, any other violation is blue.
 */
export function pointColor(point: SectionPoint, requirementIds: string[]): string {
  if (point.violated.length === 0 && point.infeasible_reason === null) {
    return COLOR_GOOD;
  }
  if (point.infeasible_reason !== null) {
    return COLOR_FIRST;
  }
  if (requirementIds.length > 0 && point.violated.includes(requirementIds[0])) {
    return COLOR_FIRST;
  }
  return COLOR_SECOND;
}
