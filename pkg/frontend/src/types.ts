/** Payload shapes of the /api/ endpoints, mirrored field for field. */

export type Interval = [number, number];

export interface Variable {
  name: string;
  unit: string;
  kind: 'control' | 'actuation' | 'geometry';
  lower: number;
  upper: number;
}

export interface Requirement {
  id: string;
  qoi: string;
  comparator: 'less_equal' | 'greater_equal';
  threshold: number;
}

export interface ProblemPayload {
  revision: number;
  problem: {
    name?: string;
    variables: Variable[];
    requirements: Requirement[];
    x_baseline?: number[];
    [key: string]: unknown;
  };
}

export type RunStatus = 'idle' | 'solving';

export interface BoxPayload {
  intervals: Interval[];
  mu: number;
  purity: number | null;
  seed: number;
  params: Record<string, number>;
  revision: number;
  status: RunStatus;
  last_error: { code: string; message: string } | null;
}

export interface SectionPoint {
  x: [number, number];
  violated: string[];
  infeasible_reason: string | null;
}

export interface SectionPayload {
  dims: [number, number];
  dv_names: [string, string];
  dv_units: [string, string];
  ds_bounds: [Interval, Interval];
  box_rect: [Interval, Interval];
  requirement_ids: string[];
  span: 'box' | 'design_space';
  seed: number;
  points: SectionPoint[];
  revision: number;
}

export interface BaselinePayload {
  revision: number;
  baseline: {
    x_baseline: number[];
    qois: Record<string, number | null>;
    objective: number;
    evaluations_used: number;
    seed: number;
  };
}

export interface MutationAck {
  revision: number;
  status: RunStatus;
}

export interface TradeoffRequest {
  dv: string;
  lower: number;
  upper: number;
  revision: number;
}
