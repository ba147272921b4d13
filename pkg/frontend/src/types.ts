/** JSON shapes exchanged with the workbench HTTP service (/api/v1). */

export type XY = [number, number];

export interface VehicleParams {
  L1: number;
  L2: number;
  L3: number;
  M1: number;
  alpha_limit: number;
}

export interface LqWeights {
  Q: number[][];
  R: number;
}

export interface TrackerConfig {
  Lr: number;
  Kp: number;
  goal_tolerance: number;
}

export type LegDirection = "forward" | "reverse";

export interface PathLeg {
  direction: LegDirection;
  waypoints: XY[];
}

export interface PathSpec {
  legs: PathLeg[];
}

export interface InitialState {
  x3: number;
  y3: number;
  theta3: number;
  beta3: number;
  beta2: number;
}

export interface SimRates {
  stabilizer_hz: number;
  tracker_hz: number;
  integrator_dt: number;
}

export interface DisturbanceConfig {
  steering_backlash_halfwidth: number;
  angle_noise_sigma: number;
  position_noise_sigma: number;
  rng_seed: number;
}

export interface SimulateRequest {
  params: VehicleParams;
  weights: LqWeights;
  tracker_config: TrackerConfig;
  path: PathSpec;
  initial_state: InitialState;
  speed: number;
  rates: SimRates;
  disturbances: DisturbanceConfig;
  max_sim_time: number;
}

export type SimStatus = "goal_reached" | "jackknifed" | "timed_out";

export interface TraceData {
  columns: string[];
  rows: number[][];
  status: SimStatus;
}

export interface BodyErrorStats {
  mean: number;
  max: number;
}

export interface TrackingReport {
  status: SimStatus;
  mean_error: number;
  max_error: number;
  per_body: Record<string, BodyErrorStats>;
}

export interface BodyPolylines {
  trailer: XY[];
  dolly: XY[];
  truck: XY[];
}

export interface SimulateResponse {
  trace: TraceData;
  report: TrackingReport;
  polylines: BodyPolylines;
  timing: { sim_time_s: number; rows: number };
  scenario: SimulateRequest;
}

export interface ServiceDefaults {
  params: VehicleParams;
  weights: LqWeights;
  tracker_config: TrackerConfig;
  speed: number;
  rates: SimRates;
  alpha_max: number;
}

export interface LegFeasibility {
  feasible: boolean;
  notes: string[];
}

export interface PathFeasibility {
  feasible: boolean;
  legs: LegFeasibility[];
}
