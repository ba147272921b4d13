/**
 * Editable maneuver document and the request it compiles to.
 *
 * The document owns the reference path (legs of straight segments, each leg
 * driven forward or in reverse), the vehicle and tuning numbers, an optional
 * raster underlay, and the last request/response pair. All physics stays on
 * the server; edits only rewrite the path and mark the overlay stale, they
 * never touch lastResponse.
 */

import type {
  DisturbanceConfig, InitialState, LegDirection, LqWeights, PathLeg,
  ServiceDefaults, SimRates, SimulateRequest, SimulateResponse, TrackerConfig,
  VehicleParams, XY,
} from "./types.js";

/** Segments shorter than this are treated as zero-length and rejected. */
export const MIN_SEGMENT_LENGTH = 1e-6;

export interface UnderlayConfig {
  /** Data or object URL of the raster; null draws the metric grid instead. */
  imageUrl: string | null;
  /** Meters covered by one pixel of the underlay image. */
  metersPerPixel: number;
  /** Underlay image pixel that sits on the world origin. */
  originPx: { x: number; y: number };
}

export interface EditorDocument {
  legs: PathLeg[];
  params: VehicleParams;
  weights: LqWeights;
  trackerConfig: TrackerConfig;
  initialState: InitialState;
  speed: number;
  rates: SimRates;
  disturbances: DisturbanceConfig;
  maxSimTime: number;
  underlay: UnderlayConfig | null;
  /** Request that produced lastResponse, kept verbatim for export. */
  lastRequest: SimulateRequest | null;
  lastResponse: SimulateResponse | null;
  /** True once the path or tuning changed after lastResponse arrived. */
  overlayStale: boolean;
}

/** Address of one editable path vertex. */
export interface ControlPointRef {
  leg: number;
  index: number;
}

function copyXY(p: XY): XY {
  return [p[0], p[1]];
}

function copyLegs(legs: PathLeg[]): PathLeg[] {
  return legs.map((leg) => ({
    direction: leg.direction,
    waypoints: leg.waypoints.map(copyXY),
  }));
}

export function newDocument(defaults: ServiceDefaults): EditorDocument {
  return {
    legs: [{ direction: "reverse", waypoints: [[0, 0], [-3, 0]] }],
    params: { ...defaults.params },
    weights: { Q: defaults.weights.Q.map((row) => row.slice()), R: defaults.weights.R },
    trackerConfig: { ...defaults.tracker_config },
    initialState: { x3: 0, y3: 0, theta3: 0, beta3: 0, beta2: 0 },
    speed: defaults.speed,
    rates: { ...defaults.rates },
    disturbances: {
      steering_backlash_halfwidth: 0,
      angle_noise_sigma: 0,
      position_noise_sigma: 0,
      rng_seed: 0,
    },
    maxSimTime: 120,
    underlay: null,
    lastRequest: null,
    lastResponse: null,
    overlayStale: true,
  };
}

export function documentFromRequest(request: SimulateRequest): EditorDocument {
  for (const leg of request.path.legs) {
    if (leg.direction !== "forward" && leg.direction !== "reverse") {
      throw new Error(`leg direction must be forward or reverse, got '${leg.direction}'`);
    }
    if (leg.waypoints.length < 2) {
      throw new Error("each leg needs at least two waypoints");
    }
  }
  return {
    legs: copyLegs(request.path.legs),
    params: { ...request.params },
    weights: { Q: request.weights.Q.map((row) => row.slice()), R: request.weights.R },
    trackerConfig: { ...request.tracker_config },
    initialState: { ...request.initial_state },
    speed: request.speed,
    rates: { ...request.rates },
    disturbances: { ...request.disturbances },
    maxSimTime: request.max_sim_time,
    underlay: null,
    lastRequest: null,
    lastResponse: null,
    overlayStale: true,
  };
}

/**
 * Compile the document into the service request body. Field order matches
 * the service's own serialization so a re-exported request is byte-identical
 * to the imported one.
 */
export function buildSimulateRequest(doc: EditorDocument): SimulateRequest {
  return {
    params: {
      L1: doc.params.L1, L2: doc.params.L2, L3: doc.params.L3,
      M1: doc.params.M1, alpha_limit: doc.params.alpha_limit,
    },
    weights: { Q: doc.weights.Q.map((row) => row.slice()), R: doc.weights.R },
    tracker_config: {
      Lr: doc.trackerConfig.Lr, Kp: doc.trackerConfig.Kp,
      goal_tolerance: doc.trackerConfig.goal_tolerance,
    },
    path: { legs: copyLegs(doc.legs) },
    initial_state: {
      x3: doc.initialState.x3, y3: doc.initialState.y3,
      theta3: doc.initialState.theta3, beta3: doc.initialState.beta3,
      beta2: doc.initialState.beta2,
    },
    speed: doc.speed,
    rates: {
      stabilizer_hz: doc.rates.stabilizer_hz, tracker_hz: doc.rates.tracker_hz,
      integrator_dt: doc.rates.integrator_dt,
    },
    disturbances: {
      steering_backlash_halfwidth: doc.disturbances.steering_backlash_halfwidth,
      angle_noise_sigma: doc.disturbances.angle_noise_sigma,
      position_noise_sigma: doc.disturbances.position_noise_sigma,
      rng_seed: doc.disturbances.rng_seed,
    },
    max_sim_time: doc.maxSimTime,
  };
}

function checkRef(doc: EditorDocument, ref: ControlPointRef): void {
  if (ref.leg < 0 || ref.leg >= doc.legs.length) {
    throw new Error(`no leg ${ref.leg}`);
  }
  const n = doc.legs[ref.leg].waypoints.length;
  if (ref.index < 0 || ref.index >= n) {
    throw new Error(`no waypoint ${ref.index} in leg ${ref.leg}`);
  }
}

export function getControlPoint(doc: EditorDocument, ref: ControlPointRef): XY {
  checkRef(doc, ref);
  return copyXY(doc.legs[ref.leg].waypoints[ref.index]);
}

function sameXY(a: XY, b: XY): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

/**
 * Vertices that move together with ref: the ref itself plus, when ref sits on
 * a junction between legs, the coincident endpoint of the neighboring leg.
 */
function linkedRefs(doc: EditorDocument, ref: ControlPointRef): ControlPointRef[] {
  const refs = [ref];
  const leg = doc.legs[ref.leg];
  const point = leg.waypoints[ref.index];
  if (ref.index === leg.waypoints.length - 1 && ref.leg + 1 < doc.legs.length) {
    const next = doc.legs[ref.leg + 1];
    if (sameXY(next.waypoints[0], point)) {
      refs.push({ leg: ref.leg + 1, index: 0 });
    }
  }
  if (ref.index === 0 && ref.leg > 0) {
    const prev = doc.legs[ref.leg - 1];
    if (sameXY(prev.waypoints[prev.waypoints.length - 1], point)) {
      refs.push({ leg: ref.leg - 1, index: prev.waypoints.length - 1 });
    }
  }
  return refs;
}

export function isJunction(doc: EditorDocument, ref: ControlPointRef): boolean {
  checkRef(doc, ref);
  return linkedRefs(doc, ref).length > 1;
}

/**
 * Move a vertex (and its junction twin) to (x, y) without any validity
 * checks. Marks the overlay stale.
 */
export function moveControlPoint(doc: EditorDocument, ref: ControlPointRef,
                                 x: number, y: number): void {
  checkRef(doc, ref);
  for (const r of linkedRefs(doc, ref)) {
    doc.legs[r.leg].waypoints[r.index] = [x, y];
  }
  doc.overlayStale = true;
}

/** True if any segment touching ref is shorter than MIN_SEGMENT_LENGTH. */
export function zeroLengthAdjacent(doc: EditorDocument, ref: ControlPointRef): boolean {
  for (const r of linkedRefs(doc, ref)) {
    const pts = doc.legs[r.leg].waypoints;
    const p = pts[r.index];
    for (const j of [r.index - 1, r.index + 1]) {
      if (j < 0 || j >= pts.length) {
        continue;
      }
      if (Math.hypot(pts[j][0] - p[0], pts[j][1] - p[1]) < MIN_SEGMENT_LENGTH) {
        return true;
      }
    }
  }
  return false;
}

/**
 * Drop a dragged vertex at (x, y). A drop that collapses an adjacent segment
 * snaps the vertex back to where the drag started and returns false.
 */
export function dragControlPoint(doc: EditorDocument, ref: ControlPointRef,
                                 x: number, y: number): boolean {
  const original = getControlPoint(doc, ref);
  moveControlPoint(doc, ref, x, y);
  if (zeroLengthAdjacent(doc, ref)) {
    moveControlPoint(doc, ref, original[0], original[1]);
    return false;
  }
  return true;
}

/**
 * Append a vertex to the end of the last leg. Earlier legs end on a junction
 * that must stay shared, so they only grow via insertVertex.
 */
export function appendVertex(doc: EditorDocument, legIndex: number, p: XY): boolean {
  if (legIndex < 0 || legIndex >= doc.legs.length) {
    throw new Error(`no leg ${legIndex}`);
  }
  if (legIndex !== doc.legs.length - 1) {
    throw new Error("only the last leg can be extended at its end");
  }
  const pts = doc.legs[legIndex].waypoints;
  const last = pts[pts.length - 1];
  if (Math.hypot(p[0] - last[0], p[1] - last[1]) < MIN_SEGMENT_LENGTH) {
    return false;
  }
  pts.push(copyXY(p));
  doc.overlayStale = true;
  return true;
}

/**
 * Insert a vertex inside segment segIndex (between waypoints segIndex and
 * segIndex + 1) of a leg. Rejects points coincident with either segment end.
 */
export function insertVertex(doc: EditorDocument, legIndex: number,
                             segIndex: number, p: XY): boolean {
  if (legIndex < 0 || legIndex >= doc.legs.length) {
    throw new Error(`no leg ${legIndex}`);
  }
  const pts = doc.legs[legIndex].waypoints;
  if (segIndex < 0 || segIndex >= pts.length - 1) {
    throw new Error(`no segment ${segIndex} in leg ${legIndex}`);
  }
  for (const q of [pts[segIndex], pts[segIndex + 1]]) {
    if (Math.hypot(p[0] - q[0], p[1] - q[1]) < MIN_SEGMENT_LENGTH) {
      return false;
    }
  }
  pts.splice(segIndex + 1, 0, copyXY(p));
  doc.overlayStale = true;
  return true;
}

/**
 * Delete a vertex. Junction vertices (shared by two legs) and vertices whose
 * removal would leave a leg with fewer than two waypoints stay put.
 */
export function deleteVertex(doc: EditorDocument, ref: ControlPointRef): boolean {
  checkRef(doc, ref);
  if (isJunction(doc, ref)) {
    return false;
  }
  const pts = doc.legs[ref.leg].waypoints;
  if (pts.length <= 2) {
    return false;
  }
  pts.splice(ref.index, 1);
  doc.overlayStale = true;
  return true;
}

/**
 * Split a leg in two at an interior vertex; the vertex becomes the shared
 * junction and both halves keep the original direction. Returns the index of
 * the second half.
 */
export function splitLegAtVertex(doc: EditorDocument, ref: ControlPointRef): number {
  checkRef(doc, ref);
  const leg = doc.legs[ref.leg];
  if (ref.index === 0 || ref.index === leg.waypoints.length - 1) {
    throw new Error("split needs an interior vertex");
  }
  const head = leg.waypoints.slice(0, ref.index + 1).map(copyXY);
  const tail = leg.waypoints.slice(ref.index).map(copyXY);
  doc.legs.splice(ref.leg, 1,
                  { direction: leg.direction, waypoints: head },
                  { direction: leg.direction, waypoints: tail });
  doc.overlayStale = true;
  return ref.leg + 1;
}

export function toggleLegDirection(doc: EditorDocument, legIndex: number): LegDirection {
  if (legIndex < 0 || legIndex >= doc.legs.length) {
    throw new Error(`no leg ${legIndex}`);
  }
  const leg = doc.legs[legIndex];
  leg.direction = leg.direction === "forward" ? "reverse" : "forward";
  doc.overlayStale = true;
  return leg.direction;
}

export interface ControlPointHit {
  ref: ControlPointRef;
  distance: number;
}

/** Closest editable vertex to a world point, or null beyond maxDistance. */
export function nearestControlPoint(doc: EditorDocument, p: XY,
                                    maxDistance = Infinity): ControlPointHit | null {
  let best: ControlPointHit | null = null;
  doc.legs.forEach((leg, li) => {
    leg.waypoints.forEach((w, wi) => {
      const d = Math.hypot(w[0] - p[0], w[1] - p[1]);
      if (d <= maxDistance && (best === null || d < best.distance)) {
        best = { ref: { leg: li, index: wi }, distance: d };
      }
    });
  });
  return best;
}

export interface SegmentHit {
  leg: number;
  segment: number;
  distance: number;
  /** Closest point of the segment to the query point. */
  point: XY;
}

/** Closest path segment to a world point, or null beyond maxDistance. */
export function nearestSegment(doc: EditorDocument, p: XY,
                               maxDistance = Infinity): SegmentHit | null {
  let best: SegmentHit | null = null;
  doc.legs.forEach((leg, li) => {
    for (let si = 0; si + 1 < leg.waypoints.length; si += 1) {
      const a = leg.waypoints[si];
      const b = leg.waypoints[si + 1];
      const dx = b[0] - a[0];
      const dy = b[1] - a[1];
      const len2 = dx * dx + dy * dy;
      let s = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0;
      s = Math.min(Math.max(s, 0), 1);
      const q: XY = [a[0] + s * dx, a[1] + s * dy];
      const d = Math.hypot(q[0] - p[0], q[1] - p[1]);
      if (d <= maxDistance && (best === null || d < best.distance)) {
        best = { leg: li, segment: si, distance: d, point: q };
      }
    }
  });
  return best;
}

/** Every path vertex, junctions listed once. */
export function allControlPoints(doc: EditorDocument): ControlPointRef[] {
  const refs: ControlPointRef[] = [];
  doc.legs.forEach((leg, li) => {
    leg.waypoints.forEach((_, wi) => {
      if (li > 0 && wi === 0 && isJunction(doc, { leg: li, index: 0 })) {
        return;
      }
      refs.push({ leg: li, index: wi });
    });
  });
  return refs;
}
