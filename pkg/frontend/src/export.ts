/**
 * Maneuver files: the exact request that produced a successful run plus a
 * digest of its result. Only runs that reached the goal may be exported;
 * importing rebuilds the document and replays the stored request, which
 * reproduces the overlay because the service is deterministic.
 */

import type { EditorDocument } from "./pathModel.js";
import type { SimulateRequest } from "./types.js";

export interface ResultDigest {
  status: string;
  mean_error: number;
  max_error: number;
  rows: number;
  sim_time_s: number;
  per_body: Record<string, { mean: number; max: number }>;
}

export interface ManeuverFile {
  request: SimulateRequest;
  result_digest: ResultDigest;
}

/** Export is allowed only after an un-edited run that reached its goal. */
export function canExport(doc: EditorDocument): boolean {
  return doc.lastRequest !== null && doc.lastResponse !== null
    && doc.lastResponse.report.status === "goal_reached";
}

export function exportManeuver(doc: EditorDocument): string {
  if (!canExport(doc)) {
    throw new Error("export needs a finished run that reached its goal");
  }
  const response = doc.lastResponse!;
  const perBody: ResultDigest["per_body"] = {};
  for (const [body, stats] of Object.entries(response.report.per_body)) {
    perBody[body] = { mean: stats.mean, max: stats.max };
  }
  const file: ManeuverFile = {
    request: doc.lastRequest!,
    result_digest: {
      status: response.report.status,
      mean_error: response.report.mean_error,
      max_error: response.report.max_error,
      rows: response.timing.rows,
      sim_time_s: response.timing.sim_time_s,
      per_body: perBody,
    },
  };
  return JSON.stringify(file, null, 1);
}

export function parseManeuver(text: string): ManeuverFile {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    throw new Error("maneuver file is not valid JSON");
  }
  if (typeof parsed !== "object" || parsed === null) {
    throw new Error("maneuver file must be a JSON object");
  }
  const obj = parsed as Record<string, unknown>;
  const request = obj.request as SimulateRequest | undefined;
  const digest = obj.result_digest as ResultDigest | undefined;
  if (!request || typeof request !== "object") {
    throw new Error("maneuver file is missing 'request'");
  }
  if (!digest || typeof digest !== "object") {
    throw new Error("maneuver file is missing 'result_digest'");
  }
  for (const field of ["params", "weights", "tracker_config", "path",
                       "initial_state", "speed", "rates", "disturbances",
                       "max_sim_time"] as const) {
    if (!(field in request)) {
      throw new Error(`maneuver request is missing '${field}'`);
    }
  }
  if (!Array.isArray(request.path.legs) || request.path.legs.length === 0) {
    throw new Error("maneuver request path has no legs");
  }
  return { request, result_digest: digest };
}
