import { readFileSync } from "node:fs";

import type { SimulateRequest, SimulateResponse } from "../src/types.js";

/** Raw bytes of a canned service exchange, exactly as the service sent them. */
export function fixtureText(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

export function parkingRequest(): SimulateRequest {
  return JSON.parse(fixtureText("parking_request.json"));
}

export function parkingResponse(): SimulateResponse {
  return JSON.parse(fixtureText("parking_simulate.json"));
}

export function jackknifeRequest(): SimulateRequest {
  return JSON.parse(fixtureText("jackknife_request.json"));
}

export function jackknifeResponse(): SimulateResponse {
  return JSON.parse(fixtureText("jackknife_simulate.json"));
}
