import { describe, expect, it } from "vitest";

import {
  appendVertex, buildSimulateRequest, deleteVertex, documentFromRequest,
  dragControlPoint, getControlPoint, insertVertex, isJunction,
  moveControlPoint, nearestControlPoint, nearestSegment, splitLegAtVertex,
  toggleLegDirection,
} from "../src/pathModel.js";
import { parkingRequest, parkingResponse } from "./helpers.js";

describe("document/request round trip", () => {
  it("recompiles an imported request byte for byte", () => {
    const request = parkingRequest();
    const doc = documentFromRequest(request);
    const rebuilt = buildSimulateRequest(doc);
    expect(JSON.stringify(rebuilt)).toBe(JSON.stringify(request));
  });

  it("deep-copies the request so edits cannot alias it", () => {
    const request = parkingRequest();
    const doc = documentFromRequest(request);
    moveControlPoint(doc, { leg: 0, index: 0 }, 9, 9);
    expect(request.path.legs[0].waypoints[0]).toEqual([0, 0]);
  });

  it("rejects malformed legs", () => {
    const request = parkingRequest();
    (request.path.legs[0] as { direction: string }).direction = "sideways";
    expect(() => documentFromRequest(request)).toThrow(/forward or reverse/);
    const short = parkingRequest();
    short.path.legs[0].waypoints = [[0, 0]];
    expect(() => documentFromRequest(short)).toThrow(/two waypoints/);
  });
});

describe("vertex editing", () => {
  it("moves an endpoint by half a meter exactly", () => {
    const doc = documentFromRequest(parkingRequest());
    const legIndex = doc.legs.length - 1;
    const last = doc.legs[legIndex].waypoints.length - 1;
    const before = getControlPoint(doc, { leg: legIndex, index: last });
    const ok = dragControlPoint(doc, { leg: legIndex, index: last },
                                before[0] + 0.5, before[1]);
    expect(ok).toBe(true);
    const request = buildSimulateRequest(doc);
    const moved = request.path.legs[legIndex].waypoints[last];
    expect(moved[0]).toBe(before[0] + 0.5);
    expect(moved[1]).toBe(before[1]);
  });

  it("moves a junction in both legs at once", () => {
    const doc = documentFromRequest(parkingRequest());
    const j = { leg: 0, index: doc.legs[0].waypoints.length - 1 };
    expect(isJunction(doc, j)).toBe(true);
    moveControlPoint(doc, j, 2.75, 0.25);
    expect(doc.legs[0].waypoints[j.index]).toEqual([2.75, 0.25]);
    expect(doc.legs[1].waypoints[0]).toEqual([2.75, 0.25]);
  });

  it("snaps a drag back when it would collapse a segment", () => {
    const doc = documentFromRequest(parkingRequest());
    const start = getControlPoint(doc, { leg: 0, index: 0 });
    const neighbor = doc.legs[0].waypoints[1];
    const ok = dragControlPoint(doc, { leg: 0, index: 0 },
                                neighbor[0], neighbor[1]);
    expect(ok).toBe(false);
    expect(getControlPoint(doc, { leg: 0, index: 0 })).toEqual(start);
  });

  it("appends, inserts and deletes vertices", () => {
    const doc = documentFromRequest(parkingRequest());
    const leg = doc.legs.length - 1;
    expect(appendVertex(doc, leg, [0.5, -2.5])).toBe(true);
    expect(doc.legs[leg].waypoints[doc.legs[leg].waypoints.length - 1])
      .toEqual([0.5, -2.5]);

    expect(insertVertex(doc, leg, 0, [2.4, -0.8])).toBe(true);
    expect(doc.legs[leg].waypoints[1]).toEqual([2.4, -0.8]);

    expect(deleteVertex(doc, { leg, index: 1 })).toBe(true);
    expect(doc.legs[leg].waypoints[1]).not.toEqual([2.4, -0.8]);
  });

  it("refuses appends and inserts that collapse a segment", () => {
    const doc = documentFromRequest(parkingRequest());
    const last = doc.legs[1].waypoints[doc.legs[1].waypoints.length - 1];
    expect(appendVertex(doc, 1, [last[0], last[1]])).toBe(false);
    const a = doc.legs[0].waypoints[0];
    expect(insertVertex(doc, 0, 0, [a[0], a[1]])).toBe(false);
  });

  it("keeps legs at two waypoints and junctions in place", () => {
    const doc = documentFromRequest(parkingRequest());
    // both parking legs have exactly two waypoints: nothing is deletable
    expect(deleteVertex(doc, { leg: 0, index: 0 })).toBe(false);
    // grow leg 0 so its length is not what protects the junction
    insertVertex(doc, 0, 0, [1.5, 0.3]);
    const junction = { leg: 0, index: doc.legs[0].waypoints.length - 1 };
    expect(isJunction(doc, junction)).toBe(true);
    expect(deleteVertex(doc, junction)).toBe(false);
    expect(deleteVertex(doc, { leg: 1, index: 0 })).toBe(false);
  });

  it("only extends the path at its final leg", () => {
    const doc = documentFromRequest(parkingRequest());
    expect(() => appendVertex(doc, 0, [3.5, 0.5])).toThrow(/last leg/);
    expect(doc.legs[0].waypoints.length).toBe(2);
  });
});

describe("leg structure editing", () => {
  it("splits a leg at an interior vertex into a shared junction", () => {
    const doc = documentFromRequest(parkingRequest());
    insertVertex(doc, 1, 0, [2, -1]);
    const newLeg = splitLegAtVertex(doc, { leg: 1, index: 1 });
    expect(newLeg).toBe(2);
    expect(doc.legs.length).toBe(3);
    expect(doc.legs[1].waypoints).toEqual([[3, 0], [2, -1]]);
    expect(doc.legs[2].waypoints[0]).toEqual([2, -1]);
    expect(doc.legs[2].direction).toBe(doc.legs[1].direction);
    expect(isJunction(doc, { leg: 1, index: 1 })).toBe(true);
  });

  it("rejects splitting at endpoints", () => {
    const doc = documentFromRequest(parkingRequest());
    expect(() => splitLegAtVertex(doc, { leg: 0, index: 0 })).toThrow(/interior/);
  });

  it("toggles a leg's direction", () => {
    const doc = documentFromRequest(parkingRequest());
    expect(doc.legs[0].direction).toBe("forward");
    expect(toggleLegDirection(doc, 0)).toBe("reverse");
    expect(buildSimulateRequest(doc).path.legs[0].direction).toBe("reverse");
  });
});

describe("edits never touch the last response", () => {
  it("leaves lastResponse identical through a burst of edits", () => {
    const doc = documentFromRequest(parkingRequest());
    doc.lastRequest = parkingRequest();
    doc.lastResponse = parkingResponse();
    doc.overlayStale = false;
    const sameObject = doc.lastResponse;
    const snapshot = JSON.stringify(doc.lastResponse);

    dragControlPoint(doc, { leg: 0, index: 0 }, -0.3, 0.4);
    insertVertex(doc, 1, 0, [2.2, -0.9]);
    toggleLegDirection(doc, 0);
    appendVertex(doc, 1, [0.2, -2.6]);

    expect(doc.lastResponse).toBe(sameObject);
    expect(JSON.stringify(doc.lastResponse)).toBe(snapshot);
    expect(doc.overlayStale).toBe(true);
  });
});

describe("hit testing", () => {
  it("finds the nearest vertex within tolerance", () => {
    const doc = documentFromRequest(parkingRequest());
    const hit = nearestControlPoint(doc, [2.95, 0.02], 0.2);
    expect(hit).not.toBeNull();
    expect(getControlPoint(doc, hit!.ref)).toEqual([3, 0]);
    expect(nearestControlPoint(doc, [10, 10], 0.2)).toBeNull();
  });

  it("finds the nearest segment and its closest point", () => {
    const doc = documentFromRequest(parkingRequest());
    const hit = nearestSegment(doc, [1.5, 0.1], 0.2);
    expect(hit).not.toBeNull();
    expect(hit!.leg).toBe(0);
    expect(hit!.segment).toBe(0);
    expect(hit!.point[0]).toBeCloseTo(1.5, 12);
    expect(hit!.point[1]).toBeCloseTo(0, 12);
  });
});
