/**
 * Browser entry point: a single-canvas editor for reference paths, driven by
 * the workbench service. All simulation happens server side; this file only
 * wires DOM events to the document model and redraws.
 */

import { DebouncedSimulator, fetchDefaults, httpTransport } from "./apiClient.js";
import type { ControlPointRef, EditorDocument } from "./pathModel.js";
import {
  appendVertex, buildSimulateRequest, deleteVertex, documentFromRequest,
  dragControlPoint, getControlPoint, insertVertex, isJunction, moveControlPoint,
  nearestControlPoint, nearestSegment, newDocument, splitLegAtVertex,
  toggleLegDirection,
} from "./pathModel.js";
import { canExport, exportManeuver, parseManeuver } from "./export.js";
import { badges, drawScene } from "./render.js";
import type { ScreenPoint, ViewTransform } from "./transform.js";
import { calibrationScale, fitView, screenToWorld } from "./transform.js";
import type { ServiceDefaults, SimulateResponse, XY } from "./types.js";

const VERTEX_PICK_PX = 10;
const SEGMENT_PICK_PX = 8;

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const canvas = element<HTMLCanvasElement>("canvas");
const ctx = canvas.getContext("2d")!;
const statusEl = element<HTMLSpanElement>("status");
const badgesEl = element<HTMLSpanElement>("badges");
const latencyEl = element<HTMLSpanElement>("latency");
const runButton = element<HTMLButtonElement>("run");
const exportButton = element<HTMLButtonElement>("export");
const importInput = element<HTMLInputElement>("import");
const fitButton = element<HTMLButtonElement>("fit");
const calibrateButton = element<HTMLButtonElement>("calibrate");
const underlayInput = element<HTMLInputElement>("underlay");
const underlayMpp = element<HTMLInputElement>("underlay-mpp");
const speedInput = element<HTMLInputElement>("speed");
const lrInput = element<HTMLInputElement>("lr");
const kpInput = element<HTMLInputElement>("kp");
const scrubInput = element<HTMLInputElement>("scrub");
const playButton = element<HTMLButtonElement>("play");

interface DragState {
  ref: ControlPointRef;
  origin: XY;
}

let doc: EditorDocument | null = null;
let view: ViewTransform = { metersPerPixel: 0.01, originPx: { x: 0, y: 0 } };
let selected: ControlPointRef | null = null;
let drag: DragState | null = null;
let panning: { startPx: ScreenPoint; startOrigin: ScreenPoint } | null = null;
let scrubRow = 0;
let playing = false;
let calibrationPoints: ScreenPoint[] | null = null;
let underlayImage: HTMLImageElement | null = null;
let editStartedAt: number | null = null;

const simulator = new DebouncedSimulator({
  transport: httpTransport(),
  onSend: () => {
    statusEl.textContent = "simulating...";
  },
  onResult: (response, request) => {
    if (doc === null) {
      return;
    }
    doc.lastResponse = response;
    doc.lastRequest = request;
    doc.overlayStale = false;
    scrubRow = response.trace.rows.length - 1;
    scrubInput.max = String(response.trace.rows.length - 1);
    scrubInput.value = String(scrubRow);
    redraw();
    if (editStartedAt !== null) {
      latencyEl.textContent = `${(performance.now() - editStartedAt).toFixed(0)} ms`;
      editStartedAt = null;
    }
    updateStatus();
  },
  onError: (error) => {
    statusEl.textContent = `error: ${error.message}`;
  },
});

function canvasPoint(ev: MouseEvent): ScreenPoint {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

function submitEdit(): void {
  if (doc === null) {
    return;
  }
  editStartedAt = performance.now();
  simulator.submit(buildSimulateRequest(doc));
}

function updateStatus(): void {
  if (doc === null) {
    return;
  }
  exportButton.disabled = !canExport(doc) || doc.overlayStale;
  if (doc.lastResponse === null) {
    badgesEl.textContent = "no run yet";
    return;
  }
  const b = badges(doc.lastResponse);
  const parts = [
    `${b.status}${doc.overlayStale ? " (stale)" : ""}`,
    `t=${b.simTime.toFixed(1)} s`,
    `mean ${(b.meanError * 100).toFixed(2)} cm`,
    `max ${(b.maxError * 100).toFixed(2)} cm`,
  ];
  if (b.saturatedRows > 0) {
    parts.push(`saturated ${(b.saturatedShare * 100).toFixed(0)}% of rows`);
  }
  if (b.jackknifePoint !== null) {
    parts.push("JACKKNIFED");
  }
  badgesEl.textContent = parts.join(" | ");
  if (!simulator.busy) {
    statusEl.textContent = "ready";
  }
}

function redraw(): void {
  if (doc === null) {
    return;
  }
  drawScene(ctx, doc, view, canvas.width, canvas.height, {
    selected,
    scrubRow: doc.lastResponse !== null ? scrubRow : null,
    underlayImage,
  });
}

function fitToContent(): void {
  if (doc === null) {
    return;
  }
  const points: XY[] = [];
  for (const leg of doc.legs) {
    points.push(...leg.waypoints);
  }
  if (doc.lastResponse !== null) {
    points.push(...doc.lastResponse.polylines.trailer);
  }
  view = fitView(points, canvas.width, canvas.height);
  redraw();
}

function resizeCanvas(): void {
  const holder = canvas.parentElement!;
  canvas.width = holder.clientWidth;
  canvas.height = holder.clientHeight;
  redraw();
}

function normalizeSelection(ref: ControlPointRef): ControlPointRef {
  // junctions are listed under the earlier leg's last vertex
  if (doc !== null && ref.index === 0 && ref.leg > 0 && isJunction(doc, ref)) {
    return { leg: ref.leg - 1, index: doc.legs[ref.leg - 1].waypoints.length - 1 };
  }
  return ref;
}

canvas.addEventListener("mousedown", (ev) => {
  if (doc === null) {
    return;
  }
  const px = canvasPoint(ev);
  if (calibrationPoints !== null) {
    calibrationPoints.push(px);
    if (calibrationPoints.length === 2) {
      const answer = window.prompt("Distance between the two picked points, in meters:");
      const meters = answer === null ? NaN : Number(answer);
      try {
        const mpp = calibrationScale(calibrationPoints[0], calibrationPoints[1], meters);
        view = { ...view, metersPerPixel: mpp };
        statusEl.textContent = `calibrated: ${mpp.toPrecision(4)} m/px`;
      } catch (err) {
        statusEl.textContent = `calibration failed: ${(err as Error).message}`;
      }
      calibrationPoints = null;
      calibrateButton.textContent = "Calibrate";
      redraw();
    }
    return;
  }
  const world = screenToWorld(view, px);
  const hit = nearestControlPoint(doc, world, VERTEX_PICK_PX * view.metersPerPixel);
  if (hit !== null) {
    selected = normalizeSelection(hit.ref);
    drag = { ref: selected, origin: getControlPoint(doc, selected) };
    redraw();
    return;
  }
  if (ev.shiftKey) {
    if (appendVertex(doc, doc.legs.length - 1, world)) {
      selected = {
        leg: doc.legs.length - 1,
        index: doc.legs[doc.legs.length - 1].waypoints.length - 1,
      };
      submitEdit();
      redraw();
    }
    return;
  }
  selected = null;
  panning = { startPx: px, startOrigin: { ...view.originPx } };
  redraw();
});

canvas.addEventListener("mousemove", (ev) => {
  if (doc === null) {
    return;
  }
  const px = canvasPoint(ev);
  if (drag !== null) {
    const world = screenToWorld(view, px);
    moveControlPoint(doc, drag.ref, world[0], world[1]);
    submitEdit();
    redraw();
    return;
  }
  if (panning !== null) {
    view = {
      ...view,
      originPx: {
        x: panning.startOrigin.x + (px.x - panning.startPx.x),
        y: panning.startOrigin.y + (px.y - panning.startPx.y),
      },
    };
    redraw();
  }
});

window.addEventListener("mouseup", (ev) => {
  if (doc !== null && drag !== null) {
    const world = screenToWorld(view, canvasPoint(ev));
    dragControlPoint(doc, drag.ref, world[0], world[1]);
    submitEdit();
    redraw();
  }
  drag = null;
  panning = null;
});

canvas.addEventListener("dblclick", (ev) => {
  if (doc === null) {
    return;
  }
  const world = screenToWorld(view, canvasPoint(ev));
  const hit = nearestSegment(doc, world, SEGMENT_PICK_PX * view.metersPerPixel);
  if (hit !== null && insertVertex(doc, hit.leg, hit.segment, world)) {
    selected = { leg: hit.leg, index: hit.segment + 1 };
    submitEdit();
    redraw();
  }
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const px = canvasPoint(ev);
  const anchor = screenToWorld(view, px);
  const factor = Math.exp(ev.deltaY * 0.001);
  const mpp = Math.min(Math.max(view.metersPerPixel * factor, 1e-5), 10);
  // keep the world point under the cursor fixed
  view = {
    metersPerPixel: mpp,
    originPx: {
      x: px.x - anchor[0] / mpp,
      y: px.y + anchor[1] / mpp,
    },
  };
  redraw();
}, { passive: false });

window.addEventListener("keydown", (ev) => {
  if (doc === null || selected === null) {
    return;
  }
  if (ev.target instanceof HTMLInputElement) {
    return;
  }
  if (ev.key === "Delete" || ev.key === "Backspace") {
    if (deleteVertex(doc, selected)) {
      selected = null;
      submitEdit();
      redraw();
    }
    ev.preventDefault();
  } else if (ev.key === "g") {
    toggleLegDirection(doc, selected.leg);
    submitEdit();
    redraw();
  } else if (ev.key === "s") {
    try {
      const newLeg = splitLegAtVertex(doc, selected);
      statusEl.textContent = `leg split; leg ${newLeg} starts at the selected vertex`;
      submitEdit();
      redraw();
    } catch (err) {
      statusEl.textContent = (err as Error).message;
    }
  }
});

runButton.addEventListener("click", () => {
  if (doc !== null) {
    editStartedAt = performance.now();
    simulator.submitNow(buildSimulateRequest(doc));
  }
});

exportButton.addEventListener("click", () => {
  if (doc === null || !canExport(doc)) {
    return;
  }
  const blob = new Blob([exportManeuver(doc)], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = "maneuver.json";
  a.click();
  URL.revokeObjectURL(url);
});

importInput.addEventListener("change", async () => {
  const file = importInput.files?.[0];
  if (!file) {
    return;
  }
  try {
    const maneuver = parseManeuver(await file.text());
    doc = documentFromRequest(maneuver.request);
    selected = null;
    speedInput.value = String(doc.speed);
    lrInput.value = String(doc.trackerConfig.Lr);
    kpInput.value = String(doc.trackerConfig.Kp);
    editStartedAt = performance.now();
    simulator.submitNow(maneuver.request);
    fitToContent();
    updateStatus();
  } catch (err) {
    statusEl.textContent = `import failed: ${(err as Error).message}`;
  } finally {
    importInput.value = "";
  }
});

fitButton.addEventListener("click", fitToContent);

calibrateButton.addEventListener("click", () => {
  if (calibrationPoints === null) {
    calibrationPoints = [];
    calibrateButton.textContent = "pick 2 points...";
    statusEl.textContent = "calibration: click two points a known distance apart";
  } else {
    calibrationPoints = null;
    calibrateButton.textContent = "Calibrate";
  }
});

underlayInput.addEventListener("change", () => {
  const file = underlayInput.files?.[0];
  if (!file || doc === null) {
    return;
  }
  const url = URL.createObjectURL(file);
  const image = new Image();
  image.onload = () => {
    underlayImage = image;
    doc!.underlay = {
      imageUrl: url,
      metersPerPixel: Number(underlayMpp.value) || 0.01,
      originPx: { x: image.width / 2, y: image.height / 2 },
    };
    redraw();
  };
  image.src = url;
});

underlayMpp.addEventListener("change", () => {
  if (doc?.underlay) {
    doc.underlay.metersPerPixel = Number(underlayMpp.value) || doc.underlay.metersPerPixel;
    redraw();
  }
});

function bindNumberInput(input: HTMLInputElement, apply: (value: number) => void): void {
  input.addEventListener("change", () => {
    const value = Number(input.value);
    if (doc !== null && Number.isFinite(value)) {
      apply(value);
      doc.overlayStale = true;
      submitEdit();
      updateStatus();
    }
  });
}

bindNumberInput(speedInput, (v) => {
  doc!.speed = v;
});
bindNumberInput(lrInput, (v) => {
  doc!.trackerConfig.Lr = v;
});
bindNumberInput(kpInput, (v) => {
  doc!.trackerConfig.Kp = v;
});

scrubInput.addEventListener("input", () => {
  scrubRow = Number(scrubInput.value);
  redraw();
});

function playLoop(): void {
  if (!playing || doc?.lastResponse == null) {
    return;
  }
  const rows = doc.lastResponse.trace.rows.length;
  scrubRow = (scrubRow + Math.max(1, Math.round(rows / 600))) % rows;
  scrubInput.value = String(scrubRow);
  redraw();
  requestAnimationFrame(playLoop);
}

playButton.addEventListener("click", () => {
  playing = !playing;
  playButton.textContent = playing ? "Pause" : "Play";
  if (playing) {
    requestAnimationFrame(playLoop);
  }
});

window.addEventListener("resize", resizeCanvas);

async function start(): Promise<void> {
  statusEl.textContent = "loading defaults...";
  let defaults: ServiceDefaults;
  try {
    defaults = await fetchDefaults();
  } catch (err) {
    statusEl.textContent = `service unreachable: ${(err as Error).message}`;
    return;
  }
  doc = newDocument(defaults);
  speedInput.value = String(doc.speed);
  lrInput.value = String(doc.trackerConfig.Lr);
  kpInput.value = String(doc.trackerConfig.Kp);
  resizeCanvas();
  fitToContent();
  statusEl.textContent = "ready";
  editStartedAt = performance.now();
  simulator.submitNow(buildSimulateRequest(doc));
}

declare global {
  interface Window {
    __editor?: { doc: () => EditorDocument | null; response: () => SimulateResponse | null };
  }
}

window.__editor = {
  doc: () => doc,
  response: () => doc?.lastResponse ?? null,
};

void start();
