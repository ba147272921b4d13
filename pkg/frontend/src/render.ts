/**
 * Render models and canvas drawing.
 *
 * The model functions are pure and DOM-free so they can be tested headless.
 * Simulated body polylines are handed to the canvas exactly as the service
 * returned them: no resampling, smoothing or recomputation happens here.
 */

import type { EditorDocument } from "./pathModel.js";
import { allControlPoints, getControlPoint } from "./pathModel.js";
import type { BodyPolylines, SimStatus, SimulateResponse, XY } from "./types.js";
import type { ViewTransform } from "./transform.js";
import { worldToScreen } from "./transform.js";

export interface StrokeStyle {
  stroke: string;
  width: number;
  dash: number[];
}

export const BODY_STYLES: Record<keyof BodyPolylines, StrokeStyle> = {
  trailer: { stroke: "#d62728", width: 2.5, dash: [] },
  dolly: { stroke: "#2ca02c", width: 1.6, dash: [6, 4] },
  truck: { stroke: "#1f77b4", width: 1.6, dash: [2, 4] },
};

export const LEG_STYLES: Record<"forward" | "reverse", StrokeStyle> = {
  forward: { stroke: "#555555", width: 1.2, dash: [] },
  reverse: { stroke: "#555555", width: 1.2, dash: [8, 5] },
};

/**
 * Vertex lists drawn for the simulated bodies, exactly as served. The arrays
 * are the response's own, shared by reference, so the drawn vertices cannot
 * drift from what the service computed.
 */
export function overlayPolylines(response: SimulateResponse): BodyPolylines {
  return {
    trailer: response.polylines.trailer,
    dolly: response.polylines.dolly,
    truck: response.polylines.truck,
  };
}

export interface FootprintModel {
  /** Row actually shown after clamping to the trace length. */
  row: number;
  t: number;
  /** Trailer, dolly and truck axle positions at that row. */
  skeleton: XY[];
  saturated: boolean;
  jackknifed: boolean;
}

/** Snapshot of the vehicle at one trace row, for the scrub slider. */
export function scrubFootprint(response: SimulateResponse,
                               rowIndex: number): FootprintModel {
  const rows = response.trace.rows;
  const i = Math.min(Math.max(Math.round(rowIndex), 0), rows.length - 1);
  const cols = response.trace.columns;
  const row = rows[i];
  return {
    row: i,
    t: row[cols.indexOf("t")],
    skeleton: [response.polylines.trailer[i], response.polylines.dolly[i],
               response.polylines.truck[i]],
    saturated: row[cols.indexOf("saturated")] !== 0,
    jackknifed: row[cols.indexOf("jackknifed")] !== 0,
  };
}

export interface BadgeModel {
  status: SimStatus;
  /** Rows where the steering command hit its limit. */
  saturatedRows: number;
  saturatedShare: number;
  /** Trailer axle position where the run jackknifed, if it did. */
  jackknifePoint: XY | null;
  meanError: number;
  maxError: number;
  simTime: number;
}

export function badges(response: SimulateResponse): BadgeModel {
  const cols = response.trace.columns;
  const sat = cols.indexOf("saturated");
  let saturatedRows = 0;
  for (const row of response.trace.rows) {
    if (row[sat] !== 0) {
      saturatedRows += 1;
    }
  }
  const rowCount = response.trace.rows.length;
  const jackknifed = response.report.status === "jackknifed";
  return {
    status: response.report.status,
    saturatedRows,
    saturatedShare: rowCount > 0 ? saturatedRows / rowCount : 0,
    jackknifePoint: jackknifed
      ? response.polylines.trailer[rowCount - 1]
      : null,
    meanError: response.report.mean_error,
    maxError: response.report.max_error,
    simTime: response.timing.sim_time_s,
  };
}

export interface GridModel {
  /** World spacing between lines, a 1/2/5 decade step. */
  spacing: number;
  /** World x of each vertical line. */
  vertical: number[];
  /** World y of each horizontal line. */
  horizontal: number[];
}

const GRID_STEPS = [1, 2, 5];

/**
 * Metric grid covering the visible world rectangle, used when no raster
 * underlay is loaded. Spacing is the smallest 1/2/5-decade step at least
 * minPixels apart on screen.
 */
export function metricGrid(view: ViewTransform, widthPx: number, heightPx: number,
                           minPixels = 45): GridModel {
  const minWorld = minPixels * view.metersPerPixel;
  let spacing = Number.POSITIVE_INFINITY;
  for (let decade = -4; decade <= 4; decade += 1) {
    for (const step of GRID_STEPS) {
      const candidate = step * 10 ** decade;
      if (candidate >= minWorld && candidate < spacing) {
        spacing = candidate;
      }
    }
  }
  if (!Number.isFinite(spacing)) {
    spacing = minWorld;
  }
  const xLo = (0 - view.originPx.x) * view.metersPerPixel;
  const xHi = (widthPx - view.originPx.x) * view.metersPerPixel;
  const yLo = (view.originPx.y - heightPx) * view.metersPerPixel;
  const yHi = view.originPx.y * view.metersPerPixel;
  const vertical: number[] = [];
  for (let k = Math.ceil(xLo / spacing); k * spacing <= xHi; k += 1) {
    vertical.push(k * spacing);
  }
  const horizontal: number[] = [];
  for (let k = Math.ceil(yLo / spacing); k * spacing <= yHi; k += 1) {
    horizontal.push(k * spacing);
  }
  return { spacing, vertical, horizontal };
}

export interface SceneOptions {
  selected?: { leg: number; index: number } | null;
  scrubRow?: number | null;
  underlayImage?: CanvasImageSource | null;
}

function strokePolyline(ctx: CanvasRenderingContext2D, view: ViewTransform,
                        points: readonly XY[], style: StrokeStyle): void {
  if (points.length < 2) {
    return;
  }
  ctx.save();
  ctx.strokeStyle = style.stroke;
  ctx.lineWidth = style.width;
  ctx.setLineDash(style.dash);
  ctx.beginPath();
  const first = worldToScreen(view, points[0]);
  ctx.moveTo(first.x, first.y);
  for (let i = 1; i < points.length; i += 1) {
    const s = worldToScreen(view, points[i]);
    ctx.lineTo(s.x, s.y);
  }
  ctx.stroke();
  ctx.restore();
}

function drawGrid(ctx: CanvasRenderingContext2D, view: ViewTransform,
                  widthPx: number, heightPx: number): void {
  const grid = metricGrid(view, widthPx, heightPx);
  ctx.save();
  ctx.lineWidth = 1;
  for (const x of grid.vertical) {
    const s = worldToScreen(view, [x, 0]);
    ctx.strokeStyle = Math.abs(x) < grid.spacing / 2 ? "#b0b0b0" : "#e4e4e4";
    ctx.beginPath();
    ctx.moveTo(s.x, 0);
    ctx.lineTo(s.x, heightPx);
    ctx.stroke();
  }
  for (const y of grid.horizontal) {
    const s = worldToScreen(view, [0, y]);
    ctx.strokeStyle = Math.abs(y) < grid.spacing / 2 ? "#b0b0b0" : "#e4e4e4";
    ctx.beginPath();
    ctx.moveTo(0, s.y);
    ctx.lineTo(widthPx, s.y);
    ctx.stroke();
  }
  ctx.fillStyle = "#999999";
  ctx.font = "11px sans-serif";
  ctx.fillText(`grid ${grid.spacing} m`, 8, heightPx - 8);
  ctx.restore();
}

function drawUnderlay(ctx: CanvasRenderingContext2D, view: ViewTransform,
                      doc: EditorDocument, image: CanvasImageSource): void {
  if (doc.underlay === null) {
    return;
  }
  const u = doc.underlay;
  // scale between underlay pixels and canvas pixels
  const scale = u.metersPerPixel / view.metersPerPixel;
  const origin = worldToScreen(view, [0, 0]);
  ctx.save();
  ctx.globalAlpha = 0.85;
  ctx.translate(origin.x - u.originPx.x * scale, origin.y - u.originPx.y * scale);
  ctx.scale(scale, scale);
  ctx.drawImage(image, 0, 0);
  ctx.restore();
}

function drawMarker(ctx: CanvasRenderingContext2D, x: number, y: number,
                    radius: number, fill: string, stroke: string): void {
  ctx.beginPath();
  ctx.arc(x, y, radius, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
  ctx.strokeStyle = stroke;
  ctx.lineWidth = 1.5;
  ctx.stroke();
}

/** Draw the whole scene onto a canvas. */
export function drawScene(ctx: CanvasRenderingContext2D, doc: EditorDocument,
                          view: ViewTransform, widthPx: number, heightPx: number,
                          options: SceneOptions = {}): void {
  ctx.clearRect(0, 0, widthPx, heightPx);
  ctx.fillStyle = "#fcfcfc";
  ctx.fillRect(0, 0, widthPx, heightPx);
  if (doc.underlay !== null && options.underlayImage) {
    drawUnderlay(ctx, view, doc, options.underlayImage);
  } else {
    drawGrid(ctx, view, widthPx, heightPx);
  }

  for (const leg of doc.legs) {
    strokePolyline(ctx, view, leg.waypoints, LEG_STYLES[leg.direction]);
  }

  if (doc.lastResponse !== null) {
    const overlay = overlayPolylines(doc.lastResponse);
    ctx.save();
    if (doc.overlayStale) {
      ctx.globalAlpha = 0.35;
    }
    strokePolyline(ctx, view, overlay.dolly, BODY_STYLES.dolly);
    strokePolyline(ctx, view, overlay.truck, BODY_STYLES.truck);
    strokePolyline(ctx, view, overlay.trailer, BODY_STYLES.trailer);
    ctx.restore();

    const badge = badges(doc.lastResponse);
    if (badge.jackknifePoint !== null && !doc.overlayStale) {
      const s = worldToScreen(view, badge.jackknifePoint);
      drawMarker(ctx, s.x, s.y, 9, "#ffdd57", "#c0392b");
      ctx.fillStyle = "#c0392b";
      ctx.font = "bold 12px sans-serif";
      ctx.fillText("JACKKNIFE", s.x + 12, s.y + 4);
    }

    if (options.scrubRow !== null && options.scrubRow !== undefined
        && !doc.overlayStale) {
      const foot = scrubFootprint(doc.lastResponse, options.scrubRow);
      strokePolyline(ctx, view, foot.skeleton,
                     { stroke: "#222222", width: 2, dash: [] });
      const names: (keyof BodyPolylines)[] = ["trailer", "dolly", "truck"];
      foot.skeleton.forEach((p, i) => {
        const s = worldToScreen(view, p);
        drawMarker(ctx, s.x, s.y, i === 0 ? 6 : 4,
                   BODY_STYLES[names[i]].stroke, "#ffffff");
      });
    }
  }

  for (const ref of allControlPoints(doc)) {
    const p = getControlPoint(doc, ref);
    const s = worldToScreen(view, p);
    const selected = options.selected
      && options.selected.leg === ref.leg && options.selected.index === ref.index;
    drawMarker(ctx, s.x, s.y, selected ? 7 : 5,
               selected ? "#ff7f0e" : "#ffffff", "#333333");
  }
}
