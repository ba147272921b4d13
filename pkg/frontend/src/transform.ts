/** Mapping between world coordinates (meters, y up) and canvas pixels (y down). */

import type { XY } from "./types.js";

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface ViewTransform {
  /** Meters covered by one canvas pixel. */
  metersPerPixel: number;
  /** Canvas pixel where the world origin lands. */
  originPx: ScreenPoint;
}

export function worldToScreen(view: ViewTransform, p: XY): ScreenPoint {
  return {
    x: view.originPx.x + p[0] / view.metersPerPixel,
    y: view.originPx.y - p[1] / view.metersPerPixel,
  };
}

export function screenToWorld(view: ViewTransform, s: ScreenPoint): XY {
  return [
    (s.x - view.originPx.x) * view.metersPerPixel,
    (view.originPx.y - s.y) * view.metersPerPixel,
  ];
}

/**
 * Scale from a two-point calibration: the user picks two screen points and
 * states the real distance between them.
 */
export function calibrationScale(a: ScreenPoint, b: ScreenPoint,
                                 distanceMeters: number): number {
  const pixels = Math.hypot(b.x - a.x, b.y - a.y);
  if (!(pixels > 0)) {
    throw new Error("calibration points coincide");
  }
  if (!(distanceMeters > 0) || !Number.isFinite(distanceMeters)) {
    throw new Error("calibration distance must be a positive number");
  }
  return distanceMeters / pixels;
}

/**
 * View that shows every given world point inside a canvas of the given pixel
 * size, with a uniform margin. Falls back to 1 cm per pixel centered on the
 * points when they span no area.
 */
export function fitView(points: XY[], widthPx: number, heightPx: number,
                        marginPx = 40): ViewTransform {
  if (points.length === 0) {
    return { metersPerPixel: 0.01, originPx: { x: widthPx / 2, y: heightPx / 2 } };
  }
  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const [x, y] of points) {
    xMin = Math.min(xMin, x);
    xMax = Math.max(xMax, x);
    yMin = Math.min(yMin, y);
    yMax = Math.max(yMax, y);
  }
  const usableW = Math.max(widthPx - 2 * marginPx, 1);
  const usableH = Math.max(heightPx - 2 * marginPx, 1);
  const spanX = xMax - xMin;
  const spanY = yMax - yMin;
  let mpp = Math.max(spanX / usableW, spanY / usableH);
  if (!(mpp > 0)) {
    mpp = 0.01;
  }
  const cx = (xMin + xMax) / 2;
  const cy = (yMin + yMax) / 2;
  return {
    metersPerPixel: mpp,
    originPx: { x: widthPx / 2 - cx / mpp, y: heightPx / 2 + cy / mpp },
  };
}
