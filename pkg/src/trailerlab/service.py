"""HTTP/WebSocket service exposing the simulation core to the path editor.

The API is mounted twice, at /api and at the frozen /api/v1 prefix.  All
handlers are stateless; the only shared state is an immutable gain-schedule
cache keyed by vehicle params and LQ weights, guarded by a lock.
"""

import json
import math
import time
from pathlib import Path
from threading import Lock

from fastapi import FastAPI, APIRouter, HTTPException, Request, WebSocket
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.websockets import WebSocketDisconnect

from . import __version__
from .lqr import RiccatiError, build_schedule, default_weights
from .model import alpha_max, equilibrium
from .scenarios import (default_params, default_tracker_config,
                        scenario_from_json_obj, scenario_to_json_obj)
from .sim import SimulationTrace, simulate, simulate_stream, tracking_errors
from .tracker import PiecewiseLinearPath

POLYLINE_BODIES = ("trailer", "dolly", "truck")
LIVE_BATCH_ROWS = 1000
LIVE_FLUSH_SECONDS = 0.1

_schedule_cache = {}
_schedule_lock = Lock()


def _cache_key(params, weights):
    return (params, tuple(weights.Q.ravel().tolist()), float(weights.R))


def cached_schedule(params, weights):
    key = _cache_key(params, weights)
    with _schedule_lock:
        schedule = _schedule_cache.get(key)
        if schedule is None:
            schedule = build_schedule(params, weights=weights)
            _schedule_cache[key] = schedule
    return schedule


def clear_schedule_cache():
    with _schedule_lock:
        _schedule_cache.clear()


def steering_capacity(params):
    """Steering linearization cap and the trailer-angle cap it implies."""
    alpha_cap = min(params.alpha_limit, 0.95 * alpha_max(params))
    return alpha_cap, equilibrium(alpha_cap, params).beta3_e


def leg_feasibility(leg, params):
    """Check one leg's corner-curvature demand against the steering caps.

    Each interior waypoint asks for curvature about 2*sin(turn/2) divided
    by the shorter adjacent segment.  Reverse legs must realize that
    curvature through the trailer-angle reference (clamped at beta3_cap);
    forward legs through the steering angle itself.
    """
    alpha_cap, beta3_cap = steering_capacity(params)
    notes = []
    feasible = True
    max_curvature = 0.0
    pts = leg.waypoints
    for k in range(1, len(pts) - 1):
        ux, uy = pts[k][0] - pts[k - 1][0], pts[k][1] - pts[k - 1][1]
        wx, wy = pts[k + 1][0] - pts[k][0], pts[k + 1][1] - pts[k][1]
        lu, lw = math.hypot(ux, uy), math.hypot(wx, wy)
        turn = abs(math.atan2(ux * wy - uy * wx, ux * wx + uy * wy))
        curvature = 2.0 * math.sin(0.5 * turn) / min(lu, lw)
        max_curvature = max(max_curvature, curvature)
        if leg.direction == "reverse":
            need = math.atan(params.L3 * curvature)
            if need > beta3_cap:
                feasible = False
                notes.append(
                    f"waypoint {k}: needs trailer angle "
                    f"{math.degrees(need):.1f} deg, cap "
                    f"{math.degrees(beta3_cap):.1f} deg")
        else:
            need = math.atan(params.L1 * curvature)
            if need > params.alpha_limit:
                feasible = False
                notes.append(
                    f"waypoint {k}: needs steering "
                    f"{math.degrees(need):.1f} deg, limit "
                    f"{math.degrees(params.alpha_limit):.1f} deg")
    return {"direction": leg.direction, "feasible": feasible,
            "max_curvature": max_curvature, "notes": notes}


def path_feasibility(path, params):
    legs = [leg_feasibility(leg, params) for leg in path.legs]
    return {"feasible": all(leg["feasible"] for leg in legs), "legs": legs}


async def _json_body(request):
    try:
        return await request.json()
    except json.JSONDecodeError as exc:
        raise HTTPException(status_code=400,
                            detail=f"request body is not valid JSON: {exc}")


def _simulate_response(scenario):
    feasibility = path_feasibility(scenario.path, scenario.params)
    if not feasibility["feasible"]:
        raise HTTPException(status_code=422, detail={
            "message": "reference path exceeds the vehicle's steering "
                       "capacity", "legs": feasibility["legs"]})
    try:
        schedule = cached_schedule(scenario.params, scenario.weights)
    except RiccatiError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    trace, report = simulate(scenario, schedule=schedule)
    polylines = {body: trace.body_polyline(body).tolist()
                 for body in POLYLINE_BODIES}
    return {
        "trace": trace.to_json_obj(),
        "report": report.to_json_obj(),
        "polylines": polylines,
        "timing": {"sim_time_s": trace.rows[-1][0], "rows": len(trace)},
        "scenario": scenario_to_json_obj(scenario),
    }


def create_app(static_dir=None):
    app = FastAPI(title="trailer-lab", version=__version__)
    router = APIRouter()

    @router.get("/defaults")
    def get_defaults():
        params = default_params()
        tracker = default_tracker_config()
        return {
            "params": params.to_json_obj(),
            "weights": default_weights().to_json_obj(),
            "tracker_config": {"Lr": tracker.Lr, "Kp": tracker.Kp,
                               "goal_tolerance": tracker.goal_tolerance},
            "speed": 0.2,
            "rates": {"stabilizer_hz": 100, "tracker_hz": 10,
                      "integrator_dt": 0.001},
            "alpha_max": alpha_max(params),
        }

    @router.get("/schedule")
    def get_schedule():
        schedule = cached_schedule(default_params(), default_weights())
        return schedule.to_json_obj()

    @router.post("/validate-path")
    async def validate_path(request: Request):
        body = await _json_body(request)
        try:
            path = PiecewiseLinearPath.from_json_obj(body)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return path_feasibility(path, default_params())

    @router.post("/simulate")
    async def post_simulate(request: Request):
        body = await _json_body(request)
        try:
            scenario = scenario_from_json_obj(body)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return JSONResponse(_simulate_response(scenario))

    @router.websocket("/live")
    async def live(ws: WebSocket):
        await ws.accept()
        try:
            body = await ws.receive_json()
        except (json.JSONDecodeError, WebSocketDisconnect):
            await ws.close(code=1003)
            return
        try:
            scenario = scenario_from_json_obj(body)
            schedule = cached_schedule(scenario.params, scenario.weights)
        except (ValueError, RiccatiError) as exc:
            await ws.send_json({"error": str(exc)})
            await ws.close(code=1008)
            return
        rows = []
        batch = []
        status = None
        last_flush = time.monotonic()
        for row, row_status in simulate_stream(scenario, schedule=schedule):
            rows.append(row)
            batch.append(list(row))
            status = row_status
            now = time.monotonic()
            if (len(batch) >= LIVE_BATCH_ROWS
                    or now - last_flush >= LIVE_FLUSH_SECONDS):
                await ws.send_json({"rows": batch})
                batch = []
                last_flush = now
        if batch:
            await ws.send_json({"rows": batch})
        trace = SimulationTrace(rows=rows, status=status, scenario=scenario)
        report = tracking_errors(trace, scenario.path)
        await ws.send_json({"status": status,
                            "report": report.to_json_obj()})
        await ws.close()

    app.include_router(router, prefix="/api")
    app.include_router(router, prefix="/api/v1")

    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = candidate if candidate.is_dir() else None
    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="gui")
    return app
