"""Multi-rate closed-loop simulator, tracking metrics, and canonical paths.

The cascade runs the pure-pursuit tracker at tracker_hz and the
gain-scheduled stabilizer at stabilizer_hz, both zero-order held, over a
fixed-step RK4 integration of the kinematics.  Disturbances are a
symmetric backlash dead-zone on the actuated steering angle and Gaussian
noise on measurements only; the true state always follows the ODE.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (VehicleParams, VehicleState, derive_body_poses, normalize_angle,
                    rk4_step)
from .lqr import LqWeights, build_schedule, default_weights, stabilizing_control
from .tracker import (PiecewiseLinearPath, TrackerConfig, TrackerState, tracker_tick)

TRACE_COLUMNS = ("t", "x3", "y3", "theta3", "beta3", "beta2", "alpha_cmd",
                 "beta3_ref", "v", "leg_index", "saturated", "jackknifed")
JACKKNIFE_LIMIT = math.radians(85.0)

GOAL_REACHED = "goal_reached"
JACKKNIFED = "jackknifed"
TIMED_OUT = "timed_out"


@dataclass(frozen=True)
class SimRates:
    stabilizer_hz: int = 100
    tracker_hz: int = 10
    integrator_dt: float = 1e-3

    def __post_init__(self):
        if not (self.stabilizer_hz >= self.tracker_hz > 0):
            raise ValueError("rates must satisfy stabilizer_hz >= tracker_hz > 0")
        if self.stabilizer_hz % self.tracker_hz != 0:
            raise ValueError("rates.stabilizer_hz must be an integer multiple of "
                             "rates.tracker_hz")
        tick = 1.0 / self.stabilizer_hz
        if self.integrator_dt > tick * (1.0 + 1e-12):
            raise ValueError("rates.integrator_dt must not exceed the stabilizer tick")
        nsub = round(tick / self.integrator_dt)
        if nsub < 1 or abs(nsub * self.integrator_dt - tick) > 1e-9 * tick:
            raise ValueError("rates.integrator_dt must divide the stabilizer tick")

    @property
    def substeps(self):
        return round(1.0 / (self.stabilizer_hz * self.integrator_dt))


@dataclass(frozen=True)
class DisturbanceConfig:
    steering_backlash_halfwidth: float = 0.0
    angle_noise_sigma: float = 0.0
    position_noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("steering_backlash_halfwidth", "angle_noise_sigma",
                     "position_noise_sigma"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"disturbances.{name} must be non-negative")


@dataclass
class SimScenario:
    params: VehicleParams
    weights: LqWeights
    tracker_config: TrackerConfig
    path: PiecewiseLinearPath
    initial_state: VehicleState
    speed: float = 0.2
    rates: SimRates = field(default_factory=SimRates)
    disturbances: DisturbanceConfig = field(default_factory=DisturbanceConfig)
    max_sim_time: float = 600.0

    def __post_init__(self):
        if not self.speed > 0.0:
            raise ValueError("speed must be strictly positive")
        if not self.max_sim_time > 0.0:
            raise ValueError("max_sim_time must be strictly positive")


class SimulationTrace:
    """Row-per-stabilizer-tick history of one closed-loop run."""

    def __init__(self, rows, status, scenario):
        self.rows = np.asarray(rows, dtype=float)
        self.status = status
        self.scenario = scenario

    @property
    def params(self):
        return self.scenario.params

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return self.rows[:, TRACE_COLUMNS.index(name)]

    def body_polyline(self, body):
        """Positions of one body over the trace as an (n, 2) array."""
        x3, y3 = self.rows[:, 1], self.rows[:, 2]
        if body == "trailer":
            return np.column_stack([x3, y3])
        p = self.params
        th3, b3, b2 = self.rows[:, 3], self.rows[:, 4], self.rows[:, 5]
        th2 = th3 + b3
        dx = x3 + p.L3 * np.cos(th3)
        dy = y3 + p.L3 * np.sin(th3)
        if body == "dolly":
            return np.column_stack([dx, dy])
        hx = dx + p.L2 * np.cos(th2)
        hy = dy + p.L2 * np.sin(th2)
        if body == "hitch":
            return np.column_stack([hx, hy])
        if body == "truck":
            th1 = th2 + b2
            return np.column_stack([hx + p.M1 * np.cos(th1),
                                    hy + p.M1 * np.sin(th1)])
        raise ValueError(f"unknown body '{body}'")

    def to_csv(self, fh):
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for r in self.rows:
            fh.write(f"{r[0]:.9g},{r[1]:.9g},{r[2]:.9g},{r[3]:.9g},{r[4]:.9g},"
                     f"{r[5]:.9g},{r[6]:.9g},{r[7]:.9g},{r[8]:.9g},"
                     f"{int(r[9])},{int(r[10])},{int(r[11])}\n")

    def to_json_obj(self):
        return {"columns": list(TRACE_COLUMNS),
                "rows": [list(r) for r in self.rows.tolist()],
                "status": self.status}


def simulate_stream(scenario, schedule=None):
    """Run the cascade, yielding (row, status) per stabilizer tick.

    status is None for ongoing rows; the final row carries the completion
    status (goal_reached, jackknifed or timed_out) and ends the stream.
    Rows are tuples in TRACE_COLUMNS order.
    """
    params = scenario.params
    if schedule is None:
        schedule = build_schedule(params, scenario.weights)
    rates = scenario.rates
    hz = rates.stabilizer_hz
    ratio = hz // rates.tracker_hz
    nsub = rates.substeps
    dt = rates.integrator_dt
    dist = scenario.disturbances
    rng = np.random.default_rng(dist.rng_seed)
    backlash = dist.steering_backlash_halfwidth
    limit = params.alpha_limit

    x = scenario.initial_state.as_tuple()
    tracker = TrackerState(leg_index=0, progress=0.0)
    mode = scenario.path.legs[0].direction
    beta3_ref = 0.0
    alpha_ff = 0.0
    alpha_cmd = 0.0
    alpha_act = 0.0
    vcmd = 0.0
    saturated = False
    k = 0

    while True:
        t = k / hz
        jack = abs(x[3]) >= JACKKNIFE_LIMIT or abs(x[4]) >= JACKKNIFE_LIMIT
        status = None
        if jack:
            status = JACKKNIFED
        elif t >= scenario.max_sim_time - 1e-12:
            status = TIMED_OUT
        if status is not None:
            yield ((t, x[0], x[1], x[2], x[3], x[4], alpha_cmd, beta3_ref, 0.0,
                    tracker.leg_index, 0.0, 1.0 if jack else 0.0), status)
            return

        mb3, mb2 = x[3], x[4]
        if dist.angle_noise_sigma > 0.0:
            nb = rng.normal(0.0, dist.angle_noise_sigma, 2)
            mb3 += nb[0]
            mb2 += nb[1]

        if k % ratio == 0:
            mx, my = x[0], x[1]
            if dist.position_noise_sigma > 0.0:
                npos = rng.normal(0.0, dist.position_noise_sigma, 2)
                mx += npos[0]
                my += npos[1]
            measured = VehicleState(mx, my, x[2], mb3, mb2)
            cmd, tracker = tracker_tick(measured, scenario.path, tracker,
                                        scenario.tracker_config, params)
            if cmd.goal:
                yield ((t, x[0], x[1], x[2], x[3], x[4], alpha_cmd, beta3_ref, 0.0,
                        tracker.leg_index, 0.0, 0.0), GOAL_REACHED)
                return
            if cmd.leg_changed:
                vcmd = 0.0  # commanded stop for one tracker tick at the gear change
            else:
                mode = cmd.mode
                if mode == "reverse":
                    beta3_ref = cmd.beta3_ref
                    vcmd = -scenario.speed
                else:
                    alpha_ff = cmd.alpha
                    beta3_ref = 0.0
                    vcmd = scenario.speed

        if mode == "reverse":
            stab = stabilizing_control(mb3, mb2, beta3_ref, schedule)
            alpha_cmd = stab.alpha
            saturated = stab.saturated
        else:
            saturated = abs(alpha_ff) > limit
            alpha_cmd = min(limit, max(-limit, alpha_ff))

        if backlash > 0.0:
            if alpha_cmd > alpha_act + backlash:
                alpha_act = alpha_cmd - backlash
            elif alpha_cmd < alpha_act - backlash:
                alpha_act = alpha_cmd + backlash
        else:
            alpha_act = alpha_cmd

        yield ((t, x[0], x[1], x[2], x[3], x[4], alpha_cmd, beta3_ref, vcmd,
                tracker.leg_index, 1.0 if saturated else 0.0, 0.0), None)

        for _ in range(nsub):
            x = rk4_step(x, alpha_act, vcmd, dt, params)
        x = (x[0], x[1], normalize_angle(x[2]), normalize_angle(x[3]),
             normalize_angle(x[4]))
        k += 1


def simulate(scenario, schedule=None):
    """Run a scenario to completion; returns (SimulationTrace, TrackingReport)."""
    rows = []
    status = None
    for row, st in simulate_stream(scenario, schedule):
        rows.append(row)
        if st is not None:
            status = st
    trace = SimulationTrace(rows, status, scenario)
    report = tracking_errors(trace, scenario.path)
    return trace, report


def polyline_distances(points, polyline):
    """Min distance of each point in (n, 2) to a waypoint polyline (m, 2)."""
    P = np.asarray(points, dtype=float)
    W = np.asarray(polyline, dtype=float)
    A, B = W[:-1], W[1:]
    D = B - A
    seg2 = (D * D).sum(axis=1)
    best = np.full(len(P), np.inf)
    for i in range(len(A)):
        if seg2[i] == 0.0:
            d = np.hypot(P[:, 0] - A[i, 0], P[:, 1] - A[i, 1])
        else:
            tt = np.clip(((P - A[i]) @ D[i]) / seg2[i], 0.0, 1.0)
            proj = A[i] + tt[:, None] * D[i]
            d = np.hypot(P[:, 0] - proj[:, 0], P[:, 1] - proj[:, 1])
        np.minimum(best, d, out=best)
    return best


@dataclass(frozen=True)
class BodyError:
    mean: float
    max: float
    series: np.ndarray


@dataclass(frozen=True)
class TrackingReport:
    status: str
    per_body: dict
    mean_error: float
    max_error: float

    def to_json_obj(self):
        return {"status": self.status,
                "mean_error": self.mean_error,
                "max_error": self.max_error,
                "per_body": {b: {"mean": e.mean, "max": e.max}
                             for b, e in self.per_body.items()}}


def tracking_errors(trace, path, body=None, reference_trace=None):
    """Per-sample distance of a body to its reference, aggregated mean/max.

    The reference is the path polyline (per leg, minimum over legs), or the
    same body's polyline from reference_trace when given.  body=None
    reports trailer, dolly and truck.
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    bodies = [body] if body is not None else ["trailer", "dolly", "truck"]
    per_body = {}
    for b in bodies:
        pts = trace.body_polyline(b)
        if reference_trace is not None:
            series = polyline_distances(pts, reference_trace.body_polyline(b))
        else:
            series = np.full(len(pts), np.inf)
            for leg in path.legs:
                np.minimum(series, polyline_distances(pts, leg.waypoints),
                           out=series)
        per_body[b] = BodyError(mean=float(series.mean()),
                                max=float(series.max()), series=series)
    lead = per_body[bodies[0]]
    return TrackingReport(status=trace.status, per_body=per_body,
                          mean_error=lead.mean, max_error=lead.max)


def make_eight_path(radius=1.0, center_separation=None, segments_per_lobe=16,
                    laps=1):
    """Closed eight-shaped reverse path: two circular lobes joined at the origin.

    The right lobe is traversed counter-clockwise starting and ending at its
    inner point, then the left lobe clockwise; for the default separation of
    2*radius the lobes are tangent there and every lap passes smoothly
    through the origin.  Lap copies share the joint waypoint.
    """
    if not radius > 0.0:
        raise ValueError("radius must be strictly positive")
    if center_separation is None:
        center_separation = 2.0 * radius
    n = segments_per_lobe
    cx = center_separation / 2.0
    inner_right = (cx - radius, 0.0)
    inner_left = (-cx + radius, 0.0)
    lap = [inner_right]
    for i in range(1, n):
        phi = math.pi + i * (math.tau / n)
        lap.append((cx + radius * math.cos(phi), radius * math.sin(phi)))
    lap.append(inner_right)
    if math.hypot(inner_left[0] - lap[-1][0], inner_left[1] - lap[-1][1]) > 1e-9:
        lap.append(inner_left)
    for j in range(1, n):
        psi = -j * (math.tau / n)
        lap.append((-cx + radius * math.cos(psi), radius * math.sin(psi)))
    lap.append(inner_left)
    pts = list(lap)
    for _ in range(laps - 1):
        pts.extend(lap[1:])
    return PiecewiseLinearPath(legs=[{"direction": "reverse", "waypoints": pts}])


def integrate_open_loop(initial_state, steering, v, distance, dt, params):
    """Open-loop RK4 rollout with steering given as a function of arc length.

    Returns the (n+1, 5) array of raw states sampled every step.  Because
    the steering profile is indexed by traveled distance, runs at v and 2v
    (with dt halved) traverse identical geometry.
    """
    x = initial_state.as_tuple()
    out = [x]
    nsteps = round(distance / (abs(v) * dt))
    for k in range(nsteps):
        alpha = steering(abs(v) * dt * k)
        x = rk4_step(x, alpha, v, dt, params)
        out.append(x)
    return np.array(out)
