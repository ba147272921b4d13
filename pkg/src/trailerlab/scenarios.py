"""Canonical test-platform defaults, named scenarios, and the scenario codec.

The scenario JSON mirrors SimScenario field-for-field; every key except
`path` may be omitted and falls back to the defaults below.  The same
format is used by the CLI, the HTTP service, and the GUI.
"""

import math

import numpy as np

from .model import VehicleParams, VehicleState, equilibrium
from .lqr import LqWeights, default_weights, precompensate
from .tracker import PiecewiseLinearPath, TrackerConfig
from .sim import DisturbanceConfig, SimRates, SimScenario, make_eight_path

SCENARIO_KEYS = ("params", "weights", "tracker_config", "path", "initial_state",
                 "speed", "rates", "disturbances", "max_sim_time")


def default_params():
    """Small-scale test rig geometry, steering limited to 44 degrees."""
    return VehicleParams(L1=0.19, L2=0.14, L3=0.345, M1=0.036,
                         alpha_limit=math.radians(44.0))


def default_tracker_config():
    return TrackerConfig(Lr=0.5, Kp=0.3, goal_tolerance=0.02)


def straight_line_scenario(beta3=0.0, beta2=0.0, lateral_offset=0.0, speed=0.2,
                           params=None, integrator_dt=1e-3, max_sim_time=60.0,
                           line_length=15.0):
    """Reverse along the x axis from the origin with an initial disturbance."""
    if params is None:
        params = default_params()
    path = PiecewiseLinearPath(legs=[{
        "direction": "reverse",
        "waypoints": [[1.0, 0.0], [1.0 - line_length, 0.0]],
    }])
    return SimScenario(
        params=params, weights=default_weights(),
        tracker_config=default_tracker_config(), path=path,
        initial_state=VehicleState(0.0, lateral_offset, 0.0, beta3, beta2),
        speed=speed, rates=SimRates(integrator_dt=integrator_dt),
        disturbances=DisturbanceConfig(), max_sim_time=max_sim_time)


def eight_scenario(radius=1.0, laps=5, segments_per_lobe=16, speed=0.2,
                   params=None):
    """Five reverse laps of the tangent two-lobe eight, Lr = 0.4, Kp = 0.3.

    The run starts at the lobe crossing on the curvature-matched circular
    equilibrium: heading +y so reverse travel enters the right lobe
    downward, with the internal angles preset for the lobe radius.
    """
    if params is None:
        params = default_params()
    path = make_eight_path(radius=radius, segments_per_lobe=segments_per_lobe,
                           laps=laps)
    alpha_e0 = precompensate(-math.atan(params.L3 / radius), params)
    point = equilibrium(alpha_e0, params)
    state = VehicleState(0.0, 0.0, math.pi / 2.0, point.beta3_e, point.beta2_e)
    return SimScenario(
        params=params, weights=default_weights(),
        tracker_config=TrackerConfig(Lr=0.4, Kp=0.3, goal_tolerance=0.02),
        path=path, initial_state=state, speed=speed, rates=SimRates(),
        disturbances=DisturbanceConfig(), max_sim_time=600.0)


def parking_scenario(speed=0.2, params=None):
    """Minimal two-leg parking maneuver with two control points per leg.

    Drive forward along the x axis, stop, then back the trailer into a bay
    at 45 degrees behind and to the right of the stop point.
    """
    if params is None:
        params = default_params()
    path = PiecewiseLinearPath(legs=[
        {"direction": "forward", "waypoints": [[0.0, 0.0], [3.0, 0.0]]},
        {"direction": "reverse", "waypoints": [[3.0, 0.0], [1.0, -2.0]]},
    ])
    return SimScenario(
        params=params, weights=default_weights(),
        tracker_config=default_tracker_config(), path=path,
        initial_state=VehicleState(0.0, 0.0, 0.0, 0.0, 0.0),
        speed=speed, rates=SimRates(), disturbances=DisturbanceConfig(),
        max_sim_time=300.0)


def roa_cell_scenario(beta3, beta2, params=None):
    """Straight-line reverse scenario used per region-of-attraction cell."""
    return straight_line_scenario(beta3=beta3, beta2=beta2, params=params,
                                  integrator_dt=0.01, max_sim_time=60.0)


NAMED_SCENARIOS = {
    "straight": lambda: straight_line_scenario(beta3=math.radians(10.0),
                                               beta2=math.radians(-10.0),
                                               lateral_offset=0.3),
    "eight": eight_scenario,
    "parking": parking_scenario,
}


def scenario_to_json_obj(scenario):
    return {
        "params": scenario.params.to_json_obj(),
        "weights": scenario.weights.to_json_obj(),
        "tracker_config": {"Lr": scenario.tracker_config.Lr,
                           "Kp": scenario.tracker_config.Kp,
                           "goal_tolerance": scenario.tracker_config.goal_tolerance},
        "path": scenario.path.to_json_obj(),
        "initial_state": {
            "x3": scenario.initial_state.x3, "y3": scenario.initial_state.y3,
            "theta3": scenario.initial_state.theta3,
            "beta3": scenario.initial_state.beta3,
            "beta2": scenario.initial_state.beta2,
        },
        "speed": scenario.speed,
        "rates": {"stabilizer_hz": scenario.rates.stabilizer_hz,
                  "tracker_hz": scenario.rates.tracker_hz,
                  "integrator_dt": scenario.rates.integrator_dt},
        "disturbances": {
            "steering_backlash_halfwidth":
                scenario.disturbances.steering_backlash_halfwidth,
            "angle_noise_sigma": scenario.disturbances.angle_noise_sigma,
            "position_noise_sigma": scenario.disturbances.position_noise_sigma,
            "rng_seed": scenario.disturbances.rng_seed,
        },
        "max_sim_time": scenario.max_sim_time,
    }


def _subfields(obj, section, defaults, casts):
    if not isinstance(obj, dict):
        raise ValueError(f"{section} must be a JSON object")
    out = dict(defaults)
    for key, value in obj.items():
        if key not in defaults:
            raise ValueError(f"unknown field {section}.{key}")
        try:
            out[key] = casts.get(key, float)(value)
        except (TypeError, ValueError):
            raise ValueError(f"{section}.{key} has an invalid value") from None
    return out


def scenario_from_json_obj(obj):
    """Build a SimScenario from its JSON form; missing keys use defaults."""
    if not isinstance(obj, dict):
        raise ValueError("scenario must be a JSON object")
    for key in obj:
        if key not in SCENARIO_KEYS:
            raise ValueError(f"unknown scenario field '{key}'")
    if "path" not in obj:
        raise ValueError("path is required")

    params = (VehicleParams.from_json_obj(obj["params"]) if "params" in obj
              else default_params())
    weights = (LqWeights.from_json_obj(obj["weights"]) if "weights" in obj
               else default_weights())
    tc = _subfields(obj.get("tracker_config", {}), "tracker_config",
                    {"Lr": 0.5, "Kp": 0.3, "goal_tolerance": 0.02}, {})
    tracker_config = TrackerConfig(**tc)
    path = PiecewiseLinearPath.from_json_obj(obj["path"])
    st = _subfields(obj.get("initial_state", {}), "initial_state",
                    {"x3": 0.0, "y3": 0.0, "theta3": 0.0, "beta3": 0.0,
                     "beta2": 0.0}, {})
    initial_state = VehicleState(**st)
    rt = _subfields(obj.get("rates", {}), "rates",
                    {"stabilizer_hz": 100, "tracker_hz": 10,
                     "integrator_dt": 1e-3},
                    {"stabilizer_hz": int, "tracker_hz": int})
    rates = SimRates(**rt)
    db = _subfields(obj.get("disturbances", {}), "disturbances",
                    {"steering_backlash_halfwidth": 0.0,
                     "angle_noise_sigma": 0.0, "position_noise_sigma": 0.0,
                     "rng_seed": 0},
                    {"rng_seed": int})
    disturbances = DisturbanceConfig(**db)
    try:
        speed = float(obj.get("speed", 0.2))
        max_sim_time = float(obj.get("max_sim_time", 600.0))
    except (TypeError, ValueError):
        raise ValueError("speed/max_sim_time must be numbers") from None
    return SimScenario(params=params, weights=weights,
                       tracker_config=tracker_config, path=path,
                       initial_state=initial_state, speed=speed, rates=rates,
                       disturbances=disturbances, max_sim_time=max_sim_time)
