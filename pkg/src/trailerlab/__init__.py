"""Workbench for reversing a truck with a dolly-steered trailer.

Kinematic model and circular equilibria, a gain-scheduled LQ stabilizer for
the internal angles, a pure-pursuit path tracker for piecewise-linear paths
in both directions of travel, a multi-rate closed-loop simulator, and a
region-of-attraction mapper, with a CLI and an HTTP/WebSocket service.
"""

from .model import (
    VehicleParams, VehicleState, ControlInput, EquilibriumPoint, LinearModel,
    BodyPoses, normalize_angle, state_derivative, derivatives, rk4_step, step,
    alpha_max, equilibrium, linearize, derive_body_poses,
)
from .lqr import (
    RiccatiError, LqWeights, default_weights, solve_lyapunov, solve_care,
    care_residual, lq_gain, GainSchedule, build_schedule, lookup_gain,
    precompensate, StabilizerCommand, stabilizing_control,
)
from .tracker import (
    PathLeg, PiecewiseLinearPath, TrackerConfig, TrackerState,
    LookaheadResult, TrackerCommand, locate_lookahead, heading_error,
    reverse_reference, proportional_boost, forward_steering, tracker_tick,
)
from .sim import (
    TRACE_COLUMNS, JACKKNIFE_LIMIT, GOAL_REACHED, JACKKNIFED, TIMED_OUT,
    SimRates, DisturbanceConfig, SimScenario, SimulationTrace,
    simulate_stream, simulate, polyline_distances, BodyError, TrackingReport,
    tracking_errors, make_eight_path, integrate_open_loop,
)
from .scenarios import (
    default_params, default_tracker_config, straight_line_scenario,
    eight_scenario, parking_scenario, roa_cell_scenario, NAMED_SCENARIOS,
    scenario_to_json_obj, scenario_from_json_obj,
)
from .roa import RoaGrid, RoaMap, region_of_attraction

__version__ = "0.1.0"

__all__ = [
    "VehicleParams", "VehicleState", "ControlInput", "EquilibriumPoint",
    "LinearModel", "BodyPoses", "normalize_angle", "state_derivative",
    "derivatives", "rk4_step", "step", "alpha_max", "equilibrium",
    "linearize", "derive_body_poses",
    "RiccatiError", "LqWeights", "default_weights", "solve_lyapunov",
    "solve_care", "care_residual", "lq_gain", "GainSchedule",
    "build_schedule", "lookup_gain", "precompensate", "StabilizerCommand",
    "stabilizing_control",
    "PathLeg", "PiecewiseLinearPath", "TrackerConfig", "TrackerState",
    "LookaheadResult", "TrackerCommand", "locate_lookahead", "heading_error",
    "reverse_reference", "proportional_boost", "forward_steering",
    "tracker_tick",
    "TRACE_COLUMNS", "JACKKNIFE_LIMIT", "GOAL_REACHED", "JACKKNIFED",
    "TIMED_OUT", "SimRates", "DisturbanceConfig", "SimScenario",
    "SimulationTrace", "simulate_stream", "simulate", "polyline_distances",
    "BodyError", "TrackingReport", "tracking_errors", "make_eight_path",
    "integrate_open_loop",
    "default_params", "default_tracker_config", "straight_line_scenario",
    "eight_scenario", "parking_scenario", "roa_cell_scenario",
    "NAMED_SCENARIOS", "scenario_to_json_obj", "scenario_from_json_obj",
    "RoaGrid", "RoaMap", "region_of_attraction",
    "__version__",
]
