"""Piecewise-linear reference paths and the pure-pursuit high-level controller.

A path is an ordered list of legs, each a waypoint polyline tagged with a
travel direction.  In reverse the controller anchors the look-ahead circle
at the trailer rear axle and turns the bearing error into a desired
trailer/dolly angle beta3_ref for the stabilizer; in forward it anchors at
the truck rear axle and commands the steering angle directly.
"""

import bisect
import math
from dataclasses import dataclass, replace

from .model import derive_body_poses

DIRECTIONS = ("forward", "reverse")


@dataclass
class PathLeg:
    """One directed polyline of the reference path."""

    direction: str
    waypoints: list
    cumlen: list = None

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError("leg.direction must be 'forward' or 'reverse'")
        if len(self.waypoints) < 2:
            raise ValueError("leg.waypoints needs at least 2 points")
        self.waypoints = [(float(p[0]), float(p[1])) for p in self.waypoints]
        cum = [0.0]
        for k, (a, b) in enumerate(zip(self.waypoints, self.waypoints[1:])):
            d = math.hypot(b[0] - a[0], b[1] - a[1])
            if d <= 1e-9:
                raise ValueError(f"leg.waypoints[{k + 1}] duplicates its predecessor")
            cum.append(cum[-1] + d)
        self.cumlen = cum

    @property
    def length(self):
        return self.cumlen[-1]


@dataclass
class PiecewiseLinearPath:
    legs: list

    def __post_init__(self):
        if not self.legs:
            raise ValueError("path.legs must be non-empty")
        legs = []
        for i, leg in enumerate(self.legs):
            if not isinstance(leg, PathLeg):
                try:
                    leg = PathLeg(direction=leg["direction"],
                                  waypoints=leg["waypoints"])
                except (KeyError, TypeError):
                    raise ValueError(f"path.legs[{i}] needs 'direction' and "
                                     f"'waypoints'") from None
                except ValueError as err:
                    raise ValueError(f"path.legs[{i}]: {err}") from None
            legs.append(leg)
        self.legs = legs

    def to_json_obj(self):
        return {"legs": [{"direction": leg.direction,
                          "waypoints": [[x, y] for x, y in leg.waypoints]}
                         for leg in self.legs]}

    @staticmethod
    def from_json_obj(obj):
        if not isinstance(obj, dict) or "legs" not in obj:
            raise ValueError("path must be an object with a 'legs' list")
        return PiecewiseLinearPath(legs=obj["legs"])


@dataclass(frozen=True)
class TrackerConfig:
    Lr: float = 0.5
    Kp: float = 0.3
    goal_tolerance: float = 0.02

    def __post_init__(self):
        if not self.Lr > 0.0:
            raise ValueError("tracker.Lr must be strictly positive")
        if self.Kp < 0.0:
            raise ValueError("tracker.Kp must be non-negative")
        if not self.goal_tolerance > 0.0:
            raise ValueError("tracker.goal_tolerance must be strictly positive")


@dataclass(frozen=True)
class TrackerState:
    leg_index: int = 0
    progress: float = 0.0
    last_lookahead: tuple = None


@dataclass(frozen=True)
class LookaheadResult:
    target: tuple
    theta_e: float
    fallback_used: bool


def locate_lookahead(path, tracker, anchor, Lr):
    """First exit crossing of the look-ahead circle at or beyond progress.

    Segments of the current leg are scanned in path order starting from the
    segment containing `progress`; on the first segment whose outgoing
    circle crossing lies in range, the crossing with the greater parameter
    is taken.  This never backtracks and ignores re-entries of the circle
    by later self-crossing lobes.  Without any crossing the nearest path
    point at-or-after progress is used (fallback).
    """
    leg = path.legs[tracker.leg_index]
    w, cum = leg.waypoints, leg.cumlen
    ax, ay = anchor
    nseg = len(w) - 1
    i0 = min(max(bisect.bisect_right(cum, tracker.progress) - 1, 0), nseg - 1)

    for i in range(i0, nseg):
        x0, y0 = w[i]
        dx, dy = w[i + 1][0] - x0, w[i + 1][1] - y0
        fx, fy = x0 - ax, y0 - ay
        a2 = dx * dx + dy * dy
        a1 = 2.0 * (fx * dx + fy * dy)
        a0 = fx * fx + fy * fy - Lr * Lr
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc <= 0.0:
            continue
        t = (-a1 + math.sqrt(disc)) / (2.0 * a2)
        seglen = cum[i + 1] - cum[i]
        tlo = 0.0
        if i == i0:
            tlo = max(0.0, (tracker.progress - cum[i]) / seglen)
        if tlo <= t <= 1.0:
            target = (x0 + t * dx, y0 + t * dy)
            s = cum[i] + t * seglen
            return (LookaheadResult(target=target, theta_e=0.0, fallback_used=False),
                    replace(tracker, progress=s, last_lookahead=target))

    best = None
    for i in range(i0, nseg):
        x0, y0 = w[i]
        dx, dy = w[i + 1][0] - x0, w[i + 1][1] - y0
        seglen = cum[i + 1] - cum[i]
        tlo = 0.0
        if i == i0:
            tlo = min(max(0.0, (tracker.progress - cum[i]) / seglen), 1.0)
        t = ((ax - x0) * dx + (ay - y0) * dy) / (seglen * seglen)
        t = min(max(t, tlo), 1.0)
        px, py = x0 + t * dx, y0 + t * dy
        d = math.hypot(px - ax, py - ay)
        if best is None or d < best[0]:
            best = (d, (px, py), cum[i] + t * seglen)
    target, s = best[1], best[2]
    return (LookaheadResult(target=target, theta_e=0.0, fallback_used=True),
            replace(tracker, progress=max(tracker.progress, s),
                    last_lookahead=target))


def heading_error(anchor_pose, target):
    """Bearing of the target relative to the travel direction, in (-pi, pi].

    anchor_pose is (x, y, heading, direction) where heading is the trailer
    heading theta3 in reverse (travel direction theta3 + pi) and the truck
    heading theta1 in forward.  Positive means the target lies to the left
    of travel.  The rotation uses explicitly negated direction cosines so
    the result is an exactly odd function under mirroring about the x axis.
    """
    ax, ay, heading, direction = anchor_pose
    dx, dy = target[0] - ax, target[1] - ay
    if math.hypot(dx, dy) < 1e-12:
        raise ValueError("lookahead target coincides with the anchor")
    ct, st = math.cos(heading), math.sin(heading)
    if direction == "reverse":
        ct, st = -ct, -st
    forward = dx * ct + dy * st
    left = dy * ct - dx * st
    return math.atan2(left, forward)


def reverse_reference(theta_e, Lr, L3):
    """Desired beta3 that makes the trailer arc through the look-ahead target."""
    return -math.atan(2.0 * L3 * math.sin(theta_e) / Lr)


def proportional_boost(beta3_d, beta3, Kp):
    """Overshoot the raw reference in proportion to the current beta3 error."""
    return beta3_d + Kp * (beta3_d - beta3)


def forward_steering(theta_e, Lr, L1):
    """Pure-pursuit curvature law for forward motion, anchored at the truck."""
    return math.atan(L1 * 2.0 * math.sin(theta_e) / Lr)


@dataclass(frozen=True)
class TrackerCommand:
    mode: str
    beta3_ref: float = None
    alpha: float = None
    goal: bool = False
    leg_changed: bool = False
    lookahead: LookaheadResult = None


def tracker_tick(state, path, tracker, config, params, mode=None):
    """One high-level tick: leg bookkeeping plus the pure-pursuit command.

    Returns (TrackerCommand, TrackerState).  A finished non-final leg
    advances the tracker and flags leg_changed (the simulator then holds
    v = 0 for one tick); the final leg raises the goal flag instead.
    """
    leg = path.legs[tracker.leg_index]
    if mode is None:
        mode = leg.direction
    if mode == "reverse":
        ax, ay = state.x3, state.y3
        heading = state.theta3
    else:
        truck = derive_body_poses(state, params).truck
        ax, ay = truck[0], truck[1]
        heading = truck[2]

    end = leg.waypoints[-1]
    at_end = (math.hypot(ax - end[0], ay - end[1]) <= config.goal_tolerance
              and tracker.progress >= leg.cumlen[-2])
    if at_end:
        if tracker.leg_index == len(path.legs) - 1:
            return TrackerCommand(mode=mode, goal=True), tracker
        advanced = TrackerState(leg_index=tracker.leg_index + 1, progress=0.0,
                                last_lookahead=None)
        return TrackerCommand(mode=mode, leg_changed=True), advanced

    look, tracker = locate_lookahead(path, tracker, (ax, ay), config.Lr)
    tx, ty = look.target
    if math.hypot(tx - ax, ty - ay) < 1e-12:
        theta_e = 0.0
    else:
        theta_e = heading_error((ax, ay, heading, mode), look.target)
    look = replace(look, theta_e=theta_e)

    if mode == "reverse":
        beta3_d = reverse_reference(theta_e, config.Lr, params.L3)
        ref = proportional_boost(beta3_d, state.beta3, config.Kp)
        return TrackerCommand(mode=mode, beta3_ref=ref, lookahead=look), tracker
    alpha = forward_steering(theta_e, config.Lr, params.L1)
    return TrackerCommand(mode=mode, alpha=alpha, lookahead=look), tracker
