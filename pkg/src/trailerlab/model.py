"""Kinematic model of a general 2-trailer vehicle with an off-axle hitch.

The vehicle is a chain truck -> dolly -> trailer.  The truck has wheelbase
L1 and tows from a hitch point M1 behind its rear axle.  The dolly drawbar
(hitch to dolly axle) has length L2, and the trailer spans L3 from its
kingpin at the dolly axle back to the trailer axle.  State is taken at the
trailer axle:

    x3, y3   trailer axle position [m]
    theta3   trailer heading [rad], counter-clockwise from +x
    beta3    theta2 - theta3, trailer/dolly relative angle [rad]
    beta2    theta1 - theta2, dolly/truck relative angle [rad]

Control is the truck steering angle alpha and the signed longitudinal
speed v at the truck rear axle (v < 0 reverses).
"""

import math
from dataclasses import dataclass

import numpy as np

HALF_PI = math.pi / 2.0


def normalize_angle(x):
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(x, math.tau)
    if r == -math.pi:
        r = math.pi
    return r


@dataclass(frozen=True)
class VehicleParams:
    """Geometric constants of one vehicle configuration (SI units)."""

    L1: float
    L2: float
    L3: float
    M1: float
    alpha_limit: float

    def __post_init__(self):
        for name in ("L1", "L2", "L3"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"params.{name} must be strictly positive")
        if self.M1 < 0.0:
            raise ValueError("params.M1 must be non-negative")
        if self.L3 ** 2 + self.L2 ** 2 - self.M1 ** 2 <= 0.0:
            raise ValueError("params.M1 too large: L3^2 + L2^2 - M1^2 must be positive")
        if not 0.0 < self.alpha_limit < HALF_PI:
            raise ValueError("params.alpha_limit must lie in (0, pi/2)")

    def to_json_obj(self):
        return {"L1": self.L1, "L2": self.L2, "L3": self.L3, "M1": self.M1,
                "alpha_limit": self.alpha_limit}

    @staticmethod
    def from_json_obj(obj):
        try:
            return VehicleParams(**{k: float(obj[k])
                                    for k in ("L1", "L2", "L3", "M1", "alpha_limit")})
        except KeyError as missing:
            raise ValueError(f"params.{missing.args[0]} is required") from None


@dataclass(frozen=True)
class VehicleState:
    """Generalized coordinates; angles are stored normalized to (-pi, pi]."""

    x3: float
    y3: float
    theta3: float
    beta3: float
    beta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta3", normalize_angle(self.theta3))
        object.__setattr__(self, "beta3", normalize_angle(self.beta3))
        object.__setattr__(self, "beta2", normalize_angle(self.beta2))

    def as_tuple(self):
        return (self.x3, self.y3, self.theta3, self.beta3, self.beta2)


@dataclass(frozen=True)
class ControlInput:
    alpha: float
    v: float


@dataclass(frozen=True)
class EquilibriumPoint:
    """Constant-steering steady state; radii are math.inf for alpha_e = 0."""

    alpha_e: float
    beta3_e: float
    beta2_e: float
    R1: float
    R2: float
    R3: float


@dataclass(frozen=True)
class LinearModel:
    """Jacobians of (beta3_dot, beta2_dot) about a circular equilibrium."""

    A: np.ndarray
    B: np.ndarray
    equilibrium: EquilibriumPoint
    v_design: float


def state_derivative(x, alpha, v, params):
    """Time derivative of the raw state tuple (x3, y3, theta3, beta3, beta2).

    beta3_dot is formed as theta2_dot - theta3_dot from the no-slip rates of
    the individual bodies, which is the unique form consistent with the
    circular equilibria (zero residual there).
    """
    if not abs(alpha) < HALF_PI:
        raise ValueError("alpha must satisfy |alpha| < pi/2")
    L1, L2, L3, M1 = params.L1, params.L2, params.L3, params.M1
    theta3, beta3, beta2 = x[2], x[3], x[4]
    ta = math.tan(alpha)
    c2 = math.cos(beta2)
    g2 = c2 * (1.0 + (M1 / L1) * math.tan(beta2) * ta)
    v3 = v * math.cos(beta3) * g2
    dtheta2 = v * c2 * (math.tan(beta2) - (M1 / L1) * ta) / L2
    dtheta3 = v * g2 * math.sin(beta3) / L3
    dbeta2 = v * (ta / L1 - math.sin(beta2) / L2 + (M1 / (L1 * L2)) * c2 * ta)
    return (v3 * math.cos(theta3), v3 * math.sin(theta3), dtheta3,
            dtheta2 - dtheta3, dbeta2)


def derivatives(state, control, params):
    """Spec-level wrapper of state_derivative over the typed state."""
    return state_derivative(state.as_tuple(), control.alpha, control.v, params)


def rk4_step(x, alpha, v, dt, params):
    """One classical RK4 step on the raw state tuple, input held constant."""
    k1 = state_derivative(x, alpha, v, params)
    x2 = (x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1], x[2] + 0.5 * dt * k1[2],
          x[3] + 0.5 * dt * k1[3], x[4] + 0.5 * dt * k1[4])
    k2 = state_derivative(x2, alpha, v, params)
    x3 = (x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1], x[2] + 0.5 * dt * k2[2],
          x[3] + 0.5 * dt * k2[3], x[4] + 0.5 * dt * k2[4])
    k3 = state_derivative(x3, alpha, v, params)
    x4 = (x[0] + dt * k3[0], x[1] + dt * k3[1], x[2] + dt * k3[2],
          x[3] + dt * k3[3], x[4] + dt * k3[4])
    k4 = state_derivative(x4, alpha, v, params)
    w = dt / 6.0
    return (x[0] + w * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
            x[1] + w * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
            x[2] + w * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
            x[3] + w * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3]),
            x[4] + w * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4]))


def step(state, control, params, dt):
    """RK4 step of the typed state; output angles normalized."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    out = rk4_step(state.as_tuple(), control.alpha, control.v, dt, params)
    return VehicleState(*out)


def alpha_max(params):
    """Largest steering angle with a real circular equilibrium (R3 -> 0)."""
    return math.atan(math.sqrt(params.L1 ** 2 /
                               (params.L3 ** 2 + params.L2 ** 2 - params.M1 ** 2)))


def equilibrium(alpha_e, params):
    """Circular equilibrium angles and circle radii for constant steering.

    All four axle/hitch points turn about a common center; the radii follow
    from right triangles along the chain.  Sign and absolute value are
    handled separately so mirrored steering gives an exactly mirrored
    equilibrium.
    """
    if not abs(alpha_e) < alpha_max(params):
        raise ValueError("alpha_e must satisfy |alpha_e| < alpha_max")
    if alpha_e == 0.0:
        return EquilibriumPoint(0.0, 0.0, 0.0, math.inf, math.inf, math.inf)
    L1, L2, L3, M1 = params.L1, params.L2, params.L3, params.M1
    R1 = L1 / abs(math.tan(alpha_e))
    R2 = math.sqrt(R1 * R1 + M1 * M1 - L2 * L2)
    R3 = math.sqrt(R2 * R2 - L3 * L3)
    s = math.copysign(1.0, alpha_e)
    beta3_e = s * math.atan(L3 / R3)
    beta2_e = s * (math.atan(M1 / R1) + math.atan(L2 / R2))
    return EquilibriumPoint(alpha_e, beta3_e, beta2_e, R1, R2, R3)


def linearize(alpha_e, v_design, params):
    """Analytic Jacobians of (beta3_dot, beta2_dot) w.r.t. (beta3, beta2, alpha).

    Evaluated at the circular equilibrium of alpha_e; both A and B carry the
    common factor v_design, so reversing flips every sign.
    """
    if v_design == 0.0:
        raise ValueError("v_design must be nonzero")
    point = equilibrium(alpha_e, params)
    L1, L2, L3, M1 = params.L1, params.L2, params.L3, params.M1
    b3, b2 = point.beta3_e, point.beta2_e
    ta = math.tan(alpha_e)
    sec2 = 1.0 / math.cos(alpha_e) ** 2
    g2 = math.cos(b2) + (M1 / L1) * math.sin(b2) * ta
    dg2_db2 = -math.sin(b2) + (M1 / L1) * math.cos(b2) * ta
    dg2_da = (M1 / L1) * math.sin(b2) * sec2
    A = v_design * np.array([
        [-(math.cos(b3) / L3) * g2, g2 / L2 - (math.sin(b3) / L3) * dg2_db2],
        [0.0, -g2 / L2],
    ])
    B = v_design * np.array([
        -(M1 / (L1 * L2)) * math.cos(b2) * sec2 - (math.sin(b3) / L3) * dg2_da,
        sec2 / L1 + (M1 / (L1 * L2)) * math.cos(b2) * sec2,
    ])
    return LinearModel(A=A, B=B, equilibrium=point, v_design=v_design)


@dataclass(frozen=True)
class BodyPoses:
    """Derived poses of the towing bodies: (x, y, heading) tuples."""

    truck: tuple
    dolly: tuple
    hitch: tuple


def derive_body_poses(state, params):
    """Positions and headings of truck and dolly (plus the hitch point).

    The trailer body spans from its axle to the kingpin at the dolly axle
    along theta3; the dolly drawbar runs along theta2 to the hitch; the
    hitch sits M1 behind the truck rear axle along theta1.
    """
    x3, y3, theta3, beta3, beta2 = state.as_tuple()
    theta2 = theta3 + beta3
    theta1 = theta2 + beta2
    dx = x3 + params.L3 * math.cos(theta3)
    dy = y3 + params.L3 * math.sin(theta3)
    hx = dx + params.L2 * math.cos(theta2)
    hy = dy + params.L2 * math.sin(theta2)
    tx = hx + params.M1 * math.cos(theta1)
    ty = hy + params.M1 * math.sin(theta1)
    return BodyPoses(truck=(tx, ty, normalize_angle(theta1)),
                     dolly=(dx, dy, normalize_angle(theta2)),
                     hitch=(hx, hy))
