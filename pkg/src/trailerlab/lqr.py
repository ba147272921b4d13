"""LQ synthesis for the internal-angle subsystem and the steering gain schedule.

For each linearization point alpha_e the continuous algebraic Riccati
equation is solved for the 2x2 plant (A, B), giving a feedback gain
L(alpha_e) = R^-1 B^T P.  Gains over a symmetric alpha_e grid form a
schedule that the 100 Hz loop only interpolates.  A static pre-compensation
maps a desired trailer/dolly angle beta3_ref to its linearization point.
"""

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .model import VehicleParams, alpha_max, equilibrium, linearize


class RiccatiError(RuntimeError):
    """No stabilizing Riccati solution could be computed."""


@dataclass(frozen=True)
class LqWeights:
    """Quadratic weights: 2x2 state cost Q on beta - beta_e, scalar input cost R."""

    Q: np.ndarray
    R: float

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.shape != (2, 2):
            raise ValueError("weights.Q must be a 2x2 matrix")
        if not np.allclose(Q, Q.T, atol=1e-12, rtol=0.0):
            raise ValueError("weights.Q must be symmetric")
        if np.linalg.eigvalsh(Q).min() < -1e-12:
            raise ValueError("weights.Q must be positive semidefinite")
        if not self.R > 0.0:
            raise ValueError("weights.R must be strictly positive")
        object.__setattr__(self, "Q", Q)

    def to_json_obj(self):
        return {"Q": self.Q.tolist(), "R": self.R}

    @staticmethod
    def from_json_obj(obj):
        try:
            return LqWeights(Q=np.asarray(obj["Q"], dtype=float), R=float(obj["R"]))
        except KeyError as missing:
            raise ValueError(f"weights.{missing.args[0]} is required") from None


def default_weights():
    return LqWeights(Q=10.0 * np.eye(2), R=1.0)


def solve_lyapunov(A, C):
    """Solve A^T X + X A + C = 0 for the 2x2 case via the Kronecker form."""
    n = A.shape[0]
    eye = np.eye(n)
    M = np.kron(A.T, eye) + np.kron(eye, A.T)
    X = np.linalg.solve(M, -C.reshape(-1)).reshape(n, n)
    return 0.5 * (X + X.T)


def care_residual(P, A, B, Q, R):
    return A.T @ P + P @ A - np.outer(P @ B, B @ P) / R + Q


def solve_care(A, B, weights):
    """Stabilizing solution of A^T P + P A - P B R^-1 B^T P + Q = 0.

    Built from the stable invariant subspace of the 4x4 Hamiltonian, then
    polished with Kleinman-Newton iterations.  Returns a symmetric positive
    semidefinite P with scaled residual below 1e-9.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float).reshape(2)
    Q, R = weights.Q, weights.R
    H = np.zeros((4, 4))
    H[:2, :2] = A
    H[:2, 2:] = -np.outer(B, B) / R
    H[2:, :2] = -Q
    H[2:, 2:] = -A.T
    vals, vecs = np.linalg.eig(H)
    scale = max(1.0, np.abs(vals).max())
    if np.any(np.abs(vals.real) < 1e-12 * scale):
        raise RiccatiError("Hamiltonian has eigenvalues on the imaginary axis")
    stable = np.where(vals.real < 0.0)[0]
    if len(stable) != 2:
        raise RiccatiError("stable Hamiltonian subspace is not 2-dimensional")
    V = vecs[:, stable]
    X, Y = V[:2, :], V[2:, :]
    if abs(np.linalg.det(X)) < 1e-13:
        raise RiccatiError("stable subspace is degenerate (singular X block)")
    P = np.real(Y @ np.linalg.inv(X))
    P = 0.5 * (P + P.T)

    # Kleinman-Newton polish; each pass solves a Lyapunov equation for the
    # current closed loop and is quadratically convergent near the solution.
    for _ in range(5):
        L = (B @ P) / R
        Acl = A - np.outer(B, L)
        if np.linalg.eigvals(Acl).real.max() >= 0.0:
            break
        P_new = solve_lyapunov(Acl, Q + np.outer(L, L) * R)
        if not np.all(np.isfinite(P_new)):
            break
        P = P_new
        res = np.abs(care_residual(P, A, B, Q, R)).max()
        if res < 1e-12 * (1.0 + np.abs(P).max()):
            break

    res = np.abs(care_residual(P, A, B, Q, R)).max()
    if res >= 1e-9 * (1.0 + np.abs(P).max()):
        raise RiccatiError(f"Riccati residual too large: {res:g}")
    if np.linalg.eigvalsh(P).min() < -1e-9:
        raise RiccatiError("Riccati solution is not positive semidefinite")
    return P


def lq_gain(model, weights):
    """Optimal feedback gain L = R^-1 B^T P for one linear model."""
    P = solve_care(model.A, model.B, weights)
    return (model.B @ P) / weights.R


@dataclass
class GainSchedule:
    """Feedback gains over a symmetric alpha_e grid, plus their provenance.

    The stored gains are mirror-averaged so the schedule is exactly even,
    and lookups interpolate on |alpha_e|; together with the odd equilibrium
    map this makes the full control law an exactly odd function.
    """

    grid: np.ndarray
    gains: np.ndarray
    weights: LqWeights
    params: VehicleParams
    v_design: float
    alpha_e_cap: float = field(init=False)
    beta3_cap: float = field(init=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.gains = np.asarray(self.gains, dtype=float)
        self.alpha_e_cap = min(self.params.alpha_limit, float(self.grid[-1]))
        self.beta3_cap = equilibrium(self.alpha_e_cap, self.params).beta3_e

    def to_json_obj(self):
        return {"grid": self.grid.tolist(), "gains": self.gains.tolist(),
                "weights": self.weights.to_json_obj(),
                "params": self.params.to_json_obj(), "v_design": self.v_design}

    @staticmethod
    def from_json_obj(obj):
        return GainSchedule(grid=np.asarray(obj["grid"], dtype=float),
                            gains=np.asarray(obj["gains"], dtype=float),
                            weights=LqWeights.from_json_obj(obj["weights"]),
                            params=VehicleParams.from_json_obj(obj["params"]),
                            v_design=float(obj["v_design"]))

    def to_csv(self, fh):
        fh.write("alpha_e,l_beta3,l_beta2\n")
        for ae, (l3, l2) in zip(self.grid, self.gains):
            fh.write(f"{ae:.9g},{l3:.9g},{l2:.9g}\n")


def build_schedule(params, weights=None, grid_count=101, v_design=-1.0):
    """Solve the Riccati equation on a symmetric grid over +-0.95*alpha_max.

    Every point is solved independently; even symmetry of the raw gains is
    verified (to 1e-8) before the halves are mirror-averaged for storage.
    Closed-loop stability is checked at every point.
    """
    if grid_count < 3 or grid_count % 2 == 0:
        raise ValueError("grid_count must be odd and >= 3")
    if weights is None:
        weights = default_weights()
    top = 0.95 * alpha_max(params)
    half = np.linspace(0.0, top, (grid_count + 1) // 2)
    grid = np.concatenate([-half[:0:-1], half])
    gains = np.empty((grid_count, 2))
    for i, ae in enumerate(grid):
        model = linearize(ae, v_design, params)
        L = lq_gain(model, weights)
        cl = np.linalg.eigvals(model.A - np.outer(model.B, L))
        if cl.real.max() >= 0.0:
            raise RiccatiError(f"closed loop unstable at alpha_e = {ae:g}")
        gains[i] = L
    asym = np.abs(gains - gains[::-1]).max()
    if asym > 1e-8:
        raise RiccatiError(f"gain schedule not even in alpha_e (asymmetry {asym:g})")
    gains = 0.5 * (gains + gains[::-1])
    return GainSchedule(grid=grid, gains=gains, weights=weights, params=params,
                        v_design=v_design)


def lookup_gain(schedule, alpha_e):
    """Linear interpolation of the gain at |alpha_e|; exact at grid points."""
    a = abs(alpha_e)
    n = len(schedule.grid)
    mid = n // 2
    pos = schedule.grid[mid:]
    if a > pos[-1]:
        raise ValueError("alpha_e outside the schedule grid; saturate first")
    gains = schedule.gains[mid:]
    i = bisect.bisect_right(pos, a) - 1
    if i >= len(pos) - 1:
        return gains[-1].copy()
    if a == pos[i]:
        return gains[i].copy()
    t = (a - pos[i]) / (pos[i + 1] - pos[i])
    return gains[i] + t * (gains[i + 1] - gains[i])


def precompensate(beta3_e, params):
    """Steering linearization point whose equilibrium has the given beta3.

    Exactly odd in beta3_e and exactly inverse to the equilibrium map; the
    |beta3_e| -> pi/2 limit reaches alpha_max.
    """
    if not abs(beta3_e) < math.pi / 2.0:
        raise ValueError("beta3_e must satisfy |beta3_e| < pi/2")
    if beta3_e == 0.0:
        return 0.0
    L1, L2, L3, M1 = params.L1, params.L2, params.L3, params.M1
    t = math.tan(abs(beta3_e))
    mag = math.atan(L1 / math.sqrt(L3 * L3 * (1.0 + 1.0 / (t * t)) + L2 * L2 - M1 * M1))
    return math.copysign(mag, beta3_e)


@dataclass(frozen=True)
class StabilizerCommand:
    """Steering command with saturation metadata."""

    alpha: float
    alpha_raw: float
    alpha_e: float
    saturated: bool


def stabilizing_control(beta3, beta2, beta3_ref, schedule):
    """Gain-scheduled state feedback around the pre-compensated equilibrium.

    beta3_ref is clamped so its linearization point stays inside both the
    schedule grid and the mechanical steering range; the returned alpha is
    saturated to +-alpha_limit with the raw value reported alongside.
    """
    params = schedule.params
    cap = schedule.alpha_e_cap
    b3cap = schedule.beta3_cap
    r = min(b3cap, max(-b3cap, beta3_ref))
    ae = precompensate(r, params)
    ae = min(cap, max(-cap, ae))
    point = equilibrium(ae, params)
    L = lookup_gain(schedule, ae)
    raw = ae - L[0] * (beta3 - point.beta3_e) - L[1] * (beta2 - point.beta2_e)
    limit = params.alpha_limit
    saturated = abs(raw) > limit
    alpha = min(limit, max(-limit, raw))
    return StabilizerCommand(alpha=alpha, alpha_raw=raw, alpha_e=ae,
                             saturated=saturated)
