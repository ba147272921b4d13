"""Region-of-attraction mapping for the gain-scheduled reverse stabilizer.

Each cell of a square grid of initial internal angles (beta3, beta2) seeds
the straight-line reverse scenario; the cell converges when the trailer
holds |y3| < 2 cm and both internal angles within 3 degrees for 2 s inside
a 60 s budget.  Cells are independent, so the map can run on a process
pool; sequential and parallel runs produce identical maps.
"""

import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .model import VehicleParams
from .lqr import LqWeights, build_schedule
from .scenarios import default_params, roa_cell_scenario
from .lqr import default_weights
from .sim import simulate_stream

Y3_TOLERANCE = 0.02
ANGLE_TOLERANCE = math.radians(3.0)
HOLD_TIME = 2.0
CELL_TIME_BUDGET = 60.0
CELL_INTEGRATOR_DT = 0.01


@dataclass(frozen=True)
class RoaGrid:
    """Symmetric square grid over initial (beta3, beta2), both in radians."""

    count: int = 61
    limit: float = 1.5

    def __post_init__(self):
        if self.count < 3 or self.count % 2 == 0:
            raise ValueError("grid.count must be an odd integer >= 3")
        if not self.limit > 0.0:
            raise ValueError("grid.limit must be strictly positive")

    def values(self):
        # concatenating the negated positive half keeps the grid exactly
        # odd-symmetric in floating point, so mirror cells see bitwise
        # mirrored initial conditions
        half = np.linspace(0.0, self.limit, (self.count + 1) // 2)
        return np.concatenate([-half[:0:-1], half])


@dataclass
class RoaMap:
    beta3_values: np.ndarray
    beta2_values: np.ndarray
    converged: np.ndarray
    params: VehicleParams
    criterion: dict = field(default_factory=dict)

    def converged_fraction(self):
        return float(np.count_nonzero(self.converged)) / self.converged.size

    def cell(self, beta3, beta2):
        i = int(np.argmin(np.abs(self.beta3_values - beta3)))
        j = int(np.argmin(np.abs(self.beta2_values - beta2)))
        return bool(self.converged[i, j])

    def to_csv(self, fh):
        fh.write("beta3,beta2,converged\n")
        for i, b3 in enumerate(self.beta3_values):
            for j, b2 in enumerate(self.beta2_values):
                fh.write("%.9g,%.9g,%d\n" % (b3, b2, int(self.converged[i, j])))

    def metadata_json_obj(self):
        return {
            "grid": {"count": int(self.beta3_values.size),
                     "beta3_min": float(self.beta3_values[0]),
                     "beta3_max": float(self.beta3_values[-1]),
                     "beta2_min": float(self.beta2_values[0]),
                     "beta2_max": float(self.beta2_values[-1])},
            "criterion": dict(self.criterion),
            "params": self.params.to_json_obj(),
            "cell_count": int(self.converged.size),
            "converged_count": int(np.count_nonzero(self.converged)),
            "converged_fraction": self.converged_fraction(),
        }


def cell_converges(beta3, beta2, params, schedule):
    """Run one cell to the first sustained-convergence window or failure."""
    scenario = roa_cell_scenario(beta3, beta2, params=params)
    hold_rows = int(round(HOLD_TIME * scenario.rates.stabilizer_hz))
    streak = 0
    for row, status in simulate_stream(scenario, schedule=schedule):
        if (abs(row[2]) < Y3_TOLERANCE and abs(row[4]) < ANGLE_TOLERANCE
                and abs(row[5]) < ANGLE_TOLERANCE):
            streak += 1
            if streak >= hold_rows:
                return True
        else:
            streak = 0
        if status is not None:
            return False
    return False


_POOL_CONTEXT = {}


def _pool_init(params, weights):
    _POOL_CONTEXT["params"] = params
    _POOL_CONTEXT["schedule"] = build_schedule(params, weights=weights)


def _pool_cell(cell):
    beta3, beta2 = cell
    return cell_converges(beta3, beta2, _POOL_CONTEXT["params"],
                          _POOL_CONTEXT["schedule"])


def region_of_attraction(params=None, weights=None, grid=None, processes=1):
    """Map convergence over the (beta3, beta2) grid; returns an RoaMap."""
    if params is None:
        params = default_params()
    if weights is None:
        weights = default_weights()
    if grid is None:
        grid = RoaGrid()
    if processes < 1:
        raise ValueError("processes must be >= 1")
    values = grid.values()
    cells = [(float(b3), float(b2)) for b3 in values for b2 in values]
    if processes > 1:
        chunk = max(1, len(cells) // (processes * 8))
        with multiprocessing.Pool(processes, initializer=_pool_init,
                                  initargs=(params, weights)) as pool:
            flags = pool.map(_pool_cell, cells, chunksize=chunk)
    else:
        _pool_init(params, weights)
        flags = [_pool_cell(cell) for cell in cells]
    n = values.size
    converged = np.asarray(flags, dtype=bool).reshape(n, n)
    criterion = {
        "y3_tolerance_m": Y3_TOLERANCE,
        "angle_tolerance_rad": ANGLE_TOLERANCE,
        "hold_time_s": HOLD_TIME,
        "time_budget_s": CELL_TIME_BUDGET,
        "integrator_dt_s": CELL_INTEGRATOR_DT,
    }
    return RoaMap(beta3_values=values.copy(), beta2_values=values.copy(),
                  converged=converged, params=params, criterion=criterion)
