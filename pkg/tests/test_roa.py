import io
import json
import math

import numpy as np
import pytest

import trailerlab as tl


def test_grid_validation():
    with pytest.raises(ValueError, match="count"):
        tl.RoaGrid(count=4)
    with pytest.raises(ValueError, match="limit"):
        tl.RoaGrid(count=5, limit=0.0)


def test_grid_values_symmetric():
    values = tl.RoaGrid(count=61, limit=1.5).values()
    assert values.size == 61
    assert values[0] == -1.5 and values[-1] == 1.5 and values[30] == 0.0
    # bitwise odd symmetry so mirrored cells see exactly mirrored starts
    assert np.array_equal(values, -values[::-1])


def test_cell_convergence(params, schedule):
    assert tl.roa.cell_converges(0.0, 0.0, params, schedule)
    assert not tl.roa.cell_converges(0.0, 1.45, params, schedule)


def test_small_map_and_parallel_equivalence(params):
    grid = tl.RoaGrid(count=5, limit=1.0)
    seq = tl.region_of_attraction(params=params, grid=grid, processes=1)
    par = tl.region_of_attraction(params=params, grid=grid, processes=2)
    assert np.array_equal(seq.converged, par.converged)
    assert seq.cell(0.0, 0.0)
    assert np.array_equal(seq.converged, seq.converged[::-1, ::-1])


def test_map_artifacts(params, schedule):
    grid = tl.RoaGrid(count=3, limit=1.5)
    roa_map = tl.region_of_attraction(params=params, grid=grid, processes=1)
    fh = io.StringIO()
    roa_map.to_csv(fh)
    lines = fh.getvalue().strip().split("\n")
    assert lines[0] == "beta3,beta2,converged"
    assert len(lines) == 10
    center = lines[1 + 4]
    assert center == "0,0,1"
    meta = roa_map.metadata_json_obj()
    json.dumps(meta)
    assert meta["cell_count"] == 9
    assert meta["converged_count"] == 1
    assert meta["converged_fraction"] == pytest.approx(1.0 / 9.0)
    assert meta["criterion"]["hold_time_s"] == 2.0
    assert meta["criterion"]["y3_tolerance_m"] == 0.02
    assert meta["criterion"]["angle_tolerance_rad"] == math.radians(3.0)
    assert meta["grid"]["count"] == 3
    # reproducible metadata: no wall-clock or host fields
    assert not any("time" in k and "sim" not in k for k in meta)
    assert meta["params"]["L1"] == params.L1


def test_processes_validation(params):
    with pytest.raises(ValueError, match="processes"):
        tl.region_of_attraction(params=params, grid=tl.RoaGrid(count=3),
                                processes=0)
