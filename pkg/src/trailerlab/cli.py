"""Command line front end: simulate, schedule, roa, and serve.

Exit codes: 0 on success (simulate requires goal_reached), 3 jackknifed,
4 timed out, 5 configuration or I/O error.  Argparse itself exits 2 on
usage errors.  Set TRAILER_LAB_LOG to control log verbosity.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .lqr import RiccatiError, build_schedule
from .roa import RoaGrid, region_of_attraction
from .scenarios import NAMED_SCENARIOS, scenario_from_json_obj
from .sim import GOAL_REACHED, JACKKNIFED, TIMED_OUT, simulate

EXIT_OK = 0
EXIT_JACKKNIFED = 3
EXIT_TIMED_OUT = 4
EXIT_CONFIG = 5

STATUS_EXIT_CODES = {GOAL_REACHED: EXIT_OK, JACKKNIFED: EXIT_JACKKNIFED,
                     TIMED_OUT: EXIT_TIMED_OUT}

log = logging.getLogger("trailerlab")


@dataclass
class RunManifest:
    """A validated scenario plus the artifact paths a run will write."""

    scenario: object
    out_dir: Path
    artifacts: dict = field(default_factory=dict)

    def path(self, name):
        return self.out_dir / self.artifacts[name]


def load_scenario(spec):
    """Resolve a --scenario argument: a built-in name or a JSON file."""
    if spec in NAMED_SCENARIOS:
        return NAMED_SCENARIOS[spec]()
    path = Path(spec)
    if not path.is_file():
        names = ", ".join(sorted(NAMED_SCENARIOS))
        raise ValueError(
            f"scenario '{spec}' is neither a file nor one of: {names}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"scenario file {spec} is not valid JSON: {exc}")
    return scenario_from_json_obj(obj)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    manifest = RunManifest(scenario=scenario, out_dir=Path(args.out),
                           artifacts={"trace_csv": "trace.csv",
                                      "trace_json": "trace.json",
                                      "report_json": "report.json"})
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    schedule = build_schedule(scenario.params, weights=scenario.weights)
    log.info("simulating (%d legs, max %.1f s)", len(scenario.path.legs),
             scenario.max_sim_time)
    trace, report = simulate(scenario, schedule=schedule)
    with open(manifest.path("trace_csv"), "w", encoding="utf-8") as fh:
        trace.to_csv(fh)
    _write_json(manifest.path("trace_json"), trace.to_json_obj())
    _write_json(manifest.path("report_json"), report.to_json_obj())
    log.info("status %s after %.1f s, wrote %s", trace.status,
             trace.rows[-1][0], manifest.out_dir)
    print(f"{trace.status}: {len(trace)} rows, "
          f"mean error {report.mean_error * 100.0:.2f} cm, "
          f"max {report.max_error * 100.0:.2f} cm")
    return STATUS_EXIT_CODES[trace.status]


def cmd_schedule(args):
    if args.scenario is not None:
        scenario = load_scenario(args.scenario)
        params, weights = scenario.params, scenario.weights
    else:
        from .scenarios import default_params
        from .lqr import default_weights
        params, weights = default_params(), default_weights()
    schedule = build_schedule(params, weights=weights,
                              grid_count=args.grid or 101)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "schedule.json", schedule.to_json_obj())
    with open(out / "schedule.csv", "w", encoding="utf-8") as fh:
        schedule.to_csv(fh)
    print(f"schedule: {schedule.grid.size} points over "
          f"[{schedule.grid[0]:.6f}, {schedule.grid[-1]:.6f}] rad")
    return EXIT_OK


def cmd_roa(args):
    if args.scenario is not None:
        scenario = load_scenario(args.scenario)
        params, weights = scenario.params, scenario.weights
    else:
        from .scenarios import default_params
        from .lqr import default_weights
        params, weights = default_params(), default_weights()
    grid = RoaGrid(count=args.grid or 61)
    roa_map = region_of_attraction(params=params, weights=weights, grid=grid,
                                   processes=max(1, args.parallel))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "roa.csv", "w", encoding="utf-8") as fh:
        roa_map.to_csv(fh)
    _write_json(out / "roa_meta.json", roa_map.metadata_json_obj())
    print(f"roa: {roa_map.converged.size} cells, "
          f"{roa_map.converged_fraction():.4f} converged")
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"bind address '{args.bind}' is not host:port")
    app = create_app(static_dir=args.static)
    uvicorn.run(app, host=host, port=int(port))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trailer-lab",
        description="Reversing workbench for a truck-dolly-trailer vehicle")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a closed-loop scenario")
    p.add_argument("--scenario", required=True,
                   help="scenario JSON file or one of: "
                        + ", ".join(sorted(NAMED_SCENARIOS)))
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("schedule", help="write the LQ gain schedule")
    p.add_argument("--scenario", help="scenario JSON supplying params/weights")
    p.add_argument("--grid", type=int, help="number of grid points (odd)")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("roa", help="map the region of attraction")
    p.add_argument("--scenario", help="scenario JSON supplying params/weights")
    p.add_argument("--grid", type=int, help="cells per axis (odd)")
    p.add_argument("--parallel", type=int, default=1,
                   help="worker processes (1 = sequential)")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_roa)

    p = sub.add_parser("serve", help="run the HTTP/WebSocket service")
    p.add_argument("--bind", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--static", help="directory of GUI assets to serve")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    level = os.environ.get("TRAILER_LAB_LOG", "WARNING").upper()
    logging.basicConfig(level=level if level in
                        ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
                        else "WARNING")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RiccatiError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
