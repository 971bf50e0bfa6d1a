"""Command-line front end: polar, rr, map, and sim workflows.

Parameters resolve in three layers (defaults, then a JSON config file, then
explicit flags), all angles are in degrees at this boundary, and every output
file is written atomically (temp file then rename).  Exit codes: 0 success,
2 parameter error, 3 I/O error, 4 numerical failure.
"""

import argparse
import io
import json
import math
import os
import sys

from . import __version__
from .errors import DomainError, NumericalError
from .gas import GasConstants, make_state
from .polar import build_polar, polar_to_csv
from .reflection import ReflectionConfig, local_rr, rr_to_dict
from .sim import (
    SimConfig,
    field_to_csv,
    incident_travel_cells,
    run,
    setup_initial,
)
from .transition_map import export_csv, sweep

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

DEFAULTS = {
    "polar": {
        "gamma": 1.4, "mach": 3.0, "rho": 1.0, "c": 1.0, "samples": 512,
        "out": "polar.csv", "summary": None,
    },
    "rr": {
        "gamma": 1.4, "m1": 3.0, "alpha_deg": 0.0, "theta_deg": 142.9,
        "samples": 512, "out": None,
    },
    "map": {
        "gamma": 1.4, "alpha_deg": 0.0, "m1_min": 1.2, "m1_max": 6.0,
        "theta_min_deg": 100.0, "theta_max_deg": 175.0, "resolution": 128,
        "samples": 128, "out": ".",
    },
    "sim": {
        "gamma": 1.4, "m1": 3.0, "alpha_deg": 0.0, "theta_deg": 147.9,
        "n_a": 400, "n_b": 400, "extent_a": 1.25, "extent_b": 0.85,
        "cfl": 0.45, "t0": 0.2, "t_end": 1.0, "second_order": True,
        "k_stem": 4, "stride": 1, "out": ".", "dry_run": False,
    },
}


def _atomic_write(path, data):
    """Write text so an interrupted run never leaves a partial file."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _resolve(command, args):
    """Layer defaults, config-file values, and explicit flags."""
    cfg = dict(DEFAULTS[command])
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS[command]:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def cmd_polar(cfg):
    if cfg["mach"] <= 1.0:
        raise DomainError("upstream must be supersonic")
    k = GasConstants(gamma=cfg["gamma"])
    upstream = make_state(cfg["rho"], cfg["c"],
                          (cfg["mach"] * cfg["c"], 0.0))
    polar = build_polar(upstream, k, n_samples=cfg["samples"])
    buf = io.StringIO()
    polar_to_csv(polar, buf)
    _atomic_write(cfg["out"], buf.getvalue())
    summary = {
        "gamma": cfg["gamma"],
        "mach": cfg["mach"],
        "tau_star_deg": math.degrees(polar.tau_star),
        "tau_sonic_deg": math.degrees(polar.tau_sonic),
        "beta_max_deg": math.degrees(polar.beta_max),
    }
    summary_path = cfg["summary"]
    if summary_path is None:
        root, _ = os.path.splitext(cfg["out"])
        summary_path = root + ".summary.json"
    blob = json.dumps(summary, indent=2) + "\n"
    _atomic_write(summary_path, blob)
    sys.stdout.write(blob)
    return EXIT_OK


def cmd_rr(cfg):
    rc = ReflectionConfig(m1=cfg["m1"], alpha=math.radians(cfg["alpha_deg"]),
                          theta=math.radians(cfg["theta_deg"]),
                          k=GasConstants(gamma=cfg["gamma"]))
    rr = local_rr(rc, n_samples=cfg["samples"])
    blob = json.dumps(rr_to_dict(rr), indent=2) + "\n"
    if cfg["out"] is not None:
        _atomic_write(cfg["out"], blob)
    else:
        sys.stdout.write(blob)
    return EXIT_OK


def cmd_map(cfg):
    out = cfg["out"]
    if not os.path.isdir(out):
        raise OSError(f"output directory does not exist: {out}")
    tmap = sweep(gamma=cfg["gamma"], alpha=math.radians(cfg["alpha_deg"]),
                 m1_range=(cfg["m1_min"], cfg["m1_max"]),
                 theta_range=(math.radians(cfg["theta_min_deg"]),
                              math.radians(cfg["theta_max_deg"])),
                 resolution=cfg["resolution"], n_samples=cfg["samples"])
    cells, curves = export_csv(tmap, out)
    sys.stdout.write(f"{cells}\n{curves}\n")
    return EXIT_OK


def cmd_sim(cfg):
    rc = ReflectionConfig(m1=cfg["m1"], alpha=math.radians(cfg["alpha_deg"]),
                          theta=math.radians(cfg["theta_deg"]),
                          k=GasConstants(gamma=cfg["gamma"]))
    sc = SimConfig(reflection=rc, n_a=cfg["n_a"], n_b=cfg["n_b"],
                   extent_a=cfg["extent_a"], extent_b=cfg["extent_b"],
                   cfl=cfg["cfl"], t0=cfg["t0"], t_end=cfg["t_end"],
                   second_order=cfg["second_order"], k_stem=cfg["k_stem"])
    setup_initial(sc)    # validates the initial shock placement
    if cfg["dry_run"]:
        sys.stdout.write(
            f"config ok: {sc.n_a}x{sc.n_b} cells, "
            f"incident travel {incident_travel_cells(sc):.1f} cells\n")
        return EXIT_OK
    os.makedirs(cfg["out"], exist_ok=True)
    final, pattern = run(sc)
    buf = io.StringIO()
    field_to_csv(final, sc, buf, stride=cfg["stride"])
    _atomic_write(os.path.join(cfg["out"], "field.csv"), buf.getvalue())
    _atomic_write(os.path.join(cfg["out"], "pattern.json"),
                  pattern.to_json() + "\n")
    sys.stdout.write(f"{pattern.classification}\n")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", help="JSON config file (defaults < file < flags)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shockrefl",
        description="Shock polars, regular-reflection analysis, transition "
                    "maps, and wedge-reflection simulations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polar", help="sample a shock polar")
    _add_common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--mach", type=float, help="upstream Mach number")
    p.add_argument("--rho", type=float, help="upstream density")
    p.add_argument("--c", type=float, help="upstream sound speed")
    p.add_argument("--samples", type=int)
    p.add_argument("--out", help="curve CSV path")
    p.add_argument("--summary", help="summary JSON path")

    p = sub.add_parser("rr", help="local regular-reflection report")
    _add_common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--m1", type=float, help="incident-shock Mach number")
    p.add_argument("--alpha-deg", type=float, dest="alpha_deg")
    p.add_argument("--theta-deg", type=float, dest="theta_deg")
    p.add_argument("--samples", type=int)
    p.add_argument("--out", help="report JSON path (default: stdout)")

    p = sub.add_parser("map", help="(M1, theta) transition-map sweep")
    _add_common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha-deg", type=float, dest="alpha_deg")
    p.add_argument("--m1-min", type=float, dest="m1_min")
    p.add_argument("--m1-max", type=float, dest="m1_max")
    p.add_argument("--theta-min-deg", type=float, dest="theta_min_deg")
    p.add_argument("--theta-max-deg", type=float, dest="theta_max_deg")
    p.add_argument("--resolution", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--out", help="existing output directory")

    p = sub.add_parser("sim", help="wedge-reflection simulation")
    _add_common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--m1", type=float)
    p.add_argument("--alpha-deg", type=float, dest="alpha_deg")
    p.add_argument("--theta-deg", type=float, dest="theta_deg")
    p.add_argument("--n-a", type=int, dest="n_a")
    p.add_argument("--n-b", type=int, dest="n_b")
    p.add_argument("--extent-a", type=float, dest="extent_a")
    p.add_argument("--extent-b", type=float, dest="extent_b")
    p.add_argument("--cfl", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--first-order", action="store_const", const=False,
                   default=None, dest="second_order")
    p.add_argument("--k-stem", type=int, dest="k_stem")
    p.add_argument("--stride", type=int, help="CSV dump stride")
    p.add_argument("--out", help="output directory")
    p.add_argument("--dry-run", action="store_const", const=True,
                   default=None, dest="dry_run")
    return parser


COMMANDS = {"polar": cmd_polar, "rr": cmd_rr, "map": cmd_map, "sim": cmd_sim}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:    # argparse exits on --help/--version/bad flags
        return int(e.code or 0)
    try:
        cfg = _resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except ValueError as e:    # DomainError and malformed JSON included
        print(f"shockrefl {args.command}: {e}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as e:
        print(f"shockrefl {args.command}: {e}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as e:
        print(f"shockrefl {args.command}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
