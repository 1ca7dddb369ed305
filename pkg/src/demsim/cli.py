"""Command-line scenario runner.

Exit codes: 0 ok, 1 validation error, 2 numerical check failed, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import write_trajectory_csv
from .exceptions import DemError, EigenConvergenceError, OracleStepError, QuadratureError
from .runner import converge, kernel, simulate, verify
from .scenario import SWEEP_AXES, ScenarioError, load_scenario
from .spectral import write_kernel_csv

log = logging.getLogger("demsim")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError("values must be a non-empty list of finite numbers")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _write_bath_occupations(path: Path, traj) -> None:
    nb = traj.bath_occupations.shape[1]
    with open(path, "w") as fh:
        fh.write(",".join(["t"] + [f"b_{k}" for k in range(nb)]) + "\n")
        for t, row in zip(traj.times, traj.bath_occupations):
            fh.write(",".join(f"{x:.15e}" for x in (t, *row)) + "\n")


def _run_one(scenario, out: Path, stem: str) -> dict:
    res = simulate(scenario)
    csv_path = out / f"{stem}.csv"
    write_trajectory_csv(csv_path, res.trajectory)
    files = [csv_path.name]
    if scenario.outputs.bath_occupations:
        bpath = out / f"{stem}_bath.csv"
        _write_bath_occupations(bpath, res.trajectory)
        files.append(bpath.name)
    if scenario.outputs.kernel:
        kpath = out / f"{stem}_kernel.csv"
        write_kernel_csv(kpath, kernel(scenario))
        files.append(kpath.name)
    manifest = res.manifest()
    manifest["files"] = files
    manifest["version"] = __version__
    _write_json(out / f"{stem}.manifest.json", manifest)
    for w in res.warnings:
        log.warning(w)
    return manifest


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    m = _run_one(sc, args.out, Path(args.scenario).stem)
    log.info("wrote %s (tau_max=%.4g, conservation residual %.2e)", ", ".join(m["files"]), m["tau_max"],
             m["conservation_residual"])
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = load_scenario(args.scenario)
    stem = Path(args.scenario).stem
    values = sorted(args.values)
    points = [(v, sc.with_axis(args.axis, v)) for v in values]
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        manifests = list(pool.map(lambda p: _run_one(p[1], args.out, f"{stem}_{args.axis}={p[0]:g}"), points))
    summary = {
        "axis": args.axis,
        "values": values,
        "runs": [{"value": v, "files": m["files"], "tau_max": m["tau_max"], "counterterm": m["counterterm"],
                  "conservation_residual": m["conservation_residual"]} for v, m in zip(values, manifests)],
    }
    _write_json(args.out / f"{stem}_sweep_{args.axis}.json", summary)
    log.info("sweep over %s: %d points", args.axis, len(values))
    return EXIT_OK


def cmd_converge(args) -> int:
    sc = load_scenario(args.scenario)
    grid = args.nmax_list if args.nmax_list is not None else args.wmax_list
    if len(grid) < 2:
        log.error("convergence needs at least two grid settings, got %d", len(grid))
        return EXIT_VALIDATION
    report = converge(sc, n_max_list=args.nmax_list, omega_max_list=args.wmax_list)
    path = args.out / f"{Path(args.scenario).stem}_converge_{report['axis']}.json"
    _write_json(path, report)
    for d in report["diffs"]:
        log.info("%s %g -> %g: max |dn| = %.3e", report["axis"], d["from"], d["to"], d["max_abs_diff"])
    return EXIT_OK


def cmd_verify(args) -> int:
    sc = load_scenario(args.scenario)
    report = verify(sc, eigen_method=args.eigen_method, eigen_tol=args.eigen_tol, ode_step=args.ode_step)
    _write_json(args.out / f"{Path(args.scenario).stem}_verify.json", report)
    for name, c in report["checks"].items():
        log.info("%-15s %-4s value=%s threshold=%g", name, "ok" if c["passed"] else "FAIL", c["value"], c["threshold"])
    if report["oracle_status"] != "ok":
        log.error("oracle: %s", report["oracle_status"])
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def cmd_kernel(args) -> int:
    sc = load_scenario(args.scenario)
    path = args.out / f"{Path(args.scenario).stem}_kernel.csv"
    write_kernel_csv(path, kernel(sc, n_points=args.n_points))
    log.info("wrote %s", path.name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    common.add_argument("--quiet", action="store_true", help="only report errors")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")

    parser = _Parser(prog="demsim", description="Discretized-environment open quantum system simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", parents=[common], help="simulate a scenario")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="run a family of scenarios along one axis")
    p.add_argument("scenario")
    p.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
    p.add_argument("--values", required=True, type=_float_list)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", parents=[common], help="compare results across bath grids")
    p.add_argument("scenario")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--nmax-list", type=_int_list)
    g.add_argument("--wmax-list", type=_float_list)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify", parents=[common], help="run the exactness checks")
    p.add_argument("scenario")
    p.add_argument("--eigen-method", default="lapack", choices=["lapack", "householder_ql"])
    p.add_argument("--eigen-tol", type=float, default=None)
    p.add_argument("--ode-step", type=float, default=1e-3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kernel", parents=[common], help="discrete vs continuum memory kernel")
    p.add_argument("scenario")
    p.add_argument("--n-points", type=int, default=501)
    p.set_defaults(func=cmd_kernel)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(levelname)s: %(message)s")
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (EigenConvergenceError, OracleStepError, QuadratureError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (ScenarioError, DemError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
