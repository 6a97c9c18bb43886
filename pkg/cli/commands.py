"""
Tetrad Command Line
argparse surface: solve, sweep, limit, orbit, classify and verify.
Exit status is 0 on success, 1 on a domain failure and 2 on a usage error.
"""
import argparse
import json
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Any, List, Optional, Sequence

import numpy as np

from cli.records import (
    DISTANCE_RTOL,
    RecordError,
    config_record,
    distance_mismatch,
    dump_record,
    limit_record,
    load_record,
)
from cli.sweep import AREA_NAMES, SweepSpec, continuity_violations, linear_grid, log_grid, run_sweep, sweep_summary, write_table
from core.config import get_settings
from core.geometry import embed
from core.metrics import get_metrics_logger
from core.model import DistanceSet, GeometryError, SignedAreas, TetradError, validate_areas
from core.orbits import HomographicOrbit, OrbitParams, both_arrangements, orbit_frame
from optimization import limits
from optimization.solver import RootResidual, SolverOptions, solve, verify_points

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Malformed command-line values (exit status 2)."""


# =============================================================================
# OUTPUT HELPERS
# =============================================================================

def status(message: str):
    """Human status line on stderr; stdout carries data only."""
    print(message, file=sys.stderr)


def emit_error(code: str, message: str):
    """Machine-readable error object on stdout."""
    sys.stdout.write(json.dumps({"error": code, "message": message}) + "\n")


def fmt(value: float) -> str:
    return "%.17g" % value


@contextmanager
def output_stream(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            yield f


def parse_floats(text: str, count: Optional[int] = None, name: str = "value") -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"Cannot parse {name} {text!r} as comma-separated reals")
    if count is not None and len(values) != count:
        raise UsageError(f"{name} needs {count} values, got {len(values)}")
    return values


def solver_options(args) -> SolverOptions:
    overrides = {}
    if getattr(args, "residual", "auto") != "auto":
        overrides["residual_for_root"] = RootResidual(args.residual)
    if getattr(args, "grid_cells", None):
        overrides["grid_cells"] = args.grid_cells
    try:
        return SolverOptions.from_settings(**overrides)
    except ValueError as e:
        raise UsageError(str(e))


def _metrics():
    settings = get_settings()
    return get_metrics_logger(settings.log_dir) if settings.metrics_enabled else None


# =============================================================================
# SOLVE / CLASSIFY
# =============================================================================

def print_config_table(record, stream=None):
    stream = stream or sys.stdout
    out = record.outputs
    lines = [
        "=" * 60,
        f"Areas:          {', '.join(fmt(v) for v in record.inputs.areas)}",
        f"Hull:           {out.classification['hull']}",
        f"Symmetries:     {', '.join(out.classification['symmetries'])}",
        f"lambda:         {fmt(out.lam)}",
        "-" * 60,
    ]
    lines += [f"{name:<16}{fmt(value)}" for name, value in out.distances.items()]
    lines += [f"m{j:<15}{fmt(m)}" for j, m in enumerate(out.masses, start=1)]
    lines += [f"S{j:<15}{fmt(s)}" for j, s in enumerate(out.signed_areas, start=1)]
    lines += [f"q{j:<15}{fmt(x)}, {fmt(y)}" for j, (x, y) in enumerate(out.coordinates, start=1)]
    lines.append("-" * 60)
    lines += [f"{name:<16}{value:.3e}" for name, value in out.residuals.items()]
    if out.alternate_roots:
        lines.append(f"Other roots:    {', '.join(fmt(v) for v in out.alternate_roots)}")
    lines.append("=" * 60)
    stream.write("\n".join(lines) + "\n")


def cmd_solve(args) -> int:
    areas = parse_floats(args.areas, 4, "--areas")
    opts = solver_options(args)
    config = solve(areas, opts)
    record = config_record(config, opts, areas)

    if args.out:
        Path(args.out).write_text(dump_record(record) + "\n", encoding="utf-8")
        status(f"✅ Record written to {args.out}")
    if args.json:
        sys.stdout.write(dump_record(record) + "\n")
    elif not args.out:
        print_config_table(record)

    status(f"✅ {config.classification.hull.value} configuration, "
           f"worst residual {config.diagnostics.worst():.2e}")
    return EXIT_OK


def cmd_classify(args) -> int:
    areas = parse_floats(args.areas, 4, "--areas")
    classification = validate_areas(areas)
    if args.json:
        sys.stdout.write(json.dumps({"areas": areas, **classification.to_dict()}) + "\n")
    else:
        sys.stdout.write(f"Hull:       {classification.hull.value}\n")
        sys.stdout.write(f"Symmetries: {', '.join(classification.to_dict()['symmetries'])}\n")
    return EXIT_OK


# =============================================================================
# SWEEP
# =============================================================================

def cmd_sweep(args) -> int:
    fixed_values = parse_floats(args.fixed, 3, "--fixed")
    others = [name for name in AREA_NAMES if name != args.vary]
    try:
        if args.log:
            values = log_grid(args.start, args.stop, args.num)
        else:
            if args.step is None:
                raise UsageError("Linear sweeps need --step (or use --log --num)")
            values = linear_grid(args.start, args.stop, args.step)
        spec = SweepSpec(fixed=dict(zip(others, fixed_values)), vary=args.vary, values=list(values))
    except ValueError as e:
        raise UsageError(str(e))

    opts = solver_options(args)
    started = time.time()
    frame = run_sweep(spec, opts, workers=args.workers, progress=not args.quiet)

    summary = sweep_summary(frame, started)
    jumps = continuity_violations(frame)
    metadata = {**spec.metadata(), "grid": "log" if args.log else "linear", "residual": args.residual}
    with output_stream(args.out) as stream:
        write_table(frame, stream, metadata)

    metrics = _metrics()
    if metrics:
        metrics.log_sweep(args.vary, summary["points"], summary["ok"], summary["latency_ms"])

    status(f"📊 {summary['ok']}/{summary['points']} grid points solved ({summary['status_counts']})")
    if jumps:
        status(f"⚠️ lambda jumps at rows {jumps}")
    return EXIT_OK


# =============================================================================
# LIMIT
# =============================================================================

LIMIT_KINDS = (
    "euler-convex", "lagrange-concave", "lagrange-convex", "coorbital", "maxwell",
    "general-lagrange", "general-euler", "general-coorbital",
)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"limit {args.kind} needs {', '.join(missing)}")


def run_limit(args) -> List:
    """(solution, parameters) pairs for the requested limit kind."""
    kind = args.kind
    if kind in ("euler-convex", "lagrange-concave"):
        _need(args, "a1", "a4")
        fn = limits.euler_convex_limit if kind == "euler-convex" else limits.lagrange_concave_limit
        return [(fn(args.a1, args.a4), {"a1": args.a1, "a4": args.a4})]
    if kind in ("lagrange-convex", "coorbital"):
        _need(args, "a1", "a2")
        fn = limits.lagrange_convex_limit if kind == "lagrange-convex" else limits.coorbital_limit
        return [(fn(args.a1, args.a2), {"a1": args.a1, "a2": args.a2})]
    if kind == "maxwell":
        roots = [args.root] if args.root else [1, 2]
        return [(limits.maxwell_1p3_solution(k), {"root": k}) for k in roots]
    if kind == "general-lagrange":
        _need(args, "values", "which")
        retained = parse_floats(args.values, 3, "--values")
        return [(limits.general_lagrange_limit(retained, args.which, args.sign),
                 {"retained": retained, "which": args.which, "sign": args.sign})]
    if kind == "general-euler":
        _need(args, "values")
        trio = parse_floats(args.values, 3, "--values")
        labels = [int(v) for v in parse_floats(args.labels, 3, "--labels")]
        return [(limits.general_euler_limit(trio, labels), {"trio": trio, "labels": labels})]
    _need(args, "values")
    satellites = parse_floats(args.values, 3, "--values")
    return [(limits.general_coorbital_limit(satellites), {"satellites": satellites})]


def cmd_limit(args) -> int:
    started = time.time()
    results = run_limit(args)
    records = [limit_record(solution, params) for solution, params in results]

    if args.json or args.out:
        payload = [r.model_dump(by_alias=True, mode="json") for r in records]
        text = json.dumps(payload[0] if len(payload) == 1 else payload, indent=2)
        with output_stream(args.out) as stream:
            stream.write(text + "\n")
    else:
        for record in records:
            sys.stdout.write("=" * 60 + "\n")
            sys.stdout.write(f"Limit:             {record.kind}\n")
            sys.stdout.write(f"lambda_or_product: {fmt(record.lambda_or_product)}\n")
            for name, value in record.distances.items():
                sys.stdout.write(f"{name:<19}{fmt(value)}\n")
            for name, value in record.aux.items():
                sys.stdout.write(f"{name:<19}{fmt(value)}\n")
        sys.stdout.write("=" * 60 + "\n")

    metrics = _metrics()
    if metrics:
        for solution, params in results:
            metrics.log_limit(solution.kind.value, params, solution.lambda_or_product,
                              (time.time() - started) * 1000)
    status(f"✅ {args.kind} limit solved")
    return EXIT_OK


# =============================================================================
# ORBIT
# =============================================================================

def cmd_orbit(args) -> int:
    areas = parse_floats(args.areas, 4, "--areas")
    try:
        params = OrbitParams(eccentricity=args.ecc, samples=args.samples,
                             periods=args.periods, mirror=args.mirror)
    except TetradError as e:
        raise UsageError(str(e))

    started = time.time()
    opts = solver_options(args)
    config = solve(areas, opts)
    orbit = HomographicOrbit(config, params, verify_tol=opts.verify_tol)
    if args.both:
        frame = both_arrangements(config, params, verify_tol=opts.verify_tol)
    else:
        frame = orbit_frame(orbit.samples())

    metadata = {"areas": ",".join(fmt(v) for v in areas), "lambda": fmt(config.lam),
                "masses": ",".join(fmt(m) for m in config.masses)}
    metadata.update({k: fmt(v) if isinstance(v, float) else v for k, v in orbit.metadata().items()})
    if args.both:
        metadata["arrangement"] = "direct,mirror"
    with output_stream(args.out) as stream:
        write_table(frame, stream, metadata)

    metrics = _metrics()
    if metrics:
        metrics.log_orbit(areas, args.ecc, len(frame), (time.time() - started) * 1000)
    status(f"✅ {len(frame)} samples over {args.periods:g} period(s), T = {orbit.period:.6g}")
    return EXIT_OK


# =============================================================================
# VERIFY
# =============================================================================

def verify_record(record, tol: float) -> Dict[str, Any]:
    """
    Residuals from the stored coordinates and masses. When the stored
    distances disagree with the coordinates, the configuration is rebuilt
    from the distances and that report is the one judged.
    """
    out = record.outputs
    masses = list(out.masses)
    report = verify_points(np.asarray(out.coordinates, dtype=float), masses)
    mismatch = distance_mismatch(record)
    result = {"residuals": report.to_dict(), "distance_mismatch": mismatch}

    if mismatch > DISTANCE_RTOL:
        try:
            d = DistanceSet(**out.distances)
            rebuilt = embed(d, SignedAreas(*out.signed_areas), masses)
            report = verify_points(rebuilt.as_array(), masses)
        except (GeometryError, TypeError) as e:
            result["rebuild_error"] = str(e)
            report = None
        result["residuals_from_distances"] = report.to_dict() if report else None

    failed = ["distance_mismatch"] if mismatch > DISTANCE_RTOL else []
    if report is None:
        failed.append("central_eq")
    else:
        failed += [name for name, value in report.to_dict().items() if not value < tol]
    result["failed"] = list(dict.fromkeys(failed))
    result["passes"] = not failed
    return result


def cmd_verify(args) -> int:
    try:
        record = load_record(args.record)
    except RecordError as e:
        raise UsageError(str(e))

    tol = args.tol if args.tol is not None else get_settings().verify_tol
    result = verify_record(record, tol)
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    if result["passes"]:
        status(f"✅ All residuals below {tol:.0e}")
        return EXIT_OK
    status(f"❌ Failed: {', '.join(result['failed'])}")
    return EXIT_FAILURE


# =============================================================================
# PARSER
# =============================================================================

def _add_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--residual", choices=["auto"] + [r.value for r in RootResidual], default="auto",
                        help="Residual whose sign changes locate lambda")
    parser.add_argument("--grid-cells", type=int, default=None, help="Initial root-scan cells")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tetrad",
        description="Planar four-body central configurations from weighted areas. "
                    "Pass negative leading values as --areas=-1,2,3,4.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Solve one configuration")
    p.add_argument("--areas", required=True, help="A1,A2,A3,A4")
    p.add_argument("--json", action="store_true", help="Print the JSON record")
    p.add_argument("--out", help="Write the JSON record to a file")
    _add_solver_flags(p)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("classify", help="Hull class and symmetry tags of four areas")
    p.add_argument("--areas", required=True, help="A1,A2,A3,A4")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("sweep", help="Tabulate solutions while one area varies")
    p.add_argument("--vary", required=True, choices=AREA_NAMES)
    p.add_argument("--fixed", required=True, help="The other three areas in label order")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--log", action="store_true", help="Geometric grid of --num points")
    p.add_argument("--num", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--quiet", action="store_true", help="No progress bar")
    p.add_argument("--out", help="CSV file (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("limit", help="Asymptotic configurations")
    p.add_argument("kind", choices=LIMIT_KINDS)
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--a4", type=float)
    p.add_argument("--values", help="Three constants for the general limits")
    p.add_argument("--which", type=int, help="Diverging label (general-lagrange)")
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--labels", default="1,3,4", help="Collinear labels (general-euler)")
    p.add_argument("--root", type=int, choices=[1, 2], help="Maxwell root (default both)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_limit)

    p = sub.add_parser("orbit", help="Sample the homographic orbit")
    p.add_argument("--areas", required=True, help="A1,A2,A3,A4")
    p.add_argument("--ecc", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=360, help="Samples per period")
    p.add_argument("--periods", type=float, default=1.0)
    arrangement = p.add_mutually_exclusive_group()
    arrangement.add_argument("--mirror", action="store_true", help="Reflected arrangement")
    arrangement.add_argument("--both", action="store_true", help="Direct and reflected arrangements in one table")
    p.add_argument("--out", help="CSV file (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser("verify", help="Recheck a JSON record")
    p.add_argument("record", help="Record file written by solve --out")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        return args.handler(args)
    except UsageError as e:
        emit_error("UsageError", str(e))
        return EXIT_USAGE
    except TetradError as e:
        emit_error(e.code, str(e))
        metrics = _metrics()
        if metrics:
            metrics.log_error(args.command, e.code, {"message": str(e)})
        status(f"❌ {e.code}")
        return EXIT_FAILURE
