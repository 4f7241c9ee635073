"""Command-line surface: indices, simulate, phase, calibrate, sweep.

Diagnostics go to stderr; data goes to stdout or to ``--out``. Exit codes:
0 success, 1 validation/parse failure, 2 numerical failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import scenario as sio
from .calibration import (
    DegenerateSeries,
    SweepSpec,
    UnconvergedFit,
    fit_logistic,
    sensitivity_sweep,
)
from .dynamics import (
    ClampViolation,
    DegenerateTrajectory,
    NonFiniteState,
    simulate,
)
from .indices import (
    AutonomyComponents,
    ClassifierConfig,
    DomainAssessment,
    InfraComponents,
    assess_domain,
    boundary_proximity,
    classify_regime,
    classify_stage,
    is_transitioned,
    transition_potential,
)
from .phase_space import boundary_curve, position_domains, regime_grid

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

_NUMERICAL_ERRORS = (
    NonFiniteState,
    ClampViolation,
    DegenerateTrajectory,
    DegenerateSeries,
    UnconvergedFit,
)

_COMPONENT_FLAGS = ("d", "e", "r", "m", "e_p", "d_p", "p_p")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; remap to the validation code."""

    def error(self, message):  # noqa: D102
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _emit(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _classifier(tau: float, high_cut: float) -> ClassifierConfig:
    return ClassifierConfig.for_tau(tau, high_cut=high_cut)


def _cmd_indices(args) -> int:
    cfg = _classifier(args.tau, args.high_cut)
    if args.domains is not None:
        assessments = sio.parse_domains_csv(Path(args.domains).read_text())
        reports = [assess_domain(a, cfg) for a in assessments]
        _emit(args.out, sio.domain_reports_csv(reports))
        return EXIT_OK

    given_components = [f for f in _COMPONENT_FLAGS if getattr(args, f) is not None]
    if given_components:
        if len(given_components) != len(_COMPONENT_FLAGS):
            missing = sorted(set(_COMPONENT_FLAGS) - set(given_components))
            raise ValueError(f"component mode needs all seven scores; missing {missing}")
        if args.aix is not None or args.icc is not None:
            raise ValueError("give either --aix/--icc or component scores, not both")
        report = assess_domain(
            DomainAssessment(
                name="cli",
                autonomy=AutonomyComponents(args.d, args.e, args.r, args.m),
                infra=InfraComponents(args.e_p, args.d_p, args.p_p),
            ),
            cfg,
        )
        aix, icc = report.aix, report.icc
    elif args.aix is not None and args.icc is not None:
        aix, icc = args.aix, args.icc
    else:
        raise ValueError("give --aix and --icc, all seven component scores, or --domains FILE")

    ttp = transition_potential(aix, icc)
    lines = [
        f"aix = {aix:.4f}",
        f"icc = {icc:.4f}",
        f"ttp = {ttp:.4f}",
        f"regime = {classify_regime(aix, icc, cfg).value}",
        f"stage = {classify_stage(ttp, cfg).label}",
        f"transitioned = {str(is_transitioned(ttp, cfg.tau)).lower()}",
        f"tau_distance = {cfg.tau - ttp:.4f}",
        f"near_boundary = {str(boundary_proximity(aix, icc, cfg)).lower()}",
    ]
    _emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _crossing_summary(traj) -> str:
    if traj.crossing is None:
        return "crossing: none\n"
    ev = traj.crossing
    return f"crossing: t_cross = {ev.t_cross:.9g} (ttp = {ev.ttp_at_cross:.9g})\n"


def _cmd_simulate(args) -> int:
    config = sio.parse_scenario(Path(args.scenario).read_text())
    traj = simulate(config)
    _emit(args.out, sio.trajectory_csv(traj))
    summary = _crossing_summary(traj)
    if args.out is None:
        sys.stderr.write(summary)
    else:
        sys.stdout.write(summary)
    return EXIT_OK


def _cmd_phase(args) -> int:
    cfg = _classifier(args.tau, args.high_cut)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve = boundary_curve(args.tau, max(args.resolution, 2))
    (out_dir / "boundary.csv").write_text(sio.boundary_csv(curve))
    grid = regime_grid(cfg, args.resolution)
    (out_dir / "grid.csv").write_text(sio.grid_csv(grid))
    written = ["boundary.csv", "grid.csv"]
    if args.domains is not None:
        assessments = sio.parse_domains_csv(Path(args.domains).read_text())
        positioned = position_domains(assessments, cfg)
        (out_dir / "domains.csv").write_text(sio.positioned_domains_csv(positioned))
        written.append("domains.csv")
    sys.stdout.write(f"wrote {', '.join(written)} to {out_dir}\n")
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    series = sio.parse_series_csv(Path(args.series).read_text(), label=args.series)
    result = fit_logistic(series)
    fragment = sio.json.dumps(
        {
            "rate": result.params.rate,
            "capacity": result.params.capacity,
            "x0": result.params.x0,
        },
        indent=2,
        sort_keys=True,
    )
    _emit(args.out, fragment + "\n")
    sys.stderr.write(
        f"fit: sse = {result.sse:.9g}, iterations = {result.iterations}, "
        f"converged = {str(result.converged).lower()}\n"
    )
    if not result.converged:
        sys.stderr.write("fit did not converge within the iteration cap\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = sio.parse_scenario(Path(args.scenario).read_text())
    try:
        values = tuple(float(v) for v in args.values.split(","))
    except ValueError:
        raise ValueError(f"--values must be comma-separated numbers, got {args.values!r}") from None
    spec = SweepSpec(base=config, parameter=args.parameter, values=values)
    entries = sensitivity_sweep(spec)
    for entry in entries:
        if entry.error is not None:
            sys.stderr.write(f"value {entry.value:.9g}: {entry.error}\n")
    _emit(args.out, sio.sweep_csv(entries))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anai", description="Autonomy/infrastructure transition analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("indices", parents=[], help="compute index report from scores or a domain file")
    p.add_argument("--aix", type=float, help="autonomy index in [0,1]")
    p.add_argument("--icc", type=float, help="coupling coefficient in [0,1]")
    for flag in _COMPONENT_FLAGS:
        p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=float,
                       help=f"component score {flag} in [0,1]")
    p.add_argument("--domains", help="CSV file of per-domain component scores")
    p.add_argument("--tau", type=float, default=0.5, help="transition threshold (default 0.5)")
    p.add_argument("--high-cut", type=float, default=0.5, help="high/low quadrant cut (default 0.5)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_indices)

    p = sub.add_parser("simulate", help="run a scenario file, emit a trajectory CSV")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", help="trajectory CSV path (default: stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("phase", help="boundary and regime-grid CSVs for one threshold")
    p.add_argument("--tau", type=float, default=0.5, help="transition threshold (default 0.5)")
    p.add_argument("--resolution", type=int, default=32, help="grid resolution (default 32)")
    p.add_argument("--high-cut", type=float, default=0.5, help="high/low quadrant cut (default 0.5)")
    p.add_argument("--domains", help="optional CSV of domain component scores to position")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_phase)

    p = sub.add_parser("calibrate", help="fit logistic parameters to a t,value series")
    p.add_argument("--series", required=True, help="CSV file with header t,value")
    p.add_argument("--out", help="write the fitted scenario fragment here instead of stdout")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("sweep", help="re-simulate a scenario over a swept parameter")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--parameter", required=True, help="parameter path, e.g. autonomy.rate")
    p.add_argument("--values", required=True, help="comma-separated ascending values")
    p.add_argument("--out", help="sweep CSV path (default: stdout)")
    p.set_defaults(func=_cmd_sweep)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    """Dispatch one command line; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL
    except (sio.ScenarioError, ValueError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_IO


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
