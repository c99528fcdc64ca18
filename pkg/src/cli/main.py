"""
Command-line front end.

    python -m src.cli.main <subcommand> [options]

Logs go to stderr; stdout carries exactly one summary line per command.
Exit codes: 0 ok, 2 config/schema, 3 numerical, 4 I/O.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import pandas as pd

from src.cli.validate import load_scenario_config, validate_config
from src.clock.clock_state import ClockState, decompose_phase, theta_from_p2, visibility
from src.common.config import load_config
from src.common.errors import ClockInterferometryError, ConfigError, InvalidParameterError
from src.common.logging_utils import setup_logging
from src.common.seeding import DEFAULT_SEED
from src.interferogram.fitting import DEFAULT_FIXED, fit_interferogram
from src.interferogram.montecarlo import mc_fit_error
from src.interferogram.profile import default_grid, default_params, fringe_wavelength
from src.interferogram.sampling import CameraImage, synthesize_image
from src.io.artifacts import ArtifactDir
from src.noise.gain import gain_band, gain_curve, reference_convention, sweep_frame
from src.noise.sensitivity import NoiseBudget, phase_noise, sensitivity
from src.scenarios.figures import default_phi_grid
from src.scenarios.runner import SCENARIO_IDS, ScenarioConfig, run_scenario

logger = logging.getLogger("clockinterf")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _summary(**values) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in values.items())


def _angle(value: float | None, deg: bool) -> float | None:
    if value is None:
        return None
    return math.radians(value) if deg else value


def _theta(args) -> float:
    if args.p2 is not None:
        return theta_from_p2(args.p2)
    if args.theta is None:
        raise InvalidParameterError("give either --theta or --p2")
    return _angle(args.theta, args.deg)


def _out_dir(args, cfg) -> Path:
    return Path(args.out or cfg["run"]["output_dir"])


def _formats(args) -> tuple:
    return tuple(f.strip() for f in args.formats.split(",") if f.strip())


# ---------------------------
# Subcommands
# ---------------------------
def cmd_phase(args, cfg) -> str:
    state = ClockState(_theta(args), _angle(args.phi1, args.deg), _angle(args.phi2, args.deg))
    dec = decompose_phase(state, args.convention)
    return _summary(total_rad=dec.total, dynamical_rad=dec.dynamical, geometric_rad=dec.geometric)


def cmd_visibility(args, cfg) -> str:
    return _summary(visibility=visibility(_theta(args), _angle(args.phi, args.deg)))


def cmd_synth(args, cfg) -> str:
    theta = theta_from_p2(args.p2)
    phi = _angle(args.phi, args.deg)
    state = ClockState(theta, phi, 2.0 * phi)
    dec = decompose_phase(state)
    params = default_params(cfg, visibility(theta, phi), dec.total)
    image = synthesize_image(params, args.atoms, default_grid(cfg), args.seed)
    formats = _formats(args)
    with ArtifactDir(_out_dir(args, cfg), "synth", args.seed) as art:
        if "csv" in formats:
            art.write_csv(image.to_frame(), "image")
        if "json" in formats:
            art.write_json({"params": params.to_dict(), "atoms": args.atoms, "dropped": image.dropped, "p2": args.p2})
    return _summary(atoms=image.total, dropped=image.dropped, visibility=params.visibility, phase_rad=params.phase)


def cmd_fit(args, cfg) -> str:
    image = CameraImage.from_frame(pd.read_csv(args.image))
    section = cfg["interferogram"]
    wavelength = args.wavelength or fringe_wavelength(section["tof_s"], section["separation_um"], section["mass_kg"])
    fixed = DEFAULT_FIXED - {"wavelength"} if args.free_wavelength else DEFAULT_FIXED
    fit = fit_interferogram(image.counts, image.grid, fixed=fixed, wavelength=wavelength, weighted=args.weighted)
    with ArtifactDir(_out_dir(args, cfg), Path(args.image).stem + "_fit", args.seed) as art:
        art.write_json(fit.to_record())
    return _summary(phase_rad=fit.phase, phase_error_rad=fit.phase_error, chi2=fit.chi2, converged=fit.converged)


def cmd_mc(args, cfg) -> str:
    params = default_params(cfg, args.visibility, args.phase)
    mc = mc_fit_error(
        params, args.atoms, args.trials, args.seed, grid=default_grid(cfg), weighted=args.weighted, progress=args.progress
    )
    with ArtifactDir(_out_dir(args, cfg), "mc", args.seed) as art:
        art.write_json({"params": params.to_dict(), "atoms": args.atoms, "summary": mc.to_dict()})
    return _summary(
        mean_abs_error_rad=mc.mean_abs_error,
        std_error_rad=mc.std_error,
        mean_reported_error_rad=mc.mean_reported_error,
        excluded=mc.excluded,
    )


def cmd_gain(args, cfg) -> str:
    g = cfg["grid"]
    grid = default_phi_grid(g["n_points"], g["refine_lo"], g["refine_hi"], g["refine_step"])
    points = gain_curve(args.p2, args.n, args.a, args.technical, grid, reference_p2=args.reference_p2)
    df = sweep_frame(points)
    peak = df.loc[df["gain_db"].idxmax()]
    formats = _formats(args)
    with ArtifactDir(_out_dir(args, cfg), "gain", args.seed) as art:
        if "csv" in formats:
            art.write_csv(df, "sweep")
            art.write_csv(gain_band(args.p2, args.n, args.a, args.technical, grid, args.dp2), "band")
        if "json" in formats:
            art.write_json(
                {
                    "config": {"p2": args.p2, "atoms": args.n, "cycles": args.a, "technical": args.technical},
                    "reference": reference_convention(reference_p2=args.reference_p2),
                    "peak_gain_db": float(peak["gain_db"]),
                    "peak_phi_rad": float(peak["phi_rad"]),
                }
            )
    return _summary(peak_gain_db=float(peak["gain_db"]), peak_phi_rad=float(peak["phi_rad"]))


def cmd_reproduce(args, cfg) -> str:
    if args.scenario_config:
        doc = load_scenario_config(args.scenario_config, cfg["run"]["seed"])
    elif args.scenario:
        doc = {"scenario": args.scenario, "seed": args.seed, "outputs": {"formats": list(_formats(args))}}
    else:
        raise ConfigError("reproduce needs a scenario id or --scenario-config")
    config = ScenarioConfig.from_dict(doc, cfg)
    result, _ = run_scenario(config, cfg, _out_dir(args, cfg), progress=args.progress)
    scalars = {k: v for k, v in sorted(result.summary.items()) if isinstance(v, (int, float)) and not isinstance(v, bool)}
    return _summary(scenario=result.scenario, **{k: float(f"{v:.4g}") for k, v in scalars.items()})


def cmd_budget(args, cfg) -> str:
    budget = NoiseBudget(args.n, args.a, args.technical, args.visibility)
    dPhi = phase_noise(budget)
    if args.slope is None:
        return _summary(dPhi_rad=dPhi)
    return _summary(dPhi_rad=dPhi, dphi_rad=sensitivity(dPhi, args.slope))


def cmd_validate(args, cfg) -> str:
    report = validate_config(args.path, cfg["run"]["seed"])
    for v in report.violations:
        logger.error(f"❌ {v.pointer or '/'}: {v.message}")
    if not report.valid:
        raise ConfigError(f"{args.path} has {len(report.violations)} schema violation(s)", report.violations)
    return _summary(valid=True, violations=0, warnings=len(report.warnings))


COMMANDS = {
    "phase": cmd_phase,
    "visibility": cmd_visibility,
    "synth": cmd_synth,
    "fit": cmd_fit,
    "mc": cmd_mc,
    "gain": cmd_gain,
    "reproduce": cmd_reproduce,
    "budget": cmd_budget,
    "validate-config": cmd_validate,
}


# ---------------------------
# Parser
# ---------------------------
def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="toolkit defaults (TOML, default conf/config.toml)")
    common.add_argument("--out", default=None, help="output directory (overrides CLOCKINTERF_OUTPUT_DIR)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--formats", default="csv,json", help="comma-separated subset of csv,json,svg")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--progress", action="store_true", help="show progress bars")
    return common


def _state_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--theta", type=float, help="polar angle of the internal superposition")
    group.add_argument("--p2", type=float, help="population of |2>, alternative to --theta")
    p.add_argument("--deg", action="store_true", help="angles are given in degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clockinterf",
        description="Clock-interferometer phase, fitting and sensitivity toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")
    common = _common_parser()

    p = sub.add_parser("phase", parents=[common], help="total, dynamical and geometric phase")
    _state_args(p)
    p.add_argument("--phi1", type=float, default=0.0, help="phase of |1> (rad)")
    p.add_argument("--phi2", type=float, default=0.0, help="phase of |2> (rad)")
    p.add_argument("--convention", choices=["printed", "geodesic"], default="printed", help="dynamical-phase rule")

    p = sub.add_parser("visibility", parents=[common], help="fringe visibility")
    _state_args(p)
    p.add_argument("--phi", type=float, required=True, help="relative rotation phi2 - phi1 (rad)")

    p = sub.add_parser("synth", parents=[common], help="synthesise a camera image")
    p.add_argument("--p2", type=float, default=0.514, help="population of |2>")
    p.add_argument("--phi", type=float, default=math.pi, help="scanned phase, phi1 = phi, phi2 = 2 phi (rad)")
    p.add_argument("--deg", action="store_true", help="angles are given in degrees")
    p.add_argument("--atoms", type=int, default=5000, help="atoms per image")

    p = sub.add_parser("fit", parents=[common], help="fit an image CSV")
    p.add_argument("--image", required=True, help="CSV with pixel_index, position_um, counts")
    p.add_argument("--wavelength", type=float, default=None, help="fringe period in um (default from config)")
    p.add_argument("--free-wavelength", action="store_true", help="fit the fringe period as well")
    p.add_argument("--weighted", action="store_true", help="Poisson-weighted residuals")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo fitted-phase error")
    p.add_argument("--visibility", type=float, default=0.028, help="fringe visibility")
    p.add_argument("--phase", type=float, default=0.3, help="true phase (rad)")
    p.add_argument("--atoms", type=int, default=5000, help="atoms per image")
    p.add_argument("--trials", type=int, default=100, help="number of trials (>= 30)")
    p.add_argument("--weighted", action="store_true", help="Poisson-weighted residuals")

    p = sub.add_parser("gain", parents=[common], help="gain curve vs the single-state reference")
    p.add_argument("--p2", type=float, default=0.514, help="population of |2>")
    p.add_argument("--n", type=float, default=5000, help="atoms per cycle")
    p.add_argument("--a", type=int, default=8, help="cycles averaged")
    p.add_argument("--technical", type=float, default=0.1, help="technical phase noise (rad)")
    p.add_argument("--reference-p2", type=float, default=1.0, help="population of the reference configuration")
    p.add_argument("--dp2", type=float, default=0.004, help="population uncertainty for the band")

    p = sub.add_parser("reproduce", parents=[common], help="run a figure or pipeline scenario")
    p.add_argument("scenario", nargs="?", choices=SCENARIO_IDS, help="scenario id")
    p.add_argument("--scenario-config", default=None, help="JSON run config (schema/config.json)")

    p = sub.add_parser("budget", parents=[common], help="phase noise and sensitivity")
    p.add_argument("--visibility", type=float, default=1.0, help="fringe visibility")
    p.add_argument("--n", type=float, default=5000, help="atoms per cycle")
    p.add_argument("--a", type=int, default=8, help="cycles averaged")
    p.add_argument("--technical", type=float, default=0.1, help="technical phase noise (rad)")
    p.add_argument("--slope", type=float, default=None, help="phase-response slope dPhi_T/dphi")

    p = sub.add_parser("validate-config", parents=[common], help="check a run config against the schema")
    p.add_argument("path", help="JSON config file")
    return parser


def help_manifest(parser: argparse.ArgumentParser | None = None) -> str:
    """Every subcommand with its positionals and flags, one line each."""
    parser = parser or build_parser()
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    lines = [f"{parser.prog}: " + " ".join(sub.choices)]
    for name, sp in sub.choices.items():
        positionals = [f"<{a.dest}>" for a in sp._actions if not a.option_strings]
        flags = sorted(s for a in sp._actions for s in a.option_strings if s not in ("-h", "--help"))
        lines.append(f"{name}: " + " ".join(positionals + flags))
    return "\n".join(lines) + "\n"


def _error_exit(exc: BaseException, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    violations = getattr(exc, "violations", None)
    if violations:
        payload["violations"] = [v.to_dict() if hasattr(v, "to_dict") else v for v in violations]
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        level = args.log_level or cfg["run"]["log_level"]
        setup_logging("clockinterf", level, Path("logs") if cfg["run"].get("log_to_file") else None)
        summary = COMMANDS[args.command](args, cfg)
    except ConfigError as e:
        return _error_exit(e, EXIT_CONFIG)
    except (ClockInterferometryError, FloatingPointError) as e:
        return _error_exit(e, EXIT_NUMERICAL)
    except OSError as e:
        return _error_exit(e, EXIT_IO)
    print(summary)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
