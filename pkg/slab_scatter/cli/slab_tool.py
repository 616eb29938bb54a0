"""CLI for band, scattering and pulse computations."""

import argparse
import csv
import io
import json
import logging
import os
import sys
import warnings
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..config import config
from ..exceptions import ConfigurationError, InvalidSpecError, SlabScatterError, UnderResolutionWarning
from ..logger import get_logger, setup_logger
from ..potentials import PotentialSpec, load_spec
from ..scattering import scatter_direct, scatter_semi_infinite, transparency_points
from ..spectrum import dispersion, find_bands, group_velocity
from ..timedomain import PulseConfig, freq_domain_oracle, pulse_config_from_dict, run, write_snapshot
from ..utils import dumps_json, format_number

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3
EXIT_UNDER_RESOLUTION = 4


class UsageError(Exception):
    """Raised for invalid command-line input."""

    pass


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with the usage code instead of argparse's 2."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="Output format")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="Tolerance override, e.g. transfer.det_tol=1e-12"
    )
    common.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    common.add_argument("--log-file", help="Also write log records to this file")
    return common


def _sweep_arguments(parser: argparse.ArgumentParser, steps: int = 200, imaginary: bool = True) -> None:
    parser.add_argument("--spec", required=True, help="Potential spec: JSON file path or inline JSON")
    parser.add_argument("--omega-min", type=float, required=True, help="Lower end of the frequency range")
    parser.add_argument("--omega-max", type=float, required=True, help="Upper end of the frequency range")
    parser.add_argument("--omega-steps", type=int, default=steps, help="Number of frequency samples")
    if imaginary:
        parser.add_argument("--omega-imag", type=float, default=0.0, help="Constant imaginary part of omega")


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Returns:
        Parsed arguments namespace.
    """
    common = _common_arguments()
    parser = ArgumentParser(prog="slab-scatter", description="Band structure and scattering for 1-D periodic potentials")
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    bands_parser = subparsers.add_parser("bands", parents=[common], help="Locate and classify bands")
    _sweep_arguments(bands_parser, steps=2000, imaginary=False)
    bands_parser.add_argument("--first-index", type=int, default=1, help="Index given to the first band found")

    dispersion_parser = subparsers.add_parser("dispersion", parents=[common], help="Bloch dispersion table")
    _sweep_arguments(dispersion_parser)

    scatter_parser = subparsers.add_parser("scatter", parents=[common], help="Finite-slab reflection and transmission")
    _sweep_arguments(scatter_parser)
    scatter_parser.add_argument("--periods", type=int, action="append", help="Number of periods (repeatable)")

    transparency_parser = subparsers.add_parser("transparency", parents=[common], help="Transparency points per band")
    _sweep_arguments(transparency_parser, steps=2000, imaginary=False)
    transparency_parser.add_argument("--periods", type=int, action="append", help="Number of periods (repeatable)")
    transparency_parser.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), help="Flag points inside this range")

    semi_parser = subparsers.add_parser("semi", parents=[common], help="Semi-infinite reflection")
    _sweep_arguments(semi_parser)

    pulse_parser = subparsers.add_parser("pulse", parents=[common], help="Time-domain pulse through a delta comb")
    pulse_parser.add_argument("--config", help="Pulse configuration JSON file (overrides the flags below)")
    pulse_parser.add_argument("--amplitude", type=float, default=100.0, help="Comb amplitude A")
    pulse_parser.add_argument("--periods", type=int, default=7, help="Number of periods N")
    pulse_parser.add_argument("--period-length", type=float, default=1.0, help="Period L")
    pulse_parser.add_argument("--theta", type=float, help="Carrier offset inside the band")
    pulse_parser.add_argument("--band-index", type=int, help="Band of the carrier")
    pulse_parser.add_argument("--width", type=float, help="Pulse width B (default A**1.2)")
    pulse_parser.add_argument("--cells-per-period", type=int, help="Grid cells per period")
    pulse_parser.add_argument("--t-end", type=float, help="Final time")
    pulse_parser.add_argument("--summary", help="Summary JSON path (default: next to --out)")
    pulse_parser.add_argument("--snapshot", help="Write the final field to this binary file")

    verify_parser = subparsers.add_parser("verify", parents=[common], help="Run the acceptance suite")
    verify_parser.add_argument("--seed", type=int, default=0, help="Seed for randomized checks")
    verify_parser.add_argument("--only", type=int, nargs="+", help="Criterion ids to run")
    verify_parser.add_argument("--quick", action="store_true", help="Reduced sample counts")

    return parser.parse_args(argv)


def read_json_file(file_path: str) -> Dict[str, Any]:
    """Read and parse a JSON file.

    Raises:
        UsageError: If the file is missing or is not valid JSON.
    """
    try:
        with open(file_path, "r", encoding="utf-8") as file:
            return json.load(file)
    except FileNotFoundError:
        raise UsageError(f"JSON file not found: {file_path}")
    except json.JSONDecodeError as e:
        raise UsageError(f"Invalid JSON in file {file_path}: {str(e)}")


def write_file(content: str, file_path: str) -> None:
    """Write content to a file, creating its directory if needed."""
    try:
        directory = os.path.dirname(file_path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)

        with open(file_path, "w", encoding="utf-8", newline="") as file:
            file.write(content)
    except OSError as e:
        raise UsageError(f"Error writing file {file_path}: {str(e)}")


def apply_overrides(pairs: Sequence[str]) -> Dict[str, str]:
    """Turn ``key=value`` strings into an override mapping."""
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"Override must look like key=value: {pair!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def omega_grid(args: argparse.Namespace) -> np.ndarray:
    """Frequency samples from the sweep flags."""
    if args.omega_min <= 0 or args.omega_max <= args.omega_min:
        raise UsageError(f"Need 0 < omega-min < omega-max, got ({args.omega_min}, {args.omega_max})")
    if args.omega_steps < 1:
        raise UsageError(f"omega-steps must be >= 1, got {args.omega_steps}")
    omegas = np.linspace(args.omega_min, args.omega_max, args.omega_steps)
    imag = getattr(args, "omega_imag", 0.0)
    if imag < 0:
        raise UsageError(f"omega-imag must be non-negative, got {imag}")
    return omegas + 1j * imag if imag else omegas


def period_list(args: argparse.Namespace) -> List[int]:
    periods = args.periods or [1]
    if any(N < 1 for N in periods):
        raise UsageError(f"Period counts must be >= 1, got {periods}")
    return periods


def render_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> str:
    """CSV with a header row and 17 significant digits for every float."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row.get(column, "")) for column in columns])
    return buffer.getvalue()


def emit(args: argparse.Namespace, columns: Sequence[str], rows: Sequence[Dict[str, Any]], extra: Optional[Dict[str, Any]] = None) -> None:
    """Write rows as CSV or JSON to ``--out`` or stdout."""
    if args.format == "json":
        payload: Dict[str, Any] = {"command": args.command, "rows": list(rows)}
        if extra:
            payload.update(extra)
        content = dumps_json(payload) + "\n"
    else:
        content = render_csv(columns, rows)

    if args.out:
        write_file(content, args.out)
        logger.info(f"{args.command} result written to {args.out}")
    else:
        sys.stdout.write(content)


def split(prefix: str, value: complex) -> Dict[str, float]:
    value = complex(value)
    return {f"{prefix}_re": value.real, f"{prefix}_im": value.imag}


def cmd_bands(args: argparse.Namespace, spec: PotentialSpec) -> int:
    """Locate bands in the frequency range and classify their edges.

    Returns:
        Exit code; under-resolution suspects give a distinct code after output is written.
    """
    if args.omega_min <= 0 or args.omega_max <= args.omega_min:
        raise UsageError(f"Need 0 < omega-min < omega-max, got ({args.omega_min}, {args.omega_max})")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnderResolutionWarning)
        bands = find_bands(spec, args.omega_min, args.omega_max, args.omega_steps, first_index=args.first_index)

    rows = [
        {"index": b.index, "lo": b.lo, "hi": b.hi, "width": b.width, "lo_class": b.lo_class, "hi_class": b.hi_class}
        for b in bands
    ]
    suspects = [w.message for w in caught if isinstance(w.message, UnderResolutionWarning)]
    intervals = [interval for warning in suspects for interval in warning.intervals]
    emit(args, ["index", "lo", "hi", "width", "lo_class", "hi_class"], rows, {"under_resolved": intervals})

    if suspects:
        for warning in suspects:
            logger.warning(str(warning))
        return EXIT_UNDER_RESOLUTION
    return EXIT_OK


def cmd_dispersion(args: argparse.Namespace, spec: PotentialSpec) -> int:
    """Tabulate F, the Bloch phase and the group velocity where it is defined."""
    rows = []
    for sample in dispersion(spec, omega_grid(args)):
        row: Dict[str, Any] = {**split("omega", sample.omega), **split("F", sample.F), **split("k", sample.k)}
        row["regime"] = sample.regime
        row["V_g"] = float("nan")
        if sample.omega.imag == 0 and sample.regime.value == "band":
            try:
                row["V_g"] = group_velocity(sample.omega.real, spec).V_g
            except SlabScatterError as e:
                logger.debug(f"No group velocity at omega = {sample.omega.real}: {str(e)}")
        rows.append(row)
    columns = ["omega_re", "omega_im", "F_re", "F_im", "k_re", "k_im", "regime", "V_g"]
    emit(args, columns, rows)
    return EXIT_OK


def cmd_scatter(args: argparse.Namespace, spec: PotentialSpec) -> int:
    """Reflection and transmission of N-period slabs; failing points become error rows.

    Columns ``R``, ``T`` are ``|r|^2``, ``|t|^2``; ``R_plus_T`` is their sum and
    ``T_hs`` the independent ``4 / (|T|^2 + 2)`` value.
    """
    rows = []
    failures = 0
    for N in period_list(args):
        for omega in omega_grid(args):
            try:
                result = scatter_direct(omega, spec, N)
                row: Dict[str, Any] = {
                    **split("omega", result.omega),
                    "N": N,
                    **split("r", result.r),
                    **split("t", result.t),
                    "abs_t": abs(result.t),
                    "R": result.reflectance,
                    "T": result.transmittance,
                    "R_plus_T": result.reflectance + result.transmittance,
                    "T_hs": result.transmittance_hs,
                    "conservation_defect": result.conservation_defect,
                    "regime": result.regime,
                    "error": "",
                }
            except SlabScatterError as e:
                failures += 1
                nan = float("nan")
                row = {
                    **split("omega", omega),
                    "N": N,
                    **split("r", complex(nan, nan)),
                    **split("t", complex(nan, nan)),
                    "abs_t": nan,
                    "R": nan,
                    "T": nan,
                    "R_plus_T": nan,
                    "T_hs": nan,
                    "conservation_defect": nan,
                    "regime": "",
                    "error": f"{type(e).__name__}: {str(e)}",
                }
            rows.append(row)
    if failures:
        logger.warning(f"{failures} of {len(rows)} scatter points failed; see the error column")
    columns = [
        "omega_re", "omega_im", "N", "r_re", "r_im", "t_re", "t_im",
        "abs_t", "R", "T", "R_plus_T", "T_hs", "conservation_defect", "regime", "error",
    ]
    emit(args, columns, rows)
    return EXIT_OK


def cmd_transparency(args: argparse.Namespace, spec: PotentialSpec) -> int:
    """Transparency points of every complete band in the range."""
    if args.omega_min <= 0 or args.omega_max <= args.omega_min:
        raise UsageError(f"Need 0 < omega-min < omega-max, got ({args.omega_min}, {args.omega_max})")
    window = tuple(args.window) if args.window else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnderResolutionWarning)
        bands = find_bands(spec, args.omega_min, args.omega_max, args.omega_steps)
    rows = []
    for N in period_list(args):
        for band in bands:
            for point in transparency_points(spec, band, N, window=window):
                rows.append(
                    {
                        "N": N,
                        "band": point.band_index,
                        "m": point.m,
                        "omega": point.omega,
                        "T": point.transmittance,
                        "residual": point.residual,
                        "in_window": point.in_window,
                    }
                )
    emit(args, ["N", "band", "m", "omega", "T", "residual", "in_window"], rows)
    return EXIT_OK


def cmd_semi(args: argparse.Namespace, spec: PotentialSpec) -> int:
    """Semi-infinite reflection coefficient and its Weyl-function cross-check."""
    rows = []
    for omega in omega_grid(args):
        try:
            result = scatter_semi_infinite(omega, spec)
            row = {
                **split("omega", result.omega),
                **split("r", result.r),
                **split("c", result.c),
                **split("m_plus", result.m_plus),
                "mismatch": result.mismatch,
                "error": "",
            }
        except SlabScatterError as e:
            row = {**split("omega", omega), "error": f"{type(e).__name__}: {str(e)}"}
        rows.append(row)
    columns = ["omega_re", "omega_im", "r_re", "r_im", "c_re", "c_im", "m_plus_re", "m_plus_im", "mismatch", "error"]
    emit(args, columns, rows)
    return EXIT_OK


def pulse_config(args: argparse.Namespace) -> PulseConfig:
    """Pulse configuration from ``--config`` or from the individual flags."""
    if args.config:
        return pulse_config_from_dict(read_json_file(args.config))
    overrides: Dict[str, Any] = {"period": args.period_length}
    for name in ("theta", "band_index", "width", "cells_per_period", "t_end"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    return PulseConfig.desk_scale(args.amplitude, args.periods, **overrides)


def cmd_pulse(args: argparse.Namespace) -> int:
    """Run the pulse, write the energy series and a summary with the frequency-domain prediction."""
    cfg = pulse_config(args)
    report = run(cfg)

    summary = report.summary()
    final = report.snapshot()
    predicted_total = freq_domain_oracle(cfg)
    predicted_now = freq_domain_oracle(cfg, t=final.t)
    summary["oracle"] = {
        "transmitted_total": predicted_total,
        "transmitted_at_t_end": predicted_now,
        "transmitted_fraction_at_t_end": predicted_now / report.initial_energy,
        "relative_error": abs(final.right / final.total - predicted_now / report.initial_energy)
        / max(predicted_now / report.initial_energy, 1e-300),
    }

    rows = [
        {"t": t, "total": e, "reflected": left, "inside": slab, "transmitted": right}
        for t, e, left, slab, right in report.rows()
    ]
    columns = ["t", "total", "reflected", "inside", "transmitted"]
    if args.format == "json":
        emit(args, columns, rows, {"summary": summary})
    else:
        emit(args, columns, rows)
        summary_path = args.summary or (os.path.splitext(args.out)[0] + ".summary.json" if args.out else None)
        if summary_path:
            write_file(dumps_json(summary) + "\n", summary_path)
            logger.info(f"Pulse summary written to {summary_path}")
        else:
            sys.stderr.write(dumps_json(summary) + "\n")

    if args.snapshot and report.final_state is not None:
        write_snapshot(args.snapshot, report.final_state, cfg.h)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the acceptance suite; exit code 0 only if every selected criterion passes."""
    from ..implementations.acceptance import AcceptanceSuite

    suite = AcceptanceSuite(seed=args.seed, quick=args.quick)
    results = suite.run(args.only)
    report = suite.report(results)
    content = dumps_json(report) + "\n"
    if args.out:
        write_file(content, args.out)
        logger.info(f"Verification report written to {args.out}")
    else:
        sys.stdout.write(content)
    for result in results:
        if not result.passed:
            logger.error(f"Criterion {result.id} ({result.name}) failed: {result.error or result.measured}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


SPEC_COMMANDS = {
    "bands": cmd_bands,
    "dispersion": cmd_dispersion,
    "scatter": cmd_scatter,
    "transparency": cmd_transparency,
    "semi": cmd_semi,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI.

    Returns:
        Exit code: 0 success, 1 usage error, 2 numeric failure, 3 verification
        failure, 4 band scan with under-resolution suspects.
    """
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logger(
        level=logging.INFO if getattr(args, "verbose", False) else None,
        log_file=getattr(args, "log_file", None),
    )
    if args.command is None:
        logger.error("No command given; use --help")
        return EXIT_USAGE

    try:
        with config.overridden(apply_overrides(args.set)):
            if args.command in SPEC_COMMANDS:
                spec = load_spec(args.spec)
                return SPEC_COMMANDS[args.command](args, spec)
            if args.command == "pulse":
                return cmd_pulse(args)
            if args.command == "verify":
                return cmd_verify(args)
            logger.error(f"Unknown command: {args.command}")
            return EXIT_USAGE

    except (UsageError, InvalidSpecError, ConfigurationError) as e:
        logger.error(f"Invalid input: {str(e)}")
        return EXIT_USAGE
    except SlabScatterError as e:
        logger.error(f"Numeric failure in {args.command}: {str(e)}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
