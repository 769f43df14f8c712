import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from nuqs.scenario.config import (
    OutputFormat,
    RuntimeSettings,
    ScenarioKind,
    load_config,
)
from nuqs.scenario.runner import ValidationReport, parallel_available, run_scenario
from nuqs.scenario.writer import write_result
from nuqs.utils.exceptions import (
    ConfigError,
    DomainError,
    NumericalValidationError,
)

# configure logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NUMERICAL_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    # argparse
    parser = argparse.ArgumentParser(
        prog="nuqs",
        description="Neutrino oscillation scenarios on an emulated two-qubit register.",
    )
    parser.add_argument(
        "scenario",
        type=str,
        help="scenario to run",
        choices=ScenarioKind.get_member_names(),
    )
    parser.add_argument(
        "-c",
        "--config",
        type=str,
        help="recipe file; defaults to the shipped recipe of the scenario",
        default=None,
        required=False,
    )
    parser.add_argument(
        "-s",
        "--set",
        type=str,
        help="dotted key=value override, e.g. 'params.theta13_deg=9' (repeatable)",
        action="append",
        default=[],
        dest="overrides",
        required=False,
    )
    parser.add_argument(
        "-o",
        "--out",
        type=str,
        help="output file; defaults to 'output_path' of the recipe",
        default=None,
        required=False,
    )
    parser.add_argument(
        "-f",
        "--format",
        type=str,
        help="output format; defaults to 'output_format' of the recipe",
        choices=["csv", "json"],
        default=None,
        required=False,
    )
    parser.add_argument(
        "-w",
        "--workers",
        type=int,
        help="number of worker processes; defaults to NUQS_WORKERS or all CPUs",
        default=None,
        required=False,
    )
    parser.add_argument(
        "-v",
        "--verbose",
        type=str,
        help="logging verbosity level.",
        choices=["debug", "info"],
        default=None,
        required=False,
    )
    return parser


def _configure_logging(level: str) -> None:
    root = logging.getLogger("nuqs")
    root.setLevel(logging.DEBUG if level == "debug" else logging.INFO)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        root.addHandler(handler)


def main(argv: Optional[list[str]] = None) -> int:
    """Runs one scenario and writes its output

    Returns:
        int: ``0`` on success, ``1`` for configuration errors and ``2`` for numerical
        failures, including a failed ``circuit-validate`` report
    """
    args = build_parser().parse_args(argv)

    try:
        settings = RuntimeSettings()
    except ValidationError as error:
        print(f"Invalid NUQS_* environment: {error}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    _configure_logging(args.verbose or settings.log_level)
    workers = args.workers if args.workers is not None else settings.workers
    defaulted = args.workers is None and "workers" not in settings.model_fields_set
    if defaulted and workers > 1 and not parallel_available():
        logger.warning(
            f"joblib is not installed, running serially instead of on {workers} "
            "workers; install 'nuqs[parallel]' for parallel sweeps."
        )
        workers = 1

    try:
        if workers < 1:
            raise ConfigError(f"--workers must be at least 1, got {workers}.")
        overrides = list(args.overrides)
        if args.format is not None:
            overrides.append(f"output_format={args.format}")
        cfg = load_config(args.scenario, path=args.config, overrides=overrides)
        if args.out is not None:
            cfg = cfg.model_copy(update={"output_path": Path(args.out)})
        if cfg.output_path is None:
            raise ConfigError("No output path; pass --out or set 'output_path'.")
        if (
            cfg.scenario is ScenarioKind.CIRCUIT_VALIDATE
            and cfg.output_format is not OutputFormat.JSON
        ):
            raise ConfigError("The validation report can only be written as JSON.")

        result = run_scenario(cfg, workers=workers)
        write_result(result, cfg.output_path, cfg.output_format)
    except ConfigError as error:
        logger.error(f"Configuration error: {error}")
        return EXIT_CONFIG_ERROR
    except (NumericalValidationError, DomainError) as error:
        logger.error(f"Numerical failure: {error}")
        return EXIT_NUMERICAL_ERROR
    except ImportError as error:
        logger.error(f"Missing optional dependency: {error}")
        return EXIT_CONFIG_ERROR

    if isinstance(result, ValidationReport) and not result.passed:
        logger.error(
            f"Validation failed: max error {result.max_reconstruction_error:.3e}, "
            f"max CNOTs {result.max_cnot_count}, "
            f"max backend deviation {result.max_backend_deviation:.3e}."
        )
        return EXIT_NUMERICAL_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
