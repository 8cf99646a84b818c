import argparse
import logging
import sys
from pathlib import Path
from types import SimpleNamespace

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # dotenv not installed, skip loading .env file
    pass

from asteroid_gnc import __version__
from asteroid_gnc.config.general_config import GeneralConfig
from asteroid_gnc.config.scenario_config import load_scenario
from asteroid_gnc.core.errors import EXIT_CONVERGENCE, EXIT_OK, ConfigError, exit_code_for
from asteroid_gnc.core.mesh import mass_properties, validate_mesh
from asteroid_gnc.core.scenario_runner import HOPS, gravity_sample, run_scenario
from asteroid_gnc.shape_parsers.base_shape_parser import (
    TABULAR,
    UNIT_SCALES,
    format_shape_model,
    get_shape_parser,
    get_supported_shape_formats,
)
from asteroid_gnc.utils.log_handler import LOG_LEVELS, generate_unique_log_path, setup_logging
from asteroid_gnc.utils.synthetic_shapes import get_supported_synthetic_shapes, make_shape

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log",
        choices=LOG_LEVELS,
        default="INFO",
        help="Log level (default: INFO), can be DEBUG, INFO, WARNING, ERROR, CRITICAL",
    )
    common.add_argument(
        "--quiet",
        action="store_true",
        help="Only print warnings and errors to the console. The log file still receives --log level messages.",
    )
    return common


def _scenario_options(parser, workers=False, dt_override=False):
    parser.add_argument("--config", required=True, help="Path to the YAML scenario document")
    parser.add_argument(
        "--out",
        help="Output directory (default: output.directory from the scenario, then $ASTEROID_GNC_OUTPUT_DIR, then ./output)",
    )
    if dt_override:
        parser.add_argument(
            "--dt-override",
            dest="dt_override",
            type=float,
            help="Replace the integration step (s) of every phase in the scenario",
        )
    if workers:
        parser.add_argument(
            "--workers",
            type=int,
            help="Number of worker processes for hop batches (default: hops.workers from the scenario). "
            "Results are identical whatever the width.",
        )


def handle_args(argv=None):
    parser = argparse.ArgumentParser(description="Descent, landing and hopping guidance and control around asteroids")
    common = _common_options()
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser(
        "run", parents=[common], help="Run the descent, landing and hop phases present in a scenario"
    )
    _scenario_options(run_parser, workers=True, dt_override=True)

    gravity_parser = subparsers.add_parser(
        "gravity", parents=[common], help="Sample the gravity field at the scenario's sampling points"
    )
    _scenario_options(gravity_parser)

    hop_parser = subparsers.add_parser("hop-batch", parents=[common], help="Run only the hops section of a scenario")
    _scenario_options(hop_parser, workers=True, dt_override=True)

    validate_parser = subparsers.add_parser(
        "validate-mesh", parents=[common], help="Check that a shape model is a closed, outward-oriented polyhedron"
    )
    source = validate_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--shape", help="Shape model file (OBJ-style or tabular)")
    source.add_argument("--synthetic", choices=get_supported_synthetic_shapes(), help="Check a synthetic shape instead")
    validate_parser.add_argument(
        "--units", choices=sorted(UNIT_SCALES), help="Vertex units, overriding any '# units:' directive in the file"
    )
    validate_parser.add_argument("--format", choices=get_supported_shape_formats(), help="Shape file format (default: from the suffix)")
    validate_parser.add_argument("--subdivisions", type=int, default=3, help="Subdivision level for synthetic shapes (default: 3)")

    make_parser = subparsers.add_parser(
        "make-shape", parents=[common], help="Write a synthetic shape model to a file"
    )
    make_parser.add_argument("--synthetic", required=True, choices=get_supported_synthetic_shapes())
    make_parser.add_argument("--subdivisions", type=int, default=3, help="Subdivision level (default: 3)")
    make_parser.add_argument("--format", choices=get_supported_shape_formats(), default=TABULAR, help="Output format (default: tab)")
    make_parser.add_argument("--out", required=True, help="Output shape file")

    subparsers.add_parser("version", help="Print the toolkit version")

    args = parser.parse_args(argv)
    return GeneralConfig(args)


def run_command(config):
    summary = run_scenario(config, load_scenario(config.config))
    if summary.hop_non_convergence:
        logger.warning(f"{summary.hop_non_convergence} hop solve(s) did not converge")
        return EXIT_CONVERGENCE
    return EXIT_OK


def hop_batch_command(config):
    scenario = load_scenario(config.config)
    if scenario.hops is None:
        raise ConfigError("hop-batch needs a hops section in the scenario")
    summary = run_scenario(config, scenario, phases=(HOPS,))
    return EXIT_CONVERGENCE if summary.hop_non_convergence else EXIT_OK


def gravity_command(config):
    gravity_sample(config, load_scenario(config.config))
    return EXIT_OK


def validate_mesh_command(config):
    if config.synthetic:
        mesh = make_shape(config.synthetic, config.subdivisions)
    else:
        mesh = get_shape_parser(SimpleNamespace(path=config.shape, units=config.units, format=config.format)).get_mesh()
    report = validate_mesh(mesh)
    print(f"{mesh}: {report.summary()}")
    if not report.is_valid:
        print(report)
        raise ConfigError(f"Shape model is invalid: {report.summary()}")
    properties = mass_properties(mesh, 1.0)
    print(f"volume={properties.volume!r} m^3, centroid={properties.centroid.tolist()}")
    return EXIT_OK


def make_shape_command(config):
    mesh = make_shape(config.synthetic, config.subdivisions)
    path = Path(config.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_shape_model(mesh, config.format), encoding="utf-8")
    logger.info(f"Wrote {mesh} to {path}")
    return EXIT_OK


COMMANDS = {
    "run": run_command,
    "gravity": gravity_command,
    "hop-batch": hop_batch_command,
    "validate-mesh": validate_mesh_command,
    "make-shape": make_shape_command,
}


def main(config=None, log_file=None):
    if not config:
        config = handle_args()

    if config.command == "version":
        print(f"asteroid_gnc {__version__}")
        return EXIT_OK

    # Worker processes of hop batches log to the same file.
    effective_log_file = Path(log_file) if log_file else generate_unique_log_path("asteroid_gnc")
    config.log_file = effective_log_file

    setup_logging(config.log, str(effective_log_file), quiet=config.quiet)
    logger.debug(f"Configuration:\n{config}")

    try:
        return COMMANDS[config.command](config)
    except KeyboardInterrupt:
        logger.info("Interrupted by user (Ctrl+C).")
        return 130
    except Exception as e:
        code = exit_code_for(e)
        logger.exception(f"{config.command} failed with exit code {code}: {e}")
        return code


if __name__ == "__main__":
    sys.exit(main())
