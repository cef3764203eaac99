"""
FuzzyCesaro - Cesaro summability of fuzzy improper integrals
Main application entry point
"""

import argparse
import os
import sys
from typing import Dict, List, Optional

# Add project root to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from loguru import logger

from config.settings import settings, get_log_config, CHECKER_NAMES, EXIT_CODES
from cli.handlers.commands import COMMANDS, command_handler

# argparse dest -> RunConfig field
OPTION_FIELDS = (
    "catalog", "lower", "upper", "catalog_file", "function_mode",
    "grid", "t_max", "n_steps", "quad_tol", "tol",
    "eps", "lam", "ell", "backward_lam", "t0", "stride", "u0", "u_json", "x0",
    "output_format", "out",
)


def _setup_logging():
    """Setup logging configuration; stdout stays reserved for results"""

    log_config = get_log_config()

    # Remove default logger
    logger.remove()

    logger.add(
        sys.stderr,
        level=log_config["level"],
        format=log_config["console_format"],
        colorize=True,
    )

    # Add file logger if specified
    if log_config["file"]:
        directory = os.path.dirname(log_config["file"])
        if directory:
            os.makedirs(directory, exist_ok=True)
        logger.add(
            log_config["file"],
            level=log_config["level"],
            format=log_config["file_format"],
            rotation=log_config["rotation"],
            retention=log_config["retention"],
            compression="zip",
        )


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)

    selector = parent.add_argument_group("function selector")
    selector.add_argument("--catalog", metavar="NAME", help="Built-in function, e.g. paper-example-1 or crisp-constant(2)")
    selector.add_argument("--lower", metavar="EXPR", help="Lower endpoint expression in x and alpha")
    selector.add_argument("--upper", metavar="EXPR", help="Upper endpoint expression in x and alpha")
    selector.add_argument("--catalog-file", metavar="PATH", help="Resolve --catalog in a JSON manifest")
    selector.add_argument("--function-mode", action="store_true", default=None,
                          help="Study f(t) and (1/t)*integral of f instead of s(t) and sigma(t)")

    plan = parent.add_argument_group("sampling plan")
    plan.add_argument("--grid", type=int, metavar="N", help=f"Alpha levels (default {settings.alpha_levels})")
    plan.add_argument("--t-max", type=float, help=f"Horizon (default {settings.t_max:g})")
    plan.add_argument("--n-steps", type=int, help=f"Sampling steps (default {settings.n_steps})")
    plan.add_argument("--quad-tol", type=float, help=f"Quadrature tolerance (default {settings.quad_tol:g})")
    plan.add_argument("--tol", type=float, help=f"Limit tolerance (default {settings.limit_tol:g})")

    output = parent.add_argument_group("output")
    output.add_argument("--format", dest="output_format", choices=["json", "csv", "both"])
    output.add_argument("--out", metavar="PATH", help="Output file; stdout gets a summary table")
    return parent


def _checker_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("checkers")
    group.add_argument("--all", dest="checkers", action="append_const", const="all",
                       help="Every trace checker, plus landau when u is given")
    for flag, name in CHECKER_NAMES.items():
        group.add_argument(f"--{flag.replace('_', '-')}", dest="checkers", action="append_const",
                           const=flag, help=f"Run the {name} checker")

    params = parser.add_argument_group("checker parameters")
    params.add_argument("--eps", type=float, help=f"Tolerance epsilon (default {settings.checker_eps:g})")
    params.add_argument("--lambda", dest="lam", type=float,
                        help=f"Forward window lambda > 1 (default {settings.checker_lambda:g})")
    params.add_argument("--ell", type=float, help=f"Backward mean ell in (0, 1) (default {settings.checker_ell:g})")
    params.add_argument("--backward-lambda", dest="backward_lam", type=float,
                        help=f"Backward slow-decrease lambda in (0, 1) (default {settings.checker_backward_lambda:g})")
    params.add_argument("--t0", type=float, help=f"Scan start (default {settings.checker_t0:g})")
    params.add_argument("--stride", type=int, help=f"t-scan decimation (default {settings.scan_stride})")
    params.add_argument("--u0", type=float, help="Crisp Landau bound u = u0-bar")
    params.add_argument("--u-json", metavar="PATH", help="Landau bound as JSON {alpha, lower, upper}")
    params.add_argument("--x0", type=float, help="Landau scan start (default 0)")


def build_parser() -> argparse.ArgumentParser:
    epilog = "exit codes:\n" + "\n".join(f"  {code}  {text}" for code, text in EXIT_CODES.items())
    parser = argparse.ArgumentParser(
        prog="fuzzycesaro",
        description="Cesaro summability of improper integrals of fuzzy-number-valued functions",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parent = _common_options()

    subparsers.add_parser("analyze", parents=[parent], help="Classify the integral and its Cesaro mean")
    check = subparsers.add_parser("check", parents=[parent], help="Run Tauberian condition checkers")
    _checker_options(check)
    subparsers.add_parser("export", parents=[parent], help="Write the s/sigma trace as CSV/JSON")
    subparsers.add_parser("catalog", parents=[parent], help="List the built-in functions")
    return parser


def collect_options(args: argparse.Namespace) -> Dict:
    """Options the user actually set; everything else falls back to settings"""
    options = {name: getattr(args, name) for name in OPTION_FIELDS if getattr(args, name, None) is not None}
    checkers = getattr(args, "checkers", None)
    if checkers:
        options["checkers"] = tuple(checkers)
    return options


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""

    args = build_parser().parse_args(argv)
    _setup_logging()
    if args.command not in COMMANDS:
        return 2
    logger.debug(f"Running {args.command}")
    return command_handler.execute(args.command, collect_options(args))


if __name__ == "__main__":
    sys.exit(main())
