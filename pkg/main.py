"""
Main entry point for the newton-osc toolkit
"""
import argparse
import json
import logging
import sys

import config
from cases import CaseManager
from commands import process_command

# Configure logging
logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stderr),
        logging.FileHandler(config.LOG_FILE, encoding='utf-8')
    ]
)
logger = logging.getLogger('newton_osc')


def build_parser() -> argparse.ArgumentParser:
    """Create the command line parser"""
    parser = argparse.ArgumentParser(
        prog=config.NAME,
        description="Newton polyhedra, toric resolutions and oscillatory integral asymptotics")
    parser.add_argument("--version", action="version", version=f"{config.NAME} {config.VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--radius", type=float, default=config.DEFAULT_BUMP_RADIUS,
                        help="bump amplitude radius in (0, 1]")
    common.add_argument("--plot-data", dest="plot_data", default=None, help="write the samples as CSV")
    common.add_argument("--plot", default=None, help="write a log-log PNG chart")
    common.add_argument("--budget", type=int, default=None, help="integrand evaluations per quadrature")
    common.add_argument("--strict", action="store_true", help="treat poor fits as errors")
    common.add_argument("--output", "-o", default=None, help="write the JSON report here instead of stdout")

    commands = parser.add_subparsers(dest="command", required=True)
    analyze = commands.add_parser("analyze", parents=[common], help="exact invariants, poles and verdict")
    analyze.add_argument("input", help="JSON file with the phase f and optional weight g")
    analyze.add_argument("--permute", default=None, help="axis permutation such as 2,1,3")

    verify = commands.add_parser("verify", parents=[common], help="numeric check of the prediction")
    verify.add_argument("input", help="JSON file with the phase f and optional weight g")
    verify.add_argument("--permute", default=None, help="axis permutation such as 2,1,3")

    example = commands.add_parser("example", parents=[common], help="run a named worked example")
    example.add_argument("case_id", choices=CaseManager.names())
    example.add_argument("--param", default=None, help="integer parameters such as p=2,q=1")
    example.add_argument("--numeric", action="store_true", help="also run the numeric checks")
    return parser


def main(argv=None) -> int:
    """Main function to run one command"""
    args = build_parser().parse_args(argv)
    if args.budget is not None:
        config.QUAD_BUDGET = args.budget
    logger.info(f"Starting {config.NAME} {config.VERSION}: {args.command}")

    try:
        status, report = process_command(args)
    except KeyboardInterrupt:
        logger.info("Interrupted by user.")
        return 130
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        status, report = 1, {"error": str(e), "type": type(e).__name__}

    text = json.dumps(report, indent=2)
    if args.output:
        with open(args.output, "w") as f:
            f.write(text + "\n")
        logger.info(f"💾 Report written to {args.output}")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
