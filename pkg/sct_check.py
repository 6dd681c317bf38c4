import argparse
import configparser
import json
import logging
import os
import sys
from typing import List, Optional

from components.analysis import AnalysisOptions, analyze
from components.const import (
    CONFIG_FILE,
    DEBUG_ENV_VARIABLE,
    DEFAULT_FUEL,
    DEFAULT_FUZZ_DEPTH,
    DEFAULT_FUZZ_MAX_NODES,
    DEFAULT_FUZZ_SEEDS,
    DEFAULT_JSON_INDENT,
    LOG_FORMAT,
    PROGRAM_NAME,
)
from components.dot import write_dot
from components.outcomes import Report

if os.environ.get(DEBUG_ENV_VARIABLE):
    logging.basicConfig(format=LOG_FORMAT, level=logging.DEBUG)
else:
    logging.basicConfig(format=LOG_FORMAT, level=logging.INFO)
    logging.getLogger("networkx").setLevel(logging.WARNING)

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROGRAM_NAME,
        description="Checks termination of a λΠ-modulo rewriting system by size-change "
        "termination over its dependency pairs.",
    )
    parser.add_argument("file", metavar="FILE", help="Signature and rules to check")
    parser.add_argument("--json", action="store_true", help="Print the report as JSON")
    parser.add_argument(
        "--dot", metavar="PATH", help="Write the call graph before and after closure"
    )
    parser.add_argument("--list-dps", action="store_true", help="List the dependency pairs")
    parser.add_argument("--matrices", action="store_true", help="List the size-change matrices")
    parser.add_argument("--fuel", type=int, help=f"Normalization budget (default: {DEFAULT_FUEL})")
    parser.add_argument("--fuzz", action="store_true", help="Search for reduction cycles")
    parser.add_argument(
        "--fuzz-seeds", type=int, help=f"Fuzz rounds (default: {DEFAULT_FUZZ_SEEDS})"
    )
    parser.add_argument(
        "--fuzz-depth", type=int, help=f"Fuzz reduction depth (default: {DEFAULT_FUZZ_DEPTH})"
    )
    parser.add_argument(
        "--skip-typing", action="store_true", help="Only check conditions (b), (c) and SCT"
    )
    parser.add_argument(
        "--config", metavar="PATH", default=CONFIG_FILE, help=f"INI file (default: {CONFIG_FILE})"
    )
    parser.add_argument("--quiet", "-q", action="store_true", help="Only log warnings")
    parser.add_argument(
        "--no-timing", action="store_true", help="Report 0 ms for reproducible output"
    )
    return parser


def build_options(args: argparse.Namespace, config: configparser.ConfigParser) -> AnalysisOptions:
    """Flags override the config file, which overrides the built-in defaults."""

    def pick(flag: Optional[int], section: str, key: str, default: int) -> int:
        if flag is not None:
            return flag
        return config.getint(section, key, fallback=default)

    return AnalysisOptions(
        fuel=pick(args.fuel, "ANALYSIS", "fuel", DEFAULT_FUEL),
        skip_typing=args.skip_typing
        or config.getboolean("ANALYSIS", "skip_typing", fallback=False),
        fuzz=args.fuzz,
        fuzz_seeds=pick(args.fuzz_seeds, "FUZZ", "seeds", DEFAULT_FUZZ_SEEDS),
        fuzz_depth=pick(args.fuzz_depth, "FUZZ", "depth", DEFAULT_FUZZ_DEPTH),
        fuzz_max_nodes=config.getint("FUZZ", "max_nodes", fallback=DEFAULT_FUZZ_MAX_NODES),
        timing=not args.no_timing,
    )


def render(report: Report, args: argparse.Namespace, indent: int) -> str:
    if args.json:
        return json.dumps(report.to_json(), indent=indent, ensure_ascii=False)
    lines = []
    if args.list_dps:
        lines.extend(
            f"{pair.label}: {pair.describe(report.infix)}" for pair in report.dependency_pairs
        )
    if args.matrices:
        lines.extend(
            f"{pair.label}: {matrix}"
            for pair, matrix in zip(report.dependency_pairs, report.matrices)
        )
    lines.append(report.to_text())
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    config = configparser.ConfigParser()
    config.read(args.config)

    report = analyze(args.file, build_options(args, config))
    if args.dot and report.call_graph is not None:
        write_dot(args.dot, report.call_graph, report.closed_graph)
        logger.info("Call graph written to %s", args.dot)

    print(render(report, args, config.getint("OUTPUT", "indent", fallback=DEFAULT_JSON_INDENT)))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
