#!/usr/bin/env python3
"""
RMTT-Workbench: a triple-store workbench comparing a single indexed triple
table, vertical partitioning and recursively mapped twin tables.

This is the main entry point script that handles command-line arguments and
dispatches to the ingest, query, explain, stats, gen and bench commands.
"""

import sys
import logging
import argparse
from typing import Any, Dict, List, Optional

from colorama import Fore, Style, just_fix_windows_console

from modules.bench.generator import GenConfig, generate
from modules.bench.harness import run_suite
from modules.bench.report import emit_report
from modules.engines.engine_factory import ENGINE_KINDS, build_engine
from modules.query.executor import format_rows, run_query
from modules.query.explain import explain
from modules.query.planner import PLAN_MODES, plan
from modules.query.sparql_parser import parse_query_file
from modules.utils.config_manager import ConfigManager
from modules.utils.store_io import load_store, read_manifest, read_placements, save_store
from modules.rdf.ntriples import read_ntriples

# Set up logger
logger = logging.getLogger("rmtt_workbench")

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class WorkbenchArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER_ERROR, f"{self.prog}: error: {message}\n")


def setup_logging(config: Dict[str, Any], verbose: bool = False):
    """
    Set up logging based on configuration.

    Args:
        config: Configuration dictionary
        verbose: Force DEBUG level
    """
    log_config = config.get('logging', {})
    log_level_name = 'DEBUG' if verbose else str(log_config.get('level', 'INFO')).upper()
    log_level = getattr(logging, log_level_name, logging.INFO)

    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    log_file = log_config.get('file')

    handlers = []

    # Console output goes to stderr so stdout only carries results
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(log_format))
    handlers.append(console_handler)

    if log_file:
        try:
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(log_level)
            file_handler.setFormatter(logging.Formatter(log_format))
            handlers.append(file_handler)
        except OSError as e:
            print_diagnostic(f"Could not create log file: {e}", warning=True)

    logging.basicConfig(level=log_level, format=log_format, handlers=handlers)

    logger.debug(f"Logging initialized with level {log_level_name}")


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from a file using the ConfigManager.

    Args:
        config_path: Path to the config file

    Returns:
        dict: Configuration dictionary
    """
    return ConfigManager(config_path).get_config()


def print_diagnostic(message: str, warning: bool = False):
    """Print a colored diagnostic line to standard error."""
    color = Fore.YELLOW if warning else Fore.RED
    label = "warning" if warning else "error"
    print(f"{color}{label}:{Style.RESET_ALL} {message}", file=sys.stderr)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command line arguments.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        argparse.Namespace: Parsed arguments
    """
    parser = WorkbenchArgumentParser(
        prog="rmtt_workbench.py",
        description="RMTT-Workbench - compare triple-store layouts by the self-joins their queries need"
    )
    parser.add_argument("-c", "--config", help="Path to a JSON config file")
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")

    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    ingest = commands.add_parser("ingest", help="Build a store from an N-Triples file")
    ingest.add_argument("input", help="N-Triples file")
    ingest.add_argument("--engine", choices=ENGINE_KINDS, required=True, help="Storage engine")
    ingest.add_argument("-o", "--output", required=True, help="Store directory")
    ingest.add_argument("--lenient", action="store_true", help="Skip malformed lines instead of failing")

    query = commands.add_parser("query", help="Run a query against a store")
    query.add_argument("store", help="Store directory")
    query.add_argument("query_file", help="SPARQL query file (.rq)")
    query.add_argument("--mode", choices=("sound", "pruned"), help="Twin-table planning mode")
    query.add_argument("--explain", action="store_true", help="Print the plan before the results")
    query.add_argument("--json", action="store_true", help="Print results as JSON")
    query.add_argument("--distinct", action="store_true", help="Remove duplicate result rows")
    query.add_argument("--strict", action="store_true", help="Reject deviations from plain BGP syntax")

    explain_cmd = commands.add_parser("explain", help="Print a query plan")
    explain_cmd.add_argument("store", help="Store directory")
    explain_cmd.add_argument("query_file", help="SPARQL query file (.rq)")
    explain_cmd.add_argument("--mode", choices=("sound", "pruned"), help="Twin-table planning mode")
    explain_cmd.add_argument("--strict", action="store_true", help="Reject deviations from plain BGP syntax")

    stats = commands.add_parser("stats", help="Print store statistics from the manifest")
    stats.add_argument("store", help="Store directory")
    stats.add_argument("--trace", action="store_true", help="Also print the twin-table placement log")

    gen = commands.add_parser("gen", help="Generate the university benchmark dataset")
    gen.add_argument("--seed", type=int, help="Random seed")
    gen.add_argument("--scale", type=int, help="Number of universities")
    gen.add_argument("--departments", type=int, help="Departments per university")
    gen.add_argument("--students", type=int, help="Students per department")
    gen.add_argument("--professors", type=int, help="Professors per department")
    gen.add_argument("--courses", type=int, help="Courses per department")
    gen.add_argument("-o", "--output", required=True, help="Output .nt file")

    bench = commands.add_parser("bench", help="Run a query directory on every engine")
    bench.add_argument("--data", required=True, help="N-Triples dataset")
    bench.add_argument("--queries", required=True, help="Directory of .rq files")
    bench.add_argument("--engines", nargs="+", choices=PLAN_MODES, help="Engines to compare")
    bench.add_argument("--reps", type=int, help="Repetitions per query and engine")
    bench.add_argument("--check", action="store_true", help="Count results with the brute-force evaluator")
    bench.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    bench.add_argument("-o", "--output", required=True, help="Report path (.csv or .md)")

    return parser.parse_args(argv)


# Commands

def cmd_ingest(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    strict = not args.lenient and config.get('parser', {}).get('strict', True)
    result = read_ntriples(args.input, strict=strict)
    for diagnostic in result.diagnostics:
        print_diagnostic(str(diagnostic), warning=True)
    store = build_engine(args.engine, result.triples)
    save_store(store, args.output)
    print(f"{store.kind}: {store.triple_count} triples in {len(store.table_ids())} table(s) -> {args.output}")
    return EXIT_OK


def _plan_query(args: argparse.Namespace, config: Dict[str, Any]):
    query_config = config.get('query', {})
    tolerant = not args.strict and query_config.get('tolerant', True)
    query = parse_query_file(args.query_file, tolerant=tolerant)
    store = load_store(args.store)
    return plan(query, store, args.mode or query_config.get('mode')), store


def cmd_query(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    query_plan, store = _plan_query(args, config)
    if args.explain:
        sys.stdout.write(explain(query_plan))
    distinct = True if args.distinct or config.get('query', {}).get('distinct') else None
    rows, stats = run_query(query_plan, store, distinct=distinct)
    print(format_rows(query_plan.query.projection, rows, as_json=args.json))
    logger.info(f"{stats.rows_out} rows, {stats.plan_self_joins} self-joins, "
                f"{stats.runtime_same_table_probes} same-table probes, {stats.wall_time * 1000:.3f} ms")
    return EXIT_OK


def cmd_explain(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    query_plan, _ = _plan_query(args, config)
    sys.stdout.write(explain(query_plan))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    manifest = read_manifest(args.store)
    for key in sorted(manifest.values):
        print(f"{key}={manifest.values[key]}")
    if args.trace:
        print("row\ttwin\tswitched\tfallback")
        for report in read_placements(args.store):
            print(f"{report.row}\t{report.twin}\t{int(report.switched)}\t{int(report.fallback)}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    settings = dict(config.get('generator', {}))
    overrides = {
        'seed': args.seed,
        'universities': args.scale,
        'departments_per_university': args.departments,
        'students_per_department': args.students,
        'professors_per_department': args.professors,
        'courses_per_department': args.courses,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    count = generate(GenConfig.from_dict(settings), args.output)
    print(f"{count} triples -> {args.output}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    bench_config = config.get('bench', {})
    report = run_suite(
        args.data,
        args.queries,
        engines=args.engines or bench_config.get('engines', list(PLAN_MODES)),
        repetitions=args.reps if args.reps is not None else bench_config.get('repetitions', 3),
        check=args.check,
        progress=not args.no_progress and bench_config.get('progress', True),
        tolerant=config.get('query', {}).get('tolerant', True),
    )
    emit_report(report, args.output, config)
    failed = [r for r in report.rows if r.error]
    for row in failed:
        print_diagnostic(f"{row.query_id} on {row.engine}: {row.error}", warning=True)
    print(f"{len(report.rows)} runs ({len(failed)} failed) -> {args.output}")
    return EXIT_OK


COMMANDS = {
    'ingest': cmd_ingest,
    'query': cmd_query,
    'explain': cmd_explain,
    'stats': cmd_stats,
    'gen': cmd_gen,
    'bench': cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point.

    Args:
        argv: Arguments without the program name

    Returns:
        int: Exit code (0 success, 1 user error, 2 internal error)
    """
    just_fix_windows_console()
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USER_ERROR

    try:
        config = load_config(args.config)
    except (FileNotFoundError, ValueError) as e:
        print_diagnostic(str(e))
        return EXIT_USER_ERROR

    setup_logging(config, verbose=args.verbose)

    try:
        return COMMANDS[args.command](args, config)
    except (FileNotFoundError, ValueError, LookupError) as e:
        print_diagnostic(str(e))
        return EXIT_USER_ERROR
    except KeyboardInterrupt:
        print_diagnostic("Interrupted")
        return EXIT_USER_ERROR
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        print_diagnostic(f"internal error: {e}")
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
