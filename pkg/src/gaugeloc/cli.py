"""CLI entry point for gaugeloc.

Exit status: 0 when every analysis passes, 1 when any analysis fails or
errors, 2 on scenario parse/validation errors and invalid configuration.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from gaugeloc import __version__, presets, report
from gaugeloc.analyses import run_scenario
from gaugeloc.config import load_config
from gaugeloc.errors import ScenarioError
from gaugeloc.scenario import load_scenario

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaugeloc", description="Exact locality audits for Abelian gauge theories.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="override GAUGELOC_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file or preset:NAME")
    run.add_argument("scenario")
    run.add_argument("--json", dest="json_out", metavar="OUT", help="write the JSON report to OUT ('-' for stdout)")
    run.add_argument("--text", dest="text_out", metavar="OUT", help="write the text report to OUT ('-' for stdout)")
    run.add_argument("--verify-extra", action="store_true", help="also run the slower cross-checks")
    run.add_argument("--seed", type=int, help="seed for randomized property sweeps (overrides GAUGELOC_SEED)")
    run.add_argument("--threads", type=int, help="worker cap (overrides GAUGELOC_THREADS)")

    listing = sub.add_parser("list-presets", help="show the scenario catalog")
    listing.add_argument("--json", action="store_true", help="print the catalog as JSON")

    check = sub.add_parser("check", help="parse and validate a scenario without running it")
    check.add_argument("scenario")
    return parser


def _write(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _list_presets(as_json: bool) -> int:
    catalog = presets.list_presets()
    if as_json:
        sys.stdout.write(json.dumps(catalog, indent=2, ensure_ascii=False) + "\n")
        return EXIT_PASS
    width = max(len(entry["name"]) for entry in catalog)
    for entry in catalog:
        sys.stdout.write(f"{entry['name'].ljust(width)}  {entry['description']}\n")
        sys.stdout.write(f"{''.ljust(width)}  reproduces: {entry['anchor']}\n")
    return EXIT_PASS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config()
    except RuntimeError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INPUT
    level = (args.log_level or config.log_level).upper()
    if not isinstance(logging.getLevelName(level), int):
        sys.stderr.write(f"unknown log level {args.log_level!r}\n")
        return EXIT_INPUT
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-presets":
        return _list_presets(args.json)

    if args.command == "run":
        if args.threads is not None and args.threads < 1:
            sys.stderr.write("--threads must be at least 1\n")
            return EXIT_INPUT
        config = config.with_overrides(seed=args.seed, threads=args.threads, verify_extra=args.verify_extra or None)

    try:
        scenario = load_scenario(args.scenario, config.margin)
    except ScenarioError as exc:
        sys.stderr.write(f"{args.scenario}: {exc}\n")
        return EXIT_INPUT

    if args.command == "check":
        sys.stdout.write(f"{args.scenario}: ok ({len(scenario.analyses)} analyses)\n")
        return EXIT_PASS

    results = run_scenario(scenario, config)
    data = report.build_report(scenario.name, results)
    if args.json_out:
        _write(report.to_json(data), args.json_out)
    if args.text_out:
        _write(report.to_text(data), args.text_out)
    if not args.json_out and not args.text_out:
        _write(report.to_text(data), "-")
    failed = [r for r in results if r["status"] != "pass"]
    if failed:
        logger.warning("%d of %d analyses did not pass", len(failed), len(results))
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
