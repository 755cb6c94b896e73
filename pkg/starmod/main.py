"""Command-line entry point: run, latest, validate, index and morita."""

import argparse
import logging
import os
import sys
from typing import List, Optional

from starmod.core.bundle import deform_projection
from starmod.core.errors import StarmodError
from starmod.core.picard import morita_check
from starmod.core.star import moyal_star
from starmod.core.trace_index import index
from starmod.core.workflows import run_scenario
from starmod.infrastructure import codec
from starmod.infrastructure.config import DEFAULT_TRUNCATION_ORDER, LOG_FORMAT, LOG_LEVEL, MAX_WORKERS, OUTPUT_DIR
from starmod.infrastructure.report_manager import ReportManager, dump_json, write_text
from starmod.infrastructure.scenario import load_scenario, read_json, validate_scenario
import starmod.ui.report_view as view

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    result = run_scenario(scenario, args.workers)
    report = result.to_dict(include_timings=args.timings)
    text = view.render_text(result.to_dict(include_timings=True))

    if args.archive:
        name = scenario.name or os.path.splitext(os.path.basename(args.scenario))[0]
        manager = ReportManager(OUTPUT_DIR, name)
        path = manager.save_json_report(report)
        manager.save_text_report(text)
        manager.update_run_index(report, args.scenario)
        return EXIT_OK if view.display_results_summary(report, path) else EXIT_FAILED

    _emit(text if args.format == "text" else dump_json(report), args.out)
    return EXIT_OK if result.success else EXIT_FAILED


def cmd_latest(args: argparse.Namespace) -> int:
    report = ReportManager.load_latest_report(args.output_dir)
    if report is None:
        log.error(f"No archived runs under {args.output_dir}/")
        return EXIT_FAILED
    _emit(view.render_text(report) if args.format == "text" else dump_json(report), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    diagnostics = validate_scenario(args.scenario)
    for d in diagnostics:
        print(str(d))
    if not diagnostics:
        log.info(f"{args.scenario} is valid")
    return EXIT_OK if not diagnostics else EXIT_FAILED


def cmd_index(args: argparse.Namespace) -> int:
    descriptor = codec.decode_descriptor(read_json(args.algebra))
    P0 = codec.decode_projection(descriptor, read_json(args.projection))
    value = index(deform_projection(P0, moyal_star(descriptor, args.K)))
    _emit(dump_json(codec.encode_index(value)), args.out)
    return EXIT_OK


def cmd_morita(args: argparse.Namespace) -> int:
    model = codec.decode_model(read_json(args.model))
    c = codec.decode_class(read_json(args.class_a), model)
    c_prime = codec.decode_class(read_json(args.class_b), model)
    report = morita_check(c, c_prime, model)
    _emit(dump_json(codec.encode_morita(report)), args.out)
    return EXIT_OK if report.equivalent else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starmod", description="Exact checks for deformed projective modules.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Execute a scenario file")
    run.add_argument("scenario")
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--out", help="Write the report to this path instead of stdout")
    run.add_argument("--timings", action="store_true", help="Include runtime_ms in the JSON report")
    run.add_argument("--archive", action="store_true", help=f"Archive the report under {OUTPUT_DIR}/")
    run.add_argument("--workers", type=int, default=MAX_WORKERS)
    run.set_defaults(handler=cmd_run)

    latest = sub.add_parser("latest", help="Print the most recent archived report")
    latest.add_argument("--output-dir", default=OUTPUT_DIR)
    latest.add_argument("--format", choices=("json", "text"), default="json")
    latest.add_argument("--out")
    latest.set_defaults(handler=cmd_latest)

    validate = sub.add_parser("validate", help="Check a scenario file without executing it")
    validate.add_argument("scenario")
    validate.set_defaults(handler=cmd_validate)

    idx = sub.add_parser("index", help="Index of the deformation of a projection")
    idx.add_argument("projection")
    idx.add_argument("--algebra", required=True)
    idx.add_argument("--K", type=int, default=DEFAULT_TRUNCATION_ORDER)
    idx.add_argument("--out")
    idx.set_defaults(handler=cmd_index)

    morita = sub.add_parser("morita", help="Morita criterion for two characteristic classes")
    morita.add_argument("model")
    morita.add_argument("class_a")
    morita.add_argument("class_b")
    morita.add_argument("--out")
    morita.set_defaults(handler=cmd_morita)
    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr
    )
    try:
        status = args.handler(args)
    except OSError as e:
        log.error(f"Cannot read input: {e}")
        status = EXIT_INPUT
    except StarmodError as e:
        log.error(f"{type(e).__name__}: {e}")
        status = EXIT_INPUT
    sys.exit(status)


if __name__ == "__main__":
    main()
