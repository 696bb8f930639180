"""``bench`` command line entry point.

    bench run --config run.json
    bench fixtures --out data/ --seed 7 [--noise 1.5]
    bench report --cells bench-out/cells.json --format markdown

Exit codes: 0 success, 1 configuration error, 2 some cells failed.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .dataio import SOURCE_ROW_COUNTS, make_fixture
from .errors import ConfigError, SleepBenchError
from .tensor import Rng

log = logging.getLogger("sleepbench")

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _run(args) -> int:
    try:
        cfg = harness.load_config(args.config)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    cells = harness.run_benchmark(cfg)
    out = harness.write_reports(cells, cfg, args.out)
    failed = [c for c in cells if not c.ok]
    for c in failed:
        log.warning("cell %s/%s failed: %s", c.dataset, c.classifier, c.error)
    log.info("wrote reports to %s", out)
    return EXIT_PARTIAL if failed else EXIT_OK


def _fixtures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for dataset_id, rows in SOURCE_ROW_COUNTS.items():
        text = make_fixture(dataset_id, rows, Rng((args.seed, dataset_id)), noise=args.noise)
        path = out / f"{dataset_id}.csv"
        path.write_text(text, encoding="utf-8")
        log.info("wrote %s (%d rows)", path, rows)
    return EXIT_OK


def _report(args) -> int:
    try:
        cells = harness.cells_from_json(Path(args.cells).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        log.error("cannot read cells file: %s", exc)
        return EXIT_CONFIG
    try:
        if any(c.classifier == "logreg" for c in cells):
            sys.stdout.write(harness.emit_table1(cells, args.format))
            sys.stdout.write("\n")
        sys.stdout.write(harness.emit_table2(cells, args.format))
    except SleepBenchError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    return EXIT_PARTIAL if any(not c.ok for c in cells) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description="Sleep-quality classifier benchmark")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the benchmark grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config's output directory")
    p.set_defaults(func=_run)

    p = sub.add_parser("fixtures", help="write synthetic stand-ins for the three datasets")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0,
                   help=f"label noise (0 = separable, {harness.MODERATE_NOISE} = moderate)")
    p.set_defaults(func=_fixtures)

    p = sub.add_parser("report", help="render tables from a cells.json file")
    p.add_argument("--cells", required=True)
    p.add_argument("--format", choices=harness.FORMATS, default="markdown")
    p.set_defaults(func=_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
