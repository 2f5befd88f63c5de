"""Command-line entry point: ``wucb simulate | preset | bounds``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bounds import bound_report
from .config import parse_config
from .errors import ConfigValidationError, SchemaError, WucbError
from .experiments import DEFAULT_HORIZON, DEFAULT_PATHS, PRESETS, _jsonable, run_config, run_preset

log = logging.getLogger("wucb")

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own status
EXIT_SCHEMA = 3
EXIT_VALIDATION = 4
EXIT_DOMAIN = 5
EXIT_IO = 6


def _read_config(path: str):
    return parse_config(Path(path).read_text())


def cmd_simulate(args) -> int:
    cfg = _read_config(args.config)
    curves, summary = run_config(cfg, args.out_dir)
    log.info("wrote %s and %s", curves, summary)
    return EXIT_OK


def cmd_preset(args) -> int:
    out = run_preset(args.name, args.seed, args.out_dir, horizon=args.horizon, paths=args.paths,
                     workers=args.workers)
    for f in out["files"]:
        log.info("wrote %s", f)
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = _read_config(args.config)
    report = bound_report(cfg.instance.build(), cfg.run.horizon, cfg.bounds.alpha, cfg.bounds.C)
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wucb", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an experiment described by a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None, help="directory the configured output paths are relative to")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preset", help="reproduce one of the synthetic figure experiments")
    p.add_argument("--name", required=True, choices=PRESETS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("bounds", help="print bound evaluations for a config's instance as JSON")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConfigValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except WucbError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
