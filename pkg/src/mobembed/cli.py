"""``mobembed`` command line.

Exit codes: 0 success, 1 validation error, 2 runtime or divergence error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, dump_config, load_config
from .embed import DivergenceError
from .io import ValidationError
from .pipeline import STAGES, format_summary, run_all, run_stage

COMMANDS = STAGES + ("all", "validate", "defaults")


def build_parser():
    parser = argparse.ArgumentParser(prog="mobembed", description="Node mobility from dynamic node embeddings")
    parser.add_argument("command", choices=COMMANDS,
                        help="pipeline stage, 'all', 'validate', or 'defaults' (print the default config)")
    parser.add_argument("--config", help="YAML config file; defaults are the shipped values")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--threads", type=int, help="cap on worker threads")
    parser.add_argument("--min-contact-s", type=float, dest="min_contact_s",
                        help="minimum overlap in seconds for a contact edge")
    parser.add_argument("--dump-ppmi", action="store_true", help="also write embed/ppmi.csv")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="level=%(levelname)s logger=%(name)s msg=%(message)s",
    )
    log = logging.getLogger("mobembed")
    try:
        cfg, problems = load_config(args.config, args.seed, args.out, args.threads)
    except ConfigError as exc:
        for p in exc.problems:
            print(p, file=sys.stderr)
        return 1
    if args.min_contact_s is not None:
        cfg.graphs.min_contact_s = args.min_contact_s
    if args.dump_ppmi:
        cfg.embed.dump_ppmi = True
    problems += cfg.problems()

    if args.command == "defaults":
        sys.stdout.write(dump_config(cfg))
        return 0
    if args.command == "validate":
        for p in problems:
            print(p)
        return 1 if problems else 0
    if problems:
        for p in problems:
            log.error("config: %s", p)
        return 1

    try:
        if args.command == "all":
            print(format_summary(run_all(cfg)))
        else:
            run_stage(args.command, cfg)
    except (ValidationError, ConfigError) as exc:
        log.error("%s", exc)
        return 1
    except (DivergenceError, RuntimeError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
