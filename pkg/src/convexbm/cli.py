"""Command-line driver: ``convexbm <experiment> [--config cfg.json] [--out dir] ...``.

The exit code is 0 exactly when every inequality check of the run passes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, run

log = logging.getLogger("convexbm")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convexbm", description=__doc__.splitlines()[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("--seed", type=int, help="root seed (unsigned 64-bit)")
    p.add_argument("--out", help="output directory for the manifest and CSV table")
    p.add_argument("--threads", type=int, help="worker processes for independent cells")
    p.add_argument("--samples", type=int, help="directions / samples per cell")
    p.add_argument("--restarts", type=int, help="restarts of the distance search")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> ExperimentConfig:
    doc = {"experiment": args.experiment}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc.update(json.load(fh))
        if doc["experiment"] != args.experiment:
            raise SystemExit(f"config is for {doc['experiment']!r}, not {args.experiment!r}")
    for key in ("seed", "out", "threads", "samples", "restarts"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if not 0 <= int(doc.get("seed", 0)) < 2**64:
        raise SystemExit("--seed must fit in an unsigned 64-bit integer")
    return ExperimentConfig.from_dict(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cfg = config_from_args(args)
    man = run(cfg)
    if cfg.out:
        mpath, cpath = man.write(cfg.out)
        log.info("wrote %s and %s", mpath, cpath)
    for name, ok in man.checks.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    for name, val in man.trends.items():
        print(f"[trend] {name}: {val}")
    print(json.dumps(man.fitted, default=str)[:2000])
    print(f"wall time {man.wall_time:.1f}s")
    return 0 if man.passed else 1


if __name__ == "__main__":
    sys.exit(main())
