"""Command line entry point: ``msalab <experiment> --config FILE``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from .config import EXPERIMENTS, ExperimentConfig, load
from .ensemble import DisorderModel
from .errors import CapacityError, NumericalError, SingularEnergyError, ValidationError
from .runner import run

log = logging.getLogger("msalab")

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="msalab", description="Finite-volume Anderson model experiments.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="YAML config or a manifest.json from an earlier run")
    ap.add_argument("--seed", type=int, help="override model.master_seed")
    ap.add_argument("--workers", type=int, help="trial worker processes (does not change results)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _resolve(args) -> ExperimentConfig:
    cfg = load(args.config) if args.config else ExperimentConfig(args.experiment)
    if cfg.experiment != args.experiment:
        raise ValidationError([f"config is for {cfg.experiment!r}, command asked for {args.experiment!r}"])
    if args.seed is not None:
        cfg.model = DisorderModel(cfg.model.coupling, cfg.model.distribution, args.seed)
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out=args.out)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _resolve(args)
        manifest = run(cfg)
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(f"invalid config: {d}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NumericalError, SingularEnergyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps({"out": cfg.out, "ok": manifest.ok, "files": manifest.files}, indent=2))
    if not manifest.ok and cfg.experiment == "oracle":
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
