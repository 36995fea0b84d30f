"""Run every config in configs/ through the runner and print one status line each.

    python scripts/run_all.py [--only wegner,ne] [--out runs]
"""

import argparse
import sys
import time
from pathlib import Path

from msalab.config import load
from msalab.errors import CapacityError, NumericalError, SingularEnergyError, ValidationError
from msalab.runner import run

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", default="", help="comma-separated config stems")
    ap.add_argument("--out", default=str(ROOT / "runs"))
    args = ap.parse_args(argv)
    only = {s for s in args.only.split(",") if s}
    bad = 0
    for path in sorted((ROOT / "configs").glob("*.yaml")):
        if only and path.stem not in only:
            continue
        cfg = load(path)
        t0 = time.perf_counter()
        try:
            res = run(cfg, Path(args.out) / path.stem)
            status = "ok" if res.ok else "verdict FAIL"
        except (ValidationError, CapacityError, NumericalError, SingularEnergyError) as exc:
            status, bad = f"error: {exc}", bad + 1
        print(f"{path.stem:18s} {status:14s} {time.perf_counter() - t0:7.1f}s", flush=True)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
