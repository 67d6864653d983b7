"""Randomized soundness sweep: search for bound violations under a certified hypothesis.

    python scripts/soundness_sweep.py --draws 10000 --seed 2024 --workers 4 --out sweep.json
"""

import argparse
import json
import logging
import time
from dataclasses import asdict, dataclass

from hhverify.harness import SuiteConfig, falsify


@dataclass
class SweepConfig:
    draws: int = 10_000
    seed: int = 2024
    workers: int = 4
    target: str = "violate-with-hypothesis"
    grid: int = 1025


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(SweepConfig()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    ap.add_argument("--out", help="write the canonical JSON report here")
    args = ap.parse_args()
    cfg = SweepConfig(**{k: getattr(args, k) for k in asdict(SweepConfig())})
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    suite = SuiteConfig.from_dict({"corpus": "all", "theorems": "all", "draws": cfg.draws,
                                   "seed": cfg.seed, "workers": cfg.workers, "grid": cfg.grid})
    t0 = time.perf_counter()
    rep = falsify(suite, cfg.target)
    elapsed = time.perf_counter() - t0
    print(json.dumps({"config": asdict(cfg), "seconds": round(elapsed, 2),
                      "draw_counts": rep.draw_counts, "findings": len(rep.records)}, indent=2))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json() + "\n")
    return 2 if rep.violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
