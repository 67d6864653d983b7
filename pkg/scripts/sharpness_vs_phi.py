"""LHS, RHS and sharpness of every theorem as the rotation angle phi varies.

Writes CSV rows (corpus_id, theorem, phi, lhs, rhs, sharpness, status) for a
fixed real pair (a, b) and phi on a uniform grid over [0, phi_max].

    python scripts/sharpness_vs_phi.py --a 0.5 --b 2 --steps 25 > sharpness.csv
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from hhverify.bounds import HolderParams, TheoremId
from hhverify.corpus import CORPUS
from hhverify.harness import Task, run_task
from hhverify.segment import PhiSegment


@dataclass
class SharpnessConfig:
    a: float = 0.5
    b: float = 2.0
    steps: int = 25
    phi_max: float = math.pi / 2
    p: float = 2.0
    q: float = 2.0
    grid: int = 513
    tol: float = 1e-10


def rows(cfg: SharpnessConfig):
    params = HolderParams(cfg.p, cfg.q)
    for entry in CORPUS:
        for phi in np.linspace(0.0, cfg.phi_max, cfg.steps):
            if entry.phis is not None and float(phi) not in entry.phis:
                continue
            seg = PhiSegment(cfg.a, cfg.b, float(phi))
            for th in TheoremId:
                rec = run_task(Task(0, entry, th, seg, params, cfg.tol, cfg.grid))
                r = rec.result
                yield (entry.id, th.value, f"{phi:.6f}",
                       "" if r is None else f"{r.lhs:.12g}", "" if r is None else f"{r.rhs:.12g}",
                       "" if r is None or r.sharpness is None else f"{r.sharpness:.6f}",
                       rec.status.value)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(SharpnessConfig):
        ap.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    args = ap.parse_args()
    cfg = SharpnessConfig(**{f.name: getattr(args, f.name) for f in fields(SharpnessConfig)})
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(("corpus_id", "theorem", "phi", "lhs", "rhs", "sharpness", "status"))
    out.writerows(rows(cfg))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
