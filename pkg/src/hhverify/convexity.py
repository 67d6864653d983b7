"""Grid-based membership tests for phi-convex, quasi-phi-convex and
log-phi-convex functions along a segment.

Verdicts are certificates on the sampled grid only, hence the
``CERTIFIED_ON_GRID`` name. A ``FALSIFIED`` verdict always carries a witness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .expr import DomainError, as_expr, evaluate
from .segment import PhiSegment, SegmentGrid

PERTURBATION = 1e-9
NON_REAL_TOL = 1e-9
DEFAULT_GRID = 1025
MAX_PAIR_NODES = 129


class ClassKind(str, enum.Enum):
    PHI_CONVEX = "phi_convex"
    QUASI_PHI_CONVEX = "quasi_phi_convex"
    LOG_PHI_CONVEX = "log_phi_convex"


class Verdict(str, enum.Enum):
    CERTIFIED_ON_GRID = "certified_on_grid"
    FALSIFIED = "falsified"


class PositivityError(ValueError):
    pass


class NonRealError(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    u_t: float
    v_t: float
    lam: float
    violation: float


@dataclass
class ConvexityReport:
    kind: ClassKind
    target: str
    verdict: Verdict
    n: int
    slack: float
    witness: Optional[Witness] = None
    mode: str = "endpoint"
    perturbed: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_ON_GRID

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "target": self.target,
            "verdict": self.verdict.value,
            "n": self.n,
            "slack": self.slack,
            "mode": self.mode,
            "perturbed": list(self.perturbed),
            "witness": None if self.witness is None else {
                "u_t": self.witness.u_t, "v_t": self.witness.v_t,
                "lam": self.witness.lam, "violation": self.witness.violation},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvexityReport":
        w = d.get("witness")
        return cls(
            kind=ClassKind(d["kind"]),
            target=d["target"],
            verdict=Verdict(d["verdict"]),
            n=int(d["n"]),
            slack=float(d["slack"]),
            witness=None if w is None else Witness(float(w["u_t"]), float(w["v_t"]),
                                                   float(w["lam"]), float(w["violation"])),
            mode=d.get("mode", "endpoint"),
            perturbed=[float(t) for t in d.get("perturbed", [])],
        )


def default_slack(values) -> float:
    return 1e-9 * (1.0 + float(np.max(np.abs(values))))


def _bound(kind: ClassKind, gu, gv, lam):
    if kind is ClassKind.PHI_CONVEX:
        return (1.0 - lam) * gu + lam * gv
    if kind is ClassKind.QUASI_PHI_CONVEX:
        return np.maximum(gu, gv)
    with np.errstate(divide="ignore"):
        return np.exp((1.0 - lam) * np.log(gu) + lam * np.log(gv))


def sample_path(fn: Callable, t: np.ndarray) -> tuple[np.ndarray, list]:
    """Evaluate ``fn`` on ``t``; nodes raising DomainError are nudged by 1e-9
    toward the interior and the nudged t-values are returned alongside."""
    try:
        return np.asarray(fn(t), dtype=float), []
    except DomainError:
        pass
    out = np.empty(t.shape)
    moved = []
    for i, ti in enumerate(t):
        try:
            out[i] = float(fn(np.array([ti]))[0])
        except DomainError:
            tp = ti + PERTURBATION if ti + PERTURBATION <= 1.0 else ti - PERTURBATION
            out[i] = float(fn(np.array([tp]))[0])
            moved.append(float(tp))
    return out, moved


def check_membership(g, kind: ClassKind, grid: SegmentGrid, slack: Optional[float] = None, *,
                     v_value: Optional[float] = None, exhaustive: bool = False,
                     target: str = "g", max_pair_nodes: int = MAX_PAIR_NODES,
                     perturbed=()) -> ConvexityReport:
    """Test the defining inequality of ``kind`` for the sampled function ``g``.

    ``g`` is either a callable on an array of t-values or the array of its
    samples on ``grid.t``. In the default endpoint mode the pair is
    (u, v) = (t=0, generator), with g(v) given by ``v_value`` (defaults to
    g(1)), and lambda runs over every grid node. With ``exhaustive=True``
    every ordered pair of nodes on a subgrid of at most ``max_pair_nodes``
    nodes is also tested, which amounts to the ordinary 1-D class test of
    t -> g(t).
    """
    kind = ClassKind(kind)
    t = grid.t
    moved = list(perturbed)
    if callable(g):
        vals, extra = sample_path(g, t)
        moved += extra
    else:
        vals = np.asarray(g, dtype=float)
        if vals.shape != t.shape:
            raise ValueError(f"expected {t.size} samples, got {vals.shape}")
    gv = float(vals[-1]) if v_value is None else float(v_value)
    if not np.all(np.isfinite(vals)) or not np.isfinite(gv):
        raise ValueError(f"non-finite samples of {target}")
    if kind is ClassKind.LOG_PHI_CONVEX and (np.any(vals <= 0) or gv <= 0):
        raise PositivityError(f"log-phi-convexity needs {target} > 0 on the path")
    if slack is None:
        slack = default_slack(np.append(vals, gv))

    viol = vals - _bound(kind, vals[0], gv, t)
    j = int(np.argmax(viol))
    best = (float(viol[j]), 0.0, 1.0, float(t[j]))
    mode = "endpoint"

    if exhaustive:
        mode = "exhaustive"
        n = t.size
        stride = max(1, -(-(n - 1) // (max_pair_nodes - 1)))
        idx = np.arange(0, n, stride)
        if idx[-1] != n - 1:
            idx = np.append(idx, n - 1)
        ts, gs = t[idx], vals[idx]
        i3, j3, k3 = np.meshgrid(np.arange(ts.size), np.arange(ts.size), np.arange(ts.size),
                                 indexing="ij")
        mask = (i3 < j3) & (j3 < k3)
        i3, j3, k3 = i3[mask], j3[mask], k3[mask]
        lam = (ts[j3] - ts[i3]) / (ts[k3] - ts[i3])
        pv = gs[j3] - _bound(kind, gs[i3], gs[k3], lam)
        if pv.size:
            top = float(pv.max())
            if top >= best[0]:
                hits = np.flatnonzero(pv == top)
                # lexicographically smallest (u, v, lambda) among the maximal violations
                order = np.lexsort((j3[hits], k3[hits], i3[hits]))
                h = hits[order[0]]
                cand = (top, float(ts[i3[h]]), float(ts[k3[h]]), float(lam[h]))
                if top > best[0] or cand[1:] < best[1:]:
                    best = cand

    violation, u_t, v_t, lam_w = best
    if violation > slack:
        return ConvexityReport(kind, target, Verdict.FALSIFIED, t.size, slack,
                               Witness(u_t, v_t, lam_w, violation), mode, moved)
    return ConvexityReport(kind, target, Verdict.CERTIFIED_ON_GRID, t.size, slack, None, mode, moved)


def real_path_values(f, s: PhiSegment, t: np.ndarray) -> np.ndarray:
    """f along the path as real numbers; NonRealError if any imaginary part exceeds 1e-9."""
    f = as_expr(f)
    z = evaluate(f, s.point_at(t))
    if np.any(np.abs(z.imag) > NON_REAL_TOL * (1.0 + np.abs(z.real))):
        raise NonRealError("f is not real-valued along the path")
    return z.real


@dataclass
class ImplicationChain:
    reports: dict
    ordering_holds: bool
    implication_holds: bool
    worst_ordering_gap: float

    def verdicts(self) -> list:
        return [self.reports[k].verdict for k in
                (ClassKind.LOG_PHI_CONVEX, ClassKind.PHI_CONVEX, ClassKind.QUASI_PHI_CONVEX)]


def check_implication_chain(f, s: PhiSegment, grid: Optional[SegmentGrid] = None,
                            slack: Optional[float] = None) -> ImplicationChain:
    """Check geometric <= arithmetic <= max bounds pointwise, and that the
    verdicts respect log-phi-convex => phi-convex => quasi-phi-convex."""
    f = as_expr(f)
    grid = grid or SegmentGrid(s, DEFAULT_GRID)
    vals = real_path_values(f, s, grid.t)
    fb = evaluate(f, s.b)
    if abs(fb.imag) > NON_REAL_TOL * (1.0 + abs(fb.real)):
        raise NonRealError("f(b) is not real")
    gv = fb.real
    if np.any(vals <= 0) or gv <= 0:
        raise PositivityError("implication chain needs f > 0 on the path and at b")
    if slack is None:
        slack = default_slack(np.append(vals, gv))
    t = grid.t
    geo = _bound(ClassKind.LOG_PHI_CONVEX, vals[0], gv, t)
    ari = _bound(ClassKind.PHI_CONVEX, vals[0], gv, t)
    mx = _bound(ClassKind.QUASI_PHI_CONVEX, vals[0], gv, t)
    gap = float(max(np.max(geo - ari), np.max(ari - mx)))
    reports = {k: check_membership(vals, k, grid, slack, v_value=gv, target="f")
               for k in ClassKind}
    ok = reports[ClassKind.LOG_PHI_CONVEX].certified <= reports[ClassKind.PHI_CONVEX].certified \
        <= reports[ClassKind.QUASI_PHI_CONVEX].certified
    return ImplicationChain(reports, gap <= slack, ok, gap)
