"""Left- and right-hand sides of the Hermite-Hadamard type bounds on a
rotated segment, the hypothesis gate for each bound, and the dispatcher
that assembles a BoundResult.

All right-hand sides multiply by the modulus b - a of the complex
prefactor e^{i phi}(b - a); |f'| is taken at the real points a and b.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .convexity import (DEFAULT_GRID, NON_REAL_TOL, ClassKind, ConvexityReport, NonRealError,
                        check_membership, real_path_values, sample_path)
from .expr import Expr, as_expr, differentiate, eval_abs_deriv
from .expr import evaluate as eval_expr
from .quadrature import DEFAULT_TOL, segment_mean
from .segment import PhiSegment, SegmentGrid

SLACK_REL = 1e-8


class ParameterError(ValueError):
    pass


class TheoremId(str, enum.Enum):
    CHAIN2 = "chain2"
    TT2 = "tt2"
    TT3 = "tt3"
    TT4 = "tt4"
    TT5 = "tt5"
    TT6 = "tt6"
    Z = "z"
    Z_RELAXED = "z_relaxed"
    QUASI_TRAP = "quasi_trap"
    QUASI_TRAP_HOLDER = "quasi_trap_holder"
    QUASI_MID = "quasi_mid"
    QUASI_MID_HOLDER = "quasi_mid_holder"


class Status(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED_WITH_HYPOTHESIS = "violated_with_hypothesis"
    HYPOTHESIS_FALSIFIED = "hypothesis_falsified"
    DEGENERATE = "degenerate"
    # failure modes recorded by the harness instead of aborting a run
    DOMAIN_ERROR = "domain_error"
    CONVERGENCE_ERROR = "convergence_error"
    NON_REAL = "non_real"
    ERROR = "error"


@dataclass(frozen=True)
class HolderParams:
    p: Optional[float] = None
    q: Optional[float] = None

    def __post_init__(self):
        if self.p is not None and not self.p > 1:
            raise ParameterError(f"Hölder exponent p must exceed 1, got {self.p}")
        if self.q is not None and not self.q >= 1:
            raise ParameterError(f"power-mean exponent q must be >= 1, got {self.q}")

    @property
    def conjugate(self) -> float:
        """p/(p-1)."""
        if self.p is None:
            raise ParameterError("p is required")
        return self.p / (self.p - 1.0)

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q}


def _check_p(p) -> float:
    if p is None or not p > 1:
        raise ParameterError(f"Hölder exponent p must exceed 1, got {p}")
    return float(p)


def _check_q(q) -> float:
    if q is None or not q >= 1:
        raise ParameterError(f"power-mean exponent q must be >= 1, got {q}")
    return float(q)


def _power_sum(weights_a: float, A: float, weights_b: float, B: float, r: float) -> float:
    """(wa*A^r + wb*B^r)^(1/r) without overflowing for large r."""
    m = max(A, B)
    if m == 0.0:
        return 0.0
    return m * (weights_a * (A / m) ** r + weights_b * (B / m) ** r) ** (1.0 / r)


def derivative_ends(f, s: PhiSegment) -> tuple[float, float]:
    """(|f'(a)|, |f'(b)|) at the real points a and b."""
    f = as_expr(f)
    return float(eval_abs_deriv(f, s.a)), float(eval_abs_deriv(f, s.b))


# --- left-hand sides ---------------------------------------------------------


def lhs_trapezoid(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> float:
    f = as_expr(f)
    trap = 0.5 * (eval_expr(f, s.a) + eval_expr(f, s.endpoint()))
    return abs(segment_mean(f, s, tol) - trap)


def lhs_midpoint(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> float:
    f = as_expr(f)
    return abs(segment_mean(f, s, tol) - eval_expr(f, s.midpoint_point()))


# --- right-hand sides --------------------------------------------------------


def rhs_tt2(f, s: PhiSegment) -> float:
    A, B = derivative_ends(f, s)
    return s.length_factor() / 8.0 * (A + B)


def rhs_tt3(f, s: PhiSegment, p: float) -> float:
    p = _check_p(p)
    A, B = derivative_ends(f, s)
    r = p / (p - 1.0)
    return s.length_factor() / (2.0 * (p + 1.0) ** (1.0 / p)) * _power_sum(0.5, A, 0.5, B, r)


def rhs_tt4(f, s: PhiSegment) -> float:
    # same constant as rhs_tt2; it gates the midpoint side instead
    A, B = derivative_ends(f, s)
    return s.length_factor() / 8.0 * (A + B)


def rhs_tt5(f, s: PhiSegment, p: float) -> float:
    p = _check_p(p)
    A, B = derivative_ends(f, s)
    r = p / (p - 1.0)
    c = s.length_factor() / 16.0 * (4.0 / (p + 1.0)) ** (1.0 / p)
    return c * (_power_sum(3.0, A, 1.0, B, r) + _power_sum(1.0, A, 3.0, B, r))


def rhs_tt6(f, s: PhiSegment, p: float) -> float:
    p = _check_p(p)
    A, B = derivative_ends(f, s)
    return s.length_factor() / 4.0 * (4.0 / (p + 1.0)) ** (1.0 / p) * (A + B)


def rhs_tt6_proof_constant(f, s: PhiSegment, p: float) -> float:
    """The intermediate (3^{(p-1)/p} + 1)/16 form reached before rounding that factor up to 4/16."""
    p = _check_p(p)
    A, B = derivative_ends(f, s)
    return (s.length_factor() / 16.0 * (3.0 ** ((p - 1.0) / p) + 1.0)
            * (4.0 / (p + 1.0)) ** (1.0 / p) * (A + B))


def rhs_z(f, s: PhiSegment, q: float) -> float:
    q = _check_q(q)
    A, B = derivative_ends(f, s)
    if q == 1.0:
        # the two weighted means sum to A + B; use it directly so this coincides with rhs_tt2
        return s.length_factor() / 8.0 * (A + B)
    return s.length_factor() / 8.0 * (_power_sum(2 / 3, A, 1 / 3, B, q)
                                      + _power_sum(1 / 3, A, 2 / 3, B, q))


def rhs_z_relaxed(f, s: PhiSegment, q: float) -> float:
    q = _check_q(q)
    A, B = derivative_ends(f, s)
    return s.length_factor() / 8.0 * (2.0 ** (1.0 / q) + 1.0) / 3.0 ** (1.0 / q) * (A + B)


def rhs_quasi(f, s: PhiSegment, kind: str = "trapezoid") -> float:
    if kind not in ("trapezoid", "midpoint"):
        raise ParameterError(f"kind must be 'trapezoid' or 'midpoint', got {kind!r}")
    A, B = derivative_ends(f, s)
    return s.length_factor() / 4.0 * max(A, B)


def rhs_quasi_holder(f, s: PhiSegment, p: float, kind: str = "trapezoid") -> float:
    if kind not in ("trapezoid", "midpoint"):
        raise ParameterError(f"kind must be 'trapezoid' or 'midpoint', got {kind!r}")
    p = _check_p(p)
    A, B = derivative_ends(f, s)
    # [max(A^r, B^r)]^(1/r) == max(A, B) for r > 0
    return s.length_factor() / (2.0 * (p + 1.0) ** (1.0 / p)) * max(A, B)


# --- theorem table -----------------------------------------------------------


@dataclass(frozen=True)
class TheoremInfo:
    id: TheoremId
    side: str  # "trapezoid" | "midpoint" | "chain"
    hypothesis: ClassKind
    exponent: str  # "1" | "p/(p-1)" | "q" | "f"
    needs: tuple
    formula: str
    summary: str


THEOREMS = {
    TheoremId.CHAIN2: TheoremInfo(
        TheoremId.CHAIN2, "chain", ClassKind.PHI_CONVEX, "f", (),
        "f(a + e^{iφ}(b−a)/2) <= mean <= [f(a)+f(a+e^{iφ}(b−a))]/2 <= [f(a)+f(b)]/2",
        "Hadamard chain for f phi-convex along the segment; the last link also needs "
        "f(a+e^{iφ}(b−a)) <= f(b)."),
    TheoremId.TT2: TheoremInfo(
        TheoremId.TT2, "trapezoid", ClassKind.PHI_CONVEX, "1", (),
        "|mean − [f(a)+f(a+e^{iφ}(b−a))]/2| <= (b−a)/8 (|f'(a)|+|f'(b)|)",
        "Trapezoid bound when |f'| is phi-convex."),
    TheoremId.TT3: TheoremInfo(
        TheoremId.TT3, "trapezoid", ClassKind.PHI_CONVEX, "p/(p-1)", ("p",),
        "|mean − [f(a)+f(a+e^{iφ}(b−a))]/2| <= (b−a)/(2 (p+1)^(1/p)) "
        "((|f'(a)|^(p/(p−1)) + |f'(b)|^(p/(p−1)))/2)^((p−1)/p)",
        "Hölder trapezoid bound when |f'|^(p/(p−1)) is phi-convex, p > 1."),
    TheoremId.TT4: TheoremInfo(
        TheoremId.TT4, "midpoint", ClassKind.PHI_CONVEX, "1", (),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/8 (|f'(a)|+|f'(b)|)",
        "Midpoint bound when |f'| is phi-convex."),
    TheoremId.TT5: TheoremInfo(
        TheoremId.TT5, "midpoint", ClassKind.PHI_CONVEX, "p/(p-1)", ("p",),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/16 (4/(p+1))^(1/p) "
        "[(3|f'(a)|^(p/(p−1)) + |f'(b)|^(p/(p−1)))^((p−1)/p) "
        "+ (|f'(a)|^(p/(p−1)) + 3|f'(b)|^(p/(p−1)))^((p−1)/p)]",
        "Hölder midpoint bound when |f'|^(p/(p−1)) is phi-convex, p > 1."),
    TheoremId.TT6: TheoremInfo(
        TheoremId.TT6, "midpoint", ClassKind.PHI_CONVEX, "p/(p-1)", ("p",),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/4 (4/(p+1))^(1/p) (|f'(a)|+|f'(b)|)",
        "Relaxation of the Hölder midpoint bound via power-sum subadditivity, p > 1."),
    TheoremId.Z: TheoremInfo(
        TheoremId.Z, "midpoint", ClassKind.PHI_CONVEX, "q", ("q",),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/8 [((2|f'(a)|^q + |f'(b)|^q)/3)^(1/q) "
        "+ ((|f'(a)|^q + 2|f'(b)|^q)/3)^(1/q)]",
        "Power-mean midpoint bound when |f'|^q is phi-convex, q ≥ 1."),
    TheoremId.Z_RELAXED: TheoremInfo(
        TheoremId.Z_RELAXED, "midpoint", ClassKind.PHI_CONVEX, "q", ("q",),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/8 ((2^(1/q)+1)/3^(1/q)) (|f'(a)|+|f'(b)|)",
        "Relaxation of the power-mean midpoint bound, q ≥ 1."),
    TheoremId.QUASI_TRAP: TheoremInfo(
        TheoremId.QUASI_TRAP, "trapezoid", ClassKind.QUASI_PHI_CONVEX, "1", (),
        "|mean − [f(a)+f(a+e^{iφ}(b−a))]/2| <= (b−a)/4 max{|f'(a)|, |f'(b)|}",
        "Trapezoid bound when |f'| is quasi-phi-convex."),
    TheoremId.QUASI_TRAP_HOLDER: TheoremInfo(
        TheoremId.QUASI_TRAP_HOLDER, "trapezoid", ClassKind.QUASI_PHI_CONVEX, "p/(p-1)", ("p",),
        "|mean − [f(a)+f(a+e^{iφ}(b−a))]/2| <= (b−a)/(2 (p+1)^(1/p)) "
        "[max{|f'(a)|^(p/(p−1)), |f'(b)|^(p/(p−1))}]^((p−1)/p)",
        "Hölder trapezoid bound when |f'|^(p/(p−1)) is quasi-phi-convex, p > 1."),
    TheoremId.QUASI_MID: TheoremInfo(
        TheoremId.QUASI_MID, "midpoint", ClassKind.QUASI_PHI_CONVEX, "1", (),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/4 max{|f'(a)|, |f'(b)|}",
        "Midpoint bound when |f'| is quasi-phi-convex."),
    TheoremId.QUASI_MID_HOLDER: TheoremInfo(
        TheoremId.QUASI_MID_HOLDER, "midpoint", ClassKind.QUASI_PHI_CONVEX, "p/(p-1)", ("p",),
        "|mean − f(a + e^{iφ}(b−a)/2)| <= (b−a)/(2 (p+1)^(1/p)) "
        "[max{|f'(a)|^(p/(p−1)), |f'(b)|^(p/(p−1))}]^((p−1)/p)",
        "Hölder midpoint bound when |f'|^(p/(p−1)) is quasi-phi-convex, p > 1."),
}

# The Hölder quasi midpoint bound is argued through the trapezoid identity but
# states the midpoint form; its results carry this note.
QUASI_MID_HOLDER_NOTE = "midpoint form evaluated; derivation invokes the trapezoid identity"


def explain(theorem) -> str:
    """Human-readable description of a theorem id: statement, hypothesis and parameters."""
    try:
        info = THEOREMS[TheoremId(theorem)]
    except ValueError:
        raise KeyError(f"unknown theorem id {theorem!r}; known: "
                       f"{', '.join(t.value for t in TheoremId)}") from None
    target = {"f": "f", "1": "|f'|", "p/(p-1)": "|f'|^(p/(p−1))", "q": "|f'|^q"}[info.exponent]
    lines = [
        f"{info.id.value}: {info.summary}",
        f"  bound:      {info.formula}",
        f"  hypothesis: {target} is {info.hypothesis.value.replace('_', '-')} along "
        f"t -> a + t e^{{iφ}}(b−a), tested against the generator point b",
        "  mean:       ∫_0^1 f(a + t e^{iφ}(b−a)) dt",
    ]
    if "p" in info.needs:
        lines.append("  parameters: p > 1 (Hölder exponent; conjugate p/(p−1))")
    if "q" in info.needs:
        lines.append("  parameters: q ≥ 1 (power-mean exponent)")
    lines.append("  prefactor e^{iφ}(b−a) enters through its modulus b−a")
    return "\n".join(lines)


# --- Hadamard chain ----------------------------------------------------------


@dataclass
class HadamardChain:
    f_mid: float
    mean: float
    trapezoid: float
    generator_average: float
    links: tuple  # (mid <= mean, mean <= trapezoid, trapezoid <= generator_average)
    endpoint_below_generator: bool
    positive: bool
    hypothesis: Optional[ConvexityReport] = None

    @property
    def values(self) -> tuple:
        return (self.f_mid, self.mean, self.trapezoid, self.generator_average)

    @property
    def holds(self) -> bool:
        gated = self.links[:2] + ((self.links[2],) if self.endpoint_below_generator else ())
        return all(gated)


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > NON_REAL_TOL * (1.0 + abs(z.real)):
        raise NonRealError(f"{what} is not real: {z}")
    return z.real


def _link_slack(x: float) -> float:
    return SLACK_REL * (1.0 + abs(x))


def check_hadamard_chain(f, s: PhiSegment, tol: float = DEFAULT_TOL,
                         grid: Union[int, SegmentGrid] = DEFAULT_GRID) -> HadamardChain:
    f = as_expr(f)
    grid = grid if isinstance(grid, SegmentGrid) else SegmentGrid(s, grid)
    path = real_path_values(f, s, grid.t)
    hyp = check_membership(path, ClassKind.PHI_CONVEX, grid, exhaustive=True, target="f")
    fa = _real(eval_expr(f, s.a), "f(a)")
    fe = _real(eval_expr(f, s.endpoint()), "f(endpoint)")
    fb = _real(eval_expr(f, s.b), "f(b)")
    mid = _real(eval_expr(f, s.midpoint_point()), "f(midpoint)")
    mean = _real(segment_mean(f, s, tol), "mean")
    trap = 0.5 * (fa + fe)
    gen = 0.5 * (fa + fb)
    links = (mid <= mean + _link_slack(mean),
             mean <= trap + _link_slack(trap),
             trap <= gen + _link_slack(gen))
    return HadamardChain(mid, mean, trap, gen, links, fe <= fb + _link_slack(fb),
                         bool(np.all(path > 0) and fb > 0), hyp)


# --- hypothesis gate ---------------------------------------------------------


def _exponent(info: TheoremInfo, params: HolderParams) -> float:
    if info.exponent == "1":
        return 1.0
    if info.exponent == "p/(p-1)":
        return params.conjugate
    return _check_q(params.q)


def hypothesis_report(theorem, f, s: PhiSegment, params: Optional[HolderParams] = None,
                      grid: Union[int, SegmentGrid] = DEFAULT_GRID) -> ConvexityReport:
    """Membership test of |f'|^r (or f itself for the chain) along the segment,
    with the generator b as the far point of the defining inequality."""
    info = THEOREMS[TheoremId(theorem)]
    params = params or HolderParams()
    f = as_expr(f)
    grid = grid if isinstance(grid, SegmentGrid) else SegmentGrid(s, grid)
    if info.exponent == "f":
        return check_membership(real_path_values(f, s, grid.t), info.hypothesis, grid,
                                exhaustive=True, target="f")
    r = _exponent(info, params)
    df = differentiate(f)
    h, moved = sample_path(lambda t: np.abs(eval_expr(df, s.point_at(t))), grid.t)
    hb = float(eval_abs_deriv(f, s.b))
    # |f'|^r rescaled by max^r so that large r cannot overflow; class membership is scale invariant
    m = max(float(h.max()), hb)
    if m > 0:
        g, gb = (h / m) ** r, (hb / m) ** r
    else:
        g, gb = h, hb
    target = "|f'|" if r == 1.0 else f"|f'|^{r:.17g}"
    return check_membership(g, info.hypothesis, grid, v_value=gb, target=target, perturbed=moved)


# --- results -----------------------------------------------------------------


@dataclass
class BoundResult:
    theorem: TheoremId
    lhs: float
    rhs: float
    status: Status
    hypothesis: Optional[ConvexityReport] = None
    segment: Optional[PhiSegment] = None
    params: HolderParams = field(default_factory=HolderParams)
    flags: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    aux: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def sharpness(self) -> Optional[float]:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return 0.0 if self.lhs == 0 else None

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "sharpness": self.sharpness,
            "status": self.status.value,
            "hypothesis": None if self.hypothesis is None else self.hypothesis.to_dict(),
            "segment": None if self.segment is None else self.segment.to_dict(),
            "params": self.params.to_dict(),
            "flags": list(self.flags),
            "notes": list(self.notes),
            "aux": dict(self.aux),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundResult":
        return cls(
            theorem=TheoremId(d["theorem"]),
            lhs=float(d["lhs"]),
            rhs=float(d["rhs"]),
            status=Status(d["status"]),
            hypothesis=None if d.get("hypothesis") is None else ConvexityReport.from_dict(d["hypothesis"]),
            segment=None if d.get("segment") is None else PhiSegment.from_dict(d["segment"]),
            params=HolderParams(**d.get("params", {})),
            flags=list(d.get("flags", [])),
            notes=list(d.get("notes", [])),
            aux=dict(d.get("aux", {})),
        )


def judge(lhs: float, rhs: float, certified: bool) -> Status:
    if not certified:
        return Status.HYPOTHESIS_FALSIFIED
    slack = SLACK_REL * (1.0 + rhs)
    if rhs == 0.0 and lhs <= slack:
        return Status.DEGENERATE
    if lhs <= rhs + slack:
        return Status.HOLDS
    return Status.VIOLATED_WITH_HYPOTHESIS


def _rhs(info: TheoremInfo, f: Expr, s: PhiSegment, params: HolderParams) -> float:
    tid = info.id
    if tid is TheoremId.TT2:
        return rhs_tt2(f, s)
    if tid is TheoremId.TT3:
        return rhs_tt3(f, s, params.p)
    if tid is TheoremId.TT4:
        return rhs_tt4(f, s)
    if tid is TheoremId.TT5:
        return rhs_tt5(f, s, params.p)
    if tid is TheoremId.TT6:
        return rhs_tt6(f, s, params.p)
    if tid is TheoremId.Z:
        return rhs_z(f, s, params.q)
    if tid is TheoremId.Z_RELAXED:
        return rhs_z_relaxed(f, s, params.q)
    if tid in (TheoremId.QUASI_TRAP, TheoremId.QUASI_MID):
        return rhs_quasi(f, s, info.side)
    return rhs_quasi_holder(f, s, params.p, info.side)


def _codomain_positive(f: Expr, grid: SegmentGrid) -> bool:
    try:
        z = eval_expr(f, grid.points)
    except ArithmeticError:
        return False
    return bool(np.all(np.abs(z.imag) <= 1e-9 * (1 + np.abs(z.real))) and np.all(z.real > 0))


def evaluate(theorem, f, s: PhiSegment, params: Optional[HolderParams] = None,
             tol: float = DEFAULT_TOL, grid: Union[int, SegmentGrid] = DEFAULT_GRID) -> BoundResult:
    """Run the hypothesis gate, both sides of the bound, and classify the instance.

    Failed hypotheses still get both sides evaluated; the status then reads
    HYPOTHESIS_FALSIFIED whatever the comparison says.
    """
    info = THEOREMS[TheoremId(theorem)]
    params = params or HolderParams()
    if "p" in info.needs:
        _check_p(params.p)
    if "q" in info.needs:
        _check_q(params.q)
    f = as_expr(f)
    grid = grid if isinstance(grid, SegmentGrid) else SegmentGrid(s, grid)
    flags = []
    if not s.in_theorem_range:
        flags.append("phi_outside_theorem_range")
    if not _codomain_positive(f, grid):
        flags.append("codomain_not_positive")

    if info.side == "chain":
        chain = check_hadamard_chain(f, s, tol, grid)
        if not chain.endpoint_below_generator:
            flags.append("endpoint_exceeds_generator")
        aux = {"f_mid": chain.f_mid, "mean": chain.mean, "trapezoid": chain.trapezoid,
               "generator_average": chain.generator_average,
               "links": [bool(x) for x in chain.links]}
        if not chain.hypothesis.certified:
            status = Status.HYPOTHESIS_FALSIFIED
        elif chain.holds:
            status = Status.HOLDS
        else:
            status = Status.VIOLATED_WITH_HYPOTHESIS
        return BoundResult(info.id, chain.f_mid, chain.trapezoid, status, chain.hypothesis, s,
                           params, flags, [], aux)

    hyp = hypothesis_report(info.id, f, s, params, grid)
    lhs = lhs_trapezoid(f, s, tol) if info.side == "trapezoid" else lhs_midpoint(f, s, tol)
    rhs = _rhs(info, f, s, params)
    notes, aux = [], {}
    if info.id is TheoremId.QUASI_MID_HOLDER:
        notes.append(QUASI_MID_HOLDER_NOTE)
    if info.id is TheoremId.TT6:
        aux["rhs_proof_constant"] = rhs_tt6_proof_constant(f, s, params.p)
    return BoundResult(info.id, lhs, rhs, judge(lhs, rhs, hyp.certified), hyp, s, params,
                       flags, notes, aux)
