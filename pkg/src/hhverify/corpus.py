"""Built-in corpus of test functions and the segment sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import Expr, parse
from .segment import PhiSegment

PHI_FIXED = (0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    expr: str
    note: str = ""
    # classes |f'| is meant to belong to on real segments inside the safe ranges
    intended: tuple = ()
    a_range: Optional[tuple] = None
    length_range: Optional[tuple] = None
    phis: Optional[tuple] = None
    singularities: tuple = ()
    positive: bool = False
    # holomorphic on the safe region, so the integration-by-parts identities apply off the real axis
    smooth: bool = True

    @property
    def parsed(self) -> Expr:
        return parse(self.expr)

    def to_dict(self) -> dict:
        return {
            "id": self.id, "expr": self.expr, "note": self.note,
            "intended": list(self.intended),
            "a_range": None if self.a_range is None else list(self.a_range),
            "length_range": None if self.length_range is None else list(self.length_range),
            "phis": None if self.phis is None else list(self.phis),
            "singularities": [[complex(z).real, complex(z).imag] for z in self.singularities],
            "positive": self.positive, "smooth": self.smooth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusEntry":
        def pair(v):
            return None if v is None else (float(v[0]), float(v[1]))
        sing = []
        for z in d.get("singularities", []):
            sing.append(complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z))
        entry = cls(
            id=str(d["id"]), expr=str(d["expr"]), note=d.get("note", ""),
            intended=tuple(d.get("intended", ())),
            a_range=pair(d.get("a_range")), length_range=pair(d.get("length_range")),
            phis=None if d.get("phis") is None else tuple(float(p) for p in d["phis"]),
            singularities=tuple(sing), positive=bool(d.get("positive", False)),
            smooth=bool(d.get("smooth", True)),
        )
        entry.parsed  # fail early on bad expressions
        return entry


CORPUS = (
    CorpusEntry("square", "x^2", "|f'| = 2|x| is convex", ("phi_convex", "quasi_phi_convex")),
    CorpusEntry("square_plus_one", "x^2 + 1", "positive convex", ("phi_convex",), positive=True),
    CorpusEntry("exp", "exp(x)", "log-linear", ("phi_convex", "quasi_phi_convex"), positive=True),
    CorpusEntry("exp_neg", "exp(-x)", "decreasing |f'|", ("phi_convex", "quasi_phi_convex"),
                positive=True),
    CorpusEntry("cube", "x^3", "|f'| = 3x^2", ("phi_convex",)),
    CorpusEntry("linear", "2*x + 1", "both rules exact", ("phi_convex", "quasi_phi_convex")),
    CorpusEntry("constant", "2", "zero derivative", ("phi_convex", "quasi_phi_convex"),
                positive=True),
    CorpusEntry("double_well", "x^4 - 2*x^2", "|f'| not convex near the wells"),
    CorpusEntry("sin", "sin(x)", "oscillatory"),
    CorpusEntry("cos", "cos(x)", "oscillatory"),
    CorpusEntry("log", "ln(x)", "pole of f' at 0", a_range=(0.2, 2.0), singularities=(0j,)),
    CorpusEntry("sqrt", "sqrt(x)", "branch point at 0", a_range=(0.2, 2.0), singularities=(0j,),
                positive=True),
    CorpusEntry("reciprocal", "1/x", "pole at 0", ("phi_convex",), a_range=(0.2, 2.0),
                singularities=(0j,), positive=True),
    # complex poles at i*pi/4*(2k+1) keep it on the real axis
    CorpusEntry("logistic", "1/(1 + exp(-4*x))", "smooth step; |f'| is a bump",
                phis=(0.0,), positive=True),
    CorpusEntry("neg_abs", "-abs(x)", "not convex, phi-convex for phi in {0, pi} pairs",
                ("phi_convex", "quasi_phi_convex"), phis=(0.0, math.pi), smooth=False),
)

CORPUS_BY_ID = {e.id: e for e in CORPUS}


@dataclass(frozen=True)
class SegmentSampler:
    a_range: tuple = (-2.0, 2.0)
    length_range: tuple = (0.1, 3.0)
    phi_fixed: tuple = PHI_FIXED
    phi_uniform_fraction: float = 0.5
    phi_range: tuple = (0.0, math.pi / 2)

    def draw(self, rng: np.random.Generator, entry: Optional[CorpusEntry] = None) -> PhiSegment:
        # always consume the same number of variates so streams stay aligned
        u = rng.random(4)
        lo, hi = entry.a_range if entry is not None and entry.a_range else self.a_range
        a = lo + (hi - lo) * u[0]
        lo, hi = (entry.length_range if entry is not None and entry.length_range
                  else self.length_range)
        length = lo + (hi - lo) * u[1]
        if entry is not None and entry.phis:
            phi = entry.phis[min(int(u[2] * len(entry.phis)), len(entry.phis) - 1)]
        elif u[2] < self.phi_uniform_fraction or not self.phi_fixed:
            phi = self.phi_range[0] + (self.phi_range[1] - self.phi_range[0]) * u[3]
        else:
            phi = self.phi_fixed[min(int(u[3] * len(self.phi_fixed)), len(self.phi_fixed) - 1)]
        return PhiSegment(float(a), float(a + length), float(phi))

    def to_dict(self) -> dict:
        return {"a": list(self.a_range), "length": list(self.length_range),
                "phi_fixed": list(self.phi_fixed),
                "phi_uniform_fraction": self.phi_uniform_fraction,
                "phi_range": list(self.phi_range)}


def hits_singularity(entry: CorpusEntry, s: PhiSegment) -> bool:
    """True when a recorded singular point lies on the segment (to 1e-9 relative)."""
    w = s.direction
    for z in entry.singularities:
        t = ((complex(z) - s.a) / w).real
        t = min(max(t, 0.0), 1.0)
        if abs(s.a + t * w - complex(z)) <= 1e-9 * (1.0 + abs(w)):
            return True
    return False
