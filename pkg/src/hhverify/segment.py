"""The rotated segment [a, a + e^{i phi}(b - a)] and its t-parameterization."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

PHI_THEOREM_MAX = math.pi / 2


class SegmentError(ValueError):
    pass


@dataclass(frozen=True)
class PhiSegment:
    """Path t -> a + t e^{i phi} (b - a) for t in [0, 1].

    ``b`` is the generator point: it is where the bounds evaluate |f'(b)|,
    and only coincides with the path endpoint when ``phi == 0``.
    """

    a: float
    b: float
    phi: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.b, self.phi)):
            raise SegmentError("segment parameters must be finite")
        if not self.a < self.b:
            raise SegmentError(f"need a < b, got a={self.a}, b={self.b}")
        if not 0.0 <= self.phi <= math.pi:
            raise SegmentError(f"phi must lie in [0, pi], got {self.phi}")

    @cached_property
    def direction(self) -> complex:
        """The displacement e^{i phi}(b - a)."""
        return cmath.rect(self.b - self.a, self.phi)

    @property
    def in_theorem_range(self) -> bool:
        return self.phi <= PHI_THEOREM_MAX

    def point_at(self, t):
        """a + t e^{i phi}(b - a); accepts a scalar or an array of t in [0, 1]."""
        arr = np.asarray(t, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
            raise SegmentError(f"t outside [0, 1]: {t!r}")
        if arr.ndim == 0:
            return complex(self.a + float(arr) * self.direction)
        return self.a + arr * self.direction

    def endpoint(self) -> complex:
        return self.a + self.direction

    def midpoint_point(self) -> complex:
        return self.point_at(0.5)

    def length_factor(self) -> float:
        """|e^{i phi}(b - a)| = b - a."""
        return self.b - self.a

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "phi": self.phi}

    @classmethod
    def from_dict(cls, d: dict) -> "PhiSegment":
        return cls(float(d["a"]), float(d["b"]), float(d.get("phi", 0.0)))


def point_at(s: PhiSegment, t):
    return s.point_at(t)


def length_factor(s: PhiSegment) -> float:
    return s.length_factor()


def midpoint_point(s: PhiSegment) -> complex:
    return s.midpoint_point()


@dataclass(frozen=True)
class SegmentGrid:
    segment: PhiSegment
    n: int = 1025

    def __post_init__(self):
        if self.n < 3:
            raise SegmentError(f"grid needs at least 3 nodes, got {self.n}")

    @cached_property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n)

    @cached_property
    def points(self) -> np.ndarray:
        return self.segment.point_at(self.t)
