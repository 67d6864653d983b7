"""Adaptive Gauss-Kronrod quadrature along a segment, plus the two
integration-by-parts identities the trapezoid and midpoint bounds rest on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import as_expr, differentiate, evaluate
from .segment import PhiSegment

DEFAULT_TOL = 1e-10
PANEL_BUDGET = 10_000

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (x_1, x_3, x_5, 0, ...)
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: complex
    abs_error_estimate: float
    panels_used: int


def _gk_panels(func, lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * KRONROD_NODES[None, :]
    vals = np.asarray(func(nodes.ravel()), dtype=complex).reshape(nodes.shape)
    with np.errstate(invalid="ignore", over="ignore"):
        k = half * (vals @ KRONROD_WEIGHTS)
        g = half * (vals @ GAUSS_WEIGHTS)
        absk = half * (np.abs(vals) @ KRONROD_WEIGHTS)
    return k, np.abs(k - g), absk


def adaptive_integrate(func, lo: float = 0.0, hi: float = 1.0, tol: float = DEFAULT_TOL,
                       max_panels: int = PANEL_BUDGET) -> QuadResult:
    """Integrate a vectorized ``func`` over [lo, hi] by bisecting G7/K15 panels.

    A panel is accepted once its |K15 - G7| estimate is below its share
    ``tol * width / (hi - lo)`` of the budget; every still-open panel is split
    in one vectorized sweep. The error target is absolute, floored at a few
    ulps of the integral of |func| so it stays attainable for large values.
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    width = hi - lo
    open_lo = np.array([lo])
    open_hi = np.array([hi])
    total = 0j
    err = 0.0
    panels = 0
    floor = 0.0
    while open_lo.size:
        panels += open_lo.size
        if panels > max_panels:
            raise QuadratureError(
                f"no convergence within {max_panels} panels (error estimate {err:.3g})")
        k, e, absk = _gk_panels(func, open_lo, open_hi)
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(absk))):
            raise QuadratureError("integrand is not finite on a quadrature node")
        floor = max(floor, 50 * np.finfo(float).eps * float(np.sum(absk)))
        share = np.maximum(tol, floor) * (open_hi - open_lo) / width
        done = (e <= share) | (open_hi - open_lo <= 1e-15 * width)
        total += np.sum(k[done])
        err += float(np.sum(e[done]))
        mid = 0.5 * (open_lo[~done] + open_hi[~done])
        open_lo, open_hi = (np.concatenate([open_lo[~done], mid]),
                            np.concatenate([mid, open_hi[~done]]))
    return QuadResult(complex(total), err, panels)


def integrate_segment(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> QuadResult:
    """Contour integral of f along the segment: e^{i phi}(b-a) * int_0^1 f(a + t e^{i phi}(b-a)) dt."""
    f = as_expr(f)
    w = s.direction
    res = adaptive_integrate(lambda t: evaluate(f, s.a + t * w), 0.0, 1.0, tol / max(abs(w), 1.0))
    return QuadResult(res.value * w, res.abs_error_estimate * abs(w), res.panels_used)


def segment_mean(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> complex:
    """int_0^1 f(point_at(t)) dt, the integral normalized by e^{i phi}(b-a)."""
    f = as_expr(f)
    w = s.direction
    return adaptive_integrate(lambda t: evaluate(f, s.a + t * w), 0.0, 1.0, tol).value


def trapezoid_identity_sides(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> tuple[complex, complex]:
    """Both sides of the trapezoid integration-by-parts identity:

    int_0^1 (1-2t) f'(z(t)) dt  =  -(f(a) + f(z(1)))/w + (2/w^2) int_a^{z(1)} f(x) dx
    """
    f = as_expr(f)
    df = differentiate(f)
    w = s.direction
    lhs = adaptive_integrate(lambda t: (1 - 2 * t) * evaluate(df, s.a + t * w), 0.0, 1.0, tol).value
    contour = integrate_segment(f, s, tol).value
    rhs = -(evaluate(f, s.a) + evaluate(f, s.endpoint())) / w + 2 * contour / w**2
    return lhs, rhs


def midpoint_identity_sides(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> tuple[complex, complex]:
    """Both sides of the midpoint integration-by-parts identity:

    int_0^{1/2} t f'(z(t)) dt + int_{1/2}^1 (t-1) f'(z(t)) dt  =  f(z(1/2))/w - (1/w^2) int_a^{z(1)} f(x) dx
    """
    f = as_expr(f)
    df = differentiate(f)
    w = s.direction
    left = adaptive_integrate(lambda t: t * evaluate(df, s.a + t * w), 0.0, 0.5, tol / 2).value
    right = adaptive_integrate(lambda t: (t - 1) * evaluate(df, s.a + t * w), 0.5, 1.0, tol / 2).value
    contour = integrate_segment(f, s, tol).value
    rhs = evaluate(f, s.midpoint_point()) / w - contour / w**2
    return left + right, rhs


def check_trapezoid_identity(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> float:
    lhs, rhs = trapezoid_identity_sides(f, s, tol)
    return abs(lhs - rhs)


def check_midpoint_identity(f, s: PhiSegment, tol: float = DEFAULT_TOL) -> float:
    lhs, rhs = midpoint_identity_sides(f, s, tol)
    return abs(lhs - rhs)
