import numpy as np
import pytest
import sympy

from hhverify.corpus import CORPUS


def sympy_function(text):
    """Independent f and f' built by sympy from the same source text."""
    x = sympy.Symbol("x", real=True)
    expr = sympy.sympify(text.replace("^", "**"),
                         locals={"ln": sympy.log, "abs": sympy.Abs, "x": x, "e": sympy.E})
    f = sympy.lambdify(x, expr, "numpy")
    df = sympy.lambdify(x, sympy.diff(expr, x), "numpy")
    return f, df


def nonsingular_points(entry, rng, n):
    """n real points inside the entry's sampling window, kept away from 0 for abs/ln/sqrt/1/x."""
    lo = entry.a_range[0] if entry.a_range else -2.0
    hi = (entry.a_range[1] if entry.a_range else 2.0) + 3.0
    pts = []
    while len(pts) < n:
        x = lo + (hi - lo) * rng.random()
        if abs(x) > 1e-2:
            pts.append(x)
    return np.array(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


SMOOTH = [e for e in CORPUS if e.smooth]
