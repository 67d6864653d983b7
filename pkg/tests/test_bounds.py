import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hhverify.bounds import (BoundResult, HolderParams, ParameterError, Status, TheoremId,
                             check_hadamard_chain, evaluate, explain, judge, lhs_midpoint,
                             lhs_trapezoid, rhs_quasi, rhs_quasi_holder, rhs_tt2, rhs_tt3, rhs_tt4,
                             rhs_tt5, rhs_tt6, rhs_tt6_proof_constant, rhs_z, rhs_z_relaxed)
from hhverify.corpus import SegmentSampler
from hhverify.expr import parse
from hhverify.segment import PhiSegment

from conftest import SMOOTH, sympy_function

SQ = parse("x^2")
UNIT = PhiSegment(0, 1, 0)


# closed forms for f = x^2 on [0, 1]: |f'(0)| = 0, |f'(1)| = 2
@pytest.mark.parametrize("fn, expected", [
    (lambda: lhs_trapezoid(SQ, UNIT), 1 / 6),
    (lambda: lhs_midpoint(SQ, UNIT), 1 / 12),
    (lambda: rhs_tt2(SQ, UNIT), 1 / 4),
    (lambda: rhs_tt4(SQ, UNIT), 1 / 4),
    (lambda: rhs_tt3(SQ, UNIT, 2), math.sqrt(2) / (2 * math.sqrt(3))),
    (lambda: rhs_tt5(SQ, UNIT, 2), math.sqrt(4 / 3) / 16 * (2 + math.sqrt(12))),
    (lambda: rhs_tt6(SQ, UNIT, 2), math.sqrt(4 / 3) / 2),
    (lambda: rhs_z(SQ, UNIT, 1), 1 / 4),
    (lambda: rhs_z(SQ, UNIT, 2), (math.sqrt(4 / 3) + math.sqrt(8 / 3)) / 8),
    (lambda: rhs_quasi(SQ, UNIT), 1 / 2),
    (lambda: rhs_quasi_holder(SQ, UNIT, 2), 1 / math.sqrt(3)),
])
def test_closed_forms(fn, expected):
    assert fn() == pytest.approx(expected, abs=1e-12)


def test_stated_decimals():
    assert rhs_tt3(SQ, UNIT, 2) == pytest.approx(0.408248, abs=1e-6)
    assert rhs_tt5(SQ, UNIT, 2) == pytest.approx(0.394338, abs=1e-6)
    assert rhs_tt6(SQ, UNIT, 2) == pytest.approx(0.577350, abs=1e-6)


def test_hadamard_chain_for_exp():
    ch = check_hadamard_chain(parse("exp(x)"), UNIT)
    e = math.e
    oracle = (math.exp(0.5), e - 1, (1 + e) / 2, (1 + e) / 2)
    assert np.allclose(ch.values, oracle, atol=1e-9)
    assert all(ch.links) and ch.holds and ch.hypothesis.certified


def test_chain_on_reflected_neg_abs():
    ch = check_hadamard_chain(parse("-abs(x)"), PhiSegment(-1, 2, math.pi))
    assert ch.hypothesis.certified and ch.holds


def test_linear_tt4_is_exact():
    r = evaluate(TheoremId.TT4, parse("2*x + 1"), UNIT)
    assert r.status is Status.HOLDS
    assert r.lhs < 1e-14 and r.sharpness == pytest.approx(0, abs=1e-13)


def test_constant_is_degenerate():
    r = evaluate(TheoremId.TT2, parse("2"), UNIT)
    assert r.status is Status.DEGENERATE and r.rhs == 0


def test_bump_derivative_falsifies_quasi_hypothesis():
    # |cos x| is a bump on [-1.2, 1.2], so it is not quasi-convex
    r = evaluate(TheoremId.QUASI_TRAP, parse("sin(x)"), PhiSegment(-1.2, 1.2, 0))
    assert r.status is Status.HYPOTHESIS_FALSIFIED
    assert r.hypothesis.witness is not None


def test_generator_gate_rejects_rotated_exp_neg():
    # along the imaginary direction |f'| is constant 1, but |f'(b)| = e^{-3} is far smaller,
    # and the bound indeed fails there
    s = PhiSegment(0, 3, math.pi / 2)
    r = evaluate(TheoremId.TT2, parse("exp(-x)"), s)
    assert r.lhs > r.rhs
    assert r.status is Status.HYPOTHESIS_FALSIFIED


def test_flags():
    r = evaluate(TheoremId.TT2, SQ, PhiSegment(-1, 1, 2.0))
    assert "phi_outside_theorem_range" in r.flags and "codomain_not_positive" in r.flags
    r = evaluate(TheoremId.TT6, SQ, UNIT, HolderParams(p=3))
    assert r.aux["rhs_proof_constant"] <= r.rhs
    r = evaluate(TheoremId.QUASI_MID_HOLDER, SQ, UNIT, HolderParams(p=3))
    assert r.notes


@pytest.mark.parametrize("bad", [lambda: HolderParams(p=1.0), lambda: HolderParams(p=0.5),
                                 lambda: HolderParams(q=0.9),
                                 lambda: rhs_tt3(SQ, UNIT, 1.0),
                                 lambda: evaluate(TheoremId.TT5, SQ, UNIT)])
def test_parameter_errors(bad):
    with pytest.raises(ParameterError):
        bad()


def test_judge():
    assert judge(1.0, 0.5, False) is Status.HYPOTHESIS_FALSIFIED
    assert judge(0.0, 0.0, True) is Status.DEGENERATE
    assert judge(0.5 + 1e-9, 0.5, True) is Status.HOLDS
    assert judge(0.6, 0.5, True) is Status.VIOLATED_WITH_HYPOTHESIS


def test_sharpness_undefined_when_rhs_zero():
    r = BoundResult(TheoremId.TT2, 1e-3, 0.0, Status.VIOLATED_WITH_HYPOTHESIS)
    assert r.sharpness is None


def test_result_round_trip():
    r = evaluate(TheoremId.TT5, SQ, PhiSegment(0.2, 1.5, 0.4), HolderParams(p=2.5))
    assert BoundResult.from_dict(r.to_dict()) == r


def test_explain():
    text = explain("tt2")
    assert "(b−a)/8 (|f'(a)|+|f'(b)|)" in text
    assert "q ≥ 1" in explain("z")
    with pytest.raises(KeyError):
        explain("tt9")
    for t in TheoremId:
        assert explain(t.value).startswith(t.value)


def test_all_theorems_hold_for_square():
    for t in TheoremId:
        r = evaluate(t, SQ, UNIT, HolderParams(p=2, q=2))
        assert r.status is Status.HOLDS, t


# --- structural properties ---------------------------------------------------


@given(st.sampled_from(SMOOTH[:10]), st.floats(-2, 2), st.floats(0.1, 3), st.floats(1.01, 20),
       st.floats(1, 20))
@settings(max_examples=150, deadline=None)
def test_relaxations_dominate(entry, a, l, p, q):
    f, s = entry.parsed, PhiSegment(a, a + l, 0)
    eps = 1e-12
    assert rhs_tt6(f, s, p) >= rhs_tt5(f, s, p) * (1 - eps)
    assert rhs_tt6(f, s, p) >= rhs_tt6_proof_constant(f, s, p) * (1 - eps)
    assert rhs_z_relaxed(f, s, q) >= rhs_z(f, s, q) * (1 - eps)
    assert rhs_z(f, s, 1.0) == pytest.approx(rhs_tt2(f, s), rel=1e-15, abs=0)


@given(st.sampled_from(SMOOTH[:10]), st.floats(-2, 2), st.floats(0.1, 3), st.floats(0, math.pi),
       st.floats(1.01, 20))
@settings(max_examples=100, deadline=None)
def test_rhs_independent_of_phi(entry, a, l, phi, p):
    f = entry.parsed
    s0, s1 = PhiSegment(a, a + l, 0), PhiSegment(a, a + l, phi)
    for fn in (rhs_tt2, rhs_tt4, rhs_quasi):
        assert fn(f, s0) == fn(f, s1)
    for fn in (rhs_tt3, rhs_tt5, rhs_tt6, rhs_z, rhs_z_relaxed, rhs_quasi_holder):
        assert fn(f, s0, p) == fn(f, s1, p)


def test_large_exponent_does_not_overflow():
    # p -> 1 pushes the conjugate exponent past 1e6
    s = PhiSegment(0, 2.5, 0)
    f = parse("exp(x)")
    v = rhs_tt3(f, s, 1 + 1e-7)
    B = math.exp(2.5)
    assert math.isfinite(v) and v == pytest.approx(2.5 / 4 * B, rel=1e-5)
    r = evaluate(TheoremId.TT3, f, s, HolderParams(p=1 + 1e-7))
    assert r.status is Status.HOLDS


# --- reduction to the classical real-line inequalities -------------------------

def classical(entry, a, b):
    """Real-line quantities from sympy and scipy, sharing no code with the package."""
    f, df = sympy_function(entry.expr)
    with warnings.catch_warnings():
        # the tight tolerance trips scipy's roundoff detector on easy integrands
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        mean = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-14, limit=200)[0] / (b - a)
    A, B = abs(df(a)), abs(df(b))
    return {
        "trap": abs((f(a) + f(b)) / 2 - mean),
        "mid": abs(mean - f((a + b) / 2)),
        "trap_convex": (b - a) * (A + B) / 8,       # trapezoid, |f'| convex
        "mid_convex": (b - a) / 4 * (A + B) / 2,            # midpoint, |f'| convex
        "trap_quasi": (b - a) / 4 * max(A, B),                  # trapezoid, |f'| quasi-convex
    }


def close(x, y, rel=1e-10):
    return abs(x - y) <= rel * (1 + abs(y))


@pytest.mark.parametrize("seed", range(5))
def test_reduction_to_classical_bounds(seed):
    rng = np.random.default_rng(seed)
    sampler = SegmentSampler(phi_fixed=(0.0,), phi_uniform_fraction=0.0)
    for entry in SMOOTH[:13]:
        s = sampler.draw(rng, entry)
        ref = classical(entry, s.a, s.b)
        for th, lhs_key, rhs_key in [(TheoremId.TT2, "trap", "trap_convex"),
                                     (TheoremId.TT4, "mid", "mid_convex"),
                                     (TheoremId.QUASI_TRAP, "trap", "trap_quasi")]:
            r = evaluate(th, entry.parsed, s, grid=257)
            assert close(r.lhs, ref[lhs_key]) and close(r.rhs, ref[rhs_key]), (entry.id, th)
            if r.hypothesis.certified:
                assert r.status in (Status.HOLDS, Status.DEGENERATE)
