import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from radconvex.funcspec import Compose, DomainError, FunctionSpec, Sum, evaluate, parse
from radconvex.radical_analysis import (
    default_x_max,
    is_p_radical,
    max_radical_order,
    necessary_condition,
)

from conftest import MATRIX_SPECS, theoretical_order

# A coarser grid keeps the property batteries fast; the verdicts used below
# are far from the tolerance edge.
FAST = dict(grid_n=257)


def test_square_is_two_radical():
    v = is_p_radical(parse("pow(2)"), 2.0)
    assert v.passed
    assert abs(v.worst_violation) < 1e-12


def test_square_is_not_three_radical():
    v = is_p_radical(parse("pow(2)"), 3.0)
    assert not v.passed
    assert v.worst_violation < -1e-8
    assert 0.0 < v.witness_x < v.x_max


def test_exptrunc_one_is_two_radical_on_wide_grid():
    assert is_p_radical(parse("exptrunc(1)"), 2.0, grid_n=2049, x_max=25.0).passed


def test_is_p_radical_domain_error():
    with pytest.raises(DomainError):
        is_p_radical(parse("geomtrunc(1)"), 2.0, x_max=1.0)
    with pytest.raises(ValueError):
        is_p_radical(parse("pow(2)"), 0.5)
    with pytest.raises(ValueError):
        is_p_radical(parse("pow(2)"), 2.0, grid_n=2)


@pytest.mark.parametrize(
    "spec, order",
    [("pow(4)", 4.0), ("pow(2)", 2.0), ("series(1, 1.0)", 1.0), ("pow(2.5)", 2.5)],
)
def test_max_radical_order_matches_power(spec, order):
    prof = max_radical_order(parse(spec), p_cap=8, iters=20)
    assert prof.p_max_estimate == pytest.approx(order, abs=0.01)
    assert prof.bracket_width == pytest.approx(7 / 2**20)


def test_max_radical_order_sentinels():
    # Capped: pow(20) passes every p up to 8.
    assert max_radical_order(parse("pow(20)"), p_cap=8, iters=5).p_max_estimate == 8.0
    prof = max_radical_order(parse("pow(3)"), p_cap=1.0, iters=3)
    assert prof.p_max_estimate == 1.0 and prof.trace == [(1.0, True)]


def test_not_convex_gives_zero():
    # sqrt is no builtin (every builtin is convex), so supply a bare node.
    from radconvex.funcspec import Node

    class Sqrt(Node):
        domain_end = math.inf

        def _eval(self, x):
            return np.sqrt(x)

    prof = max_radical_order(FunctionSpec(Sqrt(), label="sqrt"), p_cap=4, iters=5)
    assert prof.p_max_estimate == 0.0
    assert not prof.radical
    assert prof.trace == [(1.0, False)]


def test_screening_inside_profile():
    prof = max_radical_order(
        parse("exptrunc(0)"), p_cap=4, iters=12, screen_ps=(1.0, 2.0, None), screen_xs=(1.0,)
    )
    assert prof.p_max_estimate == pytest.approx(1.0, abs=0.05)
    assert 2.0 in prof.refuted_orders()
    assert prof.consistent  # p = 2 lies above the grid estimate


# -- necessary condition -----------------------------------------------------


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5, 6.0])
@pytest.mark.parametrize("x", [0.3, 1.0, 4.0])
def test_necessary_condition_equality_for_powers(p, x):
    (c,) = necessary_condition(parse(f"pow({p})"), p, [x])
    assert c.passed
    assert c.lhs == pytest.approx(c.rhs, rel=1e-10)


def test_necessary_condition_refutes_exp_minus_one():
    (c,) = necessary_condition(parse("exptrunc(0)"), 2.0, [1.0])
    assert c.lhs == pytest.approx(math.e - 2, abs=1e-10)
    assert c.rhs == pytest.approx((math.e - 1) / 3, abs=1e-12)
    assert not c.passed


def test_necessary_condition_exp_minus_one_at_three():
    # At x = 3 the test is passed: 16.0855 <= 19.0855.
    (c,) = necessary_condition(parse("exptrunc(0)"), 2.0, [3.0])
    assert c.lhs == pytest.approx(math.exp(3) - 4, rel=1e-10)
    assert c.rhs == pytest.approx(math.exp(3) - 1, rel=1e-12)
    assert c.passed


def test_necessary_condition_square_at_three():
    (c,) = necessary_condition(parse("pow(2)"), 3.0, [1.0])
    assert c.lhs == pytest.approx(1 / 3, abs=1e-12)
    assert c.rhs == pytest.approx(1 / 4, abs=1e-15)
    assert not c.passed


# The gap x^3 (1/3 - 1/(p+1)) must clear the 1e-9 absolute floor of the test.
@given(st.floats(2.05, 20.0), st.floats(0.1, 50.0))
def test_vanishing_limit_for_square(p, x):
    (c,) = necessary_condition(parse("pow(2)"), p, [x])
    assert not c.passed


def test_necessary_condition_domain():
    with pytest.raises(DomainError):
        necessary_condition(parse("geomtrunc(0)"), 1.0, [1.0])
    with pytest.raises(DomainError):
        necessary_condition(parse("pow(2)"), 1.0, [0.0])


# -- properties -------------------------------------------------------------

ps = st.floats(1.0, 6.0)


def _x_max(f):
    return default_x_max(f, 6.0)


@settings(max_examples=40)
@given(st.sampled_from(MATRIX_SPECS), ps, ps)
def test_downward_closure(spec, p, q):
    f = parse(spec)
    lo, hi = sorted((p, q))
    xm = _x_max(f)
    if is_p_radical(f, hi, x_max=xm, **FAST).passed:
        assert is_p_radical(f, lo, x_max=xm, **FAST).passed


@settings(max_examples=40)
@given(st.sampled_from(MATRIX_SPECS), ps)
def test_radical_implies_increasing_and_convex(spec, p):
    f = parse(spec)
    xm = _x_max(f)
    assume(is_p_radical(f, p, x_max=xm, **FAST).passed)
    assert is_p_radical(f, 1.0, x_max=xm, **FAST).passed
    y = evaluate(f, np.linspace(0.0, xm ** (1 / p), 500))
    assert np.all(np.diff(y) >= 0)


@settings(max_examples=40)
@given(st.sampled_from(MATRIX_SPECS), st.sampled_from(MATRIX_SPECS))
def test_sum_closure(s1, s2):
    f, g = parse(s1), parse(s2)
    h = FunctionSpec(Sum(f.expr, g.expr))
    p = min(theoretical_order(s1), theoretical_order(s2))
    xm = _x_max(h)
    assert is_p_radical(f, p, x_max=xm, **FAST).passed
    assert is_p_radical(g, p, x_max=xm, **FAST).passed
    assert is_p_radical(h, p, x_max=xm, **FAST).passed


OUTERS = ["pow(1)", "pow(2)", "pow(3.5)", "exptrunc(0)", "exptrunc(2)", "series(1, 1, 2)"]


@settings(max_examples=40)
@given(st.sampled_from(OUTERS), st.sampled_from(MATRIX_SPECS))
def test_composition_closure(outer, inner):
    f = parse(inner)
    h = FunctionSpec(Compose(parse(outer).expr, f.expr))
    p = theoretical_order(inner)
    xm = min(_x_max(h), 4.0**p)
    with np.errstate(over="ignore"):
        g = evaluate(h, np.linspace(0.0, xm ** (1 / p), 50))
    assume(np.all(np.isfinite(g)) and g[-1] < 1e200)
    assert is_p_radical(h, p, x_max=xm, **FAST).passed


@pytest.mark.parametrize("spec", ["pow(3)", "exptrunc(1)", "geomtrunc(1)", "neglogtrunc(2)"])
def test_trace_is_monotone_consistent(spec):
    prof = max_radical_order(parse(spec), p_cap=8, iters=25, grid_n=513)
    passing = [p for p, ok in prof.trace if ok]
    failing = [p for p, ok in prof.trace if not ok]
    if passing and failing:
        assert max(passing) <= min(failing) + 1e-6
    # A convex g always passes, so the grid can only overshoot the true order;
    # for the series builtins the overshoot shrinks slowly with grid_n.
    order = theoretical_order(spec)
    assert order - 1e-6 <= prof.p_max_estimate <= order + 0.15
