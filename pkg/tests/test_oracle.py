import math

import numpy as np
import pytest

from radconvex.funcspec import DomainError, evaluate, parse
from radconvex.oracle import (
    OracleConfig,
    chord_convexity,
    midpoint_convexity,
    riemann,
    rng,
)
from radconvex.radical_analysis import default_x_max, is_p_radical

from conftest import MATRIX_PS, MATRIX_SPECS, theoretical_order


def test_riemann_square():
    assert riemann(lambda x: x * x, 0.0, 1.0, 10**6) == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("c, a, b, n", [(2.0, 0.0, 4.0, 16), (0.5, -1.0, 3.0, 10), (3.0, 1.0, 1.5, 1000)])
def test_riemann_constant(c, a, b, n):
    assert riemann(lambda x: np.full_like(x, c), a, b, n) == c * (b - a)


def test_riemann_exptrunc():
    got = riemann(lambda x: np.exp(x) - 1 - x, 0.0, 1.0, 10**6)
    assert abs(got - (math.e - 2.5)) <= 1e-10


def test_riemann_edges():
    assert riemann(lambda x: x, 2.0, 2.0, 10) == 0.0
    with pytest.raises(ValueError):
        riemann(lambda x: x, 1.0, 0.0, 10)


def test_config_validation():
    assert OracleConfig() == OracleConfig(panels=10**6, chord_samples=10**4, seed=0)
    for bad in (dict(panels=9), dict(chord_samples=0), dict(seed=-1), dict(seed=2**64)):
        with pytest.raises(ValueError):
            OracleConfig(**bad)


def test_rng_replays():
    assert np.array_equal(rng(5).uniform(size=8), rng(5).uniform(size=8))
    assert not np.array_equal(rng(5).uniform(size=8), rng(6).uniform(size=8))


def test_chord_quartic_at_four():
    ok, worst, _ = chord_convexity(parse("pow(4)"), 4.0, 10.0)
    assert ok and worst >= -1e-12


def test_chord_square_at_three_has_witness():
    f = parse("pow(2)")
    ok, worst, (a, b, t) = chord_convexity(f, 3.0, 10.0, seed=3)
    assert not ok
    g = lambda u: evaluate(f, u ** (1 / 3))  # noqa: E731
    gap = (1 - t) * g(a) + t * g(b) - g((1 - t) * a + t * b)
    assert gap < 0
    assert gap / max(1.0, g(10.0)) == pytest.approx(worst, rel=1e-9)


def test_chord_exptrunc_at_two():
    ok, _, _ = chord_convexity(parse("exptrunc(1)"), 2.0, 10.0, samples=10**4, seed=1)
    assert ok


def test_chord_is_deterministic():
    f = parse("neglogtrunc(1)")
    assert chord_convexity(f, 3.0, 0.9, seed=9) == chord_convexity(f, 3.0, 0.9, seed=9)


def test_oracles_check_domain():
    with pytest.raises(DomainError):
        chord_convexity(parse("geomtrunc(0)"), 2.0, 1.5)
    with pytest.raises(DomainError):
        midpoint_convexity(parse("geomtrunc(0)"), 2.0, 1.5)
    with pytest.raises(ValueError):
        chord_convexity(parse("pow(2)"), 0.5, 1.0)


def test_midpoint_examples():
    assert midpoint_convexity(parse("pow(4)"), 4.0, 10.0)[0]
    ok, worst, (u, v) = midpoint_convexity(parse("pow(2)"), 3.0, 10.0)
    assert not ok and worst < 0 and u != v


@pytest.mark.parametrize("spec", MATRIX_SPECS)
@pytest.mark.parametrize("p", MATRIX_PS)
def test_verdict_agreement(spec, p):
    f = parse(spec)
    xm = default_x_max(f)
    grid = is_p_radical(f, p, x_max=xm).passed
    chord = chord_convexity(f, p, xm, samples=10**4, seed=1)[0]
    mid = midpoint_convexity(f, p, xm)[0]
    assert grid == chord == mid == (p <= theoretical_order(spec))


def test_integrator_agreement_on_random_draws():
    from radconvex.quadrature import integrate

    r = rng(8)
    for _ in range(50):
        spec = MATRIX_SPECS[int(r.integers(len(MATRIX_SPECS)))]
        f = parse(spec)
        hi = 5.0 if math.isinf(f.domain_end) else 1.0 - 1e-6
        a, b = sorted(r.uniform(0.0, hi, 2))
        brute = riemann(lambda x: evaluate(f, x), a, b, 10**6)
        adaptive = integrate(lambda x: evaluate(f, x), a, b).value
        assert abs(adaptive - brute) <= 1e-5 * max(1.0, abs(brute)), (spec, a, b)
