"""Integral inequalities for radical convex functions.

Every check is assembled from :mod:`radconvex.quadrature` results.  The
pass test widens with the reported quadrature error so integrator noise
never shows up as a violation:

    margin >= -(1e-8 + 10 * quad_err) * max(1, |rhs|)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .funcspec import DomainError, FunctionSpec, evaluate
from .quadrature import QuadResult, integrate, integrate_hh_refine_term
from .radical_analysis import necessary_condition

__all__ = [
    "IntegralTheorem",
    "IntegralReport",
    "hh_first",
    "hh_second",
    "unit_interval_chain",
    "split_interval_bound",
    "hh_general",
    "continuous_jensen",
    "hardy_finite",
    "average_value_report",
    "PrefixIntegral",
]

BASE_RTOL = 1e-8
ENDPOINT_CLIP = 1e-6
HARDY_GRID_N = 4097


class IntegralTheorem(str, Enum):
    HH_FIRST = "HH_FIRST"
    HH_SECOND = "HH_SECOND"
    UNIT_INT = "UNIT_INT"
    SPLIT_INT = "SPLIT_INT"
    HH_GENERAL = "HH_GENERAL"
    CONT_JENSEN = "CONT_JENSEN"
    HARDY = "HARDY"
    AVG_VALUE = "AVG_VALUE"


@dataclass
class IntegralReport:
    """One instance of an integral inequality.

    Two-sided chains (UNIT_INT, HH_GENERAL, CONT_JENSEN) keep the middle
    quantity in ``components["middle"]``; their ``margin`` is the smaller
    of the two gaps.
    """

    theorem_id: IntegralTheorem
    interval: tuple[float, float]
    p: float | None
    lhs: float
    rhs: float
    components: dict[str, float]
    margin: float
    passed: bool
    quad_err: float


def _passes(margin: float, scale_of: float, quad_err: float) -> bool:
    return margin >= -(BASE_RTOL + 10.0 * quad_err) * max(1.0, abs(scale_of))


def _fn(f: FunctionSpec) -> Callable[[float], float]:
    return lambda x: evaluate(f, x)


def _clip(f: FunctionSpec, b: float) -> float:
    """Pull an upper limit off a finite domain edge."""
    d = f.domain_end
    if math.isfinite(d) and b >= d - ENDPOINT_CLIP:
        return d - ENDPOINT_CLIP
    return b


def _interval(f: FunctionSpec, a: float, b: float, strict_left: bool = True):
    b = _clip(f, b)
    if not (a > 0 if strict_left else a >= 0) or not a < b:
        raise DomainError(f"need {'0 <' if strict_left else '0 <='} a < b, got [{a}, {b}]")
    return float(a), float(b)


def _single(theorem, interval, p, lhs, rhs, components, quad_err) -> IntegralReport:
    margin = rhs - lhs
    return IntegralReport(
        theorem, interval, p, lhs, rhs, components, margin,
        _passes(margin, rhs, quad_err), quad_err,
    )


def _chain(theorem, interval, p, left, middle, right, components, quad_err) -> IntegralReport:
    components = {"left": left, "middle": middle, "right": right, **components}
    g1 = middle - left
    g2 = right - middle
    ok = _passes(g1, middle, quad_err) and _passes(g2, right, quad_err)
    return IntegralReport(
        theorem, interval, p, left, right, components, min(g1, g2), ok, quad_err
    )


def hh_first(f: FunctionSpec, a: float, b: float) -> IntegralReport:
    """f((a+b)/2) + (2/(b-a)) int_0^{(b-a)/2} f  <=  (1/(b-a)) int_a^b f."""
    a, b = _interval(f, a, b, strict_left=False)
    w = b - a
    mean = integrate(_fn(f), a, b)
    refine = integrate(_fn(f), 0.0, w / 2.0)
    mid_val = evaluate(f, (a + b) / 2.0)
    lhs = mid_val + 2.0 * refine.value / w
    rhs = mean.value / w
    err = (2.0 * refine.err_estimate + mean.err_estimate) / w
    return _single(
        IntegralTheorem.HH_FIRST, (a, b), None, lhs, rhs,
        {"midpoint": mid_val, "refine": 2.0 * refine.value / w, "mean": rhs}, err,
    )


def hh_second(f: FunctionSpec, a: float, b: float) -> IntegralReport:
    """(1/(b-a)) int_a^b f + refine  <=  (f(a) + f(b)) / 2.

    ``refine`` is the arcsine-weighted integral from
    :func:`radconvex.quadrature.integrate_hh_refine_term`.
    """
    a, b = _interval(f, a, b, strict_left=False)
    w = b - a
    mean = integrate(_fn(f), a, b)
    refine = integrate_hh_refine_term(f, a, b)
    lhs = mean.value / w + refine.value
    rhs = 0.5 * (evaluate(f, a) + evaluate(f, b))
    err = mean.err_estimate / w + refine.err_estimate
    return _single(
        IntegralTheorem.HH_SECOND, (a, b), None, lhs, rhs,
        {"mean": mean.value / w, "refine": refine.value, "endpoint_mean": rhs}, err,
    )


def _midpoint_chain(f: FunctionSpec, a: float, b: float):
    """(f(m), mean of f((x+m)/2) + f(|x-m|/2), mean of f) over [a, b], m = (a+b)/2."""
    m = 0.5 * (a + b)
    w = b - a
    centre = integrate(lambda x: evaluate(f, (x + m) / 2.0), a, b)
    spread = integrate(lambda x: evaluate(f, abs(x - m) / 2.0), a, b)
    total = integrate(_fn(f), a, b)
    middle = (centre.value + spread.value) / w
    err = (centre.err_estimate + spread.err_estimate + total.err_estimate) / w
    comps = {"centre": centre.value / w, "spread": spread.value / w}
    return evaluate(f, m), middle, total.value / w, comps, err


def unit_interval_chain(f: FunctionSpec) -> IntegralReport:
    """f(1/2) <= int_0^1 [f((x + 1/2)/2) + f(|x - 1/2|/2)] dx <= int_0^1 f."""
    if f.domain_end < 1.0:
        raise DomainError(f"unit-interval chain needs domain_end >= 1, got {f.domain_end}")
    b = _clip(f, 1.0)
    centre = integrate(lambda x: evaluate(f, (x + 0.5) / 2.0), 0.0, 1.0)
    spread = integrate(lambda x: evaluate(f, abs(x - 0.5) / 2.0), 0.0, 1.0)
    total = integrate(_fn(f), 0.0, b)
    err = centre.err_estimate + spread.err_estimate + total.err_estimate
    return _chain(
        IntegralTheorem.UNIT_INT, (0.0, b), None,
        evaluate(f, 0.5), centre.value + spread.value, total.value,
        {"centre": centre.value, "spread": spread.value}, err,
    )


def split_interval_bound(f: FunctionSpec) -> IntegralReport:
    """3 int_0^{1/4} f + int_{1/4}^{3/4} f  <=  int_{3/4}^1 f."""
    if f.domain_end < 1.0:
        raise DomainError(f"split-interval bound needs domain_end >= 1, got {f.domain_end}")
    b = _clip(f, 1.0)
    g = _fn(f)
    low = integrate(g, 0.0, 0.25)
    mid = integrate(g, 0.25, 0.75)
    top = integrate(g, 0.75, b)
    lhs = 3.0 * low.value + mid.value
    err = 3.0 * low.err_estimate + mid.err_estimate + top.err_estimate
    return _single(
        IntegralTheorem.SPLIT_INT, (0.0, b), None, lhs, top.value,
        {"low": low.value, "mid": mid.value, "top": top.value}, err,
    )


def hh_general(f: FunctionSpec, a: float, b: float) -> IntegralReport:
    """Midpoint chain on [a, b] for 2-radical convex f.

    f(m) <= (1/(b-a)) int_a^b [f((x+m)/2) + f(|x-m|/2)] dx <= (1/(b-a)) int_a^b f
    with m = (a+b)/2.  At (0, 1) this is :func:`unit_interval_chain`.
    """
    a, b = _interval(f, a, b, strict_left=False)
    left, middle, right, comps, err = _midpoint_chain(f, a, b)
    return _chain(IntegralTheorem.HH_GENERAL, (a, b), None, left, middle, right, comps, err)


def continuous_jensen(
    f: FunctionSpec,
    g: Callable[[float], float] | None,
    a: float,
    b: float,
) -> IntegralReport:
    """Refined continuous Jensen inequality.

    With gbar the mean of g over [a, b]:

        f(gbar) <= mean of [f((g + gbar)/2) + f(|g - gbar|/2)] <= mean of f(g)

    ``g=None`` means the identity, in which case the variant integrating
    f((x + gbar)/2) + f(|x - gbar|/2) in the raw variable is also recorded
    as ``components["raw_variable_middle"]`` (it coincides with the middle).
    """
    if not (a < b):
        raise ValueError(f"need a < b, got [{a}, {b}]")
    identity = g is None
    if identity:
        g = float
    w = b - a
    gq = integrate(lambda x: float(g(x)), a, b)
    gbar = gq.value / w
    centre = integrate(lambda x: evaluate(f, (float(g(x)) + gbar) / 2.0), a, b)
    spread = integrate(lambda x: evaluate(f, abs(float(g(x)) - gbar) / 2.0), a, b)
    outer = integrate(lambda x: evaluate(f, float(g(x))), a, b)
    comps = {"g_mean": gbar, "centre": centre.value / w, "spread": spread.value / w}
    err = (centre.err_estimate + spread.err_estimate + outer.err_estimate) / w
    # Sensitivity of f(gbar) to the error in gbar is bounded by a secant slope.
    step = max(abs(gbar), 1.0) * 1e-6
    if f.in_domain(gbar + step):
        slope = (evaluate(f, gbar + step) - evaluate(f, gbar)) / step
        err += abs(slope) * gq.err_estimate / w
    if identity:
        raw_c = integrate(lambda x: evaluate(f, (x + gbar) / 2.0), a, b)
        raw_s = integrate(lambda x: evaluate(f, abs(x - gbar) / 2.0), a, b)
        comps["raw_variable_middle"] = (raw_c.value + raw_s.value) / w
    return _chain(
        IntegralTheorem.CONT_JENSEN, (float(a), float(b)), None,
        evaluate(f, gbar), (centre.value + spread.value) / w, outer.value / w, comps, err,
    )


class PrefixIntegral:
    """x -> int_0^x f on [lo, hi] from a cumulative grid.

    ``F(lo)`` comes from adaptive quadrature; each grid cell adds a Simpson
    panel using the cell midpoint.  Between nodes ``F`` is a cubic Hermite
    interpolant with the exact derivatives ``F' = f``.  ``err_estimate``
    bounds the cumulative error through a Richardson comparison of single
    cells against merged cell pairs.
    """

    def __init__(self, f: FunctionSpec, lo: float, hi: float, n: int = HARDY_GRID_N):
        if n < 3 or n % 2 == 0:
            raise ValueError("prefix grid needs an odd node count >= 3")
        self.x = np.linspace(lo, hi, n)
        self.h = (hi - lo) / (n - 1)
        self.fx = evaluate(f, self.x)
        fm = evaluate(f, 0.5 * (self.x[:-1] + self.x[1:]))
        cells = self.h / 6.0 * (self.fx[:-1] + 4.0 * fm + self.fx[1:])
        base = integrate(lambda t: evaluate(f, t), 0.0, lo) if lo > 0 else QuadResult(0.0, 0.0, 3)
        self.F = np.concatenate([[0.0], np.cumsum(cells)]) + base.value
        pairs = 2.0 * self.h / 6.0 * (self.fx[:-2:2] + 4.0 * self.fx[1:-1:2] + self.fx[2::2])
        fine = cells[0::2] + cells[1::2]
        self.err_estimate = base.err_estimate + float(np.sum(np.abs(fine - pairs))) / 15.0

    def __call__(self, x: float) -> float:
        i = int(np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, len(self.x) - 2))
        x0 = self.x[i]
        h = self.h
        s = (x - x0) / h
        s2 = s * s
        s3 = s2 * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        return float(
            h00 * self.F[i] + h10 * h * self.fx[i] + h01 * self.F[i + 1] + h11 * h * self.fx[i + 1]
        )


def hardy_finite(f: FunctionSpec, p: float, alpha: float, beta: float) -> IntegralReport:
    """Hardy-type bound on a finite interval for p-radical convex f.

    int_alpha^beta ((1/x) int_0^x f)^p dx  <=  (1/(p+1))^p int_alpha^beta f^p dx,
    with equality for f = x^p.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    alpha, beta = _interval(f, alpha, beta)
    prefix = PrefixIntegral(f, alpha, beta)
    outer = integrate(lambda x: (prefix(x) / x) ** p, alpha, beta)
    fp = integrate(lambda x: evaluate(f, x) ** p, alpha, beta)
    c = (1.0 / (p + 1.0)) ** p
    lhs = outer.value
    rhs = c * fp.value
    # d/dF (F/x)^p = p (F/x)^(p-1) / x, bounded on [alpha, beta] by its value at
    # the node maximising F/x (F/x is nondecreasing for convex f with f(0)=0).
    avg_max = float(prefix.F[-1] / beta)
    sens = p * avg_max ** (p - 1.0) / alpha * (beta - alpha)
    err = outer.err_estimate + sens * prefix.err_estimate + c * fp.err_estimate
    return _single(
        IntegralTheorem.HARDY, (alpha, beta), float(p), lhs, rhs,
        {"averaged_power": lhs, "power_integral": fp.value, "constant": c}, err,
    )


def average_value_report(f: FunctionSpec, p: float, x: float) -> IntegralReport:
    """(1/x) int_0^x f <= f(x)/(p+1), next to the convex-only bound f(x)/2."""
    (check,) = necessary_condition(f, p, [x])
    avg = check.lhs / x
    bound = check.rhs / x
    fx = evaluate(f, x)
    return _single(
        IntegralTheorem.AVG_VALUE, (0.0, float(x)), float(p), avg, bound,
        {"average": avg, "radical_bound": bound, "classical_bound": fx / 2.0,
         "integral": check.lhs},
        0.0,
    )
