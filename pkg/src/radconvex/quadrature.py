"""Adaptive Simpson quadrature.

This is the only integrator the inequality checks use.  It bisects
intervals until the Richardson error estimate of each piece falls under
its share of the tolerance, with a floating-point floor so that large
integrands do not chase digits that do not exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .funcspec import FunctionSpec, evaluate

__all__ = ["QuadResult", "QuadratureError", "integrate", "integrate_hh_refine_term"]

DEFAULT_TOL = 1e-10
MAX_DEPTH = 60
# Pieces are always split this many times; coarse Simpson pairs can agree by
# accident on symmetric integrands.
MIN_DEPTH = 3
_NOISE_PROBES = 16

# Roundoff floor for the local test, relative to the absolute Simpson sum of
# the piece and, globally, of the whole interval.
_EPS_FLOOR = 64 * 2.0**-52


class QuadratureError(ArithmeticError):
    """Adaptive refinement hit the depth limit without converging."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    err_estimate: float
    evals: int

    def __float__(self):
        return self.value


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_depth: int = MAX_DEPTH,
) -> QuadResult:
    """Integrate a scalar function over [a, b] by adaptive Simpson.

    Each subinterval of width w must satisfy
    ``|S_left + S_right - S_whole| / 15 <= tol * w / (b - a)``; accepted
    pieces contribute their Richardson-corrected value.  The result is
    deterministic for fixed inputs.

    Args:
        f: Integrand, called with Python floats.
        a: Lower limit.
        b: Upper limit, ``b >= a``.
        tol: Absolute tolerance for the whole interval.
        max_depth: Bisection depth at which a piece that still fails the
            test is declared a failure.

    Raises:
        ValueError: if ``a > b`` or the limits are not finite.
        QuadratureError: if some piece does not converge within max_depth
            bisections, or shrinks to floating-point resolution first.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a > b:
        raise ValueError(f"integrate expects a <= b, got [{a}, {b}]")

    fa, fm, fb = float(f(a)), float(f(0.5 * (a + b))), float(f(b))
    evals = 3
    for v in (fa, fm, fb):
        if not math.isfinite(v):
            raise QuadratureError(f"non-finite integrand value on [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0, evals)

    length = b - a
    # Rough size of the whole integral from interior midpoints (endpoint values
    # near a pole would inflate it).  Differences below eps times this are
    # rounding noise, whatever the width of the piece.
    probe = [abs(float(f(a + (i + 0.5) * length / _NOISE_PROBES))) for i in range(_NOISE_PROBES)]
    evals += _NOISE_PROBES
    if not all(math.isfinite(v) for v in probe):
        raise QuadratureError(f"non-finite integrand value on [{a}, {b}]")
    noise = _EPS_FLOOR * length * math.fsum(probe) / _NOISE_PROBES
    pieces: list[float] = []
    err_total = 0.0
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # Depth-first, left piece first: the summation order is fixed.
    stack = [(a, b, fa, fm, fb, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s_whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = float(f(lm))
        frm = float(f(rm))
        evals += 2
        if not (math.isfinite(flm) and math.isfinite(frm)):
            raise QuadratureError(f"non-finite integrand value near {mid}")
        h = hi - lo
        # Use the actual float widths: mid is not an exact bisection point, and
        # on narrow pieces far from 0 the difference dominates delta.
        s_left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        s_right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = s_left + s_right - s_whole
        local_tol = tol * h / length
        abs_sum = h / 12.0 * (
            abs(flo) + 4.0 * abs(flm) + 2.0 * abs(fmid) + 4.0 * abs(frm) + abs(fhi)
        )
        floor = max(_EPS_FLOOR * abs_sum, noise)
        within = abs(delta) <= 15.0 * max(local_tol, floor)
        # A piece too narrow to split is as refined as it can be; the minimum
        # depth only guards against coarse pieces converging by accident.
        unsplittable = lm <= lo or rm >= hi
        if within and (depth >= MIN_DEPTH or unsplittable):
            pieces.append(s_left + s_right + delta / 15.0)
            err_total += abs(delta) / 15.0
            continue
        if depth + 1 >= max_depth or unsplittable:
            raise QuadratureError(
                f"no convergence on [{lo}, {hi}] after {depth + 1} bisections"
            )
        stack.append((mid, hi, fmid, frm, fhi, s_right, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, s_left, depth + 1))
    return QuadResult(math.fsum(pieces), err_total, evals)


def integrate_hh_refine_term(
    f: FunctionSpec, a: float, b: float, tol: float = DEFAULT_TOL
) -> QuadResult:
    """The refinement integral of the second Hermite-Hadamard bound.

    Returns ``(1/(b-a)) * int_0^{(b-a)/2} 4 x f(x) / sqrt((b-a)^2 - 4x^2) dx``.
    The x-form has an inverse square root at its upper end, and the
    equivalent form ``2 int_0^{1/2} f(sqrt(t(1-t)) (b-a)) dt`` still has
    a square-root kink at t = 0 whenever f'(0) > 0.  Setting
    ``x = (b-a)/2 * sin(phi)`` removes both:

        int_0^{pi/2} f((b-a)/2 * sin(phi)) * sin(phi) dphi

    which has a smooth integrand for every builtin.
    """
    if b < a:
        raise ValueError(f"expected a <= b, got [{a}, {b}]")
    half = 0.5 * (b - a)
    if half == 0.0:
        return QuadResult(0.0, 0.0, 3)

    def integrand(phi):
        s = math.sin(phi)
        return evaluate(f, half * s) * s

    return integrate(integrand, 0.0, 0.5 * math.pi, tol)
