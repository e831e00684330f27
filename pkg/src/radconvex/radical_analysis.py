"""Numerical classification of p-radical convexity.

``f`` is p-radical convex when ``g(u) = f(u**(1/p))`` is convex on
[0, inf).  The grid test below checks nonnegative second differences of
``g`` on a uniform u-grid; the set of passing p is downward closed, which
is what lets :func:`max_radical_order` bisect on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .funcspec import DomainError, FunctionSpec, evaluate
from .quadrature import integrate

__all__ = [
    "ConvexityVerdict",
    "NecessaryCheck",
    "RadicalProfile",
    "is_p_radical",
    "max_radical_order",
    "necessary_condition",
    "default_x_max",
]

DEFAULT_GRID_N = 1025
DEFAULT_X_MAX = 10.0
DEFAULT_TOL = 1e-8
DEFAULT_P_CAP = 16.0
DEFAULT_ITERS = 40
NECESSARY_RTOL = 1e-9


@dataclass(frozen=True)
class ConvexityVerdict:
    """Outcome of the grid convexity test for one p.

    ``worst_violation`` is the most negative second difference divided by
    ``max(1, g(x_max))``; ``witness_x`` is the u-node where it occurs.
    """

    p: float
    grid_n: int
    x_max: float
    passed: bool
    worst_violation: float
    witness_x: float


@dataclass(frozen=True)
class NecessaryCheck:
    """One evaluation of  int_0^x f <= x f(x) / (p+1)."""

    p: float
    x: float
    lhs: float
    rhs: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class RadicalProfile:
    p_max_estimate: float
    trace: list[tuple[float, bool]] = field(default_factory=list)
    necessary_checks: list[NecessaryCheck] = field(default_factory=list)
    p_cap: float = DEFAULT_P_CAP
    iters: int = DEFAULT_ITERS
    grid_n: int = DEFAULT_GRID_N
    x_max: float = DEFAULT_X_MAX
    tol: float = DEFAULT_TOL

    @property
    def bracket_width(self) -> float:
        return (self.p_cap - 1.0) / 2.0**self.iters

    @property
    def radical(self) -> bool:
        """False when even p = 1 fails, i.e. f is not convex on the grid."""
        return self.p_max_estimate >= 1.0

    def relevant_checks(self, slack: float = 1e-3) -> list[NecessaryCheck]:
        """Screening checks at orders the grid test claims to hold.

        Orders within ``slack`` of the estimate are left out: the grid
        tolerance lets the estimate sit slightly above the true order, and
        the necessary condition is tight at the true order for x**p.
        """
        return [c for c in self.necessary_checks if c.p <= self.p_max_estimate - slack]

    @property
    def consistent(self) -> bool:
        """No necessary-condition failure at an order the grid test accepted."""
        return all(c.passed for c in self.relevant_checks())

    def refuted_orders(self) -> list[float]:
        return sorted({c.p for c in self.necessary_checks if not c.passed})


def default_x_max(f: FunctionSpec, p_cap: float = DEFAULT_P_CAP) -> float:
    """A grid extent valid for every p in [1, p_cap].

    The u-grid maps to x = u**(1/p), which must stay below domain_end.
    """
    d = f.domain_end
    if math.isinf(d):
        return DEFAULT_X_MAX
    return 0.9 * min(d, d**p_cap)


def _g_values(f: FunctionSpec, p: float, u: np.ndarray) -> np.ndarray:
    return evaluate(f, np.power(u, 1.0 / p))


def is_p_radical(
    f: FunctionSpec,
    p: float,
    grid_n: int = DEFAULT_GRID_N,
    x_max: float = DEFAULT_X_MAX,
    tol: float = DEFAULT_TOL,
) -> ConvexityVerdict:
    """Grid test for convexity of u -> f(u**(1/p)) on [0, x_max].

    Passes when every second difference
    ``g(u[i-1]) - 2 g(u[i]) + g(u[i+1])`` is at least
    ``-tol * max(1, g(x_max))``.

    Raises:
        ValueError: for p < 1 or grid_n < 3 or x_max <= 0.
        DomainError: when x_max**(1/p) falls outside f's domain.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    if grid_n < 3:
        raise ValueError(f"grid_n must be >= 3, got {grid_n}")
    if not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max}")
    if not x_max ** (1.0 / p) < f.domain_end:
        raise DomainError(
            f"x_max**(1/p) = {x_max ** (1.0 / p)} is not inside [0, {f.domain_end})"
        )
    u = np.linspace(0.0, x_max, grid_n)
    g = _g_values(f, p, u)
    d2 = g[:-2] - 2.0 * g[1:-1] + g[2:]
    scale = max(1.0, float(g[-1]))
    i = int(np.argmin(d2))
    worst = float(d2[i]) / scale
    return ConvexityVerdict(
        p=float(p),
        grid_n=int(grid_n),
        x_max=float(x_max),
        passed=worst >= -tol,
        worst_violation=worst,
        witness_x=float(u[i + 1]),
    )


def max_radical_order(
    f: FunctionSpec,
    p_cap: float = DEFAULT_P_CAP,
    iters: int = DEFAULT_ITERS,
    grid_n: int = DEFAULT_GRID_N,
    x_max: float | None = None,
    tol: float = DEFAULT_TOL,
    screen_ps=(),
    screen_xs=(),
) -> RadicalProfile:
    """Estimate the largest p for which the grid test passes.

    Bisects over [1, p_cap].  If p = 1 already fails the estimate is 0;
    if p_cap passes the estimate is p_cap.  Optionally screens the
    necessary condition at every (p, x) in ``screen_ps x screen_xs``
    (the estimate itself is screened when ``screen_ps`` contains None).
    """
    if not p_cap >= 1.0:
        raise ValueError(f"p_cap must be >= 1, got {p_cap}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if x_max is None:
        x_max = default_x_max(f, p_cap)
    profile = RadicalProfile(
        p_max_estimate=0.0, p_cap=float(p_cap), iters=iters, grid_n=grid_n,
        x_max=float(x_max), tol=tol,
    )

    def probe(p):
        ok = is_p_radical(f, p, grid_n, x_max, tol).passed
        profile.trace.append((float(p), ok))
        return ok

    if not probe(1.0):
        profile.p_max_estimate = 0.0
    elif p_cap == 1.0 or probe(p_cap):
        profile.p_max_estimate = float(p_cap)
    else:
        lo, hi = 1.0, float(p_cap)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if probe(mid):
                lo = mid
            else:
                hi = mid
        profile.p_max_estimate = 0.5 * (lo + hi)

    ps = []
    for p in screen_ps:
        if p is None:
            if profile.p_max_estimate >= 1.0:
                ps.append(profile.p_max_estimate)
        else:
            ps.append(float(p))
    for p in ps:
        profile.necessary_checks.extend(necessary_condition(f, p, screen_xs))
    return profile


def necessary_condition(f: FunctionSpec, p: float, xs) -> list[NecessaryCheck]:
    """Screen  int_0^x f(t) dt <= x f(x) / (p+1)  at each x.

    A failure refutes p-radical convexity; a pass proves nothing.  Equality
    holds for every x exactly when f = c x**p.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    out = []
    for x in xs:
        x = float(x)
        if not (0.0 < x < f.domain_end):
            raise DomainError(f"x={x} outside (0, {f.domain_end})")
        lhs = integrate(lambda t: evaluate(f, t), 0.0, x).value
        rhs = x * evaluate(f, x) / (p + 1.0)
        ok = lhs <= rhs + NECESSARY_RTOL * max(1.0, abs(rhs))
        out.append(NecessaryCheck(float(p), x, lhs, rhs, ok))
    return out
