"""Brute-force oracles used by the test suite.

Nothing here shares numeric code with :mod:`radconvex.quadrature` or
:mod:`radconvex.radical_analysis`: integrals are plain midpoint sums and
convexity is tested straight from the chord definition.  Random draws come
from numpy's Philox, a counter-based generator, so a seed replays exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .funcspec import DomainError, FunctionSpec, evaluate

__all__ = ["OracleConfig", "rng", "riemann", "chord_convexity", "midpoint_convexity"]


@dataclass(frozen=True)
class OracleConfig:
    panels: int = 10**6
    chord_samples: int = 10**4
    seed: int = 0

    def __post_init__(self):
        if self.panels < 10:
            raise ValueError("panels must be >= 10")
        if self.chord_samples < 1:
            raise ValueError("chord_samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def riemann(f: Callable, a: float, b: float, panels: int = 10**6) -> float:
    """Midpoint rule with ``panels`` uniform panels.

    ``f`` must accept a numpy array.  Panels are processed in chunks to
    bound memory.
    """
    if a > b:
        raise ValueError(f"riemann expects a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    h = (b - a) / panels
    total = 0.0
    chunk = 1 << 18
    for start in range(0, panels, chunk):
        idx = np.arange(start, min(start + chunk, panels), dtype=float)
        total += float(np.sum(np.asarray(f(a + (idx + 0.5) * h), dtype=float)))
    return total * h


def _g(f: FunctionSpec, p: float):
    return lambda u: evaluate(f, np.power(u, 1.0 / p))


def _check(f: FunctionSpec, p: float, x_max: float):
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    if not x_max ** (1.0 / p) < f.domain_end:
        raise DomainError(f"x_max**(1/p) outside [0, {f.domain_end})")


def chord_convexity(
    f: FunctionSpec,
    p: float,
    x_max: float,
    samples: int = 10**4,
    seed: int = 0,
    tol: float = 1e-8,
):
    """Random chord test of convexity for g(u) = f(u**(1/p)) on [0, x_max].

    Draws (a, b, t) uniformly and checks
    ``g((1-t)a + tb) <= (1-t) g(a) + t g(b) + tol * max(1, g(x_max))``.

    Returns:
        (passed, worst, witness) where ``worst`` is the most negative scaled
        chord gap and ``witness`` the (a, b, t) that produced it.
    """
    _check(f, p, x_max)
    r = rng(seed)
    a = r.uniform(0.0, x_max, samples)
    b = r.uniform(0.0, x_max, samples)
    t = r.uniform(0.0, 1.0, samples)
    g = _g(f, p)
    scale = max(1.0, float(g(np.array([x_max]))[0]))
    gap = ((1.0 - t) * g(a) + t * g(b) - g((1.0 - t) * a + t * b)) / scale
    i = int(np.argmin(gap))
    worst = float(gap[i])
    return worst >= -tol, worst, (float(a[i]), float(b[i]), float(t[i]))


def midpoint_convexity(f: FunctionSpec, p: float, x_max: float, n: int = 257, tol: float = 1e-8):
    """Check g((u+v)/2) <= (g(u) + g(v))/2 for every pair of n evenly spaced nodes.

    Returns (passed, worst, (u, v)).
    """
    _check(f, p, x_max)
    u = np.linspace(0.0, x_max, n)
    g = _g(f, p)
    gu = g(u)
    scale = max(1.0, float(gu[-1]))
    uu, vv = np.meshgrid(u, u, indexing="ij")
    gap = (0.5 * (gu[:, None] + gu[None, :]) - g(0.5 * (uu + vv))) / scale
    i, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
    worst = float(gap[i, j])
    return worst >= -tol, worst, (float(u[i]), float(u[j]))
