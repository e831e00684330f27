"""Both sides of the pointwise refined-convexity inequalities.

Each function returns an :class:`InequalityReport` listing the named
left-hand terms, the right-hand side and the margin.  The radical-order
hypothesis of each inequality is not enforced: running a bound on a
function of too low an order is how violations are demonstrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .funcspec import FunctionSpec, evaluate, inverse

__all__ = [
    "TheoremId",
    "InequalityReport",
    "algebraic_identity_residual",
    "identity_report",
    "jensen2_refined",
    "jensen_n_chain",
    "upper_curve",
    "upper_curve_report",
    "amgm_refined",
    "superadditivity_refined",
    "mradical_bound",
    "fourradical_bound",
]

MARGIN_RTOL = 1e-9
IDENTITY_RTOL = 1e-12
WEIGHT_SUM_TOL = 1e-12


class TheoremId(str, Enum):
    JENSEN2 = "JENSEN2"
    JENSEN_N = "JENSEN_N"
    UPPER_CURVE = "UPPER_CURVE"
    AMGM = "AMGM"
    SUPERADD = "SUPERADD"
    MRADICAL = "MRADICAL"
    FOURRADICAL = "FOURRADICAL"
    ALGEBRAIC_ID = "ALGEBRAIC_ID"


@dataclass
class InequalityReport:
    """One instance of a pointwise inequality.

    For plain bounds ``margin = rhs - sum(lhs_terms)``.  Chained bounds
    (JENSEN_N, UPPER_CURVE, AMGM) also fill ``chain`` with the ordered
    quantities, and ``margin`` is the smallest consecutive gap.
    """

    theorem_id: TheoremId
    inputs: dict
    lhs_terms: dict[str, float]
    rhs: float
    margin: float
    passed: bool
    chain: dict[str, float] = field(default_factory=dict)

    @property
    def lhs(self) -> float:
        return math.fsum(self.lhs_terms.values())


def _passes(margin: float, rhs: float) -> bool:
    return margin >= -MARGIN_RTOL * max(1.0, abs(rhs))


def _report(theorem_id, inputs, lhs_terms, rhs) -> InequalityReport:
    margin = rhs - math.fsum(lhs_terms.values())
    return InequalityReport(theorem_id, inputs, lhs_terms, rhs, margin, _passes(margin, rhs))


def _chain_report(theorem_id, inputs, chain: dict[str, float]) -> InequalityReport:
    names = list(chain)
    gaps = [chain[names[i + 1]] - chain[names[i]] for i in range(len(names) - 1)]
    rhs = chain[names[-1]]
    margin = min(gaps)
    # Each link is judged on the scale of its own right end.
    ok = all(
        _passes(gap, chain[names[i + 1]]) for i, gap in enumerate(gaps)
    )
    return InequalityReport(
        theorem_id, inputs, {names[0]: chain[names[0]]}, rhs, margin, ok, dict(chain)
    )


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")


def _check_nonneg(**kw):
    for k, v in kw.items():
        if not v >= 0.0:
            raise ValueError(f"{k} must be >= 0, got {v}")


def algebraic_identity_residual(a: float, b: float, t: float) -> float:
    """(1-t)a^2 + t b^2 - t(1-t)(a-b)^2 - ((1-t)a + t b)^2, which is 0."""
    _check_nonneg(a=a, b=b)
    _check_t(t)
    s = 1.0 - t
    return s * a * a + t * b * b - t * s * (a - b) ** 2 - (s * a + t * b) ** 2


def identity_report(a: float, b: float, t: float) -> InequalityReport:
    resid = algebraic_identity_residual(a, b, t)
    s = 1.0 - t
    rhs = s * a * a + t * b * b
    scale = max(1.0, a * a, b * b)
    return InequalityReport(
        TheoremId.ALGEBRAIC_ID,
        {"a": a, "b": b, "t": t},
        {"mean_sq": (s * a + t * b) ** 2, "refine": t * s * (a - b) ** 2},
        rhs,
        resid,
        abs(resid) <= IDENTITY_RTOL * scale,
    )


def jensen2_refined(f: FunctionSpec, a: float, b: float, t: float) -> InequalityReport:
    """f((1-t)a + tb) + f(sqrt(t(1-t)) |a-b|) <= (1-t) f(a) + t f(b).

    Holds for 2-radical convex f; exact for f = x^2.
    """
    _check_nonneg(a=a, b=b)
    _check_t(t)
    main = evaluate(f, (1.0 - t) * a + t * b)
    refine = evaluate(f, math.sqrt(t * (1.0 - t)) * abs(a - b))
    rhs = (1.0 - t) * evaluate(f, a) + t * evaluate(f, b)
    return _report(
        TheoremId.JENSEN2, {"a": a, "b": b, "t": t}, {"main": main, "refine": refine}, rhs
    )


def _weights(w: Sequence[float], x: Sequence[float]):
    w = [float(v) for v in w]
    x = [float(v) for v in x]
    if len(w) != len(x) or not w:
        raise ValueError("weights and points must be nonempty and of equal length")
    if any(v < 0 for v in w):
        raise ValueError("weights must be nonnegative")
    if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"weights sum to {math.fsum(w)!r}, not 1")
    return w, x


def jensen_n_chain(f: FunctionSpec, w: Sequence[float], x: Sequence[float]) -> InequalityReport:
    """The five-link refined Jensen chain for 2-radical convex f.

    With xbar = sum w_i x_i:

    * q1 = f(xbar)
    * q2 = sum w_i f((xbar + x_i)/2)
    * q3 = q2 + sum w_i f(|xbar - x_i|/2)
    * q4 = (q1 + sum w_i f(x_i)) / 2
    * q5 = sum w_i f(x_i)

    and q1 <= q2 <= q3 <= q4 <= q5.
    """
    w, x = _weights(w, x)
    _check_nonneg(**{f"x[{i}]": v for i, v in enumerate(x)})
    xbar = math.fsum(wi * xi for wi, xi in zip(w, x))
    q1 = evaluate(f, xbar)
    q2 = math.fsum(wi * evaluate(f, (xbar + xi) / 2.0) for wi, xi in zip(w, x))
    q3 = q2 + math.fsum(wi * evaluate(f, abs(xbar - xi) / 2.0) for wi, xi in zip(w, x))
    q5 = math.fsum(wi * evaluate(f, xi) for wi, xi in zip(w, x))
    q4 = (q1 + q5) / 2.0
    return _chain_report(
        TheoremId.JENSEN_N,
        {"weights": w, "points": x},
        {"q1": q1, "q2": q2, "q3": q3, "q4": q4, "q5": q5},
    )


def upper_curve(f: FunctionSpec, t: float) -> tuple[float, float, float]:
    """(f(t), f(1) t - f(sqrt(t(1-t))), f(1) t): a nonlinear curve above f."""
    _check_t(t)
    f1 = evaluate(f, 1.0)
    return evaluate(f, t), f1 * t - evaluate(f, math.sqrt(t * (1.0 - t))), f1 * t


def upper_curve_report(f: FunctionSpec, t: float) -> InequalityReport:
    lo, mid, hi = upper_curve(f, t)
    return _chain_report(TheoremId.UPPER_CURVE, {"t": t}, {"f_t": lo, "curve": mid, "chord": hi})


def amgm_refined(
    f: FunctionSpec, w: Sequence[float], x: Sequence[float], x_hi: float | None = None
) -> InequalityReport:
    """Refined weighted AM-GM through the inverse of f.

    geometric mean <= sum w_i [f((ybar + y_i)/2) + f(|ybar - y_i|/2)]
    <= arithmetic mean, where y_i = f^{-1}(x_i) and ybar = sum w_j y_j.
    """
    w, x = _weights(w, x)
    if any(v <= 0 for v in x):
        raise ValueError("AM-GM points must be positive")
    y = [inverse(f, xi, x_hi) for xi in x]
    ybar = math.fsum(wi * yi for wi, yi in zip(w, y))
    geo = math.exp(math.fsum(wi * math.log(xi) for wi, xi in zip(w, x)))
    mid = math.fsum(
        wi * (evaluate(f, (ybar + yi) / 2.0) + evaluate(f, abs(ybar - yi) / 2.0))
        for wi, yi in zip(w, y)
    )
    arith = math.fsum(wi * xi for wi, xi in zip(w, x))
    return _chain_report(
        TheoremId.AMGM,
        {"weights": w, "points": x},
        {"geometric": geo, "refined": mid, "arithmetic": arith},
    )


def superadditivity_refined(f: FunctionSpec, a: float, b: float) -> InequalityReport:
    """f(a) + f(b) + f(sqrt(2ab)) <= f(a + b)."""
    _check_nonneg(a=a, b=b)
    terms = {
        "f_a": evaluate(f, a),
        "f_b": evaluate(f, b),
        "refine": evaluate(f, math.sqrt(2.0 * a * b)),
    }
    return _report(TheoremId.SUPERADD, {"a": a, "b": b}, terms, evaluate(f, a + b))


def _mradical_args(m: int, a: float, b: float, t: float) -> list[float]:
    half = m // 2
    mean = (1.0 - t) * a + t * b
    spread = t * (1.0 - t)
    gap = abs(a - b)
    args = []
    for k in range(half + 1):
        e = 1.0 - 2.0 * k / m
        # Python's 0.0 ** 0.0 == 1.0 supplies the 0^0 = 1 convention.
        args.append(
            math.comb(half, k) ** (1.0 / m)
            * spread ** (k / m)
            * gap ** (2.0 * k / m)
            * mean**e
        )
    return args


def mradical_bound(f: FunctionSpec, m: int, a: float, b: float, t: float) -> InequalityReport:
    """Multi-term refinement for m-radical convex f, m even.

    sum_{k=0}^{m/2} f( C(m/2,k)^{1/m} (t(1-t))^{k/m} |a-b|^{2k/m}
    ((1-t)a + tb)^{1-2k/m} ) <= (1-t) f(a) + t f(b).

    The k = 0 term is f((1-t)a + tb).  For m = 2 this is
    :func:`jensen2_refined`.
    """
    if isinstance(m, bool) or int(m) != m or m < 2 or m % 2:
        raise ValueError(f"m must be an even integer >= 2, got {m}")
    m = int(m)
    _check_nonneg(a=a, b=b)
    _check_t(t)
    terms = {f"k{k}": evaluate(f, arg) for k, arg in enumerate(_mradical_args(m, a, b, t))}
    rhs = (1.0 - t) * evaluate(f, a) + t * evaluate(f, b)
    return _report(TheoremId.MRADICAL, {"m": m, "a": a, "b": b, "t": t}, terms, rhs)


def fourradical_bound(f: FunctionSpec, a: float, b: float, t: float) -> InequalityReport:
    """Three-term bound for 4-radical convex f: the m = 4 case of mradical_bound.

    The terms are f((1-t)a + tb), f(sqrt(t(1-t)) |a-b|) and
    f((2t(1-t))^{1/4} sqrt(|a-b| ((1-t)a + tb))).
    """
    r = mradical_bound(f, 4, a, b, t)
    terms = {"main": r.lhs_terms["k0"], "mixed": r.lhs_terms["k1"], "refine": r.lhs_terms["k2"]}
    return InequalityReport(
        TheoremId.FOURRADICAL, {"a": a, "b": b, "t": t}, terms, r.rhs, r.margin, r.passed
    )
