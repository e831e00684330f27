"""Radical convexity: classification and refined convexity inequalities.

A nonnegative f on [0, inf) with f(0) = 0 is p-radical convex when
u -> f(u**(1/p)) is convex.  The package estimates the largest such p for
a function given in a small DSL and checks the refined Jensen,
Hermite-Hadamard, superadditivity, multi-term and Hardy-type inequalities
that follow from it.
"""

__version__ = "0.1.0"

from .funcspec import (  # noqa: E402
    DomainError,
    FunctionSpec,
    ParseError,
    evaluate,
    format_spec,
    inverse,
    parse,
)
from .quadrature import QuadResult, QuadratureError, integrate  # noqa: E402
from .radical_analysis import (  # noqa: E402
    ConvexityVerdict,
    RadicalProfile,
    is_p_radical,
    max_radical_order,
    necessary_condition,
)

__all__ = [
    "__version__",
    "DomainError",
    "FunctionSpec",
    "ParseError",
    "evaluate",
    "format_spec",
    "inverse",
    "parse",
    "QuadResult",
    "QuadratureError",
    "integrate",
    "ConvexityVerdict",
    "RadicalProfile",
    "is_p_radical",
    "max_radical_order",
    "necessary_condition",
]
