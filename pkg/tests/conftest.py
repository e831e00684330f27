import math

import pytest
from hypothesis import settings, strategies as st

from radconvex.funcspec import (
    Compose,
    ExpTrunc,
    FunctionSpec,
    GeomTrunc,
    NegLogTrunc,
    Pow,
    Scale,
    Series,
    Sum,
    parse,
)

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# Builtins used by the oracle matrix and several batteries.
MATRIX_SPECS = (
    [f"pow({k})" for k in range(1, 7)]
    + [f"exptrunc({k})" for k in range(4)]
    + [f"geomtrunc({k})" for k in range(3)]
    + [f"neglogtrunc({k})" for k in (1, 2)]
)
MATRIX_PS = (1.0, 1.5, 2.0, 3.0, 4.0, 5.0)

# Functions whose radical order is at least 2, so every 2-radical bound applies.
TWO_RADICAL_SPECS = (
    "pow(2)", "pow(3)", "pow(4)", "pow(2.5)", "exptrunc(1)", "exptrunc(2)",
    "geomtrunc(1)", "neglogtrunc(1)", "series(2, 1, 0.5, 3)",
    "pow(2) + 3*pow(4)", "compose(pow(2), pow(2))", "compose(exptrunc(0), pow(2))",
)


def theoretical_order(spec: str) -> float:
    """Largest p for which each builtin is p-radical convex (lowest power present)."""
    name, arg = spec.rstrip(")").split("(")
    k = float(arg)
    return k if name == "pow" else k + 1


@pytest.fixture(params=TWO_RADICAL_SPECS)
def two_radical(request) -> FunctionSpec:
    return parse(request.param)


leaves = st.one_of(
    st.floats(1.0, 6.0).map(lambda p: Pow(round(p, 3))),
    st.integers(0, 4).map(ExpTrunc),
    st.integers(0, 3).map(GeomTrunc),
    st.integers(0, 3).map(NegLogTrunc),
    st.builds(
        lambda n0, cs: Series(n0, tuple(cs)),
        st.integers(1, 4),
        st.lists(st.floats(0.0, 5.0).map(lambda c: round(c, 4)), min_size=1, max_size=4),
    ),
)


def _extend(children):
    return st.one_of(
        st.builds(lambda c, n: Scale(c, n), st.floats(0.01, 50.0).map(lambda c: round(c, 3)), children),
        st.builds(Sum, children, children),
        st.builds(Compose, children, children),
    )


nodes = st.recursive(leaves, _extend, max_leaves=5)
specs = nodes.map(FunctionSpec)


def sample_points(f: FunctionSpec, n: int = 200):
    d = f.domain_end
    hi = 10.0 if math.isinf(d) else 0.999 * d
    return [hi * i / (n - 1) for i in range(n)]
