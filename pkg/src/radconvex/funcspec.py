"""Candidate functions f: [0, D) -> [0, inf) with f(0) = 0.

Every function is an immutable expression tree wrapped in a
:class:`FunctionSpec`.  Trees are built from a handful of builtins
(powers and truncated Maclaurin series) closed under positive scaling,
addition and composition, so every representable function is
nonnegative, nondecreasing and convex with a zero anchor at the origin.

A small DSL reads and writes these trees::

    expr  := term { "+" term }
    term  := [ NUMBER "*" ] atom
    atom  := IDENT "(" args ")" | "(" expr ")"
    args  := value { "," value }

with IDENT one of ``pow``, ``exptrunc``, ``geomtrunc``, ``neglogtrunc``,
``series`` and ``compose``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

__all__ = [
    "DomainError",
    "ParseError",
    "Node",
    "Pow",
    "ExpTrunc",
    "GeomTrunc",
    "NegLogTrunc",
    "Series",
    "Scale",
    "Sum",
    "Compose",
    "FunctionSpec",
    "parse",
    "format_spec",
    "evaluate",
    "inverse",
]

ArrayLike = Union[float, np.ndarray]

# Hard cap on tail-series terms; convergence is checked long before this.
_MAX_TAIL_TERMS = 2000


class DomainError(ValueError):
    """Raised when a function is evaluated outside [0, domain_end)."""


class ParseError(ValueError):
    """Malformed DSL input.

    Attributes:
        position: Offset into the input string where the problem was found.
        message: Human readable description.
    """

    def __init__(self, position: int, message: str):
        super().__init__(f"at position {position}: {message}")
        self.position = position
        self.message = message


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------


class Node:
    """Base class of expression nodes.

    Subclasses implement ``_eval`` on float64 arrays already known to lie in
    the node's domain and expose ``domain_end``.
    """

    domain_end: float

    def _eval(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError


def _num(v: float) -> str:
    """Shortest text that parses back to the same float."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class Pow(Node):
    """x**p with p >= 1."""

    p: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise ValueError(f"pow exponent must be >= 1, got {self.p}")
        object.__setattr__(self, "p", float(self.p))

    @property
    def domain_end(self) -> float:
        return math.inf

    def _eval(self, x):
        return np.power(x, self.p)

    def __str__(self):
        return f"pow({_num(self.p)})"


def _tail_sum(x: np.ndarray, first_term: np.ndarray, ratio) -> np.ndarray:
    """Sum a positive series given its first term and a term-ratio callback.

    ``ratio(n)`` maps the current term to the next one.  All terms are
    nonnegative so the summation suffers no cancellation.
    """
    term = first_term.copy()
    total = first_term.copy()
    for n in range(_MAX_TAIL_TERMS):
        term = ratio(term, n)
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


@dataclass(frozen=True)
class ExpTrunc(Node):
    """e**x minus its Maclaurin polynomial of degree k."""

    k: int

    def __post_init__(self):
        _check_order(self.k, "exptrunc")

    @property
    def domain_end(self) -> float:
        return math.inf

    def _eval(self, x):
        k = self.k
        partial = np.zeros_like(x)
        term = np.ones_like(x)
        for n in range(1, k + 1):
            term = term * x / n
            partial += term
        with np.errstate(over="ignore"):
            closed = np.expm1(x) - partial
            full = np.exp(x)
        # Naive form cancels when the polynomial carries most of e**x.
        use_series = (x < 0.5) | (closed < 0.5 * full)
        if not np.any(use_series):
            return closed
        xs = x[use_series]
        first = np.power(xs, k + 1) / math.factorial(k + 1)
        series = _tail_sum(xs, first, lambda t, i: t * xs / (k + 2 + i))
        out = closed.copy()
        out[use_series] = series
        return out

    def __str__(self):
        return f"exptrunc({self.k})"


@dataclass(frozen=True)
class GeomTrunc(Node):
    """1/(1-x) minus sum_{n<=k} x**n, i.e. x**(k+1) / (1-x), on [0, 1)."""

    k: int

    def __post_init__(self):
        _check_order(self.k, "geomtrunc")

    @property
    def domain_end(self) -> float:
        return 1.0

    def _eval(self, x):
        return np.power(x, self.k + 1) / (1.0 - x)

    def __str__(self):
        return f"geomtrunc({self.k})"


@dataclass(frozen=True)
class NegLogTrunc(Node):
    """-ln(1-x) minus sum_{1<=n<=k} x**n / n, on [0, 1)."""

    k: int

    def __post_init__(self):
        _check_order(self.k, "neglogtrunc")

    @property
    def domain_end(self) -> float:
        return 1.0

    def _eval(self, x):
        k = self.k
        partial = np.zeros_like(x)
        power = np.ones_like(x)
        for n in range(1, k + 1):
            power = power * x
            partial += power / n
        full = -np.log1p(-x)
        closed = full - partial
        use_series = (x < 0.5) | (closed < 0.25 * full)
        if not np.any(use_series):
            return closed
        xs = x[use_series]
        first = np.power(xs, k + 1) / (k + 1)
        # term_n = x**n / n  ->  term_{n+1} = term_n * x * n / (n+1)
        series = _tail_sum(
            xs, first, lambda t, i: t * xs * (k + 1 + i) / (k + 2 + i)
        )
        out = closed.copy()
        out[use_series] = series
        return out

    def __str__(self):
        return f"neglogtrunc({self.k})"


@dataclass(frozen=True)
class Series(Node):
    """Finite power series sum_i coeffs[i] * x**(n0 + i) with n0 >= 1."""

    n0: int
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if isinstance(self.n0, bool) or int(self.n0) != self.n0 or self.n0 < 1:
            raise ValueError(f"series start index must be an integer >= 1, got {self.n0}")
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("series needs at least one coefficient")
        if any(not math.isfinite(c) or c < 0 for c in coeffs):
            raise ValueError("series coefficients must be finite and nonnegative")
        object.__setattr__(self, "n0", int(self.n0))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def domain_end(self) -> float:
        return math.inf

    def _eval(self, x):
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * np.power(x, self.n0)

    def __str__(self):
        return "series(" + ", ".join([str(self.n0), *map(_num, self.coeffs)]) + ")"


@dataclass(frozen=True)
class Scale(Node):
    """c * inner with c > 0."""

    c: float
    inner: Node

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"scale factor must be positive, got {self.c}")
        object.__setattr__(self, "c", float(self.c))

    @property
    def domain_end(self) -> float:
        return self.inner.domain_end

    def _eval(self, x):
        return self.c * self.inner._eval(x)

    def __str__(self):
        inner = str(self.inner)
        if isinstance(self.inner, (Sum, Scale)):
            inner = f"({inner})"
        return f"{_num(self.c)}*{inner}"


@dataclass(frozen=True)
class Sum(Node):
    left: Node
    right: Node

    @property
    def domain_end(self) -> float:
        return min(self.left.domain_end, self.right.domain_end)

    def _eval(self, x):
        return self.left._eval(x) + self.right._eval(x)

    def __str__(self):
        right = str(self.right)
        if isinstance(self.right, Sum):
            right = f"({right})"
        return f"{self.left} + {right}"


@dataclass(frozen=True)
class Compose(Node):
    """outer(inner(x)).

    Every node kind is increasing and convex with a zero at the origin, so
    any tree is a legal outer function.
    """

    outer: Node
    inner: Node

    @cached_property
    def domain_end(self) -> float:
        limit = self.outer.domain_end
        d_in = self.inner.domain_end
        if math.isinf(limit):
            return d_in
        # Largest x with inner(x) < limit; inner is nondecreasing.
        def below(x):
            with np.errstate(over="ignore", invalid="ignore"):
                return float(self.inner._eval(np.array([x]))[0]) < limit

        lo = 0.0
        hi = d_in if math.isfinite(d_in) else 1.0
        if math.isinf(d_in):
            while below(hi):
                lo, hi = hi, 2.0 * hi
                if hi > 1e300:
                    return math.inf
        else:
            probe = np.nextafter(d_in, 0.0)
            if below(probe):
                return d_in
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if below(mid):
                lo = mid
            else:
                hi = mid
        return hi

    def _eval(self, x):
        return self.outer._eval(self.inner._eval(x))

    def __str__(self):
        return f"compose({self.outer}, {self.inner})"


def _check_order(k, name):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"{name} order must be an integer >= 0, got {k!r}")


# ---------------------------------------------------------------------------
# FunctionSpec
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionSpec:
    """A candidate function together with its validity domain [0, domain_end).

    Two specs compare equal when their expression trees are equal; the label
    is informational.
    """

    expr: Node
    label: str = field(default="", compare=False)
    domain_end: float = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "domain_end", float(self.expr.domain_end))
        if not self.label:
            object.__setattr__(self, "label", str(self.expr))

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return evaluate(self, x)

    def __str__(self):
        return str(self.expr)

    def in_domain(self, x: float) -> bool:
        return 0.0 <= x < self.domain_end


def evaluate(f: FunctionSpec, x: ArrayLike) -> ArrayLike:
    """Evaluate ``f`` at a scalar or an array of points in [0, domain_end).

    Raises:
        DomainError: if any point is negative, NaN or at/after domain_end.
    """
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.size and not (np.all(arr >= 0.0) and np.all(arr < f.domain_end)):
        bad = arr[~((arr >= 0.0) & (arr < f.domain_end))][0]
        raise DomainError(f"{bad!r} outside [0, {f.domain_end}) for {f}")
    with np.errstate(over="ignore"):
        out = f.expr._eval(arr)
    # Each builtin carries no constant term, so pin the anchor exactly.
    out = np.where(arr == 0.0, 0.0, out)
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def inverse(f: FunctionSpec, y: float, x_hi: float | None = None) -> float:
    """Solve f(x) = y on [0, x_hi] for nondecreasing f.

    Powers are inverted in closed form; everything else by bisection.  When
    ``x_hi`` is omitted a bracket is grown by doubling inside the domain.

    Raises:
        ValueError: if y < 0.
        ArithmeticError: if f(x_hi) < y.
    """
    if y < 0 or not math.isfinite(y):
        raise ValueError(f"inverse needs a finite y >= 0, got {y}")
    if isinstance(f.expr, Pow):
        return y ** (1.0 / f.expr.p)
    if y == 0.0:
        return 0.0
    if x_hi is None:
        x_hi = _grow_bracket(f, y)
    if not f.in_domain(x_hi):
        raise DomainError(f"x_hi={x_hi} outside [0, {f.domain_end})")
    if evaluate(f, x_hi) < y:
        raise ArithmeticError(f"bracket failure: f({x_hi}) < {y}")
    lo, hi = 0.0, float(x_hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if evaluate(f, mid) < y:
            lo = mid
        else:
            hi = mid
    return lo if abs(evaluate(f, lo) - y) < abs(evaluate(f, hi) - y) else hi


def _grow_bracket(f: FunctionSpec, y: float) -> float:
    hi = 1.0
    d = f.domain_end
    while True:
        if math.isfinite(d) and hi >= d:
            hi = math.nextafter(d, 0.0)
            return hi
        if evaluate(f, hi) >= y:
            return hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError(f"cannot bracket f^-1({y})")


# ---------------------------------------------------------------------------
# DSL
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct>[-(),+*]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num" | "ident" | punct char | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        start = m.start(m.lastgroup)
        value = m.group(m.lastgroup)
        kind = value if m.lastgroup == "punct" else m.lastgroup
        toks.append(_Tok(kind, value, start))
        pos = m.end()
    toks.append(_Tok("end", "", max(0, n - 1)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ParseError(self.tok.pos, f"expected {kind!r}, found {found}")
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self.tok.pos, f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "+":
            self.advance()
            node = Sum(node, self.term())
        return node

    def term(self) -> Node:
        if self.tok.kind == "-":
            raise ParseError(self.tok.pos, "negative coefficients are not allowed")
        if self.tok.kind == "num":
            num = self.advance()
            self.expect("*")
            c = float(num.text)
            if c <= 0:
                raise ParseError(num.pos, "scale factor must be positive")
            return Scale(c, self.atom())
        return self.atom()

    def atom(self) -> Node:
        if self.tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if self.tok.kind != "ident":
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ParseError(self.tok.pos, f"expected a function name, found {found}")
        name = self.advance()
        self.expect("(")
        args = [self.value()]
        while self.tok.kind == ",":
            self.advance()
            args.append(self.value())
        self.expect(")")
        return self.build(name, args)

    def value(self):
        """A bare number (possibly negative) or a nested expression."""
        t = self.tok
        if t.kind == "-" and self.peek().kind == "num":
            self.advance()
            num = self.advance()
            return (-float(num.text), t.pos)
        if t.kind == "num" and self.peek().kind != "*":
            self.advance()
            return (float(t.text), t.pos)
        return (self.expr(), t.pos)

    def build(self, name: _Tok, args) -> Node:
        ident = name.text
        pos = name.pos

        def numeric(i):
            v, p = args[i]
            if isinstance(v, Node):
                raise ParseError(p, f"{ident} expects a number here")
            return v, p

        def integer(i, lo):
            v, p = numeric(i)
            if not v.is_integer() or v < lo:
                raise ParseError(p, f"{ident} expects an integer >= {lo}, got {_num(v)}")
            return int(v)

        def arity(n):
            if len(args) != n:
                raise ParseError(pos, f"{ident} takes {n} argument(s), got {len(args)}")

        if ident == "pow":
            arity(1)
            p, ppos = numeric(0)
            if p < 1:
                raise ParseError(ppos, f"pow exponent must be >= 1, got {_num(p)}")
            return Pow(p)
        if ident in ("exptrunc", "geomtrunc", "neglogtrunc"):
            arity(1)
            k = integer(0, 0)
            return {"exptrunc": ExpTrunc, "geomtrunc": GeomTrunc, "neglogtrunc": NegLogTrunc}[
                ident
            ](k)
        if ident == "series":
            if len(args) < 2:
                raise ParseError(pos, "series needs a start index and at least one coefficient")
            n0 = integer(0, 1)
            coeffs = []
            for i in range(1, len(args)):
                c, cpos = numeric(i)
                if c < 0:
                    raise ParseError(cpos, "negative coefficients are not allowed")
                coeffs.append(c)
            return Series(n0, tuple(coeffs))
        if ident == "compose":
            arity(2)
            outer, opos = args[0]
            inner, ipos = args[1]
            for v, p in ((outer, opos), (inner, ipos)):
                if not isinstance(v, Node):
                    raise ParseError(p, "compose expects function arguments")
            return Compose(outer, inner)
        raise ParseError(pos, f"unknown function {ident!r}")


def parse(text: str) -> FunctionSpec:
    """Parse DSL text into a :class:`FunctionSpec`.

    >>> parse("pow(2) + 3*pow(4)")(1.0)
    4.0
    """
    if not isinstance(text, str):
        raise TypeError("parse expects a string")
    node = _Parser(text).parse()
    return FunctionSpec(node)


def format_spec(f: FunctionSpec | Node) -> str:
    """Canonical DSL text; ``parse(format_spec(f)) == f``."""
    return str(f.expr if isinstance(f, FunctionSpec) else f)
