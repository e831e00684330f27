"""``radconvex`` command line: classify, verify and bound.

Exit codes: 0 every inequality held, 1 at least one violation, 2 usage or
parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .funcspec import DomainError, FunctionSpec, ParseError, evaluate, parse
from .integral_thms import (
    IntegralReport,
    IntegralTheorem,
    average_value_report,
    continuous_jensen,
    hardy_finite,
    hh_first,
    hh_general,
    hh_second,
    split_interval_bound,
    unit_interval_chain,
)
from .pointwise_bounds import (
    InequalityReport,
    TheoremId,
    amgm_refined,
    fourradical_bound,
    identity_report,
    jensen2_refined,
    jensen_n_chain,
    mradical_bound,
    superadditivity_refined,
    upper_curve_report,
)
from .radical_analysis import (
    DEFAULT_GRID_N,
    DEFAULT_ITERS,
    DEFAULT_P_CAP,
    DEFAULT_TOL,
    NecessaryCheck,
    RadicalProfile,
    max_radical_order,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

SCREEN_ORDERS = (1.0, 2.0, 3.0, 4.0)


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def result_to_dict(r) -> dict:
    if isinstance(r, InequalityReport):
        return {
            "kind": "inequality",
            "theorem_id": r.theorem_id.value,
            "inputs": r.inputs,
            "lhs_terms": r.lhs_terms,
            "rhs": r.rhs,
            "chain": r.chain,
            "margin": r.margin,
            "pass": r.passed,
        }
    if isinstance(r, IntegralReport):
        return {
            "kind": "integral",
            "theorem_id": r.theorem_id.value,
            "interval": list(r.interval),
            "p": r.p,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "components": r.components,
            "quad_err": r.quad_err,
            "margin": r.margin,
            "pass": r.passed,
        }
    if isinstance(r, RadicalProfile):
        relevant = r.relevant_checks()
        margin = min((c.margin for c in relevant), default=0.0)
        return {
            "kind": "radical_profile",
            "theorem_id": "RADICAL_PROFILE",
            "p_max_estimate": r.p_max_estimate,
            "trace": [[p, ok] for p, ok in r.trace],
            "necessary_checks": [
                {"p": c.p, "x": c.x, "lhs": c.lhs, "rhs": c.rhs, "pass": c.passed}
                for c in r.necessary_checks
            ],
            "p_cap": r.p_cap,
            "iters": r.iters,
            "grid_n": r.grid_n,
            "x_max": r.x_max,
            "tol": r.tol,
            "margin": margin,
            "pass": r.consistent,
        }
    raise TypeError(f"cannot serialize {type(r).__name__}")


def result_from_dict(d: dict):
    kind = d["kind"]
    if kind == "inequality":
        return InequalityReport(
            TheoremId(d["theorem_id"]), d["inputs"], d["lhs_terms"], d["rhs"],
            d["margin"], d["pass"], d["chain"],
        )
    if kind == "integral":
        return IntegralReport(
            IntegralTheorem(d["theorem_id"]), tuple(d["interval"]), d["p"], d["lhs"],
            d["rhs"], d["components"], d["margin"], d["pass"], d["quad_err"],
        )
    if kind == "radical_profile":
        return RadicalProfile(
            p_max_estimate=d["p_max_estimate"],
            trace=[(p, ok) for p, ok in d["trace"]],
            necessary_checks=[
                NecessaryCheck(c["p"], c["x"], c["lhs"], c["rhs"], c["pass"])
                for c in d["necessary_checks"]
            ],
            p_cap=d["p_cap"], iters=d["iters"], grid_n=d["grid_n"],
            x_max=d["x_max"], tol=d["tol"],
        )
    raise ValueError(f"unknown result kind {kind!r}")


def result_passed(r) -> bool:
    return r.consistent if isinstance(r, RadicalProfile) else r.passed


@dataclass
class RunReport:
    command: str
    spec_text: str
    results: list = field(default_factory=list)
    started_at: str = ""
    duration: float = 0.0
    tool_version: str = __version__

    @property
    def overall_pass(self) -> bool:
        return all(result_passed(r) for r in self.results)

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "command": self.command,
            "spec_text": self.spec_text,
            "started_at": self.started_at,
            "duration": self.duration,
            "overall_pass": self.overall_pass,
            "results": [result_to_dict(r) for r in self.results],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(
            command=d["command"],
            spec_text=d["spec_text"],
            results=[result_from_dict(r) for r in d["results"]],
            started_at=d["started_at"],
            duration=d["duration"],
            tool_version=d["tool_version"],
        )

    def to_json(self) -> str:
        # repr-based float output is the shortest string that round-trips.
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem_id", "spec", "params", "lhs", "rhs", "margin", "pass"])
        for r in self.results:
            d = result_to_dict(r)
            if d["kind"] == "inequality":
                params, lhs, rhs = d["inputs"], sum(d["lhs_terms"].values()), d["rhs"]
                if d["chain"]:
                    vals = list(d["chain"].values())
                    lhs, rhs = vals[0], vals[-1]
            elif d["kind"] == "integral":
                params = {"interval": d["interval"], "p": d["p"]}
                lhs, rhs = d["lhs"], d["rhs"]
            else:
                params = {"p_cap": d["p_cap"], "x_max": d["x_max"]}
                lhs, rhs = d["p_max_estimate"], d["p_cap"]
            w.writerow([
                d["theorem_id"], self.spec_text, json.dumps(params, sort_keys=True),
                repr(float(lhs)), repr(float(rhs)), repr(float(d["margin"])), d["pass"],
            ])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# Human output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    return f"{v:.12g}" if isinstance(v, float) else str(v)


def _table_result(r) -> list[str]:
    d = result_to_dict(r)
    status = "PASS" if d["pass"] else "FAIL"
    if d["kind"] == "radical_profile":
        lines = [f"p_max estimate : {_fmt(d['p_max_estimate'])}"]
        if d["p_max_estimate"] == 0.0:
            lines.append("verdict        : not radical convex at p=1 (not convex on the grid)")
        else:
            lines.append(f"bracket width  : {_fmt(r.bracket_width)}  ({len(r.trace)} probes)")
        refuted = r.refuted_orders()
        if refuted:
            lines.append(
                "verdict        : necessary condition refutes p in {"
                + ", ".join(_fmt(p) for p in refuted) + "}; "
                + ", ".join(f"not {_fmt(p)}-radical" for p in refuted)
            )
        lines.append("trace (p, pass):")
        lines += [f"  {p:.10f}  {ok}" for p, ok in r.trace]
        lines.append("necessary condition  int_0^x f <= x f(x)/(p+1):")
        lines.append(f"  {'p':>12} {'x':>8} {'lhs':>20} {'rhs':>20}  pass")
        for c in r.necessary_checks:
            lines.append(
                f"  {c.p:12.6g} {c.x:8.4g} {c.lhs:20.12g} {c.rhs:20.12g}  {c.passed}"
            )
        lines.append(f"consistency    : {status}")
        return lines
    head = f"{d['theorem_id']:<12} {status}  margin={_fmt(d['margin'])}"
    if d["kind"] == "inequality":
        params = ", ".join(f"{k}={_fmt(v)}" for k, v in d["inputs"].items())
        lines = [head, f"  inputs: {params}"]
        if d["chain"]:
            lines.append("  chain : " + " <= ".join(f"{k}={_fmt(v)}" for k, v in d["chain"].items()))
        else:
            lines.append("  lhs   : " + " + ".join(f"{k}={_fmt(v)}" for k, v in d["lhs_terms"].items()))
            lines.append(f"  rhs   : {_fmt(d['rhs'])}")
        return lines
    lines = [head, f"  interval: [{_fmt(d['interval'][0])}, {_fmt(d['interval'][1])}]"
             + (f"  p={_fmt(d['p'])}" if d["p"] is not None else "")]
    lines.append(f"  lhs={_fmt(d['lhs'])}  rhs={_fmt(d['rhs'])}  quad_err={d['quad_err']:.3g}")
    lines.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in d["components"].items()))
    return lines


def render_table(report: RunReport, limit: int = 20) -> str:
    lines = [f"radconvex {report.command}  spec: {report.spec_text}"]
    shown = report.results
    failing = [r for r in report.results if not result_passed(r)]
    if len(shown) > limit:
        # Long batches: show violations first, then a summary.
        shown = (failing + [r for r in report.results if result_passed(r)])[:limit]
    for r in shown:
        lines += _table_result(r)
    if len(report.results) > len(shown):
        lines.append(f"... {len(report.results) - len(shown)} more results not shown")
    lines.append(
        f"{len(report.results) - len(failing)}/{len(report.results)} passed; "
        f"overall: {'PASS' if report.overall_pass else 'FAIL'}"
    )
    return "\n".join(lines)


def emit(report: RunReport, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(report.to_json() + "\n")
    elif fmt == "csv":
        out.write(report.to_csv())
    else:
        out.write(render_table(report) + "\n")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _effective_x_max(f: FunctionSpec) -> float:
    return 10.0 if math.isinf(f.domain_end) else 0.9 * f.domain_end


def _screen_xs(f: FunctionSpec) -> list[float]:
    d = f.domain_end
    xs = {x for x in (0.25, 0.5, 1.0, 2.0, 5.0) if x < 0.95 * d}
    if math.isfinite(d):
        xs.add(0.9 * d)
    return sorted(xs)


def cmd_classify(args) -> RunReport:
    f = parse(args.spec)
    profile = max_radical_order(
        f,
        p_cap=args.p_cap,
        iters=args.iters,
        grid_n=args.grid_n,
        x_max=args.x_max,
        tol=args.tol,
        screen_ps=(*SCREEN_ORDERS, None),
        screen_xs=args.screen_x or _screen_xs(f),
    )
    return RunReport("classify", args.spec, [profile])


def _floats(text: str | None) -> list[float] | None:
    if text is None:
        return None
    return [float(v) for v in text.split(",") if v.strip()]


def _pick(value, default):
    return default if value is None else value


def _run_theorem(name: str, f: FunctionSpec, a, b, t, p, m, x, w, pts, g):
    if name == "jensen2":
        return jensen2_refined(f, a, b, t)
    if name == "identity":
        return identity_report(a, b, t)
    if name == "mradical":
        return mradical_bound(f, m, a, b, t)
    if name == "fourradical":
        return fourradical_bound(f, a, b, t)
    if name == "superadd":
        return superadditivity_refined(f, a, b)
    if name == "upper":
        return upper_curve_report(f, t)
    if name == "jensen":
        return jensen_n_chain(f, w, pts)
    if name == "amgm":
        return amgm_refined(f, w, pts)
    if name == "hh1":
        return hh_first(f, a, b)
    if name == "hh2":
        return hh_second(f, a, b)
    if name == "hhgen":
        return hh_general(f, a, b)
    if name == "unit":
        return unit_interval_chain(f)
    if name == "split":
        return split_interval_bound(f)
    if name == "contjensen":
        return continuous_jensen(f, g, a, b)
    if name == "hardy":
        return hardy_finite(f, p, a, b)
    if name == "avg":
        return average_value_report(f, p, x)
    raise ValueError(f"unknown theorem {name!r}")


THEOREMS = (
    "jensen2", "jensen", "upper", "amgm", "superadd", "mradical", "fourradical",
    "identity", "hh1", "hh2", "hhgen", "unit", "split", "contjensen", "hardy", "avg",
)
_INTERVAL_THEOREMS = {"hh1", "hh2", "hhgen", "contjensen", "hardy"}
_FIXED_THEOREMS = {"unit", "split"}


def _dirichlet(r: np.random.Generator, n: int) -> list[float]:
    e = r.exponential(1.0, n)
    w = e / e.sum()
    w[-1] = 1.0 - math.fsum(w[:-1])
    return [float(v) for v in w]


def _random_instance(name: str, f: FunctionSpec, r: np.random.Generator, base: dict) -> dict:
    X = _effective_x_max(f)
    inst = dict(base)
    if name in _INTERVAL_THEOREMS:
        lo, hi = sorted(r.uniform(0.0, X, 2))
        inst["a"], inst["b"] = float(max(lo, 1e-3)), float(max(hi, lo + 1e-3, 2e-3))
    elif name == "superadd":
        inst["a"], inst["b"] = (float(v) for v in r.uniform(0.0, X / 2.0, 2))
    elif name in ("jensen2", "identity", "mradical", "fourradical"):
        inst["a"], inst["b"] = (float(v) for v in r.uniform(0.0, X, 2))
        inst["t"] = float(r.uniform(0.0, 1.0))
    elif name == "upper":
        inst["t"] = float(r.uniform(0.0, 1.0))
    elif name in ("jensen", "amgm"):
        n = int(r.integers(2, 9))
        inst["w"] = _dirichlet(r, n)
        ys = r.uniform(0.0, X, n)
        if name == "amgm":
            ys = np.maximum(ys, 1e-3)
            inst["pts"] = [float(v) for v in evaluate(f, ys)]
        else:
            inst["pts"] = [float(v) for v in ys]
    elif name == "avg":
        inst["x"] = float(r.uniform(1e-3, X))
    return inst


def cmd_verify(args) -> RunReport:
    f = parse(args.spec)
    name = args.theorem
    g = None
    if args.g is not None:
        gspec = parse(args.g)
        g = lambda x: evaluate(gspec, x)  # noqa: E731
    interval = name in _INTERVAL_THEOREMS
    base = {
        "a": _pick(args.a, 1.0 if interval else 0.0),
        "b": _pick(args.b, 2.0 if interval else 1.0),
        "t": _pick(args.t, 0.5),
        "p": _pick(args.p, 2.0),
        "m": _pick(args.m, 4 if name == "mradical" else 2),
        "x": _pick(args.x, 1.0),
        "w": _floats(args.weights),
        "pts": _floats(args.points),
        "g": g,
    }
    if name in ("jensen", "amgm") and not args.samples:
        if base["pts"] is None:
            raise ValueError(f"{name} needs --points (and optionally --weights)")
        if base["w"] is None:
            n = len(base["pts"])
            base["w"] = [1.0 / n] * n
    results = []
    if args.samples and name not in _FIXED_THEOREMS:
        r = np.random.Generator(np.random.Philox(args.seed))
        for _ in range(args.samples):
            results.append(_run_theorem(name, f, **_random_instance(name, f, r, base)))
    else:
        results.append(_run_theorem(name, f, **base))
    return RunReport(f"verify {name}", args.spec, results)


def cmd_bound(args) -> RunReport:
    f = parse(args.spec)
    a = _pick(args.a, 0.0)
    b = _pick(args.b, 1.0)
    t = _pick(args.t, 0.5)
    m = args.m
    if m is None:
        m = 2 if args.p is None or args.p < 4 else 2 * int(args.p // 2)
    results = [jensen2_refined(f, a, b, t) if m == 2 else mradical_bound(f, m, a, b, t)]
    if f.in_domain(1.0):
        results.append(upper_curve_report(f, t))
    return RunReport("bound", args.spec, results)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _seed_default() -> int:
    env = os.environ.get("RADCONVEX_SEED")
    return int(env) if env else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radconvex",
        description="Classify functions by radical-convexity order and verify refined convexity inequalities.",
    )
    parser.add_argument("--version", action="version", version=f"radconvex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")

    c = sub.add_parser("classify", help="estimate the largest radical order p")
    c.add_argument("spec")
    c.add_argument("--p-cap", type=float, default=DEFAULT_P_CAP)
    c.add_argument("--iters", type=int, default=DEFAULT_ITERS)
    c.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N)
    c.add_argument("--x-max", type=float, default=None)
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.add_argument("--screen-x", type=lambda s: _floats(s), default=None,
                   help="comma-separated x values for the necessary-condition screen")
    common(c)

    v = sub.add_parser("verify", help="check one inequality, explicitly or on random instances")
    v.add_argument("theorem", choices=THEOREMS)
    v.add_argument("spec")
    for flag in ("--a", "--b", "--t", "--p", "--x"):
        v.add_argument(flag, type=float, default=None)
    v.add_argument("--m", type=int, default=None)
    v.add_argument("--weights", default=None, help="comma-separated weights summing to 1")
    v.add_argument("--points", default=None, help="comma-separated points")
    v.add_argument("--g", default=None, help="inner function for contjensen (default: identity)")
    v.add_argument("--samples", type=int, default=0)
    v.add_argument("--seed", type=int, default=None)
    common(v)

    bnd = sub.add_parser("bound", help="print every term of a refined convexity bound")
    bnd.add_argument("spec")
    for flag in ("--a", "--b", "--t", "--p"):
        bnd.add_argument(flag, type=float, default=None)
    bnd.add_argument("--m", type=int, default=None)
    common(bnd)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and args.command == "verify":
        try:
            args.seed = _seed_default()
        except ValueError:
            parser.error("RADCONVEX_SEED must be an integer")
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    try:
        report = {"classify": cmd_classify, "verify": cmd_verify, "bound": cmd_bound}[
            args.command
        ](args)
    except ParseError as exc:
        print(f"radconvex: parse error {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError, TypeError) as exc:
        print(f"radconvex: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"radconvex: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    report.started_at = started
    report.duration = time.perf_counter() - t0
    emit(report, args.format)
    if args.command == "verify" and not report.overall_pass:
        return EXIT_VIOLATION
    if args.command == "classify" and not report.overall_pass:
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
