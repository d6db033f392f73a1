"""Command-line front end.

Subcommands: classify | green | solve | sign | transform | check. Problems
come in as JSON files (expressions as strings in the variable t); results
go out as deterministic CSV ("%.12g" cells) or short text reports.

Exit codes: 0 ok, 2 unsupported or degenerate case, 3 resonance detected,
4 convergence failure, 5 parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bvp as _bvp
from . import exprparse as _ep
from . import involution as _inv
from . import ivp as _ivp
from .core import (BvpProblem, CaseVariant, IvpProblem, ScalarField,
                   classify_bvp, classify_ivp)
from .errors import (CannotShootError, ContractionGateError, ConvergenceError,
                     DegenerateProblemError, DomainError, EvalDomainError,
                     NonUniqueSolutionError, ParseError, QuadratureError,
                     RefleqError, ResonanceError, UnsupportedCaseError)
from .numerics import Grid, oracle_bvp_shooting, oracle_ivp, residual_check

EXIT_OK = 0
EXIT_UNSUPPORTED = 2
EXIT_RESONANT = 3
EXIT_NO_CONVERGENCE = 4
EXIT_PARSE = 5


class SpecFileError(RefleqError):
    """Problem-specification file is malformed."""


@dataclass
class LoadedSpec:
    kind: str
    ivp: Optional[IvpProblem] = None
    bvp: Optional[BvpProblem] = None
    general: Optional[_inv.GeneralProblem] = None
    half_width: float = 1.0
    raw: Optional[dict] = None


def _constant_from(src: str, what: str) -> float:
    tree = _ep.parse(src)
    if not _ep.is_constant(tree):
        raise SpecFileError(f"{what} must be a constant expression, got {src!r}")
    return _ep.evaluate(tree, 0.0)


def _field(spec: dict, key: str, domain, default: Optional[str] = None) -> ScalarField:
    src = spec.get(key, default)
    if src is None:
        raise SpecFileError(f"missing expression field {key!r}")
    if isinstance(src, dict):
        # piecewise form emitted by `transform`: one expression per side of 0
        left = _ep.parse(src["left"])
        right = _ep.parse(src["right"])
        return ScalarField(
            lambda t: _ep.evaluate(left if t <= 0 else right, t),
            domain, True, key)
    return _ep.field_from_expression(str(src), domain, name=key)


def load_spec(path: str) -> LoadedSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFileError(f"cannot read problem spec {path}: {exc}") from exc
    kind = raw.get("kind")
    if kind == "ivp":
        a = _constant_from(str(raw["a"]), "a")
        b = _constant_from(str(raw["b"]), "b")
        h = _field(raw, "h", (-math.inf, math.inf))
        return LoadedSpec("ivp", ivp=IvpProblem(
            a=a, b=b, t0=float(raw["t0"]), c=float(raw["c"]), h=h), raw=raw)
    if kind == "bvp":
        T = float(raw["T"])
        dom = (-T, T)
        return LoadedSpec("bvp", bvp=BvpProblem(
            a=_field(raw, "a", dom), b=_field(raw, "b", dom, default="0"),
            T=T, h=_field(raw, "h", dom, default="0")), raw=raw)
    if kind == "general":
        inv = raw.get("involution")
        if not inv:
            raise SpecFileError("kind 'general' needs an involution object")
        tau = tuple(float(x) for x in inv["domain"])
        phi = _field(inv, "phi", tau)
        dphi = _field(inv, "dphi", tau)
        involution = _inv.Involution(phi=phi, dphi=dphi, domain=tau,
                                     fixed_point=float(inv["fixed_point"]))
        gp = _inv.GeneralProblem(
            a=_field(raw, "a", tau), b=_field(raw, "b", tau, default="0"),
            d=_field(raw, "d", tau, default="1"),
            h=_field(raw, "h", tau, default="0"),
            involution=involution)
        return LoadedSpec("general", general=gp,
                          half_width=float(raw.get("half_width", 1.0)), raw=raw)
    raise SpecFileError(f"kind must be ivp|bvp|general, got {kind!r}")


def _fmt(x: float) -> str:
    return "%.12g" % x


def _write_atomic(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".refleq-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_range(text: Optional[str], fallback) -> tuple[float, float]:
    if text is None:
        return fallback
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise SpecFileError(f"range must be 'lo,hi', got {text!r}") from exc
    return lo, hi


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _classify_ivp_report(p: IvpProblem) -> str:
    tag = classify_ivp(p.a, p.b)
    parts = [tag.variant.value]
    if tag.variant is CaseVariant.C1:
        parts.append(f"eta = {_ivp.eta_threshold(p.a, p.b):.6f}")
    elif tag.variant is CaseVariant.C2:
        parts.append(f"sigma = {_ivp.c2_sign_threshold(p.a, p.b):.6f}")
    elif tag.variant is CaseVariant.C3_1:
        parts.append(f"1/a = {1.0 / p.a:.6f}")
    unique = _ivp.uniqueness_check(p.a, p.b, p.t0)
    parts.append("unique at t0" if unique else "NO unique solution at t0")
    return ", ".join(parts)


def _classify_bvp_report(p: BvpProblem) -> str:
    a = p.a.restrict(p.interval)
    b = p.b.restrict(p.interval)
    tag = classify_bvp(a, b)
    v = tag.variant
    if v in (CaseVariant.C4P, CaseVariant.C5P):
        return f"{v.value} (resonant)"
    if v is CaseVariant.MIXED:
        c = _bvp.contraction_constant(p)
        gate = "contraction ok" if c < 1.0 else "contraction NOT guaranteed"
        return f"mixed, constant = {c:.6f} ({gate})"
    prim = _bvp.build_primitives(a, b, p.T)
    AT = prim.A(p.T)
    parts = [v.value]
    if v in (CaseVariant.C1P, CaseVariant.C2P):
        parts.append(f"k = {tag.k:g}")
    thr = None
    if v is CaseVariant.C3P:
        thr = 0.5
    elif tag.k > -1.0:
        thr = _bvp.sigma_threshold(tag.k)
    if thr is not None:
        parts.append(f"sigma(k) = {thr:.6f}")
    parts.append(f"|A(T)| = {abs(AT):.6f}")
    try:
        _bvp._starred_conditions(tag, AT)
        if v is CaseVariant.C2P and tag.k < -1.0:
            parts.append("sign guaranteed")
        elif thr is not None and abs(AT) < thr:
            parts.append("sign guaranteed")
        else:
            parts.append("sign not guaranteed")
    except ResonanceError:
        parts.append("resonant")
    return ", ".join(parts)


def cmd_classify(args) -> int:
    spec = load_spec(args.spec)
    if spec.kind == "ivp":
        report = _classify_ivp_report(spec.ivp)
    elif spec.kind == "bvp":
        report = _classify_bvp_report(spec.bvp)
    else:
        bvp_problem, _ = _inv.reflection_reduction(spec.general,
                                                   spec.half_width)
        report = "general -> reflection: " + _classify_bvp_report(bvp_problem)
    _write_atomic(args.out, report + "\n")
    return EXIT_OK


def _kernel_for(spec: LoadedSpec):
    if spec.kind == "ivp":
        return _ivp.green_ivp(spec.ivp.a, spec.ivp.b), (-1.0, 1.0)
    if spec.kind == "bvp":
        p = spec.bvp
        tag = classify_bvp(p.a.restrict(p.interval), p.b.restrict(p.interval))
        if tag.variant in (CaseVariant.C4P, CaseVariant.C5P):
            raise ResonanceError(f"{tag} is resonant: no Green's function")
        if tag.variant is CaseVariant.MIXED:
            raise UnsupportedCaseError(
                "mixed coefficients have no closed-form kernel; "
                "use `solve` (fixed point) instead")
        return _bvp.green_bvp_nonconstant(p), (-p.T, p.T)
    raise UnsupportedCaseError("`green` expects an ivp or bvp spec")


def cmd_green(args) -> int:
    spec = load_spec(args.spec)
    kernel, default_range = _kernel_for(spec)
    t_lo, t_hi = _parse_range(args.t_range, default_range)
    s_lo, s_hi = _parse_range(args.s_range, default_range)
    ts = np.linspace(t_lo, t_hi, args.n)
    ss = np.linspace(s_lo, s_hi, args.n)
    lines = ["t,s,G"]
    for t in ts:
        for s in ss:
            lines.append(f"{_fmt(t)},{_fmt(s)},{_fmt(kernel(float(t), float(s)))}")
    _write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _solve_dispatch(spec: LoadedSpec, tol: float, force: bool):
    if spec.kind == "ivp":
        p = spec.ivp
        u = _ivp.solve_ivp(p)
        dom = (-1.0, 1.0)
        return u, dom, (p.a, p.b, p.h)
    if spec.kind == "bvp":
        p = spec.bvp
        tag = classify_bvp(p.a.restrict(p.interval), p.b.restrict(p.interval))
        if tag.variant in (CaseVariant.C4P, CaseVariant.C5P):
            raise ResonanceError(
                f"{tag} is resonant: solutions form a family; "
                "use the library's resonant-family API")
        if tag.variant is CaseVariant.MIXED:
            u = _bvp.solve_mixed_picard(p, tol=min(tol, 1e-9), force=force)
        else:
            u = _bvp.solve_bvp(p)
        return u, (-p.T, p.T), (p.a, p.b, p.h)
    g = spec.general
    u = _inv.solve_general(g, half_width=spec.half_width, force=force)
    return u, g.boundary, None


def cmd_solve(args) -> int:
    spec = load_spec(args.spec)
    u, dom, eq = _solve_dispatch(spec, args.tol, args.force)
    ts = np.linspace(dom[0], dom[1], args.n)
    lines = ["t,u"] + [f"{_fmt(t)},{_fmt(u(float(t)))}" for t in ts]
    _write_atomic(args.out, "\n".join(lines) + "\n")
    if eq is not None:
        a, b, h = eq
        hw = min(-dom[0], dom[1])
        grid = Grid.symmetric(hw * (1.0 - 1e-9), 41)
        res = residual_check(u, a, b, h, grid, step=1e-4)
        summary = f"# max residual = {res:.3e}\n"
    else:
        summary = "# transported solution (residual checked in source frame)\n"
    sys.stdout.write(summary)
    return EXIT_OK


def cmd_sign(args) -> int:
    spec = load_spec(args.spec)
    if spec.kind == "ivp":
        p = spec.ivp
        report = _ivp.sign_classify_ivp(p.a, p.b)
        lines = [f"case {report.case.variant.value}"]
        for name, val in report.thresholds.items():
            lines.append(f"threshold {name} = {val:.6f}")
        for w in report.wedges:
            rng = f"({w.t_lo:g}, {w.t_hi:g})"
            lines.append(f"wedge {w.region}: sign {w.sign:+d} iff t in {rng}")
        if report.band is not None:
            lines.append(f"band [{report.band.lo:g}, {report.band.hi:g}] x R: "
                         f"sign {report.band.sign:+d}; sign changes on any "
                         "wider band")
        if report.notes:
            lines.append(report.notes)
        text = "\n".join(lines) + "\n"
        kernel = _ivp.green_ivp(p.a, p.b)
        dom = (-1.0, 1.0)
    else:
        p = spec.bvp
        verdict = _bvp.constant_sign_check(p)
        lines = [f"case {verdict.case}", f"A(T) = {verdict.A_T:.6f}"]
        if verdict.threshold is not None:
            lines.append(f"threshold sigma = {verdict.threshold:.6f}")
        lines.append(f"verdict: {verdict}")
        text = "\n".join(lines) + "\n"
        kernel = _bvp.green_bvp_nonconstant(p)
        dom = (-p.T, p.T)
    sys.stdout.write(text)
    if args.out:
        ts = np.linspace(dom[0], dom[1], args.n)
        lines = ["t,s,G"]
        for t in ts:
            for s in ts:
                lines.append(f"{_fmt(t)},{_fmt(s)},{_fmt(kernel(float(t), float(s)))}")
        _write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _transformed_expressions(raw: dict, half_width: float) -> dict:
    """Compose the problem's expressions with the correspondence map at
    the expression level (no sampling), producing the normalized
    reflection problem. Coefficients that differ across s = 0 are emitted
    in the piecewise {left, right} form."""
    inv = raw["involution"]
    tau1 = float(inv["domain"][0])
    phi = _ep.parse(str(inv["phi"]))
    dphi = _ep.parse(str(inv["dphi"]))
    t0 = float(inv["fixed_point"])
    s0 = 0.0
    m = (t0 - tau1) / (s0 - (-half_width))

    # f_left(s) = tau1 + (s + S) m ;  f_right(s) = phi(f_left(-s))
    S = half_width
    f_left = _ep.parse(f"{_fmt(tau1)} + (t + {_fmt(S)}) * {_fmt(m)}")
    f_left_reflected = _ep.substitute(f_left, _ep.Neg(_ep.Var()))
    f_right = _ep.substitute(phi, f_left_reflected)
    df_left = _ep.Num(m)
    # chain rule: f'(s) = phi'(g(-s)) * m * (-1) * (-1)
    df_right = _ep.Bin("*", _ep.substitute(dphi, f_left_reflected), _ep.Num(m))

    def compose(src: str, side_f):
        return _ep.substitute(_ep.parse(str(src)), side_f)

    out = {}
    for key, default in (("a", None), ("b", "0"), ("h", "0")):
        src = raw.get(key, default)
        if src is None:
            raise SpecFileError(f"missing expression field {key!r}")
        d_src = raw.get("d", "1")
        exprs = {}
        for side, f_side, df_side in (("left", f_left, df_left),
                                      ("right", f_right, df_right)):
            # normalized coefficient: field(f) * f' / d(f)
            tree = _ep.Bin("/", _ep.Bin("*", compose(src, f_side), df_side),
                           compose(d_src, f_side))
            exprs[side] = _ep.to_source(tree)
        if exprs["left"] == exprs["right"]:
            out[key] = exprs["left"]
        else:
            out[key] = exprs
    return out


def cmd_transform(args) -> int:
    spec = load_spec(args.spec)
    if spec.kind != "general" or spec.general is None:
        raise UnsupportedCaseError("`transform` expects a 'general' spec "
                                   "with an involution")
    # validate the reduction numerically before emitting it
    _inv.reflection_reduction(spec.general, spec.half_width)
    fields = _transformed_expressions(spec.raw, spec.half_width)
    doc = {"kind": "bvp", "T": spec.half_width, **fields}
    _write_atomic(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    spec = load_spec(args.spec)
    if spec.kind == "ivp":
        p = spec.ivp
        hw = max(1.0, 2.0 * abs(p.t0))
        grid = Grid.symmetric(hw, 2049)
        closed = _ivp.solve_ivp(p)
        oracle = oracle_ivp(p, grid)
        samples = np.linspace(-hw, hw, 5)
    elif spec.kind == "bvp":
        p = spec.bvp
        tag = classify_bvp(p.a.restrict(p.interval), p.b.restrict(p.interval))
        if tag.variant in (CaseVariant.C4P, CaseVariant.C5P):
            raise ResonanceError(f"{tag} is resonant; no unique solution "
                                 "to cross-check")
        if tag.variant is CaseVariant.MIXED:
            closed = _bvp.solve_mixed_picard(p, force=args.force)
        else:
            closed = _bvp.solve_bvp(p)
        oracle = oracle_bvp_shooting(p)
        samples = np.linspace(-p.T * (1 - 1e-9), p.T * (1 - 1e-9), 5)
    else:
        raise UnsupportedCaseError("`check` expects an ivp or bvp spec")
    diff = max(abs(closed(float(t)) - oracle(float(t))) for t in samples)
    _write_atomic(args.out, f"max |closed-form - oracle| = {diff:.3e}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="refleq",
        description=("Solvers and Green's-function diagnostics for "
                     "x'(t) + a(t) x(-t) + b(t) x(t) = h(t). Expressions use "
                     "the variable t, the constant pi, operators + - * / ^ "
                     f"and the functions {', '.join(_ep.FUNCTIONS)}."))
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, extra in (
            ("classify", cmd_classify, ()),
            ("green", cmd_green, ("ranges",)),
            ("solve", cmd_solve, ()),
            ("sign", cmd_sign, ()),
            ("transform", cmd_transform, ()),
            ("check", cmd_check, ())):
        sp = sub.add_parser(name)
        sp.add_argument("--spec", required=True, help="problem spec JSON")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--n", type=int, default=513, help="grid size")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--force", action="store_true",
                        help="iterate even when the contraction gate fails")
        if "ranges" in extra:
            sp.add_argument("--t-range", dest="t_range", default=None,
                            help="t sampling range 'lo,hi'")
            sp.add_argument("--s-range", dest="s_range", default=None,
                            help="s sampling range 'lo,hi'")
        sp.set_defaults(fn=fn)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, EvalDomainError, SpecFileError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ResonanceError, CannotShootError, NonUniqueSolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESONANT
    except (ConvergenceError, ContractionGateError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (UnsupportedCaseError, DegenerateProblemError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
