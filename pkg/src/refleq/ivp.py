"""Constant-coefficient initial value problem

    x'(t) + a x(-t) + b x(t) = h(t),   x(t0) = c.

Provides the homogeneous pair (u~, v~), the explicit piecewise Green's
kernel per case, solution assembly by quadrature, the alternative
closed-form solvers for the degenerate cases a = +/-b, and the sign
(maximum / antimaximum) classification of the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (CaseTag, CaseVariant, GreenKernel, IvpProblem, ScalarField,
                   classify_ivp, oriented_indicator)
from .errors import (DegenerateProblemError, NonUniqueSolutionError,
                     UnsupportedCaseError, VerificationError)
from .numerics import antiderivative_field, integrate

__all__ = [
    "HomogeneousPair",
    "homogeneous_pair",
    "uniqueness_check",
    "green_ivp",
    "green_ivp_assembled",
    "solve_ivp",
    "alt_solve_c31",
    "alt_solve_c32",
    "eta_threshold",
    "c2_sign_threshold",
    "WedgeRule",
    "BandRule",
    "SignReport",
    "sign_classify_ivp",
]


def _omega(a: float, b: float) -> float:
    return math.sqrt(abs(a * a - b * b))


def _homogeneous_u(a: float, b: float, case: CaseVariant):
    """Closed-form solution of u' + a u(-t) + b u(t) = 0 with u(0) = 1."""
    w = _omega(a, b)
    if case is CaseVariant.C1:
        r = (a + b) / w
        return lambda t: math.cos(w * t) - r * math.sin(w * t)
    if case is CaseVariant.C2:
        r = (a + b) / w
        return lambda t: math.cosh(w * t) - r * math.sinh(w * t)
    if case is CaseVariant.C3_1:
        return lambda t: 1.0 - 2.0 * a * t
    return lambda t: 1.0  # C3.2


@dataclass(frozen=True)
class HomogeneousPair:
    """u~ solves u' + a u(-t) + b u(t) = 0, v~ solves v' - a v(-t) + b v(t) = 0,
    both normalized to 1 at t = 0."""

    u_tilde: ScalarField
    v_tilde: ScalarField
    case: CaseTag
    omega: float


def homogeneous_pair(a: float, b: float) -> HomogeneousPair:
    case = classify_ivp(a, b)
    u = _homogeneous_u(a, b, case.variant)
    # v~ is the same construction with the reflection coefficient negated;
    # (-a, b) lands in the swapped affine/constant case when a = +/-b.
    case_v = classify_ivp(-a, b).variant
    v = _homogeneous_u(-a, b, case_v)
    return HomogeneousPair(
        u_tilde=ScalarField(u, name="u~"),
        v_tilde=ScalarField(v, name="v~"),
        case=case,
        omega=_omega(a, b),
    )


def uniqueness_check(a: float, b: float, t0: float, tol: float = 1e-12) -> bool:
    """True iff the problem with initial point t0 has a unique solution,
    i.e. u~(t0) != 0.

    Zeros of u~ are located from the closed forms: for the trigonometric
    case they recur with period pi/omega; the hyperbolic case has a single
    zero, and only when ab > 0; the affine case vanishes at 1/(2a); the
    constant case never vanishes. Root locations are compared at absolute
    tolerance, which avoids false negatives from evaluating u~ itself
    near a cancellation.
    """
    case = classify_ivp(a, b).variant
    w = _omega(a, b)
    if case is CaseVariant.C1:
        root_phase = math.atan(w / (a + b))
        r = (w * t0 - root_phase) / math.pi
        return abs(r - round(r)) * math.pi > tol
    if case is CaseVariant.C2:
        if a * b <= 0:
            return True
        root = math.atanh(w / (a + b)) / w
        return abs(t0 - root) > tol
    if case is CaseVariant.C3_1:
        return abs(t0 - 1.0 / (2.0 * a)) > tol
    return True  # C3.2: u~ == 1


# ---------------------------------------------------------------------------
# Green's kernel
# ---------------------------------------------------------------------------

def _branches(a: float, b: float, case: CaseVariant):
    """Smooth closed-form branches (near, far) of the kernel.

    ``near(t, s)`` is the branch on 0 <= s <= t (negated on t <= s <= 0),
    ``far(t, s)`` the one on -t <= s <= 0 (negated on 0 <= s <= -t).
    """
    w = _omega(a, b)
    if case is CaseVariant.C1:
        def near(t, s):
            return math.cos(w * (s - t)) + (b / w) * math.sin(w * (s - t))

        def far(t, s):
            return (a / w) * math.sin(w * (s + t))
    elif case is CaseVariant.C2:
        def near(t, s):
            return math.cosh(w * (s - t)) + (b / w) * math.sinh(w * (s - t))

        def far(t, s):
            return (a / w) * math.sinh(w * (s + t))
    elif case is CaseVariant.C3_1:
        def near(t, s):
            return 1.0 + a * (s - t)

        def far(t, s):
            return a * (s + t)
    else:  # C3.2
        def near(t, s):
            return 1.0 + a * (t - s)

        def far(t, s):
            return a * (s + t)
    return near, far


def green_ivp(a: float, b: float) -> GreenKernel:
    """Explicit piecewise Green's kernel of the initial value problem.

    Supported on |s| <= |t|; zero elsewhere. Shared region boundaries
    (s = 0 and s = +/-t) take the branch adjoining the diagonal, which is
    the convention the oriented-indicator assembly produces; the choice is
    invisible to any integral. Diagonal value jump is 1.
    """
    case = classify_ivp(a, b)
    near, far = _branches(a, b, case.variant)

    def fn(t: float, s: float) -> float:
        if t >= 0.0:
            if 0.0 <= s <= t:
                return near(t, s)
            if -t <= s < 0.0:
                return far(t, s)
        else:
            if 0.0 <= s <= -t:
                return -far(t, s)
            if t <= s < 0.0:
                return -near(t, s)
        return 0.0

    def panels(t: float):
        if t >= 0.0:
            return [(0.0, t, lambda s: near(t, s)),
                    (-t, 0.0, lambda s: far(t, s))]
        return [(t, 0.0, lambda s: -near(t, s)),
                (0.0, -t, lambda s: -far(t, s))]

    return GreenKernel(fn=fn, half_width=None, jump=1.0,
                       support="|s| <= |t|", case=case, panels=panels)


def green_ivp_assembled(a: float, b: float) -> GreenKernel:
    """The same kernel assembled from the homogeneous pair and oriented
    indicators,

        G(t,s) = ([u~(-s)v~(t) + v~(-s)u~(t)] X(0,t; s)
                + [u~(-s)v~(t) - v~(-s)u~(t)] X(-t,0; s)) / 2,

    kept as an independent construction for identity testing against the
    explicit piecewise forms. The shared endpoint s = 0 belongs to the
    first term (both oriented indicators are closed there, which would
    otherwise double-count one line of measure zero).
    """
    hp = homogeneous_pair(a, b)
    u, v = hp.u_tilde.fn, hp.v_tilde.fn

    def fn(t: float, s: float) -> float:
        c1 = oriented_indicator(0.0, t, s)
        c2 = oriented_indicator(-t, 0.0, s)
        if s == 0.0 and t > 0.0:
            c2 = 0
        if c1 == 0 and c2 == 0:
            return 0.0
        ums, vms, ut, vt = u(-s), v(-s), u(t), v(t)
        return 0.5 * ((ums * vt + vms * ut) * c1 + (ums * vt - vms * ut) * c2)

    return GreenKernel(fn=fn, half_width=None, jump=1.0,
                       support="|s| <= |t|", case=hp.case)


def solve_ivp(p: IvpProblem, rtol: float = 1e-9) -> ScalarField:
    """Solve the initial value problem through the Green's kernel,

        u(t) = integral of G(t,s) h(s) ds  +  [(c - u0(t0)) / u~(t0)] u~(t),

    with u0 the kernel integral itself. Quadrature is adaptive Simpson on
    the kernel's smooth panels (split at s in {-|t|, 0, |t|}).
    """
    if not uniqueness_check(p.a, p.b, p.t0):
        raise NonUniqueSolutionError(
            f"u~({p.t0:g}) = 0 for a={p.a:g}, b={p.b:g}: solutions exist only "
            "up to multiples of u~ (no unique solution)")
    kernel = green_ivp(p.a, p.b)
    hp = homogeneous_pair(p.a, p.b)
    h = p.h.fn
    u_t = hp.u_tilde.fn

    def u0(t: float) -> float:
        total = 0.0
        for lo, hi, g in kernel.panels(t):
            if hi - lo > 0.0:
                total += integrate(lambda s: g(s) * h(s), lo, hi, rtol=rtol)
        return total

    lam = (p.c - u0(p.t0)) / u_t(p.t0)

    lo, hi = p.h.domain
    half = min(-lo, hi)
    dom = (-half, half)
    return ScalarField(lambda t: u0(t) + lam * u_t(t), dom, name="ivp solution")


# ---------------------------------------------------------------------------
# Alternative closed-form solvers for a = +/-b
# ---------------------------------------------------------------------------

def _solver_half_width(p: IvpProblem, half_width: Optional[float]) -> float:
    if half_width is not None:
        return float(half_width)
    lo, hi = p.h.domain
    if math.isinf(lo) or math.isinf(hi):
        return max(2.0, 2.0 * abs(p.t0))
    return min(-lo, hi)


def alt_solve_c31(p: IvpProblem, half_width: Optional[float] = None) -> ScalarField:
    """Antiderivative-based solution for a = b (no kernel integral).

    With H the antiderivative of h from t0 and HH the antiderivative of H
    from t0,

        u(t) = H(t) - 2a HH_o(t) + [(2at - 1)/(2a t0 - 1)] (c + 2a HH_o(t0)),

    where HH_o is the odd part of HH. The last factor pins u(t0) = c; it
    reduces to a bare c when t0 = 0 (where HH_o vanishes at t0).
    """
    if p.a != p.b:
        raise UnsupportedCaseError(f"requires a = b, got a={p.a}, b={p.b}")
    a, t0, c = p.a, p.t0, p.c
    denom = 2.0 * a * t0 - 1.0
    if abs(denom) < 1e-12:
        raise DegenerateProblemError(f"2*a*t0 = 1 (a={a:g}, t0={t0:g}): the "
                                     "homogeneous solution vanishes at t0")
    S = _solver_half_width(p, half_width)
    dom = (-S, S)
    H = antiderivative_field(p.h, dom, base=t0)
    HH = antiderivative_field(H, dom, base=t0)

    def hh_odd(t: float) -> float:
        return 0.5 * (HH(t) - HH(-t))

    c_eff = c + 2.0 * a * hh_odd(t0)

    def u(t: float) -> float:
        return H(t) - 2.0 * a * hh_odd(t) + (2.0 * a * t - 1.0) / denom * c_eff

    return ScalarField(u, dom, name="ivp solution (a=b)")


def alt_solve_c32(p: IvpProblem, half_width: Optional[float] = None) -> ScalarField:
    """Antiderivative-based solution for a = -b.

    With H the antiderivative of h from 0 and HH the antiderivative of H
    from 0,

        u(t) = H(t) - H(t0) + 2a (HH_e(t) - HH_e(t0)) + c,

    where HH_e is the even part of HH. (The derivative of HH_e is the odd
    part of H, so u' - 2a u_o telescopes to h.)
    """
    if p.a != -p.b:
        raise UnsupportedCaseError(f"requires a = -b, got a={p.a}, b={p.b}")
    a, t0, c = p.a, p.t0, p.c
    S = _solver_half_width(p, half_width)
    dom = (-S, S)
    H = antiderivative_field(p.h, dom, base=0.0)
    HH = antiderivative_field(H, dom, base=0.0)

    def hh_even(t: float) -> float:
        return 0.5 * (HH(t) + HH(-t))

    base = -H(t0) - 2.0 * a * hh_even(t0) + c

    def u(t: float) -> float:
        return H(t) + 2.0 * a * hh_even(t) + base

    return ScalarField(u, dom, name="ivp solution (a=-b)")


# ---------------------------------------------------------------------------
# Sign theory
# ---------------------------------------------------------------------------

def eta_threshold(a: float, b: float) -> float:
    """Largest x such that the kernel is positive on the wedge 0 < s < t
    for every t in (0, x), in the trigonometric case a^2 > b^2."""
    if not a * a > b * b:
        raise UnsupportedCaseError("eta threshold needs a^2 > b^2")
    w = math.sqrt(a * a - b * b)
    if b > 0:
        return math.atan(w / b) / w
    if b == 0:
        return math.pi / (2.0 * abs(a))
    return (math.atan(w / b) + math.pi) / w


def c2_sign_threshold(a: float, b: float) -> float:
    """Hyperbolic-case analog of the eta threshold (same sign as b)."""
    if not b * b > a * a:
        raise UnsupportedCaseError("threshold needs b^2 > a^2")
    w = math.sqrt(b * b - a * a)
    return math.atanh(w / b) / w


@dataclass(frozen=True)
class WedgeRule:
    """The kernel has the given sign on the wedge exactly for t in
    (t_lo, t_hi); outside that range the restriction changes sign."""

    region: str  # one of "0<s<t", "t<s<0", "-t<s<0", "0<s<-t"
    sign: int
    t_lo: float
    t_hi: float


@dataclass(frozen=True)
class BandRule:
    """The kernel has the given sign on the whole strip [lo, hi] x R and
    changes sign on any band not contained in it."""

    sign: int
    lo: float
    hi: float


@dataclass(frozen=True)
class SignReport:
    case: CaseTag
    thresholds: dict
    wedges: tuple
    band: Optional[BandRule]
    notes: str = ""
    verified: bool = field(default=False, compare=False)


def _wedge_samples(region: str, t: float, n: int = 101) -> np.ndarray:
    frac = np.linspace(1e-4, 1.0 - 1e-4, n)
    if region == "0<s<t":        # needs t > 0
        return t * frac
    if region == "t<s<0":        # needs t < 0
        return t * frac
    if region == "-t<s<0":       # needs t > 0
        return -t * frac
    if region == "0<s<-t":       # needs t < 0
        return -t * frac
    raise ValueError(region)


def _check_wedge(kernel: GreenKernel, rule: WedgeRule, scale: float) -> None:
    # points inside the validity range must carry the claimed sign
    ts_in = []
    if math.isinf(rule.t_hi) and rule.t_lo == 0.0:
        ts_in = [0.3 * scale, 0.9 * scale, 2.1 * scale]
    elif math.isinf(rule.t_lo) and rule.t_hi == 0.0:
        ts_in = [-0.3 * scale, -0.9 * scale, -2.1 * scale]
    elif rule.t_lo == 0.0:
        ts_in = [0.5 * rule.t_hi, 0.95 * rule.t_hi]
    else:
        ts_in = [0.5 * rule.t_lo, 0.95 * rule.t_lo]
    for t in ts_in:
        vals = rule.sign * np.array([kernel(t, s)
                                     for s in _wedge_samples(rule.region, t)])
        if vals.min() < -1e-12 or vals.max() <= 0.0:
            raise VerificationError(
                f"wedge {rule.region}: claimed sign {rule.sign:+d} fails at "
                f"t={t:g} (sampled range [{vals.min():g}, {vals.max():g}])")
    # just beyond a finite threshold the claimed sign must be violated
    edge = rule.t_hi if rule.t_lo == 0.0 else rule.t_lo
    if not math.isinf(edge):
        t = 1.05 * edge
        vals = rule.sign * np.array([kernel(t, s)
                                     for s in _wedge_samples(rule.region, t)])
        if vals.min() > -1e-12:
            raise VerificationError(
                f"wedge {rule.region}: threshold {edge:g} is not sharp "
                f"(still one-signed at t={t:g})")


def _check_band(kernel: GreenKernel, band: BandRule) -> None:
    ts = np.linspace(band.lo + 1e-6, band.hi - 1e-6, 41)
    w = max(abs(band.lo), abs(band.hi))
    ss = np.linspace(-w, w, 41)
    vals = band.sign * kernel.eval_grid(ts, ss)
    if vals.min() < -1e-12:
        raise VerificationError(
            f"band [{band.lo:g}, {band.hi:g}] x R: claimed sign "
            f"{band.sign:+d} fails (min {vals.min():g})")


def sign_classify_ivp(a: float, b: float, cross_check: bool = True) -> SignReport:
    """Maximum / antimaximum classification of the Green's kernel.

    Emits per-wedge validity ranges with their sharp thresholds and the
    largest one-signed band, per case. Every analytic verdict is
    cross-checked by sampling the kernel (101 points per wedge section,
    41 x 41 per band); a mismatch raises VerificationError.

    The a = -b case carries no kernel wedge theory; the report's notes
    record the solution-sign statement instead.
    """
    case = classify_ivp(a, b)
    kernel = green_ivp(a, b)
    v = case.variant
    inf = math.inf
    sa = 1 if a > 0 else -1

    if v is CaseVariant.C1:
        w = math.sqrt(a * a - b * b)
        eta_p = eta_threshold(a, b)
        eta_m = eta_threshold(a, -b)
        thresholds = {"eta(a,b)": eta_p, "eta(a,-b)": eta_m, "pi/omega": math.pi / w}
        wedges = (
            WedgeRule("0<s<t", +1, 0.0, eta_p),
            WedgeRule("t<s<0", -1, -eta_m, 0.0),
            WedgeRule("-t<s<0", sa, 0.0, math.pi / w),
            WedgeRule("0<s<-t", sa, -math.pi / w, 0.0),
        )
        band = BandRule(+1, 0.0, eta_p) if a > 0 else BandRule(-1, -eta_m, 0.0)
        notes = ""
    elif v is CaseVariant.C2:
        sig = c2_sign_threshold(a, b)
        thresholds = {"sigma(a,b)": sig}
        if b > 0:
            w1 = WedgeRule("0<s<t", +1, 0.0, sig)
            w2 = WedgeRule("t<s<0", -1, -inf, 0.0)
        else:
            w1 = WedgeRule("0<s<t", +1, 0.0, inf)
            w2 = WedgeRule("t<s<0", -1, sig, 0.0)
        wedges = (w1, w2,
                  WedgeRule("-t<s<0", sa, 0.0, inf),
                  WedgeRule("0<s<-t", sa, -inf, 0.0))
        if 0 < a < b:
            band = BandRule(+1, 0.0, sig)
        elif b < -a < 0:
            band = BandRule(+1, 0.0, inf)
        elif b < a < 0:
            band = BandRule(-1, sig, 0.0)
        else:  # b > -a > 0
            band = BandRule(-1, -inf, 0.0)
        notes = ""
    elif v is CaseVariant.C3_1:
        thresholds = {"1/a": 1.0 / a}
        if a > 0:
            wedges = (
                WedgeRule("0<s<t", +1, 0.0, 1.0 / a),
                WedgeRule("t<s<0", -1, -inf, 0.0),
                WedgeRule("-t<s<0", +1, 0.0, inf),
                WedgeRule("0<s<-t", +1, -inf, 0.0),
            )
            band = BandRule(+1, 0.0, 1.0 / a)
        else:
            wedges = (
                WedgeRule("0<s<t", +1, 0.0, inf),
                WedgeRule("t<s<0", -1, 1.0 / a, 0.0),
                WedgeRule("-t<s<0", -1, 0.0, inf),
                WedgeRule("0<s<-t", -1, -inf, 0.0),
            )
            band = BandRule(-1, 1.0 / a, 0.0)
        notes = ""
    else:  # C3.2: the sign statement concerns the solution, not the kernel
        thresholds = {}
        wedges = ()
        band = None
        side = ("positive on [0, +inf)" if a > 0 else "negative on (-inf, 0]")
        notes = ("solution sign only: if the kernel integral already meets the "
                 f"initial value (no homogeneous correction) and h >= 0, the "
                 f"solution is {side}")

    if cross_check:
        scale = 1.0 / max(_omega(a, b), abs(a))
        for rule in wedges:
            _check_wedge(kernel, rule, scale)
        if band is not None and not (math.isinf(band.lo) or math.isinf(band.hi)):
            _check_band(kernel, band)

    return SignReport(case=case, thresholds=thresholds, wedges=wedges,
                      band=band, notes=notes, verified=cross_check)
