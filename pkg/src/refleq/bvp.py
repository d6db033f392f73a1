"""Periodic boundary value problem with variable coefficients,

    x'(t) + a(t) x(-t) + b(t) x(t) = h(t)  on [-T, T],   x(-T) = x(T).

Covers the oscillator-based kernels for the nonresonant cases, the
exponential change of variables that reduces variable coefficients to a
constant-coefficient model problem, the sign theory with its sharp
threshold sigma(k), the resonant solution families, and a contraction
fixed-point solver for coefficients outside every closed-form case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (BvpProblem, CaseTag, CaseVariant, GreenKernel, ScalarField,
                   as_field, classify_bvp, classify_ivp)
from .errors import (ContractionGateError, ConvergenceError, DomainError,
                     ResonanceError, UnsupportedCaseError, VerificationError)
from .numerics import antiderivative_field, integrate, spline_field

__all__ = [
    "Primitives",
    "build_primitives",
    "harmonic_periodic_green",
    "green_bvp_constant",
    "green_bvp_c3",
    "homogeneous_bvp_solution",
    "green_bvp_nonconstant",
    "solve_with_kernel",
    "solve_bvp",
    "sigma_threshold",
    "PhasorForm",
    "hyperbolic_phasor",
    "SignVerdict",
    "constant_sign_check",
    "SolutionFamily",
    "solve_resonant_c4",
    "solve_resonant_c5",
    "green_ode_periodic",
    "bound_F",
    "contraction_constant",
    "solve_mixed_picard",
]

_RES_TOL = 1e-9


@dataclass(frozen=True)
class Primitives:
    """Coefficient antiderivatives from 0: A of a, B of b, and B_e the even
    part of B (equal to the antiderivative of the odd part of b)."""

    A: ScalarField
    B: ScalarField
    B_e: ScalarField


def build_primitives(a: ScalarField, b: ScalarField, T: float,
                     n: int = 2049) -> Primitives:
    dom = (-T, T)
    bfn = b.fn
    b_odd = ScalarField(lambda t: 0.5 * (bfn(t) - bfn(-t)), dom)
    return Primitives(
        A=antiderivative_field(a, dom, base=0.0, n=n, name="A"),
        B=antiderivative_field(b, dom, base=0.0, n=n, name="B"),
        B_e=antiderivative_field(b_odd, dom, base=0.0, n=n, name="B_e"),
    )


# ---------------------------------------------------------------------------
# Oscillator kernel and the constant-coefficient kernels built on it
# ---------------------------------------------------------------------------

def _check_harmonic_resonance(mu: float, T: float) -> None:
    if mu == 0.0:
        raise ResonanceError("a^2 - b^2 = 0 is resonant for the periodic "
                             "problem (n = 0)")
    if mu > 0.0:
        x = math.sqrt(mu) * T / math.pi
        if abs(x - round(x)) * math.pi <= _RES_TOL * max(1.0, x):
            raise ResonanceError(
                f"sqrt(a^2-b^2)*T = {math.sqrt(mu) * T:g} hits a multiple of "
                "pi: periodic oscillator problem is resonant")


def _osc_factory(mu: float, T: float):
    """Value and t-derivative of the periodic oscillator kernel, smooth in
    d = |t-s| once the sign sigma of (t-s) is fixed."""
    if mu > 0.0:
        w = math.sqrt(mu)
        denom = 2.0 * w * math.sin(w * T)

        def val(d):
            return math.cos(w * (d - T)) / denom

        def ddt(d, sigma):
            return -sigma * w * math.sin(w * (d - T)) / denom
    else:
        m = math.sqrt(-mu)
        denom = 2.0 * m * math.sinh(m * T)

        def val(d):
            return -math.cosh(m * (d - T)) / denom

        def ddt(d, sigma):
            return -sigma * m * math.sinh(m * (d - T)) / denom

    return val, ddt


def harmonic_periodic_green(mu: float, T: float) -> GreenKernel:
    """Green's kernel of x'' + mu x = h with x(-T) = x(T), x'(-T) = x'(T).

    For mu = w^2 > 0:  cos(w(|t-s| - T)) / (2 w sin(wT));
    for mu = -m^2 < 0: -cosh(m(|t-s| - T)) / (2 m sinh(mT)).

    The kernel value is continuous across the diagonal; its t-derivative
    jumps by 1 there. Resonant when sqrt(mu) T is a multiple of pi.
    """
    _check_harmonic_resonance(mu, T)
    val, _ = _osc_factory(mu, T)

    def fn(t, s):
        return val(abs(t - s))

    def panels(t):
        return [(-T, t, lambda s: val(t - s)),
                (t, T, lambda s: val(s - t))]

    return GreenKernel(fn=fn, half_width=T, jump=0.0, dt_jump=1.0,
                       support="[-T,T]^2, C0 with derivative kink on s=t",
                       panels=panels)


def _gbar_factory(a: float, b: float, T: float):
    """Signed evaluator for the first-order periodic kernel
    a G(-t,s) - b G(t,s) + dG/dt(t,s); s1 = sign(t-s), s2 = sign(t+s)."""
    mu = a * a - b * b
    val, ddt = _osc_factory(mu, T)

    def signed(t, s, s1, s2):
        d1 = s1 * (t - s)
        d2 = s2 * (t + s)
        return a * val(d2) - b * val(d1) + ddt(d1, s1)

    return signed


def green_bvp_constant(a: float, b: float, T: float) -> GreenKernel:
    """Green's kernel of x' + a x(-t) + b x(t) = h, x(-T) = x(T), for
    constants a, b away from resonance (a^2 - b^2 != (n pi / T)^2).

    Built from the periodic oscillator kernel G of the squared equation as
    a G(-t,s) - b G(t,s) + dG/dt(t,s); the t-derivative jump of G makes
    the value of this kernel jump by 1 across the diagonal. The case a = b
    is excluded here even aside from resonance (use green_bvp_c3).
    """
    if a == 0.0:
        raise UnsupportedCaseError("a = 0 has no reflection term")
    if a == b:
        raise ResonanceError("a = b is outside this construction "
                             "(resonant squared problem); use green_bvp_c3")
    _check_harmonic_resonance(a * a - b * b, T)
    signed = _gbar_factory(a, b, T)

    def fn(t, s):
        s1 = 1.0 if s <= t else -1.0
        s2 = 1.0 if t + s >= 0.0 else -1.0
        return signed(t, s, s1, s2)

    def panels(t):
        cuts = sorted({-T, T, min(t, -t), max(t, -t)})
        out = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 0.0:
                continue
            mid = 0.5 * (lo + hi)
            s1 = 1.0 if t - mid >= 0.0 else -1.0
            s2 = 1.0 if t + mid >= 0.0 else -1.0
            out.append((lo, hi,
                        lambda s, s1=s1, s2=s2: signed(t, s, s1, s2)))
        return out

    case = classify_ivp(a, b)
    return GreenKernel(fn=fn, half_width=T, jump=1.0,
                       support="[-T,T]^2, kinks on s=-t, jump on s=t",
                       case=case, panels=panels)


def _gc3_unit_signed(L: float):
    """Signed evaluator of the unit-coefficient kernel for
    x' + x(-t) + x(t) = h on [-L, L] (the k -> 1 limit of the
    constant-coefficient kernel)."""
    def signed(x, y, s1, s2):
        d1 = s1 * (x - y)
        d2 = s2 * (x + y)
        return (((d1 - L) ** 2 - (d2 - L) ** 2) / (4.0 * L)
                + 1.0 / (4.0 * L) + s1 * (L - d1) / (2.0 * L))

    return signed


def green_bvp_c3(a: float, T: float) -> GreenKernel:
    """Green's kernel for the boundary case b = a (constant),
    x' + a x(-t) + a x(t) = h on [-T, T], x(-T) = x(T).

    Obtained from the unit-coefficient kernel on [-|a|T, |a|T] by the
    change of variables (t, s) -> (a t, a s), which preserves the unit
    value jump across the diagonal (for a < 0 the orientation flip of the
    substitution contributes the compensating sign). The kernel's
    t-derivative jump scales to a; it equals 1 exactly in the
    unit-coefficient frame a = 1.
    """
    if a == 0.0:
        raise UnsupportedCaseError("a = 0 has no reflection term")
    L = abs(a) * T
    unit = _gc3_unit_signed(L)
    sgn_a = 1.0 if a > 0 else -1.0

    def signed(t, s, s1, s2):
        # s1, s2 are signs of (t-s), (t+s); in the (at, as) frame they
        # acquire the sign of a
        return sgn_a * unit(a * t, a * s, sgn_a * s1, sgn_a * s2)

    def fn(t, s):
        s1 = 1.0 if s <= t else -1.0
        s2 = 1.0 if t + s >= 0.0 else -1.0
        return signed(t, s, s1, s2)

    def panels(t):
        cuts = sorted({-T, T, min(t, -t), max(t, -t)})
        out = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 0.0:
                continue
            mid = 0.5 * (lo + hi)
            s1 = 1.0 if t - mid >= 0.0 else -1.0
            s2 = 1.0 if t + mid >= 0.0 else -1.0
            out.append((lo, hi,
                        lambda s, s1=s1, s2=s2: signed(t, s, s1, s2)))
        return out

    return GreenKernel(fn=fn, half_width=T, jump=1.0, dt_jump=a,
                       support="[-T,T]^2, piecewise quadratic",
                       case=CaseTag(CaseVariant.C3P, k=1.0), panels=panels)


# ---------------------------------------------------------------------------
# Homogeneous solutions and the variable-coefficient kernel
# ---------------------------------------------------------------------------

def _shared_half_width(a: ScalarField, b: ScalarField) -> float:
    lo = max(a.domain[0], b.domain[0])
    hi = min(a.domain[1], b.domain[1])
    if math.isinf(lo) or math.isinf(hi):
        raise DomainError("coefficients need a finite symmetric domain")
    if abs(lo + hi) > 1e-12 * max(1.0, abs(hi)):
        raise DomainError("coefficient domain must be symmetric about 0")
    return hi


def homogeneous_bvp_solution(tag: CaseTag, a: ScalarField,
                             b: ScalarField) -> ScalarField:
    """A nontrivial solution of x' + a(t) x(-t) + b(t) x(t) = 0 per case.

    All solutions carry the damping factor exp(-B_e); the oscillatory or
    hyperbolic phase runs in the stretched time A(t). The nonresonant
    cases return the member with trailing coefficient -1 relative to the
    leading one; the resonant cases return their one-dimensional
    generator.
    """
    T = _shared_half_width(a, b)
    prim = build_primitives(a, b, T)
    A, B, Be = prim.A.fn, prim.B.fn, prim.B_e.fn
    v = tag.variant
    if v is CaseVariant.C1P:
        om = math.sqrt(1.0 - tag.k ** 2)
        r = (1.0 + tag.k) / om
        fn = lambda t: math.exp(-Be(t)) * (math.cos(om * A(t))
                                           - r * math.sin(om * A(t)))
    elif v is CaseVariant.C2P:
        om = math.sqrt(tag.k ** 2 - 1.0)
        r = (1.0 + tag.k) / om
        fn = lambda t: math.exp(-Be(t)) * (math.cosh(om * A(t))
                                           - r * math.sinh(om * A(t)))
    elif v is CaseVariant.C3P:
        fn = lambda t: math.exp(-Be(t)) * (1.0 - 2.0 * A(t))
    elif v is CaseVariant.C4P:
        fn = lambda t: math.exp(-Be(t))
    elif v is CaseVariant.C5P:
        fn = lambda t: math.exp(-A(t) - B(t))
    else:
        raise UnsupportedCaseError(
            "mixed coefficients admit no closed-form homogeneous solution")
    return ScalarField(fn, (-T, T), name="homogeneous solution")


def _starred_conditions(tag: CaseTag, AT: float) -> None:
    """Nonresonance conditions on the stretched half-period A(T)."""
    if tag.variant is CaseVariant.C3P:
        if abs(AT) <= _RES_TOL:
            raise ResonanceError("A(T) = 0 is resonant in the b_e = a case")
        return
    k = tag.k
    if tag.variant is CaseVariant.C1P:
        om = math.sqrt(1.0 - k * k)
        x = om * AT / math.pi
        if abs(x - round(x)) * math.pi <= _RES_TOL * max(1.0, abs(x)):
            raise ResonanceError(
                f"sqrt(1-k^2) A(T) = {om * AT:g} hits a multiple of pi")
        if abs(math.cos(om * AT)) <= _RES_TOL:
            raise ResonanceError(
                f"cos(sqrt(1-k^2) A(T)) = 0 (A(T)={AT:g}): resonant")
    else:  # C2P
        if abs(AT) <= _RES_TOL:
            raise ResonanceError("A(T) = 0 is resonant")


def green_bvp_nonconstant(p: BvpProblem) -> GreenKernel:
    """Green's kernel G1 for variable coefficients in the proportional
    cases (b_e = k a with a even).

    The construction composes the constant-coefficient kernel of the
    model problem x' + x(-t) + k x(t) = h on [-|A(T)|, |A(T)|] with the
    stretched time (t, s) -> (A(t), A(s)) and the damping prefactor
    exp(B_e(s) - B_e(t)). The diagonal value jump is 1 wherever a > 0.
    """
    a = p.a.restrict(p.interval)
    b = p.b.restrict(p.interval)
    tag = classify_bvp(a, b)
    if tag.variant not in (CaseVariant.C1P, CaseVariant.C2P, CaseVariant.C3P):
        raise UnsupportedCaseError(
            f"case {tag} has no Green's function via this construction "
            "(resonant or mixed)")
    prim = build_primitives(a, b, p.T)
    A, Be = prim.A.fn, prim.B_e.fn
    AT = A(p.T)
    _starred_conditions(tag, AT)
    L = abs(AT)
    if tag.variant is CaseVariant.C3P:
        inner_signed = _gc3_unit_signed(L)
    else:
        inner_signed = _gbar_factory(1.0, tag.k, L)

    def fn(t, s):
        s1 = 1.0 if s <= t else -1.0
        s2 = 1.0 if t + s >= 0.0 else -1.0
        return math.exp(Be(s) - Be(t)) * inner_signed(A(t), A(s), s1, s2)

    def panels(t):
        At = A(t)
        cuts = sorted({-p.T, p.T, min(t, -t), max(t, -t)})
        out = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 0.0:
                continue
            mid = 0.5 * (lo + hi)
            s1 = 1.0 if At - A(mid) >= 0.0 else -1.0
            s2 = 1.0 if At + A(mid) >= 0.0 else -1.0
            out.append((lo, hi, lambda s, s1=s1, s2=s2:
                        math.exp(Be(s) - Be(t)) * inner_signed(At, A(s), s1, s2)))
        return out

    return GreenKernel(fn=fn, half_width=p.T, jump=1.0,
                       support="[-T,T]^2, region edges on s=t and s=-t",
                       case=tag, panels=panels)


def solve_with_kernel(kernel: GreenKernel, h: ScalarField,
                      rtol: float = 1e-9) -> ScalarField:
    """u(t) = integral of G(t, s) h(s) ds over the kernel's panels."""
    hf = h.fn

    def u(t: float) -> float:
        total = 0.0
        for lo, hi, g in kernel.panels(t):
            total += integrate(lambda s: g(s) * hf(s), lo, hi, rtol=rtol)
        return total

    T = kernel.half_width
    return ScalarField(u, (-T, T), name="bvp solution")


def solve_bvp(p: BvpProblem, rtol: float = 1e-9) -> ScalarField:
    """Unique solution of the periodic problem in the proportional cases."""
    return solve_with_kernel(green_bvp_nonconstant(p), p.h, rtol)


# ---------------------------------------------------------------------------
# Sign theory
# ---------------------------------------------------------------------------

def sigma_threshold(k: float) -> float:
    """Sharp bound on |A(T)| below which the periodic kernel keeps one
    sign, as a function of the proportionality ratio k = b_e / a.

    Positive, strictly decreasing, +inf as k -> -1 from above, and
    continuous (indeed analytic) through k = 1 where it equals 1/2.
    """
    if k <= -1.0:
        raise DomainError("sigma(k) is defined for k > -1 only "
                          "(it diverges as k -> -1+)")
    if k == 1.0:
        return 0.5
    if k < 1.0:
        return math.acos(k) / (2.0 * math.sqrt(1.0 - k * k))
    r = math.sqrt(k * k - 1.0)
    return -math.log(k - r) / (2.0 * r)


@dataclass(frozen=True)
class PhasorForm:
    """Hyperbolic phasor compression of alpha cosh(g) + beta sinh(g).

    branch is one of cosh+/cosh-/sinh+/sinh-/exp+/exp-; the amplitude is
    sqrt(|alpha^2 - beta^2|) (alpha itself on the exp branches) and shift
    is log|(alpha+beta)/(alpha-beta)| / 2.
    """

    branch: str
    amplitude: float
    shift: float

    def value(self, gamma: float) -> float:
        if self.branch == "exp+":
            return self.amplitude * math.exp(gamma)
        if self.branch == "exp-":
            return self.amplitude * math.exp(-gamma)
        arg = self.shift + gamma
        base = math.cosh(arg) if self.branch.startswith("cosh") else math.sinh(arg)
        return (self.amplitude if self.branch.endswith("+") else -self.amplitude) * base


def hyperbolic_phasor(alpha: float, beta: float) -> PhasorForm:
    """Rewrite alpha cosh(g) + beta sinh(g) as one shifted cosh, sinh or
    exponential, by analogy with the trigonometric phasor-addition rule."""
    if alpha == beta:
        return PhasorForm("exp+", alpha, 0.0)
    if alpha == -beta:
        return PhasorForm("exp-", alpha, 0.0)
    amp = math.sqrt(abs(alpha * alpha - beta * beta))
    shift = 0.5 * math.log(abs((alpha + beta) / (alpha - beta)))
    if alpha > abs(beta):
        return PhasorForm("cosh+", amp, shift)
    if -alpha > abs(beta):
        return PhasorForm("cosh-", amp, shift)
    if beta > abs(alpha):
        return PhasorForm("sinh+", amp, shift)
    return PhasorForm("sinh-", amp, shift)


@dataclass(frozen=True)
class SignVerdict:
    constant_sign: bool
    sign: Optional[int]          # +1 / -1 when constant_sign
    threshold: Optional[float]   # bound on |A(T)| used, None if unconditional
    A_T: float
    case: CaseTag

    def __str__(self):
        if not self.constant_sign:
            return "unknown"
        return "constant-sign +" if self.sign > 0 else "constant-sign -"


def constant_sign_check(p: BvpProblem, grid_n: int = 101) -> SignVerdict:
    """Decide constant sign of the variable-coefficient kernel.

    Sufficient conditions: |A(T)| < sigma(k) in the trigonometric case
    (sign follows a), |A(T)| < 1/2 for b_e = a, and for the hyperbolic
    case |A(T)| < sigma(k) when k > 1 or no condition at all when k < -1
    (sign follows k a). Outside these the verdict is unknown. A
    constant-sign verdict is cross-checked by sampling the kernel on a
    grid; disagreement raises VerificationError.
    """
    a = p.a.restrict(p.interval)
    b = p.b.restrict(p.interval)
    tag = classify_bvp(a, b)
    if tag.variant not in (CaseVariant.C1P, CaseVariant.C2P, CaseVariant.C3P):
        raise UnsupportedCaseError(f"no sign theory for case {tag}")
    prim = build_primitives(a, b, p.T)
    AT = prim.A(p.T)

    ts = np.linspace(-p.T, p.T, 33)
    av = a.sample(ts)
    sign_a = 1 if av[int(np.argmax(np.abs(av)))] > 0 else -1

    if tag.variant is CaseVariant.C1P:
        thr = sigma_threshold(tag.k)
        ok = abs(AT) < thr
        claimed = sign_a
    elif tag.variant is CaseVariant.C3P:
        thr = 0.5
        ok = abs(AT) < thr
        claimed = sign_a
    else:  # C2P
        if tag.k < -1.0:
            thr = None
            ok = True
        else:
            thr = sigma_threshold(tag.k)
            ok = abs(AT) < thr
        claimed = sign_a * (1 if tag.k > 0 else -1)

    if not ok:
        return SignVerdict(False, None, thr, AT, tag)

    kernel = green_bvp_nonconstant(p)
    tt = np.linspace(-p.T + 1e-9, p.T - 1e-9, grid_n)
    vals = claimed * kernel.eval_grid(tt, tt)
    if vals.min() < -1e-12:
        raise VerificationError(
            f"claimed constant sign {claimed:+d} contradicted by sampling "
            f"(min {vals.min():g})")
    return SignVerdict(True, claimed, thr, AT, tag)


# ---------------------------------------------------------------------------
# Resonant cases: one-parameter solution families under an obstruction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionFamily:
    """Solutions u_c, one per real c, of a resonant periodic problem.

    ``solvable`` reflects whether the solvability integral (obstruction)
    vanishes within tolerance; when it does not, no member satisfies the
    boundary condition.
    """

    member: Callable[[float], ScalarField]
    solvable: bool
    obstruction: float


def _solvability_tol(h: ScalarField, T: float) -> float:
    hnorm = integrate(lambda t: abs(h.fn(t)), -T, T, breakpoints=(0.0,))
    return 1e-9 * (1.0 + hnorm)


def solve_resonant_c4(p: BvpProblem) -> SolutionFamily:
    """Solution family for the resonant proportional case b_e = -a.

    Solvable iff the weighted even forcing integrates to zero over [0, T];
    members are quadrature-built from the triangular even/odd system.
    """
    a = p.a.restrict(p.interval)
    b = p.b.restrict(p.interval)
    tag = classify_bvp(a, b)
    if tag.variant is not CaseVariant.C4P:
        raise UnsupportedCaseError(f"expected the b_e = -a case, got {tag}")
    T = p.T
    dom = p.interval
    prim = build_primitives(a, b, T)
    Be = prim.B_e.fn
    afn, hfn = a.fn, p.h.fn

    h_even = ScalarField(lambda t: 0.5 * (hfn(t) + hfn(-t)), dom)
    inner = antiderivative_field(
        lambda s: math.exp(Be(s)) * h_even.fn(s), dom, base=0.0)
    obstruction = inner(T)

    def outer_integrand(s: float) -> float:
        a_e = 0.5 * (afn(s) + afn(-s))
        return math.exp(Be(s)) * hfn(s) + 2.0 * a_e * inner(s)

    outer = antiderivative_field(outer_integrand, dom, base=0.0)
    solvable = abs(obstruction) <= _solvability_tol(p.h, T)

    def member(c: float) -> ScalarField:
        return ScalarField(lambda t: math.exp(-Be(t)) * (c + outer(t)),
                           dom, name=f"u_c (c={c:g})")

    return SolutionFamily(member=member, solvable=solvable,
                          obstruction=obstruction)


def solve_resonant_c5(p: BvpProblem) -> SolutionFamily:
    """Solution family for the resonant case a_e = b_e = 0 (both
    coefficients odd), where the even/odd system decouples."""
    a = p.a.restrict(p.interval)
    b = p.b.restrict(p.interval)
    tag = classify_bvp(a, b)
    if tag.variant is not CaseVariant.C5P:
        raise UnsupportedCaseError(f"expected the odd-coefficient case, got {tag}")
    T = p.T
    dom = p.interval
    prim = build_primitives(a, b, T)
    A, B = prim.A.fn, prim.B.fn
    hfn = p.h.fn

    p_even = antiderivative_field(
        lambda s: math.exp(B(s) - A(s)) * 0.5 * (hfn(s) + hfn(-s)),
        dom, base=0.0)
    p_odd = antiderivative_field(
        lambda s: math.exp(A(s) + B(s)) * 0.5 * (hfn(s) - hfn(-s)),
        dom, base=0.0)
    obstruction = p_even(T)
    solvable = abs(obstruction) <= _solvability_tol(p.h, T)

    def member(c: float) -> ScalarField:
        def u(t: float) -> float:
            return (math.exp(A(t) - B(t)) * p_even(t)
                    + math.exp(-A(t) - B(t)) * (c + p_odd(t)))
        return ScalarField(u, dom, name=f"u_c (c={c:g})")

    return SolutionFamily(member=member, solvable=solvable,
                          obstruction=obstruction)


# ---------------------------------------------------------------------------
# Mixed case: scalar periodic kernel, bound, and Picard iteration
# ---------------------------------------------------------------------------

def green_ode_periodic(v: ScalarField, T: float) -> GreenKernel:
    """Green's kernel of the scalar periodic problem u' + v(t) u = h,
    u(-T) = u(T): an exponential weight with a unit jump, well defined
    whenever v has nonzero mean."""
    V = antiderivative_field(v, (-T, T), base=0.0)
    dv = V(T) - V(-T)
    if abs(dv) <= _RES_TOL:
        raise ResonanceError("v has (numerically) zero mean: the scalar "
                             "periodic problem is resonant")
    tau = 1.0 / (1.0 - math.exp(-dv))
    Vf = V.fn

    def fn(t, s):
        w = tau if s <= t else tau - 1.0
        return w * math.exp(Vf(s) - Vf(t))

    def panels(t):
        return [(-T, t, lambda s: tau * math.exp(Vf(s) - Vf(t))),
                (t, T, lambda s: (tau - 1.0) * math.exp(Vf(s) - Vf(t)))]

    return GreenKernel(fn=fn, half_width=T, jump=1.0,
                       support="[-T,T]^2, jump on s=t", panels=panels)


def bound_F(v: ScalarField, T: float) -> float:
    """Uniform bound on the scalar periodic kernel:
    exp(||v||_1) / |exp(||v+||_1) - exp(||v-||_1)|, always >= 1."""
    vfn = v.fn
    pos = integrate(lambda t: max(vfn(t), 0.0), -T, T, breakpoints=(0.0,))
    neg = integrate(lambda t: max(-vfn(t), 0.0), -T, T, breakpoints=(0.0,))
    if abs(pos - neg) <= _RES_TOL:
        raise ResonanceError("v has (numerically) zero mean")
    return math.exp(pos + neg) / abs(math.exp(pos) - math.exp(neg))


def contraction_constant(p: BvpProblem) -> float:
    """Certificate for the mixed-case fixed point: F(v) ||a||_1 inf M,
    with M ranging over the Hoelder pairings for p in {1, 2, inf}.

    The infimum over all p is approximated at those three exponents; M is
    continuous in p, so this is a conservative (never too small) choice.
    """
    T = p.T
    afn, bfn = p.a.fn, p.b.fn
    v = ScalarField(lambda t: afn(t) + bfn(t), p.interval)
    F = bound_F(v, T)
    na1 = integrate(lambda t: abs(afn(t)), -T, T, breakpoints=(0.0,))
    nb1 = integrate(lambda t: abs(bfn(t)), -T, T, breakpoints=(0.0,))
    na2 = math.sqrt(integrate(lambda t: afn(t) ** 2, -T, T))
    nb2 = math.sqrt(integrate(lambda t: bfn(t) ** 2, -T, T))
    ts = np.linspace(-T, T, 1025)
    nainf = float(np.max(np.abs(p.a.sample(ts))))
    nbinf = float(np.max(np.abs(p.b.sample(ts))))
    M = min(2.0 * T * (nainf + nbinf),
            math.sqrt(2.0 * T) * (na2 + nb2),
            na1 + nb1)
    return F * na1 * M


def _picard_on_grid(p: BvpProblem, n: int, tol: float, max_iter: int):
    T = p.T
    ts = np.linspace(-T, T, n)
    dt = np.diff(ts)
    av = p.a.sample(ts)
    bv = p.b.sample(ts)
    hv = p.h.sample(ts)
    vv = av + bv

    def cum(y):
        return np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * dt)])

    V = cum(vv)
    tau = 1.0 / (1.0 - math.exp(-(V[-1] - V[0])))
    expV = np.exp(V)
    Hc = cum(hv)
    # a(s) * integral of h over (-s, s), plus h itself
    forcing = av * (Hc - Hc[::-1]) + hv

    def apply_kernel(q):
        C = cum(q * expV)
        return (tau * C + (tau - 1.0) * (C[-1] - C)) / expV

    x = np.zeros(n)
    for _ in range(max_iter):
        w = av * x[::-1] + bv * x
        W = cum(w)
        q = av * (W[::-1] - W) + forcing
        xn = apply_kernel(q)
        delta = float(np.max(np.abs(xn - x)))
        x = xn
        if delta <= tol:
            return ts, x
    raise ConvergenceError(
        f"fixed-point iteration did not reach {tol:g} in {max_iter} steps")


def solve_mixed_picard(p: BvpProblem, tol: float = 1e-9, max_iter: int = 200,
                       force: bool = False, n: int = 513) -> ScalarField:
    """Fixed-point solution for coefficients outside every closed-form
    case, via the scalar periodic kernel of v = a + b.

    Requires nonzero mean of v. The iteration is attempted only when the
    contraction certificate is < 1, unless force=True. Runs on a uniform
    grid with trapezoidal quadrature (reflection is an index flip on the
    symmetric node set), doubling the grid until two resolutions agree to
    max(tol, 1e-7) in the sup norm.
    """
    constant = contraction_constant(p)  # also validates the nonzero mean
    if constant >= 1.0 and not force:
        raise ContractionGateError(constant)
    grid_tol = max(tol, 1e-7)
    ts, x = _picard_on_grid(p, n, tol, max_iter)
    for _ in range(3):
        n2 = 2 * n - 1
        ts2, x2 = _picard_on_grid(p, n2, tol, max_iter)
        if float(np.max(np.abs(x2[::2] - x))) <= grid_tol:
            return spline_field(ts2, x2, name="mixed solution")
        n, ts, x = n2, ts2, x2
    raise ConvergenceError("grid refinement did not stabilize the solution")
