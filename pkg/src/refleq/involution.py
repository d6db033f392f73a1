"""Involution verification, correspondence between involutions, and the
change of variables that turns a periodic problem with a general
decreasing involution into one with the plain reflection s -> -s.

Any two differentiable involutions are conjugate: gluing an increasing
diffeomorphism g of the left half-intervals with its push-forward through
the involutions yields f with f(psi(s)) = phi(f(s)). Substituting
t = f(s) into

    d(t) x'(t) + b(t) x(t) + a(t) x(phi(t)) = h(t),  x(tau1) = x(tau2)

produces a reflection problem on the target interval, solvable by the
periodic-problem machinery, whose solution transports back as x = y o
f^{-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bvp import solve_bvp, solve_mixed_picard
from .core import (BvpProblem, CaseVariant, ScalarField, as_field,
                   classify_bvp)
from .errors import (DomainError, ResonanceError, UnsupportedCaseError,
                     VerificationError)

__all__ = [
    "Involution",
    "GeneralProblem",
    "verify_involution",
    "CorrespondenceMap",
    "correspondence_map",
    "change_involution",
    "reflection_reduction",
    "solve_general",
]

_GRID_N = 101


@dataclass(frozen=True)
class Involution:
    """A differentiable decreasing involution with its derivative.

    Construction validates the involution identity on a grid (defect at
    most 1e-9), the fixed point, monotonicity, and the forced derivative
    value -1 at the fixed point.
    """

    phi: ScalarField
    dphi: ScalarField
    domain: tuple[float, float]
    fixed_point: float

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < self.fixed_point < hi:
            raise DomainError(f"fixed point {self.fixed_point} outside {self.domain}")
        ok, defect = verify_involution(self.phi, self.domain, _GRID_N)
        if not ok:
            raise DomainError(f"not an involution on {self.domain}: "
                              f"max |phi(phi(t)) - t| = {defect:g}")
        scale = max(1.0, abs(lo), abs(hi))
        if abs(self.phi(self.fixed_point) - self.fixed_point) > 1e-9 * scale:
            raise DomainError("declared fixed point is not fixed by phi")
        ts = np.linspace(lo, hi, _GRID_N)
        vals = self.phi.sample(ts)
        if np.any(np.diff(vals) >= 0):
            raise DomainError("a continuous involution must be decreasing")
        if abs(self.dphi(self.fixed_point) + 1.0) > 1e-6:
            raise DomainError(
                f"dphi at the fixed point must be -1, got "
                f"{self.dphi(self.fixed_point):g}")

    @staticmethod
    def reflection(half_width: float) -> "Involution":
        return Involution(
            phi=ScalarField(lambda t: -t, (-half_width, half_width), name="-t"),
            dphi=ScalarField.constant(-1.0, (-half_width, half_width)),
            domain=(-half_width, half_width),
            fixed_point=0.0,
        )


def verify_involution(phi: ScalarField, domain: tuple[float, float],
                      grid_n: int = _GRID_N) -> tuple[bool, float]:
    """Check phi o phi = id on a grid; returns (verdict, max defect).

    The verdict also requires phi to map the domain into itself (small
    float excursions are tolerated).
    """
    lo, hi = domain
    scale = max(1.0, abs(lo), abs(hi))
    slack = 1e-9 * scale
    ts = np.linspace(lo, hi, grid_n)
    defect = 0.0
    in_range = True
    for t in ts:
        ft = phi(float(t))
        if ft < lo - slack or ft > hi + slack:
            in_range = False
        defect = max(defect, abs(phi(min(max(ft, lo), hi)) - t))
    return (in_range and defect <= 1e-9 * scale), defect


@dataclass(frozen=True)
class GeneralProblem:
    """d(t) x'(t) + b(t) x(t) + a(t) x(phi(t)) = h(t) with the periodic
    condition x(tau1) = x(tau2) on the involution's interval.

    A coefficient on x'(phi(t)) may be supplied for bookkeeping through
    transforms, but must vanish identically: problems that genuinely
    differentiate at the involuted argument are not accepted.
    """

    a: ScalarField
    b: ScalarField
    d: ScalarField
    h: ScalarField
    involution: Involution
    c: Optional[ScalarField] = None

    def __post_init__(self):
        if self.c is not None:
            lo, hi = self.involution.domain
            vals = self.c.sample(np.linspace(lo, hi, _GRID_N))
            if np.max(np.abs(vals)) > 1e-12:
                raise UnsupportedCaseError(
                    "the x'(phi(t)) coefficient must be identically zero")

    @property
    def boundary(self) -> tuple[float, float]:
        return self.involution.domain


@dataclass(frozen=True)
class CorrespondenceMap:
    """Orientation-preserving diffeomorphism f intertwining two
    involutions: f(psi(s)) = phi(f(s)). ``df`` is assembled analytically
    from the chain rule, never by differencing."""

    f: ScalarField
    f_inverse: ScalarField
    df: ScalarField
    phi: Involution
    psi: Involution

    def inverted(self) -> "CorrespondenceMap":
        """The same correspondence read from the phi side."""
        finv, f = self.f_inverse, self.f
        df = self.df.fn

        def dfinv(t: float) -> float:
            return 1.0 / df(finv.fn(t))

        return CorrespondenceMap(
            f=finv, f_inverse=f,
            df=ScalarField(dfinv, finv.domain),
            phi=self.psi, psi=self.phi)


def _default_g(phi: Involution, psi: Involution):
    """Affine increasing map of the left half-intervals,
    [sigma1, s0] -> [tau1, t0]: the minimal smooth choice."""
    s1, t1 = psi.domain[0], phi.domain[0]
    s0, t0 = psi.fixed_point, phi.fixed_point
    m = (t0 - t1) / (s0 - s1)

    def g(s):
        return t1 + (s - s1) * m

    def dg(s):
        return m

    def ginv(t):
        return s1 + (t - t1) / m

    return g, dg, ginv


def correspondence_map(phi: Involution, psi: Involution, g=None, dg=None,
                       g_inverse=None) -> CorrespondenceMap:
    """Build f with f o psi = phi o f from a half-interval diffeomorphism.

    g maps [sigma1, s0] increasingly onto [tau1, t0] with g(s0) = t0; the
    affine map is used when g is omitted. A custom g must come with its
    derivative and inverse. The conjugation identity is validated on a
    grid to 1e-8 before the map is returned.
    """
    if g is None:
        gf, dgf, ginvf = _default_g(phi, psi)
    else:
        if dg is None or g_inverse is None:
            raise DomainError("a custom g needs dg and g_inverse")
        gf = g.fn if isinstance(g, ScalarField) else g
        dgf = dg.fn if isinstance(dg, ScalarField) else dg
        ginvf = g_inverse.fn if isinstance(g_inverse, ScalarField) else g_inverse
        t1, t0 = phi.domain[0], phi.fixed_point
        s1, s0 = psi.domain[0], psi.fixed_point
        scale = max(1.0, abs(t1), abs(t0))
        if abs(gf(s1) - t1) > 1e-9 * scale or abs(gf(s0) - t0) > 1e-9 * scale:
            raise DomainError("g must map [sigma1, s0] onto [tau1, t0] "
                              "with g(s0) = t0")
        for s in np.linspace(s1, s0, 33):
            if dgf(float(s)) <= 0.0:
                raise DomainError("g must be increasing")

    s0 = psi.fixed_point
    t0 = phi.fixed_point
    phif, dphif = phi.phi.fn, phi.dphi.fn
    psif, dpsif = psi.phi.fn, psi.dphi.fn

    def f(s):
        if s <= s0:
            return gf(s)
        return phif(gf(psif(s)))

    def df(s):
        if s <= s0:
            return dgf(s)
        ps = psif(s)
        return dphif(gf(ps)) * dgf(ps) * dpsif(s)

    def finv(t):
        if t <= t0:
            return ginvf(t)
        return psif(ginvf(phif(t)))

    fmap = CorrespondenceMap(
        f=ScalarField(f, psi.domain, name="f"),
        f_inverse=ScalarField(finv, phi.domain, name="f^-1"),
        df=ScalarField(df, psi.domain, name="f'"),
        phi=phi, psi=psi)

    ss = np.linspace(psi.domain[0], psi.domain[1], _GRID_N)
    worst = max(abs(f(psif(float(s))) - phif(f(float(s)))) for s in ss)
    if worst > 1e-8 * max(1.0, abs(phi.domain[1])):
        raise VerificationError(
            f"conjugation identity fails: max defect {worst:g}")
    return fmap


def change_involution(p: GeneralProblem, psi: Involution,
                      fmap: CorrespondenceMap) -> GeneralProblem:
    """Pull the problem back through t = f(s) onto psi's interval.

    Coefficients become d(f)/f', c(f)/(f' o psi), b(f), a(f) and the
    forcing h(f); periodicity of y follows from that of x. Requires f'
    bounded away from zero (the x'-coefficient divides by it).
    """
    if fmap.psi is not psi and fmap.psi.domain != psi.domain:
        raise DomainError("fmap was built for a different target involution")
    dom = psi.domain
    ff, dff = fmap.f.fn, fmap.df.fn
    ss = np.linspace(dom[0], dom[1], _GRID_N)
    dvals = np.array([dff(float(s)) for s in ss])
    if np.min(np.abs(dvals)) < 1e-12:
        raise DomainError("f' vanishes on the interval: singular transform")

    def compose(field: ScalarField) -> ScalarField:
        fn = field.fn
        return ScalarField(lambda s: fn(ff(s)), dom)

    dfn = p.d.fn
    d_new = ScalarField(lambda s: dfn(ff(s)) / dff(s), dom)
    c_new = None
    if p.c is not None:
        cfn = p.c.fn
        psif = psi.phi.fn
        c_new = ScalarField(lambda s: cfn(ff(s)) / dff(psif(s)), dom)
    return GeneralProblem(a=compose(p.a), b=compose(p.b), d=d_new,
                          h=compose(p.h), involution=psi, c=c_new)


def reflection_reduction(p: GeneralProblem, half_width: float = 1.0,
                         g=None, dg=None, g_inverse=None
                         ) -> tuple[BvpProblem, CorrespondenceMap]:
    """Reduce a general-involution problem to a reflection problem on
    [-S, S], normalized to unit x'-coefficient."""
    psi = Involution.reflection(half_width)
    fmap = correspondence_map(p.involution, psi, g=g, dg=dg,
                              g_inverse=g_inverse)
    q = change_involution(p, psi, fmap)
    dfn = q.d.fn
    if any(abs(dfn(float(s))) < 1e-12
           for s in np.linspace(-half_width, half_width, _GRID_N)):
        raise DomainError("transformed x'-coefficient vanishes; cannot "
                          "normalize to the standard reflection form")

    def over_d(field: ScalarField) -> ScalarField:
        fn = field.fn
        return ScalarField(lambda s: fn(s) / dfn(s), q.involution.domain)

    bvp = BvpProblem(a=over_d(q.a), b=over_d(q.b), T=half_width,
                     h=over_d(q.h))
    return bvp, fmap


def solve_general(p: GeneralProblem, half_width: float = 1.0,
                  rtol: float = 1e-9, force: bool = False,
                  picard_tol: float = 1e-9) -> ScalarField:
    """Solve a general-involution periodic problem by reduction to the
    reflection, dispatching on the transformed problem's case, and
    transporting the solution back as x = y o f^{-1}."""
    bvp_problem, fmap = reflection_reduction(p, half_width)
    tag = classify_bvp(bvp_problem.a.restrict(bvp_problem.interval),
                       bvp_problem.b.restrict(bvp_problem.interval))
    if tag.variant in (CaseVariant.C1P, CaseVariant.C2P, CaseVariant.C3P):
        y = solve_bvp(bvp_problem, rtol=rtol)
    elif tag.variant is CaseVariant.MIXED:
        y = solve_mixed_picard(bvp_problem, tol=picard_tol, force=force)
    else:
        raise ResonanceError(
            f"transformed problem is resonant ({tag}); use the resonant "
            "solution families on the reflected problem directly")
    finv = fmap.f_inverse.fn
    yfn = y.fn
    return ScalarField(lambda t: yfn(finv(t)), p.boundary,
                       name="transported solution")
