"""Shared domain types, parity algebra, oriented indicators and case
classification for equations of the form

    x'(t) + a(t) x(-t) + b(t) x(t) = h(t),

both with initial conditions (constant a, b) and with periodic boundary
conditions (variable a, b).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, UnsupportedCaseError

__all__ = [
    "ScalarField",
    "ParityPair",
    "IvpProblem",
    "BvpProblem",
    "CaseVariant",
    "CaseTag",
    "GreenKernel",
    "as_field",
    "parity_split",
    "oriented_indicator",
    "classify_ivp",
    "classify_bvp",
    "CLASSIFY_TOL",
    "CLASSIFY_GRID_N",
]

#: Default relative tolerance and grid size for variable-coefficient
#: classification. Closed forms are exact, so near-degenerate inputs are
#: rejected loudly rather than guessed at.
CLASSIFY_TOL = 1e-9
CLASSIFY_GRID_N = 257

_INF = math.inf


@dataclass(frozen=True)
class ScalarField:
    """A real-valued function of one real variable on a closed interval.

    Holds coefficients, forcings and solutions alike. ``fn`` must be
    defined and finite at every point of ``domain``; L1 membership is the
    caller's assertion via ``integrable``, not checked. Immutable, safe
    for concurrent evaluation.
    """

    fn: Callable[[float], float]
    domain: tuple[float, float] = (-_INF, _INF)
    integrable: bool = True
    name: str = ""

    def __call__(self, t: float) -> float:
        return float(self.fn(t))

    def sample(self, ts) -> np.ndarray:
        return np.array([float(self.fn(t)) for t in np.asarray(ts, dtype=float)])

    def reflected(self) -> "ScalarField":
        """The field t -> f(-t) on the mirrored domain."""
        f = self.fn
        lo, hi = self.domain
        return ScalarField(lambda t: f(-t), (-hi, -lo), self.integrable,
                           f"reflect({self.name})" if self.name else "")

    def restrict(self, domain: tuple[float, float]) -> "ScalarField":
        lo, hi = domain
        if lo < self.domain[0] - 1e-12 or hi > self.domain[1] + 1e-12:
            raise DomainError(f"cannot restrict to {domain}: outside {self.domain}")
        return ScalarField(self.fn, (lo, hi), self.integrable, self.name)

    @staticmethod
    def constant(value: float, domain: tuple[float, float] = (-_INF, _INF),
                 name: str = "") -> "ScalarField":
        v = float(value)
        return ScalarField(lambda t: v, domain, True, name or f"{v:g}")


def as_field(f, domain: tuple[float, float] = (-_INF, _INF)) -> ScalarField:
    """Coerce a constant or bare callable to a ScalarField."""
    if isinstance(f, ScalarField):
        return f
    if callable(f):
        return ScalarField(f, domain)
    return ScalarField.constant(float(f), domain)


@dataclass(frozen=True)
class ParityPair:
    """Even/odd decomposition of a field: source = even + odd pointwise."""

    even: ScalarField
    odd: ScalarField


def _require_symmetric(domain: tuple[float, float]) -> None:
    lo, hi = domain
    if math.isinf(lo) and math.isinf(hi):
        return
    if abs(lo + hi) > 1e-12 * max(1.0, abs(hi)):
        raise DomainError(f"domain {domain} is not symmetric about 0")


def parity_split(f: ScalarField) -> ParityPair:
    """Split f into even and odd parts, (f(t) +/- f(-t)) / 2.

    The domain must be symmetric about 0, otherwise the reflected
    evaluation is undefined.
    """
    _require_symmetric(f.domain)
    fn = f.fn
    even = ScalarField(lambda t: 0.5 * (fn(t) + fn(-t)), f.domain, f.integrable,
                       f"even({f.name})" if f.name else "")
    odd = ScalarField(lambda t: 0.5 * (fn(t) - fn(-t)), f.domain, f.integrable,
                      f"odd({f.name})" if f.name else "")
    return ParityPair(even=even, odd=odd)


def oriented_indicator(t1: float, t2: float, t: float) -> int:
    """Signed indicator of the oriented interval from t1 to t2.

    Returns 1 for t1 <= t <= t2, -1 for t2 <= t < t1, 0 otherwise, so that
    the integral of f from t1 to t2 equals the integral of the indicator
    times f over the whole line regardless of endpoint order.
    """
    if t1 <= t <= t2:
        return 1
    if t2 <= t < t1:
        return -1
    return 0


class CaseVariant(enum.Enum):
    # constant-coefficient initial value cases
    C1 = "C1"        # a^2 > b^2 (trigonometric)
    C2 = "C2"        # a^2 < b^2 (hyperbolic)
    C3_1 = "C3.1"    # a = b (affine)
    C3_2 = "C3.2"    # a = -b (constant)
    # variable-coefficient periodic cases
    C1P = "C1'"      # b_e = k a, |k| < 1
    C2P = "C2'"      # b_e = k a, |k| > 1
    C3P = "C3'"      # b_e = a
    C4P = "C4'"      # b_e = -a  (resonant)
    C5P = "C5'"      # a_e = b_e = 0  (resonant)
    MIXED = "mixed"


_IVP_VARIANTS = {CaseVariant.C1, CaseVariant.C2, CaseVariant.C3_1, CaseVariant.C3_2}


@dataclass(frozen=True)
class CaseTag:
    """Classification outcome; ``k`` is the fitted ratio b_e/a where that
    ratio defines the case (C1'-C4')."""

    variant: CaseVariant
    k: Optional[float] = None

    def __post_init__(self):
        if self.variant is CaseVariant.C1P and not abs(self.k) < 1.0:
            raise ValueError(f"C1' requires |k| < 1, got k={self.k}")
        if self.variant is CaseVariant.C2P and not abs(self.k) > 1.0:
            raise ValueError(f"C2' requires |k| > 1, got k={self.k}")

    @property
    def is_ivp_case(self) -> bool:
        return self.variant in _IVP_VARIANTS

    def __str__(self):
        if self.k is not None and self.variant in (CaseVariant.C1P, CaseVariant.C2P):
            return f"{self.variant.value} (k={self.k:g})"
        return self.variant.value


@dataclass(frozen=True)
class IvpProblem:
    """x'(t) + a x(-t) + b x(t) = h(t), x(t0) = c, with constant a, b."""

    a: float
    b: float
    t0: float
    c: float
    h: ScalarField


@dataclass(frozen=True)
class BvpProblem:
    """x'(t) + a(t) x(-t) + b(t) x(t) = h(t) on [-T, T], x(-T) = x(T)."""

    a: ScalarField
    b: ScalarField
    T: float
    h: ScalarField

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"half-period T must be positive, got {self.T}")
        for name in ("a", "b", "h"):
            f = getattr(self, name)
            if f.domain[0] > -self.T + 1e-12 or f.domain[1] < self.T - 1e-12:
                raise DomainError(
                    f"field {name} with domain {f.domain} does not cover [-T, T]")

    @property
    def interval(self) -> tuple[float, float]:
        return (-self.T, self.T)


@dataclass(frozen=True)
class GreenKernel:
    """A piecewise two-argument kernel G(t, s) with region metadata.

    ``jump`` is the expected diagonal value discontinuity
    G(t, t-) - G(t, t+); kernels whose defining convention is instead a
    jump of the t-derivative carry it in ``dt_jump``. ``panels(t)`` yields
    (lo, hi, fn) pieces of s -> G(t, s), each fn the smooth closed-form
    branch on its panel, so quadrature never straddles a region edge.
    """

    fn: Callable[[float, float], float]
    half_width: Optional[float]          # None: defined on all of R^2
    jump: float
    support: str
    case: Optional[CaseTag] = None
    dt_jump: Optional[float] = None
    panels: Optional[Callable[[float], list]] = field(default=None, repr=False)

    def __call__(self, t: float, s: float) -> float:
        return float(self.fn(t, s))

    def eval_grid(self, ts, ss) -> np.ndarray:
        """Dense evaluation; rows follow ts, columns follow ss."""
        return np.array([[float(self.fn(t, s)) for s in ss] for t in ts])

    def value_jump_at(self, t: float, eps: float = 1e-7) -> float:
        """Measured G(t, t-eps) - G(t, t+eps)."""
        return float(self.fn(t, t - eps)) - float(self.fn(t, t + eps))

    def dt_jump_at(self, t: float, eps: float = 1e-6, h: float = 1e-8) -> float:
        """Measured jump of dG/dt across the diagonal, approaching in s."""
        def ddt(s):
            return (self.fn(t + h, s) - self.fn(t - h, s)) / (2.0 * h)
        return float(ddt(t + eps) - ddt(t - eps))


def classify_ivp(a: float, b: float) -> CaseTag:
    """Classify constant coefficients into the four initial-value cases.

    Raises for a = 0 (a plain ODE, outside this theory) and for
    ambiguous near-degenerate pairs where a^2 and b^2 agree to within
    classification tolerance without a = +/-b holding exactly.
    """
    a = float(a)
    b = float(b)
    if a == 0.0:
        raise UnsupportedCaseError(
            "a = 0 is an ordinary differential equation without reflection; "
            "not supported")
    if a == b:
        return CaseTag(CaseVariant.C3_1)
    if a == -b:
        return CaseTag(CaseVariant.C3_2)
    d = a * a - b * b
    if abs(d) <= CLASSIFY_TOL * max(a * a, b * b):
        raise UnsupportedCaseError(
            f"a^2 - b^2 = {d:g} is within classification tolerance of zero "
            "but a != +/-b exactly; refusing to guess the case")
    return CaseTag(CaseVariant.C1 if d > 0 else CaseVariant.C2)


def _classification_grid(a: ScalarField, b: ScalarField, n: int) -> np.ndarray:
    lo = max(a.domain[0], b.domain[0])
    hi = min(a.domain[1], b.domain[1])
    if math.isinf(lo) or math.isinf(hi):
        raise DomainError("classification needs a finite common domain; "
                          "restrict the fields to [-T, T] first")
    _require_symmetric((lo, hi))
    return np.linspace(lo, hi, n)


def classify_bvp(a: ScalarField, b: ScalarField,
                 tol: float = CLASSIFY_TOL) -> CaseTag:
    """Classify variable coefficients into the periodic-problem cases.

    Decomposes a and b by parity on a sampling grid. ``tol`` is relative
    to the sampled coefficient scale. k is fitted as the median of
    b_e(t)/a(t) over grid points where |a| is above tolerance; the median
    resists isolated near-zeros of a.
    """
    ts = _classification_grid(a, b, CLASSIFY_GRID_N)
    av = a.sample(ts)
    bv = b.sample(ts)
    a_e = 0.5 * (av + av[::-1])
    a_o = 0.5 * (av - av[::-1])
    b_e = 0.5 * (bv + bv[::-1])

    scale_a = float(np.max(np.abs(av)))
    scale = max(scale_a, float(np.max(np.abs(bv))), 1e-300)
    thresh = tol * scale
    if scale_a <= thresh:
        raise UnsupportedCaseError("a is (numerically) identically zero; "
                                   "the equation has no reflection term")

    if np.max(np.abs(a_e)) <= thresh and np.max(np.abs(b_e)) <= thresh:
        return CaseTag(CaseVariant.C5P)

    if np.max(np.abs(a_o)) <= thresh:
        admissible = np.abs(av) > tol * scale_a
        ratios = b_e[admissible] / av[admissible]
        k = float(np.median(ratios))
        if np.max(np.abs(ratios - k)) > tol * (1.0 + abs(k)):
            return CaseTag(CaseVariant.MIXED)
        if abs(k - 1.0) <= tol * (1.0 + abs(k)):
            return CaseTag(CaseVariant.C3P, k=1.0)
        if abs(k + 1.0) <= tol * (1.0 + abs(k)):
            return CaseTag(CaseVariant.C4P, k=-1.0)
        if abs(k) < 1.0:
            return CaseTag(CaseVariant.C1P, k=k)
        return CaseTag(CaseVariant.C2P, k=k)

    return CaseTag(CaseVariant.MIXED)
