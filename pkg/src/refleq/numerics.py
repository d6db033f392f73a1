"""Quadrature, finite-difference residuals, and the independent
Runge-Kutta / shooting oracles used to validate every closed form.

The oracle route never touches the closed-form kernels: it integrates the
equivalent 2x2 even/odd first-order system

    x_o' = (a_o - b_o) x_o - (a_e + b_e) x_e + h_e
    x_e' = (a_e - b_e) x_o - (a_o + b_o) x_e + h_o

outward from t = 0 and reassembles x = x_o + x_e. Starting at x_o(0) = 0
forces x_o odd and x_e even (uniqueness of the linear system under the
parity symmetry of its coefficients), so x solves the scalar equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .core import ScalarField, as_field
from .errors import CannotShootError, DomainError, QuadratureError

__all__ = [
    "Grid",
    "integrate",
    "antiderivative_field",
    "central_difference",
    "residual_check",
    "oracle_ivp",
    "oracle_bvp_shooting",
    "spline_field",
]

_MAX_DEPTH = 40


@dataclass(frozen=True)
class Grid:
    """Sorted nodes, symmetric about 0, so x(-t) is an exact table lookup."""

    nodes: np.ndarray

    def __post_init__(self):
        ns = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", ns)
        if ns.ndim != 1 or len(ns) < 3:
            raise DomainError("grid needs at least 3 nodes")
        if np.any(np.diff(ns) <= 0):
            raise DomainError("grid nodes must be strictly increasing")
        if np.max(np.abs(ns + ns[::-1])) > 1e-12 * max(1.0, abs(ns[-1])):
            raise DomainError("grid nodes must be closed under negation")

    @property
    def step(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def half_width(self) -> float:
        return float(self.nodes[-1])

    @staticmethod
    def symmetric(half_width: float, n: int = 513) -> "Grid":
        if n % 2 == 0:
            n += 1  # keep 0 as a node
        return Grid(np.linspace(-half_width, half_width, n))


def _simpson(f, lo, hi, flo, fmid, fhi):
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)


def _adaptive(f, lo, hi, flo, fmid, fhi, whole, tol, depth):
    mid = 0.5 * (lo + hi)
    flm = f(0.5 * (lo + mid))
    frm = f(0.5 * (mid + hi))
    left = _simpson(f, lo, mid, flo, flm, fmid)
    right = _simpson(f, mid, hi, fmid, frm, fhi)
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth >= _MAX_DEPTH:
        raise QuadratureError(
            f"adaptive quadrature failed to converge on [{lo:g}, {hi:g}]")
    return (_adaptive(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1)
            + _adaptive(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1))


def integrate(f, t1: float, t2: float, breakpoints=(), rtol: float = 1e-9) -> float:
    """Adaptive Simpson quadrature of f over [t1, t2].

    The interval is split at the given breakpoints so each panel
    integrates a smooth piece. The error estimate is kept below
    rtol * (1 + |result|) overall.
    """
    if t2 < t1:
        raise DomainError(f"integrate requires t1 <= t2, got [{t1}, {t2}]")
    if t2 == t1:
        return 0.0
    fn = f.fn if isinstance(f, ScalarField) else f
    cuts = sorted({float(t1), float(t2),
                   *(float(b) for b in breakpoints if t1 < b < t2)})
    # first pass gives the scale for the relative tolerance
    rough = 0.0
    cached = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        flo, fmid, fhi = fn(lo), fn(0.5 * (lo + hi)), fn(hi)
        whole = _simpson(fn, lo, hi, flo, fmid, fhi)
        cached.append((lo, hi, flo, fmid, fhi, whole))
        rough += whole
    tol_total = rtol * (1.0 + abs(rough))
    total = 0.0
    for lo, hi, flo, fmid, fhi, whole in cached:
        panel_tol = tol_total * (hi - lo) / (t2 - t1)
        total += _adaptive(fn, lo, hi, flo, fmid, fhi, whole, panel_tol, 0)
    return float(total)


def signed_integral(f, t1: float, t2: float, breakpoints=(), rtol: float = 1e-9) -> float:
    """Oriented integral: negated when t2 < t1."""
    if t1 <= t2:
        return integrate(f, t1, t2, breakpoints, rtol)
    return -integrate(f, t2, t1, breakpoints, rtol)


def spline_field(ts: np.ndarray, ys: np.ndarray, name: str = "") -> ScalarField:
    """Wrap grid samples into a field via a cubic spline."""
    sp = CubicSpline(ts, ys)
    return ScalarField(lambda t: float(sp(t)), (float(ts[0]), float(ts[-1])),
                       True, name)


def antiderivative_field(f, domain: tuple[float, float], base: float = 0.0,
                         n: int = 2049, name: str = "") -> ScalarField:
    """The field t -> integral of f from base to t, spline-backed.

    Built from a dense sample and the exact antiderivative of its cubic
    spline; used wherever a whole antiderivative function is needed
    (coefficient primitives, nested integrals of resonant families).
    """
    fn = f.fn if isinstance(f, ScalarField) else f
    ts = np.linspace(domain[0], domain[1], n)
    ys = np.array([float(fn(t)) for t in ts])
    anti = CubicSpline(ts, ys).antiderivative()
    offset = float(anti(base))
    return ScalarField(lambda t: float(anti(t)) - offset, domain, True, name)


def central_difference(u, t: float, step: float = 1e-4) -> float:
    fn = u.fn if isinstance(u, ScalarField) else u
    return (float(fn(t + step)) - float(fn(t - step))) / (2.0 * step)


def residual_check(u, a, b, h, grid: Grid, step: float | None = None,
                   exclude: float = 1e-3) -> float:
    """Max over interior grid nodes of |Du + a u(-t) + b u(t) - h|.

    D is the central difference at the given step (grid step by default).
    Nodes within ``exclude`` of 0 are skipped: solutions are C^1 but their
    second derivative may jump at the reflection fixed point, which would
    pollute the difference quotient without saying anything about u.
    """
    if step is None:
        step = grid.step
    uf = as_field(u)
    af, bf, hf = as_field(a), as_field(b), as_field(h)
    worst = 0.0
    lo, hi = grid.nodes[0], grid.nodes[-1]
    for t in grid.nodes[1:-1]:
        t = float(t)
        if abs(t) < exclude or t - step < lo or t + step > hi:
            continue
        r = (central_difference(uf, t, step) + af(t) * uf(-t)
             + bf(t) * uf(t) - hf(t))
        worst = max(worst, abs(r))
    return worst


def _parity_rhs(a, b, h):
    """RHS of the even/odd system as a closure over the coefficient fields."""
    af = as_field(a)
    bf = as_field(b)
    hf = as_field(h)

    def rhs(t, xo, xe):
        ap, am = af(t), af(-t)
        bp, bm = bf(t), bf(-t)
        hp, hm = hf(t), hf(-t)
        a_e, a_o = 0.5 * (ap + am), 0.5 * (ap - am)
        b_e, b_o = 0.5 * (bp + bm), 0.5 * (bp - bm)
        h_e, h_o = 0.5 * (hp + hm), 0.5 * (hp - hm)
        return ((a_o - b_o) * xo - (a_e + b_e) * xe + h_e,
                (a_e - b_e) * xo - (a_o + b_o) * xe + h_o)

    return rhs


def _march(rhs, ts, xo0, xe0):
    """Classic RK4 along the node sequence ts (monotone either way)."""
    n = len(ts)
    xo = np.empty(n)
    xe = np.empty(n)
    xo[0], xe[0] = xo0, xe0
    for i in range(n - 1):
        t = ts[i]
        dt = ts[i + 1] - t
        o, e = xo[i], xe[i]
        k1o, k1e = rhs(t, o, e)
        k2o, k2e = rhs(t + 0.5 * dt, o + 0.5 * dt * k1o, e + 0.5 * dt * k1e)
        k3o, k3e = rhs(t + 0.5 * dt, o + 0.5 * dt * k2o, e + 0.5 * dt * k2e)
        k4o, k4e = rhs(t + dt, o + dt * k3o, e + dt * k3e)
        xo[i + 1] = o + dt / 6.0 * (k1o + 2 * k2o + 2 * k3o + k4o)
        xe[i + 1] = e + dt / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
    return xo, xe


def _integrate_parity_system(a, b, h, grid: Grid, xo0: float, xe0: float):
    """March the even/odd system outward from 0 over a symmetric grid."""
    ts = grid.nodes
    ic = int(np.argmin(np.abs(ts)))
    if abs(ts[ic]) > 1e-12:
        raise DomainError("grid must contain t = 0")
    rhs = _parity_rhs(a, b, h)
    xo = np.empty(len(ts))
    xe = np.empty(len(ts))
    xo_r, xe_r = _march(rhs, ts[ic:], xo0, xe0)
    xo_l, xe_l = _march(rhs, ts[ic::-1], xo0, xe0)
    xo[ic:], xe[ic:] = xo_r, xe_r
    xo[:ic + 1], xe[:ic + 1] = xo_l[::-1], xe_l[::-1]
    return xo, xe


def oracle_ivp(p, grid: Grid) -> ScalarField:
    """Brute-force solution of the initial value problem by RK4.

    Integrates the forced even/odd system from 0 outward for a particular
    solution with x(0) = 0, does the same for the homogeneous solution
    with x(0) = 1, and combines them to meet x(t0) = c. Entirely
    independent of the closed-form kernels.
    """
    ts = grid.nodes
    idx = int(np.argmin(np.abs(ts - p.t0)))
    if abs(ts[idx] - p.t0) > 1e-9 * max(1.0, abs(p.t0)):
        raise DomainError(f"t0={p.t0} is not a grid node")
    xo_p, xe_p = _integrate_parity_system(p.a, p.b, p.h, grid, 0.0, 0.0)
    xo_h, xe_h = _integrate_parity_system(p.a, p.b, 0.0, grid, 0.0, 1.0)
    up = xo_p + xe_p
    uh = xo_h + xe_h
    if abs(uh[idx]) < 1e-14:
        raise CannotShootError(
            f"homogeneous solution vanishes at t0={p.t0}; no unique solution")
    lam = (p.c - up[idx]) / uh[idx]
    return spline_field(ts, up + lam * uh, name="oracle_ivp")


def oracle_bvp_shooting(p, n: int = 2049, tol: float = 1e-10) -> ScalarField:
    """Independent periodic-problem solution by shooting on x(0).

    With x_o(0) = 0 enforced by parity, the periodic condition
    x(-T) = x(T) reduces to x_o(T) = 0, so the search is one-dimensional
    in xi = x(0). The map xi -> x_o(T) is affine for this linear problem;
    a flat map (no sign change however far the bracket is expanded) means
    the problem is resonant.
    """
    grid = Grid.symmetric(p.T, n)
    ts = grid.nodes

    def miss(xi: float) -> np.ndarray:
        xo, xe = _integrate_parity_system(p.a, p.b, p.h, grid, 0.0, xi)
        return xo, xe

    xo0, xe0 = miss(0.0)
    xo1, xe1 = miss(1.0)
    f0 = xo0[-1]
    slope = xo1[-1] - f0
    scale = max(abs(f0), abs(xo1[-1]), 1.0)
    if abs(slope) <= 1e-12 * scale:
        # bracketing cannot produce a sign change: x_o(T) ignores xi
        raise CannotShootError(
            "x_o(T) does not respond to the free initial value; "
            "the problem appears resonant")
    xi = -f0 / slope  # exact for an affine miss function
    xo, xe = miss(xi)
    # secant refinement guards against accumulated arithmetic error
    for _ in range(3):
        if abs(xo[-1]) <= tol * scale:
            break
        xi -= xo[-1] / slope
        xo, xe = miss(xi)
    if abs(xo[-1]) > 1e-6 * scale:
        raise CannotShootError(f"shooting failed to close: x_o(T)={xo[-1]:g}")
    return spline_field(ts, xo + xe, name="oracle_bvp")
