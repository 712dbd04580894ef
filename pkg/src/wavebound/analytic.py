"""Continuous problem data and d'Alembert's closed-form solution.

The solution on a finite string is evaluated through the method of images:
initial data are extended to the line as odd, 2L-periodic functions and
plugged into the infinite-domain formula.  Cases with nonzero initial
velocity or source use adaptive quadrature for the integral terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridSpec
from .scheme import Field2D

QUAD_REL_TOL = 1e-12
QUAD_MAX_DEPTH = 40


@dataclass(frozen=True)
class Regularity:
    """Bounds on third/fourth derivatives used by the error-bound constants."""

    alpha3: float
    C3: float
    alpha4: float
    C4: float

    def __post_init__(self):
        for name in ("alpha3", "C3", "alpha4", "C4"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive real, got {v}")


@dataclass(frozen=True)
class AnalyticCase:
    """Continuous problem: velocity c, domain, data p0/p1/s, regularity.

    p1 and s may be None, meaning identically zero (this keeps the
    bump case free of quadrature).  s is constrained to vanish at t=0 by
    the problem statement; user-supplied cases are trusted, not checked.
    """

    c: float
    x_min: float
    x_max: float
    p0: Callable[[float], float]
    p1: Callable[[float], float] | None
    s: Callable[[float, float], float] | None
    regularity: Regularity
    name: str = "custom"

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"c must be a positive real, got {self.c}")
        if not self.x_min < self.x_max:
            raise ValueError("need x_min < x_max")
        if self.p0(self.x_min) != 0.0 or self.p0(self.x_max) != 0.0:
            raise ValueError("p0 must vanish at both ends of the domain")


def chi_bump(z: float) -> float:
    """(cos(pi z / 2))^5 on [-1, 1], zero outside.

    The boundary belongs to the zero branch: cos(pi/2) rounds to 6.1e-17
    in binary64 and its fifth power is not exactly zero, while the true
    value is.
    """
    if abs(z) >= 1.0:
        return 0.0
    return math.cos(0.5 * math.pi * z) ** 5


_BUMP_CENTER = 0.5
_BUMP_WIDTH = 0.25


def _bump_p0(x: float) -> float:
    return chi_bump(2.0 * (x - _BUMP_CENTER) / _BUMP_WIDTH)


def bump_case() -> AnalyticCase:
    """Unit-speed string on [0, 1] with a C^4 cosine-power bump at rest.

    The bump is supported on [0.375, 0.625], so both Dirichlet ends see
    exact zeros.  Regularity constants are the known derivative bounds for
    this profile.
    """
    return AnalyticCase(
        c=1.0,
        x_min=0.0,
        x_max=1.0,
        p0=_bump_p0,
        p1=None,
        s=None,
        regularity=Regularity(
            alpha3=math.sqrt(2.0) / 2.0,
            C3=5120.0 * math.sqrt(2.0),
            alpha4=math.sqrt(2.0) / 2.0,
            C4=409600.0 / 3.0,
        ),
        name="bump",
    )


def antisym_extend(f: Callable[[float], float], x_min: float, x_max: float,
                   x: float) -> float:
    """Odd, 2(x_max-x_min)-periodic extension of f, evaluated at x."""
    length = x_max - x_min
    y = (x - x_min) % (2.0 * length)
    if y <= length:
        return f(x_min + y)
    return -f(x_min + (2.0 * length - y))


def _adaptive_simpson(f, a: float, b: float, rel_tol: float,
                      max_depth: int) -> float:
    """Adaptive Simpson quadrature with a whole-interval relative target."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = max(abs(whole), 1e-300)

    def recurse(a, fa, m, fm, b, fb, whole, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth >= max_depth:
            raise ArithmeticError(
                f"quadrature did not converge within depth {max_depth}")
        if abs(left + right - whole) <= 15.0 * rel_tol * scale:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, fa, lm, flm, m, fm, left, depth + 1)
                + recurse(m, fm, rm, frm, b, fb, right, depth + 1))

    return recurse(a, fa, m, fm, b, fb, whole, 0)


def dalembert_eval(case: AnalyticCase, x: float, t: float) -> float:
    """p(x, t) by d'Alembert's formula on the extended line."""
    if not case.x_min <= x <= case.x_max:
        raise ValueError(f"x={x} outside [{case.x_min}, {case.x_max}]")
    if t < 0.0:
        raise ValueError(f"t={t} must be nonnegative")
    c = case.c
    p0t = lambda y: antisym_extend(case.p0, case.x_min, case.x_max, y)
    val = 0.5 * (p0t(x - c * t) + p0t(x + c * t))
    if case.p1 is not None:
        p1t = lambda y: antisym_extend(case.p1, case.x_min, case.x_max, y)
        val += (1.0 / (2.0 * c)) * _adaptive_simpson(
            p1t, x - c * t, x + c * t, QUAD_REL_TOL, QUAD_MAX_DEPTH)
    if case.s is not None:
        def inner(sigma: float) -> float:
            st = lambda y: antisym_extend(
                lambda xx: case.s(xx, sigma), case.x_min, case.x_max, y)
            return _adaptive_simpson(st, x - c * (t - sigma),
                                     x + c * (t - sigma),
                                     QUAD_REL_TOL, QUAD_MAX_DEPTH)
        val += (1.0 / (2.0 * c)) * _adaptive_simpson(
            inner, 0.0, t, QUAD_REL_TOL, QUAD_MAX_DEPTH)
    return val


def sample_row(case: AnalyticCase, g: GridSpec, k: int) -> np.ndarray:
    """Exact solution sampled at step k: p(x_i, t^k) for i = 0..i_max."""
    t = g.t(k)
    out = np.empty(g.i_max + 1, dtype=np.float64)
    out[0] = dalembert_eval(case, case.x_min, t)
    out[-1] = dalembert_eval(case, case.x_max, t)
    for i in range(1, g.i_max):
        out[i] = dalembert_eval(case, g.x(i), t)
    return out


def sample_exact(case: AnalyticCase, g: GridSpec) -> Field2D:
    """Exact solution sampled on the whole grid, as a float64 field."""
    if not (case.x_min <= g.x_min and g.x_max <= case.x_max):
        raise ValueError("grid domain exceeds the case domain")
    values = np.empty((g.i_max + 1, g.k_max + 1), dtype=np.float64)
    for k in range(g.k_max + 1):
        values[:, k] = sample_row(case, g, k)
    return Field2D(values=values, mode="analytic")


def sample_inputs(case: AnalyticCase, g: GridSpec):
    """Discrete Cauchy data for the case: binary64 samples of p0, p1, s.

    Boundary entries are taken at the exact domain ends (x(i_max) can sit
    one ulp off x_max), so Dirichlet compatibility gives exact zeros.
    """
    from .scheme import SchemeInputs
    xs = [case.x_min] + [g.x(i) for i in range(1, g.i_max)] + [case.x_max]
    p0h = tuple(case.p0(x) for x in xs)
    p1h = None if case.p1 is None else tuple(case.p1(x) for x in xs)
    sh = None
    if case.s is not None:
        sh = tuple(tuple(case.s(x, g.t(k)) for k in range(g.k_max + 1))
                   for x in xs)
    return SchemeInputs(p0h=p0h, p1h=p1h, sh=sh)
