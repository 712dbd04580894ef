"""Discretization geometry: steps, index maps, CFL check, weighted norms.

Everything here is a pure function over immutable values; the rest of the
package builds on these primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._exact import rational

_EPS = 2.0 ** -52
# Quotients within this many ulps of an integer are snapped to it before
# flooring, so that e.g. three steps of 0.1 over 0.3 count as 3 steps.
FLOOR_GUARD_ULPS = 4.0


def floor_ratio(num: float, den: float) -> int:
    """floor(num/den) guarded against binary64 division artifacts.

    0.3/0.1 rounds to 2.9999999999999996 and a bare floor would give 2.
    A quotient within FLOOR_GUARD_ULPS ulp of an integer is treated as that
    integer.  Exact multiples are unaffected, and the guard cannot fire on
    quotients that sit a half step away from an integer.
    """
    q = num / den
    nearest = round(q)
    if abs(q - nearest) <= FLOOR_GUARD_ULPS * _EPS * max(1.0, abs(q)):
        return int(nearest)
    return math.floor(q)


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time grid on [x_min, x_max] x [0, t_max].

    i_max counts space intervals (i runs over 0..i_max) and k_max counts
    whole time steps that fit in t_max: k_max = floor(t_max/dt).
    """

    x_min: float
    x_max: float
    i_max: int
    t_max: float
    dt: float
    dx: float
    k_max: int

    def x(self, i: int) -> float:
        return self.x_min + i * self.dx

    def t(self, k: int) -> float:
        return k * self.dt

    def xs(self) -> np.ndarray:
        return self.x_min + np.arange(self.i_max + 1) * self.dx

    @property
    def n_space(self) -> int:
        return self.i_max + 1

    @property
    def n_time(self) -> int:
        return self.k_max + 1


@dataclass(frozen=True)
class PhysicsParams:
    """Propagation velocity c and CFL margin xi."""

    c: float
    xi: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"c must be a finite positive real, got {self.c}")
        if not (math.isfinite(self.xi) and 0.0 < self.xi < 1.0):
            raise ValueError(f"xi must lie in (0, 1), got {self.xi}")


def make_grid(x_min: float, x_max: float, i_max: int, t_max: float,
              dt: float) -> GridSpec:
    for name, v in (("x_min", x_min), ("x_max", x_max), ("t_max", t_max),
                    ("dt", dt)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    if not x_min < x_max:
        raise ValueError(f"need x_min < x_max, got [{x_min}, {x_max}]")
    if int(i_max) != i_max or i_max < 2:
        raise ValueError(f"i_max must be an integer >= 2, got {i_max}")
    if not 0.0 < dt < t_max:
        raise ValueError(f"dt must lie in (0, t_max), got dt={dt}, t_max={t_max}")
    dx = (x_max - x_min) / i_max
    k_max = floor_ratio(t_max, dt)
    return GridSpec(x_min=float(x_min), x_max=float(x_max), i_max=int(i_max),
                    t_max=float(t_max), dt=float(dt), dx=dx, k_max=k_max)


def grid_for_steps(x_min: float, x_max: float, i_max: int, dt: float,
                   k_max: int) -> GridSpec:
    """Grid with exactly k_max time steps.

    t_max is set to (k_max + 1/2)*dt so the floor in make_grid cannot land
    on a neighbouring integer regardless of rounding.
    """
    if int(k_max) != k_max or k_max < 1:
        raise ValueError(f"k_max must be an integer >= 1, got {k_max}")
    g = make_grid(x_min, x_max, i_max, (k_max + 0.5) * dt, dt)
    assert g.k_max == k_max
    return g


def cfl_check(g: GridSpec, p: PhysicsParams) -> bool:
    """True iff c*dt/dx <= 1 - xi in working precision."""
    return p.c * g.dt / g.dx <= 1.0 - p.xi


def cfl_dt(dx: float, p: PhysicsParams) -> float:
    """Largest binary64 dt with dt ~ (1-xi)*dx/c that passes cfl_check.

    (1-xi)*dx/c can round one ulp above the CFL threshold (for dx = 0.01,
    xi = 0.1 the round trip gives c*dt/dx = 0.9000000000000001); nudge
    down until the working-precision check holds.
    """
    dt = (1.0 - p.xi) * dx / p.c
    while p.c * dt / dx > 1.0 - p.xi:
        dt = math.nextafter(dt, 0.0)
    return dt


def step_of_t(g: GridSpec, t: float) -> int:
    """Index of the last step not after t: floor(t/dt), clamped to [0, k_max]."""
    if not 0.0 <= t <= g.t_max:
        raise ValueError(f"t={t} outside [0, {g.t_max}]")
    return min(max(floor_ratio(t, g.dt), 0), g.k_max)


def _check_len(q, g: GridSpec, name: str):
    if len(q) != g.i_max + 1:
        raise ValueError(f"{name} has length {len(q)}, expected {g.i_max + 1}")


def dot_dx(q, r, g: GridSpec) -> float:
    """<q, r> = sum_i q_i r_i dx, accumulated left to right in binary64."""
    _check_len(q, g, "q")
    _check_len(r, g, "r")
    dx = g.dx
    acc = 0.0
    for qi, ri in zip(q, r):
        acc += qi * ri * dx
    return acc


def norm_dx(q, g: GridSpec) -> float:
    """sqrt(sum_i q_i^2 dx), accumulated left to right in binary64."""
    _check_len(q, g, "q")
    dx = g.dx
    acc = 0.0
    for qi in q:
        acc += qi * qi * dx
    return math.sqrt(acc)


def dot_dx_exact(q, r, g: GridSpec):
    """<q, r> over exact rationals (entries may be floats or rationals)."""
    _check_len(q, g, "q")
    _check_len(r, g, "r")
    dx = rational(g.dx)
    acc = rational(0)
    for qi, ri in zip(q, r):
        acc += rational(qi) * rational(ri) * dx
    return acc


def norm_sq_dx_exact(q, g: GridSpec):
    """Exact squared norm sum_i q_i^2 dx (the norm itself is irrational)."""
    return dot_dx_exact(q, q, g)
