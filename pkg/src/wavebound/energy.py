"""Discrete energy at half time steps and the stability inequalities.

The energy between steps k and k+1 is

    E^{k+1/2} = 1/2 ||(p^{k+1}-p^k)/dt||^2 + 1/2 <A_h p^k, p^{k+1}>

with the dx-weighted inner product over interior nodes (boundary terms
vanish on Dirichlet fields).  With zero source it is conserved exactly in
exact arithmetic; under CFL it is nonnegative and sandwiched by the
over/underestimation inequalities checked here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._exact import rational
from .grid import GridSpec, PhysicsParams, cfl_check, norm_dx
from .scheme import Field2D, SchemeInputs, apply_stiffness

# Working-precision slack for the inequality checks: float summation and
# sqrt add noise around 1 ulp per term, far below this.
INEQ_REL_SLACK = 1e-9


def discrete_energy_exact(f: Field2D, k: int, c: float, g: GridSpec):
    """E^{k+1/2} as an exact rational (field must carry exact values)."""
    if f.exact is None:
        raise ValueError("field has no exact values; use discrete_energy")
    if not 0 <= k <= g.k_max - 1:
        raise IndexError(f"k={k} outside 0..{g.k_max - 1}")
    pk = f.step_exact(k)
    pk1 = f.step_exact(k + 1)
    dt = rational(g.dt)
    dx = rational(g.dx)
    kin = rational(0)
    for qi, ri in zip(pk, pk1):
        d = (rational(ri) - rational(qi)) / dt
        kin += d * d * dx
    ah = apply_stiffness(pk, c, g, exact=True)
    stiff = rational(0)
    for i in range(1, g.i_max):
        stiff += ah[i] * rational(pk1[i]) * dx
    return kin / 2 + stiff / 2


def discrete_energy(f: Field2D, k: int, c: float, g: GridSpec) -> float:
    """E^{k+1/2} in the field's own precision (float64 for working64)."""
    if f.exact is not None:
        return float(discrete_energy_exact(f, k, c, g))
    if not 0 <= k <= g.k_max - 1:
        raise IndexError(f"k={k} outside 0..{g.k_max - 1}")
    pk = f.step(k)
    pk1 = f.step(k + 1)
    dt = g.dt
    dx = g.dx
    kin = 0.0
    for qi, ri in zip(pk, pk1):
        d = (ri - qi) / dt
        kin += d * d * dx
    ah = apply_stiffness(pk, c, g)
    stiff = 0.0
    for i in range(1, g.i_max):
        stiff += ah[i] * pk1[i] * dx
    return 0.5 * kin + 0.5 * stiff


@dataclass(frozen=True, eq=False)
class EnergySeries:
    """E^{k+1/2} for k = 0..k_max-1, plus exact values when available."""

    values: np.ndarray
    grid: GridSpec
    c: float
    exact: tuple | None = None


def energy_series(f: Field2D, c: float, g: GridSpec) -> EnergySeries:
    if f.exact is not None:
        exact = tuple(discrete_energy_exact(f, k, c, g)
                      for k in range(g.k_max))
        values = np.array([float(e) for e in exact], dtype=np.float64)
        return EnergySeries(values=values, grid=g, c=c, exact=exact)
    values = np.array([discrete_energy(f, k, c, g) for k in range(g.k_max)],
                      dtype=np.float64)
    return EnergySeries(values=values, grid=g, c=c)


@dataclass(frozen=True, eq=False)
class EnergyReport:
    """Per-half-step outcome of the three stability checks."""

    series: EnergySeries
    over_ok: np.ndarray
    under_ok: np.ndarray
    nonneg_ok: np.ndarray
    exact_checks: bool
    slack: float
    failures: tuple = field(default_factory=tuple)

    @property
    def all_ok(self) -> bool:
        return bool(self.over_ok.all() and self.under_ok.all()
                    and self.nonneg_ok.all())


def energy_bounds_check(f: Field2D, inputs: SchemeInputs, p: PhysicsParams,
                        g: GridSpec) -> EnergyReport:
    """Check E >= 0, the overestimation and the underestimation at every k.

    Refuses grids that violate CFL: the inequalities are statements about
    CFL-respecting schemes and are meaningless outside it.
    """
    if not cfl_check(g, p):
        raise ValueError("energy bounds require the CFL condition to hold")
    series = energy_series(f, p.c, g)
    exact_mode = series.exact is not None
    n_half = g.k_max

    # Source norms ||s^{k'}|| for k' = 1..k_max-1 (the overestimation sums
    # them); zero source means the right side stays at sqrt(E^{1/2}).
    s_norms = np.zeros(g.k_max + 1, dtype=np.float64)
    if inputs.sh is not None:
        sh = np.asarray([[float(v) for v in row] for row in inputs.sh])
        for kp in range(1, g.k_max):
            s_norms[kp] = norm_dx(sh[:, kp], g)
    have_source = inputs.sh is not None
    over_coef = math.sqrt(2.0) / (2.0 * math.sqrt(2.0 * p.xi - p.xi * p.xi))

    a1 = p.c * g.dt / g.dx
    a = a1 * a1
    over_ok = np.zeros(n_half, dtype=bool)
    under_ok = np.zeros(n_half, dtype=bool)
    nonneg_ok = np.zeros(n_half, dtype=bool)
    failures = []

    e0 = series.values[0]
    sqrt_e0 = math.sqrt(max(e0, 0.0))
    running_source = 0.0
    for k in range(n_half):
        ek = series.values[k]
        scale = max(1.0, abs(ek), abs(e0))
        slack = 0.0 if exact_mode else INEQ_REL_SLACK * scale

        # (c) nonnegativity
        if exact_mode:
            nonneg_ok[k] = series.exact[k] >= 0
        else:
            nonneg_ok[k] = ek >= -slack

        # (a) overestimation.  Without source this is E^{k+1/2} <= E^{1/2},
        # which exact mode compares as rationals (sqrt is monotone); with
        # source the square roots force a float evaluation.
        if k >= 1:
            running_source += s_norms[k]
        if exact_mode and not have_source:
            over_ok[k] = series.exact[k] <= series.exact[0]
        else:
            lhs = math.sqrt(max(ek, 0.0))
            rhs = sqrt_e0 + over_coef * g.dt * running_source
            tol = INEQ_REL_SLACK * max(1.0, lhs, rhs)
            over_ok[k] = lhs <= rhs + tol

        # (b) underestimation: (1-a)/2 * ||(p^{k+1}-p^k)/dt||^2 <= E^{k+1/2}
        if exact_mode:
            ra = (rational(p.c) * rational(g.dt) / rational(g.dx)) ** 2
            dtr = rational(g.dt)
            dxr = rational(g.dx)
            kin = rational(0)
            pk = f.step_exact(k)
            pk1 = f.step_exact(k + 1)
            for qi, ri in zip(pk, pk1):
                d = (ri - qi) / dtr
                kin += d * d * dxr
            under_ok[k] = (1 - ra) * kin / 2 <= series.exact[k]
        else:
            pk = f.step(k)
            pk1 = f.step(k + 1)
            kin = 0.0
            for qi, ri in zip(pk, pk1):
                d = (ri - qi) / g.dt
                kin += d * d * g.dx
            under_ok[k] = 0.5 * (1.0 - a) * kin <= ek + slack

        for name, ok in (("over", over_ok[k]), ("under", under_ok[k]),
                         ("nonneg", nonneg_ok[k])):
            if not ok:
                failures.append((k, name))

    return EnergyReport(series=series, over_ok=over_ok, under_ok=under_ok,
                        nonneg_ok=nonneg_ok, exact_checks=exact_mode,
                        slack=0.0 if exact_mode else INEQ_REL_SLACK,
                        failures=tuple(failures))
