"""Method error: convergence error, truncation error, empirical order fit.

The convergence error e_i^k is the exact solution sampled on the grid
minus the discrete solution; the truncation error eps_i^k is the residual
left when the sampled exact solution is pushed through the discrete
operators.  Both decay at order (2,2) for smooth data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, PhysicsParams, norm_dx
from .scheme import Field2D, apply_stiffness
from .analytic import AnalyticCase, sample_exact, sample_inputs


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Convergence/truncation error data; unused parts stay None."""

    e: np.ndarray | None = None
    eps: np.ndarray | None = None
    norms_by_k: np.ndarray | None = None
    max_norm: float | None = None
    max_abs_eps: float | None = None
    order_estimate: float | None = None


def convergence_error(exact: Field2D, discrete: Field2D,
                      g: GridSpec) -> ErrorReport:
    """e_i^k = pbar_i^k - p_i^k with per-step dx-norms."""
    if exact.values.shape != discrete.values.shape:
        raise ValueError(
            f"shape mismatch: {exact.values.shape} vs {discrete.values.shape}")
    if exact.values.shape != (g.i_max + 1, g.k_max + 1):
        raise ValueError("field shape does not match the grid")
    e = exact.values - discrete.values
    norms = np.array([norm_dx(e[:, k], g) for k in range(g.k_max + 1)])
    return ErrorReport(e=e, norms_by_k=norms, max_norm=float(norms.max()))


def truncation_error(case: AnalyticCase, g: GridSpec,
                     p: PhysicsParams) -> ErrorReport:
    """eps from plugging the sampled exact solution into the scheme operators.

    eps^0 is the row-0 residual (zero when the discrete data are the
    samples themselves), eps^1 the initialization residual, and eps^k for
    k >= 2 the evolution residual against the sampled source.
    """
    pbar = sample_exact(case, g).values
    data = sample_inputs(case, g)
    dt = g.dt
    eps = np.zeros_like(pbar)

    eps[:, 0] = pbar[:, 0] - np.asarray(data.p0h, dtype=np.float64)

    p1bar = np.zeros(g.i_max + 1) if data.p1h is None \
        else np.asarray(data.p1h, dtype=np.float64)
    ah0 = apply_stiffness(pbar[:, 0], p.c, g)
    eps[1:-1, 1] = ((pbar[1:-1, 1] - pbar[1:-1, 0]) / dt
                    + (dt / 2.0) * ah0[1:-1] - p1bar[1:-1])

    sbar = None if data.sh is None else np.asarray(
        [[float(v) for v in row] for row in data.sh])
    for k in range(2, g.k_max + 1):
        ah = apply_stiffness(pbar[:, k - 1], p.c, g)
        res = ((pbar[1:-1, k] - 2.0 * pbar[1:-1, k - 1] + pbar[1:-1, k - 2])
               / (dt * dt) + ah[1:-1])
        if sbar is not None:
            res = res - sbar[1:-1, k - 1]
        eps[1:-1, k] = res

    return ErrorReport(eps=eps, max_abs_eps=float(np.abs(eps).max()))


def order_fit(resolutions, errors) -> float:
    """Least-squares slope of log(error) against log(dx).

    resolutions is a list of (dx, dt) pairs with dt proportional to dx, so
    the fit in dx matches a fit in sqrt(dx^2 + dt^2) up to a constant.
    """
    if len(resolutions) < 3:
        raise ValueError(f"need at least 3 resolutions, got {len(resolutions)}")
    if len(errors) != len(resolutions):
        raise ValueError("resolutions and errors must have equal length")
    for err in errors:
        if not (err > 0 and math.isfinite(err)):
            raise ValueError(f"errors must be positive and finite, got {err}")
    log_dx = np.log([dx for dx, _ in resolutions])
    log_e = np.log(list(errors))
    slope = np.polyfit(log_dx, log_e, 1)[0]
    return float(slope)
