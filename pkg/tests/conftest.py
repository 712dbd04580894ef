"""Shared fixtures: canonical cases, grids, and cached solver runs.

The expensive runs (working64 + oracle solves, local/global round-off
studies) are computed once per session and shared across test modules so
the suite stays fast.
"""

from __future__ import annotations

import dataclasses

import pytest

import wavebound as wb


@pytest.fixture(scope="session")
def bump():
    """The smooth compactly-supported reference case on [0, 1], c = 1."""
    return wb.bump_case()


@pytest.fixture(scope="session")
def physics():
    """CFL-line physics: dt chosen as the largest step with c*dt/dx <= 1 - xi."""
    return wb.PhysicsParams(c=1.0, xi=0.1)


@dataclasses.dataclass(frozen=True)
class SolveBundle:
    """A solved configuration shared between test modules."""

    grid: wb.GridSpec
    physics: wb.PhysicsParams
    inputs: wb.SchemeInputs
    working: wb.Field2D
    oracle: wb.Field2D


@pytest.fixture(scope="session")
def small_run(bump, physics):
    """i_max = 10, k_max = 20 with an exact rational oracle.

    Small enough for zero-tolerance rational work (convolution identity,
    exact energy conservation).
    """
    dx = 0.1
    dt = wb.cfl_dt(dx, physics)
    g = wb.grid_for_steps(0.0, 1.0, 10, dt, 20)
    inputs = wb.sample_inputs(bump, g)
    working = wb.solve_scheme(g, physics, inputs, mode="working64")
    oracle = wb.solve_scheme(g, physics, inputs, mode="oracle", oracle="rational")
    return SolveBundle(g, physics, inputs, working, oracle)


@pytest.fixture(scope="session")
def medium_run(bump, physics):
    """i_max = 100 on the CFL line, with a 256-bit high-precision oracle.

    This is the configuration used for the local and global round-off
    certificates; too many nodes for the rational oracle mode.
    """
    dx = 0.01
    dt = wb.cfl_dt(dx, physics)
    g = wb.make_grid(0.0, 1.0, 100, 1.0, dt)
    inputs = wb.sample_inputs(bump, g)
    working = wb.solve_scheme(g, physics, inputs, mode="working64")
    oracle = wb.solve_scheme(g, physics, inputs, mode="oracle", oracle="hp")
    return SolveBundle(g, physics, inputs, working, oracle)


@pytest.fixture(scope="session")
def small_study(small_run):
    """Local deltas + global round-off for the small rational run."""
    study = wb.local_deltas(
        small_run.working, small_run.grid, small_run.physics, small_run.inputs
    )
    wb.attach_global(study, small_run.working, small_run.oracle)
    return study


@pytest.fixture(scope="session")
def medium_study(medium_run):
    """Local deltas + global round-off for the i_max = 100 run."""
    study = wb.local_deltas(
        medium_run.working, medium_run.grid, medium_run.physics, medium_run.inputs
    )
    wb.attach_global(study, medium_run.working, medium_run.oracle)
    return study
