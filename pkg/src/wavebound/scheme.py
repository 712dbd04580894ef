"""The three-point finite-difference solver in two precision modes.

working64 runs the classic naive C loop semantics: binary64 throughout,
one rounding per written operation, boundaries pinned to zero.  oracle
re-executes the same recurrence in exact rational arithmetic over the
rational values of the binary64 inputs (or, above a size threshold, in
high-precision floats), providing ground truth for round-off measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exact import (HP_PRECISION_BITS, hp_context, rational)
from .grid import GridSpec, PhysicsParams, _check_len

try:
    from . import _step as _compiled
except ImportError:
    _compiled = None
from . import _step_py as _fallback

#: Whether the compiled stepping kernel was importable.
COMPILED_ENGINE_AVAILABLE = _compiled is not None

#: Engine actually used when engine="auto".
DEFAULT_ENGINE = "compiled" if _compiled is not None else "python"

#: Rational oracle is used up to this many nodes (i_max*k_max); larger
#: grids fall back to high-precision floats.
ORACLE_RATIONAL_MAX_NODES = 50_000

# Guards against exceptional binary64 behaviour (underflow to subnormals
# in the update coefficients); solves outside them are refused.
MIN_DT = 2.0 ** -1000
MIN_COURANT = 2.0 ** -500


def _engine(name: str):
    if name == "auto":
        return _compiled if _compiled is not None else _fallback
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled engine requested but not built")
        return _compiled
    if name == "python":
        return _fallback
    raise ValueError(f"unknown engine {name!r}")


@dataclass(frozen=True)
class SchemeInputs:
    """Discrete Cauchy data: p0h, p1h samples and source samples sh.

    p0h has length i_max+1 with zero boundary entries.  p1h is optional
    (None means identically zero).  sh is an (i_max+1) x (k_max+1) matrix
    or None; column k feeds the update that produces step k+1 (k >= 1),
    so column 0 and the last column are never read.
    """

    p0h: tuple
    p1h: tuple | None = None
    sh: tuple | None = None

    @classmethod
    def from_arrays(cls, p0h, p1h=None, sh=None) -> "SchemeInputs":
        return cls(
            p0h=tuple(p0h),
            p1h=None if p1h is None else tuple(p1h),
            sh=None if sh is None else tuple(tuple(row) for row in sh),
        )

    @classmethod
    def zero(cls, g: GridSpec) -> "SchemeInputs":
        return cls(p0h=(0.0,) * (g.i_max + 1))

    def validate(self, g: GridSpec):
        _check_len(self.p0h, g, "p0h")
        if not (self.p0h[0] == 0 and self.p0h[-1] == 0):
            raise ValueError("boundary entries of p0h must be zero")
        if self.p1h is not None:
            _check_len(self.p1h, g, "p1h")
        if self.sh is not None:
            _check_len(self.sh, g, "sh")
            for row in self.sh:
                if len(row) != g.k_max + 1:
                    raise ValueError(
                        f"sh rows must have length {g.k_max + 1}, got {len(row)}")


@dataclass(frozen=True, eq=False)
class Field2D:
    """Solution values on the grid, indexed [i][k], plus a precision tag.

    values is always the float64 view.  For oracle modes, exact holds the
    unrounded numbers (same [i][k] indexing) and values their float64
    images.
    """

    values: np.ndarray
    mode: str
    exact: tuple | None = None

    @property
    def i_max(self) -> int:
        return self.values.shape[0] - 1

    @property
    def k_max(self) -> int:
        return self.values.shape[1] - 1

    def step(self, k: int) -> np.ndarray:
        """Spatial profile at time step k (float64)."""
        return self.values[:, k]

    def step_exact(self, k: int) -> list:
        if self.exact is None:
            raise ValueError(f"field in mode {self.mode!r} has no exact values")
        return [self.exact[i][k] for i in range(len(self.exact))]


def listing_a(g: GridSpec, p: PhysicsParams) -> float:
    """The binary64 coefficient exactly as the naive C program computes it."""
    a1 = g.dt / g.dx * p.c
    return a1 * a1


def exact_a(g: GridSpec, p: PhysicsParams):
    """(c*dt/dx)^2 over the rational values of the binary64 inputs."""
    return (rational(p.c) * rational(g.dt) / rational(g.dx)) ** 2


def apply_stiffness(q, c: float, g: GridSpec, exact: bool = False):
    """-c^2 (q_{i+1} - 2 q_i + q_{i-1})/dx^2 on interior i; 0 at boundaries."""
    _check_len(q, g, "q")
    if exact:
        c2 = rational(c) ** 2
        dx2 = rational(g.dx) ** 2
        zero = rational(0)
        out = [zero] * (g.i_max + 1)
        for i in range(1, g.i_max):
            d2 = rational(q[i + 1]) - 2 * rational(q[i]) + rational(q[i - 1])
            out[i] = -c2 * d2 / dx2
        return out
    qa = np.asarray(q, dtype=np.float64)
    out = np.zeros_like(qa)
    d2 = (qa[2:] - 2.0 * qa[1:-1]) + qa[:-2]
    out[1:-1] = -(c * c) * (d2 / (g.dx * g.dx))
    return out


def _as_float_array(seq, name):
    arr = np.asarray([float(v) for v in seq], dtype=np.float64)
    return arr


def _solve_working64(g: GridSpec, p: PhysicsParams, inputs: SchemeInputs,
                     engine: str) -> Field2D:
    if g.dt < MIN_DT:
        raise ValueError(f"dt={g.dt} below the binary64 guard {MIN_DT}")
    if p.c * g.dt / g.dx < MIN_COURANT:
        raise ValueError("c*dt/dx below the binary64 guard 2^-500")
    a = listing_a(g, p)
    work = np.zeros((g.k_max + 1, g.i_max + 1), dtype=np.float64)
    work[0, :] = _as_float_array(inputs.p0h, "p0h")
    p1 = None if inputs.p1h is None else _as_float_array(inputs.p1h, "p1h")
    s = None
    if inputs.sh is not None:
        s = np.ascontiguousarray(
            [[float(v) for v in row] for row in inputs.sh], dtype=np.float64)
    _engine(engine).solve_field(work, p1, s, a, g.dt)
    if not np.isfinite(work).all():
        raise FloatingPointError("non-finite intermediate in working64 solve")
    return Field2D(values=np.ascontiguousarray(work.T), mode="working64")


def _solve_exact_rows(num, g: GridSpec, p: PhysicsParams, inputs: SchemeInputs):
    """Shared exact/high-precision time loop; num converts to the domain."""
    n = g.i_max + 1
    zero = num(0)
    a = (num(p.c) * num(g.dt) / num(g.dx)) ** 2
    dt = num(g.dt)
    dt2 = dt * dt
    half_a = a / 2
    p0 = [num(v) for v in inputs.p0h]
    p1 = None if inputs.p1h is None else [num(v) for v in inputs.p1h]
    sh = None
    if inputs.sh is not None:
        sh = [[num(v) for v in row] for row in inputs.sh]
    rows = [p0]
    if g.k_max >= 1:
        prev = p0
        row = [zero] * n
        for i in range(1, n - 1):
            d2 = prev[i + 1] - 2 * prev[i] + prev[i - 1]
            row[i] = prev[i] + half_a * d2
            if p1 is not None:
                row[i] = row[i] + dt * p1[i]
        rows.append(row)
    for k in range(1, g.k_max):
        cur = rows[k]
        prev = rows[k - 1]
        row = [zero] * n
        for i in range(1, n - 1):
            d2 = cur[i + 1] - 2 * cur[i] + cur[i - 1]
            row[i] = 2 * cur[i] - prev[i] + a * d2
            if sh is not None:
                row[i] = row[i] + dt2 * sh[i][k]
        rows.append(row)
    return rows


def _rows_to_field(rows, mode: str) -> Field2D:
    n = len(rows[0])
    exact = tuple(tuple(rows[k][i] for k in range(len(rows)))
                  for i in range(n))
    values = np.array([[float(v) for v in col] for col in exact],
                      dtype=np.float64)
    return Field2D(values=values, mode=mode, exact=exact)


def solve_scheme(g: GridSpec, p: PhysicsParams, inputs: SchemeInputs,
                 mode: str = "working64", *, oracle: str = "auto",
                 precision: int = HP_PRECISION_BITS,
                 engine: str = "auto") -> Field2D:
    """Run the scheme.

    mode "working64" mirrors the naive C program; mode "oracle" re-executes
    it exactly.  oracle selects the exact backend: "rational" (zero-error),
    "hp" (precision-bit floats), or "auto" (rational up to
    ORACLE_RATIONAL_MAX_NODES nodes, then hp).
    """
    inputs.validate(g)
    if mode == "working64":
        return _solve_working64(g, p, inputs, engine)
    if mode != "oracle":
        raise ValueError(f"unknown mode {mode!r}")
    kind = oracle
    if kind == "auto":
        kind = "rational" if g.i_max * g.k_max <= ORACLE_RATIONAL_MAX_NODES \
            else "hp"
    if kind == "rational":
        rows = _solve_exact_rows(rational, g, p, inputs)
        return _rows_to_field(rows, "oracle-rational")
    if kind == "hp":
        with hp_context(precision) as num:
            rows = _solve_exact_rows(num, g, p, inputs)
            return _rows_to_field(rows, f"oracle-hp{precision}")
    raise ValueError(f"unknown oracle kind {oracle!r}")


def solve_final_row(g: GridSpec, p: PhysicsParams, inputs: SchemeInputs,
                    engine: str = "auto") -> np.ndarray:
    """Working64 profile at step k_max without storing the whole field.

    Streaming keeps two time levels, so figure-scale grids (10^5 x 10^5
    nodes) stay in memory budget.  Source terms are not supported here.
    """
    inputs.validate(g)
    if inputs.sh is not None:
        raise ValueError("solve_final_row supports zero-source inputs only")
    if g.dt < MIN_DT:
        raise ValueError(f"dt={g.dt} below the binary64 guard {MIN_DT}")
    if p.c * g.dt / g.dx < MIN_COURANT:
        raise ValueError("c*dt/dx below the binary64 guard 2^-500")
    a = listing_a(g, p)
    p0 = _as_float_array(inputs.p0h, "p0h")
    p1 = None if inputs.p1h is None else _as_float_array(inputs.p1h, "p1h")
    row = _engine(engine).solve_last(p0, p1, a, g.dt, g.k_max)
    if not np.isfinite(row).all():
        raise FloatingPointError("non-finite intermediate in working64 solve")
    return row


def solve_checkpoint_rows(g: GridSpec, p: PhysicsParams, inputs: SchemeInputs,
                          ks, engine: str = "auto") -> np.ndarray:
    """Working64 rows at the ascending step indices ks, streamed.

    Same two-level storage as solve_final_row (zero-source only); row j of
    the result is the profile at step ks[j].
    """
    inputs.validate(g)
    if inputs.sh is not None:
        raise ValueError("solve_checkpoint_rows supports zero-source inputs "
                         "only")
    if g.dt < MIN_DT:
        raise ValueError(f"dt={g.dt} below the binary64 guard {MIN_DT}")
    if p.c * g.dt / g.dx < MIN_COURANT:
        raise ValueError("c*dt/dx below the binary64 guard 2^-500")
    karr = np.asarray(ks, dtype=np.int64)
    if karr.ndim != 1 or karr.size == 0:
        raise ValueError("ks must be a nonempty 1D index list")
    if np.any(np.diff(karr) <= 0):
        raise ValueError("ks must be strictly increasing")
    if karr[0] < 0 or karr[-1] > g.k_max:
        raise ValueError(f"ks must lie within [0, {g.k_max}]")
    a = listing_a(g, p)
    p0 = _as_float_array(inputs.p0h, "p0h")
    p1 = None if inputs.p1h is None else _as_float_array(inputs.p1h, "p1h")
    rows = _engine(engine).solve_checkpoints(p0, p1, a, g.dt, g.k_max, karr)
    if not np.isfinite(rows).all():
        raise FloatingPointError("non-finite intermediate in working64 solve")
    return rows


def _combine(alpha, in1: SchemeInputs, in2: SchemeInputs,
             g: GridSpec) -> SchemeInputs:
    n = g.i_max + 1
    m = g.k_max + 1

    def vec(v1, v2):
        if v1 is None and v2 is None:
            return None
        a1 = v1 if v1 is not None else (0,) * n
        a2 = v2 if v2 is not None else (0,) * n
        return tuple(alpha * rational(x) + rational(y) for x, y in zip(a1, a2))

    def mat(m1, m2):
        if m1 is None and m2 is None:
            return None
        z = tuple((0,) * m for _ in range(n))
        a1 = m1 if m1 is not None else z
        a2 = m2 if m2 is not None else z
        return tuple(tuple(alpha * rational(x) + rational(y)
                           for x, y in zip(r1, r2))
                     for r1, r2 in zip(a1, a2))

    return SchemeInputs(p0h=vec(in1.p0h, in2.p0h),
                        p1h=vec(in1.p1h, in2.p1h),
                        sh=mat(in1.sh, in2.sh))


def linearity_probe(g: GridSpec, p: PhysicsParams, in1: SchemeInputs,
                    in2: SchemeInputs, alpha) -> bool:
    """Exact check that solve(alpha*in1 + in2) == alpha*solve(in1) + solve(in2).

    Defined for the rational oracle only; the comparison is entrywise with
    zero tolerance.
    """
    ralpha = rational(alpha)
    f_comb = solve_scheme(g, p, _combine(ralpha, in1, in2, g), "oracle",
                          oracle="rational")
    f1 = solve_scheme(g, p, in1, "oracle", oracle="rational")
    f2 = solve_scheme(g, p, in2, "oracle", oracle="rational")
    for i in range(g.i_max + 1):
        for k in range(g.k_max + 1):
            if f_comb.exact[i][k] != ralpha * f1.exact[i][k] + f2.exact[i][k]:
                return False
    return True
