"""Round-off error accounting: local deltas, kernel table, reconstruction.

delta_i^k is the signed error of ONE binary64 update relative to exact
arithmetic applied to the same binary64 inputs (with the exact coefficient
a).  The kernel lambda is the scheme's response to a unit impulse; the
global error Delta = working - oracle equals the space-time convolution of
lambda with the antisymmetrically extended deltas, and that identity is
checkable here with zero tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._exact import HP_EQUAL_TOL, hp_to_rational, rational
from .grid import GridSpec, PhysicsParams
from .scheme import Field2D, SchemeInputs, exact_a, listing_a

#: Bound on one local update error under the scheme preconditions
#: (|a_float - a| <= 2^-49, values in [-2, 2]).
DELTA_BOUND = 78.0 * 2.0 ** -52

#: Required closeness of the binary64 coefficient to the exact one.
A_GAP_BOUND = Fraction(1, 2 ** 49)

#: Reconstruction cost is O(i_max * k_max^3); refuse above this many nodes
#: unless explicitly forced.
RECONSTRUCT_MAX_NODES = 2_000


def roundoff_bound(k: int) -> float:
    """Global per-entry bound 78 * 2^-53 * (k+1) * (k+2)."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return 78.0 * 2.0 ** -53 * (k + 1) * (k + 2)


class KernelTable:
    """Triangular kernel lambda_i^k for 0 <= k <= K, |i| <= k.

    Exact mode stores integer-scaled rows: with a = p/q exact, lambda_i^k
    = L_i^k / q^k and the recurrence stays in integers, which keeps K=200
    tables cheap.  entry()/row() expose exact rationals.
    """

    def __init__(self, a, K: int, mode: str = "exact"):
        if K < 0:
            raise ValueError(f"K must be nonnegative, got {K}")
        if mode not in ("exact", "float64"):
            raise ValueError(f"unknown kernel mode {mode!r}")
        a_exact = rational(a)
        if not 0 < a_exact <= 1:
            raise ValueError(f"a must lie in (0, 1], got {a}")
        self.a = a_exact
        self.K = K
        self.mode = mode
        if mode == "exact":
            p = int(a_exact.numerator)
            q = int(a_exact.denominator)
            self._q = q
            self._int_rows = self._build_int_rows(p, q, K)
            self._row_cache: dict[int, list] = {}
        else:
            self._float_rows = self._build_float_rows(float(a_exact), K)

    @staticmethod
    def _build_int_rows(p: int, q: int, K: int) -> list[list[int]]:
        rows = [[1]]
        if K >= 1:
            rows.append([p, 2 * (q - p), p])
        q2 = q * q
        for k in range(2, K + 1):
            prev = rows[k - 1]   # indices -(k-1)..k-1
            back = rows[k - 2]   # indices -(k-2)..k-2

            def at(row, base_k, i):
                return row[i + base_k] if -base_k <= i <= base_k else 0

            row = [0] * (2 * k + 1)
            for i in range(-k, k + 1):
                row[i + k] = (p * (at(prev, k - 1, i - 1)
                                   + at(prev, k - 1, i + 1))
                              + 2 * (q - p) * at(prev, k - 1, i)
                              - q2 * at(back, k - 2, i))
            rows.append(row)
        return rows

    @staticmethod
    def _build_float_rows(a: float, K: int) -> list[list[float]]:
        rows = [[1.0]]
        if K >= 1:
            rows.append([a, 2.0 * (1.0 - a), a])
        for k in range(2, K + 1):
            prev = rows[k - 1]
            back = rows[k - 2]

            def at(row, base_k, i):
                return row[i + base_k] if -base_k <= i <= base_k else 0.0

            row = [0.0] * (2 * k + 1)
            for i in range(-k, k + 1):
                row[i + k] = (a * (at(prev, k - 1, i - 1)
                                   + at(prev, k - 1, i + 1))
                              + 2.0 * (1.0 - a) * at(prev, k - 1, i)
                              - at(back, k - 2, i))
            rows.append(row)
        return rows

    def row(self, k: int) -> list:
        """Entries lambda_i^k for i = -k..k."""
        if not 0 <= k <= self.K:
            raise IndexError(f"k={k} outside 0..{self.K}")
        if self.mode == "float64":
            return list(self._float_rows[k])
        cached = self._row_cache.get(k)
        if cached is None:
            qk = self._q ** k
            cached = [rational(Fraction(l, qk)) for l in self._int_rows[k]]
            self._row_cache[k] = cached
        return list(cached)

    def entry(self, k: int, i: int):
        if not 0 <= k <= self.K:
            raise IndexError(f"k={k} outside 0..{self.K}")
        if abs(i) > k:
            return 0.0 if self.mode == "float64" else rational(0)
        if self.mode == "float64":
            return self._float_rows[k][i + k]
        return self.row(k)[i + k]

    def row_sum(self, k: int):
        if self.mode == "float64":
            return math.fsum(self._float_rows[k])
        return rational(Fraction(sum(self._int_rows[k]), self._q ** k))


def lambda_table(a, K: int, mode: str = "exact") -> KernelTable:
    """Kernel table for coefficient a (rows 0..K)."""
    return KernelTable(a, K, mode)


@dataclass(frozen=True)
class KernelReport:
    """Outcome of the row-sum and nonnegativity checks."""

    a: object
    K: int
    row_sums_ok: bool
    nonneg_ok: bool
    violations: tuple = ()


def lambda_checks(t: KernelTable) -> KernelReport:
    """Verify sum_i lambda_i^k = k+1 (exact) and lambda_i^k >= 0, all k <= K.

    Exact mode works on the integer-scaled rows: sum L_i^k == (k+1) q^k
    and L_i^k >= 0 are equivalent and cost only big-integer work.
    """
    violations = []
    if t.mode == "exact":
        qk = 1
        for k in range(t.K + 1):
            row = t._int_rows[k]
            if sum(row) != (k + 1) * qk:
                violations.append((k, "row_sum"))
            if any(l < 0 for l in row):
                violations.append((k, "negative_entry"))
            qk *= t._q
    else:
        for k in range(t.K + 1):
            row = t._float_rows[k]
            if not math.isclose(math.fsum(row), k + 1.0,
                                rel_tol=1e-9, abs_tol=1e-12):
                violations.append((k, "row_sum"))
            if any(l < -1e-12 * (k + 1) for l in row):
                violations.append((k, "negative_entry"))
    row_sums_ok = all(v[1] != "row_sum" for v in violations)
    nonneg_ok = all(v[1] != "negative_entry" for v in violations)
    return KernelReport(a=t.a, K=t.K, row_sums_ok=row_sums_ok,
                        nonneg_ok=nonneg_ok, violations=tuple(violations))


@dataclass(eq=False)
class RoundoffStudy:
    """Local errors delta, global errors Delta, and their bound checks."""

    grid: GridSpec
    a_float: float
    a_exact: object
    a_gap: object
    a_gap_ok: bool
    delta_exact: list          # [k][i] exact rationals
    delta: np.ndarray          # float64 view, indexed [i][k]
    delta_bound: float = DELTA_BOUND
    max_abs_delta: float = 0.0
    Delta_exact: list | None = None   # [k][i] exact rationals (or None)
    Delta: np.ndarray | None = None   # float64 view, indexed [i][k]
    max_abs_delta_by_k: np.ndarray | None = None
    max_abs_Delta_by_k: np.ndarray | None = None
    reconstruction: np.ndarray | None = None
    reconstruction_exact: bool | None = None

    @property
    def delta_bound_ok(self) -> bool:
        return self.max_abs_delta <= self.delta_bound

    def global_bound_ok(self) -> bool:
        """max_i |Delta_i^k| <= roundoff_bound(k) at every k."""
        if self.max_abs_Delta_by_k is None:
            raise ValueError("no global errors attached")
        return all(self.max_abs_Delta_by_k[k] <= roundoff_bound(k)
                   for k in range(self.grid.k_max + 1))


def local_deltas(working: Field2D, g: GridSpec, p: PhysicsParams,
                 inputs: SchemeInputs, oracle: Field2D | None = None
                 ) -> RoundoffStudy:
    """Measure delta for every node; attach Delta if an oracle is given.

    Row 0 is zero by construction: the oracle consumes the very same
    binary64 samples the working solve consumed, so there is no sampling
    gap to measure (and the convolution identity needs delta^0 = 0).  Row 1
    measures the initialization update, later rows the evolution update,
    always exact-arithmetic-on-floating-inputs with the exact coefficient.
    """
    if working.mode != "working64":
        raise ValueError("local_deltas expects a working64 field")
    n = g.i_max + 1
    a_x = exact_a(g, p)
    a_f = listing_a(g, p)
    gap = abs(rational(a_f) - a_x)
    zero = rational(0)
    rdt = rational(g.dt)
    rdt2 = rdt * rdt
    half_a = a_x / 2
    w = working.values

    r = [[rational(float(w[i, k])) for i in range(n)]
         for k in range(g.k_max + 1)]
    rp1 = None if inputs.p1h is None else [rational(v) for v in inputs.p1h]
    rs = None if inputs.sh is None else [[rational(v) for v in row]
                                         for row in inputs.sh]

    delta_rows = [[zero] * n]
    if g.k_max >= 1:
        row = [zero] * n
        prev = r[0]
        for i in range(1, n - 1):
            d2 = prev[i + 1] - 2 * prev[i] + prev[i - 1]
            ref = prev[i] + half_a * d2
            if rp1 is not None:
                ref = ref + rdt * rp1[i]
            row[i] = r[1][i] - ref
        delta_rows.append(row)
    for k in range(2, g.k_max + 1):
        row = [zero] * n
        cur = r[k - 1]
        prev = r[k - 2]
        for i in range(1, n - 1):
            d2 = cur[i + 1] - 2 * cur[i] + cur[i - 1]
            ref = 2 * cur[i] - prev[i] + a_x * d2
            if rs is not None:
                ref = ref + rdt2 * rs[i][k - 1]
            row[i] = r[k][i] - ref
        delta_rows.append(row)

    delta = np.array([[float(delta_rows[k][i]) for k in range(g.k_max + 1)]
                      for i in range(n)])
    by_k = np.abs(delta).max(axis=0)
    study = RoundoffStudy(
        grid=g, a_float=a_f, a_exact=a_x, a_gap=gap,
        a_gap_ok=gap <= rational(A_GAP_BOUND),
        delta_exact=delta_rows, delta=delta,
        max_abs_delta=float(np.abs(delta).max()),
        max_abs_delta_by_k=by_k,
    )
    if oracle is not None:
        attach_global(study, working, oracle)
    return study


def attach_global(study: RoundoffStudy, working: Field2D,
                  oracle: Field2D) -> None:
    """Delta = working - oracle, exactly (rational view of both fields)."""
    if oracle.exact is None:
        raise ValueError("oracle field carries no exact values")
    g = study.grid
    n = g.i_max + 1
    rows = []
    for k in range(g.k_max + 1):
        row = []
        for i in range(n):
            ov = oracle.exact[i][k]
            if not _is_rat(ov):
                ov = hp_to_rational(ov)
            row.append(rational(float(working.values[i, k])) - ov)
        rows.append(row)
    study.Delta_exact = rows
    study.Delta = np.array([[float(rows[k][i]) for k in range(g.k_max + 1)]
                            for i in range(n)])
    study.max_abs_Delta_by_k = np.abs(study.Delta).max(axis=0)


def _is_rat(x) -> bool:
    from ._exact import is_rational
    return is_rational(x)


def _extended_delta(delta_row, i: int, i_max: int):
    """Odd extension about i = 0 and i = i_max, period 2*i_max."""
    m = i % (2 * i_max)
    if m <= i_max:
        return delta_row[m]
    return -delta_row[2 * i_max - m]


def reconstruct_global_roundoff(study: RoundoffStudy, t: KernelTable,
                                g: GridSpec, force: bool = False
                                ) -> np.ndarray:
    """Convolve the kernel with the extended deltas; compare against Delta.

    The identity Delta_i^k = sum_{l<=k} sum_{|j|<=l} lambda_j^l
    delta~_{i+j}^{k-l} is exact, so the comparison (when Delta is attached
    in rational mode) uses zero tolerance; against a high-precision oracle
    the tolerance is 2^-200.  Cost grows like i_max * k_max^3.
    """
    if t.mode != "exact":
        raise ValueError("reconstruction needs an exact kernel table")
    if t.a != study.a_exact:
        raise ValueError("kernel table was built for a different coefficient")
    if g.k_max > t.K:
        raise ValueError(f"kernel table too short: K={t.K} < k_max={g.k_max}")
    if g.i_max * g.k_max > RECONSTRUCT_MAX_NODES and not force:
        raise ValueError(
            f"grid has {g.i_max * g.k_max} nodes; reconstruction above "
            f"{RECONSTRUCT_MAX_NODES} must be forced explicitly")
    n = g.i_max + 1
    zero = rational(0)
    rec_rows = []
    for k in range(g.k_max + 1):
        row = [zero] * n
        for i in range(1, n - 1):
            acc = zero
            for l in range(0, k + 1):
                lam = t.row(l)
                drow = study.delta_exact[k - l]
                for j in range(-l, l + 1):
                    lj = lam[j + l]
                    if lj:
                        acc += lj * _extended_delta(drow, i + j, g.i_max)
            row[i] = acc
        rec_rows.append(row)

    rec = np.array([[float(rec_rows[k][i]) for k in range(g.k_max + 1)]
                    for i in range(n)])
    study.reconstruction = rec
    if study.Delta_exact is not None:
        exact_match = all(
            rec_rows[k][i] == study.Delta_exact[k][i]
            for k in range(g.k_max + 1) for i in range(n))
        if exact_match:
            study.reconstruction_exact = True
        else:
            # High-precision oracles leave residues below 2^-200; anything
            # larger is a genuine mismatch.
            tol = rational(HP_EQUAL_TOL)
            study.reconstruction_exact = all(
                abs(rec_rows[k][i] - study.Delta_exact[k][i]) <= tol
                for k in range(g.k_max + 1) for i in range(n))
    return rec
