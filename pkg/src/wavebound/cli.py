"""Command-line front end: solves, sweeps, round-off studies, bound data.

Subcommands: solve, converge, roundoff, bound, energy.  Configuration
comes from flags plus an optional JSON config file (flags win).  Every
command prints a JSON summary echoing the fully-resolved config; CSV
artifacts use 17 significant digits so binary64 values round-trip.

Exit codes: 0 success, 1 validation error, 2 property violation detected.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import bounds as bmod
from .analytic import bump_case, sample_exact, sample_inputs
from .energy import energy_bounds_check, energy_series
from .errors import convergence_error, order_fit
from .grid import GridSpec, PhysicsParams, cfl_check, cfl_dt, floor_ratio, \
    grid_for_steps, make_grid, norm_dx
from .roundoff import RECONSTRUCT_MAX_NODES, lambda_table, local_deltas, \
    reconstruct_global_roundoff, roundoff_bound
from .scheme import ORACLE_RATIONAL_MAX_NODES, SchemeInputs, exact_a, \
    listing_a, solve_scheme

DEFAULT_DX_SWEEP = (1 / 50, 1 / 100, 1 / 200, 1 / 400)

#: Skip the energy series when the field exceeds this many nodes (the
#: per-step quadratic forms are Python loops).
ENERGY_NODE_LIMIT = 2_000_000

_DEFAULTS = {
    "solve": {
        "case": "bump", "imax": 100, "xi": 0.1, "c": 1.0, "tmax": 1.0,
        "dt": None, "mode": "working64", "oracle": "auto", "precision": 256,
        "engine": "auto", "energy": True, "field_csv": None,
        "x_min": 0.0, "x_max": 1.0, "p0_table": None,
    },
    "converge": {
        "case": "bump", "xi": 0.1, "c": 1.0, "tmax": 1.0,
        "dx_list": list(DEFAULT_DX_SWEEP), "engine": "auto",
        "csv": None, "self_test": False,
    },
    "roundoff": {
        "case": "bump", "imax": 10, "kmax": None, "tmax": None, "dt": None,
        "xi": 0.1, "c": 1.0, "oracle": "auto", "precision": 256,
        "engine": "auto", "csv": None, "reconstruct": None, "force": False,
        "x_min": 0.0, "x_max": 1.0, "p0_table": None,
    },
    "bound": {
        "case": "bump", "xi": bmod.FIGURE_XI, "c": 1.0,
        "tmax": bmod.FIGURE_T_MAX,
        "dx_min": bmod.FIGURE_RANGE[0], "dx_max": bmod.FIGURE_RANGE[1],
        "dt_min": bmod.FIGURE_RANGE[0], "dt_max": bmod.FIGURE_RANGE[1],
        "points": bmod.FIGURE_POINTS, "line_points": None,
        "surface_csv": "bound_surface.csv", "line_csv": "bound_line.csv",
        "line": True, "engine": "auto",
    },
    "energy": {
        "case": "bump", "imax": 100, "kmax": None, "tmax": 1.0, "dt": None,
        "xi": 0.1, "c": 1.0, "mode": "working64", "oracle": "auto",
        "precision": 256, "engine": "auto", "csv": "energy_series.csv",
        "x_min": 0.0, "x_max": 1.0, "p0_table": None,
    },
}


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with status 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="wavebound",
                  description="1D wave-equation solver and error certifier")
    sub = top.add_subparsers(dest="command", required=True,
                             parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON config file (flags override)")
        sp.add_argument("--out", help="write the JSON summary here "
                                      "instead of stdout")

    sp = sub.add_parser("solve", help="run one discrete solve")
    common(sp)
    sp.add_argument("--case", choices=["bump", "zero", "table"])
    sp.add_argument("--imax", type=int)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--mode", choices=["working64", "oracle"])
    sp.add_argument("--oracle", choices=["auto", "rational", "hp"])
    sp.add_argument("--precision", type=int)
    sp.add_argument("--engine", choices=["auto", "compiled", "python"])
    sp.add_argument("--energy", action=argparse.BooleanOptionalAction)
    sp.add_argument("--field-csv", dest="field_csv")
    sp.add_argument("--p0-table", dest="p0_table",
                    help="JSON file with a list of p0 samples (case=table)")

    sp = sub.add_parser("converge", help="convergence sweep and order fit")
    common(sp)
    sp.add_argument("--dx", dest="dx_list", type=float, action="append",
                    help="target spacing; repeat for the sweep")
    sp.add_argument("--xi", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--engine", choices=["auto", "compiled", "python"])
    sp.add_argument("--csv")
    sp.add_argument("--self-test", dest="self_test",
                    action=argparse.BooleanOptionalAction,
                    help="fit manufactured dx^2 errors instead of solving")

    sp = sub.add_parser("roundoff", help="local/global round-off study")
    common(sp)
    sp.add_argument("--case", choices=["bump", "zero", "table"])
    sp.add_argument("--imax", type=int)
    sp.add_argument("--kmax", type=int)
    sp.add_argument("--tmax", type=float,
                    help="derive kmax from a time horizon instead")
    sp.add_argument("--xi", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--oracle", choices=["auto", "rational", "hp"])
    sp.add_argument("--precision", type=int)
    sp.add_argument("--engine", choices=["auto", "compiled", "python"])
    sp.add_argument("--csv")
    sp.add_argument("--reconstruct", action=argparse.BooleanOptionalAction,
                    help="force or skip the convolution reconstruction")
    sp.add_argument("--force", action=argparse.BooleanOptionalAction,
                    help="allow expensive oracle/reconstruction sizes")
    sp.add_argument("--p0-table", dest="p0_table")

    sp = sub.add_parser("bound", help="total-error bound surface and line")
    common(sp)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--dx-min", dest="dx_min", type=float)
    sp.add_argument("--dx-max", dest="dx_max", type=float)
    sp.add_argument("--dt-min", dest="dt_min", type=float)
    sp.add_argument("--dt-max", dest="dt_max", type=float)
    sp.add_argument("--points", type=int)
    sp.add_argument("--line-points", dest="line_points", type=int)
    sp.add_argument("--surface-csv", dest="surface_csv")
    sp.add_argument("--line-csv", dest="line_csv")
    sp.add_argument("--line", action=argparse.BooleanOptionalAction,
                    help="also measure the effective error along CFL")
    sp.add_argument("--engine", choices=["auto", "compiled", "python"])

    sp = sub.add_parser("energy", help="energy series and inequality checks")
    common(sp)
    sp.add_argument("--case", choices=["bump", "zero", "table"])
    sp.add_argument("--imax", type=int)
    sp.add_argument("--kmax", type=int)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--mode", choices=["working64", "oracle"])
    sp.add_argument("--oracle", choices=["auto", "rational", "hp"])
    sp.add_argument("--precision", type=int)
    sp.add_argument("--engine", choices=["auto", "compiled", "python"])
    sp.add_argument("--csv")
    sp.add_argument("--p0-table", dest="p0_table")

    return top


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults <- config file <- flags, echoed verbatim in the summary."""
    defaults = _DEFAULTS[args.command]
    cfg = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(defaults))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    for key in defaults:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else f"{float(v):.16e}"
    return str(v)


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt_cell(v) for v in row])


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    return v


def emit_summary(summary: dict, out: str | None) -> None:
    text = json.dumps(_jsonable(summary), indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _physics(cfg: dict) -> PhysicsParams:
    return PhysicsParams(c=float(cfg["c"]), xi=float(cfg["xi"]))


def _case_inputs(cfg: dict, g: GridSpec):
    kind = cfg["case"]
    if kind == "bump":
        return sample_inputs(bump_case(), g)
    if kind == "zero":
        return SchemeInputs.zero(g)
    if kind == "table":
        table = cfg.get("p0_table")
        if isinstance(table, str):
            with open(table) as fh:
                table = json.load(fh)
        if table is None:
            raise ValueError("case=table needs p0_table")
        return SchemeInputs.from_arrays([float(v) for v in table])
    raise ValueError(f"unknown case {kind!r}")


def _grid(cfg: dict) -> GridSpec:
    x_min, x_max = float(cfg["x_min"]), float(cfg["x_max"])
    if cfg["case"] == "bump":
        case = bump_case()
        x_min, x_max = case.x_min, case.x_max
    i_max = cfg["imax"]
    p = _physics(cfg)
    dx = (x_max - x_min) / i_max
    dt = cfg.get("dt")
    dt = cfl_dt(dx, p) if dt is None else float(dt)
    if cfg.get("kmax") is not None:
        return grid_for_steps(x_min, x_max, i_max, dt, int(cfg["kmax"]))
    return make_grid(x_min, x_max, i_max, float(cfg["tmax"]), dt)


def _energy_drift(f, p: PhysicsParams, g: GridSpec) -> dict:
    series = energy_series(f, p.c, g)
    e = series.values
    scale = max(abs(float(e[0])), 2.0 ** -1022)
    drift = float(np.abs(e - e[0]).max() / scale)
    return {"first": float(e[0]), "last": float(e[-1]),
            "max_rel_drift": drift}


def cmd_solve(cfg: dict) -> tuple[dict, int]:
    p = _physics(cfg)
    g = _grid(cfg)
    cfg["dt"] = g.dt  # resolved value echoed back
    inputs = _case_inputs(cfg, g)
    f = solve_scheme(g, p, inputs, cfg["mode"], oracle=cfg["oracle"],
                     precision=int(cfg["precision"]), engine=cfg["engine"])
    last = f.values[:, -1]
    results = {
        "cfl": cfl_check(g, p),
        "a": listing_a(g, p),
        "dx": g.dx, "dt": g.dt, "k_max": g.k_max, "i_max": g.i_max,
        "final_norm_dx": norm_dx(last, g),
        "final_max_abs": float(np.abs(last).max()),
    }
    n_nodes = (g.i_max + 1) * (g.k_max + 1)
    if cfg["energy"] and n_nodes <= ENERGY_NODE_LIMIT:
        results["energy"] = _energy_drift(f, p, g)
    if cfg["field_csv"]:
        rows = ((i, k, f.values[i, k])
                for i in range(g.i_max + 1) for k in range(g.k_max + 1))
        write_csv(cfg["field_csv"], ("i", "k", "value"), rows)
    return {"command": "solve", "config": cfg, "results": results}, 0


def cmd_converge(cfg: dict) -> tuple[dict, int]:
    p = _physics(cfg)
    case = bump_case()
    dxs = list(cfg["dx_list"])
    if len(dxs) < 3:
        raise ValueError(f"need at least 3 resolutions, got {len(dxs)}")
    span = case.x_max - case.x_min
    rows = []
    res, errs = [], []
    for dx_target in dxs:
        i_max = max(2, round(span / float(dx_target)))
        dt = cfl_dt(span / i_max, p)
        g = make_grid(case.x_min, case.x_max, i_max, float(cfg["tmax"]), dt)
        if cfg["self_test"]:
            err = g.dx * g.dx
        else:
            discrete = solve_scheme(g, p, sample_inputs(case, g),
                                    "working64", engine=cfg["engine"])
            err = convergence_error(sample_exact(case, g), discrete,
                                    g).max_norm
        rows.append((g.dx, g.dt, err))
        res.append((g.dx, g.dt))
        errs.append(err)
    order = order_fit(res, errs)
    if cfg["csv"]:
        write_csv(cfg["csv"], ("dx", "dt", "max_k_norm_e"), rows)
    results = {"order": order,
               "points": [{"dx": r[0], "dt": r[1], "max_k_norm_e": r[2]}
                          for r in rows]}
    return {"command": "converge", "config": cfg, "results": results}, 0


def cmd_roundoff(cfg: dict) -> tuple[dict, int]:
    p = _physics(cfg)
    if cfg["kmax"] is None:
        if cfg["tmax"] is not None:
            span = float(cfg["x_max"]) - float(cfg["x_min"])
            dt = cfg["dt"]
            dt = cfl_dt(span / cfg["imax"], p) if dt is None else float(dt)
            cfg["kmax"] = floor_ratio(float(cfg["tmax"]), dt)
        else:
            cfg["kmax"] = 20
    g = _grid(cfg)
    inputs = _case_inputs(cfg, g)
    nodes = g.i_max * g.k_max
    if (cfg["oracle"] == "rational" and nodes > ORACLE_RATIONAL_MAX_NODES
            and not cfg["force"]):
        raise ValueError(
            f"rational oracle on {nodes} nodes exceeds "
            f"{ORACLE_RATIONAL_MAX_NODES}; pass --force or --oracle hp")
    working = solve_scheme(g, p, inputs, "working64", engine=cfg["engine"])
    oracle = solve_scheme(g, p, inputs, "oracle", oracle=cfg["oracle"],
                          precision=int(cfg["precision"]))
    study = local_deltas(working, g, p, inputs, oracle=oracle)

    do_rec = cfg["reconstruct"]
    if do_rec is None:
        do_rec = nodes <= RECONSTRUCT_MAX_NODES
    rec_exact = None
    if do_rec:
        table = lambda_table(study.a_exact, g.k_max)
        reconstruct_global_roundoff(study, table, g, force=cfg["force"])
        rec_exact = study.reconstruction_exact

    bounds_k = [roundoff_bound(k) for k in range(g.k_max + 1)]
    global_ok = bool(all(study.max_abs_Delta_by_k[k] <= bounds_k[k]
                         for k in range(g.k_max + 1)))
    if cfg["csv"]:
        rows = ((k, study.max_abs_delta_by_k[k], study.max_abs_Delta_by_k[k],
                 bounds_k[k]) for k in range(g.k_max + 1))
        write_csv(cfg["csv"],
                  ("k", "max_abs_delta", "max_abs_Delta", "roundoff_bound"),
                  rows)
    results = {
        "a": study.a_float, "a_gap_ok": study.a_gap_ok,
        "max_abs_delta": study.max_abs_delta,
        "delta_bound": study.delta_bound,
        "delta_bound_ok": study.delta_bound_ok,
        "max_abs_Delta": float(study.max_abs_Delta_by_k.max()),
        "global_bound_ok": global_ok,
        "reconstruction_exact": rec_exact,
        "oracle_mode": oracle.mode,
    }
    violated = (rec_exact is False) or not global_ok \
        or not study.delta_bound_ok or not study.a_gap_ok
    return ({"command": "roundoff", "config": cfg, "results": results},
            2 if violated else 0)


def cmd_bound(cfg: dict) -> tuple[dict, int]:
    p = _physics(cfg)
    case = bump_case()
    if cfg["c"] != case.c:
        raise ValueError("bump case has a fixed propagation speed")
    consts = bmod.bound_constants(case, p.xi, float(cfg["tmax"]))
    dxs = bmod.log_spaced(cfg["dx_min"], cfg["dx_max"], int(cfg["points"]))
    dts = bmod.log_spaced(cfg["dt_min"], cfg["dt_max"], int(cfg["points"]))
    surface = bmod.bound_surface(consts, p, dxs, dts)
    write_csv(cfg["surface_csv"], ("dx", "dt", "bound", "cfl_ok", "valid"),
              ((q.dx, q.dt, q.bound, q.cfl_ok, q.valid) for q in surface))
    valid_bounds = [q.bound for q in surface if q.valid]
    minimum = bmod.cfl_line_minimum(consts, p)
    results: dict = {
        "constants": {
            "mu": consts.mu, "C_prime": consts.C_prime,
            "C_second": consts.C_second, "alpha_e": consts.alpha_e,
            "C_e": consts.C_e, "alpha_Delta": consts.alpha_Delta,
            "C_Delta": consts.C_Delta,
        },
        "surface": {
            "points": len(surface),
            "valid_points": len(valid_bounds),
            "min_valid_bound": min(valid_bounds) if valid_bounds else None,
        },
        "cfl_line_minimum": {
            "dx_star": minimum.dx_star, "dt_star": minimum.dt_star,
            "value": minimum.value,
        },
    }
    status = 0
    if cfg["line"]:
        n_line = cfg["line_points"] or int(cfg["points"])
        line_dxs = bmod.log_spaced(cfg["dx_min"], cfg["dx_max"], int(n_line))
        line = bmod.right_panel(case, consts, p, line_dxs,
                                engine=cfg["engine"])
        write_csv(cfg["line_csv"], ("dx", "bound", "effective_error"),
                  ((q.dx, q.bound, q.effective_error) for q in line))
        below = all(q.effective_error < q.bound for q in line if q.valid)
        line_summary = {
            "points": len(line),
            "effective_below_bound": below,
        }
        try:
            sb, se = bmod.line_slopes(line)
            line_summary["slopes"] = {"bound": sb, "effective": se}
        except ValueError as exc:
            line_summary["slopes"] = None
            line_summary["slopes_note"] = str(exc)
        results["line"] = line_summary
        if not below:
            status = 2
    return {"command": "bound", "config": cfg, "results": results}, status


def cmd_energy(cfg: dict) -> tuple[dict, int]:
    p = _physics(cfg)
    g = _grid(cfg)
    inputs = _case_inputs(cfg, g)
    f = solve_scheme(g, p, inputs, cfg["mode"], oracle=cfg["oracle"],
                     precision=int(cfg["precision"]), engine=cfg["engine"])
    report = energy_bounds_check(f, inputs, p, g)
    if cfg["csv"]:
        write_csv(cfg["csv"], ("k", "energy"),
                  enumerate(report.series.values))
    results = {
        "exact_checks": report.exact_checks,
        "nonneg_ok": bool(report.nonneg_ok.all()),
        "under_ok": bool(report.under_ok.all()),
        "over_ok": bool(report.over_ok.all()),
        "all_ok": report.all_ok,
        "failures": list(report.failures[:20]),
    }
    results.update({"energy": _energy_drift(f, p, g)})
    return ({"command": "energy", "config": cfg, "results": results},
            0 if report.all_ok else 2)


_HANDLERS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "roundoff": cmd_roundoff,
    "bound": cmd_bound,
    "energy": cmd_energy,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        summary, status = _HANDLERS[args.command](cfg)
    except (ValueError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit_summary(summary, getattr(args, "out", None))
    return status


if __name__ == "__main__":
    sys.exit(main())
