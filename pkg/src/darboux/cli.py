"""Command-line front end: config-driven experiments with byte-stable output.

Every command reads a JSON config with at least {"surface": {...}} plus a
section named after the command, writes CSV/JSON files into --out, and stamps
each JSON payload with the tool version, a config hash, the seed and the
tolerances, so identical config + seed reproduce identical bytes.

Exit codes: 0 success, 1 config error, 2 a trajectory terminated on a
singular locus (partial results are still written and flagged).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import catalog_names, load_surface
from .chart import ChartError
from .flow import (DarbouxState, IntegratorParams, falpha_leaf, integrate,
                   integrate_geodesic, plane_field_integrability, trace_batch,
                   darboux_residual, osculating_contact_residual)
from .integrals import monitor_map, standard_integrals, conservation_report
from .lorentz import canonical_section_analysis, export_section_csv
from .quadric_dynamics import (circular_sections_check, falpha_rotation, level_state,
                               poincare_map, regime_classify, ruled_line_check,
                               sigma_lengths)
from .quadrics import QuadricChart
from .ridges import ridge_locus
from .serialize import config_hash, write_csv, write_json

SINGULAR_TERMINATIONS = ("umbilic", "singular_step")


class ConfigError(ValueError):
    pass


def _meta(config: dict, args, extra: dict | None = None) -> dict:
    md = {
        "tool": "darboux",
        "version": __version__,
        "config_hash": config_hash(config),
        "seed": args.seed,
        "rel_tol": args.rel_tol,
        "abs_tol": args.abs_tol,
    }
    if extra:
        md.update(extra)
    return md


def _surface(config: dict):
    if "surface" not in config:
        raise ConfigError("config missing required field 'surface'")
    try:
        return load_surface(config["surface"])
    except ChartError as exc:
        raise ConfigError(str(exc)) from None


def _dynamics_chart(surface):
    return surface.angle_chart if isinstance(surface, QuadricChart) else surface


def _params(config_section: dict, args, default_arc: float = 10.0) -> IntegratorParams:
    return IntegratorParams(
        rel_tol=args.rel_tol if args.rel_tol is not None else 1e-10,
        abs_tol=args.abs_tol if args.abs_tol is not None else 1e-12,
        max_arc_length=float(config_section.get("arc_length", default_arc)),
        umbilic_tol=float(config_section.get("umbilic_standoff", 1e-9)),
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_trace(config: dict, out: Path, args) -> int:
    surface = _dynamics_chart(_surface(config))
    section = config.get("trace", {})
    params = _params(section, args)
    rng = np.random.default_rng(args.seed)
    starts = []
    if "starts" in section:
        for row in section["starts"]:
            starts.append(DarbouxState(float(row[0]), float(row[1]), float(row[2])))
    else:
        n = int(section.get("random", 3))
        w = surface.scan_window()
        for _ in range(n):
            starts.append(DarbouxState(
                rng.uniform(w.u_min + 0.1, w.u_max - 0.1),
                rng.uniform(w.v_min + 0.1, w.v_max - 0.1),
                rng.uniform(0.2, 1.3)))
    integrals = standard_integrals(surface)
    trajs = trace_batch(surface, starts, params, monitor_map(integrals), jobs=args.jobs)
    code = 0
    for i, traj in enumerate(trajs):
        stem = out / f"trace_{i:03d}"
        traj.write_csv(stem.with_suffix(".csv"))
        report = conservation_report(traj, integrals)
        md = _meta(config, args, traj.metadata())
        md["conservation"] = {k: v["max_rel_drift"] for k, v in report.items()}
        write_json(stem.with_suffix(".json"), md)
        if report:
            write_json(out / f"trace_{i:03d}_conservation.json", report)
        if traj.termination in SINGULAR_TERMINATIONS:
            code = 2
    return code


def cmd_ridges(config: dict, out: Path, args) -> int:
    surface = _dynamics_chart(_surface(config))
    section = config.get("ridges", {})
    resolution = int(section.get("resolution", 8))
    records = []
    statuses = {}
    for fol in ("P1", "P2"):
        scan = ridge_locus(surface, fol, resolution=resolution)
        statuses[fol] = scan.status
        records.extend(scan.records)
    write_json(out / "ridges.json", {
        **_meta(config, args),
        "surface": surface.name,
        "scan_status": statuses,
        "records": [r.to_dict() for r in records],
    })
    write_csv(out / "ridges.csv", {
        "u": [r.u for r in records],
        "v": [r.v for r in records],
        "sigma": [r.sigma for r in records],
        "kind_zigzag1_beak2_degen0": [
            {"zigzag": 1, "beak_to_beak": 2, "degenerate": 0}[r.kind] for r in records],
        "eigenvalue_squared": [r.sigma / 3.0 for r in records],
    })
    return 0


def cmd_rotation(config: dict, out: Path, args) -> int:
    surface = _surface(config)
    section = config.get("rotation", {})
    mode = section.get("mode", "falpha")
    if mode == "falpha":
        alphas = [float(a) for a in section.get(
            "alphas", [0.3, 0.5, math.pi / 4, 1.0, 1.2])]
        rows = [falpha_rotation(surface, a) for a in alphas]
        write_json(out / "rotation_falpha.json", {
            **_meta(config, args),
            "rows": [{"alpha": r.alpha, "s1": r.meta["s1"], "s2": r.meta["s2"],
                      "rho": r.rho, "rho_tan_alpha": r.meta["rho_tan_alpha"]}
                     for r in rows],
        })
        write_csv(out / "rotation_falpha.csv", {
            "alpha": [r.alpha for r in rows],
            "s1": [r.meta["s1"] for r in rows],
            "s2": [r.meta["s2"] for r in rows],
            "rho": [r.rho for r in rows],
            "rho_tan_alpha": [r.meta["rho_tan_alpha"] for r in rows],
        })
        return 0
    if mode != "level":
        raise ConfigError(f"rotation.mode must be 'falpha' or 'level', got {mode!r}")
    chart = _dynamics_chart(surface)
    lambdas = [float(x) for x in section.get("lambdas", [])]
    if not lambdas:
        raise ConfigError("rotation.lambdas required for level mode")
    iterates = int(section.get("iterates", 30))
    rows = []
    for lam in lambdas:
        res = poincare_map(chart, lam, n_iterates=iterates)
        rows.append({"lam": lam, "L1": res["L1"], "L2": res["L2"],
                     "rho_quadrature": res["rho_quadrature"],
                     "rho_empirical": res["rho_empirical"],
                     "periodic_after": res["periodic_after"]})
        write_csv(out / f"crossings_lam_{lam:g}.csv", {
            "iterate": [c["iterate"] for c in res["crossings"]],
            "section_coordinate": [c["v"] for c in res["crossings"]],
            "time": [c["t"] for c in res["crossings"]],
        })
    write_json(out / "rotation_level.json", {**_meta(config, args), "rows": rows})
    return 0


_REGIME_LAMBDAS = {
    "ellipsoid": lambda s: [0.5 * (s.c + s.b), s.b, 0.5 * (s.b + s.a)],
    "one_sheet": lambda s: [s.c - 0.5 * (s.b - s.c), s.c,
                            0.5 * (s.b + s.a), s.a, s.a + 1.0],
    "two_sheet": lambda s: [s.c - 1.0, s.c, 0.5 * (s.c + s.b)],
}


def cmd_regimes(config: dict, out: Path, args) -> int:
    surface = _surface(config)
    if not isinstance(surface, QuadricChart):
        raise ConfigError("regimes requires a quadric surface")
    chart = surface.angle_chart
    spec = surface.spec
    section = config.get("regimes", {})
    lambdas = [float(x) for x in section.get("lambdas", _REGIME_LAMBDAS[spec.kind](spec))]
    n_traj = int(section.get("trajectories_per_case", 2))
    arc = float(section.get("arc_length", 8.0))
    report = []
    code = 0
    for lam in lambdas:
        reg = regime_classify(surface, lam)
        entry = {"lam": lam, "case": reg.case, "label": reg.label,
                 "bounded": reg.bounded, "u_band": reg.u_band, "v_band": reg.v_band}
        if reg.case in ("boundary",) and spec.kind == "one_sheet":
            entry["ruled_line_check"] = ruled_line_check(surface, lam)
        if reg.case == "circular" and spec.kind == "ellipsoid":
            reps = circular_sections_check(chart, n_curves=n_traj)
            entry["circular_sections"] = reps
        if reg.u_band is not None and reg.case not in ("circular", "boundary"):
            rd = sigma_lengths(surface, lam)
            entry["sigma_lengths"] = {"L1": rd.L1, "L2": rd.L2, "rho": rd.rho,
                                      **rd.meta}
            params = IntegratorParams(max_arc_length=arc,
                                      rel_tol=args.rel_tol or 1e-10,
                                      abs_tol=args.abs_tol or 1e-12)
            for j in range(n_traj):
                try:
                    st = level_state(chart, lam, frac_u=0.3 + 0.4 * j / max(n_traj - 1, 1))
                except ValueError:
                    continue
                traj = integrate(chart, st, params)
                traj.write_csv(out / f"regime_{spec.kind}_lam{lam:g}_{j}.csv")
                if traj.termination in SINGULAR_TERMINATIONS:
                    code = 2
        report.append(entry)
    write_json(out / "regimes.json", {**_meta(config, args),
                                      "surface": surface.name, "cases": report})
    return code


def cmd_cansec(config: dict, out: Path, args) -> int:
    surface = _dynamics_chart(_surface(config))
    section = config.get("cansec", {})
    params = _params(section, args)
    if "start" in section:
        row = section["start"]
        st = DarbouxState(float(row[0]), float(row[1]), float(row[2]))
    else:
        w = surface.scan_window()
        st = DarbouxState(0.5 * (w.u_min + w.u_max) + 0.13,
                          0.5 * (w.v_min + w.v_max) + 0.21, 0.6)
    traj = integrate(surface, st, params)
    export_section_csv(surface, traj, out / "cansec_curve.csv")
    res = canonical_section_analysis(surface, traj)
    control = falpha_leaf(surface, (st.u, st.v), float(section.get("control_alpha", math.pi / 4)),
                          params=params)
    res_ctrl = canonical_section_analysis(surface, control)
    write_json(out / "cansec.json", {
        **_meta(config, args),
        "surface": surface.name,
        "darboux": {
            "rotation_speed_residual": res["rotation_speed_residual"],
            "tangential_component": res["tangential_component"],
            "segments": res["segments"],
            "chart_oracle": darboux_residual(surface, traj),
            "ambient_oracle": osculating_contact_residual(surface, traj),
            "termination": traj.termination,
        },
        "constant_angle_control": {
            "rotation_speed_residual": res_ctrl["rotation_speed_residual"],
            "tangential_component": res_ctrl["tangential_component"],
        },
    })
    return 2 if traj.termination in SINGULAR_TERMINATIONS else 0


def cmd_integrability(config: dict, out: Path, args) -> int:
    surface = _dynamics_chart(_surface(config))
    section = config.get("integrability", {})
    n = int(section.get("grid", 6))
    sep_floor = float(section.get("umbilic_standoff", 0.05))
    w = surface.scan_window()
    rows = []
    worst = 0.0
    for uu in np.linspace(w.u_min, w.u_max, n + 2)[1:-1]:
        for vv in np.linspace(w.v_min, w.v_max, n + 2)[1:-1]:
            try:
                # conformal curvatures diverge like 1/(k1-k2)^2 toward
                # umbilics; keep the report on the umbilic-free part
                if surface.curvature_separation(float(uu), float(vv)) < sep_floor:
                    continue
                r1, r2 = plane_field_integrability(surface, float(uu), float(vv))
            except ChartError:
                continue
            rows.append({"u": float(uu), "v": float(vv), "res1": r1, "res2": r2})
            worst = max(worst, abs(r1), abs(r2))
    write_json(out / "integrability.json", {
        **_meta(config, args), "surface": surface.name,
        "max_abs_residual": worst, "samples": rows,
    })
    return 0


def cmd_catalog(config: dict, out: Path, args) -> int:
    for name, desc in sorted(catalog_names().items()):
        print(f"{name:22s} {desc}")
    return 0


COMMANDS = {
    "trace": cmd_trace,
    "ridges": cmd_ridges,
    "rotation": cmd_rotation,
    "regimes": cmd_regimes,
    "cansec": cmd_cansec,
    "integrability": cmd_integrability,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="darboux",
        description="Trace and analyze Darboux curves on principal-chart surfaces.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, default=None,
                    help="JSON config file (required for all commands except catalog)")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--jobs", type=int, default=1, help="worker pool width for batch sweeps")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    ap.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    ap.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.rel_tol is None:
        args.rel_tol = 1e-10
    if args.abs_tol is None:
        args.abs_tol = 1e-12
    config: dict = {}
    if args.command != "catalog":
        if args.config is None:
            print("error: --config is required for this command", file=sys.stderr)
            return 1
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](config, args.out, args)
    except (ConfigError, ChartError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
