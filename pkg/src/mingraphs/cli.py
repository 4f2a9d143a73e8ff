"""Command-line front end.

Commands:
    levelcurves   sample level curves, write CSV/JSON (and SVG) per level
    verify        run one named check or all of them, write JSON reports
    sweep-gamma   run the catalog-family sweep, write a CSV summary table
    reconstruct   invert the map on a grid window, write the field

Exit status is 0 iff every requested check passed; evaluation errors remove
partial outputs and exit nonzero.  Identical configs produce byte-identical
artifacts (17-significant-digit floats, fixed field order, no timestamps).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import graphfield
from .config import RunConfig, build_pair, load_config
from .errors import (
    ConvergenceError,
    DomainError,
    EmptyInteriorError,
    ParameterError,
    QuadratureError,
    SingularityError,
)
from .levels import LevelCurveSpec, boundary_trace, sample_level_curve, samples_to_csv, samples_to_json
from .serialize import atomic_write, fmt_float
from .svgplot import level_curves_svg
from .verify import (
    BoundaryArgumentData,
    SampleGrid,
    VerificationReport,
    disk_transfer_check,
    estimate_asymptotic_angles,
    verify_lemma2,
    verify_poisson,
    verify_scaling,
    verify_thm1,
    verify_thm2,
)

_ERRORS = (
    ParameterError, DomainError, SingularityError, QuadratureError,
    ConvergenceError, EmptyInteriorError, ValueError,
)

VERIFY_CHECKS = (
    "thm1", "thm2", "lemma2", "poisson", "scaling", "disk", "superharmonic", "msr",
)


def _parse_tols(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ParameterError(f"--tol expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = float(value)
    return out


def _config_from_args(args) -> RunConfig:
    config = load_config(args.config)
    updates: dict = {}
    if getattr(args, "gamma", None) is not None:
        updates["pair_spec"] = {"kind": "lw", "gamma": str(args.gamma)}
    if getattr(args, "levels", None):
        updates["levels"] = tuple(float(v) for v in args.levels.split(","))
    if getattr(args, "tau", None):
        lo, hi, n = args.tau.split(",")
        updates["tau_min"], updates["tau_max"], updates["tau_n"] = float(lo), float(hi), int(n)
    if getattr(args, "grid", None):
        x0, x1, y0, y1, h = (float(v) for v in args.grid.split(","))
        updates["grid_window"] = (x0, x1, y0, y1)
        updates["grid_spacing"] = h
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if getattr(args, "format", None):
        updates["formats"] = tuple(p.strip() for p in args.format.split(",") if p.strip())
    tols = _parse_tols(getattr(args, "tol", None))
    if tols:
        merged = dict(config.tolerances)
        merged.update(tols)
        updates["tolerances"] = merged
    if getattr(args, "gammas", None):
        updates["sweep_gammas"] = tuple(float(v) for v in args.gammas.split(","))
    if updates:
        from dataclasses import replace
        config = replace(config, **updates)
    return config


def _verify_grid(config: RunConfig) -> SampleGrid:
    return SampleGrid.rectangular(
        config.sigma_min, config.sigma_max, config.n_sigma,
        config.vtau_abs, config.vn_tau,
    )


def _level_name(c: float) -> str:
    return f"{c:g}".replace("-", "m").replace(".", "p")


def cmd_levelcurves(config: RunConfig, args) -> int:
    pair = build_pair(config.pair_spec)
    out_dir = Path(config.out_dir)
    written: list[Path] = []
    try:
        curves = []
        boundary_samples = None
        for c in config.levels:
            spec = LevelCurveSpec(
                c=c, tau_min=config.tau_min, tau_max=config.tau_max,
                n_samples=config.tau_n, fd_step=config.fd_step,
            )
            if c == 0.0:
                samples = boundary_trace(pair, spec).samples
                boundary_samples = samples
            else:
                samples = sample_level_curve(pair, spec)
                curves.append((c, samples))
            stem = out_dir / f"level_{_level_name(c)}"
            if "csv" in config.formats:
                written.append(atomic_write(stem.with_suffix(".csv"), samples_to_csv(samples)))
            if "json" in config.formats:
                written.append(atomic_write(stem.with_suffix(".json"), samples_to_json(samples)))
        if "svg" in config.formats:
            if boundary_samples is None:
                spec0 = LevelCurveSpec(
                    c=0.0, tau_min=config.tau_min, tau_max=config.tau_max,
                    n_samples=config.tau_n, fd_step=config.fd_step,
                )
                boundary_samples = boundary_trace(pair, spec0).samples
            svg = level_curves_svg(curves, boundary_samples, title=pair.label)
            written.append(atomic_write(out_dir / "levelcurves.svg", svg))
    except _ERRORS as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"levelcurves failed: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


def _scaling_report(pair, config: RunConfig) -> VerificationReport:
    points = [complex(s, t) for s in (0.3, 0.7, 1.0, 2.0, 5.0) for t in (-4.0, -1.0, 0.5, 3.0)]
    tol = config.tolerance("scaling")
    reports = [verify_scaling(pair, c, points, tol=tol) for c in config.scale_factors]
    worst = max(reports, key=lambda rep: rep.empirical_constant)
    return VerificationReport(
        check_name="scaling_law",
        passed=all(rep.passed for rep in reports),
        empirical_constant=worst.empirical_constant,
        extremal_point=worst.extremal_point,
        tolerance=tol,
        grid_descriptor=f"factors {list(config.scale_factors)}, {len(points)} points",
        notes="; ".join(f"c={c:g}: {rep.notes}" for c, rep in zip(config.scale_factors, reports)),
    )


def _graph_reports(pair, config: RunConfig, which: list[str]) -> list[VerificationReport]:
    x0, x1, y0, y1 = config.grid_window
    window = ((x0, x1), (y0, y1))
    h = config.grid_spacing
    reports = []
    field = graphfield.reconstruct_u(pair, window, h)
    if "superharmonic" in which:
        reports.append(graphfield.superharmonic_report(
            field, descriptor=f"window {config.grid_window}, h={h:g}"))
    if "msr" in which:
        fine = graphfield.reconstruct_u(pair, window, h / 2.0)
        reports.append(graphfield.msr_report(
            field, fine, exact_tol=config.tolerance("msr_exact"),
            descriptor=f"window {config.grid_window}, h={h:g} and {h / 2:g}"))
    return reports


def cmd_verify(config: RunConfig, args) -> int:
    which = list(VERIFY_CHECKS) if args.check == "all" else [args.check]
    pair = build_pair(config.pair_spec)
    grid = _verify_grid(config)
    out_dir = Path(config.out_dir)
    positive_levels = [c for c in config.levels if c > 0.0] or [0.5, 1.0, 2.0, 4.0, 8.0]

    reports: list[VerificationReport] = []
    try:
        if "lemma2" in which:
            reports.append(verify_lemma2(pair, grid, family_tol=config.tolerance("lemma2_family")))
        if "thm1" in which:
            reports.append(verify_thm1(pair, positive_levels, grid, tol=config.tolerance("thm1")))
        if "thm2" in which:
            reports.append(verify_thm2(pair, grid))
        if "poisson" in which:
            data = BoundaryArgumentData.from_pair(pair, truncation=config.truncation)
            reports.append(verify_poisson(
                pair, data,
                value_tol=config.tolerance("poisson_value"),
                agreement_tol=config.tolerance("poisson_agreement"),
            ))
        if "scaling" in which:
            reports.append(_scaling_report(pair, config))
        if "disk" in which:
            reports.append(disk_transfer_check(pair, grid))
        graph_checks = [name for name in ("superharmonic", "msr") if name in which]
        if graph_checks:
            reports.extend(_graph_reports(pair, config, graph_checks))
    except _ERRORS as exc:
        print(f"verify failed while evaluating: {exc}", file=sys.stderr)
        return 2

    all_passed = True
    first_failure = None
    for report in reports:
        atomic_write(out_dir / f"verify_{report.check_name}.json", report.to_json())
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {report.check_name}: {report.notes}")
        if not report.passed:
            all_passed = False
            first_failure = first_failure or report.check_name
    if first_failure:
        print(f"first failing check: {first_failure}", file=sys.stderr)
    return 0 if all_passed else 1


def cmd_sweep_gamma(config: RunConfig, args) -> int:
    from .weierstrass import lw_family

    grid = _verify_grid(config)
    out_dir = Path(config.out_dir)
    positive_levels = [c for c in config.levels if c > 0.0] or [0.5, 1.0, 2.0, 4.0, 8.0]
    header = ("gamma,A_emp,K_emp,min_kappa,angle_plus,angle_minus,"
              "lemma2_pass,thm1_pass,thm2_pass,error")
    rows = [header]
    any_bad = False
    for gamma in config.sweep_gammas:
        try:
            pair = lw_family(gamma)
            lemma2 = verify_lemma2(pair, grid, family_tol=config.tolerance("lemma2_family"))
            thm1 = verify_thm1(pair, positive_levels, grid, tol=config.tolerance("thm1"))
            thm2 = verify_thm2(pair, grid)
            plus, minus = estimate_asymptotic_angles(pair, tol=config.tolerance("angles"))
            rows.append(",".join([
                fmt_float(gamma), fmt_float(lemma2.empirical_constant),
                fmt_float(thm1.empirical_constant), fmt_float(thm2.empirical_constant),
                fmt_float(plus), fmt_float(minus),
                str(int(lemma2.passed)), str(int(thm1.passed)), str(int(thm2.passed)), "",
            ]))
            if not (lemma2.passed and thm1.passed and thm2.passed):
                any_bad = True
        except _ERRORS as exc:
            rows.append(",".join([fmt_float(gamma)] + ["nan"] * 5 + ["0", "0", "0",
                                                                     str(exc).replace(",", ";")]))
            any_bad = True
    path = atomic_write(out_dir / "sweep_gamma.csv", "\n".join(rows) + "\n")
    print(path)
    return 1 if any_bad else 0


def cmd_reconstruct(config: RunConfig, args) -> int:
    pair = build_pair(config.pair_spec)
    x0, x1, y0, y1 = config.grid_window
    out_dir = Path(config.out_dir)
    try:
        field = graphfield.reconstruct_u(pair, ((x0, x1), (y0, y1)), config.grid_spacing)
    except _ERRORS as exc:
        print(f"reconstruct failed: {exc}", file=sys.stderr)
        return 2
    written = [atomic_write(out_dir / "field.grid", field.to_grid_text())]
    if "csv" in config.formats:
        written.append(atomic_write(out_dir / "field.csv", field.to_csv()))
    stats = field.stats
    print(f"solved {stats.solved}/{stats.attempted} nodes ({stats.failed} failed)")
    for path in written:
        print(path)
    if not stats.seed_placed:
        print("no seed could be placed: window does not meet the image domain",
              file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mingraphs",
        description="Level curves and curvature checks for half-plane minimal graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="declarative config file")
        p.add_argument("--gamma", type=float, default=None, help="catalog family exponent")
        p.add_argument("--levels", default=None, help="comma list of level heights")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", default=None, help="csv|json|svg (comma list)")
        p.add_argument("--tol", action="append", default=[], help="NAME=VALUE override")
        p.add_argument("--grid", default=None, help="x0,x1,y0,y1,h window for grid checks")
        p.add_argument("--tau", default=None, help="a,b,n sampling window")

    p_levels = sub.add_parser("levelcurves", help="sample and export level curves")
    common(p_levels)
    p_levels.set_defaults(func=cmd_levelcurves)

    p_verify = sub.add_parser("verify", help="run verification checks")
    p_verify.add_argument("check", choices=VERIFY_CHECKS + ("all",))
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep-gamma", help="summary table over the catalog family")
    common(p_sweep)
    p_sweep.add_argument("--gammas", default=None, help="comma list of exponents")
    p_sweep.set_defaults(func=cmd_sweep_gamma)

    p_rec = sub.add_parser("reconstruct", help="invert the map over a grid window")
    common(p_rec)
    p_rec.set_defaults(func=cmd_reconstruct)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        return args.func(config, args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
