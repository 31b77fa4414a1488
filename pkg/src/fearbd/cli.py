"""Command-line front end.

Exit codes: 0 success, 1 config or usage error, 2 hypothesis failure,
3 numerical failure.  Outputs go to --out, else $FEARBD_OUT/<dir>, else
./fearbd_out/<dir>.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from fearbd.config import ConfigError, RunConfig, initial_field, load_config, load_manifest
from fearbd.equilibria import HypothesisError, solve_coexistence
from fearbd.oracle import u_star, LogisticParams
from fearbd.solver import BlowUpError, PositivityError, bound_monitor, integrate
from fearbd.turing import analyze, nonexistence_threshold, report_json, report_text

EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NUMERICAL = 0, 1, 2, 3
CONFIG_DIR = Path(__file__).parent / "configs"
FIGURES = {1: "fig1.cfg", 2: "fig2.cfg", 3: "fig3.manifest", 4: "fig4.manifest",
           5: "fig5.manifest", 6: "fig6.manifest"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def output_root() -> Path:
    return Path(os.environ.get("FEARBD_OUT") or "fearbd_out")


def _target(out: str | None, default_name: str) -> Path:
    path = Path(out) if out else output_root() / default_name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _dump(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _print_block(title: str, items: dict) -> None:
    print(f"== {title} ==")
    for key, value in items.items():
        print(f"{key}: {value}")


def analysis_document(cfg: RunConfig) -> tuple[str, str, int]:
    """(json text, human text, exit code) for the analysis of one config."""
    params = cfg.params
    nonex = None
    if params.r > params.d:
        try:
            nonex = nonexistence_threshold(params, cfg.analysis.mu_lower, cfg.C_p)
        except ValueError as exc:
            raise ConfigError(f"[analysis] {exc}") from None
    try:
        disp = analyze(params, cfg.grid.L, cfg.analysis.n_modes)
    except HypothesisError as exc:
        doc = report_json(None, nonex, verdict="no coexistence", reason=str(exc),
                          config_hash=cfg.config_hash())
        return doc, f"verdict               no coexistence ({exc})", EXIT_HYPOTHESIS
    doc = report_json(disp, nonex, verdict="coexistence", config_hash=cfg.config_hash())
    return doc, report_text(disp, nonex), EXIT_OK


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    doc, text, code = analysis_document(cfg)
    out = _target(args.out, cfg.output_dir)
    (out / "analysis.json").write_text(doc + "\n")
    print("== analysis ==")
    print(text)
    print(f"written: {out / 'analysis.json'}")
    return code


def _upper_solution_excess(series, params) -> float | None:
    if params.r == params.d:
        return None
    lp = LogisticParams.from_model(params, float(series.u[0].max()))
    return float(np.max(series.max_u - u_star(series.t - series.t[0], lp)))


def simulate_config(cfg: RunConfig, out: Path, plots: bool = True) -> tuple[dict, int]:
    """Run one config into ``out``; returns the summary document and an exit code."""
    params = cfg.params
    equilibrium = None
    doc = {"config_hash": cfg.config_hash(), "config": cfg.to_text()}
    try:
        equilibrium = solve_coexistence(params)
        doc["equilibrium"] = {"u": equilibrium.u_star, "v": equilibrium.v_star}
    except HypothesisError as exc:
        doc["equilibrium"] = None
        if cfg.initial.kind == "equilibrium-cosine":
            doc.update(status="hypothesis failure", error=str(exc))
            _dump(out / "summary.json", doc)
            return doc, EXIT_HYPOTHESIS
    field0 = initial_field(cfg, equilibrium)
    try:
        summary, series = integrate(field0, params, cfg.grid, cfg.solver)
    except (BlowUpError, PositivityError) as exc:
        if exc.series is not None:
            exc.series.to_csv(out / "snapshots.csv")
        doc.update(status="numerical failure", error=str(exc), failure_time=exc.t)
        _dump(out / "summary.json", doc)
        return doc, EXIT_NUMERICAL
    series.to_csv(out / "snapshots.csv")
    doc.update(summary.as_dict())
    doc["status"] = "ok"
    doc["monitors"] = series.monitors()
    doc["upper_solution_excess"] = _upper_solution_excess(series, params)
    if params.r > params.d:
        doc["bounds"] = [{"name": n, "satisfied": s, "margin": None if math.isnan(m) else m}
                         for n, s, m in bound_monitor(summary, params, cfg.grid.L)]
    _dump(out / "summary.json", doc)
    if plots:
        from fearbd.plotting import render_run
        render_run(series, out, cfg.output_dir)
    return doc, EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.t_end is not None:
        cfg = cfg.with_value("solver.t_end", args.t_end)
    out = _target(args.out, cfg.output_dir)
    doc, code = simulate_config(cfg, out, plots=not args.no_plots)
    keys = ("status", "classification", "t_end", "spatial_variance_u", "spatial_variance_v",
            "max_u_tail", "max_v_tail", "v_mass", "upper_solution_excess", "error", "config_hash")
    _print_block("simulate", {k: doc[k] for k in keys if k in doc})
    for bound in doc.get("bounds", []):
        print(f"bound {bound['name']}: {bound['satisfied']} (margin {bound['margin']})")
    print(f"written: {out}")
    return code


AGGREGATE_COLUMNS = ("value", "status", "classification", "spatial_variance_u",
                     "max_u", "max_v", "config_hash")


def _sweep_worker(job) -> dict:
    value, cfg, out, plots = job
    out.mkdir(parents=True, exist_ok=True)
    row = {"value": value, "config_hash": cfg.config_hash(), "classification": "",
           "spatial_variance_u": "", "max_u": "", "max_v": ""}
    try:
        doc, code = simulate_config(cfg, out, plots)
    except Exception as exc:  # one failed run must not abort its siblings
        row["status"] = f"error: {exc}"
        return row
    row["status"] = doc["status"]
    if code == EXIT_OK:
        row.update(classification=doc["classification"], spatial_variance_u=repr(doc["spatial_variance_u"]),
                   max_u=repr(doc["max_u_tail"]), max_v=repr(doc["max_v_tail"]))
    return row


def run_sweep(manifest, out: Path, jobs: int = 1, plots: bool = True) -> list[dict]:
    configs = manifest.run_configs()
    job_list = [(v, cfg, out / manifest.run_dir(i), plots)
                for i, (v, cfg) in enumerate(zip(manifest.values, configs))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_worker, job_list))
    else:
        rows = [_sweep_worker(job) for job in job_list]
    rows.sort(key=lambda row: row["value"])
    with open(out / manifest.aggregate, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=AGGREGATE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "value": repr(row["value"])})
    return rows


def _sweep(manifest, out_arg, jobs, plots, t_end=None) -> int:
    if t_end is not None:
        manifest = type(manifest)(manifest.base.with_value("solver.t_end", t_end), manifest.parameter,
                                  manifest.values, manifest.aggregate, manifest.output_dir)
    out = _target(out_arg, manifest.output_dir)
    rows = run_sweep(manifest, out, jobs, plots)
    print(f"== sweep {manifest.parameter} ==")
    print(",".join(AGGREGATE_COLUMNS))
    for row in rows:
        print(",".join(str(row[c]) for c in AGGREGATE_COLUMNS))
    print(f"written: {out / manifest.aggregate}")
    return EXIT_OK if all(row["status"] == "ok" for row in rows) else EXIT_NUMERICAL


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return _sweep(load_manifest(args.manifest), args.out, args.jobs, not args.no_plots, args.t_end)


def cmd_reproduce(args) -> int:
    if args.figure not in FIGURES:
        raise ConfigError(f"unknown figure id {args.figure}; choose from {sorted(FIGURES)}")
    path = CONFIG_DIR / FIGURES[args.figure]
    if path.suffix == ".manifest":
        return _sweep(load_manifest(path), args.out, args.jobs, not args.no_plots, args.t_end)
    cfg = load_config(path)
    doc, text, code = analysis_document(cfg)
    if code != EXIT_OK:
        print(text)
        return code
    print("== analysis ==")
    print(text)
    sim_args = argparse.Namespace(config=path, out=args.out, t_end=args.t_end, no_plots=args.no_plots)
    code = cmd_simulate(sim_args)
    Path(sim_args.out or output_root() / cfg.output_dir, "analysis.json").write_text(doc + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fearbd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="equilibrium, dispersion window and nonexistence threshold")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="integrate one config and write CSV, JSON and SVG")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--t-end", type=float)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--t-end", type=float)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="rerun a figure scenario from the bundled configs")
    p.add_argument("--figure", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--t-end", type=float)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
