"""Command line front end.

Subcommands:
  run        execute a run config (all rows x disorder samples), resumable
  tables     print the CNOT fault effect tables
  reduce     map a circuit noise strength to effective edge rates
  analyze    locate transitions in result directories, fit and classify
  plot-data  dump result directories as tidy CSV for external plotting
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from collections import defaultdict

from . import analysis, circuit
from .config import (ConfigError, RunConfig, find_summaries, load_summary,
                     run_config)
from .couplings import ModelKind


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaugemc",
        description="disorder spin/gauge model Monte Carlo for decoding "
                    "thresholds")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a run config")
    p_run.add_argument("config", help="run config JSON file")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument("--out-dir", help="override the output directory")
    p_run.add_argument("--workers", type=int,
                       help="worker processes (default GAUGEMC_WORKERS or 1)")
    p_run.add_argument("--checkpoint-every", type=int, default=500,
                       help="steps between mid-sample checkpoints")

    p_tab = sub.add_parser("tables", help="print CNOT fault effect tables")
    p_tab.add_argument("--table", choices=sorted(
        [f"CNOT{i}{s}" for i in range(1, 5) for s in "XZ"]),
        help="print a single table")
    p_tab.add_argument("--single-qubit", action="store_true",
                       help="also print the one-qubit location effects")
    p_tab.add_argument("--json", action="store_true")

    p_red = sub.add_parser("reduce", help="map circuit p to edge rates")
    p_red.add_argument("--target", choices=["rpgm", "rcpgm"], required=True)
    p_red.add_argument("--p", type=float, required=True)
    p_red.add_argument("--exact", action="store_true",
                       help="print coefficients as exact fractions of p")
    p_red.add_argument("--json", action="store_true")

    p_ana = sub.add_parser("analyze",
                           help="locate transitions in saved results")
    p_ana.add_argument("results", nargs="+",
                       help="result directories or summary.json files")
    p_ana.add_argument("--out", help="phase-diagram CSV path (default stdout)")
    p_ana.add_argument("--json", action="store_true")

    p_plot = sub.add_parser("plot-data", help="dump results as tidy CSV")
    p_plot.add_argument("results", nargs="+",
                        help="result directories or summary.json files")
    p_plot.add_argument("--out", help="output CSV path (default stdout)")
    return parser


def _cmd_run(args) -> int:
    config = RunConfig.load(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if args.out_dir is not None:
        import dataclasses
        config = dataclasses.replace(config, out_dir=args.out_dir)
    results = run_config(config, n_workers=args.workers,
                         checkpoint_every=args.checkpoint_every)
    for row, result in zip(config.rows, results):
        print(f"wrote {config.row_dir(row)} "
              f"(config {config.config_hash()}, seed {config.seed}, "
              f"{result.n_samples} samples)")
    return 0


def _cmd_tables(args) -> int:
    tables = circuit.emit_location_tables()
    if args.table:
        tables = {args.table: tables[args.table]}
    if args.json:
        payload = {name: {label: str(effect) for label, effect in rows}
                   for name, rows in tables.items()}
        if args.single_qubit:
            payload["single-qubit"] = {
                f"{name}:{pauli}": str(effect)
                for name, pauli, effect in circuit.single_qubit_effect_table()}
        json.dump(payload, sys.stdout, indent=2)
        print()
        return 0
    header = "  ".join(circuit.EFFECT_COLUMNS)
    for name, rows in tables.items():
        print(f"{name}  ({header})")
        for label, effect in rows:
            print(f"  {label}  {effect}")
        print()
    if args.single_qubit:
        print(f"single-qubit locations  ({header})")
        for name, pauli, effect in circuit.single_qubit_effect_table():
            print(f"  {name:>16} {pauli}  {effect}")
    return 0


def _cmd_reduce(args) -> int:
    kind = ModelKind(args.target)
    coeff = circuit.reduction_coefficients(kind)
    rates = circuit.reduce_to_rates(args.p, kind)
    if args.json:
        payload = {"p": args.p, "target": kind.value,
                   "coefficients": {k: str(v) for k, v in coeff.items()},
                   "rates": {k: getattr(rates, k) for k in coeff}}
        json.dump(payload, sys.stdout, indent=2)
        print()
        return 0
    for key, frac in coeff.items():
        if args.exact:
            print(f"{key} = ({frac}) p = {float(frac) * args.p:.10g}")
        else:
            print(f"{key} = {float(frac) * args.p:.10g}")
    return 0


def _analyze_one(path: str) -> dict:
    record = load_summary(path)
    temps = record["temperatures"]
    table = record["table"]
    config = RunConfig.from_dict(record["config"])
    b3_est = analysis.find_b3_zero_crossing(temps, table["b3"],
                                            table["b3_err"])
    chi_est = analysis.find_chi_peak(temps, table["chi"], table["chi_err"])
    if config.noise["type"] == "none":
        t_n, verdict = None, None
    else:
        t_n = analysis.nishimori_temperature(config.rates(), config.model,
                                             config.normalized)
        verdict = analysis.threshold_verdict(b3_est, t_n)
    return dict(path=path, model=config.kind, p=config.p,
                lsize=record["row"]["lsize"], found=b3_est.found,
                t_c_b3=b3_est.t_c, t_c_b3_err=b3_est.t_c_err,
                t_c_chi=chi_est.t_c, t_c_chi_err=chi_est.t_c_err,
                t_nishimori=t_n, verdict=verdict)


def _cmd_analyze(args) -> int:
    paths = find_summaries(args.results)
    if not paths:
        raise SystemExit("no summary.json files found")
    rows = [_analyze_one(p) for p in paths]

    fits = {}
    groups = defaultdict(list)
    for r in rows:
        if r["found"]:
            groups[(r["model"], r["p"])].append(r)
    for key, members in groups.items():
        members.sort(key=lambda r: r["lsize"])
        if len(members) < 3:
            continue
        errs = [m["t_c_b3_err"] for m in members]
        fit = analysis.fit_finite_size(
            [m["lsize"] for m in members], [m["t_c_b3"] for m in members],
            errs if all(e > 0 for e in errs) else None)
        fits[key] = dict(amplitude=fit.amplitude, exponent=fit.exponent,
                         t_inf=fit.t_inf, t_inf_err=fit.t_inf_err,
                         chi2=fit.chi2, n_points=fit.n_points)

    if args.json:
        payload = {"runs": rows,
                   "fits": [{"model": m, "p": p, **f}
                            for (m, p), f in sorted(fits.items())]}
        json.dump(payload, sys.stdout, indent=2)
        print()
        return 0

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["model", "p", "lsize", "t_c_b3", "t_c_b3_err",
                         "t_c_chi", "t_c_chi_err", "t_nishimori", "verdict"])
        for r in rows:
            writer.writerow([r["model"], r["p"], r["lsize"],
                             r["t_c_b3"] if r["found"] else "",
                             r["t_c_b3_err"] if r["found"] else "",
                             r["t_c_chi"], r["t_c_chi_err"],
                             "" if r["t_nishimori"] is None else r["t_nishimori"],
                             "" if r["verdict"] is None else r["verdict"]])
        for (model, p), f in sorted(fits.items()):
            writer.writerow([model, p, "inf", f["t_inf"], f["t_inf_err"],
                             "", "", "", f"fit b={f['exponent']:.4g}"])
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_plot_data(args) -> int:
    paths = find_summaries(args.results)
    if not paths:
        raise SystemExit("no summary.json files found")
    columns = ["order", "order_err", "chi", "chi_err", "b3", "b3_err",
               "energy", "energy_err"]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["model", "p", "lsize", "temperature"] + columns)
        for path in paths:
            record = load_summary(path)
            config = record["config"]
            model = config.get("model", config.get("kind"))
            p = record["config"].get("noise", {}).get("p", 0.0)
            lsize = record["row"]["lsize"]
            temps = record["temperatures"]
            table = record["table"]
            for i, t in enumerate(temps):
                writer.writerow([model, p, lsize, f"{t:.8g}"]
                                + [f"{table[c][i]:.8g}" for c in columns])
    finally:
        if args.out:
            out.close()
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "tables": _cmd_tables, "reduce": _cmd_reduce,
                "analyze": _cmd_analyze, "plot-data": _cmd_plot_data}
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
