#!/usr/bin/env python3
"""Locate the pure 2d Ising critical point from Binder-ratio crossings.

Runs short parallel-tempering scans of the single-sublattice bond model at
zero disorder for a few sizes, prints magnetization, susceptibility and the
Binder ratio per temperature, and intersects the Binder curves of adjacent
sizes. The exact answer for the infinite lattice is 2/ln(1+sqrt(2)).
"""
import argparse

import numpy as np

import gaugemc as g


def binder_scan(lsize, t_min, t_max, t_step, n_samples, n_sweep, seed):
    couplings = g.CouplingSet(g.ModelKind.RBIM,
                              {k: 1.0 for k in g.TERM_KEYS[g.ModelKind.RBIM]})
    params = g.RunParameters(n_sweep=n_sweep, n_met=8, t_step=t_step,
                             t_min=t_min, t_max=t_max, therm_units=n_sweep // 2,
                             bin_interval=2)
    result = g.run_experiment(g.ModelKind.RBIM, lsize, params, couplings,
                              g.NoiseRates(), n_samples=n_samples,
                              master_seed=seed, keep_samples=True)
    u4 = np.array([[s.series[t].u4() for t in range(len(result.temperatures))]
                   for s in result.samples])
    stats = [g.jackknife(u4[:, t]) for t in range(u4.shape[1])]
    return (result.temperatures, result.table,
            np.array([s[0] for s in stats]), np.array([s[1] for s in stats]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--t-min", type=float, default=2.15)
    ap.add_argument("--t-max", type=float, default=2.45)
    ap.add_argument("--t-step", type=int, default=9)
    ap.add_argument("--samples", type=int, default=4,
                    help="independent streams per size")
    ap.add_argument("--sweeps", type=int, default=800)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    t_exact = 2.0 / np.log(1.0 + np.sqrt(2.0))
    curves = {}

    # --- scan each size ---
    for lsize in args.sizes:
        temps, table, u4, u4_err = binder_scan(
            lsize, args.t_min, args.t_max, args.t_step, args.samples,
            args.sweeps, args.seed + lsize)
        curves[lsize] = (temps, u4, u4_err)
        print(f"\nL = {lsize}")
        print("   T        <|m|>        chi         U4")
        for t in range(len(temps)):
            print(f"  {temps[t]:.4f}   {table['order'][t]:.4f}"
                  f"     {table['chi'][t]:9.5f}   {u4[t]:.4f} "
                  f"+- {u4_err[t]:.4f}")

    # --- intersect adjacent Binder curves ---
    print("\nBinder crossings (adjacent size pairs):")
    sizes = sorted(curves)
    for small, large in zip(sizes, sizes[1:]):
        temps, u_s, e_s = curves[small]
        _, u_l, e_l = curves[large]
        est = g.find_b3_zero_crossing(temps, u_s - u_l, np.hypot(e_s, e_l))
        if not est.found:
            print(f"  ({small:3d},{large:3d})  no crossing in window")
            continue
        off = (est.t_c - t_exact) / t_exact * 100
        print(f"  ({small:3d},{large:3d})  T_x = {est.t_c:.4f} "
              f"+- {est.t_c_err:.4f}   ({off:+.2f}% vs exact)")
    print(f"\nexact infinite-size value: {t_exact:.6f}")


if __name__ == "__main__":
    main()
