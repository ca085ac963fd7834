#!/usr/bin/env python3
"""Validate the 3d plaquette sampler against exhaustive enumeration.

An L = 2 single-sublattice lattice has only 3 * 2^3 = 24 link spins, so all
2^24 configurations fit in one streamed pass: encode spins in the bits of a
uint32 and evaluate every plaquette as the parity of config AND mask. The
parallel-tempering estimates of <E> and <|P|> must agree with the exact
Boltzmann sums to within a few standard errors.
"""
import argparse

import numpy as np

import gaugemc as g

L = 2

# spin bit layout: ((direction * L + k) * L + j) * L + i
def _bit(d, k, j, i):
    return ((d * L + k) * L + j) * L + i


def _masks(terms):
    """(coupling, 4-spin mask) for every anchored plaquette."""
    # term key -> plaquette plane (mu, nu) with directions x=0, y=1, t=2
    plane = {"jx_x": (1, 2), "jy_x": (2, 0), "jq_s": (0, 1)}
    step = {0: (1, 0, 0), 1: (0, 1, 0), 2: (0, 0, 1)}
    js, masks = [], []
    for key, (mu, nu) in plane.items():
        for k in range(L):
            for j in range(L):
                for i in range(L):
                    mask = 0
                    for d, (di, dj, dk) in ((mu, (0, 0, 0)), (nu, step[mu]),
                                            (mu, step[nu]), (nu, (0, 0, 0))):
                        mask ^= 1 << _bit(d, (k + dk) % L, (j + dj) % L,
                                          (i + di) % L)
                    js.append(float(terms[key][k, j, i]))
                    masks.append(mask)
    return np.array(js), np.array(masks, dtype=np.uint32)


def exact_averages(terms, temperatures):
    js, masks = _masks(terms)
    col_masks = []
    for j in range(L):
        for i in range(L):
            mask = 0
            for k in range(L):
                mask |= 1 << _bit(2, k, j, i)
            col_masks.append(mask)
    betas = 1.0 / np.asarray(temperatures)
    e_floor = -np.sum(np.abs(js))
    z = np.zeros(betas.shape)
    e_acc = np.zeros(betas.shape)
    p_acc = np.zeros(betas.shape)
    for start in range(0, 1 << 24, 1 << 20):
        configs = np.arange(start, start + (1 << 20), dtype=np.uint32)
        energy = np.zeros(configs.shape)
        for coupling, mask in zip(js, masks):
            parity = (np.bitwise_count(configs & mask) & 1).astype(np.float64)
            energy -= coupling * (1.0 - 2.0 * parity)
        p_abs = np.zeros(configs.shape)
        for mask in col_masks:
            parity = (np.bitwise_count(configs & mask) & 1).astype(np.float64)
            p_abs += 1.0 - 2.0 * parity
        p_abs = np.abs(p_abs) / (L * L)
        for t, beta in enumerate(betas):
            w = np.exp(-beta * (energy - e_floor))
            z[t] += w.sum()
            e_acc[t] += (w * energy).sum()
            p_acc[t] += (w * p_abs).sum()
    return e_acc / z, p_acc / z


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.08,
                    help="depolarizing strength for the quenched sample")
    ap.add_argument("--streams", type=int, default=8)
    ap.add_argument("--sweeps", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    temps = [1.5, 2.0, 3.0]
    rates = g.NoiseRates.symmetric_depolarizing(args.p)
    couplings = g.nishimori_coupling_set(g.ModelKind.RPGM, rates,
                                         normalized=True)
    dis = g.sample_disorder(g.ModelKind.RPGM, rates, couplings, L,
                            g.disorder_seed(args.seed, 0))
    flipped = "  ".join(
        f"{tag} {dis.wrong_sign_fraction(tag):.3f}"
        for tag in ("jx_x", "jy_x", "jq_s"))
    print(f"quenched sample at p = {args.p}, wrong-sign fractions: {flipped}")

    print("enumerating all 2^24 configurations ...")
    e_exact, p_exact = exact_averages(dis.terms, temps)

    ladder = g.TemperatureLadder.from_temperatures(temps)
    params = g.RunParameters(n_sweep=args.sweeps, n_met=10, t_step=len(temps),
                             t_min=min(temps), t_max=max(temps),
                             therm_units=args.sweeps // 4, bin_interval=1)
    e_mc = np.empty((args.streams, len(temps)))
    p_mc = np.empty((args.streams, len(temps)))
    for s in range(args.streams):
        res = g.run_disorder_sample(dis, params, master_seed=1000 + s,
                                    ladder=ladder)
        for t in range(len(temps)):
            e_mc[s, t] = res.series[t].mean_energy()
            p_mc[s, t] = res.series[t].mean_order()
    order = res.temperatures

    print("\n   T        exact <E>     MC <E>            exact <|P|>  MC <|P|>")
    for t, temp in enumerate(order):
        (slot,) = np.nonzero(np.isclose(np.array(temps), temp))
        se_e = e_mc[:, t].std(ddof=1) / np.sqrt(args.streams)
        se_p = p_mc[:, t].std(ddof=1) / np.sqrt(args.streams)
        print(f"  {temp:.2f}   {e_exact[slot[0]]:10.5f}   {e_mc[:, t].mean():10.5f}"
              f" +- {se_e:.5f}   {p_exact[slot[0]]:.5f}     "
              f"{p_mc[:, t].mean():.5f} +- {se_p:.5f}")


if __name__ == "__main__":
    main()
