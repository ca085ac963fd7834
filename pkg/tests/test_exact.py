"""Exhaustive small-lattice checks.

The enumeration oracle rebuilds every term from the plaquette formula with
bit masks, independent of the kernel code. Config-by-config agreement with
``total_energy`` on random spin patterns pins both implementations to the
same Hamiltonian; closed-form limits then fix the overall sign and count.
"""
import numpy as np
import pytest

import gaugemc as g
from enumeration import (config_abs_polyakov, config_energies,
                         exact_rpgm_averages, rpgm_term_masks, spin_bit)
from helpers import random_disorder

L = 2
N_SPINS = 3 * L ** 3


def _state_from_bits(config_bits):
    """Decode an enumeration bit pattern into a lattice state."""
    state = g.make_lattice(L, 3, 1, "plus")
    for d in range(3):
        for k in range(L):
            for j in range(L):
                for i in range(L):
                    if (config_bits >> spin_bit(d, k, j, i, L)) & 1:
                        state.spins[0, d, k, j, i] = -1
    return state


@pytest.fixture(scope="module")
def rpgm_sample():
    dis = random_disorder(g.ModelKind.RPGM, L, seed=5)
    js, masks = rpgm_term_masks(dis.terms, L)
    return dis, js, masks


def test_oracle_energy_matches_hamiltonian(rpgm_sample, rng):
    dis, js, masks = rpgm_sample
    configs = rng.integers(0, 1 << N_SPINS, size=64).astype(np.uint32)
    oracle = config_energies(configs, js, masks)
    for bits, expected in zip(configs, oracle):
        state = _state_from_bits(int(bits))
        assert g.total_energy(state, dis) == pytest.approx(expected,
                                                           rel=1e-12)


def test_oracle_polyakov_matches_observable(rng):
    configs = rng.integers(0, 1 << N_SPINS, size=64).astype(np.uint32)
    oracle = config_abs_polyakov(configs, L)
    for bits, expected in zip(configs, oracle):
        state = _state_from_bits(int(bits))
        assert g.mean_abs_polyakov(state) == pytest.approx(expected,
                                                           abs=1e-15)


def test_uniform_averages_hit_closed_form_limits():
    # all 2^24 configurations; roughly two seconds
    dis = g.uniform_disorder(g.ModelKind.RPGM, L)
    out = exact_rpgm_averages(dis.terms, L, [0.05, 1e9])
    # T -> 0: every plaquette satisfied, all Polyakov lines aligned
    assert out["energy"][0] == pytest.approx(-3 * L ** 3, abs=1e-9)
    assert out["abs_polyakov"][0] == pytest.approx(1.0, abs=1e-9)
    # T -> inf: terms average out; the L^2 = 4 line products are
    # independent coin flips, E|sum of 4| / 4 = (24/16) / 4 = 3/8
    assert out["energy"][1] == pytest.approx(0.0, abs=1e-6)
    assert out["abs_polyakov"][1] == pytest.approx(0.375, abs=1e-6)


def test_disordered_averages_are_reproducible(rpgm_sample):
    dis, js, masks = rpgm_sample
    first = exact_rpgm_averages(dis.terms, L, [1.5])
    again = exact_rpgm_averages(dis.terms, L, [1.5], chunk=1 << 15)
    assert first["energy"][0] == pytest.approx(again["energy"][0], rel=1e-12)
    assert first["abs_polyakov"][0] == pytest.approx(again["abs_polyakov"][0],
                                                     rel=1e-12)


def test_enumeration_rejects_large_lattices():
    dis = g.uniform_disorder(g.ModelKind.RPGM, 3)
    with pytest.raises(ValueError):
        exact_rpgm_averages(dis.terms, 3, [1.0])


def test_mc_matches_enumeration_on_decoupled_sublattices():
    """Zero couplers split the two-sublattice gauge model into independent
    single-sublattice sectors, so exact references come from two separate
    enumerations: energies add, and the observed order parameter is the
    first sector's alone."""
    temps = [1.5, 2.0, 3.0]
    values = dict(jx_x=1.0, jy_x=1.0, jq_s=1.0, jx_z=1.0, jy_z=1.0,
                  jq_t=1.0, jx_y=0.0, jy_y=0.0)
    couplings = g.CouplingSet(g.ModelKind.RCPGM, values)
    rates = g.NoiseRates.symmetric_depolarizing(0.12)
    dis = g.sample_disorder(g.ModelKind.RCPGM, rates, couplings, L,
                            g.disorder_seed(17, 0))
    sigma = {key: dis.terms[key] for key in ("jx_x", "jy_x", "jq_s")}
    tau = {"jx_x": dis.terms["jx_z"], "jy_x": dis.terms["jy_z"],
           "jq_s": dis.terms["jq_t"]}
    exact_s = exact_rpgm_averages(sigma, L, temps)
    exact_t = exact_rpgm_averages(tau, L, temps)
    exact_e = exact_s["energy"] + exact_t["energy"]
    exact_p = exact_s["abs_polyakov"]

    ladder = g.TemperatureLadder.from_temperatures(temps)
    params = g.RunParameters(n_sweep=5000, n_met=10, t_step=3, t_min=1.5,
                             t_max=3.0, therm_units=1200, bin_interval=1)
    n_streams = 10
    energy = np.empty((n_streams, len(temps)))
    order = np.empty((n_streams, len(temps)))
    for s in range(n_streams):
        res = g.run_disorder_sample(dis, params, master_seed=4200 + s,
                                    ladder=ladder)
        for t in range(len(temps)):
            energy[s, t] = res.series[t].mean_energy()
            order[s, t] = res.series[t].mean_order()
        temperatures = res.temperatures

    for column, reference, label in ((energy, exact_e, "energy"),
                                     (order, exact_p, "order")):
        for t, temp in enumerate(temperatures):
            (slot,) = np.nonzero(np.isclose(temps, temp))
            mean = column[:, t].mean()
            se = column[:, t].std(ddof=1) / np.sqrt(n_streams)
            assert abs(mean - reference[slot[0]]) <= 3.0 * se, (
                f"{label} at T={temp}: mc {mean:.6f} vs exact "
                f"{reference[slot[0]]:.6f} (se {se:.6f})")


# --- independent 2d brute force ---

def _rbim_energy(sites, bonds_x, bonds_y):
    e = 0.0
    for j in range(L):
        for i in range(L):
            i1, j1 = (i + 1) % L, (j + 1) % L
            e -= bonds_x[j, i] * sites[j, i] * sites[j, i1]
            e -= bonds_y[j, i] * sites[j, i] * sites[j1, i]
    return e


def test_rbim_brute_force_matches_hamiltonian():
    dis = random_disorder(g.ModelKind.RBIM, L, seed=3)
    for bits in range(1 << (L * L)):
        state = g.make_lattice(L, 2, 1, "plus")
        sites = state.spins[0, 0]
        for j in range(L):
            for i in range(L):
                if (bits >> (j * L + i)) & 1:
                    sites[j, i] = -1
        expected = _rbim_energy(sites, dis.terms["jx_x"], dis.terms["jy_x"])
        assert g.total_energy(state, dis) == pytest.approx(expected,
                                                           rel=1e-12)


def _r8vm_energy(sg, tg, terms):
    e = 0.0
    for j in range(L):
        for i in range(L):
            i1, j1 = (i + 1) % L, (j + 1) % L
            im, jm = (i - 1) % L, (j - 1) % L
            bx = sg[j, i] * sg[j, i1]
            by = sg[j, i] * sg[j1, i]
            cbx = tg[jm, i] * tg[j, i]
            cby = tg[j, im] * tg[j, i]
            e -= terms["jx_x"][j, i] * bx + terms["jy_x"][j, i] * by
            e -= terms["jx_z"][j, i] * cbx + terms["jy_z"][j, i] * cby
            e -= terms["jx_y"][j, i] * bx * cbx
            e -= terms["jy_y"][j, i] * by * cby
    return e


def test_r8vm_brute_force_matches_hamiltonian():
    dis = random_disorder(g.ModelKind.R8VM, L, seed=4)
    n = L * L
    for bits in range(1 << (2 * n)):
        state = g.make_lattice(L, 2, 2, "plus")
        for s in range(2):
            for j in range(L):
                for i in range(L):
                    if (bits >> (s * n + j * L + i)) & 1:
                        state.spins[s, 0, j, i] = -1
        expected = _r8vm_energy(state.spins[0, 0], state.spins[1, 0],
                                dis.terms)
        assert g.total_energy(state, dis) == pytest.approx(expected,
                                                           rel=1e-12)
