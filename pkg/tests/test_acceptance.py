"""Top-level acceptance checks, one test per headline guarantee.

Each test states its numeric expectation and tolerance inline. The Monte
Carlo scans cache their aggregated tables under results/acceptance/ so a
green suite can be re-run quickly; delete that directory to force every
simulation to run from scratch. The two multi-hour scans carry the `slow`
marker and are excluded from the default run (select with `-m slow`).
"""
import json
import os
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

import gaugemc as g
from enumeration import exact_rpgm_averages
from gaugemc.cli import main
from golden_tables import GOLDEN, PAIR_ORDER
from helpers import ALL_KINDS, random_disorder, random_state

CACHE_DIR = Path(__file__).resolve().parent.parent / "results" / "acceptance"

pytestmark = pytest.mark.acceptance


def _cached(tag, build):
    """Memoize an aggregated scan table on disk as plain arrays."""
    path = CACHE_DIR / (tag + ".npz")
    if path.exists():
        with np.load(path) as data:
            return {key: data[key].copy() for key in data.files}
    out = build()
    CACHE_DIR.mkdir(parents=True, exist_ok=True)
    tmp = str(path) + ".tmp.npz"
    np.savez(tmp, **out)
    os.replace(tmp, path)
    return out


def _unit_couplings(kind):
    return g.CouplingSet(kind, {key: 1.0 for key in g.TERM_KEYS[kind]})


def _scan_table(kind, lsize, window, t_step, n_samples, master_seed, *,
                n_sweep, n_met, therm, p=0.0):
    """Run a temperature scan and return its disorder-averaged table."""
    params = g.RunParameters(n_sweep=n_sweep, n_met=n_met, t_step=t_step,
                             t_min=window[0], t_max=window[1],
                             therm_units=therm, bin_interval=2)
    rates = (g.NoiseRates.symmetric_depolarizing(p) if p > 0
             else g.NoiseRates())
    result = g.run_experiment(kind, lsize, params, _unit_couplings(kind),
                              rates, n_samples=n_samples,
                              master_seed=master_seed)
    out = {"temperatures": result.temperatures}
    out.update(result.table)
    return out


def _crossing(table):
    return g.find_b3_zero_crossing(table["temperatures"], table["b3"],
                                   table["b3_err"])


def test_cnot_effect_tables_bit_exact(capsys):
    # all 8 tables, 120 rows x 6 effect bits, in under a second
    t0 = time.perf_counter()
    assert main(["tables", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    elapsed = time.perf_counter() - t0
    mismatches = []
    for name, golden in GOLDEN.items():
        for label in PAIR_ORDER:
            if payload[name][label] != golden[label]:
                mismatches.append((name, label, payload[name][label]))
    assert mismatches == []
    assert sum(len(rows) for rows in payload.values()) == 120
    assert elapsed < 1.0


def test_reduction_rationals_exact():
    rpgm = g.reduction_coefficients(g.ModelKind.RPGM)
    assert rpgm["px_h"] == Fraction(88, 15)
    assert rpgm["q"] == Fraction(88, 15)
    rcpgm = g.reduction_coefficients(g.ModelKind.RCPGM)
    assert rcpgm["px_h"] == Fraction(52, 15)
    assert rcpgm["py_h"] == Fraction(36, 15)
    assert rcpgm["py_v"] == Fraction(36, 15)
    # marginalizing the Y edge rates into X reproduces the uncoupled model
    assert Fraction(52, 15) + Fraction(36, 15) == Fraction(88, 15)
    assert rcpgm["px_h"] + rcpgm["py_h"] == rpgm["px_h"]


def test_small_rpgm_mc_matches_exhaustive_enumeration():
    # 24 spins: every one of the 2^24 states is summed exactly, then the
    # sampler must land within 3 standard errors of that ground truth
    temps = [1.5, 2.0, 3.0]
    dis = random_disorder(g.ModelKind.RPGM, 2, seed=9)
    exact = exact_rpgm_averages(dis.terms, 2, temps)

    ladder = g.TemperatureLadder.from_temperatures(temps)
    params = g.RunParameters(n_sweep=6000, n_met=10, t_step=3, t_min=1.5,
                             t_max=3.0, therm_units=1500, bin_interval=1)
    n_streams = 12
    energy = np.empty((n_streams, len(temps)))
    order = np.empty((n_streams, len(temps)))
    for s in range(n_streams):
        res = g.run_disorder_sample(dis, params, master_seed=3000 + s,
                                    ladder=ladder)
        for t in range(len(res.temperatures)):
            energy[s, t] = res.series[t].mean_energy()
            order[s, t] = res.series[t].mean_order()
        temperatures = res.temperatures

    for column, reference, label in ((energy, exact["energy"], "energy"),
                                     (order, exact["abs_polyakov"], "order")):
        for t, temp in enumerate(temperatures):
            (slot,) = np.nonzero(np.isclose(exact["temperatures"], temp))
            mean = column[:, t].mean()
            se = column[:, t].std(ddof=1) / np.sqrt(n_streams)
            assert abs(mean - reference[slot[0]]) <= 3.0 * se, (
                f"{label} at T={temp}: mc {mean:.6f} vs exact "
                f"{reference[slot[0]]:.6f} (se {se:.6f})")


def test_pure_vertex_model_critical_point_within_5pct():
    # two-sublattice coupled 2d model at zero disorder; the exact critical
    # temperature is 4/ln 3
    runs = {
        16: ((3.60, 3.92), 9, dict(n_sweep=1200, n_met=10, therm=600)),
        32: ((3.56, 3.82), 9, dict(n_sweep=1200, n_met=10, therm=600)),
        64: ((3.58, 3.76), 8, dict(n_sweep=1000, n_met=10, therm=500)),
    }
    crossings, errors = [], []
    for lsize, (window, t_step, budget) in runs.items():
        table = _cached(f"r8vm_pure_L{lsize}",
                        lambda: _scan_table(g.ModelKind.R8VM, lsize, window,
                                            t_step, 4, 41000 + lsize,
                                            **budget))
        est = _crossing(table)
        assert est.found, f"no B3 crossing at L={lsize}"
        crossings.append(est.t_c)
        errors.append(est.t_c_err)

    fit = g.fit_finite_size(list(runs), crossings, errors)
    t_exact = 4.0 / np.log(3.0)
    assert abs(fit.t_inf - t_exact) <= 0.05 * t_exact, (
        f"extrapolated {fit.t_inf:.4f} +- {fit.t_inf_err:.4f} "
        f"vs exact {t_exact:.4f}")


def test_pure_ising_binder_critical_point_within_5pct():
    # single-sublattice 2d model at zero disorder; Binder-ratio crossings
    # of consecutive sizes against the exact 2/ln(1 + sqrt 2)
    window, t_step = (2.15, 2.45), 9

    def binder_curve(lsize):
        def build():
            params = g.RunParameters(n_sweep=1500, n_met=8, t_step=t_step,
                                     t_min=window[0], t_max=window[1],
                                     therm_units=600, bin_interval=2)
            result = g.run_experiment(g.ModelKind.RBIM, lsize, params,
                                      _unit_couplings(g.ModelKind.RBIM),
                                      g.NoiseRates(), n_samples=4,
                                      master_seed=42000 + lsize,
                                      keep_samples=True)
            u4 = np.array([[sample.series[t].u4()
                            for t in range(len(result.temperatures))]
                           for sample in result.samples])
            stats = [g.jackknife(u4[:, t]) for t in range(u4.shape[1])]
            return {"temperatures": result.temperatures,
                    "u4": np.array([s[0] for s in stats]),
                    "u4_err": np.array([s[1] for s in stats])}
        return _cached(f"rbim_pure_L{lsize}_binder", build)

    curves = {lsize: binder_curve(lsize) for lsize in (8, 16, 32)}
    t_exact = 2.0 / np.log(1.0 + np.sqrt(2.0))
    for small, large in ((8, 16), (16, 32)):
        diff = curves[small]["u4"] - curves[large]["u4"]
        err = np.hypot(curves[small]["u4_err"], curves[large]["u4_err"])
        est = g.find_b3_zero_crossing(curves[small]["temperatures"], diff,
                                      err)
        assert est.found, f"no Binder crossing for pair ({small}, {large})"
        assert abs(est.t_c - t_exact) <= 0.05 * t_exact, (
            f"pair ({small}, {large}): {est.t_c:.4f} +- {est.t_c_err:.4f} "
            f"vs exact {t_exact:.4f}")


@pytest.mark.slow
def test_pure_coupled_plaquette_transition_location():
    # 3d two-sublattice model, all couplings at unit strength, no disorder;
    # finite-size crossings must land within +-0.10 of 1.945
    runs = {
        8: ((1.82, 2.12), 12, 3, dict(n_sweep=700, n_met=20, therm=400)),
        12: ((1.82, 2.10), 12, 2, dict(n_sweep=600, n_met=20, therm=400)),
    }
    for lsize, (window, t_step, n_samples, budget) in runs.items():
        table = _cached(f"rcpgm_pure_L{lsize}",
                        lambda: _scan_table(g.ModelKind.RCPGM, lsize, window,
                                            t_step, n_samples, 5000 + lsize,
                                            **budget))
        est = _crossing(table)
        assert est.found, f"no B3 crossing at L={lsize}"
        assert abs(est.t_c - 1.945) <= 0.10, (
            f"L={lsize}: crossing {est.t_c:.4f} +- {est.t_c_err:.4f}")


@pytest.mark.slow
def test_coupled_plaquette_ordered_at_low_noise():
    # 4% symmetric depolarizing disorder keeps an ordering transition
    # inside the scanned window T in [1.45, 1.85]
    runs = {
        8: (10, 4, dict(n_sweep=700, n_met=20, therm=500)),
        12: (10, 3, dict(n_sweep=600, n_met=20, therm=500)),
    }
    for lsize, (t_step, n_samples, budget) in runs.items():
        table = _cached(f"rcpgm_p04_L{lsize}",
                        lambda: _scan_table(g.ModelKind.RCPGM, lsize,
                                            (1.45, 1.85), t_step, n_samples,
                                            6000 + lsize, p=0.04, **budget))
        est = _crossing(table)
        assert est.found, f"no B3 crossing at L={lsize}"
        assert 1.45 <= est.t_c <= 1.85


@pytest.mark.slow
def test_coupled_plaquette_disordered_at_high_noise():
    # at 9% the model must stay disordered: no B3 zero crossing anywhere
    # in the scanned range down to T = 0.35
    runs = {
        8: (14, 4, dict(n_sweep=700, n_met=20, therm=700)),
        12: (14, 2, dict(n_sweep=600, n_met=20, therm=700)),
    }
    for lsize, (t_step, n_samples, budget) in runs.items():
        table = _cached(f"rcpgm_p09_L{lsize}",
                        lambda: _scan_table(g.ModelKind.RCPGM, lsize,
                                            (0.35, 1.40), t_step, n_samples,
                                            7000 + lsize, p=0.09, **budget))
        est = _crossing(table)
        assert not est.found, (
            f"L={lsize}: unexpected crossing at {est.t_c:.4f}")


def test_fast_invariant_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240817)

    # gauge invariance of energy and Polyakov lines, 10^3 (state, site) pairs
    checked = 0
    for kind in (g.ModelKind.RPGM, g.ModelKind.RCPGM):
        dis = random_disorder(kind, 5, seed=2)
        for _ in range(10):
            state = g.make_lattice(5, 3, kind.sublattices, "random", rng)
            e_ref = g.total_energy(state, dis)
            p_ref = [g.mean_abs_polyakov(state, s)
                     for s in range(kind.sublattices)]
            for _ in range(50):
                site = tuple(int(x) for x in rng.integers(0, 5, size=3))
                sub = int(rng.integers(0, kind.sublattices))
                g.gauge_transform(state, site, sub)
                assert g.total_energy(state, dis) == e_ref
                assert [g.mean_abs_polyakov(state, s)
                        for s in range(kind.sublattices)] == p_ref
                checked += 1
    assert checked == 1000

    # single-flip energy deltas against full recomputation, 10^4 flips
    for kind in ALL_KINDS:
        dis = random_disorder(kind, 4, seed=3)
        state = g.make_lattice(4, kind.dim, kind.sublattices, "random", rng)
        e = g.total_energy(state, dis)
        for _ in range(2500):
            sub = int(rng.integers(0, kind.sublattices))
            direction = int(rng.integers(0, 3)) if kind.dim == 3 else 0
            site = tuple(int(x) for x in rng.integers(0, 4, size=kind.dim))
            de = g.local_delta_energy(state, dis, sub, direction, site)
            state.spins[(sub, direction) + site[::-1]] *= -1
            e_new = g.total_energy(state, dis)
            assert abs((e_new - e) - de) <= 1e-9
            e = e_new

    # ladder endpoints and the degenerate swap
    ladder = g.tempering_ladder(0.7, 2.9, 32)
    assert abs(ladder.betas[0] - 1.0 / 2.9) <= 1e-12
    assert abs(ladder.betas[-1] - 1.0 / 0.7) <= 1e-12
    assert g.attempt_swap(0.5, 1.0, -3.0, -3.0, 0.999999)

    # hand-computed observable fixtures
    assert g.susceptibility([0.2, 0.4]) == pytest.approx(0.01, abs=1e-15)
    assert g.cumulant_b3([0.0, 0.0, 0.3]) == pytest.approx(0.70711,
                                                           abs=1e-5)

    # bit-exact replay of a miniature run
    dis = random_disorder(g.ModelKind.RPGM, 3, seed=4)
    params = g.RunParameters(n_sweep=40, n_met=2, t_step=4, t_min=1.2,
                             t_max=2.4, therm_units=10, bin_interval=2)
    first = g.run_disorder_sample(dis, params, master_seed=99)
    again = g.run_disorder_sample(dis, params, master_seed=99)
    for s1, s2 in zip(first.series, again.series):
        assert np.array_equal(s1.order_param, s2.order_param)
        assert np.array_equal(s1.energy, s2.energy)

    assert time.perf_counter() - t0 < 60.0


def test_power_law_fit_recovery_and_coverage():
    t0 = time.perf_counter()
    sizes = np.array([8.0, 12.0, 16.0, 24.0, 32.0])
    truth = 1.2 + 0.5 * sizes ** -1.0

    fit = g.fit_finite_size(sizes, truth, tol=1e-9)
    assert fit.amplitude == pytest.approx(0.5, abs=1e-6)
    assert fit.exponent == pytest.approx(1.0, abs=1e-6)
    assert fit.t_inf == pytest.approx(1.2, abs=1e-6)

    rng = np.random.default_rng(808)
    sigma = 0.003
    hits = 0
    for _ in range(100):
        noisy = truth + rng.normal(0.0, sigma, size=sizes.size)
        noisy_fit = g.fit_finite_size(sizes, noisy, np.full(sizes.size,
                                                            sigma))
        hits += abs(noisy_fit.t_inf - 1.2) <= 3.0 * noisy_fit.t_inf_err
    assert hits >= 96
    assert time.perf_counter() - t0 < 10.0
