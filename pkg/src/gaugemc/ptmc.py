"""Parallel tempering Monte Carlo over quenched disorder samples.

A run holds one replica per temperature of a geometric ladder. Each sweep
iteration performs n_met Metropolis lattice sweeps per replica, recomputes
the replica energies, then attempts one swap pass from the hottest pair
down to the coldest with acceptance min(1, exp((beta_k - beta_{k+1}) *
(E_k - E_{k+1}))). Thermalization runs therm_units * n_met plain Metropolis
sweeps per temperature first, without swaps or measurements.

Reproducibility: every random stream is derived from (master_seed,
sample_index, role) through numpy SeedSequence spawn keys, and each sweep
iteration consumes a fixed-shape block of uniforms, so reruns and resumed
runs replay bit for bit.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .couplings import (CouplingSet, DisorderConfig, ModelKind, NoiseRates,
                        sample_disorder)
from .hamiltonian import metropolis_sweep, sweep_uniform_count, total_energy
from .lattice import make_lattice
from .observables import ObservableSeries, disorder_average, order_parameter

# spawn-key roles for derived random streams
_ROLE_DISORDER = 0
_ROLE_SWEEP = 1
_ROLE_SWAP = 2
_ROLE_INIT = 3

_CKPT_VERSION = 1


@dataclass(frozen=True)
class TemperatureLadder:
    """Inverse temperatures in ascending order (hot to cold slots)."""

    t_min: float
    t_max: float
    n_steps: int
    betas: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_steps < 2:
            raise ValueError("need at least two temperatures")
        if not 0.0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if len(self.betas) != self.n_steps or np.any(np.diff(self.betas) <= 0):
            raise ValueError("betas must be ascending with n_steps entries")

    @property
    def temperatures(self) -> np.ndarray:
        return 1.0 / self.betas

    @classmethod
    def from_temperatures(cls, temps) -> "TemperatureLadder":
        """Explicit temperature list (not necessarily geometric)."""
        t = np.sort(np.asarray(temps, dtype=np.float64))[::-1]
        if t.size < 2 or np.any(np.diff(t) >= 0):
            raise ValueError("need at least two distinct temperatures")
        return cls(float(t[-1]), float(t[0]), int(t.size), 1.0 / t)


def tempering_ladder(t_min: float, t_max: float, n_steps: int) -> TemperatureLadder:
    """Geometric ladder: beta_0 = 1/t_max, beta_i = r beta_{i-1} with
    r = (t_max/t_min)^(1/(n_steps-1)), so beta_{n-1} = 1/t_min."""
    if not 0.0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    if n_steps < 2:
        raise ValueError("need at least two steps")
    r = (t_max / t_min) ** (1.0 / (n_steps - 1))
    betas = np.empty(n_steps, dtype=np.float64)
    betas[0] = 1.0 / t_max
    for i in range(1, n_steps):
        betas[i] = r * betas[i - 1]
    return TemperatureLadder(t_min, t_max, n_steps, betas)


def attempt_swap(beta_hot: float, beta_cold: float, e_hot: float,
                 e_cold: float, u: float) -> bool:
    """Replica exchange decision for one adjacent pair.

    Acceptance is min(1, exp((beta_hot - beta_cold) (e_hot - e_cold))) with
    physical energies, which satisfies detailed balance for the joint
    ensemble at the two temperatures.
    """
    ln_acc = (beta_hot - beta_cold) * (e_hot - e_cold)
    if ln_acc >= 0.0:
        return True
    return u < math.exp(ln_acc)


@dataclass(frozen=True)
class RunParameters:
    """Monte Carlo schedule for one run row."""

    n_sweep: int
    n_met: int
    t_step: int
    t_min: float
    t_max: float
    therm_units: int = 10000
    bin_interval: int = 1

    def __post_init__(self):
        if self.n_sweep < 1 or self.n_met < 1 or self.bin_interval < 1:
            raise ValueError("n_sweep, n_met and bin_interval must be positive")
        if self.therm_units < 0:
            raise ValueError("therm_units must be non-negative")
        if self.n_sweep % self.bin_interval:
            raise ValueError("bin_interval must divide n_sweep")

    def ladder(self) -> TemperatureLadder:
        return tempering_ladder(self.t_min, self.t_max, self.t_step)


@dataclass
class SampleResult:
    """Everything measured for one disorder sample."""

    sample_index: int
    temperatures: np.ndarray
    series: list[ObservableSeries]
    met_acceptance: np.ndarray
    swap_acceptance: np.ndarray
    finished: bool = True


def _spawned_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def disorder_seed(master_seed: int, sample_index: int) -> np.random.SeedSequence:
    """Seed sequence feeding sample_disorder for one sample index."""
    return np.random.SeedSequence(master_seed, spawn_key=(sample_index, _ROLE_DISORDER))


class _Runner:
    """Mutable PT state for one disorder sample, checkpointable mid-run."""

    def __init__(self, config: DisorderConfig, params: RunParameters,
                 master_seed: int, sample_index: int, observed_sublattice: int,
                 ladder: TemperatureLadder | None, init: str):
        self.config = config
        self.params = params
        self.master_seed = master_seed
        self.sample_index = sample_index
        self.observed = observed_sublattice
        self.ladder = ladder if ladder is not None else params.ladder()
        self.n_temps = self.ladder.n_steps
        self.n_upd = sweep_uniform_count(config.kind, config.lsize)
        self.n_bins = params.n_sweep // params.bin_interval

        kind = config.kind
        init_rng = _spawned_rng(master_seed, sample_index, _ROLE_INIT)
        self.states = [make_lattice(config.lsize, kind.dim, kind.sublattices,
                                    init, init_rng) for _ in range(self.n_temps)]
        self.rngs = [_spawned_rng(master_seed, sample_index, _ROLE_SWEEP, r)
                     for r in range(self.n_temps)]
        self.swap_rng = _spawned_rng(master_seed, sample_index, _ROLE_SWAP)

        self.step = 0
        self.bin_idx = 0
        self.met_accepted = np.zeros(self.n_temps, dtype=np.int64)
        self.met_attempted = np.zeros(self.n_temps, dtype=np.int64)
        self.swap_accepted = np.zeros(self.n_temps - 1, dtype=np.int64)
        self.swap_attempted = np.zeros(self.n_temps - 1, dtype=np.int64)
        self.order = np.zeros((self.n_temps, self.n_bins))
        self.energy = np.zeros((self.n_temps, self.n_bins))

    @property
    def total_steps(self) -> int:
        return self.params.therm_units + self.params.n_sweep

    def _met_block(self, slot: int, beta: float) -> None:
        u = self.rngs[slot].random((self.params.n_met, self.n_upd))
        for m in range(self.params.n_met):
            self.met_accepted[slot] += metropolis_sweep(
                self.states[slot], self.config, beta, u[m])
        self.met_attempted[slot] += self.params.n_met * self.n_upd

    def advance(self) -> None:
        """Run one global step (a thermalization unit or a sweep iteration)."""
        betas = self.ladder.betas
        if self.step < self.params.therm_units:
            for slot in range(self.n_temps):
                self._met_block(slot, betas[slot])
        else:
            for slot in range(self.n_temps):
                self._met_block(slot, betas[slot])
            energies = np.array([total_energy(s, self.config) for s in self.states])
            u_swap = self.swap_rng.random(self.n_temps - 1)
            for k in range(self.n_temps - 1):
                self.swap_attempted[k] += 1
                if attempt_swap(betas[k], betas[k + 1], energies[k],
                                energies[k + 1], u_swap[k]):
                    self.states[k], self.states[k + 1] = (self.states[k + 1],
                                                          self.states[k])
                    energies[k], energies[k + 1] = energies[k + 1], energies[k]
                    self.swap_accepted[k] += 1
            it = self.step - self.params.therm_units
            if (it + 1) % self.params.bin_interval == 0:
                for slot in range(self.n_temps):
                    self.order[slot, self.bin_idx] = order_parameter(
                        self.states[slot], self.observed)
                    self.energy[slot, self.bin_idx] = energies[slot]
                self.bin_idx += 1
        self.step += 1

    def result(self) -> SampleResult:
        finished = self.step == self.total_steps
        temps = self.ladder.temperatures
        series = [ObservableSeries(float(temps[slot]), self.params.bin_interval,
                                   self.order[slot, :self.bin_idx].copy(),
                                   self.energy[slot, :self.bin_idx].copy())
                  for slot in range(self.n_temps)]
        with np.errstate(invalid="ignore", divide="ignore"):
            met_rate = np.where(self.met_attempted > 0,
                                self.met_accepted / np.maximum(self.met_attempted, 1), 0.0)
            swap_rate = np.where(self.swap_attempted > 0,
                                 self.swap_accepted / np.maximum(self.swap_attempted, 1), 0.0)
        return SampleResult(self.sample_index, temps, series, met_rate,
                            swap_rate, finished)

    # -- checkpointing --

    def save(self, path) -> None:
        spins = np.stack([s.spins for s in self.states])
        rng_states = json.dumps([g.bit_generator.state for g in self.rngs]
                                + [self.swap_rng.bit_generator.state])
        meta = json.dumps(dict(
            version=_CKPT_VERSION, master_seed=self.master_seed,
            sample_index=self.sample_index, kind=self.config.kind.value,
            lsize=self.config.lsize, step=self.step, bin_idx=self.bin_idx,
            observed=self.observed,
            params=dict(n_sweep=self.params.n_sweep, n_met=self.params.n_met,
                        t_step=self.params.t_step, t_min=self.params.t_min,
                        t_max=self.params.t_max,
                        therm_units=self.params.therm_units,
                        bin_interval=self.params.bin_interval)))
        tmp = str(path) + ".tmp.npz"
        np.savez(tmp, meta=np.frombuffer(meta.encode(), dtype=np.uint8),
                 rng=np.frombuffer(rng_states.encode(), dtype=np.uint8),
                 spins=spins, betas=self.ladder.betas,
                 met_accepted=self.met_accepted, met_attempted=self.met_attempted,
                 swap_accepted=self.swap_accepted, swap_attempted=self.swap_attempted,
                 order=self.order, energy=self.energy)
        os.replace(tmp, str(path))

    def restore(self, path) -> bool:
        """Load a checkpoint if it matches this run. Returns True on success."""
        if not os.path.exists(path):
            return False
        with np.load(path) as data:
            meta = json.loads(bytes(data["meta"]).decode())
            if meta["version"] != _CKPT_VERSION:
                raise ValueError(f"unsupported checkpoint version {meta['version']}")
            same = (meta["master_seed"] == self.master_seed
                    and meta["sample_index"] == self.sample_index
                    and meta["kind"] == self.config.kind.value
                    and meta["lsize"] == self.config.lsize
                    and meta["observed"] == self.observed
                    and np.allclose(data["betas"], self.ladder.betas))
            params = meta["params"]
            for name in ("n_sweep", "n_met", "t_step", "t_min", "t_max",
                         "therm_units", "bin_interval"):
                same = same and params[name] == getattr(self.params, name)
            if not same:
                raise ValueError("checkpoint does not match this run")
            spins = data["spins"]
            for slot in range(self.n_temps):
                self.states[slot].spins[...] = spins[slot]
            rng_states = json.loads(bytes(data["rng"]).decode())
            for g, st in zip(self.rngs, rng_states[:-1]):
                g.bit_generator.state = st
            self.swap_rng.bit_generator.state = rng_states[-1]
            self.step = int(meta["step"])
            self.bin_idx = int(meta["bin_idx"])
            self.met_accepted[...] = data["met_accepted"]
            self.met_attempted[...] = data["met_attempted"]
            self.swap_accepted[...] = data["swap_accepted"]
            self.swap_attempted[...] = data["swap_attempted"]
            self.order[...] = data["order"]
            self.energy[...] = data["energy"]
        return True


def run_disorder_sample(config: DisorderConfig, params: RunParameters,
                        master_seed: int, sample_index: int = 0,
                        observed_sublattice: int = 0,
                        ladder: TemperatureLadder | None = None,
                        init: str = "plus",
                        checkpoint_path=None, checkpoint_every: int = 0,
                        max_steps: int | None = None) -> SampleResult:
    """Thermalize and measure one disorder sample.

    With checkpoint_path set, progress is saved every checkpoint_every
    global steps and on exit, and an existing matching checkpoint is resumed
    instead of starting over. max_steps bounds the steps taken in this call
    (the returned result has finished=False if work remains).
    """
    runner = _Runner(config, params, master_seed, sample_index,
                     observed_sublattice, ladder, init)
    if checkpoint_path is not None:
        runner.restore(checkpoint_path)
    taken = 0
    while runner.step < runner.total_steps:
        if max_steps is not None and taken >= max_steps:
            break
        runner.advance()
        taken += 1
        if (checkpoint_path is not None and checkpoint_every
                and runner.step % checkpoint_every == 0):
            runner.save(checkpoint_path)
    if checkpoint_path is not None and taken:
        runner.save(checkpoint_path)
    return runner.result()


@dataclass
class ExperimentResult:
    """Disorder-averaged observables for one (model, p, L) run."""

    kind: ModelKind
    lsize: int
    params: RunParameters
    master_seed: int
    n_samples: int
    temperatures: np.ndarray
    table: dict[str, np.ndarray]
    samples: list[SampleResult] | None = None


def _sample_task(args) -> SampleResult:
    (kind, rates, couplings, lsize, params, master_seed, idx, observed,
     ladder_temps, init, checkpoint_dir, checkpoint_every) = args
    config = sample_disorder(kind, rates, couplings, lsize,
                             disorder_seed(master_seed, idx))
    ladder = (TemperatureLadder.from_temperatures(ladder_temps)
              if ladder_temps is not None else None)
    ckpt = (os.path.join(checkpoint_dir, f"sample{idx:04d}.npz")
            if checkpoint_dir else None)
    return run_disorder_sample(config, params, master_seed, idx, observed,
                               ladder, init, ckpt, checkpoint_every)


def resolve_workers(n_workers: int | None) -> int:
    if n_workers is not None:
        return max(1, n_workers)
    return max(1, int(os.environ.get("GAUGEMC_WORKERS", "1")))


def run_experiment(kind: ModelKind, lsize: int, params: RunParameters,
                   couplings: CouplingSet, rates: NoiseRates | None = None,
                   n_samples: int = 50, master_seed: int = 0,
                   observed_sublattice: int = 0, pooled_moments: bool = False,
                   ladder: TemperatureLadder | None = None, init: str = "plus",
                   n_workers: int | None = None, checkpoint_dir=None,
                   checkpoint_every: int = 0,
                   keep_samples: bool = False) -> ExperimentResult:
    """Run n_samples disorder samples and average the observables.

    Samples are independent and may run in a process pool (n_workers, or the
    GAUGEMC_WORKERS environment variable). Results are deterministic for a
    given master_seed regardless of worker count.
    """
    if rates is None:
        rates = NoiseRates()
    if checkpoint_dir:
        os.makedirs(checkpoint_dir, exist_ok=True)
    ladder_temps = None if ladder is None else [float(t) for t in ladder.temperatures]
    tasks = [(kind, rates, couplings, lsize, params, master_seed, idx,
              observed_sublattice, ladder_temps, init, checkpoint_dir,
              checkpoint_every) for idx in range(n_samples)]
    workers = resolve_workers(n_workers)
    if workers > 1 and n_samples > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_task, tasks))
    else:
        results = [_sample_task(t) for t in tasks]

    results.sort(key=lambda r: r.sample_index)
    use_ladder = ladder if ladder is not None else params.ladder()
    temps = use_ladder.temperatures
    columns = ("order", "order_err", "energy", "energy_err", "chi", "chi_err",
               "b3", "b3_err")
    table = {name: np.zeros(use_ladder.n_steps) for name in columns}
    for slot in range(use_ladder.n_steps):
        agg = disorder_average([r.series[slot] for r in results], pooled_moments)
        for name in columns:
            table[name][slot] = agg[name]
    return ExperimentResult(kind, lsize, params, master_seed, n_samples,
                            temps, table, results if keep_samples else None)
