"""Run configuration and results layout.

A config holds one model, one noise source and a list of per-L run rows
(L, n_sweep, n_met, t_step, t_min, t_max). Executing it writes one
directory per (p, L) with a series file per disorder sample plus an
aggregate summary, which makes runs restartable: samples that already have
a series file are loaded instead of recomputed. Every output embeds the
config hash and master seed.
"""
from __future__ import annotations

import dataclasses
import glob
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import circuit
from .couplings import (CouplingSet, ModelKind, NoiseRates, TERM_KEYS,
                        couplings_symmetric_depolarizing,
                        nishimori_coupling_set, sample_disorder)
from .observables import ObservableSeries, disorder_average
from .ptmc import (ExperimentResult, RunParameters, SampleResult,
                   disorder_seed, resolve_workers, run_disorder_sample)

NOISE_TYPES = ("none", "depolarizing", "circuit", "rates")

_RATE_FIELDS = ("px_h", "py_h", "pz_h", "px_v", "py_v", "pz_v", "q")


class ConfigError(ValueError):
    """Schema violation carrying the offending field name."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _require(data: dict, name: str, kind, where: str = ""):
    label = f"{where}{name}"
    if name not in data:
        raise ConfigError(label, "missing required field")
    value = data[name]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(label, f"expected {kind.__name__}, got "
                                 f"{type(value).__name__}")
    return value


@dataclass(frozen=True)
class RunRow:
    """One (L, schedule) entry: L, N_sweep, N_met, T_step, T_min, T_max."""

    lsize: int
    n_sweep: int
    n_met: int
    t_step: int
    t_min: float
    t_max: float

    def validate(self, where: str = "") -> None:
        if self.lsize < 2:
            raise ConfigError(where + "lsize", "must be at least 2")
        for name in ("n_sweep", "n_met", "t_step"):
            if getattr(self, name) < 1:
                raise ConfigError(where + name, "must be positive")
        if self.t_step < 2:
            raise ConfigError(where + "t_step", "need at least 2 temperatures")
        if self.t_min <= 0:
            raise ConfigError(where + "t_min", "must be positive")
        if self.t_min >= self.t_max:
            raise ConfigError(where + "t_min", "t_min must be below t_max")


@dataclass(frozen=True)
class RunConfig:
    kind: str
    noise: dict
    rows: tuple
    n_samples: int = 50
    seed: int = 0
    out_dir: str = "results"
    convention: str = "normalized"
    therm_units: int = 10000
    bin_interval: int = 1
    observed_sublattice: int = 0

    def __post_init__(self):
        try:
            ModelKind(self.kind)
        except ValueError:
            raise ConfigError("model", f"unknown model '{self.kind}'") from None
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.noise, dict):
            raise ConfigError("noise", "must be an object with a 'type' key")
        noise_type = self.noise.get("type")
        if noise_type not in NOISE_TYPES:
            raise ConfigError("noise.type", f"must be one of {NOISE_TYPES}")
        if noise_type in ("depolarizing", "circuit"):
            p = self.noise.get("p")
            if not isinstance(p, (int, float)) or isinstance(p, bool):
                raise ConfigError("noise.p", "missing or non-numeric")
            if not 0 < p < 0.5:
                raise ConfigError("noise.p", "must lie in (0, 0.5)")
        if noise_type == "circuit" and self.model not in (ModelKind.RPGM,
                                                          ModelKind.RCPGM):
            raise ConfigError("noise.type",
                              "circuit reduction targets the 3d models")
        if noise_type == "rates":
            for key in self.noise:
                if key != "type" and key not in _RATE_FIELDS:
                    raise ConfigError(f"noise.{key}", "unknown rate field")
        if not self.rows:
            raise ConfigError("rows", "need at least one run row")
        for i, row in enumerate(self.rows):
            row.validate(f"rows[{i}].")
        sizes = [row.lsize for row in self.rows]
        if len(set(sizes)) != len(sizes):
            # the results layout keys series files on (p, L) alone
            raise ConfigError("rows", "duplicate lsize entries would share "
                                      "one results directory")
        if self.n_samples < 1:
            raise ConfigError("n_samples", "must be positive")
        if self.convention not in ("normalized", "unnormalized"):
            raise ConfigError("convention",
                              "must be 'normalized' or 'unnormalized'")
        if self.therm_units < 0:
            raise ConfigError("therm_units", "must be non-negative")
        if self.bin_interval < 1:
            raise ConfigError("bin_interval", "must be positive")
        for i, row in enumerate(self.rows):
            if row.n_sweep % self.bin_interval:
                raise ConfigError(f"rows[{i}].n_sweep",
                                  "bin_interval must divide n_sweep")

    @property
    def model(self) -> ModelKind:
        return ModelKind(self.kind)

    @property
    def normalized(self) -> bool:
        return self.convention == "normalized"

    @property
    def p(self) -> float:
        """Nominal noise strength (0 for pure and explicit-rate runs)."""
        return float(self.noise.get("p", 0.0))

    def rates(self) -> NoiseRates:
        noise_type = self.noise["type"]
        if noise_type == "none":
            return NoiseRates()
        if noise_type == "depolarizing":
            return NoiseRates.symmetric_depolarizing(self.noise["p"])
        if noise_type == "circuit":
            return circuit.reduce_to_rates(self.noise["p"], self.model)
        values = {k: float(self.noise.get(k, 0.0)) for k in _RATE_FIELDS}
        return NoiseRates(**values)

    def couplings(self) -> CouplingSet:
        noise_type = self.noise["type"]
        if noise_type == "none":
            values = {key: 1.0 for key in TERM_KEYS[self.model]}
            return CouplingSet(self.model, values, self.normalized)
        if noise_type == "depolarizing" and self.model is ModelKind.RCPGM:
            return couplings_symmetric_depolarizing(self.noise["p"],
                                                    self.normalized)
        return nishimori_coupling_set(self.model, self.rates(),
                                      self.normalized)

    def params(self, row: RunRow) -> RunParameters:
        return RunParameters(row.n_sweep, row.n_met, row.t_step, row.t_min,
                             row.t_max, self.therm_units, self.bin_interval)

    def row_dir(self, row: RunRow) -> str:
        return os.path.join(self.out_dir,
                            f"{self.kind}_p{self.p:g}_L{row.lsize}")

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["rows"] = [dataclasses.asdict(r) for r in self.rows]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        known = {f.name for f in dataclasses.fields(cls)} | {"model"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        kind = data.get("model", data.get("kind"))
        if not isinstance(kind, str):
            raise ConfigError("model", "missing model name")
        noise = _require(data, "noise", dict)
        raw_rows = _require(data, "rows", list)
        rows = []
        for i, entry in enumerate(raw_rows):
            if not isinstance(entry, dict):
                raise ConfigError(f"rows[{i}]", "must be an object")
            where = f"rows[{i}]."
            rows.append(RunRow(
                lsize=_require(entry, "lsize", int, where),
                n_sweep=_require(entry, "n_sweep", int, where),
                n_met=_require(entry, "n_met", int, where),
                t_step=_require(entry, "t_step", int, where),
                t_min=_require(entry, "t_min", float, where),
                t_max=_require(entry, "t_max", float, where)))
            extra = set(entry) - {"lsize", "n_sweep", "n_met", "t_step",
                                  "t_min", "t_max"}
            if extra:
                raise ConfigError(where + sorted(extra)[0], "unknown field")
        kwargs = dict(kind=kind, noise=noise, rows=tuple(rows))
        for name, typ in (("n_samples", int), ("seed", int),
                          ("out_dir", str), ("convention", str),
                          ("therm_units", int), ("bin_interval", int),
                          ("observed_sublattice", int)):
            if name in data:
                kwargs[name] = _require(data, name, typ)
        return cls(**kwargs)

    def to_json(self) -> str:
        data = self.to_dict()
        data["model"] = data.pop("kind")
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError("config", f"invalid JSON: {err}") from None
        return cls.from_dict(data)

    def save(self, path) -> None:
        with open(path, "w") as handle:
            handle.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as handle:
            return cls.from_json(handle.read())

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_seed(self, seed: int) -> "RunConfig":
        return dataclasses.replace(self, seed=seed)


def parse_config(text: str) -> RunConfig:
    return RunConfig.from_json(text)


# -- per-sample series files --

def save_sample_series(result: SampleResult, path, config_hash: str,
                       master_seed: int) -> None:
    order = np.stack([s.order_param for s in result.series])
    energy = np.stack([s.energy for s in result.series])
    meta = json.dumps(dict(config_hash=config_hash, master_seed=master_seed,
                           sample_index=result.sample_index,
                           bin_interval=result.series[0].bin_interval,
                           finished=result.finished))
    tmp = str(path) + ".tmp.npz"
    np.savez(tmp, meta=np.frombuffer(meta.encode(), dtype=np.uint8),
             temperatures=result.temperatures, order=order, energy=energy,
             met_acceptance=result.met_acceptance,
             swap_acceptance=result.swap_acceptance)
    os.replace(tmp, str(path))


def load_sample_series(path, expect_hash: str | None = None) -> SampleResult:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if expect_hash is not None and meta["config_hash"] != expect_hash:
            raise ValueError(f"{path}: series belongs to config "
                             f"{meta['config_hash']}, expected {expect_hash}")
        temps = data["temperatures"]
        series = [ObservableSeries(float(temps[i]), meta["bin_interval"],
                                   data["order"][i], data["energy"][i])
                  for i in range(temps.size)]
        return SampleResult(meta["sample_index"], temps, series,
                            data["met_acceptance"], data["swap_acceptance"],
                            meta["finished"])


def _row_sample_task(args):
    (config, row, idx, checkpoint_every) = args
    run_dir = config.row_dir(row)
    series_path = os.path.join(run_dir, f"sample{idx:04d}.npz")
    if os.path.exists(series_path):
        return load_sample_series(series_path, config.config_hash())
    disorder = sample_disorder(config.model, config.rates(),
                               config.couplings(), row.lsize,
                               disorder_seed(config.seed, idx))
    ckpt = os.path.join(run_dir, f"sample{idx:04d}.ckpt.npz")
    result = run_disorder_sample(disorder, config.params(row), config.seed,
                                 idx, config.observed_sublattice,
                                 checkpoint_path=ckpt,
                                 checkpoint_every=checkpoint_every)
    save_sample_series(result, series_path, config.config_hash(), config.seed)
    if os.path.exists(ckpt):
        os.remove(ckpt)
    return result


def run_config(config: RunConfig, n_workers: int | None = None,
               checkpoint_every: int = 500,
               pooled_moments: bool = False) -> list:
    """Execute every (row, sample) job, reusing any finished series files,
    and write one summary per row. Returns the ExperimentResults."""
    results = []
    workers = resolve_workers(n_workers)
    for row in config.rows:
        run_dir = config.row_dir(row)
        os.makedirs(run_dir, exist_ok=True)
        tasks = [(config, row, idx, checkpoint_every)
                 for idx in range(config.n_samples)]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                samples = list(pool.map(_row_sample_task, tasks))
        else:
            samples = [_row_sample_task(t) for t in tasks]
        samples.sort(key=lambda r: r.sample_index)
        params = config.params(row)
        temps = params.ladder().temperatures
        columns = ("order", "order_err", "energy", "energy_err", "chi",
                   "chi_err", "b3", "b3_err")
        table = {name: np.zeros(temps.size) for name in columns}
        for slot in range(temps.size):
            agg = disorder_average([s.series[slot] for s in samples],
                                   pooled_moments)
            for name in columns:
                table[name][slot] = agg[name]
        result = ExperimentResult(config.model, row.lsize, params,
                                  config.seed, config.n_samples, temps, table)
        write_summary(result, config, row,
                      os.path.join(run_dir, "summary.json"))
        results.append(result)
    return results


def summary_to_dict(result: ExperimentResult, config: RunConfig,
                    row: RunRow) -> dict:
    return {
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "master_seed": config.seed,
        "row": dataclasses.asdict(row),
        "n_samples": result.n_samples,
        "temperatures": [float(t) for t in result.temperatures],
        "table": {k: [float(x) for x in v] for k, v in result.table.items()},
    }


def write_summary(result: ExperimentResult, config: RunConfig, row: RunRow,
                  path) -> None:
    with open(path, "w") as handle:
        json.dump(summary_to_dict(result, config, row), handle, indent=2,
                  sort_keys=True)
        handle.write("\n")


def load_summary(path) -> dict:
    with open(path) as handle:
        record = json.load(handle)
    record["temperatures"] = np.asarray(record["temperatures"])
    record["table"] = {k: np.asarray(v) for k, v in record["table"].items()}
    return record


def find_summaries(paths) -> list:
    """Expand files/directories into summary.json paths, sorted."""
    found = []
    for path in paths:
        if os.path.isdir(path):
            found.extend(glob.glob(os.path.join(path, "**", "summary.json"),
                                   recursive=True))
        else:
            found.append(path)
    return sorted(set(found))
