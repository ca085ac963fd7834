"""Quenched-disorder spin and gauge model Monte Carlo for decoding
thresholds.

Noise on a stabilizer code maps to a disordered statistical model whose
ordering transition along the Nishimori line marks the decoding threshold.
This package covers the four models of that family (2d bond models with
and without sublattice coupling, 3d plaquette gauge models with and
without it), samples their disorder, runs parallel tempering Monte Carlo,
measures Polyakov-line observables, reduces circuit-level depolarizing
noise to effective edge rates, and extrapolates finite-size transition
temperatures.
"""
from .analysis import (ScalingFit, TransitionEstimate, find_b3_zero_crossing,
                       find_chi_peak, fit_finite_size, nishimori_temperature,
                       threshold_verdict)
from .circuit import (FaultLocation, SyndromeEffect, TorusCircuit,
                      UnitCellCircuit, cnot_effect_table,
                      emit_location_tables, marginalize_rates,
                      propagate_pauli, reduce_to_rates,
                      reduction_coefficients, single_qubit_effect_table)
from .config import (ConfigError, RunConfig, RunRow, find_summaries,
                     load_sample_series, load_summary, parse_config,
                     run_config, save_sample_series, summary_to_dict,
                     write_summary)
from .couplings import (CouplingSet, DisorderConfig, ModelKind, NoiseRates,
                        TERM_KEYS, couplings_symmetric_depolarizing,
                        nishimori_bond_coupling, nishimori_coupling_set,
                        nishimori_syndrome_coupling, nishimori_vertex_couplings,
                        sample_disorder, uniform_disorder)
from .hamiltonian import (local_delta_energy, metropolis_sweep,
                          sweep_uniform_count, total_energy)
from .lattice import (LatticeState, gauge_transform, load_state, make_lattice,
                      save_state)
from .observables import (ObservableSeries, binder_u4, cumulant_b3,
                          disorder_average, jackknife, magnetization_2d,
                          mean_abs_polyakov, order_parameter, susceptibility)
from .ptmc import (ExperimentResult, RunParameters, SampleResult,
                   TemperatureLadder, attempt_swap, disorder_seed,
                   run_disorder_sample, run_experiment, tempering_ladder)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "CouplingSet", "DisorderConfig", "ExperimentResult",
    "FaultLocation", "LatticeState", "ModelKind", "NoiseRates",
    "ObservableSeries", "RunConfig", "RunParameters", "RunRow",
    "SampleResult", "ScalingFit", "SyndromeEffect", "TERM_KEYS",
    "TemperatureLadder", "TorusCircuit", "TransitionEstimate",
    "UnitCellCircuit", "attempt_swap",
    "binder_u4", "cnot_effect_table", "couplings_symmetric_depolarizing",
    "cumulant_b3", "disorder_average", "disorder_seed",
    "emit_location_tables", "find_b3_zero_crossing", "find_chi_peak",
    "find_summaries", "fit_finite_size", "gauge_transform", "jackknife",
    "load_sample_series", "load_state", "load_summary", "local_delta_energy",
    "magnetization_2d", "make_lattice", "marginalize_rates",
    "mean_abs_polyakov", "metropolis_sweep", "nishimori_bond_coupling",
    "nishimori_coupling_set", "nishimori_syndrome_coupling",
    "nishimori_temperature", "nishimori_vertex_couplings", "order_parameter",
    "parse_config", "propagate_pauli", "reduce_to_rates",
    "reduction_coefficients", "run_config", "run_disorder_sample",
    "run_experiment", "save_sample_series", "save_state", "sample_disorder",
    "single_qubit_effect_table", "summary_to_dict", "susceptibility",
    "sweep_uniform_count", "tempering_ladder", "threshold_verdict",
    "total_energy", "uniform_disorder", "write_summary",
]
