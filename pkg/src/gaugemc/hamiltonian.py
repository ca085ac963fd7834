"""Model energies on top of the compiled kernels.

Every model is a special case of one coupled-plaquette Hamiltonian: the RBIM
keeps only the sigma bonds of the 2D model, the R8VM adds the tau bonds and
the four-body couplers, the RPGM keeps the sigma sector of the 3D model and
the RCPGM is the full thing. Which terms exist is decided by the term keys
present in the DisorderConfig, so the kernels stay uniform.
"""
from __future__ import annotations

import numpy as np

from . import _kernels
from .couplings import DisorderConfig, ModelKind
from .lattice import LatticeState


def _zeros_like_grid(config: DisorderConfig) -> np.ndarray:
    return np.zeros((config.lsize,) * config.kind.dim, dtype=np.float64)


def _term_arrays_3d(config: DisorderConfig):
    t = config.terms
    z = _zeros_like_grid(config)
    return (t["jx_x"], t["jy_x"], t["jq_s"],
            t.get("jx_z", z), t.get("jy_z", z), t.get("jq_t", z),
            t.get("jx_y", z), t.get("jy_y", z))


def _term_arrays_2d(config: DisorderConfig):
    t = config.terms
    z = _zeros_like_grid(config)
    return (t["jx_x"], t["jy_x"], t.get("jx_z", z), t.get("jy_z", z),
            t.get("jx_y", z), t.get("jy_y", z))


def _check(state: LatticeState, config: DisorderConfig) -> None:
    kind = config.kind
    if state.dim != kind.dim or state.lsize != config.lsize:
        raise ValueError("state geometry does not match disorder config")
    if state.sublattices != kind.sublattices:
        raise ValueError(f"{kind.value} needs {kind.sublattices} sublattice(s)")


def total_energy(state: LatticeState, config: DisorderConfig) -> float:
    """Energy of the full Hamiltonian, H = -sum_terms J * (spin product).

    Per-site contributions are collected into an array and reduced with
    numpy's pairwise summation so the result does not depend on kernel
    loop blocking.
    """
    _check(state, config)
    out = _zeros_like_grid(config)
    has_y = "jx_y" in config.terms
    if config.kind.dim == 3:
        _kernels.site_energy_3d(state.spins, *_term_arrays_3d(config), has_y, out)
    else:
        _kernels.site_energy_2d(state.spins, *_term_arrays_2d(config), has_y, out)
    return float(np.sum(out))


def local_delta_energy(state: LatticeState, config: DisorderConfig,
                       sublattice: int, direction: int,
                       site: tuple[int, ...]) -> float:
    """Energy change if the spin (sublattice, direction, site) were flipped.

    site is (i, j, k) in 3D and (i, j) in 2D. In 2D only direction 0 carries
    a spin.
    """
    _check(state, config)
    has_y = "jx_y" in config.terms
    if config.kind.dim == 3:
        i, j, k = site
        return float(_kernels.delta_energy_3d(
            state.spins, *_term_arrays_3d(config), has_y,
            sublattice, direction, i, j, k))
    if direction != 0:
        raise ValueError("2D site models keep spins in direction slot 0")
    i, j = site
    return float(_kernels.delta_energy_2d(
        state.spins, *_term_arrays_2d(config), has_y, sublattice, i, j))


def metropolis_sweep(state: LatticeState, config: DisorderConfig, beta: float,
                     u: np.ndarray) -> int:
    """One deterministic Metropolis sweep given pre-drawn uniforms.

    u must hold one uniform per updatable spin, in scan order: that is
    sublattices * 3 * L^3 values in 3D and sublattices * L^2 in 2D.
    Returns the number of accepted flips.
    """
    _check(state, config)
    has_y = "jx_y" in config.terms
    if config.kind.dim == 3:
        n_upd = state.sublattices * 3 * state.lsize**3
        if u.shape != (n_upd,):
            raise ValueError(f"need {n_upd} uniforms, got {u.shape}")
        return int(_kernels.sweep_3d(state.spins, *_term_arrays_3d(config),
                                     has_y, beta, u))
    n_upd = state.sublattices * state.lsize**2
    if u.shape != (n_upd,):
        raise ValueError(f"need {n_upd} uniforms, got {u.shape}")
    return int(_kernels.sweep_2d(state.spins, *_term_arrays_2d(config),
                                 has_y, beta, u))


def sweep_uniform_count(kind: ModelKind, lsize: int) -> int:
    """Number of uniforms one Metropolis sweep consumes."""
    if kind.dim == 3:
        return kind.sublattices * 3 * lsize**3
    return kind.sublattices * lsize**2
