"""Periodic lattice spin containers and checkpoint serialization.

Spins live on a hypercubic lattice with periodic boundaries. The container
always allocates one +/-1 spin per (sublattice, direction, site) even when a
model only uses a subset: 3D gauge models use all three direction slots as
link variables, 2D site models keep one spin per site in the x-direction slot
and leave the y slot frozen at +1. The flat index order is
(sublattice, direction, k, j, i) with i fastest, which is also the bit order
of the packed checkpoint payload.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

DIRECTIONS_3D = ("x", "y", "t")
DIRECTIONS_2D = ("x", "y")

# checkpoint header: magic, version, lsize, dim, sublattices, seed, sweep
_MAGIC = b"GMCS"
_VERSION = 1
_HEADER = struct.Struct("<4sIIIIQQ")


@dataclass
class LatticeState:
    """Spin container for one replica.

    spins has shape (sublattices, dim, L, ..., L) with entries +1 or -1,
    dtype int8. Spatial axes are ordered (k, j, i) in 3D and (j, i) in 2D.
    """

    lsize: int
    dim: int
    sublattices: int
    spins: np.ndarray

    def __post_init__(self):
        expected = (self.sublattices, self.dim) + (self.lsize,) * self.dim
        if self.spins.shape != expected:
            raise ValueError(f"spin array shape {self.spins.shape} != {expected}")
        if self.spins.dtype != np.int8:
            raise ValueError("spins must be int8")

    @property
    def n_spins(self) -> int:
        return self.spins.size

    def copy(self) -> "LatticeState":
        return LatticeState(self.lsize, self.dim, self.sublattices, self.spins.copy())


def make_lattice(lsize: int, dim: int, sublattices: int, init: str = "plus",
                 rng: np.random.Generator | None = None) -> LatticeState:
    """Build a lattice state, either all-plus or with random +/-1 spins.

    Random init draws in flat index order from rng. For dim == 2 only the
    x-direction slot is randomized; site models never touch the y slot.
    """
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if lsize < 2:
        raise ValueError("lsize must be at least 2")
    if sublattices not in (1, 2):
        raise ValueError("sublattices must be 1 or 2")
    shape = (sublattices, dim) + (lsize,) * dim
    spins = np.ones(shape, dtype=np.int8)
    if init == "plus":
        pass
    elif init == "random":
        if rng is None:
            raise ValueError("random init needs an rng")
        if dim == 2:
            draw = rng.random((sublattices, 1) + (lsize,) * dim)
            spins[:, :1] = np.where(draw < 0.5, 1, -1).astype(np.int8)
        else:
            draw = rng.random(shape)
            spins = np.where(draw < 0.5, 1, -1).astype(np.int8)
    else:
        raise ValueError(f"unknown init {init!r}")
    return LatticeState(lsize, dim, sublattices, spins)


def gauge_transform(state: LatticeState, site: tuple[int, int, int],
                    sublattice: int = 0) -> None:
    """Flip the six links of one sublattice that touch a 3D site, in place.

    This is the local Z2 gauge move: outgoing x, y, t links at the site and
    the incoming ones from the three negative neighbors. Plaquette products
    and Polyakov lines are invariant under it.
    """
    if state.dim != 3:
        raise ValueError("gauge_transform is defined for dim == 3 only")
    L = state.lsize
    i, j, k = (c % L for c in site)
    s = state.spins[sublattice]
    s[0, k, j, i] = -s[0, k, j, i]
    s[1, k, j, i] = -s[1, k, j, i]
    s[2, k, j, i] = -s[2, k, j, i]
    s[0, k, j, (i - 1) % L] = -s[0, k, j, (i - 1) % L]
    s[1, k, (j - 1) % L, i] = -s[1, k, (j - 1) % L, i]
    s[2, (k - 1) % L, j, i] = -s[2, (k - 1) % L, j, i]


def save_state(state: LatticeState, path, seed: int = 0, sweep: int = 0) -> None:
    """Write a versioned little-endian checkpoint of one lattice state."""
    bits = (state.spins.reshape(-1) > 0).astype(np.uint8)
    payload = np.packbits(bits, bitorder="little").tobytes()
    header = _HEADER.pack(_MAGIC, _VERSION, state.lsize, state.dim,
                          state.sublattices, seed, sweep)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_state(path) -> tuple[LatticeState, int, int]:
    """Read a checkpoint written by save_state. Returns (state, seed, sweep)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError("checkpoint truncated")
    magic, version, lsize, dim, sublattices, seed, sweep = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError("bad checkpoint magic")
    if version != _VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    n_spins = sublattices * dim * lsize**dim
    n_bytes = (n_spins + 7) // 8
    payload = raw[_HEADER.size:_HEADER.size + n_bytes]
    if len(payload) != n_bytes:
        raise ValueError("checkpoint payload truncated")
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8),
                         count=n_spins, bitorder="little")
    spins = np.where(bits > 0, 1, -1).astype(np.int8)
    shape = (sublattices, dim) + (lsize,) * dim
    state = LatticeState(lsize, dim, sublattices, spins.reshape(shape))
    return state, seed, sweep
