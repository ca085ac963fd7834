"""Nishimori couplings and quenched disorder sampling.

Maps error rates of a qubit noise model to coupling magnitudes of the
matching disordered spin model, and draws wrong-sign configurations.

Conventions. Rates are per data qubit and orientation: horizontal (x) qubits
carry (px_h, py_h, pz_h), vertical (y) qubits (px_v, py_v, pz_v), and q is
the syndrome bit-flip rate. Coupling magnitudes follow beta = 1 units; the
normalized convention instead rescales every magnitude by the sigma-sector
x coupling so temperature scans stay O(1).

Sign rule. On coupled models an error W on a qubit flips the two couplings
conjugate to W at that qubit (X flips J(Y) and J(Z), Y flips J(X) and J(Z),
Z flips J(X) and J(Y)); syndrome couplings flip independently with rate q on
each sublattice. On uncoupled models the single kept term per qubit flips
with the marginal rate px + py directly.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np


class ModelKind(str, Enum):
    RBIM = "rbim"
    R8VM = "r8vm"
    RPGM = "rpgm"
    RCPGM = "rcpgm"

    @property
    def dim(self) -> int:
        return 2 if self in (ModelKind.RBIM, ModelKind.R8VM) else 3

    @property
    def sublattices(self) -> int:
        return 2 if self in (ModelKind.R8VM, ModelKind.RCPGM) else 1

    @property
    def coupled(self) -> bool:
        return self.sublattices == 2

    @property
    def has_syndrome(self) -> bool:
        return self.dim == 3


# term keys used by DisorderConfig and the energy kernels, per model kind
TERM_KEYS = {
    ModelKind.RBIM: ("jx_x", "jy_x"),
    ModelKind.R8VM: ("jx_x", "jy_x", "jx_z", "jy_z", "jx_y", "jy_y"),
    ModelKind.RPGM: ("jx_x", "jy_x", "jq_s"),
    ModelKind.RCPGM: ("jx_x", "jy_x", "jq_s", "jx_z", "jy_z", "jq_t",
                      "jx_y", "jy_y"),
}


@dataclass(frozen=True)
class NoiseRates:
    """Error rates per qubit orientation plus the syndrome flip rate."""

    px_h: float = 0.0
    py_h: float = 0.0
    pz_h: float = 0.0
    px_v: float = 0.0
    py_v: float = 0.0
    pz_v: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 <= value < 1.0:
                raise ValueError(f"rate {name}={value} outside [0, 1)")
        for suffix in ("h", "v"):
            total = sum(getattr(self, f"p{w}_{suffix}") for w in "xyz")
            if total >= 1.0:
                raise ValueError(f"total {suffix}-qubit rate {total} >= 1")

    @classmethod
    def symmetric_depolarizing(cls, p: float) -> "NoiseRates":
        """Uniform depolarizing strength p split evenly, syndrome rate q = p."""
        w = p / 3.0
        return cls(w, w, w, w, w, w, p)

    @classmethod
    def independent_xz(cls, px: float, pz: float, q: float = 0.0) -> "NoiseRates":
        """Independent bit and phase flips give pr(Y) = px*pz on every qubit."""
        rx, ry, rz = px * (1 - pz), px * pz, pz * (1 - px)
        return cls(rx, ry, rz, rx, ry, rz, q)

    def marginal_flip(self, orientation: str) -> float:
        """Rate of any X-component error (X or Y) on one qubit orientation."""
        if orientation == "h":
            return self.px_h + self.py_h
        if orientation == "v":
            return self.px_v + self.py_v
        raise ValueError("orientation must be 'h' or 'v'")


def nishimori_bond_coupling(p: float) -> float:
    """Two-body coupling J with exp(-2J) = p/(1-p)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p={p} outside (0, 1)")
    return 0.5 * math.log((1.0 - p) / p)


def nishimori_syndrome_coupling(q: float) -> float:
    """Syndrome coupling |Jq| with exp(-2|Jq|) = q/(1-q)."""
    return nishimori_bond_coupling(q)


def nishimori_vertex_couplings(px: float, py: float, pz: float) -> tuple[float, float, float]:
    """Couplings (J_X, J_Y, J_Z) of the four-rate vertex condition.

    Solves exp(-4 J_W) = pr(X) pr(Y) pr(Z) / (pr(W)^2 pr(I)) for each W. The
    values can be zero or negative for strong noise (e.g. fully mixing
    px = py = pz = 1/4 gives all zeros); they are returned as-is.
    """
    p_id = 1.0 - px - py - pz
    if min(px, py, pz, p_id) <= 0.0:
        raise ValueError("vertex condition needs all four probabilities positive")
    out = []
    for w in (px, py, pz):
        arg = (px * py * pz) / (w * w * p_id)
        out.append(-0.25 * math.log(arg))
    return tuple(out)


@dataclass(frozen=True)
class CouplingSet:
    """Coupling magnitudes per term key, plus the normalization convention."""

    kind: ModelKind
    values: dict[str, float]
    normalized: bool = False

    def __post_init__(self):
        keys = TERM_KEYS[self.kind]
        missing = set(keys) - set(self.values)
        extra = set(self.values) - set(keys)
        if missing or extra:
            raise ValueError(f"coupling keys mismatch: missing {missing}, extra {extra}")

    def __getitem__(self, key: str) -> float:
        return self.values[key]


def couplings_symmetric_depolarizing(p: float, normalized: bool = True) -> CouplingSet:
    """RCPGM couplings for uniform depolarizing noise of strength p.

    All six plaquette couplings share Jx = -(1/4) ln(p / (3 (1-p))) and the
    syndrome couplings obey |Jq| = 2 Jx - (1/2) ln 3. Normalized mode divides
    by Jx, so the plaquette couplings are 1 and Jq = 2 - (1/2) ln 3 for any p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p={p} outside (0, 1)")
    if normalized:
        jx, jq = 1.0, 2.0 - 0.5 * math.log(3.0)
    else:
        jx = -0.25 * math.log(p / (3.0 * (1.0 - p)))
        jq = 2.0 * jx - 0.5 * math.log(3.0)
    values = dict(jx_x=jx, jy_x=jx, jx_z=jx, jy_z=jx, jx_y=jx, jy_y=jx,
                  jq_s=jq, jq_t=jq)
    return CouplingSet(ModelKind.RCPGM, values, normalized)


def nishimori_coupling_set(kind: ModelKind, rates: NoiseRates,
                           normalized: bool = False) -> CouplingSet:
    """Coupling magnitudes for any model kind at the Nishimori point.

    Coupled kinds use the vertex condition per orientation, uncoupled kinds
    the bond condition on the marginal flip rates. Normalized mode divides
    everything by the sigma-sector x coupling jx_x.
    """
    values: dict[str, float] = {}
    if kind.coupled:
        jh = nishimori_vertex_couplings(rates.px_h, rates.py_h, rates.pz_h)
        jv = nishimori_vertex_couplings(rates.px_v, rates.py_v, rates.pz_v)
        values["jx_x"], values["jx_y"], values["jx_z"] = jh
        values["jy_x"], values["jy_y"], values["jy_z"] = jv
    else:
        values["jx_x"] = nishimori_bond_coupling(rates.marginal_flip("h"))
        values["jy_x"] = nishimori_bond_coupling(rates.marginal_flip("v"))
    if kind.has_syndrome:
        jq = nishimori_syndrome_coupling(rates.q)
        values["jq_s"] = jq
        if kind.sublattices == 2:
            values["jq_t"] = jq
    if normalized:
        scale = values["jx_x"]
        if scale == 0.0:
            raise ValueError("cannot normalize: jx_x is zero")
        values = {k: v / scale for k, v in values.items()}
    return CouplingSet(kind, values, normalized)


@dataclass
class DisorderConfig:
    """One quenched sample: signed coupling arrays per term key.

    Each array is shaped like the site grid ((L, L) in 2D, (L, L, L) in 3D
    with axes (k, j, i)) and holds magnitude times sign.
    """

    kind: ModelKind
    lsize: int
    couplings: CouplingSet
    terms: dict[str, np.ndarray] = field(repr=False, default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        shape = (self.lsize,) * self.kind.dim
        for key in TERM_KEYS[self.kind]:
            if key not in self.terms:
                raise ValueError(f"missing term array {key}")
            if self.terms[key].shape != shape:
                raise ValueError(f"term {key} has shape {self.terms[key].shape}, want {shape}")

    def wrong_sign_fraction(self, key: str) -> float:
        return float(np.mean(self.terms[key] * self.couplings[key] < 0))


# conjugate-term keys flipped by each Pauli, per orientation
_CONJUGATE = {
    "h": {0: ("jx_y", "jx_z"), 1: ("jx_x", "jx_z"), 2: ("jx_x", "jx_y")},
    "v": {0: ("jy_y", "jy_z"), 1: ("jy_x", "jy_z"), 2: ("jy_x", "jy_y")},
}


def sample_disorder(kind: ModelKind, rates: NoiseRates, couplings: CouplingSet,
                    lsize: int, seed) -> DisorderConfig:
    """Draw one wrong-sign configuration.

    The draw order is fixed so a given seed always yields the same sample:
    one uniform per (site, orientation) over sites in (k, j, i) flat order
    with orientation x then y, then one uniform per site for the sigma
    syndrome couplings, then one per site for tau. Unused draws for absent
    terms are still consumed, keeping streams aligned across model kinds.
    """
    if couplings.kind != kind:
        raise ValueError("coupling set kind does not match")
    rng = np.random.default_rng(seed)
    dim = kind.dim
    shape = (lsize,) * dim
    n_sites = lsize**dim

    signs = {key: np.ones(shape, dtype=np.float64) for key in TERM_KEYS[kind]}
    u_qubit = rng.random((n_sites, 2)).reshape(shape + (2,))
    for axis, orientation in enumerate(("h", "v")):
        u = u_qubit[..., axis]
        if kind.coupled:
            px, py, pz = (getattr(rates, f"p{w}_{orientation}") for w in "xyz")
            pauli = np.full(shape, -1, dtype=np.int8)
            pauli[u < px + py + pz] = 2
            pauli[u < px + py] = 1
            pauli[u < px] = 0
            for w in range(3):
                mask = pauli == w
                for key in _CONJUGATE[orientation][w]:
                    signs[key][mask] *= -1.0
        else:
            key = "jx_x" if orientation == "h" else "jy_x"
            signs[key][u < rates.marginal_flip(orientation)] = -1.0

    u_qs = rng.random(n_sites).reshape(shape)
    u_qt = rng.random(n_sites).reshape(shape)
    if kind.has_syndrome:
        signs["jq_s"][u_qs < rates.q] = -1.0
        if "jq_t" in signs:
            signs["jq_t"][u_qt < rates.q] = -1.0

    terms = {key: couplings[key] * signs[key] for key in TERM_KEYS[kind]}
    seed_int = seed if isinstance(seed, int) else None
    return DisorderConfig(kind, lsize, couplings, terms, seed_int)


def uniform_disorder(kind: ModelKind, lsize: int, couplings: CouplingSet | None = None,
                     value: float = 1.0) -> DisorderConfig:
    """Disorder-free configuration: every term at +magnitude.

    With no coupling set given, all magnitudes are `value` (the pure-model
    convention, e.g. the p = 0 axis).
    """
    if couplings is None:
        values = {key: value for key in TERM_KEYS[kind]}
        couplings = CouplingSet(kind, values)
    shape = (lsize,) * kind.dim
    terms = {key: np.full(shape, couplings[key], dtype=np.float64)
             for key in TERM_KEYS[kind]}
    return DisorderConfig(kind, lsize, couplings, terms, None)


def save_disorder(config: DisorderConfig, path) -> None:
    """Serialize a disorder sample to an .npz with a JSON header entry."""
    header = dict(kind=config.kind.value, lsize=config.lsize,
                  normalized=config.couplings.normalized,
                  magnitudes=config.couplings.values, seed=config.seed)
    buf = io.BytesIO()
    np.savez(buf, header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
             **config.terms)
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_disorder(path) -> DisorderConfig:
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        kind = ModelKind(header["kind"])
        terms = {key: data[key] for key in TERM_KEYS[kind]}
    couplings = CouplingSet(kind, header["magnitudes"], header["normalized"])
    return DisorderConfig(kind, header["lsize"], couplings, terms, header["seed"])
