"""Reduction of circuit-level depolarizing noise to effective edge flip rates.

One syndrome-extraction round of the toric code runs an eight step schedule
on a torus of unit cells. Each cell holds a horizontal data qubit h(a,b), a
vertical data qubit v(a,b), a vertex ancilla measuring the X stabilizer and
a face ancilla measuring the Z stabilizer:

  step 0  prepare ancillas in |0>
  step 1  H on vertex ancillas (face ancillas idle)
  steps 2-5  CNOT order west, north, south, east for both stabilizer types;
             vertex ancilla is the control, face ancilla is the target
  step 6  H on vertex ancillas (face ancillas idle)
  step 7  measure ancillas in the Z basis

The vertex check at (a,b) touches h(a-1,b), v(a,b), v(a,b-1), h(a,b); the
face check at (a,b) touches v(a,b), h(a,b+1), h(a,b), v(a+1,b). With this
interleaving every data qubit is busy at steps 2-5 and idles at 0, 1, 6, 7.

Faults: after every one-qubit location (data idle, ancilla prep, H or idle,
measurement) one of X, Y, Z occurs with probability p/3 each; after every
CNOT one of the fifteen non-identity Pauli pairs occurs with probability
p/15 each. Pair labels put the data qubit first and the ancilla second.

A fault is summarized by six bits, the per-type parities of its footprint:
  i_z  X component left on horizontal data qubits at the end of the round
  j_z  X component left on vertical data qubits
  t_z  face (Z stabilizer) measurement flips during the fault round
  i_x  Z component left on vertical data qubits
  j_x  Z component left on horizontal data qubits
  t_x  vertex (X stabilizer) measurement flips during the fault round
Each parity tells whether the fault acts as a flip on one edge of that type
in the space-time decoding graph, so summing fault weights by bit pattern
gives the effective independent (or correlated) edge rates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .couplings import ModelKind, NoiseRates

PAULI_PAIRS = ("IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY",
               "YZ", "ZI", "ZX", "ZY", "ZZ")

EFFECT_COLUMNS = ("i_z", "j_z", "t_z", "i_x", "j_x", "t_x")

_ONE_QUBIT_STEPS = ((0, 0), (1, 1), (6, 6), (7, 6))


@dataclass(frozen=True)
class SyndromeEffect:
    """Per-type parity bits of a fault's space-time footprint."""

    i_z: int
    j_z: int
    t_z: int
    i_x: int
    j_x: int
    t_x: int

    @property
    def bits(self) -> tuple:
        return (self.i_z, self.j_z, self.t_z, self.i_x, self.j_x, self.t_x)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class FaultLocation:
    """One fault site in the schedule: qubits touched, injection time, and
    the probability (in units of p) of each individual Pauli fault there."""

    name: str
    qubits: tuple
    after_step: int
    weight: Fraction

    def faults(self):
        """Yield (label, {qubit: pauli}) for every non-identity fault."""
        if len(self.qubits) == 1:
            for pauli in "XYZ":
                yield pauli, {self.qubits[0]: pauli}
            return
        for pair in PAULI_PAIRS:
            inject = {q: p for q, p in zip(self.qubits, pair) if p != "I"}
            yield pair, inject


class _Frame:
    """Pauli frame as X and Z support sets over qubit keys."""

    def __init__(self):
        self.x = set()
        self.z = set()

    def inject(self, qubit, pauli: str) -> None:
        if pauli in ("X", "Y"):
            self.x ^= {qubit}
        if pauli in ("Z", "Y"):
            self.z ^= {qubit}

    def cnot(self, control, target) -> None:
        if control in self.x:
            self.x ^= {target}
        if target in self.z:
            self.z ^= {control}

    def hadamard(self, qubit) -> None:
        in_x, in_z = qubit in self.x, qubit in self.z
        if in_x != in_z:
            self.x ^= {qubit}
            self.z ^= {qubit}


class TorusCircuit:
    """One syndrome-extraction round on an l_cells x l_cells torus."""

    def __init__(self, l_cells: int = 4):
        if l_cells < 3:
            raise ValueError("need at least 3 cells per side")
        self.l_cells = l_cells
        cells = [(a, b) for a in range(l_cells) for b in range(l_cells)]
        self.h_qubits = [("h", a, b) for a, b in cells]
        self.v_qubits = [("v", a, b) for a, b in cells]
        self.vertex_ancillas = [("S", a, b) for a, b in cells]
        self.face_ancillas = [("F", a, b) for a, b in cells]

    def _wrap(self, a: int, b: int) -> tuple:
        return a % self.l_cells, b % self.l_cells

    def vertex_data(self, a: int, b: int) -> list:
        """Data qubits of the vertex check at (a,b) in CNOT order."""
        return [("h", *self._wrap(a - 1, b)), ("v", *self._wrap(a, b)),
                ("v", *self._wrap(a, b - 1)), ("h", *self._wrap(a, b))]

    def face_data(self, a: int, b: int) -> list:
        """Data qubits of the face check at (a,b) in CNOT order."""
        return [("v", *self._wrap(a, b)), ("h", *self._wrap(a, b + 1)),
                ("h", *self._wrap(a, b)), ("v", *self._wrap(a + 1, b))]

    def propagate(self, inject: dict, after_step: int) -> SyndromeEffect:
        """Run the round with Paulis injected after the given step and
        reduce the footprint to its six parity bits."""
        if not 0 <= after_step <= 6:
            raise ValueError("faults are injected after steps 0 to 6")
        known = set(self.h_qubits) | set(self.v_qubits)
        known.update(self.vertex_ancillas)
        known.update(self.face_ancillas)
        for qubit, pauli in inject.items():
            if qubit not in known:
                raise ValueError(f"unknown qubit {qubit!r}")
            if pauli not in ("X", "Y", "Z"):
                raise ValueError(f"pauli must be X, Y or Z, got {pauli!r}")
        frame = _Frame()
        if after_step == 0:
            self._apply_injection(frame, inject)
        for anc in self.vertex_ancillas:
            frame.hadamard(anc)
        if after_step == 1:
            self._apply_injection(frame, inject)
        for pos in range(4):
            step = pos + 2
            for a, b in itertools.product(range(self.l_cells), repeat=2):
                frame.cnot(("S", a, b), self.vertex_data(a, b)[pos])
                frame.cnot(self.face_data(a, b)[pos], ("F", a, b))
            if after_step == step:
                self._apply_injection(frame, inject)
        for anc in self.vertex_ancillas:
            frame.hadamard(anc)
        if after_step == 6:
            self._apply_injection(frame, inject)
        t_x = sum(anc in frame.x for anc in self.vertex_ancillas) & 1
        t_z = sum(anc in frame.x for anc in self.face_ancillas) & 1
        i_z = sum(q in frame.x for q in self.h_qubits) & 1
        j_z = sum(q in frame.x for q in self.v_qubits) & 1
        i_x = sum(q in frame.z for q in self.v_qubits) & 1
        j_x = sum(q in frame.z for q in self.h_qubits) & 1
        return SyndromeEffect(i_z, j_z, t_z, i_x, j_x, t_x)

    @staticmethod
    def _apply_injection(frame: _Frame, inject: dict) -> None:
        for qubit, pauli in inject.items():
            frame.inject(qubit, pauli)

    def cell_fault_locations(self, a: int = 1, b: int = 1) -> list:
        """All fault locations owned by one unit cell: 16 one-qubit sites
        and the 8 CNOTs of its vertex and face checks."""
        locs = []
        one_third = Fraction(1, 3)
        for qubit, tag in ((("h", a, b), "data-h"), (("v", a, b), "data-v"),
                           (("S", a, b), "vertex-anc"), (("F", a, b), "face-anc")):
            for label, after in _ONE_QUBIT_STEPS:
                locs.append(FaultLocation(f"{tag}-step{label}", (qubit,),
                                          after, one_third))
        fifteenth = Fraction(1, 15)
        for idx in range(4):
            locs.append(FaultLocation(
                f"CNOT{idx + 1}X",
                (self.vertex_data(a, b)[idx], ("S", a, b)), idx + 2, fifteenth))
            locs.append(FaultLocation(
                f"CNOT{idx + 1}Z",
                (self.face_data(a, b)[idx], ("F", a, b)), idx + 2, fifteenth))
        return locs


UnitCellCircuit = TorusCircuit


def propagate_pauli(inject: dict, after_step: int,
                    l_cells: int = 4) -> SyndromeEffect:
    """Effect bits of an explicit Pauli injection (qubit key -> X/Y/Z)."""
    return TorusCircuit(l_cells).propagate(inject, after_step)


def cnot_effect_table(stabilizer: str, index: int, l_cells: int = 4) -> list:
    """Rows (pair label, SyndromeEffect) for one CNOT, pairs in the fixed
    order IX..ZZ with the data qubit letter first."""
    if stabilizer not in ("vertex", "face"):
        raise ValueError("stabilizer must be 'vertex' or 'face'")
    if not 1 <= index <= 4:
        raise ValueError("CNOT index runs from 1 to 4")
    circ = TorusCircuit(l_cells)
    a = b = 1
    if stabilizer == "vertex":
        qubits = (circ.vertex_data(a, b)[index - 1], ("S", a, b))
    else:
        qubits = (circ.face_data(a, b)[index - 1], ("F", a, b))
    loc = FaultLocation(f"CNOT{index}", qubits, index + 1, Fraction(1, 15))
    return [(label, circ.propagate(inject, loc.after_step))
            for label, inject in loc.faults()]


def emit_location_tables(l_cells: int = 4) -> dict:
    """All eight CNOT effect tables keyed CNOT1X..CNOT4X, CNOT1Z..CNOT4Z."""
    tables = {}
    for idx in range(1, 5):
        tables[f"CNOT{idx}X"] = cnot_effect_table("vertex", idx, l_cells)
    for idx in range(1, 5):
        tables[f"CNOT{idx}Z"] = cnot_effect_table("face", idx, l_cells)
    return tables


def single_qubit_effect_table(l_cells: int = 4) -> list:
    """Rows (location name, pauli, SyndromeEffect) for the 16 one-qubit
    locations of a cell."""
    circ = TorusCircuit(l_cells)
    rows = []
    for loc in circ.cell_fault_locations():
        if len(loc.qubits) != 1:
            continue
        for label, inject in loc.faults():
            rows.append((loc.name, label, circ.propagate(inject, loc.after_step)))
    return rows


def reduction_coefficients(kind: ModelKind, l_cells: int = 4) -> dict:
    """Effective edge rates in units of p as exact fractions.

    The plaquette gauge model keys are the marginal flip rates of the Z
    decoding graph (px_h, px_v) plus the measurement rate q. The coupled
    model keys split the data rates by Pauli component, pairing the i_z and
    j_x parities on horizontal qubits (and j_z with i_x on vertical ones)
    so that the X+Y marginals reproduce the uncoupled rates exactly.
    """
    kind = ModelKind(kind)
    if kind not in (ModelKind.RPGM, ModelKind.RCPGM):
        raise ValueError("reduction targets the 3d models")
    circ = TorusCircuit(l_cells)
    keys = ("px_h", "py_h", "pz_h", "px_v", "py_v", "pz_v", "q", "q_x")
    acc = {key: Fraction(0) for key in keys}
    for loc in circ.cell_fault_locations():
        for _, inject in loc.faults():
            e = circ.propagate(inject, loc.after_step)
            w = loc.weight
            acc["px_h"] += w * int(e.i_z and not e.j_x)
            acc["py_h"] += w * int(e.i_z and e.j_x)
            acc["pz_h"] += w * int(e.j_x and not e.i_z)
            acc["px_v"] += w * int(e.j_z and not e.i_x)
            acc["py_v"] += w * int(e.j_z and e.i_x)
            acc["pz_v"] += w * int(e.i_x and not e.j_z)
            acc["q"] += w * e.t_z
            acc["q_x"] += w * e.t_x
    if acc["q"] != acc["q_x"]:
        raise AssertionError("measurement rates of the two sectors differ")
    if kind is ModelKind.RCPGM:
        return {k: acc[k] for k in keys[:7]}
    return {"px_h": acc["px_h"] + acc["py_h"],
            "px_v": acc["px_v"] + acc["py_v"],
            "q": acc["q"]}


def reduce_to_rates(p: float, kind: ModelKind, l_cells: int = 4) -> NoiseRates:
    """Effective NoiseRates at circuit depolarizing strength p."""
    kind = ModelKind(kind)
    coeff = reduction_coefficients(kind, l_cells)
    if kind is ModelKind.RCPGM:
        return NoiseRates(px_h=p * float(coeff["px_h"]),
                          py_h=p * float(coeff["py_h"]),
                          pz_h=p * float(coeff["pz_h"]),
                          px_v=p * float(coeff["px_v"]),
                          py_v=p * float(coeff["py_v"]),
                          pz_v=p * float(coeff["pz_v"]),
                          q=p * float(coeff["q"]))
    return NoiseRates(px_h=p * float(coeff["px_h"]),
                      px_v=p * float(coeff["px_v"]),
                      q=p * float(coeff["q"]))


def marginalize_rates(rates: NoiseRates) -> NoiseRates:
    """Collapse correlated component rates to the independent flip rates of
    the Z decoding graph (X and Y both flip it; Z drops out)."""
    return NoiseRates(px_h=rates.px_h + rates.py_h,
                      px_v=rates.px_v + rates.py_v,
                      q=rates.q)
