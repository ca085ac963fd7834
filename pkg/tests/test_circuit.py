from fractions import Fraction

import pytest

import gaugemc as g
from gaugemc.circuit import (
    EFFECT_COLUMNS,
    PAULI_PAIRS,
    cnot_effect_table,
    emit_location_tables,
    marginalize_rates,
    propagate_pauli,
    reduce_to_rates,
    reduction_coefficients,
    single_qubit_effect_table,
)

from golden_tables import GOLDEN, PAIR_ORDER


def test_pair_order_matches_reference():
    assert PAULI_PAIRS == PAIR_ORDER


def test_all_cnot_tables_match_reference():
    tables = emit_location_tables()
    assert set(tables) == set(GOLDEN)
    mismatches = []
    for name, rows in tables.items():
        assert [label for label, _ in rows] == list(PAIR_ORDER)
        for label, effect in rows:
            want = GOLDEN[name][label]
            if str(effect) != want:
                mismatches.append((name, label, str(effect), want))
    assert mismatches == []


def test_two_qubit_effects_are_xor_of_singles():
    # a correlated pair must act like its two one-qubit parts combined
    circ = g.TorusCircuit()
    for stab, maker in (("vertex", circ.vertex_data),
                        ("face", circ.face_data)):
        for index in range(1, 5):
            data = maker(1, 1)[index - 1]
            anc = ("S", 1, 1) if stab == "vertex" else ("F", 1, 1)
            after = index + 1
            for label, effect in cnot_effect_table(stab, index):
                parts = [0] * 6
                for qubit, letter in zip((data, anc), label):
                    if letter == "I":
                        continue
                    single = circ.propagate({qubit: letter}, after)
                    parts = [a ^ b for a, b in zip(parts, single.bits)]
                assert list(effect.bits) == parts, (stab, index, label)


def test_effect_bits_are_translation_invariant():
    circ = g.TorusCircuit()
    base = circ.propagate({("h", 1, 1): "Y"}, 0)
    for a, b in ((0, 0), (2, 3), (3, 2)):
        assert circ.propagate({("h", a, b): "Y"}, 0).bits == base.bits


def test_single_qubit_table_shape():
    rows = single_qubit_effect_table()
    # 16 locations x 3 paulis
    assert len(rows) == 48
    names = {name for name, _, _ in rows}
    assert len(names) == 16
    for _, pauli, effect in rows:
        assert pauli in ("X", "Y", "Z")
        assert len(effect.bits) == len(EFFECT_COLUMNS)


def test_reduction_coefficients_exact():
    rpgm = reduction_coefficients(g.ModelKind.RPGM)
    assert rpgm == {"px_h": Fraction(88, 15), "px_v": Fraction(72, 15),
                    "q": Fraction(88, 15)}
    rcpgm = reduction_coefficients(g.ModelKind.RCPGM)
    assert rcpgm == {"px_h": Fraction(52, 15), "py_h": Fraction(36, 15),
                     "pz_h": Fraction(36, 15), "px_v": Fraction(36, 15),
                     "py_v": Fraction(36, 15), "pz_v": Fraction(52, 15),
                     "q": Fraction(88, 15)}


def test_marginalization_identity_is_exact():
    rcpgm = reduction_coefficients(g.ModelKind.RCPGM)
    rpgm = reduction_coefficients(g.ModelKind.RPGM)
    assert rcpgm["px_h"] + rcpgm["py_h"] == rpgm["px_h"]
    assert rcpgm["px_v"] + rcpgm["py_v"] == rpgm["px_v"]
    assert rcpgm["q"] == rpgm["q"]


def test_reduce_to_rates():
    p = 1.5e-3
    rates = reduce_to_rates(p, g.ModelKind.RCPGM)
    assert rates.px_h == pytest.approx(p * 52 / 15, rel=1e-12)
    assert rates.py_h == pytest.approx(p * 36 / 15, rel=1e-12)
    assert rates.pz_v == pytest.approx(p * 52 / 15, rel=1e-12)
    assert rates.q == pytest.approx(p * 88 / 15, rel=1e-12)
    merged = marginalize_rates(rates)
    uncoupled = reduce_to_rates(p, g.ModelKind.RPGM)
    assert merged.px_h == pytest.approx(uncoupled.px_h, rel=1e-12)
    assert merged.px_v == pytest.approx(uncoupled.px_v, rel=1e-12)
    assert merged.q == uncoupled.q
    assert merged.py_h == 0.0 and merged.pz_h == 0.0


def test_reduction_rejects_planar_targets():
    with pytest.raises(ValueError):
        reduction_coefficients(g.ModelKind.RBIM)


def test_propagate_validates_inputs():
    circ = g.TorusCircuit()
    with pytest.raises(ValueError):
        circ.propagate({("h", 0, 0): "X"}, 9)
    with pytest.raises(ValueError):
        circ.propagate({("nope", 0, 0): "X"}, 0)
    with pytest.raises(ValueError):
        circ.propagate({("h", 0, 0): "Q"}, 0)


def test_identity_injection_is_silent():
    assert propagate_pauli({}, 3).bits == (0, 0, 0, 0, 0, 0)


def test_stabilizer_injections_are_silent():
    # a full stabilizer before the round is invisible to every parity
    circ = g.TorusCircuit()
    vertex = {q: "Z" for q in circ.vertex_data(2, 1)}
    assert circ.propagate(vertex, 0).bits == (0, 0, 0, 0, 0, 0)
    face = {q: "X" for q in circ.face_data(1, 2)}
    assert circ.propagate(face, 0).bits == (0, 0, 0, 0, 0, 0)
