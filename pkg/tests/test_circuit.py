import math

import numpy as np
import pytest

from unipart.circuit import (
    Circuit,
    CircuitSyntaxError,
    Gate,
    compose,
    controlled_exp_pauli_circuit,
    exp_pauli_circuit,
    gate_count,
    inverse,
    measurement_circuit,
    parse_circuit,
    random_prep_circuit,
    serialize_circuit,
    unitary_group_circuit,
)
from unipart.dense import pauli_exponential, pauli_matrix
from unipart.pauli import PauliWord
from unipart.simulator import circuit_unitary
from unipart.unitary import UnitaryGroup, group_operator_matrix

from helpers import random_group, random_word


def controlled(u):
    dim = u.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = np.eye(dim)
    out[dim:, dim:] = u
    return out


def single(word, n):
    w = PauliWord.from_string(word, n)
    return UnitaryGroup((w,), (1.0,), 1.0, (math.pi / 2,))


def test_z0_is_single_rotation():
    c = exp_pauli_circuit(PauliWord.from_string("Z0"), 0.7)
    assert c.gates == [Gate("RZ", (0,), -0.7)]


def test_x0_basis_change():
    c = exp_pauli_circuit(PauliWord.from_string("X0"), 0.7)
    assert [g.kind for g in c.gates] == ["H", "RZ", "H"]


def test_y_basis_change():
    c = exp_pauli_circuit(PauliWord.from_string("Y0"), 0.3)
    assert c.gates[0] == Gate("RX", (0,), math.pi / 2)
    assert c.gates[-1] == Gate("RX", (0,), -math.pi / 2)


def test_identity_warns():
    with pytest.warns(UserWarning):
        assert len(exp_pauli_circuit(PauliWord.identity(2), 1.0)) == 0


@pytest.mark.parametrize("seed", range(20))
def test_exp_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    w = random_word(n, rng, allow_identity=False)
    theta = float(rng.uniform(-2 * math.pi, 2 * math.pi))
    u = circuit_unitary(exp_pauli_circuit(w, theta))
    assert np.max(np.abs(u - pauli_exponential(w, theta))) < 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_controlled_exp_is_block_diagonal(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(1, 5))
    w = random_word(n, rng, allow_identity=False)
    theta = float(rng.uniform(-math.pi, math.pi))
    u = circuit_unitary(controlled_exp_pauli_circuit(w, theta))
    assert np.max(np.abs(u - controlled(pauli_exponential(w, theta)))) < 1e-12


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5])
def test_cx_count(w):
    word = PauliWord.from_label("Z" * w)
    assert gate_count(exp_pauli_circuit(word, 0.1))["cx_count"] == 2 * (w - 1)


def test_single_x_group_circuits():
    g = single("X0", 1)
    np.testing.assert_allclose(circuit_unitary(unitary_group_circuit(g)), 1j * pauli_matrix(g.words[0]), atol=1e-14)
    np.testing.assert_allclose(
        circuit_unitary(unitary_group_circuit(g, controlled=True)), controlled(pauli_matrix(g.words[0])), atol=1e-14
    )


def test_random_group_circuits():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        g = random_group(n, int(rng.integers(1, min(8, 2 * n + 1) + 1)), rng)
        u = group_operator_matrix(g)
        cu = unitary_group_circuit(g, controlled=True)
        assert cu.entangler_count == 2 * len(g) - 1
        assert np.max(np.abs(circuit_unitary(cu) - controlled(u))) < 1e-12
        assert np.max(np.abs(circuit_unitary(unitary_group_circuit(g)) - 1j * u)) < 1e-12


def test_crz_count_in_controlled_group():
    rng = np.random.default_rng(8)
    g = random_group(3, 4, rng)
    c = unitary_group_circuit(g, controlled=True)
    assert sum(x.kind == "CRZ" for x in c.gates) == 7


def test_prep_then_inverse_is_identity():
    rng = np.random.default_rng(2)
    prep = random_prep_circuit(4, 25, rng, n_entanglers=3)
    u = circuit_unitary(compose(prep, inverse(prep)))
    np.testing.assert_allclose(u, np.eye(16), atol=1e-12)


def test_measurement_circuit_shape():
    c = measurement_circuit(single("Z0", 1))
    assert [g.kind for g in c.gates] == ["H", "CRZ", "PHASE", "H"]
    assert len(serialize_circuit(c).splitlines()) == 5
    assert c.ancilla == 1


def test_measurement_entanglers():
    rng = np.random.default_rng(3)
    g = random_group(3, 3, rng)
    prep = random_prep_circuit(3, 4, rng, n_entanglers=2)
    assert measurement_circuit(g, prep).entangler_count == 2 * 2 + 2 * 3 - 1


def test_prep_touching_ancilla_rejected():
    prep = Circuit(1, True, [Gate("H", (1,))])
    with pytest.raises(ValueError):
        measurement_circuit(single("Z0", 1), prep)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CX", (0, 0))
    with pytest.raises(ValueError):
        Gate("RZ", (0,))
    with pytest.raises(ValueError):
        Gate("H", (0,), 1.0)
    with pytest.raises(ValueError):
        Gate("FOO", (0,))
    with pytest.raises(ValueError):
        Gate("RZ", (0,), float("nan"))


def test_inverse_gates():
    assert Gate("S", (0,)).inverse() == Gate("SDG", (0,))
    assert Gate("RX", (0,), 0.5).inverse() == Gate("RX", (0,), -0.5)
    assert Gate("CX", (0, 1)).inverse() == Gate("CX", (0, 1))


def test_serialize_round_trip():
    rng = np.random.default_rng(11)
    g = random_group(3, 4, rng)
    c = measurement_circuit(g, random_prep_circuit(3, 10, rng, 1))
    text = serialize_circuit(c)
    back = parse_circuit(text)
    assert back.gates == c.gates and back.entangler_count == c.entangler_count
    assert serialize_circuit(back) == text


def test_parse_without_entanglers_and_comments():
    c = parse_circuit("# prep\ncircuit qubits=2 ancilla=0\nH 0\n\nCX 0 1\nRZ(0.25) 1\n")
    assert c.entangler_count == 0 and len(c) == 3


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("circuit qubits=2 ancilla=0\nH 0\nFOO 1\n", 3),
        ("circuit qubits=2 ancilla=0\nH 2\n", 2),
        ("circuit qubits=2 ancilla=0\nH a\n", 2),
        ("circuit qubits=2 ancilla=0\nRZ 0\n", 2),
        ("circuit qubits=2 ancilla=0\nRZ(x) 0\n", 2),
        ("gates\n", 1),
    ],
)
def test_parse_errors_report_line(text, lineno):
    with pytest.raises(CircuitSyntaxError) as info:
        parse_circuit(text)
    assert info.value.lineno == lineno


def test_parse_empty():
    with pytest.raises(CircuitSyntaxError):
        parse_circuit("# nothing\n")


def test_gate_count_depth():
    c = parse_circuit("circuit qubits=3 ancilla=0\nH 0\nH 1\nCX 0 1\nCX 1 2\n")
    gc = gate_count(c)
    assert gc["depth"] == 3 and gc["cx_count"] == 2 and gc["total_gates"] == 4


def test_random_prep_system_only():
    rng = np.random.default_rng(0)
    c = random_prep_circuit(3, 40, rng, 5)
    assert not c.has_ancilla and all(q < 3 for g in c.gates for q in g.qubits)
    assert c.entangler_count == 5
