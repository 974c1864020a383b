"""Dense statevector simulation and the partitioned energy estimators.

Amplitudes are little-endian: qubit ``q`` is bit ``q`` of the basis index.
The ancilla of a measurement circuit is the highest qubit.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate, measurement_circuit
from .hamiltonian import QubitHamiltonian
from .dense import _I2, _X, _Y, _Z, pauli_matrix
from .pauli import PauliWord

__all__ = [
    "SimulationError",
    "Statevector",
    "MAX_QUBITS",
    "gate_matrix",
    "pauli_matrix",
    "circuit_unitary",
    "simulate",
    "pauli_expectation",
    "expectation_direct",
    "ancilla_probabilities",
    "estimate_energy_exact",
    "estimate_energy_sampled",
    "save_statevector",
    "load_statevector",
]

MAX_QUBITS = 20

_FIXED = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
}


class SimulationError(ValueError):
    pass


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> Statevector:
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> Statevector:
        return Statevector(self.n_qubits, self.amplitudes.copy())


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix acting on the target; for CX/CRZ the matrix applied when the control is 1."""
    k = gate.kind
    if k in _FIXED:
        return _FIXED[k]
    if k == "CX":
        return _X
    a = gate.angle
    if k == "RX":
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k in ("RZ", "CRZ"):
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])
    if k == "PHASE":
        return np.diag([1.0, np.exp(1j * a)])
    raise SimulationError(f"no matrix for gate kind {k}")


def _embed(gate: Gate, n: int) -> np.ndarray:
    """Full ``2**n`` matrix of one gate, built by Kronecker products."""
    def kron_at(ops: dict[int, np.ndarray]) -> np.ndarray:
        m = np.ones((1, 1), dtype=complex)
        for q in reversed(range(n)):
            m = np.kron(m, ops.get(q, _I2))
        return m

    u = gate_matrix(gate)
    if gate.control is None:
        return kron_at({gate.target: u})
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return kron_at({gate.control: p0}) + kron_at({gate.control: p1, gate.target: u})


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense matrix of a whole circuit by explicit matrix products (oracle use only)."""
    n = circuit.n_total
    if n > 12:
        raise SimulationError(f"dense circuit matrix limited to 12 qubits, got {n}")
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        u = _embed(g, n) @ u
    return u


def _apply_vectorized(psi: np.ndarray, gate: Gate, n: int) -> None:
    u = gate_matrix(gate)
    t = gate.target
    if gate.control is None:
        view = psi.reshape(-1, 2, 1 << t)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
        view[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1
        return
    c = gate.control
    hi, lo = max(c, t), min(c, t)
    view = psi.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    # axis 1 is qubit hi, axis 3 is qubit lo
    if c == hi:
        sub = view[:, 1]  # (-1, mid, 2, lo)
        a0 = sub[:, :, 0, :].copy()
        a1 = sub[:, :, 1, :]
        sub[:, :, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
        sub[:, :, 1, :] = u[1, 0] * a0 + u[1, 1] * a1
    else:
        sub = view[:, :, :, 1, :]  # (-1, 2, mid, lo)
        a0 = sub[:, 0].copy()
        a1 = sub[:, 1]
        sub[:, 0] = u[0, 0] * a0 + u[0, 1] * a1
        sub[:, 1] = u[1, 0] * a0 + u[1, 1] * a1


def _apply_reference(psi: np.ndarray, gate: Gate, n: int) -> None:
    u = gate_matrix(gate)
    tbit = 1 << gate.target
    cbit = 0 if gate.control is None else 1 << gate.control
    for i in range(1 << n):
        if i & tbit or (cbit and not i & cbit):
            continue
        j = i | tbit
        a0, a1 = psi[i], psi[j]
        psi[i] = u[0, 0] * a0 + u[0, 1] * a1
        psi[j] = u[1, 0] * a0 + u[1, 1] * a1


def simulate(
    circuit: Circuit,
    initial: Statevector | None = None,
    *,
    max_qubits: int = MAX_QUBITS,
    reference: bool = False,
) -> Statevector:
    """Apply the gates of ``circuit`` in order, starting from ``initial`` or ``|0...0>``.

    ``reference=True`` uses a plain per-amplitude loop, kept to cross-check
    the strided kernel.
    """
    n = circuit.n_total
    if n > max_qubits:
        raise SimulationError(f"circuit needs {n} qubits, simulator cap is {max_qubits}")
    if initial is None:
        state = Statevector.zero(n)
    else:
        if initial.n_qubits != n:
            raise SimulationError(f"initial state has {initial.n_qubits} qubits, circuit has {n}")
        state = initial.copy()
    apply = _apply_reference if reference else _apply_vectorized
    for g in circuit.gates:
        for q in g.qubits:
            if not 0 <= q < n:
                raise SimulationError(f"gate {g} addresses qubit {q} outside 0..{n - 1}")
        apply(state.amplitudes, g, n)
    return state


def _parity(v: np.ndarray) -> np.ndarray:
    return np.bitwise_count(v) & 1


def pauli_expectation(word: PauliWord, psi: np.ndarray) -> complex:
    """``<psi|P|psi>`` via ``P|b> = i**ny (-1)**|b & z| |b ^ x>``, acting on the low qubits."""
    idx = np.arange(psi.shape[0], dtype=np.uint64)
    sign = 1.0 - 2.0 * _parity(idx & np.uint64(word.z))
    flipped = idx ^ np.uint64(word.x)
    phase = 1j ** ((word.x & word.z).bit_count() % 4)
    return complex(phase * np.vdot(psi[flipped], sign * psi))


def expectation_direct(h: QubitHamiltonian, state: Statevector | np.ndarray) -> float:
    psi = state.amplitudes if isinstance(state, Statevector) else np.asarray(state)
    if psi.shape[0] != 1 << h.n_qubits:
        raise SimulationError(f"state dimension {psi.shape[0]} does not match {h.n_qubits} qubits")
    total = h.identity_offset
    for c, w in h.terms:
        total += c * pauli_expectation(w, psi).real
    return float(total)


def ancilla_probabilities(state: Statevector, ancilla: int | None = None) -> tuple[float, float]:
    """Probabilities of ancilla outcomes ``z_a = +1`` (bit 0) and ``z_a = -1`` (bit 1)."""
    if state.n_qubits < 2 and ancilla is None:
        raise SimulationError("state has no ancilla qubit")
    a = state.n_qubits - 1 if ancilla is None else ancilla
    probs = np.abs(state.amplitudes.reshape(-1, 2, 1 << a)) ** 2
    p_minus = float(probs[:, 1, :].sum())
    p_plus = float(probs[:, 0, :].sum())
    return p_plus, p_minus


def _check_groups(h: QubitHamiltonian, groups, tol: float = 1e-9) -> None:
    recon: dict[PauliWord, float] = {}
    for gr in groups:
        for c, w in zip(gr.coefficients, gr.words):
            if w in recon:
                raise ValueError(f"word {w} appears in more than one group")
            recon[w] = gr.d * c
    target = {w: c for c, w in h.terms}
    if recon.keys() != target.keys():
        raise ValueError("groups do not cover the Hamiltonian terms")
    for w, c in target.items():
        if abs(recon[w] - c) > tol * max(1.0, abs(c)):
            raise ValueError(f"group coefficients do not reproduce term {w}")


def _group_probabilities(h: QubitHamiltonian, groups, prep: Circuit | None) -> list[float]:
    if prep is None:
        prep = Circuit(h.n_qubits)
    if prep.n_system != h.n_qubits:
        raise SimulationError(f"prep acts on {prep.n_system} qubits, Hamiltonian on {h.n_qubits}")
    if h.n_qubits + 1 > MAX_QUBITS:
        raise SimulationError(f"{h.n_qubits} + 1 qubits exceeds the simulator cap of {MAX_QUBITS}")
    _check_groups(h, groups)
    return [ancilla_probabilities(simulate(measurement_circuit(gr, prep)))[0] for gr in groups]


def estimate_energy_exact(h: QubitHamiltonian, groups: Sequence, prep: Circuit | None = None) -> float:
    """Energy from exact ancilla statistics of each group's measurement circuit."""
    total = h.identity_offset
    for gr, p_plus in zip(groups, _group_probabilities(h, groups, prep)):
        total += gr.d * (2.0 * p_plus - 1.0)
    return float(total)


def estimate_energy_sampled(
    h: QubitHamiltonian,
    groups: Sequence,
    prep: Circuit | None = None,
    shots: int = 10_000,
    seed: int | None = None,
) -> tuple[float, float]:
    """Energy and standard error from ``shots`` binomial ancilla samples per group."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = np.random.default_rng(seed)
    energy = h.identity_offset
    var = 0.0
    for gr, p_plus in zip(groups, _group_probabilities(h, groups, prep)):
        k = rng.binomial(shots, min(max(p_plus, 0.0), 1.0))
        p_hat = k / shots
        energy += gr.d * (2.0 * p_hat - 1.0)
        var += gr.d**2 * 4.0 * p_hat * (1.0 - p_hat) / shots
    return float(energy), math.sqrt(var)


def save_statevector(path: str | Path, state: Statevector) -> None:
    """8-byte little-endian qubit count, then little-endian complex128 amplitudes."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", state.n_qubits))
        fh.write(state.amplitudes.astype("<c16").tobytes())


def load_statevector(path: str | Path) -> Statevector:
    data = Path(path).read_bytes()
    (n,) = struct.unpack("<Q", data[:8])
    amps = np.frombuffer(data[8:], dtype="<c16").astype(complex)
    if amps.shape[0] != 1 << n:
        raise SimulationError(f"file holds {amps.shape[0]} amplitudes, expected {1 << n}")
    return Statevector(n, amps)
