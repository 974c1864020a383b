"""Measurement circuit synthesis and the circuit text format.

Conventions: ``RZ(a) = diag(exp(-ia/2), exp(ia/2))``, ``RX(a) = exp(-ia X/2)``,
``PHASE(a) = diag(1, exp(ia))``. ``CX`` and ``CRZ`` list control first.
The ancilla is qubit ``n_system`` and is written ``a`` in text form.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .pauli import PauliWord
from .unitary import DECOMPOSITION_PHASE, UnitaryGroup

__all__ = [
    "CircuitSyntaxError",
    "Gate",
    "Circuit",
    "exp_pauli_circuit",
    "controlled_exp_pauli_circuit",
    "unitary_group_circuit",
    "measurement_circuit",
    "inverse",
    "compose",
    "gate_count",
    "serialize_circuit",
    "parse_circuit",
    "load_circuit",
    "random_prep_circuit",
]

_ONE_QUBIT = {"H", "X", "Y", "Z", "S", "SDG"}
_ONE_QUBIT_ANGLE = {"RX", "RZ", "PHASE"}
_TWO_QUBIT = {"CX"}
_TWO_QUBIT_ANGLE = {"CRZ"}
_KINDS = _ONE_QUBIT | _ONE_QUBIT_ANGLE | _TWO_QUBIT | _TWO_QUBIT_ANGLE
_SELF_INVERSE = {"H", "X", "Y", "Z", "CX"}


class CircuitSyntaxError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in _TWO_QUBIT | _TWO_QUBIT_ANGLE else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} control and target coincide")
        needs_angle = self.kind in _ONE_QUBIT_ANGLE | _TWO_QUBIT_ANGLE
        if needs_angle != (self.angle is not None):
            raise ValueError(f"{self.kind} {'requires' if needs_angle else 'takes no'} angle")
        if needs_angle and not math.isfinite(self.angle):
            raise ValueError(f"non-finite angle {self.angle}")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def control(self) -> int | None:
        return self.qubits[0] if len(self.qubits) == 2 else None

    def inverse(self) -> Gate:
        if self.kind in _SELF_INVERSE:
            return self
        if self.kind == "S":
            return Gate("SDG", self.qubits)
        if self.kind == "SDG":
            return Gate("S", self.qubits)
        return Gate(self.kind, self.qubits, -self.angle)


@dataclass
class Circuit:
    n_system: int
    has_ancilla: bool = False
    gates: list[Gate] = field(default_factory=list)
    entangler_count: int = 0

    @property
    def n_total(self) -> int:
        return self.n_system + int(self.has_ancilla)

    @property
    def ancilla(self) -> int:
        if not self.has_ancilla:
            raise ValueError("circuit has no ancilla")
        return self.n_system

    def touches_ancilla(self) -> bool:
        return any(self.n_system in g.qubits for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)


def _basis_in(factor: str, q: int) -> list[Gate]:
    if factor == "X":
        return [Gate("H", (q,))]
    if factor == "Y":
        return [Gate("RX", (q,), math.pi / 2)]
    return []


def _basis_out(factor: str, q: int) -> list[Gate]:
    if factor == "X":
        return [Gate("H", (q,))]
    if factor == "Y":
        return [Gate("RX", (q,), -math.pi / 2)]
    return []


def _exp_gates(p: PauliWord, theta: float, ancilla: int | None) -> list[Gate]:
    factors = p.factors()
    support = list(factors)
    pre = [g for q, s in factors.items() for g in _basis_in(s, q)]
    post = [g for q, s in factors.items() for g in _basis_out(s, q)]
    ladder = [Gate("CX", (a, b)) for a, b in zip(support, support[1:])]
    last = support[-1]
    rot = Gate("RZ", (last,), -theta) if ancilla is None else Gate("CRZ", (ancilla, last), -theta)
    return pre + ladder + [rot] + ladder[::-1] + post


def exp_pauli_circuit(p: PauliWord, theta: float) -> Circuit:
    """Circuit realizing ``exp(i theta p / 2)`` on the system register."""
    if p.is_identity:
        warnings.warn("exponential of the identity is a global phase; emitting no gates", stacklevel=2)
        return Circuit(p.n_qubits)
    return Circuit(p.n_qubits, False, _exp_gates(p, theta, None), 1)


def controlled_exp_pauli_circuit(p: PauliWord, theta: float, ancilla: int | None = None) -> Circuit:
    """Ancilla-controlled ``exp(i theta p / 2)``; only the central rotation is controlled."""
    if ancilla is not None and ancilla != p.n_qubits:
        raise ValueError(f"ancilla must be qubit {p.n_qubits}")
    if p.is_identity:
        warnings.warn("exponential of the identity is a global phase; emitting no gates", stacklevel=2)
        return Circuit(p.n_qubits, True)
    return Circuit(p.n_qubits, True, _exp_gates(p, theta, p.n_qubits), 1)


def _group_blocks(group: UnitaryGroup) -> list[tuple[PauliWord, float]]:
    pairs = list(zip(group.words, group.thetas))
    *head, (w_mid, t_mid) = pairs
    return head + [(w_mid, 2.0 * t_mid)] + head[::-1]


def unitary_group_circuit(group: UnitaryGroup, controlled: bool = False) -> Circuit:
    """The ``2L - 1`` exponential blocks of a fragment.

    Uncontrolled, the circuit implements ``exp(i DECOMPOSITION_PHASE) U``.
    Controlled, an ancilla phase gate removes that factor so the ``|1>``
    branch carries exactly ``U``.
    """
    if len(group) == 0:
        raise ValueError("empty group")
    n = group.n_qubits
    anc = n if controlled else None
    gates: list[Gate] = []
    for w, t in _group_blocks(group):
        gates.extend(_exp_gates(w, t, anc))
    if controlled:
        gates.append(Gate("PHASE", (n,), -DECOMPOSITION_PHASE))
    return Circuit(n, controlled, gates, 2 * len(group) - 1)


def inverse(circuit: Circuit) -> Circuit:
    return Circuit(
        circuit.n_system,
        circuit.has_ancilla,
        [g.inverse() for g in reversed(circuit.gates)],
        circuit.entangler_count,
    )


def compose(*circuits: Circuit) -> Circuit:
    if not circuits:
        raise ValueError("nothing to compose")
    n = circuits[0].n_system
    if any(c.n_system != n for c in circuits):
        raise ValueError("circuits act on different system sizes")
    return Circuit(
        n,
        any(c.has_ancilla for c in circuits),
        [g for c in circuits for g in c.gates],
        sum(c.entangler_count for c in circuits),
    )


def measurement_circuit(group: UnitaryGroup, prep: Circuit | None = None) -> Circuit:
    """Hadamard test of ``U_prep^dag U_n U_prep`` with the ancilla as control.

    Only ``U_n`` is controlled: with the ancilla in ``|0>`` the prep and its
    inverse cancel, so the uncontrolled conjugation is equivalent.
    """
    n = group.n_qubits
    if prep is None:
        prep = Circuit(n)
    if prep.n_system != n:
        raise ValueError(f"prep acts on {prep.n_system} qubits, group on {n}")
    if prep.touches_ancilla():
        raise ValueError("prep circuit must not act on the ancilla")
    h = Gate("H", (n,))
    cu = unitary_group_circuit(group, controlled=True)
    gates = [h, *prep.gates, *cu.gates, *inverse(prep).gates, h]
    return Circuit(n, True, gates, 2 * prep.entangler_count + cu.entangler_count)


def gate_count(circuit: Circuit) -> dict:
    depth_at = [0] * circuit.n_total
    for g in circuit.gates:
        layer = 1 + max(depth_at[q] for q in g.qubits)
        for q in g.qubits:
            depth_at[q] = layer
    return {
        "total_gates": len(circuit.gates),
        "cx_count": sum(g.kind == "CX" for g in circuit.gates),
        "two_qubit_count": sum(len(g.qubits) == 2 for g in circuit.gates),
        "entangler_count": circuit.entangler_count,
        "depth": max(depth_at, default=0),
    }


def serialize_circuit(circuit: Circuit) -> str:
    anc = circuit.n_system

    def operand(q: int) -> str:
        return "a" if circuit.has_ancilla and q == anc else str(q)

    lines = [
        f"circuit qubits={circuit.n_system} ancilla={int(circuit.has_ancilla)} entanglers={circuit.entangler_count}"
    ]
    for g in circuit.gates:
        head = g.kind if g.angle is None else f"{g.kind}({g.angle!r})"
        lines.append(" ".join([head, *(operand(q) for q in g.qubits)]))
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^circuit\s+qubits=(\d+)\s+ancilla=([01])(?:\s+entanglers=(\d+))?\s*$")
_GATE_RE = re.compile(r"^([A-Z]+)(?:\(([^)]*)\))?((?:\s+\S+)*)\s*$")


def parse_circuit(text: str) -> Circuit:
    circuit: Circuit | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if circuit is None:
            m = _HEADER_RE.match(s)
            if m is None:
                raise CircuitSyntaxError("expected header 'circuit qubits=N ancilla=0|1'", lineno)
            n = int(m.group(1))
            if n < 1:
                raise CircuitSyntaxError("qubit count must be positive", lineno)
            circuit = Circuit(n, m.group(2) == "1", [], int(m.group(3) or 0))
            continue
        m = _GATE_RE.match(s)
        if m is None:
            raise CircuitSyntaxError(f"cannot parse gate {s!r}", lineno)
        kind, angle_txt, ops_txt = m.group(1), m.group(2), m.group(3).split()
        qubits = []
        for tok in ops_txt:
            if tok == "a":
                if not circuit.has_ancilla:
                    raise CircuitSyntaxError("ancilla operand in a circuit without ancilla", lineno)
                qubits.append(circuit.n_system)
            elif tok.isdigit() and int(tok) < circuit.n_system:
                qubits.append(int(tok))
            else:
                raise CircuitSyntaxError(f"bad qubit operand {tok!r}", lineno)
        try:
            angle = None if angle_txt is None else float(angle_txt)
            circuit.gates.append(Gate(kind, tuple(qubits), angle))
        except ValueError as exc:
            raise CircuitSyntaxError(str(exc), lineno) from None
    if circuit is None:
        raise CircuitSyntaxError("empty circuit file")
    return circuit


def load_circuit(path: str | Path) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"))


def random_prep_circuit(
    n_qubits: int,
    n_gates: int,
    rng: np.random.Generator,
    n_entanglers: int = 0,
) -> Circuit:
    """Random system-only circuit: ``n_gates`` elementary gates interleaved with
    ``n_entanglers`` Pauli-exponential blocks."""
    items: list[Iterable[Gate]] = []
    plain = sorted(_ONE_QUBIT | _ONE_QUBIT_ANGLE) + (["CX", "CRZ"] if n_qubits > 1 else [])
    for _ in range(n_gates):
        kind = plain[rng.integers(len(plain))]
        angle = float(rng.uniform(-math.pi, math.pi)) if kind in _ONE_QUBIT_ANGLE | _TWO_QUBIT_ANGLE else None
        if kind in _TWO_QUBIT | _TWO_QUBIT_ANGLE:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            items.append([Gate(kind, (int(a), int(b)), angle)])
        else:
            items.append([Gate(kind, (int(rng.integers(n_qubits)),), angle)])
    for _ in range(n_entanglers):
        code = int(rng.integers(1, 4**n_qubits))
        word = PauliWord(n_qubits, code & ((1 << n_qubits) - 1), code >> n_qubits)
        items.append(_exp_gates(word, float(rng.uniform(-math.pi, math.pi)), None))
    order = rng.permutation(len(items))
    gates = [g for k in order for g in items[k]]
    return Circuit(n_qubits, False, gates, n_entanglers)
