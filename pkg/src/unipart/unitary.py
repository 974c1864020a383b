"""Unitary fragments built from anticommuting cliques.

A clique ``{C_k P_k}`` of mutually anticommuting words becomes ``d * U`` with
``d = sqrt(sum C_k**2)`` and ``U = sum (C_k / d) P_k``. Because the words
anticommute and square to one, ``U**2 = sum c_k**2 = 1``, so the Hermitian
``U`` is unitary.

``U`` is also a palindromic product of Pauli exponentials::

    A_1 A_2 ... A_L A_L ... A_2 A_1,   A_k = exp(i theta_k P_k / 2),
    theta_k = arcsin(c_k / sqrt(c_1**2 + ... + c_k**2))

which equals ``exp(i * DECOMPOSITION_PHASE) * U``. Conjugating ``P_k`` by
any ``A_j`` with ``j < k`` only flips the sign of the exponent, so the
product telescopes to ``cos(theta_k) V_{k-1} + i sin(theta_k) P_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cover import Partition
from .dense import pauli_exponential, pauli_matrix
from .hamiltonian import QubitHamiltonian
from .pauli import PauliWord, anticommutes

__all__ = [
    "DECOMPOSITION_PHASE",
    "ContractError",
    "DegenerateGroupError",
    "ReorderRequiredError",
    "UnitaryGroup",
    "theta_angles",
    "build_unitary_groups",
    "reconstruct",
    "group_operator_matrix",
    "decomposition_matrix",
]

# Global phase of the exponential product relative to the group operator.
# Fixed by the single-term case exp(i pi/2 P) = i P and checked by the dense oracle.
DECOMPOSITION_PHASE = math.pi / 2

_NORM_TOL = 1e-12
_PREFIX_TOL = 1e-14


class ContractError(ValueError):
    pass


class DegenerateGroupError(ValueError):
    pass


class ReorderRequiredError(ValueError):
    pass


@dataclass(frozen=True)
class UnitaryGroup:
    words: tuple[PauliWord, ...]
    coefficients: tuple[float, ...]
    d: float
    thetas: tuple[float, ...]
    indices: tuple[int, ...] = ()

    @property
    def n_qubits(self) -> int:
        return self.words[0].n_qubits

    def __len__(self) -> int:
        return len(self.words)

    def to_dict(self) -> dict:
        return {
            "terms": [str(w) for w in self.words],
            "indices": list(self.indices),
            "d": self.d,
            "coefficients": list(self.coefficients),
            "thetas": list(self.thetas),
        }


def theta_angles(c: Sequence[float]) -> list[float]:
    """Hyperspherical angles of a unit vector, one per coefficient."""
    c = [float(v) for v in c]
    if not c:
        raise ContractError("empty coefficient list")
    if abs(math.fsum(v * v for v in c) - 1.0) > _NORM_TOL:
        raise ContractError("coefficients are not unit-norm")
    thetas = []
    prefix = 0.0
    for k, ck in enumerate(c):
        prefix += ck * ck
        norm = math.sqrt(prefix)
        if norm < _PREFIX_TOL:
            if ck != 0.0:
                raise ReorderRequiredError(f"prefix norm vanishes at position {k}")
            thetas.append(0.0)
            continue
        thetas.append(math.asin(max(-1.0, min(1.0, ck / norm))))
    return thetas


def _make_group(pairs: list[tuple[float, PauliWord]], indices: list[int]) -> UnitaryGroup:
    kept = [(c, w, i) for (c, w), i in zip(pairs, indices) if c != 0.0]
    if not kept:
        raise DegenerateGroupError("group has no nonzero coefficients")
    d = math.sqrt(math.fsum(c * c for c, _, _ in kept))
    coefs = [c / d for c, _, _ in kept]
    return UnitaryGroup(
        words=tuple(w for _, w, _ in kept),
        coefficients=tuple(coefs),
        d=d,
        thetas=tuple(theta_angles(coefs)),
        indices=tuple(i for _, _, i in kept),
    )


def build_unitary_groups(h: QubitHamiltonian, partition: Partition | Sequence[Sequence[int]]) -> list[UnitaryGroup]:
    """One normalized fragment per clique, in partition order."""
    groups = partition.groups if isinstance(partition, Partition) else partition
    n = len(h.terms)
    seen = set()
    for gr in groups:
        for i in gr:
            if not 0 <= i < n or i in seen:
                raise ContractError(f"term index {i} is out of range or repeated")
            seen.add(i)
    if len(seen) != n:
        raise ContractError("partition does not cover every term")
    out = []
    for gr in groups:
        members = sorted(gr)
        for a, i in enumerate(members):
            for j in members[a + 1:]:
                if not anticommutes(h.terms[i][1], h.terms[j][1]):
                    raise ContractError(f"terms {i} and {j} commute but share a group")
        out.append(_make_group([h.terms[i] for i in members], members))
    return out


def reconstruct(groups: Sequence[UnitaryGroup], identity_offset: float = 0.0, n_qubits: int | None = None) -> QubitHamiltonian:
    """Expand ``sum d_n U_n + offset`` back into a canonical Hamiltonian."""
    if n_qubits is None:
        if not groups:
            raise ValueError("n_qubits is required when there are no groups")
        n_qubits = groups[0].n_qubits
    terms = sorted(((g.d * c, w) for g in groups for c, w in zip(g.coefficients, g.words)), key=lambda t: t[1])
    return QubitHamiltonian(n_qubits, tuple(terms), identity_offset, identity_offset != 0.0)


def group_operator_matrix(group: UnitaryGroup) -> np.ndarray:
    return sum(c * pauli_matrix(w) for c, w in zip(group.coefficients, group.words))


def decomposition_matrix(group: UnitaryGroup) -> np.ndarray:
    """Dense product ``A_1 ... A_L A_L ... A_1`` of the Pauli exponentials."""
    dim = 1 << group.n_qubits
    left = np.eye(dim, dtype=complex)
    for w, t in zip(group.words, group.thetas):
        left = left @ pauli_exponential(w, t)
    right = np.eye(dim, dtype=complex)
    for w, t in zip(group.words, group.thetas):
        right = pauli_exponential(w, t) @ right
    return left @ right
