"""Dense matrices of Pauli words, used as oracles on small registers."""

from __future__ import annotations

import numpy as np

from .pauli import PauliWord

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}

MAX_DENSE_QUBITS = 10


def pauli_matrix(word: PauliWord) -> np.ndarray:
    """``2**n`` matrix of a word, little-endian: qubit 0 is the rightmost Kronecker factor."""
    if word.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrices limited to {MAX_DENSE_QUBITS} qubits, got {word.n_qubits}")
    m = np.ones((1, 1), dtype=complex)
    for q in reversed(range(word.n_qubits)):
        m = np.kron(m, _PAULI[word.factor(q)])
    return m


def pauli_exponential(word: PauliWord, theta: float) -> np.ndarray:
    """``exp(i theta P / 2) = cos(theta/2) 1 + i sin(theta/2) P`` since ``P**2 = 1``."""
    p = pauli_matrix(word)
    return np.cos(theta / 2) * np.eye(p.shape[0]) + 1j * np.sin(theta / 2) * p
