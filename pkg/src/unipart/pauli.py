"""Pauli words in symplectic (x, z) bit form and their algebra.

A word on ``n`` qubits is stored as two integers used as bit vectors:
bit ``i`` of ``x`` is set when the factor on qubit ``i`` is X or Y, bit ``i``
of ``z`` is set when it is Z or Y. With ``Y = i X Z`` every word equals
``i**popcount(x & z) * X**x Z**z``, which is what the phase bookkeeping in
:func:`multiply` relies on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "DimensionError",
    "PauliWord",
    "multiply",
    "commutes",
    "anticommutes",
    "qubit_wise_commutes",
    "weight",
]

_FACTOR_RE = re.compile(r"^([XYZ])(\d+)$")

# (x bit, z bit) -> symbol
_SYMBOL = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _SYMBOL.items()}


class DimensionError(ValueError):
    """Raised when two words act on different numbers of qubits."""


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True, order=True)
class PauliWord:
    """Tensor product of single-qubit Pauli factors.

    Ordering compares ``(n_qubits, x, z)``, so sorting words of equal size is
    the lexicographic ``(x_bits, z_bits)`` order used for canonical term order.
    """

    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if self.x < 0 or self.z < 0 or (self.x | self.z) >> self.n_qubits:
            raise ValueError(f"bits beyond qubit {self.n_qubits - 1} must be zero")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliWord:
        return cls(n_qubits)

    @classmethod
    def from_factors(cls, n_qubits: int, factors: dict[int, str]) -> PauliWord:
        """Build a word from a ``{qubit: 'X'|'Y'|'Z'|'I'}`` mapping."""
        x = z = 0
        for q, s in factors.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")
            bx, bz = _BITS[s]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z)

    @classmethod
    def from_string(cls, text: str, n_qubits: int | None = None) -> PauliWord:
        """Parse ``"X0 Y1 Z3"``; the empty string is the identity.

        Without ``n_qubits`` the word is sized to its highest index.
        """
        factors: dict[int, str] = {}
        for tok in text.split():
            m = _FACTOR_RE.match(tok)
            if m is None:
                raise ValueError(f"malformed Pauli factor {tok!r}")
            q = int(m.group(2))
            if q in factors:
                raise ValueError(f"duplicate qubit index {q} in word {text!r}")
            factors[q] = m.group(1)
        if n_qubits is None:
            n_qubits = max(factors, default=0) + 1
        return cls.from_factors(n_qubits, factors)

    @classmethod
    def from_label(cls, label: str) -> PauliWord:
        """Dense label such as ``"XIZY"`` with qubit 0 leftmost."""
        return cls.from_factors(len(label), dict(enumerate(label.upper())))

    def factor(self, qubit: int) -> str:
        return _SYMBOL[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def factors(self) -> dict[int, str]:
        """Non-identity factors keyed by qubit, ascending."""
        return {q: self.factor(q) for q in range(self.n_qubits) if (self.x | self.z) >> q & 1}

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def is_identity(self) -> bool:
        return not (self.x | self.z)

    def label(self) -> str:
        return "".join(self.factor(q) for q in range(self.n_qubits))

    def __str__(self) -> str:
        return " ".join(f"{s}{q}" for q, s in self.factors().items())


def _check(p: PauliWord, q: PauliWord) -> None:
    if p.n_qubits != q.n_qubits:
        raise DimensionError(f"words on {p.n_qubits} and {q.n_qubits} qubits")


def multiply(p: PauliWord, q: PauliWord) -> tuple[int, PauliWord]:
    """Return ``(phase, r)`` with ``p @ q == 1j**phase * r`` as matrices.

    Moving ``Z**z_p`` past ``X**x_q`` costs ``(-1)**popcount(z_p & x_q)``; the
    remaining phases come from the ``i**popcount(x & z)`` prefactor of each word.
    """
    _check(p, q)
    x = p.x ^ q.x
    z = p.z ^ q.z
    phase = _popcount(p.x & p.z) + _popcount(q.x & q.z) + 2 * _popcount(p.z & q.x) - _popcount(x & z)
    return phase % 4, PauliWord(p.n_qubits, x, z)


def symplectic_product(p: PauliWord, q: PauliWord) -> int:
    """Symplectic inner product mod 2; 0 means the words commute."""
    _check(p, q)
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) & 1


def commutes(p: PauliWord, q: PauliWord) -> bool:
    return symplectic_product(p, q) == 0


def anticommutes(p: PauliWord, q: PauliWord) -> bool:
    # A word commutes with itself, so the diagonal is always False.
    return symplectic_product(p, q) == 1


def qubit_wise_commutes(p: PauliWord, q: PauliWord) -> bool:
    """True when on every qubit the factors agree or one is the identity."""
    _check(p, q)
    overlap = p.support & q.support
    return not (((p.x ^ q.x) | (p.z ^ q.z)) & overlap)


def weight(p: PauliWord) -> int:
    """Number of non-identity factors."""
    return _popcount(p.x | p.z)
