"""Qubit Hamiltonians: parsing, canonical form, serialization, random instances.

File format, one item per line::

    # comment
    qubits: 6
    0.5 [X0 Z1]
    -0.25 [Y2 Y3]
    1.0 []

Identity terms (``[]``) are accumulated into ``identity_offset`` as they are
read. A trailing ``+`` and parenthesized complex literals with zero imaginary
part, both common in chemistry-package dumps, are accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .pauli import PauliWord

__all__ = [
    "InputError",
    "HamiltonianSyntaxError",
    "UnsupportedCoefficientError",
    "MalformedWordError",
    "QubitHamiltonian",
    "DEFAULT_PRUNE_THRESHOLD",
    "parse_hamiltonian",
    "load_hamiltonian",
    "canonicalize",
    "serialize_hamiltonian",
    "random_hamiltonian",
]

DEFAULT_PRUNE_THRESHOLD = 1e-12


class InputError(ValueError):
    """Base class for malformed user input; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class HamiltonianSyntaxError(InputError):
    pass


class UnsupportedCoefficientError(InputError):
    pass


class MalformedWordError(InputError):
    pass


@dataclass(frozen=True)
class QubitHamiltonian:
    """Real-weighted sum of Pauli words plus a constant offset."""

    n_qubits: int
    terms: tuple[tuple[float, PauliWord], ...] = ()
    identity_offset: float = 0.0
    # Whether an identity term was present in the source, even if it summed to 0.
    has_identity: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(c), w) for c, w in self.terms))
        for _, w in self.terms:
            if w.n_qubits != self.n_qubits:
                raise ValueError(f"term {w} sized for {w.n_qubits} qubits, expected {self.n_qubits}")

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def words(self) -> list[PauliWord]:
        return [w for _, w in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    def is_canonical(self) -> bool:
        words = self.words
        return (
            all(not w.is_identity for w in words)
            and all(c != 0.0 for c, _ in self.terms)
            and all(a < b for a, b in zip(words, words[1:]))
        )


_HEADER_RE = re.compile(r"^qubits:\s+(\d+)\s*$")
_TERM_RE = re.compile(r"^(?P<coef>\S+?)\s*\[(?P<word>[^\]]*)\]\s*\+?\s*$")
_FACTOR_RE = re.compile(r"^([XYZ])(\d+)$")


def _parse_coefficient(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        pass
    try:
        c = complex(tok)
    except ValueError:
        raise HamiltonianSyntaxError(f"bad coefficient {tok!r}", lineno) from None
    if c.imag != 0.0:
        raise UnsupportedCoefficientError(f"complex coefficient {tok!r} not supported", lineno)
    return c.real


def _parse_word(body: str, lineno: int) -> dict[int, str]:
    factors: dict[int, str] = {}
    for tok in body.split():
        m = _FACTOR_RE.match(tok)
        if m is None:
            raise MalformedWordError(f"bad Pauli factor {tok!r}", lineno)
        q = int(m.group(2))
        if q in factors:
            raise MalformedWordError(f"qubit {q} appears twice in one word", lineno)
        factors[q] = m.group(1)
    return factors


def parse_hamiltonian(text: str) -> QubitHamiltonian:
    """Parse Hamiltonian text. Non-identity terms keep file order and duplicates."""
    header: int | None = None
    raw: list[tuple[float, dict[int, str]]] = []
    offset = 0.0
    has_identity = False
    max_index = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        m = _HEADER_RE.match(s)
        if m:
            if header is not None:
                raise HamiltonianSyntaxError("duplicate qubits header", lineno)
            header = int(m.group(1))
            if header < 1:
                raise HamiltonianSyntaxError("qubit count must be positive", lineno)
            continue
        m = _TERM_RE.match(s)
        if m is None:
            raise HamiltonianSyntaxError(f"cannot parse {s!r}", lineno)
        coef = _parse_coefficient(m.group("coef"), lineno)
        factors = _parse_word(m.group("word"), lineno)
        if not factors:
            offset += coef
            has_identity = True
            continue
        max_index = max(max_index, *factors)
        raw.append((coef, factors))

    n_qubits = max(max_index + 1, 1)
    if header is not None:
        if header < max_index + 1:
            raise HamiltonianSyntaxError(f"header declares {header} qubits but index {max_index} is used")
        n_qubits = header
    terms = tuple((c, PauliWord.from_factors(n_qubits, f)) for c, f in raw)
    return QubitHamiltonian(n_qubits, terms, offset, has_identity)


def canonicalize(h: QubitHamiltonian, prune_threshold: float = DEFAULT_PRUNE_THRESHOLD) -> QubitHamiltonian:
    """Merge duplicate words, drop small terms, fold identities, sort by (x, z)."""
    merged: dict[PauliWord, float] = {}
    offset = h.identity_offset
    has_identity = h.has_identity
    for c, w in h.terms:
        if w.is_identity:
            offset += c
            has_identity = True
        else:
            merged[w] = merged.get(w, 0.0) + c
    terms = tuple(
        (c, w) for w, c in sorted(merged.items(), key=lambda kv: kv[0]) if c != 0.0 and abs(c) >= prune_threshold
    )
    return QubitHamiltonian(h.n_qubits, terms, offset, has_identity)


def load_hamiltonian(path: str | Path, prune_threshold: float = DEFAULT_PRUNE_THRESHOLD) -> QubitHamiltonian:
    return canonicalize(parse_hamiltonian(Path(path).read_text(encoding="utf-8")), prune_threshold)


def serialize_hamiltonian(h: QubitHamiltonian) -> str:
    lines = [f"qubits: {h.n_qubits}"]
    if h.identity_offset != 0.0 or h.has_identity:
        lines.append(f"{h.identity_offset:.17g} []")
    lines.extend(f"{c:.17g} [{w}]" for c, w in h.terms)
    return "\n".join(lines) + "\n"


def random_hamiltonian(n_qubits: int, n_terms: int, coefficient_scale: float = 1.0, seed: int | None = None) -> QubitHamiltonian:
    """Canonical Hamiltonian of ``n_terms`` distinct non-identity words.

    Words are drawn uniformly without replacement; coefficients are normal
    with standard deviation ``coefficient_scale``.
    """
    n_words = 4**n_qubits - 1
    if n_terms < 0 or n_terms > n_words:
        raise ValueError(f"cannot draw {n_terms} distinct non-identity words on {n_qubits} qubits")
    rng = np.random.default_rng(seed)
    if n_qubits <= 30:
        codes = [int(k) + 1 for k in rng.choice(n_words, size=n_terms, replace=False)]
    else:
        seen: dict[int, None] = {}
        while len(seen) < n_terms:
            k = int.from_bytes(rng.bytes((2 * n_qubits + 7) // 8), "little") % (n_words + 1)
            if k:
                seen.setdefault(k)
        codes = list(seen)
    mask = (1 << n_qubits) - 1
    coefs = rng.normal(0.0, coefficient_scale, size=n_terms)
    terms = [(float(c), PauliWord(n_qubits, k & mask, k >> n_qubits)) for c, k in zip(coefs, codes)]
    return canonicalize(QubitHamiltonian(n_qubits, tuple(terms)), prune_threshold=0.0)
