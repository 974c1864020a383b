"""Relation graphs over Hamiltonian terms, stored as integer bit rows.

Row ``i`` is a Python int whose bit ``j`` is set when terms ``i`` and ``j`` are
related. Heuristics intersect neighbourhoods with ``&`` and count with
``int.bit_count``.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .hamiltonian import QubitHamiltonian
from .pauli import PauliWord, anticommutes, commutes, qubit_wise_commutes

__all__ = [
    "Relation",
    "EmptyGraphError",
    "RelationGraph",
    "build_relation_graph",
    "build_relation_graph_reference",
    "complement",
    "degree_stats",
    "worker_count",
    "write_dimacs",
    "read_dimacs",
]


class Relation(enum.Enum):
    ANTICOMMUTE = "anticommute"
    COMMUTE = "commute"
    QWC = "qwc"
    GENERIC = "generic"


_COMPLEMENT_TAG = {
    Relation.ANTICOMMUTE: Relation.COMMUTE,
    Relation.COMMUTE: Relation.ANTICOMMUTE,
    Relation.QWC: Relation.GENERIC,
    Relation.GENERIC: Relation.GENERIC,
}

_PREDICATES = {
    Relation.ANTICOMMUTE: anticommutes,
    Relation.COMMUTE: commutes,
    Relation.QWC: qubit_wise_commutes,
}


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class RelationGraph:
    n_vertices: int
    rows: tuple[int, ...]
    relation: Relation = Relation.GENERIC

    @classmethod
    def from_edges(cls, n: int, edges, relation: Relation = Relation.GENERIC) -> RelationGraph:
        rows = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, tuple(rows), relation)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.rows[v])

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n_vertices) for j in _bits(self.rows[i] >> (i + 1) << (i + 1))]

    @property
    def n_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def is_clique(self, vertices: Sequence[int]) -> bool:
        mask = _mask(vertices)
        return all((self.rows[v] | 1 << v) & mask == mask for v in vertices)


def _bits(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def worker_count(requested: int | None = None) -> int:
    """Worker cap from ``requested`` or the ``UNIPART_THREADS`` environment variable."""
    if requested is None:
        env = os.environ.get("UNIPART_THREADS")
        requested = int(env) if env else os.cpu_count() or 1
    return max(1, requested)


def _limbs(values: list[int], n_limbs: int) -> np.ndarray:
    out = np.zeros((len(values), n_limbs), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(values):
        for k in range(n_limbs):
            out[i, k] = (v >> (64 * k)) & mask
    return out


def _row_to_int(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _block_rows(relation: Relation, X, Z, start: int, stop: int) -> list[int]:
    xi, zi = X[start:stop, None, :], Z[start:stop, None, :]
    if relation is Relation.QWC:
        support = (X | Z)[None, :, :] & (xi | zi)
        clash = ((xi ^ X[None]) | (zi ^ Z[None])) & support
        rel = ~np.any(clash != 0, axis=2)
    else:
        parity = (np.bitwise_count(xi & Z[None]) + np.bitwise_count(zi & X[None])).sum(axis=2) & 1
        rel = parity == (1 if relation is Relation.ANTICOMMUTE else 0)
    idx = np.arange(start, stop)
    rel[idx - start, idx] = False
    return [_row_to_int(r) for r in rel]


def build_relation_graph(
    h: QubitHamiltonian | Sequence[PauliWord],
    relation: Relation | str = Relation.ANTICOMMUTE,
    workers: int | None = None,
    block_size: int = 256,
) -> RelationGraph:
    """Graph over the terms of ``h`` (canonical order) under ``relation``.

    Row blocks are computed independently and may run on a thread pool; the
    result does not depend on the worker count.
    """
    relation = Relation(relation)
    if relation is Relation.GENERIC:
        raise ValueError("GENERIC is not a buildable relation")
    words = h.words if isinstance(h, QubitHamiltonian) else list(h)
    if not words:
        raise EmptyGraphError("cannot build a graph over an empty term list")
    n_limbs = (words[0].n_qubits + 63) // 64
    X = _limbs([w.x for w in words], n_limbs)
    Z = _limbs([w.z for w in words], n_limbs)
    n = len(words)
    blocks = [(s, min(s + block_size, n)) for s in range(0, n, block_size)]
    n_workers = min(worker_count(workers), len(blocks))
    if n_workers == 1:
        parts = [_block_rows(relation, X, Z, s, e) for s, e in blocks]
    else:
        with ThreadPoolExecutor(n_workers) as ex:
            parts = list(ex.map(lambda b: _block_rows(relation, X, Z, *b), blocks))
    rows = tuple(r for part in parts for r in part)
    return RelationGraph(n, rows, relation)


def build_relation_graph_reference(words: Sequence[PauliWord], relation: Relation | str) -> RelationGraph:
    """Pairwise-predicate builder used to cross-check the vectorized one."""
    relation = Relation(relation)
    pred = _PREDICATES[relation]
    n = len(words)
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if pred(words[i], words[j]):
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return RelationGraph(n, tuple(rows), relation)


def complement(g: RelationGraph) -> RelationGraph:
    full = (1 << g.n_vertices) - 1
    rows = tuple(full ^ r ^ (1 << i) for i, r in enumerate(g.rows))
    return RelationGraph(g.n_vertices, rows, _COMPLEMENT_TAG[g.relation])


def degree_stats(g: RelationGraph) -> dict:
    n = g.n_vertices
    degrees = [r.bit_count() for r in g.rows]
    m = sum(degrees) // 2
    return {
        "n_vertices": n,
        "min_degree": min(degrees, default=0),
        "max_degree": max(degrees, default=0),
        "mean_degree": sum(degrees) / n if n else 0.0,
        "n_edges": m,
        "density": 2 * m / (n * (n - 1)) if n > 1 else 0.0,
    }


def write_dimacs(g: RelationGraph, path: str | Path | None = None) -> str:
    edges = g.edges()
    lines = [f"c relation {g.relation.value}", f"p edge {g.n_vertices} {len(edges)}"]
    lines.extend(f"e {i + 1} {j + 1}" for i, j in edges)
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_dimacs(text: str) -> RelationGraph:
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            n = int(parts[2])
        elif parts[0] == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise ValueError(f"line {lineno}: unrecognized DIMACS record {line!r}")
    if n is None:
        raise ValueError("missing 'p edge' problem line")
    return RelationGraph.from_edges(n, edges)
