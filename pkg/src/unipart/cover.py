"""Minimum clique cover heuristics.

A clique cover of ``g`` is a proper coloring of ``complement(g)``: every
color class is an independent set there, hence a clique in ``g``. The
coloring-family heuristics (gc, lf, sl, ds, rlf, db, cosine) work that way.
Ramsey and BKT instead peel cliques off ``g`` directly.

Every heuristic breaks ties by ascending vertex index. A ``seed`` relabels
the vertices by a seeded permutation first, so different seeds give
different (but reproducible) tie-breaks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import RelationGraph, _bits, complement

__all__ = [
    "HEURISTICS",
    "COLORING_HEURISTICS",
    "UnknownHeuristicError",
    "ResourceLimitError",
    "Partition",
    "Validation",
    "clique_cover",
    "color_graph",
    "exact_cover_small",
    "validate_partition",
    "BKT_VERTEX_CAP",
    "EXACT_VERTEX_CAP",
]

COLORING_HEURISTICS = ("gc", "lf", "sl", "ds", "rlf", "db", "cosine")
HEURISTICS = COLORING_HEURISTICS + ("ramsey", "bkt")

BKT_VERTEX_CAP = 500
EXACT_VERTEX_CAP = 30


class UnknownHeuristicError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class Partition:
    """Disjoint groups of vertex indices, each sorted, groups ordered by first member."""

    groups: tuple[tuple[int, ...], ...]
    heuristic: str
    seed: int | None = None

    @classmethod
    def from_groups(cls, groups, heuristic: str, seed: int | None = None) -> Partition:
        norm = sorted((tuple(sorted(gr)) for gr in groups if len(gr)), key=lambda gr: gr[0])
        return cls(tuple(norm), heuristic, seed)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def group_sizes(self) -> list[int]:
        return [len(gr) for gr in self.groups]

    @property
    def max_size(self) -> int:
        return max(self.group_sizes, default=0)

    @property
    def size_std(self) -> float:
        # population standard deviation of the group sizes
        sizes = self.group_sizes
        return float(np.std(sizes)) if sizes else 0.0

    def to_dict(self) -> dict:
        return {
            "heuristic": self.heuristic,
            "seed": self.seed,
            "n_groups": self.n_groups,
            "groups": [list(gr) for gr in self.groups],
            "group_sizes": self.group_sizes,
            "max_size": self.max_size,
            "size_std": self.size_std,
        }


@dataclass(frozen=True)
class Validation:
    ok: bool
    message: str = ""
    pair: tuple[int, int] | None = field(default=None)

    def __bool__(self) -> bool:
        return self.ok


def validate_partition(g: RelationGraph, p: Partition | Sequence[Sequence[int]]) -> Validation:
    """Check cover, disjointness, and that each group is a clique of ``g``."""
    groups = p.groups if isinstance(p, Partition) else p
    seen: dict[int, int] = {}
    for gi, gr in enumerate(groups):
        for v in gr:
            if not 0 <= v < g.n_vertices:
                return Validation(False, f"vertex {v} in group {gi} is out of range")
            if v in seen:
                return Validation(False, f"vertex {v} appears in groups {seen[v]} and {gi}")
            seen[v] = gi
    missing = [v for v in range(g.n_vertices) if v not in seen]
    if missing:
        return Validation(False, f"vertex {missing[0]} is not covered")
    for gi, gr in enumerate(groups):
        members = sorted(gr)
        for a, u in enumerate(members):
            for v in members[a + 1:]:
                if not g.has_edge(u, v):
                    return Validation(False, f"group {gi} contains non-adjacent pair ({u}, {v})", (u, v))
    return Validation(True)


# --- coloring heuristics -----------------------------------------------------
# Each takes the rows of the graph to color and returns a list of color-class masks.


def _first_fit(rows: Sequence[int], order: Sequence[int]) -> list[int]:
    classes: list[int] = []
    for v in order:
        for c, m in enumerate(classes):
            if not rows[v] & m:
                classes[c] = m | 1 << v
                break
        else:
            classes.append(1 << v)
    return classes


def _gc(rows):
    return _first_fit(rows, range(len(rows)))


def _lf(rows):
    order = sorted(range(len(rows)), key=lambda v: (-rows[v].bit_count(), v))
    return _first_fit(rows, order)


def _sl(rows):
    n = len(rows)
    remaining = (1 << n) - 1
    removal = []
    for _ in range(n):
        v = min(_bits(remaining), key=lambda u: ((rows[u] & remaining).bit_count(), u))
        removal.append(v)
        remaining &= ~(1 << v)
    return _first_fit(rows, removal[::-1])


def _dsatur(rows):
    n = len(rows)
    uncolored = (1 << n) - 1
    seen_colors = [0] * n  # bitmask of colors on colored neighbours
    classes: list[int] = []
    for _ in range(n):
        v = max(
            _bits(uncolored),
            key=lambda u: (seen_colors[u].bit_count(), (rows[u] & uncolored).bit_count(), -u),
        )
        c = 0
        while seen_colors[v] >> c & 1:
            c += 1
        if c == len(classes):
            classes.append(0)
        classes[c] |= 1 << v
        uncolored &= ~(1 << v)
        for u in _bits(rows[v] & uncolored):
            seen_colors[u] |= 1 << c
    return classes


def _class_builder(rows, tie):
    """Leighton-style sequential class construction shared by RLF and COSINE.

    Each class starts from the uncolored vertex of largest residual degree and
    grows with the candidate sharing most neighbours with the class; ``tie``
    orders candidates with equal score.
    """
    n = len(rows)
    uncolored = (1 << n) - 1
    classes = []
    while uncolored:
        v = max(_bits(uncolored), key=lambda u: ((rows[u] & uncolored).bit_count(), -u))
        cls = 1 << v
        blocked = rows[v] & uncolored  # uncolored vertices adjacent to the class
        cands = uncolored & ~blocked & ~cls
        while cands:
            u = max(
                _bits(cands),
                key=lambda w: ((rows[w] & blocked).bit_count(), tie(rows, w, cands, uncolored), -w),
            )
            cls |= 1 << u
            blocked |= rows[u] & cands
            cands &= ~rows[u] & ~(1 << u)
        classes.append(cls)
        uncolored &= ~cls
    return classes


def _rlf(rows):
    # Leighton: fewest edges into the remaining candidate set
    return _class_builder(rows, lambda r, w, cands, unc: -(r[w] & cands).bit_count())


def _cosine(rows):
    # Hertz: contraction view, ties go to the largest residual degree
    return _class_builder(rows, lambda r, w, cands, unc: (r[w] & unc).bit_count())


def _db(rows):
    """Dutton-Brigham: contract the non-adjacent pair with most common neighbours."""
    n = len(rows)
    A = np.zeros((n, n), dtype=np.int64)
    for i, r in enumerate(rows):
        A[i, _bits(r)] = 1
    alive = np.ones(n, dtype=bool)
    members = [1 << i for i in range(n)]
    common = A @ A
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    while True:
        eligible = upper & (A == 0) & alive[:, None] & alive[None, :]
        if not eligible.any():
            break
        score = np.where(eligible, common, -1)
        u, v = divmod(int(np.argmax(score)), n)
        old_u, old_v = A[:, u].copy(), A[:, v].copy()
        new_u = np.maximum(old_u, old_v)
        new_u[u] = new_u[v] = 0
        common -= np.outer(old_u, old_u) + np.outer(old_v, old_v) - np.outer(new_u, new_u)
        A[:, u] = new_u
        A[u, :] = new_u
        A[:, v] = 0
        A[v, :] = 0
        # row/column u of common changed through A[u] itself
        common[u, :] = A[u] @ A
        common[:, u] = common[u, :]
        common[v, :] = 0
        common[:, v] = 0
        alive[v] = False
        members[u] |= members[v]
    return [members[i] for i in range(n) if alive[i]]


_COLORERS = {"gc": _gc, "lf": _lf, "sl": _sl, "ds": _dsatur, "rlf": _rlf, "db": _db, "cosine": _cosine}


def _classes_to_colors(classes: list[int], n: int) -> list[int]:
    colors = [-1] * n
    for c, m in enumerate(classes):
        for v in _bits(m):
            colors[v] = c
    return colors


def color_graph(g: RelationGraph, heuristic: str) -> list[int]:
    """Proper coloring of ``g`` as a list ``vertex -> color``."""
    if heuristic not in _COLORERS:
        raise UnknownHeuristicError(f"unknown coloring heuristic {heuristic!r}")
    return _classes_to_colors(_COLORERS[heuristic](g.rows), g.n_vertices)


# --- clique extraction -------------------------------------------------------


def _ramsey_clique(rows, S: int) -> int:
    """Clique part of Boppana-Halldorsson Ramsey, with an explicit stack."""
    stack = [[S, 0, 0, 0]]
    ret = 0
    while stack:
        f = stack[-1]
        if f[1] == 0:
            if not f[0]:
                stack.pop()
                ret = 0
                continue
            v = (f[0] & -f[0]).bit_length() - 1
            f[1], f[2] = 1, v
            stack.append([f[0] & rows[v], 0, 0, 0])
        elif f[1] == 1:
            v = f[2]
            f[1], f[3] = 2, ret | 1 << v
            stack.append([f[0] & ~rows[v] & ~(1 << v), 0, 0, 0])
        else:
            a, b = f[3], ret
            stack.pop()
            ret = a if a.bit_count() >= b.bit_count() else b
    return ret


def _extend_to_maximal(rows, clique: int, R: int) -> int:
    cand = R & ~clique
    for v in _bits(clique):
        cand &= rows[v]
    while cand:
        v = (cand & -cand).bit_length() - 1
        clique |= 1 << v
        cand &= rows[v]
    return clique


def _maximum_clique(rows, P: int) -> int:
    """Maximum clique inside ``P`` by Bron-Kerbosch with Tomita pivoting and a size bound."""
    best = [0, 0]  # mask, size

    def expand(R: int, size: int, P: int):
        if not P:
            if size > best[1]:
                best[0], best[1] = R, size
            return
        if size + P.bit_count() <= best[1]:
            return
        pivot = max(_bits(P), key=lambda u: ((P & rows[u]).bit_count(), -u))
        for v in _bits(P & ~rows[pivot]):
            expand(R | 1 << v, size + 1, P & rows[v])
            P &= ~(1 << v)
            if size + P.bit_count() <= best[1]:
                return

    expand(0, 0, P)
    return best[0]


def _peel(rows, n, extract) -> list[int]:
    R = (1 << n) - 1
    groups = []
    while R:
        q = extract(rows, R)
        groups.append(q)
        R &= ~q
    return groups


def _ramsey_cover(rows, n):
    return _peel(rows, n, lambda r, R: _extend_to_maximal(r, _ramsey_clique(r, R), R))


def _bkt_cover(rows, n):
    return _peel(rows, n, _maximum_clique)


# --- exact solver -------------------------------------------------------------


def _maximal_cliques_through(rows, v: int, R: int) -> list[int]:
    out = []

    def bk(Rc: int, P: int, X: int):
        if not P and not X:
            out.append(Rc)
            return
        pivot = max(_bits(P | X), key=lambda u: ((P & rows[u]).bit_count(), -u))
        for w in _bits(P & ~rows[pivot]):
            bk(Rc | 1 << w, P & rows[w], X & rows[w])
            P &= ~(1 << w)
            X |= 1 << w

    bk(1 << v, R & rows[v], 0)
    return out


def _independent_lower_bound(rows, R: int) -> int:
    count = 0
    while R:
        v = min(_bits(R), key=lambda u: ((rows[u] & R).bit_count(), u))
        R &= ~rows[v] & ~(1 << v)
        count += 1
    return count


def exact_cover_small(
    g: RelationGraph,
    vertex_cap: int = EXACT_VERTEX_CAP,
    time_budget: float | None = None,
) -> Partition:
    """Minimum clique cover by branch and bound over maximal cliques.

    There is always an optimal cover in which the clique covering a chosen
    vertex is maximal within the uncovered set, so branching over those
    cliques is complete. Pruned with a greedy independent-set lower bound.
    """
    n = g.n_vertices
    if n > vertex_cap:
        raise ResourceLimitError(f"exact cover limited to {vertex_cap} vertices, graph has {n}")
    rows = g.rows
    deadline = None if time_budget is None else time.monotonic() + time_budget
    best = min((_cover_masks(g, h) for h in ("ds", "rlf")), key=len)
    best = list(best)
    chosen: list[int] = []

    def search(R: int):
        nonlocal best
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceLimitError(f"exact cover exceeded time budget of {time_budget} s")
        if not R:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        if len(chosen) + _independent_lower_bound(rows, R) >= len(best):
            return
        v = min(_bits(R), key=lambda u: ((rows[u] & R).bit_count(), u))
        cliques = sorted(_maximal_cliques_through(rows, v, R), key=lambda q: (-q.bit_count(), q))
        for q in cliques:
            chosen.append(q)
            search(R & ~q)
            chosen.pop()
            if len(chosen) + _independent_lower_bound(rows, R) >= len(best):
                return

    search((1 << n) - 1)
    return Partition.from_groups([_bits(m) for m in best], "exact")


def _cover_masks(g: RelationGraph, heuristic: str) -> list[int]:
    if heuristic in _COLORERS:
        return _COLORERS[heuristic](complement(g).rows)
    if heuristic == "ramsey":
        return _ramsey_cover(g.rows, g.n_vertices)
    if heuristic == "bkt":
        return _bkt_cover(g.rows, g.n_vertices)
    raise UnknownHeuristicError(f"unknown heuristic {heuristic!r}; choose from {', '.join(HEURISTICS + ('exact',))}")


def _permuted(g: RelationGraph, perm: np.ndarray) -> RelationGraph:
    # new label k is old vertex perm[k]
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    rows = []
    for k in range(g.n_vertices):
        r = 0
        for u in g.neighbors(int(perm[k])):
            r |= 1 << int(inv[u])
        rows.append(r)
    return RelationGraph(g.n_vertices, tuple(rows), g.relation)


def clique_cover(
    g: RelationGraph,
    heuristic: str = "rlf",
    seed: int | None = None,
    *,
    bkt_vertex_cap: int = BKT_VERTEX_CAP,
    exact_vertex_cap: int = EXACT_VERTEX_CAP,
    time_budget: float | None = None,
) -> Partition:
    """Cover the vertices of ``g`` with cliques using ``heuristic``."""
    heuristic = heuristic.lower()
    if heuristic not in HEURISTICS and heuristic != "exact":
        raise UnknownHeuristicError(f"unknown heuristic {heuristic!r}; choose from {', '.join(HEURISTICS + ('exact',))}")
    n = g.n_vertices
    if n == 0:
        raise ValueError("graph has no vertices")
    if heuristic == "bkt" and n > bkt_vertex_cap:
        raise ResourceLimitError(f"bkt limited to {bkt_vertex_cap} vertices, graph has {n}")
    perm = None
    work = g
    if seed is not None:
        perm = np.random.default_rng(seed).permutation(n)
        work = _permuted(g, perm)
    if heuristic == "exact":
        groups = [list(gr) for gr in exact_cover_small(work, exact_vertex_cap, time_budget).groups]
    else:
        groups = [_bits(m) for m in _cover_masks(work, heuristic)]
    if perm is not None:
        groups = [[int(perm[v]) for v in gr] for gr in groups]
    return Partition.from_groups(groups, heuristic, seed)
