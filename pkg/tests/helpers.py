"""Random instance builders shared by the test modules."""

from __future__ import annotations

import numpy as np

from unipart.graph import RelationGraph
from unipart.pauli import PauliWord
from unipart.unitary import UnitaryGroup, theta_angles


def random_word(n: int, rng: np.random.Generator, allow_identity: bool = True) -> PauliWord:
    lo = 0 if allow_identity else 1
    code = int(rng.integers(lo, 4**n))
    return PauliWord(n, code & ((1 << n) - 1), code >> n)


def majorana_words(n: int) -> list[tuple[int, int]]:
    """2n+1 mutually anticommuting words as (x, z) bit pairs: Z..Z X_k, Z..Z Y_k, Z..Z."""
    out = []
    for k in range(n):
        zs = (1 << k) - 1
        out.append((1 << k, zs))
        out.append((1 << k, zs | 1 << k))
    out.append((0, (1 << n) - 1))
    return out


def _scramble(pairs, n, rng, steps):
    """Apply random H, S and CX conjugations in symplectic form; commutation is preserved."""
    pairs = list(pairs)
    for _ in range(steps):
        op = rng.integers(3) if n > 1 else rng.integers(2)
        if op == 0:
            q = int(rng.integers(n))
            swap = 1 << q
            pairs = [(x ^ ((x ^ z) & swap), z ^ ((x ^ z) & swap)) for x, z in pairs]
        elif op == 1:
            q = int(rng.integers(n))
            pairs = [(x, z ^ (x & (1 << q))) for x, z in pairs]
        else:
            c, t = (int(v) for v in rng.choice(n, size=2, replace=False))
            pairs = [(x ^ ((x >> c & 1) << t), z ^ ((z >> t & 1) << c)) for x, z in pairs]
    return pairs


def random_anticommuting_words(n: int, size: int, rng: np.random.Generator) -> list[PauliWord]:
    if size > 2 * n + 1:
        raise ValueError("at most 2n+1 words can mutually anticommute")
    pairs = _scramble(majorana_words(n), n, rng, steps=4 * n + 4)
    pick = rng.choice(len(pairs), size=size, replace=False)
    return [PauliWord(n, *pairs[int(k)]) for k in pick]


def random_group(n: int, size: int, rng: np.random.Generator) -> UnitaryGroup:
    words = random_anticommuting_words(n, size, rng)
    c = rng.normal(size=size)
    c /= np.linalg.norm(c)
    coefs = tuple(float(v) for v in c)
    return UnitaryGroup(tuple(words), coefs, float(rng.uniform(0.1, 3.0)), tuple(theta_angles(coefs)))


def random_graph(n: int, density: float, rng: np.random.Generator) -> RelationGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return RelationGraph.from_edges(n, edges)


def brute_force_chromatic(g: RelationGraph) -> int:
    """Smallest k admitting a proper k-coloring, by exhaustive assignment with backtracking."""
    n = g.n_vertices
    if n == 0:
        return 0
    colors = [-1] * n

    def assign(v: int, k: int) -> bool:
        if v == n:
            return True
        used = max(colors[:v], default=-1)
        for c in range(min(k, used + 2)):
            if all(colors[u] != c for u in g.neighbors(v) if u < v):
                colors[v] = c
                if assign(v + 1, k):
                    return True
        colors[v] = -1
        return False

    for k in range(1, n + 1):
        if assign(0, k):
            return k
    return n
