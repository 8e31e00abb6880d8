"""Shared helpers: brute-force oracles kept independent of the library paths
they check."""

from __future__ import annotations

import random

import pytest

from abdyn.graph import DynGraph


def brute_common_neighbors(g: DynGraph, u: int, v: int) -> int:
    return sum(1 for w in range(g.n)
               if w not in (u, v) and g.has_edge(w, u) and g.has_edge(w, v))


def brute_common_neighbor_edges(g: DynGraph, u: int, v: int) -> int:
    common = [w for w in range(g.n)
              if w not in (u, v) and g.has_edge(w, u) and g.has_edge(w, v)]
    count = 0
    for i, a in enumerate(common):
        for b in common[i + 1:]:
            if g.has_edge(a, b):
                count += 1
    return count


def random_graph(n: int, p: float, seed: int) -> DynGraph:
    rng = random.Random(seed)
    g = DynGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


def triangle() -> DynGraph:
    return DynGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    return random.Random(12345)
