"""Initial-graph generators for experiments and tests."""

from __future__ import annotations

import random

from .errors import ConfigError
from .graph import DynGraph


def gnp(n: int, p: float, seed: int = 0) -> DynGraph:
    """Erdos-Renyi G(n, p) with a dedicated seed."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"gnp probability must be in [0,1], got {p}")
    rng = random.Random(seed)
    g = DynGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


def cycle(n: int) -> DynGraph:
    if n < 3:
        raise ConfigError("cycle needs at least 3 nodes")
    g = DynGraph(n)
    for u in range(n):
        g.add_edge(u, (u + 1) % n)
    return g


def path(n: int) -> DynGraph:
    g = DynGraph(n)
    for u in range(n - 1):
        g.add_edge(u, u + 1)
    return g


def star(n: int) -> DynGraph:
    """Star with center 0 and n-1 leaves."""
    if n < 2:
        raise ConfigError("star needs at least 2 nodes")
    g = DynGraph(n)
    for v in range(1, n):
        g.add_edge(0, v)
    return g


def complete(n: int) -> DynGraph:
    g = DynGraph(n)
    for u in range(n):
        for v in range(u + 1, n):
            g.add_edge(u, v)
    return g


def random_connected(n: int, extra_p: float, seed: int = 0) -> DynGraph:
    """Random spanning tree plus independent extra edges; always connected."""
    rng = random.Random(seed)
    g = DynGraph(n)
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        g.add_edge(order[i], order[rng.randrange(i)])
    for u in range(n):
        for v in range(u + 1, n):
            if not g.has_edge(u, v) and rng.random() < extra_p:
                g.add_edge(u, v)
    return g
