"""Mutable simple undirected graph with the structural queries local rules need.

Node ids are dense integers 0..n-1 and the node set is fixed for the lifetime
of a graph; only edges change. Adjacency is kept in hash sets so that common
neighbor counting is a single C-level intersection.

Thread safety: read-only queries may run concurrently; mutation requires
exclusive access.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ContractError, InputError


def norm_pair(u: int, v: int) -> tuple[int, int]:
    """Canonical unordered pair representation."""
    return (u, v) if u < v else (v, u)


class DynGraph:
    """Simple undirected graph on a fixed node set."""

    __slots__ = ("_adj", "_m")

    def __init__(self, n: int):
        if n < 0:
            raise InputError(f"node count must be nonnegative, got {n}")
        self._adj: list[set[int]] = [set() for _ in range(n)]
        self._m = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DynGraph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def _check(self, u: int) -> None:
        if not 0 <= u < len(self._adj):
            raise InputError(f"node id {u} out of range 0..{len(self._adj) - 1}")

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return v in self._adj[u]

    def add_edge(self, u: int, v: int) -> None:
        self._check(u)
        self._check(v)
        if u == v:
            raise InputError(f"self-loop at node {u} not allowed")
        if v not in self._adj[u]:
            self._adj[u].add(v)
            self._adj[v].add(u)
            self._m += 1

    def remove_edge(self, u: int, v: int) -> None:
        self._check(u)
        self._check(v)
        if v in self._adj[u]:
            self._adj[u].discard(v)
            self._adj[v].discard(u)
            self._m -= 1

    def neighbors(self, u: int) -> set[int]:
        """Live neighbor set of u. Callers must not mutate it."""
        self._check(u)
        return self._adj[u]

    def degree(self, u: int) -> int:
        self._check(u)
        return len(self._adj[u])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self._adj):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def common_neighbors(self, u: int, v: int) -> int:
        """Number of nodes adjacent to both u and v; u and v never count."""
        self._check(u)
        self._check(v)
        if u == v:
            raise InputError("common_neighbors requires two distinct nodes")
        return len(self._adj[u] & self._adj[v])

    def common_neighbor_edges(self, u: int, v: int) -> int:
        """Number of edges whose endpoints are both common neighbors of u and v."""
        self._check(u)
        self._check(v)
        if u == v:
            raise InputError("common_neighbor_edges requires two distinct nodes")
        common = self._adj[u] & self._adj[v]
        if len(common) < 2:
            return 0
        total = 0
        for w in common:
            total += len(self._adj[w] & common)
        return total // 2

    def apply_delta(self, delta: "EdgeDelta") -> None:
        """Toggle exactly the listed edges. The delta must be valid against
        the current graph; a violation indicates an engine bug."""
        delta.validate(self)
        for u, v in delta.removals:
            self._adj[u].discard(v)
            self._adj[v].discard(u)
        for u, v in delta.additions:
            self._adj[u].add(v)
            self._adj[v].add(u)
        self._m += len(delta.additions) - len(delta.removals)

    def copy(self) -> "DynGraph":
        g = DynGraph.__new__(DynGraph)
        g._adj = [set(s) for s in self._adj]
        g._m = self._m
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DynGraph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self):  # mutable; identity hashing only
        return id(self)

    def __repr__(self) -> str:
        return f"DynGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class EdgeDelta:
    """One synchronous round's edge update, as disjoint add/remove lists."""

    additions: tuple[tuple[int, int], ...] = ()
    removals: tuple[tuple[int, int], ...] = ()

    @classmethod
    def build(cls, additions, removals) -> "EdgeDelta":
        return cls(
            additions=tuple(sorted(norm_pair(*e) for e in additions)),
            removals=tuple(sorted(norm_pair(*e) for e in removals)),
        )

    @property
    def empty(self) -> bool:
        return not self.additions and not self.removals

    def __len__(self) -> int:
        return len(self.additions) + len(self.removals)

    def validate(self, g: DynGraph) -> None:
        adds = set(self.additions)
        rems = set(self.removals)
        if len(adds) != len(self.additions) or len(rems) != len(self.removals):
            raise ContractError("delta contains duplicate pairs")
        if adds & rems:
            raise ContractError(f"delta adds and removes the same pairs: {sorted(adds & rems)[:5]}")
        for u, v in adds:
            if u == v:
                raise ContractError(f"delta contains self-loop ({u},{v})")
            if g.has_edge(u, v):
                raise ContractError(f"delta adds existing edge ({u},{v})")
        for u, v in rems:
            if not g.has_edge(u, v):
                raise ContractError(f"delta removes missing edge ({u},{v})")

    def inverse(self) -> "EdgeDelta":
        return EdgeDelta(additions=self.removals, removals=self.additions)


# ---------------------------------------------------------------------------
# Fingerprints

def edge_token(u: int, v: int) -> int:
    """64-bit mixing of one undirected edge, stable across runs.

    The graph fingerprint is the XOR fold of these tokens, so it can be
    maintained incrementally under edge toggles. Distinct graphs may in
    principle collide; any machinery that must never report a false match
    (cycle detection) compares exact edge sets instead.
    """
    a, b = norm_pair(u, v)
    h = hashlib.blake2b(f"{a},{b}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def graph_fingerprint(g: DynGraph) -> int:
    fp = hashlib.blake2b(f"n={g.n}".encode(), digest_size=8)
    acc = int.from_bytes(fp.digest(), "big")
    for u, v in g.edges():
        acc ^= edge_token(u, v)
    return acc


def fingerprint_hex(fp: int) -> str:
    return f"{fp:016x}"


# ---------------------------------------------------------------------------
# Locality views

def ball_nodes(g: DynGraph, u: int, v: int, radius: int) -> set[int]:
    """Nodes within the given distance of u or v."""
    g._check(u)
    g._check(v)
    seen = {u, v}
    frontier = [u, v]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for y in g._adj[x]:
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if not frontier:
            break
    return seen


def induced_ball(g: DynGraph, u: int, v: int, radius: int) -> tuple[DynGraph, list[int]]:
    """Induced subgraph on the radius-ball around the pair (u, v).

    Returns the fragment (dense new ids) and the new-to-old id mapping.
    This view is the entire input a local rule is allowed to see.
    """
    if radius < 0:
        raise InputError(f"radius must be nonnegative, got {radius}")
    nodes = sorted(ball_nodes(g, u, v, radius))
    old_to_new = {x: i for i, x in enumerate(nodes)}
    frag = DynGraph(len(nodes))
    for x in nodes:
        nx = old_to_new[x]
        for y in g._adj[x]:
            if y > x and y in old_to_new:
                frag.add_edge(nx, old_to_new[y])
    return frag, nodes


class LocalView:
    """Lazy window onto the induced ball around a center pair.

    Semantically identical to materializing ``induced_ball`` and querying the
    fragment, but common queries on the centers are answered straight from the
    underlying adjacency (their answers provably lie inside the ball when the
    radius is at least 1). Queries about other nodes force the ball to be
    materialized so the locality restriction stays airtight.
    """

    __slots__ = ("_g", "u", "v", "radius", "_allowed")

    def __init__(self, g: DynGraph, u: int, v: int, radius: int):
        self._g = g
        self.u = u
        self.v = v
        self.radius = radius
        self._allowed: set[int] | None = None

    def _ball(self) -> set[int]:
        if self._allowed is None:
            self._allowed = ball_nodes(self._g, self.u, self.v, self.radius)
        return self._allowed

    def _is_center(self, x: int) -> bool:
        return x == self.u or x == self.v

    def node_set(self) -> set[int]:
        return set(self._ball())

    def edge(self, x: int, y: int) -> int:
        if self.radius < 1 or not (self._is_center(x) and self._is_center(y)):
            ball = self._ball()
            if x not in ball or y not in ball:
                return 0
        return 1 if y in self._g._adj[x] else 0

    def degree(self, x: int) -> int:
        if self.radius >= 1 and self._is_center(x):
            return len(self._g._adj[x])
        return len(self._g._adj[x] & self._ball())

    def neighbors(self, x: int) -> set[int]:
        if self.radius >= 1 and self._is_center(x):
            return set(self._g._adj[x])
        return self._g._adj[x] & self._ball()

    def common_neighbors(self, x: int, y: int) -> int:
        if self.radius >= 1 and self._is_center(x) and self._is_center(y):
            return len(self._g._adj[x] & self._g._adj[y])
        return len(self._g._adj[x] & self._g._adj[y] & self._ball())

    def common_neighbor_edges(self, x: int, y: int) -> int:
        if self.radius >= 1 and self._is_center(x) and self._is_center(y):
            common = self._g._adj[x] & self._g._adj[y]
        else:
            common = self._g._adj[x] & self._g._adj[y] & self._ball()
        if len(common) < 2:
            return 0
        total = 0
        for w in common:
            total += len(self._g._adj[w] & common)
        return total // 2

    def materialize(self) -> tuple[DynGraph, list[int]]:
        return induced_ball(self._g, self.u, self.v, self.radius)
