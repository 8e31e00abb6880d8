"""Catalog of pair potentials behind one uniform pure-function interface.

A potential maps a node pair plus the induced ball around it to a real value,
which the engine compares against the thresholds: below ``alpha`` the edge is
dropped, in ``[alpha, beta)`` it is kept as is, at or above ``beta`` it is
created. Evaluators receive only a :class:`~abdyn.graph.LocalView` of their
declared radius, which enforces the locality contract by construction.

All potentials here are integer-valued on integer inputs; tests pin exact
equality so no tolerance questions arise in threshold comparisons.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import ConfigError
from .graph import DynGraph, LocalView

ProperFunction = Callable[[float, float], float]
# Degree-like node functions receive (neighborhood provider, node) where the
# provider exposes .neighbors(node); they must depend only on the node's
# closed neighborhood plus static per-node attributes.
DegreeLikeFunction = Callable[[object, int], float]


@dataclass(frozen=True)
class PairStatsRule:
    """Decision procedure for potentials that depend only on the pair's edge
    state, common neighbor count and common neighbor edge count.

    ``decide`` returns the next edge state (0/1) given the current state, the
    common neighbor count and a zero-argument callable producing the common
    neighbor edge count (evaluated lazily since it is rarely needed).

    ``cn_floor`` is a pruning certificate: whenever the common neighbor count
    of a pair is below it, ``decide`` is guaranteed to return the current
    state, so the pair can be skipped without evaluation.
    """

    decide: Callable[[int, int, Callable[[], int]], int]
    cn_floor: int


@dataclass(frozen=True)
class Potential:
    """A local threshold rule with its thresholds and locality radius."""

    name: str
    alpha: float
    beta: float
    evaluator: Callable[[LocalView, int, int], float]
    radius: int = 1
    change_filter: Optional[Callable[[DynGraph, int, int], bool]] = None
    fast_evaluator: Optional[Callable[[DynGraph, int, int], float]] = None
    pair_stats: Optional[PairStatsRule] = None
    merged_base: Optional["Potential"] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.alpha > self.beta:
            raise ConfigError(f"alpha={self.alpha} exceeds beta={self.beta}")

    def value(self, g: DynGraph, u: int, v: int) -> float:
        """Evaluate on the live graph through a fresh locality view."""
        if self.fast_evaluator is not None:
            return self.fast_evaluator(g, u, v)
        return self.evaluator(LocalView(g, u, v, self.radius), u, v)

    def next_state(self, value: float, edge: bool) -> bool:
        if value < self.alpha:
            return False
        if value >= self.beta:
            return True
        return edge


# ---------------------------------------------------------------------------
# Property validation for user-supplied functions

def validate_proper(f: ProperFunction, samples: int = 1000, seed: int = 0,
                    grid_max: int = 14) -> None:
    """Randomized check that f is symmetric and non-decreasing in both
    arguments on an integer grid. Raises ConfigError with the violating
    sample on failure."""
    rng = random.Random(seed)
    for _ in range(samples):
        x = rng.randint(0, grid_max)
        y = rng.randint(0, grid_max)
        if f(x, y) != f(y, x):
            raise ConfigError(f"function not symmetric at ({x},{y}): "
                              f"f(x,y)={f(x, y)} f(y,x)={f(y, x)}")
        if f(x + 1, y) < f(x, y):
            raise ConfigError(f"function decreasing in first argument at ({x},{y})")
        if f(x, y + 1) < f(x, y):
            raise ConfigError(f"function decreasing in second argument at ({x},{y})")


def validate_degree_like(g_fn: DegreeLikeFunction, samples: int = 200, seed: int = 0,
                         max_nodes: int = 10) -> None:
    """Sampled check that the node function never grows when the node's
    neighborhood shrinks, and orders nodes consistently with closed
    neighborhood inclusion.

    ``max_nodes`` bounds the sampled graphs; functions backed by per-node
    attributes are only defined up to their attribute table's size.
    """
    if max_nodes < 2:
        raise ConfigError("degree-like validation needs at least 2 nodes")
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(2, max_nodes)
        g = DynGraph(n)
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < 0.5:
                    g.add_edge(a, b)
        tol = 1e-9  # comparisons tolerate float summation noise
        u = rng.randrange(n)
        try:
            before = g_fn(g, u)
        except Exception as exc:
            raise ConfigError(
                f"node function failed on a {n}-node validation graph: {exc}") from exc
        nbrs = list(g.neighbors(u))
        for w in nbrs:
            if rng.random() < 0.5:
                g.remove_edge(u, w)
        after = g_fn(g, u)
        if after > before + tol:
            raise ConfigError(
                f"function grew when node {u}'s neighborhood shrank: {before} -> {after}")
        # closed-neighborhood inclusion between two nodes of the same graph
        for v in range(n):
            if v == u:
                continue
            closed_u = set(g.neighbors(u)) | {u}
            closed_v = set(g.neighbors(v)) | {v}
            if closed_u >= closed_v and g_fn(g, u) < g_fn(g, v) - tol:
                raise ConfigError(
                    f"inclusion violated: node {u} covers node {v} but "
                    f"g({u})={g_fn(g, u)} < g({v})={g_fn(g, v)}")


PROPER_FUNCTIONS: dict[str, ProperFunction] = {
    "sum": lambda x, y: x + y,
    "min": min,
    "max": max,
    "product": lambda x, y: x * y,
}


# ---------------------------------------------------------------------------
# Degree based potentials

def min_degree_potential(alpha: float, beta: float) -> Potential:
    """Potential equal to the smaller endpoint degree.

    The isolated-core guarantee holds when alpha <= n-1 < beta, which makes
    edge creation impossible; the constructor itself only requires
    alpha <= beta.
    """
    return Potential(
        name="min_degree",
        alpha=alpha,
        beta=beta,
        evaluator=lambda view, u, v: min(view.degree(u), view.degree(v)),
        fast_evaluator=lambda g, u, v: min(len(g._adj[u]), len(g._adj[v])),
        params={"alpha": alpha, "beta": beta},
    )


def proper_degree_potential(f: ProperFunction, alpha: float, beta: float,
                            name: str = "proper_degree", validate: bool = True) -> Potential:
    """Potential f(d(u), d(v)) for a symmetric, non-decreasing f."""
    if validate:
        validate_proper(f)
    return Potential(
        name=name,
        alpha=alpha,
        beta=beta,
        evaluator=lambda view, u, v: f(view.degree(u), view.degree(v)),
        fast_evaluator=lambda g, u, v: f(len(g._adj[u]), len(g._adj[v])),
        params={"alpha": alpha, "beta": beta, "f": name},
    )


def degree_like_potential(f: ProperFunction, g_fn: DegreeLikeFunction,
                          alpha: float, beta: float,
                          name: str = "degree_like", validate: bool = True,
                          validate_nodes: int = 10) -> Potential:
    """Potential f(g(u), g(v)) for a proper f and a degree-like node function.

    ``validate_nodes`` caps the node count of the sampled validation graphs;
    pass the attribute table size for attribute-backed node functions.
    """
    if validate:
        validate_proper(f)
        validate_degree_like(g_fn, max_nodes=min(10, validate_nodes))
    return Potential(
        name=name,
        alpha=alpha,
        beta=beta,
        evaluator=lambda view, u, v: f(g_fn(view, u), g_fn(view, v)),
        fast_evaluator=lambda g, u, v: f(g_fn(g, u), g_fn(g, v)),
        params={"alpha": alpha, "beta": beta},
    )


def community_potential(alpha: float, beta: float) -> Potential:
    """Common neighbors plus the edge indicator plus edges among the common
    neighbors; rewards locally dense pairs."""

    def _eval(view: LocalView, u: int, v: int) -> float:
        return (view.common_neighbors(u, v) + view.edge(u, v)
                + view.common_neighbor_edges(u, v))

    def _fast(g: DynGraph, u: int, v: int) -> float:
        return (g.common_neighbors(u, v) + (1 if g.has_edge(u, v) else 0)
                + g.common_neighbor_edges(u, v))

    return Potential(name="community", alpha=alpha, beta=beta,
                     evaluator=_eval, fast_evaluator=_fast,
                     params={"alpha": alpha, "beta": beta})


# ---------------------------------------------------------------------------
# The cellular automaton potential

def rule110_value(beta: float, edge: int, cn: int, ce_fn: Callable[[], int]) -> float:
    """Branch cascade shared by every evaluation route of the automaton rule."""
    load = cn + edge
    if 66 <= load <= 70:
        return beta + 60 + ce_fn() - cn
    if load == 71:
        return beta + 12 - ce_fn()
    if 40 <= cn <= 41:
        return beta - edge
    return beta - 1 + edge


def rule110_potential(beta: float) -> Potential:
    """Threshold rule that drives the cell-gadget automaton; requires
    alpha == beta, so every scheduled pair is re-decided each round."""

    def _eval(view: LocalView, u: int, v: int) -> float:
        return rule110_value(beta, view.edge(u, v), view.common_neighbors(u, v),
                             lambda: view.common_neighbor_edges(u, v))

    def _fast(g: DynGraph, u: int, v: int) -> float:
        return rule110_value(beta, 1 if g.has_edge(u, v) else 0,
                             g.common_neighbors(u, v),
                             lambda: g.common_neighbor_edges(u, v))

    def _filter(g: DynGraph, u: int, v: int) -> bool:
        # pairs with no edge and few common neighbors can only hit the
        # default branch, which preserves absence
        return g.has_edge(u, v) or g.common_neighbors(u, v) >= 40

    def _decide(edge: int, cn: int, ce_fn: Callable[[], int]) -> int:
        val = rule110_value(beta, edge, cn, ce_fn)
        if val < beta:
            return 0
        return 1

    return Potential(
        name="rule110",
        alpha=beta,
        beta=beta,
        evaluator=_eval,
        fast_evaluator=_fast,
        change_filter=_filter,
        pair_stats=PairStatsRule(decide=_decide, cn_floor=40),
        params={"beta": beta},
    )


# ---------------------------------------------------------------------------
# Two rounds in one

def two_step_merge(base: Potential) -> Potential:
    """Radius-3 potential that advances the pair's neighborhood one round of
    the base rule and evaluates the base rule on the result.

    The construction per evaluated pair (u, v):
      a. take the nodes within distance 2 of the pair,
      b. re-decide every pair among them one round forward under the base
         rule, using information within distance 3,
      c. evaluate the base rule on (u, v) in that advanced fragment.

    With a full interaction set this reproduces two base rounds in one.
    The evaluator rebuilds the fragment for every pair, so it is only
    practical on small graphs; large runs go through the engine's
    incremental route.
    """
    if base.radius != 1:
        raise ConfigError(f"two_step_merge requires a radius-1 base, got {base.radius}")

    def _eval(view: LocalView, u: int, v: int) -> float:
        frag, nodes = view.materialize()
        old_to_new = {x: i for i, x in enumerate(nodes)}
        fu, fv = old_to_new[u], old_to_new[v]
        # distance-2 core inside the fragment; fragment distances match the
        # live graph up to the view radius
        core = set(_bfs_depths(frag, (fu, fv), 2))
        additions = []
        removals = []
        for x in sorted(core):
            for y in sorted(core):
                if y <= x:
                    continue
                val = base.evaluator(LocalView(frag, x, y, 1), x, y)
                edge = frag.has_edge(x, y)
                nxt = base.next_state(val, edge)
                if nxt and not edge:
                    additions.append((x, y))
                elif edge and not nxt:
                    removals.append((x, y))
        for x, y in removals:
            frag.remove_edge(x, y)
        for x, y in additions:
            frag.add_edge(x, y)
        return base.evaluator(LocalView(frag, fu, fv, 1), fu, fv)

    return Potential(
        name=f"{base.name}_merged",
        alpha=base.alpha,
        beta=base.beta,
        radius=3,
        evaluator=_eval,
        merged_base=base,
        params=dict(base.params),
    )


def _bfs_depths(g: DynGraph, sources: tuple[int, ...], depth: int) -> set[int]:
    seen = set(sources)
    frontier = list(sources)
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# Name registry used by the run config

def make_potential(name: str, alpha: float, beta: float, f: str | None = None,
                   profile=None) -> Potential:
    if name == "min_degree":
        return min_degree_potential(alpha, beta)
    if name == "proper_degree":
        if f not in PROPER_FUNCTIONS:
            raise ConfigError(f"potential.f must be one of {sorted(PROPER_FUNCTIONS)}, got {f!r}")
        return proper_degree_potential(PROPER_FUNCTIONS[f], alpha, beta, name=f"proper_{f}")
    if name == "degree_like_niceness":
        if profile is None:
            raise ConfigError("degree_like_niceness requires a social profile")
        from .social import niceness_g
        fn = PROPER_FUNCTIONS[f] if f else PROPER_FUNCTIONS["sum"]
        return degree_like_potential(fn, niceness_g(profile), alpha, beta,
                                     name="niceness", validate_nodes=profile.n)
    if name == "community":
        return community_potential(alpha, beta)
    if name == "rule110":
        if alpha != beta:
            raise ConfigError("rule110 potential requires alpha == beta")
        return rule110_potential(beta)
    if name == "rule110_merged":
        if alpha != beta:
            raise ConfigError("rule110 potential requires alpha == beta")
        return two_step_merge(rule110_potential(beta))
    raise ConfigError(f"unknown potential {name!r}")
