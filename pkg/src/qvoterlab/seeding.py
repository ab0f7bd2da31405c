"""Seed-set selection: Random, Degree, PageRank, VoteRank, k-Shell, CIM.

All structural strategies operate on the weighted aggregate graph (the union
of layers, edge weight = number of layers containing the edge) and break
ties by ascending node id, so every strategy except `random` is a pure
function of the network. Budgets are exact: |seed_set| = ceil(f * N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import OPINION_A, OPINION_U, Configuration
from .graphs import AggregateGraph, MultiplexNetwork, aggregate

STRATEGY_KINDS = ("random", "degree", "pagerank", "voterank", "kshell", "cim")


class SeedingError(ValueError):
    """Invalid seeding request."""


@dataclass(frozen=True)
class Strategy:
    kind: str
    damping: float = 0.85           # pagerank
    clique_min_size: int = 3        # cim
    clique_cap: int = 10 ** 6       # cim enumeration bound

    def validate(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise SeedingError(f"unknown strategy {self.kind!r}")
        if not 0.0 < self.damping < 1.0:
            raise SeedingError("damping must lie in (0, 1)")
        if self.clique_min_size < 2 or self.clique_cap < 1:
            raise SeedingError("invalid clique bounds")


@dataclass(frozen=True)
class SeedPlan:
    budget_fraction: float
    seed_set: tuple[int, ...]
    strategy: Strategy


def _weighted_degrees(agg: AggregateGraph) -> np.ndarray:
    """Sum of per-layer degrees for each node."""
    out = np.zeros(agg.n, dtype=np.int64)
    for i in range(agg.n):
        out[i] = agg.weighted_degree(i)
    return out


def _top_k_by_score(scores: np.ndarray, k: int) -> list[int]:
    """k highest scores, ties broken by ascending node id."""
    order = np.lexsort((np.arange(len(scores)), -np.asarray(scores, dtype=np.float64)))
    return [int(i) for i in order[:k]]


def pagerank_scores(agg: AggregateGraph, damping: float = 0.85,
                    tol: float = 1e-10, max_iter: int = 100000) -> np.ndarray:
    """Power iteration on the weight-normalized aggregate graph.

    Dangling (isolated) nodes redistribute their mass uniformly; iteration
    stops when the L1 change drops below `tol`.
    """
    n = agg.n
    wdeg = _weighted_degrees(agg).astype(np.float64)
    dangling = wdeg == 0
    seg = np.repeat(np.arange(n), np.diff(agg.offsets))
    w_flat = agg.weights.astype(np.float64)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        z = np.where(dangling, 0.0, x / np.where(dangling, 1.0, wdeg))
        inflow = np.bincount(seg, weights=w_flat * z[agg.neighbors], minlength=n)
        x_new = (1.0 - damping) / n + damping * (inflow + x[dangling].sum() / n)
        if np.abs(x_new - x).sum() < tol:
            return x_new
        x = x_new
    return x


def voterank_order(agg: AggregateGraph, k: int) -> list[int]:
    """Iterative vote-and-suppress selection.

    Every node starts with voting ability 1; each round scores nodes by the
    sum of their neighbors' abilities, elects the maximum (lowest id on
    ties), zeroes its ability and lowers each neighbor's ability by 1/<k>
    (floored at 0), where <k> is the mean aggregate degree. Selection
    continues through zero-score candidates so the budget is always filled.
    """
    n = agg.n
    degs = np.diff(agg.offsets)
    mean_deg = float(degs.sum()) / n if n else 0.0
    suppression = 1.0 / mean_deg if mean_deg > 0 else 0.0
    seg = np.repeat(np.arange(n), degs)
    ability = np.ones(n, dtype=np.float64)
    selected: list[int] = []
    chosen = np.zeros(n, dtype=bool)
    for _ in range(min(k, n)):
        scores = np.bincount(seg, weights=ability[agg.neighbors], minlength=n)
        scores[chosen] = -np.inf
        best = int(np.argmax(scores))  # argmax takes the lowest index on ties
        selected.append(best)
        chosen[best] = True
        ability[best] = 0.0
        nbrs = agg.neighbors_of(best)
        ability[nbrs] = np.maximum(ability[nbrs] - suppression, 0.0)
    return selected


def core_numbers(agg: AggregateGraph) -> np.ndarray:
    """k-core decomposition of the (unweighted) aggregate graph.

    Min-heap peeling: repeatedly remove the node of smallest residual
    degree; its core number is the largest residual degree seen so far.
    """
    import heapq

    n = agg.n
    deg = np.diff(agg.offsets).astype(np.int64)
    cur = deg.copy()
    removed = np.zeros(n, dtype=bool)
    core = np.zeros(n, dtype=np.int64)
    level = 0
    heap = [(int(deg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != cur[v]:
            continue
        removed[v] = True
        level = max(level, int(cur[v]))
        core[v] = level
        for u in agg.neighbors_of(v):
            if not removed[u] and cur[u] > cur[v]:
                cur[u] -= 1
                heapq.heappush(heap, (int(cur[u]), int(u)))
    return core


def maximal_cliques(agg: AggregateGraph, min_size: int = 3,
                    cap: int = 10 ** 6) -> list[tuple[int, ...]]:
    """Maximal cliques of size >= min_size via Bron-Kerbosch with pivoting.

    Enumeration stops after `cap` cliques to bound worst-case inputs.
    """
    adj = [set(int(v) for v in agg.neighbors_of(u)) for u in range(agg.n)]
    cliques: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> bool:
        if len(cliques) >= cap:
            return False
        if not p and not x:
            if len(r) >= min_size:
                cliques.append(tuple(sorted(r)))
            return len(cliques) < cap
        pivot = max(p | x, key=lambda v: (len(adj[v] & p), -v))
        for v in sorted(p - adj[pivot]):
            if not expand(r + [v], p & adj[v], x & adj[v]):
                return False
            p = p - {v}
            x = x | {v}
        return True

    expand([], set(range(agg.n)), set())
    return cliques


def cim_order(agg: AggregateGraph, k: int, min_size: int = 3,
              cap: int = 10 ** 6) -> list[int]:
    """Greedy largest-clique-first allocation.

    Cliques are ranked by size, then total weighted degree, then member ids;
    whole cliques are consumed until the budget would overflow, after which
    the next clique contributes its highest-degree members. Any remaining
    budget falls back to weighted-degree order over unselected nodes.
    """
    wdeg = _weighted_degrees(agg)
    cliques = maximal_cliques(agg, min_size=min_size, cap=cap)
    ranked = sorted(
        cliques,
        key=lambda c: (-len(c), -int(wdeg[list(c)].sum()), c),
    )
    selected: list[int] = []
    chosen = np.zeros(agg.n, dtype=bool)
    for clique in ranked:
        if len(selected) >= k:
            break
        members = [v for v in clique if not chosen[v]]
        members.sort(key=lambda v: (-int(wdeg[v]), v))
        for v in members:
            if len(selected) >= k:
                break
            selected.append(v)
            chosen[v] = True
    if len(selected) < k:
        rest = [v for v in range(agg.n) if not chosen[v]]
        rest.sort(key=lambda v: (-int(wdeg[v]), v))
        selected.extend(rest[: k - len(selected)])
    return selected[:k]


def select_seeds(net: MultiplexNetwork, strategy: Strategy, f: float,
                 rng: np.random.Generator | None = None,
                 agg: AggregateGraph | None = None) -> SeedPlan:
    """Pick ceil(f*N) seed nodes under the given strategy."""
    strategy.validate()
    if not 0.0 < f <= 1.0:
        raise SeedingError("budget fraction f must lie in (0, 1]")
    k = math.ceil(f * net.n)
    if k > net.n:
        raise SeedingError("budget exceeds node count")

    if strategy.kind == "random":
        if rng is None:
            raise SeedingError("random strategy needs an RNG")
        seeds = [int(v) for v in rng.choice(net.n, size=k, replace=False)]
        return SeedPlan(f, tuple(sorted(seeds)), strategy)

    if agg is None:
        agg = aggregate(net)
    if len(agg.neighbors) == 0:
        raise SeedingError(f"strategy {strategy.kind!r} needs a non-empty graph")

    if strategy.kind == "degree":
        seeds = _top_k_by_score(_weighted_degrees(agg), k)
    elif strategy.kind == "pagerank":
        seeds = _top_k_by_score(pagerank_scores(agg, strategy.damping), k)
    elif strategy.kind == "voterank":
        seeds = voterank_order(agg, k)
    elif strategy.kind == "kshell":
        core = core_numbers(agg)
        wdeg = _weighted_degrees(agg)
        order = sorted(range(net.n), key=lambda v: (-int(core[v]), -int(wdeg[v]), v))
        seeds = order[:k]
    else:  # cim
        seeds = cim_order(agg, k, strategy.clique_min_size, strategy.clique_cap)
    return SeedPlan(f, tuple(sorted(seeds)), strategy)


def apply_seeds(plan: SeedPlan, n: int) -> Configuration:
    """All-undecided configuration with the seed set holding opinion A."""
    states = np.full(n, OPINION_U, dtype=np.int8)
    for v in plan.seed_set:
        if not 0 <= v < n:
            raise SeedingError(f"seed id {v} out of range")
        states[v] = OPINION_A
    return Configuration.from_states(states)
