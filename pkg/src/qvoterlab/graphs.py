"""Immutable multilayer network storage with per-layer CSR adjacency.

Layers are simple undirected graphs over a shared node set; neighbor lists
are kept sorted so sampling by index is O(1) and set operations are O(deg).
The aggregate view (union of layers with layer-count edge weights) is the
substrate for the monoplex seeding strategies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GraphError(ValueError):
    """Invalid graph input: out-of-range id, self-loop or duplicate edge."""


@dataclass(frozen=True)
class MultiplexNetwork:
    """N nodes, L layers; per-layer sorted neighbor lists in CSR form.

    ``offsets[a, i]:offsets[a, i+1]`` indexes node i's neighbors of layer a
    inside the flat ``neighbors`` array. Instances are immutable after
    construction and safe for concurrent readers.
    """

    n: int
    layer_count: int
    offsets: np.ndarray    # int64, shape (L, n+1), absolute into `neighbors`
    neighbors: np.ndarray  # int32, flat concatenation of all layers

    def degree(self, i: int, layer: int) -> int:
        self._check(i, layer)
        return int(self.offsets[layer, i + 1] - self.offsets[layer, i])

    def neighbors_of(self, i: int, layer: int) -> np.ndarray:
        self._check(i, layer)
        return self.neighbors[self.offsets[layer, i]:self.offsets[layer, i + 1]]

    def degrees(self, layer: int) -> np.ndarray:
        if not 0 <= layer < self.layer_count:
            raise GraphError(f"layer {layer} out of range")
        return np.diff(self.offsets[layer]).astype(np.int64)

    def edge_count(self, layer: int) -> int:
        return int(self.degrees(layer).sum()) // 2

    def layer_edges(self, layer: int) -> list[tuple[int, int]]:
        """Edges of one layer, each listed once as (u, v) with u < v."""
        out = []
        offs = self.offsets[layer]
        for u in range(self.n):
            for v in self.neighbors[offs[u]:offs[u + 1]]:
                if u < v:
                    out.append((u, int(v)))
        return out

    def _check(self, i: int, layer: int) -> None:
        if not 0 <= layer < self.layer_count:
            raise GraphError(f"layer {layer} out of range")
        if not 0 <= i < self.n:
            raise GraphError(f"node {i} out of range")


@dataclass(frozen=True)
class AggregateGraph:
    """Union of all layers; weight = number of layers containing the edge."""

    n: int
    offsets: np.ndarray    # int64, shape (n+1,)
    neighbors: np.ndarray  # int32, sorted per node
    weights: np.ndarray    # int32, parallel to `neighbors`

    def degree(self, i: int) -> int:
        return int(self.offsets[i + 1] - self.offsets[i])

    def weighted_degree(self, i: int) -> int:
        return int(self.weights[self.offsets[i]:self.offsets[i + 1]].sum())

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.neighbors[self.offsets[i]:self.offsets[i + 1]]

    def weights_of(self, i: int) -> np.ndarray:
        return self.weights[self.offsets[i]:self.offsets[i + 1]]

    def edge_weights(self) -> dict[tuple[int, int], int]:
        out = {}
        for u in range(self.n):
            for v, w in zip(self.neighbors_of(u), self.weights_of(u)):
                if u < v:
                    out[(u, int(v))] = int(w)
        return out


def build(n: int, edge_lists: list[list[tuple[int, int]]]) -> MultiplexNetwork:
    """Assemble a multiplex network from per-layer undirected edge lists.

    Rejects out-of-range ids, self-loops and duplicate edges within a layer;
    generator bugs must surface rather than be silently deduplicated.
    """
    if n <= 0:
        raise GraphError("node count must be positive")
    if len(edge_lists) < 1:
        raise GraphError("at least one layer is required")

    adjacency: list[list[list[int]]] = []
    for layer, edges in enumerate(edge_lists):
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"layer {layer}: node id out of range in edge ({u}, {v})")
            if u == v:
                raise GraphError(f"layer {layer}: self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"layer {layer}: duplicate edge {key}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        adjacency.append(adj)

    n_layers = len(adjacency)
    offsets = np.zeros((n_layers, n + 1), dtype=np.int64)
    flat: list[int] = []
    pos = 0
    for a, adj in enumerate(adjacency):
        offsets[a, 0] = pos
        for i in range(n):
            nbrs = sorted(adj[i])
            flat.extend(nbrs)
            pos += len(nbrs)
            offsets[a, i + 1] = pos
    neighbors = np.asarray(flat, dtype=np.int32)
    return MultiplexNetwork(n=n, layer_count=n_layers, offsets=offsets, neighbors=neighbors)


def degree(net: MultiplexNetwork, i: int, layer: int) -> int:
    """Number of distinct neighbors of node i in the given layer."""
    return net.degree(i, layer)


def aggregate(net: MultiplexNetwork) -> AggregateGraph:
    """Union graph across layers with exact layer-count edge weights."""
    counts: list[dict[int, int]] = [dict() for _ in range(net.n)]
    for a in range(net.layer_count):
        offs = net.offsets[a]
        for u in range(net.n):
            for v in net.neighbors[offs[u]:offs[u + 1]]:
                counts[u][int(v)] = counts[u].get(int(v), 0) + 1

    offsets = np.zeros(net.n + 1, dtype=np.int64)
    neigh: list[int] = []
    weights: list[int] = []
    pos = 0
    for u in range(net.n):
        for v in sorted(counts[u]):
            neigh.append(v)
            weights.append(counts[u][v])
        pos += len(counts[u])
        offsets[u + 1] = pos
    return AggregateGraph(
        n=net.n,
        offsets=offsets,
        neighbors=np.asarray(neigh, dtype=np.int32),
        weights=np.asarray(weights, dtype=np.int32),
    )


def write_edge_text(net: MultiplexNetwork) -> str:
    """Serialize: header ``# n=<N> L=<L>``, then ``layer<TAB>src<TAB>dst``."""
    lines = [f"# n={net.n} L={net.layer_count}"]
    for a in range(net.layer_count):
        for u, v in net.layer_edges(a):
            lines.append(f"{a}\t{u}\t{v}")
    return "\n".join(lines) + "\n"


def write_edge_file(net: MultiplexNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_edge_text(net))


def read_edge_text(text: str) -> MultiplexNetwork:
    """Parse the edge-file format written by :func:`write_edge_text`."""
    lines = text.splitlines()
    if not lines:
        raise GraphError("empty edge file")
    parts = lines[0].strip().split()
    if len(parts) != 3 or parts[0] != "#" or not parts[1].startswith("n=") or not parts[2].startswith("L="):
        raise GraphError(f"malformed header line: {lines[0]!r}")
    try:
        n = int(parts[1][2:])
        n_layers = int(parts[2][2:])
    except ValueError as exc:
        raise GraphError(f"malformed header line: {lines[0]!r}") from exc
    if n_layers < 1:
        raise GraphError("layer count must be >= 1")
    edge_lists: list[list[tuple[int, int]]] = [[] for _ in range(n_layers)]
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise GraphError(f"line {lineno}: expected 'layer<TAB>src<TAB>dst', got {line!r}")
        try:
            a, u, v = (int(x) for x in fields)
        except ValueError as exc:
            raise GraphError(f"line {lineno}: non-integer field in {line!r}") from exc
        if not 0 <= a < n_layers:
            raise GraphError(f"line {lineno}: layer id {a} out of range")
        edge_lists[a].append((u, v))
    return build(n, edge_lists)


def read_edge_file(path) -> MultiplexNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return read_edge_text(fh.read())
