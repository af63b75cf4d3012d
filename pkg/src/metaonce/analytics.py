"""Graph search and structure analysis over scene graphs and merged graphs.

All operations are pure functions over an immutable AnalysisGraph and use
fixed tie-breaking (ascending vertex id, then ascending relation id) so that
identical inputs always produce identical outputs. Paths and traversal follow
edge direction; connectivity-style queries (articulation points, core
vertices) work on the undirected projection with parallel edges collapsed
and self-loops dropped.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping

from .errors import InvalidThreshold, NegativeWeight, UnknownVertex
from .graph import WorldState
from .merge import MergedGraph

Arc = tuple[str, str, str]  # subject, relation, object


@dataclass(frozen=True)
class Path:
    """A simple path: no repeated vertices, one (relation, weight) per hop."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, float], ...]
    total_weight: float
    hops: int

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"relation": r, "weight": w} for r, w in self.edges],
            "total_weight": self.total_weight,
            "hops": self.hops,
        }


@dataclass(frozen=True)
class PathScore:
    total_weight: float
    hops: int
    mean_edge_weight: float

    def to_dict(self) -> dict:
        return {
            "total_weight": self.total_weight,
            "hops": self.hops,
            "mean_edge_weight": self.mean_edge_weight,
        }


class AnalysisGraph:
    """Weighted adjacency view of a scene or merged graph.

    Parallel typed arcs between the same ordered pair collapse to the one
    with the smallest (weight, relation id), which keeps every path query
    deterministic. Default weight is 1; a per-relation weight map may
    override it.
    """

    def __init__(self, vertices: Iterable[str], arcs: Iterable[tuple[str, str, str, float]], directed: bool = True):
        self.directed = directed
        self._vertices: set[str] = set(vertices)
        self._adj: dict[str, dict[str, tuple[float, str]]] = {v: {} for v in self._vertices}
        for subject, relation, obj, weight in arcs:
            if weight < 0:
                raise NegativeWeight(f"arc ({subject!r}, {relation!r}, {obj!r}) has weight {weight}")
            for endpoint in (subject, obj):
                if endpoint not in self._vertices:
                    raise UnknownVertex(f"arc endpoint {endpoint!r} is not a vertex")
            self._store(subject, obj, weight, relation)
            if not directed:
                self._store(obj, subject, weight, relation)

    def _store(self, u: str, v: str, weight: float, relation: str) -> None:
        current = self._adj[u].get(v)
        if current is None or (weight, relation) < current:
            self._adj[u][v] = (weight, relation)

    @classmethod
    def from_scene(
        cls, world: WorldState, scene_id: str, weights: Mapping[str, float] | None = None
    ) -> "AnalysisGraph":
        graph = world.scene(scene_id)
        arcs = [
            (e.subject, e.relation, e.object, _weight_of(e.relation, weights))
            for e in graph.edges()
        ]
        return cls(graph.members, arcs, directed=True)

    @classmethod
    def from_merged(cls, merged: MergedGraph, weights: Mapping[str, float] | None = None) -> "AnalysisGraph":
        arcs = [
            (subject, relation, obj, _weight_of(relation, weights))
            for subject, relation, obj in merged.edges
        ]
        return cls(merged.entities.keys(), arcs, directed=True)

    # -- views -------------------------------------------------------------

    @property
    def vertices(self) -> set[str]:
        return set(self._vertices)

    def require(self, v: str) -> None:
        if v not in self._vertices:
            raise UnknownVertex(f"unknown vertex {v!r}")

    def successors(self, u: str) -> list[tuple[str, float, str]]:
        """(vertex, weight, relation) triples in ascending vertex order."""
        return [(v, wr[0], wr[1]) for v, wr in sorted(self._adj[u].items())]

    def arc(self, u: str, v: str) -> tuple[float, str] | None:
        return self._adj[u].get(v)

    def undirected_adjacency(self) -> dict[str, set[str]]:
        """Projection used by connectivity queries: symmetric, no self-loops."""
        adj: dict[str, set[str]] = {v: set() for v in self._vertices}
        for u, targets in self._adj.items():
            for v in targets:
                if u != v:
                    adj[u].add(v)
                    adj[v].add(u)
        return adj


def _weight_of(relation: str, weights: Mapping[str, float] | None) -> float:
    if weights is None:
        return 1.0
    return float(weights.get(relation, 1.0))


# -- traversal ----------------------------------------------------------------


def traverse(g: AnalysisGraph, start: str, strategy: Literal["bfs", "dfs"] = "bfs") -> list[str]:
    """Visit every vertex reachable from ``start`` exactly once, expanding
    neighbors in ascending id order."""
    g.require(start)
    if strategy == "bfs":
        order = [start]
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v, _, _ in g.successors(u):
                if v not in seen:
                    seen.add(v)
                    order.append(v)
                    queue.append(v)
        return order
    if strategy == "dfs":
        order: list[str] = []
        seen = set()
        stack = [start]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            order.append(u)
            for v, _, _ in reversed(g.successors(u)):
                if v not in seen:
                    stack.append(v)
        return order
    raise ValueError(f"unknown traversal strategy {strategy!r}")


# -- shortest paths -------------------------------------------------------------


def sssp(g: AnalysisGraph, source: str) -> dict[str, tuple[float, str | None]]:
    """Exact single-source shortest distances with predecessors.

    Unreachable vertices are absent. Among equally short routes to a vertex
    the predecessor with the smallest id wins.
    """
    g.require(source)
    dist = _dijkstra(g, source)
    result: dict[str, tuple[float, str | None]] = {source: (0.0, None)}
    for v, d in dist.items():
        if v == source:
            continue
        best: str | None = None
        for u in sorted(dist):
            arc = g.arc(u, v)
            if arc is not None and u != v and dist[u] + arc[0] == d:
                best = u
                break
        result[v] = (d, best)
    return result


def _dijkstra(g: AnalysisGraph, source: str) -> dict[str, float]:
    dist: dict[str, float] = {source: 0.0}
    heap: list[tuple[float, str]] = [(0.0, source)]
    settled: set[str] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        for v, w, _ in g.successors(u):
            alt = d + w
            if v not in dist or alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return dist


def shortest_path(g: AnalysisGraph, s: str, t: str) -> Path | None:
    """Minimum-weight path from s to t; among equals, the lexicographically
    smallest vertex sequence. None when t is unreachable.

    Every minimum-weight path lies in the subgraph of tight arcs
    (dist[u] + w == dist[v]), so the lexicographic winner is built greedily:
    at each step take the smallest tight successor from which t is still
    reachable without revisiting the path so far.
    """
    g.require(s)
    g.require(t)
    if s == t:
        return Path(vertices=(s,), edges=(), total_weight=0.0, hops=0)
    dist = _dijkstra(g, s)
    if t not in dist:
        return None

    tight: dict[str, list[str]] = {u: [] for u in dist}
    for u in dist:
        for v, w, _ in g.successors(u):
            if v in dist and dist[u] + w == dist[v]:
                tight[u].append(v)

    def reaches_target(start: str, banned: set[str]) -> bool:
        if start == t:
            return True
        stack = [start]
        seen = {start}
        while stack:
            u = stack.pop()
            for v in tight[u]:
                if v == t:
                    return True
                if v not in seen and v not in banned:
                    seen.add(v)
                    stack.append(v)
        return False

    sequence = [s]
    used = {s}
    while sequence[-1] != t:
        current = sequence[-1]
        step = None
        for v in sorted(tight[current]):
            if v not in used and reaches_target(v, used):
                step = v
                break
        assert step is not None, "tight subgraph must reach the target"
        sequence.append(step)
        used.add(step)

    edges = []
    total = 0.0
    for u, v in zip(sequence, sequence[1:]):
        w, relation = g.arc(u, v)
        edges.append((relation, w))
        total += w
    return Path(vertices=tuple(sequence), edges=tuple(edges), total_weight=total, hops=len(edges))


def all_simple_paths(g: AnalysisGraph, s: str, t: str, max_hops: int) -> list[Path]:
    """Every simple path from s to t with at most ``max_hops`` edges, sorted
    by (total weight, hop count, vertex sequence). s == t yields []."""
    g.require(s)
    g.require(t)
    if max_hops < 1:
        raise ValueError("max_hops must be at least 1")
    found: list[Path] = []
    sequence = [s]
    edges: list[tuple[str, float]] = []

    def extend(u: str, weight: float) -> None:
        if u == t and edges:
            found.append(
                Path(
                    vertices=tuple(sequence),
                    edges=tuple(edges),
                    total_weight=weight,
                    hops=len(edges),
                )
            )
            return
        if len(edges) == max_hops:
            return
        for v, w, relation in g.successors(u):
            if v in sequence:
                continue
            sequence.append(v)
            edges.append((relation, w))
            extend(v, weight + w)
            sequence.pop()
            edges.pop()

    extend(s, 0.0)
    found.sort(key=lambda p: (p.total_weight, p.hops, p.vertices))
    return found


def evaluate_path(p: Path) -> PathScore:
    """Score a path by total weight, hop count and mean edge weight."""
    if p.hops == 0:
        return PathScore(0.0, 0, 0.0)
    return PathScore(p.total_weight, p.hops, p.total_weight / p.hops)


# -- structure ------------------------------------------------------------------


def articulation_points(g: AnalysisGraph) -> set[str]:
    """Vertices whose removal increases the number of connected components
    of the undirected projection."""
    adj = g.undirected_adjacency()
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    result: set[str] = set()
    counter = 0

    for root in sorted(adj):
        if root in index:
            continue
        root_children = 0
        # Iterative DFS: (vertex, parent, neighbor iterator).
        stack = [(root, None, iter(sorted(adj[root])))]
        index[root] = low[root] = counter
        counter += 1
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for v in it:
                if v not in index:
                    index[v] = low[v] = counter
                    counter += 1
                    if u == root:
                        root_children += 1
                    stack.append((v, u, iter(sorted(adj[v]))))
                    advanced = True
                    break
                elif v != parent:
                    low[u] = min(low[u], index[v])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if p != root and low[u] >= index[p]:
                        result.add(p)
        if root_children >= 2:
            result.add(root)
    return result


def core_vertices(g: AnalysisGraph, threshold: float) -> set[str]:
    """Vertices of degree >= 2 whose local clustering coefficient reaches the
    threshold: (edges among neighbors) / (deg * (deg - 1) / 2)."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidThreshold(f"threshold must be within [0, 1]: {threshold}")
    adj = g.undirected_adjacency()
    result: set[str] = set()
    for v, neighbors in adj.items():
        degree = len(neighbors)
        if degree < 2:
            continue
        ordered = sorted(neighbors)
        linked = sum(
            1
            for i, u in enumerate(ordered)
            for w in ordered[i + 1 :]
            if w in adj[u]
        )
        coefficient = linked / (degree * (degree - 1) / 2)
        if coefficient >= threshold:
            result.add(v)
    return result
