"""Visibility roadmap over obstacle offset nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import EnvironmentMap, Point2, offset_vertices, segments_clear


class EmptyRoadmap(ValueError):
    pass


class PointRejected(ValueError):
    pass


@dataclass(frozen=True)
class RoadmapNode:
    position: Point2
    obstacle: int | None = None
    vertex: int | None = None
    tag: str | None = None  # free points: "start", "end", ...

    @property
    def is_free(self) -> bool:
        return self.obstacle is None


@dataclass
class RoadmapGraph:
    """Nodes plus a dense symmetric matrix of edge lengths (0 = no edge)."""

    nodes: list[RoadmapNode]
    adjacency: np.ndarray
    offset_d: float
    eps: float = 1e-6

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def positions(self) -> np.ndarray:
        return np.asarray([n.position for n in self.nodes], dtype=float).reshape(-1, 2)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def copy(self) -> "RoadmapGraph":
        return RoadmapGraph(list(self.nodes), self.adjacency.copy(), self.offset_d, self.eps)

    def nodes_of(self, obstacle: int) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.obstacle == obstacle]


def candidate_nodes(env: EnvironmentMap, d: float) -> list[RoadmapNode]:
    """Offset nodes of every obstacle, before any filtering."""
    out = []
    for oi, obs in enumerate(env.obstacles):
        for vi, p in offset_vertices(obs, d, env.eps):
            out.append(RoadmapNode(p, oi, vi))
    return out


def visibility_matrix(env: EnvironmentMap, pts: np.ndarray, eps: float) -> np.ndarray:
    n = len(pts)
    adj = np.zeros((n, n))
    if n < 2:
        return adj
    i, j = np.triu_indices(n, 1)
    length = np.hypot(*(pts[j] - pts[i]).T)
    ok = length > eps
    clear = np.zeros(len(i), dtype=bool)
    clear[ok] = segments_clear(env, pts[i[ok]], pts[j[ok]], eps)
    adj[i[clear], j[clear]] = length[clear]
    adj[j[clear], i[clear]] = length[clear]
    return adj


def build_roadmap(env: EnvironmentMap, d: float, allow_empty: bool = False) -> RoadmapGraph:
    """Offset nodes around every obstacle joined by line-of-sight edges.

    Nodes that fall outside the boundary or inside (or touching) another
    obstacle are discarded.  With ``allow_empty=False`` a map that yields no
    usable node raises :class:`EmptyRoadmap`.
    """
    if not d > 0:
        raise ValueError(f"offset must be positive, got {d}")
    nodes = [n for n in candidate_nodes(env, d) if env.free_point(n.position) is None]
    if not nodes and env.obstacles and not allow_empty:
        raise EmptyRoadmap(f"no usable roadmap nodes at offset {d}")
    pts = np.asarray([n.position for n in nodes], dtype=float).reshape(-1, 2)
    return RoadmapGraph(nodes, visibility_matrix(env, pts, env.eps), d, env.eps)


def insert_point(g: RoadmapGraph, env: EnvironmentMap, p, tag: str | None = None) -> int:
    """Append a free point to g in place, linking it to every visible node."""
    p = Point2(*p)
    problem = env.free_point(p)
    if problem is not None:
        raise PointRejected(f"point ({p.x}, {p.y}) {problem}")
    n = len(g.nodes)
    row = np.zeros(n + 1)
    if n:
        pts = g.positions
        length = np.hypot(*(pts - np.asarray(p)).T)
        ok = length > g.eps
        idx = np.nonzero(ok)[0]
        clear = segments_clear(env, np.repeat([p], len(idx), axis=0), pts[idx], g.eps)
        row[idx[clear]] = length[idx[clear]]
    adj = np.zeros((n + 1, n + 1))
    adj[:n, :n] = g.adjacency
    adj[n, :] = row
    adj[:, n] = row
    g.nodes.append(RoadmapNode(p, tag=tag))
    g.adjacency = adj
    return n


@dataclass(frozen=True)
class Path:
    nodes: list[int] = field(default_factory=list)
    length: float = 0.0


def shortest_path(
    g: RoadmapGraph, a: int, b: int, allowed: np.ndarray | None = None
) -> Path | None:
    """Dijkstra on the dense matrix; returns None when b is unreachable.

    ``allowed`` optionally masks which nodes may appear as intermediates
    (the endpoints are always allowed).  Ties settle on the lowest node
    index, so results are reproducible.
    """
    n = len(g.nodes)
    for k in (a, b):
        if not 0 <= k < n:
            raise IndexError(f"node {k} out of range for {n} nodes")
    if a == b:
        return Path([a], 0.0)
    adj = g.adjacency
    usable = np.ones(n, dtype=bool) if allowed is None else np.asarray(allowed, bool).copy()
    usable[a] = usable[b] = True
    dist = np.full(n, math.inf)
    prev = np.full(n, -1)
    done = ~usable
    dist[a] = 0.0
    while True:
        cand = np.where(done, math.inf, dist)
        u = int(np.argmin(cand))
        if not math.isfinite(cand[u]):
            return None
        if u == b:
            break
        done[u] = True
        w = adj[u]
        nd = dist[u] + w
        better = (w > 0) & ~done & (nd < dist)
        dist[better] = nd[better]
        prev[better] = u
    path = [b]
    while path[-1] != a:
        path.append(int(prev[path[-1]]))
    path.reverse()
    return Path(path, float(dist[b]))
