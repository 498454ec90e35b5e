"""Independent reference implementations used only by the tests."""

import math

import numpy as np
from shapely.geometry import LineString
from shapely.geometry import Polygon as SPolygon

from tubeweave.geometry import rectangle, random_environment


def offset_points(vertices, d):
    """Bisector offsets of convex CCW vertices, recomputed from scratch."""
    v = np.asarray(vertices, float)
    n = len(v)
    out = []
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if turn <= 0:
            continue
        u1 = (a - b) / np.linalg.norm(a - b)
        u2 = (c - b) / np.linalg.norm(c - b)
        bis = -(u1 + u2)
        out.append(b + d * bis / np.linalg.norm(bis))
    return out


def los_edges(env, positions, eps):
    """Brute-force line of sight via shapely distances."""
    obstacles = [SPolygon(o.vertices) for o in env.obstacles]
    outer = SPolygon(env.boundary.vertices)
    edges = set()
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if math.dist(positions[i], positions[j]) <= eps:
                continue
            line = LineString([positions[i], positions[j]])
            if not outer.contains(line) or line.distance(outer.exterior) <= eps:
                continue
            if all(line.distance(o) > eps for o in obstacles):
                edges.add((i, j))
    return edges


def dijkstra_lengths(adjacency, source):
    """Textbook O(n^2) Dijkstra with Python lists."""
    n = len(adjacency)
    dist = [math.inf] * n
    dist[source] = 0.0
    seen = [False] * n
    for _ in range(n):
        u = min((k for k in range(n) if not seen[k]), key=lambda k: dist[k], default=None)
        if u is None or dist[u] == math.inf:
            break
        seen[u] = True
        for v in range(n):
            w = adjacency[u][v]
            if w > 0 and dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
    return dist


def small_env(seed):
    """Seeded map with 1 to 5 obstacles for the roadmap oracle runs."""
    n = 1 + seed % 5
    return random_environment(seed, n, rectangle(0, 0, 1000, 1000), (40, 120), min_gap=5.0)
