"""Planar geometry primitives used by the planner.

All lengths are millimetres. Predicates are eps-tolerant floating point and
deliberately conservative: a segment that touches an obstacle within ``eps``
is treated as colliding.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

EPS = 1e-6


class InvalidGeometry(ValueError):
    """Raised when a polygon or environment violates its invariants."""


class InvalidEnvironment(InvalidGeometry):
    pass


class PlacementError(RuntimeError):
    """Random obstacle placement gave up after its retry cap."""

    def __init__(self, placed: int, wanted: int, attempts: int):
        super().__init__(
            f"placed {placed} of {wanted} obstacles after {attempts} attempts"
        )
        self.placed = placed
        self.wanted = wanted
        self.attempts = attempts


class Point2(namedtuple("Point2", "x y")):
    __slots__ = ()

    def __new__(cls, x, y):
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidGeometry(f"non-finite point ({x}, {y})")
        return super().__new__(cls, x, y)


Segment = tuple  # (Point2-like, Point2-like)


def _xy(p) -> tuple[float, float]:
    return float(p[0]), float(p[1])


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(points: Sequence) -> float:
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def point_segment_distance(p, a, b) -> float:
    px, py = _xy(p)
    ax, ay = _xy(a)
    bx, by = _xy(b)
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def segment_distance(a0, a1, b0, b1) -> float:
    """Minimum distance between two closed segments (0 when they meet)."""
    o1 = cross(a0, a1, b0)
    o2 = cross(a0, a1, b1)
    o3 = cross(b0, b1, a0)
    o4 = cross(b0, b1, a1)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return 0.0
    return min(
        point_segment_distance(b0, a0, a1),
        point_segment_distance(b1, a0, a1),
        point_segment_distance(a0, b0, b1),
        point_segment_distance(a1, b0, b1),
    )


def _check_segment(s) -> None:
    (ax, ay), (bx, by) = _xy(s[0]), _xy(s[1])
    if ax == bx and ay == by:
        raise InvalidGeometry(f"zero-length segment at ({ax}, {ay})")


def segments_intersect(a: Segment, b: Segment, eps: float = EPS) -> bool:
    """True iff the segments share a point, counting near-touches within eps."""
    _check_segment(a)
    _check_segment(b)
    return segment_distance(a[0], a[1], b[0], b[1]) <= eps


def point_in_polygon(p, vertices) -> bool:
    """Even-odd ray casting. Points exactly on the boundary are unreliable."""
    px, py = _xy(p)
    inside = False
    n = len(vertices)
    j = n - 1
    for i in range(n):
        xi, yi = vertices[i]
        xj, yj = vertices[j]
        if (yi > py) != (yj > py):
            if px < (xj - xi) * (py - yi) / (yj - yi) + xi:
                inside = not inside
        j = i
    return inside


# --- vectorised kernels ---------------------------------------------------


def _cross_v(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (
        a[..., 1] - o[..., 1]
    ) * (b[..., 0] - o[..., 0])


def _point_seg_dist_v(p, a, b):
    d = b - a
    L2 = np.einsum("...i,...i->...", d, d)
    t = np.einsum("...i,...i->...", p - a, d) / np.where(L2 == 0, 1.0, L2)
    t = np.clip(np.where(L2 == 0, 0.0, t), 0.0, 1.0)
    r = p - (a + t[..., None] * d)
    return np.sqrt(r[..., 0] ** 2 + r[..., 1] ** 2)


def segment_distance_pairs(p0, p1, q0, q1) -> np.ndarray:
    """Elementwise distances between segments p[k] and q[k]."""
    a0, a1, b0, b1 = (np.asarray(v, float) for v in (p0, p1, q0, q1))
    o1 = _cross_v(a0, a1, b0)
    o2 = _cross_v(a0, a1, b1)
    o3 = _cross_v(b0, b1, a0)
    o4 = _cross_v(b0, b1, a1)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    d = np.minimum.reduce(
        [
            _point_seg_dist_v(b0, a0, a1),
            _point_seg_dist_v(b1, a0, a1),
            _point_seg_dist_v(a0, b0, b1),
            _point_seg_dist_v(a1, b0, b1),
        ]
    )
    return np.where(proper, 0.0, d)


def segment_distance_matrix(p0, p1, q0, q1) -> np.ndarray:
    """Pairwise segment distances, shape (len(p0), len(q0)).

    Same semantics as :func:`segment_distance`, broadcast over two arrays of
    segments given by endpoint arrays of shape (n, 2) and (m, 2).
    """
    a0 = np.asarray(p0, float)[:, None, :]
    a1 = np.asarray(p1, float)[:, None, :]
    b0 = np.asarray(q0, float)[None, :, :]
    b1 = np.asarray(q1, float)[None, :, :]
    return segment_distance_pairs(*np.broadcast_arrays(a0, a1, b0, b1))


# --- polygons -------------------------------------------------------------


def _is_simple(pts: np.ndarray) -> bool:
    n = len(pts)
    for i in range(n):
        a0, a1 = pts[i], pts[(i + 1) % n]
        if a0[0] == a1[0] and a0[1] == a1[1]:
            return False
        for j in range(i + 1, n):
            b0, b1 = pts[j], pts[(j + 1) % n]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # only the shared vertex may coincide: reject folding back
                shared = a1 if j == i + 1 else a0
                other_a = a0 if j == i + 1 else a1
                other_b = b1 if j == i + 1 else b0
                if cross(shared, other_a, other_b) == 0.0:
                    da = np.subtract(other_a, shared)
                    db = np.subtract(other_b, shared)
                    if float(np.dot(da, db)) > 0:
                        return False
                continue
            if segment_distance(a0, a1, b0, b1) == 0.0:
                return False
    return True


@dataclass(frozen=True)
class Polygon:
    """Simple polygon stored counterclockwise.

    Use :meth:`from_points` to accept either orientation.
    """

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        verts = tuple(Point2(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise InvalidGeometry(f"polygon needs >= 3 vertices, got {len(verts)}")
        if not _is_simple(np.asarray(verts)):
            raise InvalidGeometry("polygon is not simple")
        if signed_area(verts) <= 0:
            raise InvalidGeometry("polygon must be counterclockwise")

    @classmethod
    def from_points(cls, points: Iterable) -> "Polygon":
        pts = [Point2(*p) for p in points]
        if len(pts) >= 3 and signed_area(pts) < 0:
            pts.reverse()
        return cls(tuple(pts))

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.asarray(self.vertices, dtype=float)
        a.setflags(write=False)
        return a

    @cached_property
    def edge_starts(self) -> np.ndarray:
        return self.array

    @cached_property
    def edge_ends(self) -> np.ndarray:
        return np.roll(self.array, -1, axis=0)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def centroid(self) -> Point2:
        pts = self.array
        x, y = pts[:, 0], pts[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        c = x * yn - xn * y
        a = c.sum() / 2.0
        return Point2(((x + xn) * c).sum() / (6 * a), ((y + yn) * c).sum() / (6 * a))

    def contains(self, p) -> bool:
        return point_in_polygon(p, self.vertices)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        lo, hi = self.array.min(axis=0), self.array.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def bbox_gap(self, p) -> float:
        """Distance from p to the bounding box; a lower bound on any distance to the polygon."""
        x0, y0, x1, y1 = self.bbox
        dx = max(x0 - p[0], 0.0, p[0] - x1)
        dy = max(y0 - p[1], 0.0, p[1] - y1)
        return math.hypot(dx, dy)

    def distance_to_point(self, p) -> float:
        """0 inside, else distance to the boundary."""
        if self.contains(p):
            return 0.0
        return self.boundary_distance(p)

    def boundary_distance(self, p) -> float:
        pts = np.asarray([_xy(p)])
        return float(_point_seg_dist_v(pts, self.edge_starts, self.edge_ends).min())

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(tuple(Point2(x + dx, y + dy) for x, y in self.vertices))


def segment_intersects_polygon(s: Segment, p: Polygon, eps: float = EPS) -> bool:
    """True iff s touches any edge of p within eps or an endpoint lies inside p."""
    _check_segment(s)
    d = segment_distance_matrix([_xy(s[0])], [_xy(s[1])], p.edge_starts, p.edge_ends)
    if float(d.min()) <= eps:
        return True
    return p.contains(s[0]) or p.contains(s[1])


def segment_polygon_distance(a, b, p: Polygon) -> float:
    """0 when the segment meets or lies inside p."""
    d = segment_distance_matrix([_xy(a)], [_xy(b)], p.edge_starts, p.edge_ends)
    m = float(d.min())
    if m > 0 and p.contains(a):
        return 0.0
    return m


def polyline_polygon_distance(points, p: Polygon) -> float:
    pts = np.asarray(points, float)
    if len(pts) == 1:
        return p.distance_to_point(pts[0])
    d = segment_distance_matrix(pts[:-1], pts[1:], p.edge_starts, p.edge_ends)
    m = float(d.min())
    if m > 0 and p.contains(pts[0]):
        return 0.0
    return m


def polygon_distance(p: Polygon, q: Polygon) -> float:
    """0 when the polygons overlap or one contains the other."""
    d = float(
        segment_distance_matrix(p.edge_starts, p.edge_ends, q.edge_starts, q.edge_ends).min()
    )
    if d > 0 and (p.contains(q.vertices[0]) or q.contains(p.vertices[0])):
        return 0.0
    return d


def polygons_within(p: Polygon, q: Polygon, tol: float) -> bool:
    """polygon_distance(p, q) <= tol, with a bounding-box early exit."""
    px0, py0, px1, py1 = p.bbox
    qx0, qy0, qx1, qy1 = q.bbox
    gap = math.hypot(max(qx0 - px1, px0 - qx1, 0.0), max(qy0 - py1, py0 - qy1, 0.0))
    if gap > tol:
        return False
    return polygon_distance(p, q) <= tol


def regular_polygon(center, radius: float, n: int = 12, phase: float = 0.0) -> Polygon:
    cx, cy = _xy(center)
    ang = phase + 2 * np.pi * np.arange(n) / n
    return Polygon(tuple(Point2(cx + radius * math.cos(a), cy + radius * math.sin(a)) for a in ang))


def rectangle(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return Polygon.from_points([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


# --- environment ----------------------------------------------------------


@dataclass(frozen=True)
class EnvironmentMap:
    boundary: Polygon
    obstacles: tuple[Polygon, ...] = ()
    name: str = "env"
    eps: float = field(default=EPS, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        problem = self.first_violation()
        if problem is not None:
            raise InvalidEnvironment(problem)

    def first_violation(self) -> str | None:
        b = self.boundary
        for i, obs in enumerate(self.obstacles):
            for j, v in enumerate(obs.vertices):
                if not b.contains(v) or b.boundary_distance(v) <= self.eps:
                    return f"obstacle {i} vertex {j} not strictly inside boundary"
            d = segment_distance_matrix(obs.edge_starts, obs.edge_ends, b.edge_starts, b.edge_ends)
            if float(d.min()) <= self.eps:
                return f"obstacle {i} crosses the boundary"
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                if polygons_within(self.obstacles[i], self.obstacles[j], self.eps):
                    return f"obstacles {i} and {j} intersect"
        return None

    def with_obstacle(self, index: int, poly: Polygon) -> "EnvironmentMap":
        obs = list(self.obstacles)
        obs[index] = poly
        return EnvironmentMap(self.boundary, tuple(obs), self.name, self.eps)

    def segment_clear(self, a, b, eps: float | None = None) -> bool:
        """Line of sight: touches no obstacle and stays off the boundary."""
        eps = self.eps if eps is None else eps
        return bool(segments_clear(self, np.asarray([_xy(a)]), np.asarray([_xy(b)]), eps)[0])

    def free_point(self, p, eps: float | None = None) -> str | None:
        """Name the constraint a point violates, or None when it is free."""
        eps = self.eps if eps is None else eps
        if not self.boundary.contains(p) or self.boundary.boundary_distance(p) <= eps:
            return "outside boundary"
        for i, obs in enumerate(self.obstacles):
            if obs.bbox_gap(p) > eps:
                continue
            if obs.distance_to_point(p) <= eps:
                return f"inside obstacle {i}"
        return None


def _all_edges(env: EnvironmentMap) -> tuple[np.ndarray, np.ndarray]:
    polys = (env.boundary,) + env.obstacles
    return (
        np.concatenate([p.edge_starts for p in polys]),
        np.concatenate([p.edge_ends for p in polys]),
    )


def segments_clear(env: EnvironmentMap, starts: np.ndarray, ends: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Vectorised line-of-sight test.

    A segment is clear when it keeps more than eps from every edge and its
    start lies in free space.  With no edge contact the whole segment sits
    in one region, so testing one endpoint settles containment.
    """
    starts = np.asarray(starts, float).reshape(-1, 2)
    ends = np.asarray(ends, float).reshape(-1, 2)
    if len(starts) == 0:
        return np.zeros(0, dtype=bool)
    e0, e1 = _all_edges(env)
    smin, smax = np.minimum(starts, ends) - eps, np.maximum(starts, ends) + eps
    emin, emax = np.minimum(e0, e1), np.maximum(e0, e1)
    out = np.ones(len(starts), dtype=bool)
    chunk = max(1, 400_000 // max(1, len(e0)))
    for k in range(0, len(starts), chunk):
        sl = slice(k, k + chunk)
        # only edges whose boxes overlap the segment's box can come within eps
        near = (
            (smin[sl, None, 0] <= emax[None, :, 0]) & (emin[None, :, 0] <= smax[sl, None, 0])
            & (smin[sl, None, 1] <= emax[None, :, 1]) & (emin[None, :, 1] <= smax[sl, None, 1])
        )
        si, ei = np.nonzero(near)
        if len(si) == 0:
            continue
        d = segment_distance_pairs(starts[sl][si], ends[sl][si], e0[ei], e1[ei])
        out[k + si[d <= eps]] = False
    if out.any():
        idx = np.nonzero(out)[0]
        pts = starts[idx]
        free = points_in_polygon(pts, env.boundary.array)
        for obs in env.obstacles:
            free &= ~points_in_polygon(pts, obs.array)
        out[idx] = free
    return out


def points_in_polygon(pts: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Vectorised even-odd test, same rule as :func:`point_in_polygon`."""
    pts = np.asarray(pts, float).reshape(-1, 2)
    v = np.asarray(vertices, float)
    xi, yi = v[:, 0][None, :], v[:, 1][None, :]
    w = np.roll(v, 1, axis=0)
    xj, yj = w[:, 0][None, :], w[:, 1][None, :]
    px, py = pts[:, 0][:, None], pts[:, 1][:, None]
    straddle = (yi > py) != (yj > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = (xj - xi) * (py - yi) / (yj - yi) + xi
    hits = straddle & (px < xcross)
    return (hits.sum(axis=1) % 2) == 1


# --- offsetting -----------------------------------------------------------


def _unit(v):
    n = math.hypot(v[0], v[1])
    return (v[0] / n, v[1] / n)


def convex_vertices(p: Polygon) -> list[int]:
    pts = p.vertices
    n = len(pts)
    out = []
    for i in range(n):
        prev, v, nxt = pts[i - 1], pts[i], pts[(i + 1) % n]
        e1 = (v[0] - prev[0], v[1] - prev[1])
        e2 = (nxt[0] - v[0], nxt[1] - v[1])
        c = e1[0] * e2[1] - e1[1] * e2[0]
        if c > 1e-12 * math.hypot(*e1) * math.hypot(*e2):
            out.append(i)
    return out


def offset_vertices(p: Polygon, d: float, eps: float = EPS) -> list[tuple[int, Point2]]:
    """Offset nodes paired with the index of the vertex that produced them."""
    if not d > 0:
        raise ValueError(f"offset must be positive, got {d}")
    pts = p.vertices
    n = len(pts)
    out = []
    for i in convex_vertices(p):
        v = pts[i]
        u1 = _unit((pts[i - 1][0] - v[0], pts[i - 1][1] - v[1]))
        u2 = _unit((pts[(i + 1) % n][0] - v[0], pts[(i + 1) % n][1] - v[1]))
        bx, by = -(u1[0] + u2[0]), -(u1[1] + u2[1])
        bx, by = _unit((bx, by))
        node = Point2(v[0] + d * bx, v[1] + d * by)
        # large offsets on concave shapes can land back inside
        if p.distance_to_point(node) > eps:
            out.append((i, node))
    return out


def offset_nodes(p: Polygon, d: float) -> list[Point2]:
    """One node per convex vertex, at distance d along the outward bisector."""
    return [node for _, node in offset_vertices(p, d)]


def convex_hull(points) -> list[Point2]:
    """Andrew's monotone chain; CCW, collinear points dropped."""
    pts = sorted(set(_xy(p) for p in points))
    if len(pts) <= 2:
        return [Point2(*p) for p in pts]
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return [Point2(*p) for p in lower[:-1] + upper[:-1]]


def _line_intersection(p1, d1, p2, d2):
    den = d1[0] * d2[1] - d1[1] * d2[0]
    t = ((p2[0] - p1[0]) * d2[1] - (p2[1] - p1[1]) * d2[0]) / den
    return (p1[0] + t * d1[0], p1[1] + t * d1[1])


def _exterior_angle(prev, v, nxt) -> float:
    a1 = math.atan2(v[1] - prev[1], v[0] - prev[0])
    a2 = math.atan2(nxt[1] - v[1], nxt[0] - v[0])
    return (a2 - a1) % (2 * math.pi)


def _reduce_convex(pts: list, k: int) -> list:
    pts = [_xy(p) for p in pts]
    while len(pts) > k:
        n = len(pts)
        best = None
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            pa, pb = pts[i - 1], pts[(i + 2) % n]
            ext = _exterior_angle(pa, a, b) + _exterior_angle(a, b, pb)
            if ext >= math.pi - 1e-9:
                continue
            x = _line_intersection(a, (a[0] - pa[0], a[1] - pa[1]), b, (b[0] - pb[0], b[1] - pb[1]))
            added = abs(cross(a, x, b)) / 2
            if best is None or added < best[0]:
                best = (added, i, x)
        if best is None:
            return _enclosing_triangle(pts) if k == 3 else pts
        _, i, x = best
        j = (i + 1) % len(pts)
        if j == 0:
            pts = [x] + pts[1:i]
        else:
            pts = pts[:i] + [x] + pts[j + 1 :]
    return pts


def _enclosing_triangle(pts) -> list:
    a = np.asarray(pts, float)
    c = a.mean(axis=0)
    r = float(np.hypot(*(a - c).T).max())
    ang = math.pi / 2 + 2 * math.pi * np.arange(3) / 3
    return [(c[0] + 2 * r * math.cos(t), c[1] + 2 * r * math.sin(t)) for t in ang]


def _miter_offset(pts: list, margin: float) -> list:
    if margin == 0:
        return [_xy(p) for p in pts]
    n = len(pts)
    normals = []
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        ex, ey = _unit((b[0] - a[0], b[1] - a[1]))
        normals.append((ey, -ex))
    out = []
    for i in range(n):
        n0, n1 = normals[i - 1], normals[i]
        s = 1.0 + n0[0] * n1[0] + n0[1] * n1[1]
        v = pts[i]
        out.append((v[0] + margin * (n0[0] + n1[0]) / s, v[1] + margin * (n0[1] + n1[1]) / s))
    return out


def dilate_and_simplify(p: Polygon, margin: float, max_vertices: int) -> Polygon:
    """Convex enclosure of p with at most ``max_vertices`` corners, grown by margin.

    Built as convex hull, then edge-elimination (extending the two
    neighbouring edges until they meet, cheapest added area first), then a
    mitred outward offset.  The result keeps at least ``margin`` clearance
    from every point of p.
    """
    if max_vertices < 3:
        raise ValueError(f"max_vertices must be >= 3, got {max_vertices}")
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    hull = convex_hull(p.vertices)
    if set(hull) == set(p.vertices) and len(hull) == len(p):
        hull = list(p.vertices)
    reduced = _reduce_convex(hull, max_vertices)
    return Polygon.from_points(_miter_offset(reduced, margin))


# --- random maps ----------------------------------------------------------


def _star_polygon(rng: np.random.Generator, center, radius: float) -> Polygon:
    k = int(rng.integers(5, 11))
    phase = rng.uniform(0, 2 * np.pi)
    ang = phase + (np.arange(k) + rng.uniform(-0.3, 0.3, k)) * 2 * np.pi / k
    rad = radius * rng.uniform(0.6, 1.0, k)
    pts = np.column_stack([center[0] + rad * np.cos(ang), center[1] + rad * np.sin(ang)])
    return Polygon.from_points(pts.tolist())


def random_environment(
    seed: int,
    n_obstacles: int,
    bounds: Polygon,
    size_range: tuple[float, float],
    min_gap: float = 0.0,
    max_attempts: int | None = None,
    name: str | None = None,
) -> EnvironmentMap:
    """Seeded map of perturbed star-shaped obstacles (5-10 vertices).

    ``size_range`` bounds the circumradius of each obstacle.  Candidates that
    leave the bounds or come within ``min_gap`` of a placed obstacle are
    rejected; after ``max_attempts`` draws a :class:`PlacementError` is raised.
    """
    if n_obstacles < 0:
        raise ValueError("n_obstacles must be >= 0")
    rmin, rmax = size_range
    if not 0 < rmin <= rmax:
        raise ValueError(f"bad size_range {size_range}")
    rng = np.random.default_rng(seed)
    if max_attempts is None:
        max_attempts = 200 * max(1, n_obstacles)
    lo = bounds.array.min(axis=0)
    hi = bounds.array.max(axis=0)
    placed: list[Polygon] = []
    attempts = 0
    gap = max(min_gap, EPS)
    while len(placed) < n_obstacles:
        if attempts >= max_attempts:
            raise PlacementError(len(placed), n_obstacles, attempts)
        attempts += 1
        center = rng.uniform(lo, hi)
        poly = _star_polygon(rng, center, rng.uniform(rmin, rmax))
        if any(not bounds.contains(v) for v in poly.vertices):
            continue
        d = segment_distance_matrix(poly.edge_starts, poly.edge_ends, bounds.edge_starts, bounds.edge_ends)
        if float(d.min()) <= gap:
            continue
        if any(polygons_within(poly, q, gap) for q in placed):
            continue
        placed.append(poly)
    return EnvironmentMap(bounds, tuple(placed), name or f"random-{seed}")


def dilate_environment(env: EnvironmentMap, margin: float, max_vertices: int | None = None) -> EnvironmentMap:
    """Planning copy of env with every obstacle grown by margin.

    Raises :class:`InvalidEnvironment` when grown obstacles touch each other
    or the boundary.
    """
    if margin == 0 and max_vertices is None:
        return env
    grown = tuple(
        dilate_and_simplify(o, margin, max_vertices if max_vertices is not None else len(o))
        for o in env.obstacles
    )
    return EnvironmentMap(env.boundary, grown, env.name, env.eps)
