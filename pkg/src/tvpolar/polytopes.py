"""Gauge norms of symmetric convex polytopes.

A :class:`PolytopeNorm` stores the unit ball of the norm twice over: as the
extreme points of the ball and as offset-one halfspaces whose intersection
is the ball.  The two forms are polar to each other, which makes gauge
evaluation, dual-norm evaluation and polarity cheap and exact.

The W-set detector enumerates (vertex, boundary-segment) pairs of the unit
ball where the vertex is orthogonal to the segment direction; in 2D the
emptiness of that set certifies that every point projects uniquely onto
the polar ball.  Dimensions 3 and 4 are supported as an uncertified probe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Halfspace", "WTriple", "PolytopeNorm"]

# Vertex deduplication / symmetry tolerance (scaled by coordinate size).
DEDUP_TOL = 1e-12
# Default orthogonality tolerance of the W-set, relative to edge length.
W_ORTHO_TOL = 1e-9
# A boundary segment must have midpoint gauge within this of 1 (N-D probe).
SPHERE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Halfspace:
    """Closed halfspace {x : normal · x <= offset}."""

    normal: np.ndarray
    offset: float = 1.0

    def __post_init__(self):
        if not np.linalg.norm(self.normal) > 0.0:
            raise ValueError("halfspace normal must be nonzero")

    def contains(self, x, tol: float = 0.0) -> bool:
        return float(np.dot(self.normal, x)) <= self.offset + tol


@dataclass(frozen=True, eq=False)
class WTriple:
    """A unit-ball vertex x1 orthogonal to a boundary segment [x2, x3]."""

    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray

    @property
    def edge_direction(self) -> np.ndarray:
        return self.x2 - self.x3


@dataclass(frozen=True, eq=False)
class PolytopeNorm:
    """Norm whose closed unit ball is a symmetric convex polytope.

    ``vertices`` are the extreme points of the ball in canonical order
    (counterclockwise from angle -pi in 2D, lexicographic otherwise);
    ``halfspace_normals`` are the outward facet normals scaled so every
    facet satisfies normal · x = 1.
    """

    dim: int
    vertices: np.ndarray
    halfspace_normals: np.ndarray = field(repr=False)

    @classmethod
    def from_vertices(cls, points) -> "PolytopeNorm":
        """Build the canonical norm from any generating point set.

        The input is symmetrized (-p is added for every p), reduced to the
        extreme points of its convex hull, and the offset-one halfspace
        form is derived.  Raises ValueError when the hull is degenerate or
        the origin is not interior, since the gauge would not be a norm.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.size == 0:
            raise ValueError("need at least one generating point")
        if pts.ndim != 2:
            raise ValueError("points must be a (k, dim) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        dim = pts.shape[1]
        pts = np.vstack([pts, -pts]) + 0.0
        if dim == 2:
            verts = _hull_2d(pts)
            normals = _edge_normals_2d(verts)
        elif dim in (3, 4):
            verts, normals = _hull_nd(pts)
        else:
            raise ValueError(f"dim {dim} not supported (facet enumeration is limited to dim <= 4)")
        return cls(dim=dim, vertices=verts, halfspace_normals=normals)

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(a, 1.0) for a in self.halfspace_normals]

    def gauge(self, x) -> float:
        """Minkowski gauge of the ball: max over facets of normal · x."""
        x = np.asarray(x, dtype=float)
        return max(float(np.max(self.halfspace_normals @ x)), 0.0)

    def dual_norm(self, y) -> float:
        """Support function of the ball: max over vertices of v · y."""
        y = np.asarray(y, dtype=float)
        return max(float(np.max(self.vertices @ y)), 0.0)

    def polar(self) -> "PolytopeNorm":
        """Polar polytope: its vertices are this ball's facet normals and
        vice versa.  Involutive on canonical form."""
        return PolytopeNorm(
            dim=self.dim,
            vertices=_canonical_order(self.halfspace_normals),
            halfspace_normals=_canonical_order(self.vertices),
        )

    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Consecutive vertex pairs in angular order (2D only)."""
        if self.dim != 2:
            raise ValueError("edges() requires dim=2")
        k = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]

    def boundary_segments(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Vertex pairs whose segment lies on the unit sphere.

        In 2D these are exactly the polygon edges.  In higher dimension
        any extreme-point pair with midpoint gauge 1 qualifies (facet
        diagonals included), which is what the W-set definition asks for.
        """
        if self.dim == 2:
            return self.edges()
        out = []
        k = len(self.vertices)
        for i in range(k):
            for j in range(i + 1, k):
                mid = 0.5 * (self.vertices[i] + self.vertices[j])
                if self.gauge(mid) >= 1.0 - SPHERE_TOL:
                    out.append((self.vertices[i], self.vertices[j]))
        return out

    def w_set(self, tol: float = W_ORTHO_TOL) -> list[WTriple]:
        """All (vertex, boundary segment) pairs with the vertex orthogonal
        to the segment direction, |x1 · (x2 - x3)| <= tol * |x2 - x3|.

        An empty result certifies, for dim=2, that projection onto the
        polar ball is single-valued for every source point.  For dim 3
        and 4 the enumeration runs but carries no uniqueness guarantee.
        """
        triples = []
        for x2, x3 in self.boundary_segments():
            d = x2 - x3
            thresh = tol * float(np.linalg.norm(d))
            dots = self.vertices @ d
            for i in np.nonzero(np.abs(dots) <= thresh)[0]:
                triples.append(WTriple(x1=self.vertices[i], x2=x2, x3=x3))
        return triples

    def contains(self, x, tol: float = 0.0) -> bool:
        return self.gauge(x) <= 1.0 + tol


def _cross2(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _scale_of(pts: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(pts))))


def _hull_2d(pts: np.ndarray) -> np.ndarray:
    """Extreme points of the 2-d convex hull, counterclockwise by angle.

    Monotone chain with strict turns only, so duplicates, interior points
    and edge-interior points are all dropped.  Requires the origin to be
    strictly interior (guaranteed full-dimensional and symmetric input).
    """
    scale = _scale_of(pts)
    cross_tol = DEDUP_TOL * scale * scale
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(pts, axis=0)) > DEDUP_TOL * scale, axis=1)
    pts = pts[keep]
    if len(pts) < 3:
        raise ValueError("degenerate vertex set: hull is not full-dimensional")

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross2(out[-1] - out[-2], p - out[-1]) <= cross_tol:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise ValueError("degenerate vertex set: hull is not full-dimensional")
    # counterclockwise from angle -pi; hull is convex and symmetric so the
    # angular order is the traversal order.
    ang = np.arctan2(hull[:, 1], hull[:, 0])
    hull = hull[np.argsort(ang, kind="stable")]
    nxt = np.roll(hull, -1, axis=0)
    c = hull[:, 0] * nxt[:, 1] - hull[:, 1] * nxt[:, 0]
    if np.any(c <= cross_tol):
        raise ValueError("origin is not interior to the hull; gauge would not be a norm")
    return hull


def _edge_normals_2d(verts: np.ndarray) -> np.ndarray:
    """Outward offset-one normals of consecutive edges of a CCW polygon
    with interior origin: solve [v_k; v_{k+1}] a = (1, 1) per edge."""
    k = len(verts)
    normals = np.empty((k, 2))
    for i in range(k):
        m = np.array([verts[i], verts[(i + 1) % k]])
        normals[i] = np.linalg.solve(m, np.ones(2))
    return normals


def _hull_nd(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extreme points and offset-one facet normals for dim 3 or 4 via
    qhull.  Probe quality: coplanar-facet merging relies on dedup of the
    triangulated facet equations."""
    from scipy.spatial import ConvexHull

    try:
        hull = ConvexHull(pts)
    except Exception as exc:  # qhull reports degeneracy in its own way
        raise ValueError(f"degenerate vertex set: {exc}") from exc
    verts = _canonical_order(_dedup_rows(pts[hull.vertices]))
    # equations rows are (a, b) with a.x + b <= 0 inside; origin interior
    # means b < 0, normalize to (a / -b) . x <= 1.
    eqs = hull.equations
    if np.any(eqs[:, -1] >= -DEDUP_TOL):
        raise ValueError("origin is not interior to the hull; gauge would not be a norm")
    normals = eqs[:, :-1] / -eqs[:, -1:]
    normals = _canonical_order(_dedup_rows(normals, tol=1e-9))
    return verts, normals


def _dedup_rows(a: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    scaled = tol * _scale_of(a)
    out: list[np.ndarray] = []
    for row in a:
        if not any(np.max(np.abs(row - r)) <= scaled for r in out):
            out.append(row)
    return np.array(out)


def _canonical_order(rows: np.ndarray) -> np.ndarray:
    rows = rows + 0.0  # flush -0.0 so atan2 branch cuts are stable
    if rows.shape[1] == 2:
        ang = np.arctan2(rows[:, 1], rows[:, 0])
        return rows[np.argsort(ang, kind="stable")]
    return rows[np.lexsort(rows.T[::-1])]
