import numpy as np
import pytest

from tvpolar import PolytopeNorm

# the running 2-d examples: a hexagon norm with an edge orthogonal to a
# vertex (non-Chebyshev polar), and two norms whose polars are Chebyshev
HEX_VERTICES = [(0, 1), (0.5, 0.5), (0.5, -0.5), (0, -1), (-0.5, -0.5), (-0.5, 0.5)]
HEX_POLAR_VERTICES = [(1, 1), (2, 0), (1, -1), (-1, -1), (-2, 0), (-1, 1)]


@pytest.fixture
def hexagon() -> PolytopeNorm:
    return PolytopeNorm.from_vertices(HEX_VERTICES)


@pytest.fixture
def cross_polytope() -> PolytopeNorm:
    return PolytopeNorm.from_vertices([(1, 0), (0, 1)])


@pytest.fixture
def square() -> PolytopeNorm:
    return PolytopeNorm.from_vertices([(1, 1), (1, -1)])


def random_symmetric_polygon(rng, min_vertices=4, max_vertices=12, lattice=False):
    """Random canonical symmetric polygon with a vertex count in range.

    With lattice=True the generators have small integer coordinates, which
    makes exactly-orthogonal vertex/edge pairs (nonempty W-sets) common.
    """
    while True:
        k = int(rng.integers(2, 7))
        if lattice:
            pts = rng.integers(-3, 4, size=(k, 2)).astype(float)
        else:
            pts = rng.normal(size=(k, 2)) * rng.uniform(0.5, 2.0)
        try:
            poly = PolytopeNorm.from_vertices(pts)
        except ValueError:
            continue
        if min_vertices <= len(poly.vertices) <= max_vertices:
            return poly


def point_set_match(a, b, tol=1e-9) -> bool:
    """Do two (k, dim) arrays contain the same points as sets?"""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return False
    used = np.zeros(len(b), dtype=bool)
    for p in a:
        hit = np.nonzero(~used & (np.max(np.abs(b - p), axis=1) <= tol))[0]
        if len(hit) == 0:
            return False
        used[hit[0]] = True
    return True
