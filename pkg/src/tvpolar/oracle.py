"""Brute-force grid oracles.

These are deliberately naive reference solvers: dense grids, rejection
sampling and local refinement.  They exist to validate the exact LP
projector and the iterative TV machinery on small instances, so they share
no code path with either.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .grid import MEAN_ZERO_TOL, as_image
from .polytopes import PolytopeNorm

__all__ = ["GridSearchSpec", "oracle_project", "oracle_tv_min"]

# Zoom is capped at this factor per refinement round.
REFINE_ZOOM = 4.0


@dataclass(frozen=True)
class GridSearchSpec:
    """Grid-search control: half-width of the scanned box (0 picks a box
    that covers the feasible set automatically), points per axis, and the
    number of local refinement rounds (each shrinks the box around the
    near-optimal set, at most 4x per round)."""

    box_halfwidth: float = 0.0
    points_per_axis: int = 101
    refine_rounds: int = 3

    def __post_init__(self):
        if self.points_per_axis < 3:
            raise ValueError("points_per_axis must be >= 3")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")


def _shrink_box(lo, hi, kept, step):
    center = 0.5 * (kept.min(axis=0) + kept.max(axis=0))
    half = np.maximum(
        0.5 * (kept.max(axis=0) - kept.min(axis=0)) + step,
        0.5 * (hi - lo) / REFINE_ZOOM,
    )
    return center - half, center + half


def oracle_project(
    P: PolytopeNorm,
    x0,
    spec: GridSearchSpec = GridSearchSpec(),
) -> tuple[float, np.ndarray]:
    """Grid-search reference for the polar-ball projection (dim=2).

    Scans a dense grid intersected with the polar ball (membership via
    dual_norm <= 1), keeps every point whose gauge distance to x0 is
    within grid-step * Lipschitz of the incumbent minimum, and refines
    around the kept set.  Returns the minimal value and the near-optimal
    sample points.
    """
    if P.dim != 2:
        raise ValueError("oracle_project requires dim=2")
    x0 = np.asarray(x0, dtype=float)
    # Lipschitz bound of x -> gauge(x0 - x) in the Euclidean metric: the
    # longest facet normal, i.e. the largest polar-ball vertex.
    lip = float(np.max(np.linalg.norm(P.halfspace_normals, axis=1)))
    hw = spec.box_halfwidth
    if hw <= 0.0:
        hw = 1.01 * float(np.max(np.abs(P.halfspace_normals)))

    lo = np.array([-hw, -hw])
    hi = np.array([hw, hw])
    best = np.inf
    kept = None
    for _ in range(spec.refine_rounds + 1):
        step = float(np.max((hi - lo) / (spec.points_per_axis - 1)))
        axes = [np.linspace(lo[d], hi[d], spec.points_per_axis) for d in range(2)]
        gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        pts = pts[np.max(pts @ P.vertices.T, axis=1) <= 1.0]
        if len(pts) == 0:
            raise RuntimeError("search box does not intersect the polar ball")
        vals = np.maximum(np.max((x0 - pts) @ P.halfspace_normals.T, axis=1), 0.0)
        best = float(np.min(vals))
        kept = pts[vals <= best + step * lip]
        lo, hi = _shrink_box(lo, hi, kept, step)
    return best, kept


def oracle_tv_min(
    f0: np.ndarray,
    spec: GridSearchSpec | None = None,
) -> tuple[float, np.ndarray]:
    """Grid-search reference for min tv(f0 - v) over the dual total
    variation ball, for n <= 3 only.

    The mean-zero subspace is parametrized by an orthonormal basis, the
    dual ball is gridded by rejection against a sampled dual-norm
    evaluation (an outer relaxation: too few samples admit slightly
    infeasible points, never reject feasible ones), and the kept region
    is refined locally.  Returns the minimal value and the near-optimal
    v samples as (k, n, n) matrices.
    """
    f0 = as_image(f0)
    n = f0.shape[0]
    if n > 3:
        raise ValueError("oracle_tv_min is limited to n <= 3 (cost guard)")
    scale = max(1.0, float(np.max(np.abs(f0))))
    if abs(f0.sum()) > MEAN_ZERO_TOL * n * n * scale:
        raise ValueError("oracle_tv_min requires a mean-zero input")
    if spec is None:
        spec = GridSearchSpec(points_per_axis=21 if n == 2 else 5, refine_rounds=3 if n == 2 else 2)

    basis = _mean_zero_basis(n)  # (m, n, n), orthonormal
    m = len(basis)
    sphere = _tv_sphere_samples(basis)  # (S, m) coefficients, tv == 1

    # Euclidean prefilter: on the dual ball <v, v> <= dual(v) * tv(v), so
    # |c| <= tv at c/|c| which the row-sum bound caps at l2(basis tvs).
    radius_cap = 1.01 * float(np.linalg.norm(_tv_batch(basis)))

    def feasible(coefs: np.ndarray) -> np.ndarray:
        out = np.einsum("ij,ij->i", coefs, coefs) <= radius_cap * radius_cap
        idx = np.nonzero(out)[0]
        for start in range(0, len(idx), 65536):
            block = idx[start : start + 65536]
            out[block] = np.max(np.abs(coefs[block] @ sphere.T), axis=1) <= 1.0
        return out

    lip = _tv_lipschitz(basis)
    if spec.box_halfwidth > 0.0:
        hw = np.full(m, spec.box_halfwidth)
    else:
        # the dual-ball extent along basis axis j is bounded by tv(b_j):
        # <v, b_j> <= dual(v) * tv(b_j) <= tv(b_j) on the ball
        hw = 1.05 * _tv_batch(basis)

    f0c = _to_coefs(f0, basis)
    lo, hi = -hw, hw
    best = np.inf
    kept = None
    for _ in range(spec.refine_rounds + 1):
        step = float(np.max((hi - lo) / (spec.points_per_axis - 1)))
        axes = [np.linspace(lo[d], hi[d], spec.points_per_axis) for d in range(m)]
        coefs = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
        coefs = coefs[feasible(coefs)]
        if len(coefs) == 0:
            raise RuntimeError("search box does not intersect the dual ball")
        vals = _tv_batch_coefs(f0c - coefs, basis)
        best = float(np.min(vals))
        kept = coefs[vals <= best + step * lip]
        lo, hi = _shrink_box(lo, hi, kept, step)
    samples = np.tensordot(kept, basis, axes=(1, 0))
    return best, samples


def _mean_zero_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the mean-zero subspace, as (n*n-1, n, n)."""
    ones = np.full((n * n, 1), 1.0 / n)
    q, _ = np.linalg.qr(np.hstack([ones, np.eye(n * n)[:, : n * n - 1]]))
    return q[:, 1:].T.reshape(n * n - 1, n, n)


def _to_coefs(u: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.tensordot(basis, u, axes=((1, 2), (0, 1)))


def _tv_batch(mats: np.ndarray) -> np.ndarray:
    """Total variation of a batch of (k, n, n) matrices."""
    n = mats.shape[-1]
    g1 = np.zeros_like(mats)
    g2 = np.zeros_like(mats)
    g1[:, : n - 1, :] = mats[:, 1:, :] - mats[:, : n - 1, :]
    g2[:, :, : n - 1] = mats[:, :, 1:] - mats[:, :, : n - 1]
    return np.sqrt(g1 * g1 + g2 * g2).sum(axis=(1, 2))


def _tv_batch_coefs(coefs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return _tv_batch(np.tensordot(coefs, basis, axes=(1, 0)))


def _tv_lipschitz(basis: np.ndarray) -> float:
    """Coefficient-space Lipschitz bound of the objective over one grid
    cell diagonal: sum of the basis elements' total variations."""
    return float(np.sum(_tv_batch(basis)))


def _tv_sphere_samples(basis: np.ndarray) -> np.ndarray:
    """Deterministic sample of the tv unit sphere in coefficient space.

    Low dimension uses a full coefficient grid; dimension 8 (n=3) uses
    the sparse sub-grid of directions with at most four active
    coordinates, which keeps membership tests affordable.  Antipodes are
    dropped (tests use absolute dot products) and every direction is
    scaled onto {tv == 1}.
    """
    m = len(basis)
    if m <= 3:
        grid = np.array(list(itertools.product(np.linspace(-1.0, 1.0, 9), repeat=m)))
        dirs = np.vstack([grid, np.eye(m)])
    else:
        rows = [np.eye(m)]
        for k in (2, 3, 4):
            for support in itertools.combinations(range(m), k):
                for signs in itertools.product((-1.0, 1.0), repeat=k):
                    row = np.zeros(m)
                    row[list(support)] = signs
                    rows.append(row[None, :])
        dirs = np.vstack(rows)
    first_sign = dirs[np.arange(len(dirs)), np.argmax(np.abs(dirs) > 1e-12, axis=1)]
    dirs = dirs[first_sign > 0]
    tvs = _tv_batch_coefs(dirs, basis)
    good = tvs > 1e-12
    return dirs[good] / tvs[good, None]
