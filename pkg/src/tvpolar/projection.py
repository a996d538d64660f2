"""Projection solvers: the exact 2-d polar-ball projection with full
argmin-face recovery, the componentwise clamp, the non-uniqueness witness
construction, and the projected subgradient method for the discrete TV
objective on fields.

The 2-d projection min{gauge(x0 - x) : dual_norm(x) <= 1} is a linear
program in (x, t).  It is solved exactly by enumerating all triples of
constraints, keeping the feasible intersection points and reading off the
whole optimal face, so non-uniqueness is observable rather than hidden
behind a single returned point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from weakref import WeakKeyDictionary

import numpy as np

from .grid import as_field, divergence, field_sup_norm, gradient
from .polytopes import PolytopeNorm, WTriple, _canonical_order

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pure-numpy fallback below
    _HAVE_NUMBA = False

__all__ = [
    "ArgminFace",
    "NonUniqueInstance",
    "SubgradientConfig",
    "PolarProjector",
    "clamp_project",
    "project_onto_polar",
    "witness_from_triple",
    "tv_projected_subgradient",
]

# Feasibility slack for row-normalized LP constraints.
FEAS_TOL = 1e-9
# Candidates within this of the optimal value belong to the argmin face.
FACE_TOL = 1e-9
# Two face vertices closer than this are the same point.
VERTEX_DEDUP_TOL = 1e-9
# Constraint triples with smaller normalized determinant are skipped.
SINGULAR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ArgminFace:
    """Exact solution set of a polar-ball projection.

    ``face_vertices`` holds the extreme points of the (possibly degenerate)
    minimizing face; every one of them attains ``optimal_value``.
    """

    optimal_value: float
    face_vertices: np.ndarray
    is_unique: bool


@dataclass(frozen=True, eq=False)
class NonUniqueInstance:
    """A source point x0 with two certified distinct nearest points.

    gauge(x0 - w1) == gauge(x0 - w2) == r, and the hyperplane with normal
    ``a`` through w1 separates the target set from the open gauge ball of
    radius r around x0.
    """

    x0: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    r: float
    a: np.ndarray


@dataclass(frozen=True)
class SubgradientConfig:
    """Projected-subgradient settings.

    The step length follows a geometric ladder: it starts at ``step_c``
    and halves ``step_halvings`` times at evenly spaced epochs over
    ``max_iters`` iterations.  Directions are normalized subgradients
    averaged with heavy-ball weight ``momentum``; both choices are what
    lets independent starts agree to fixed-step-free accuracy (a plain
    c/sqrt(k) step leaves a noise floor orders of magnitude above the
    multi-start agreement this solver is used to measure).

    The run stops early when the best value improves by less than
    ``tolerance`` over a ``stagnation_window`` of iterations (0 disables
    the check).  ``seed`` is carried for provenance only: the iteration
    itself is deterministic in (g0, h_init, config).
    """

    max_iters: int = 20_000
    step_c: float = 2.0
    step_halvings: int = 18
    momentum: float = 0.99
    seed: int = 0
    tolerance: float = 0.0
    stagnation_window: int = 1000

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_c <= 0.0:
            raise ValueError("step_c must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.step_halvings < 0:
            raise ValueError("step_halvings must be >= 0")


def clamp_project(f) -> np.ndarray:
    """Componentwise clamp of f into [-1, 1]: the unique point of the
    sup-norm unit box closest to f in the l1 distance."""
    return np.clip(np.asarray(f, dtype=float), -1.0, 1.0)


class PolarProjector:
    """Prepared exact projector onto the polar ball of a fixed 2-d norm.

    Precomputes the row-normalized constraint system and the inverses of
    all nonsingular constraint triples once, so repeated projections from
    many source points are cheap.
    """

    def __init__(self, P: PolytopeNorm):
        if P.dim != 2:
            raise ValueError("exact projection requires dim=2")
        self.P = P
        ball = P.halfspace_normals  # gauge(z) = max a_i . z
        polar_normals = P.vertices  # membership in D: v . x <= 1
        rows = np.vstack(
            [
                np.hstack([-ball, -np.ones((len(ball), 1))]),
                np.hstack([polar_normals, np.zeros((len(polar_normals), 1))]),
            ]
        )
        norms = np.linalg.norm(rows, axis=1)
        self.rows = rows / norms[:, None]
        self.row_norms = norms
        self.n_ball = len(ball)
        self.ball_normals = ball

        triples = np.array(list(itertools.combinations(range(len(rows)), 3)))
        mats = self.rows[triples]
        dets = np.abs(np.linalg.det(mats))
        keep = dets > SINGULAR_TOL
        self.triples = triples[keep]
        self.inverses = np.linalg.inv(mats[keep])

    def _rhs(self, x0: np.ndarray) -> np.ndarray:
        rhs = np.concatenate(
            [-(self.ball_normals @ x0), np.ones(len(self.rows) - self.n_ball)]
        )
        return rhs / self.row_norms

    def project(self, x0) -> ArgminFace:
        """Full argmin face of min{gauge(x0 - x) : x in polar ball}."""
        x0 = np.asarray(x0, dtype=float)
        rhs = self._rhs(x0)
        cand = np.einsum("tij,tj->ti", self.inverses, rhs[self.triples])
        feasible = np.all(cand @ self.rows.T <= rhs + FEAS_TOL, axis=1)
        cand = cand[feasible]
        if len(cand) == 0:
            raise RuntimeError("no feasible LP vertex found; polytope data is degenerate")
        t_best = float(np.min(cand[:, 2]))
        optimal = cand[cand[:, 2] <= t_best + FACE_TOL, :2]
        verts = _dedup_points(optimal)
        # a zero-distance projection is the point itself, exactly
        if t_best <= FACE_TOL:
            t_best = max(t_best, 0.0)
            verts = x0[None, :]
        return ArgminFace(
            optimal_value=t_best,
            face_vertices=_canonical_order(verts),
            is_unique=len(verts) == 1,
        )


_projector_cache: "WeakKeyDictionary[PolytopeNorm, PolarProjector]" = WeakKeyDictionary()


def project_onto_polar(P: PolytopeNorm, x0) -> ArgminFace:
    """Project x0 onto the polar ball of P under P's gauge, returning the
    optimal value and every extreme point of the minimizing set."""
    proj = _projector_cache.get(P)
    if proj is None:
        proj = _projector_cache[P] = PolarProjector(P)
    return proj.project(x0)


def witness_from_triple(P: PolytopeNorm, w: WTriple) -> NonUniqueInstance:
    """Build a concrete non-uniqueness instance from a W-set triple.

    The polar face exposed by the triple's vertex supplies the two
    minimizers w1, w2; the unit-sphere segment parallel to that face fixes
    the radius r > 0 and the source point x0 = w1 - r * u1.
    """
    if P.dim != 2:
        raise ValueError("witness construction requires dim=2")
    x1, x2, x3 = w.x1, w.x2, w.x3

    c = float(np.dot(x1, x2))
    if abs(c) <= 1e-12:
        raise ValueError("degenerate triple: vertex is orthogonal to the edge endpoints")
    s = 1.0 if c > 0 else -1.0

    # endpoints of the polar face exposed by x1: the facet normals active
    # at the vertex x1 (polarity pairs vertices of the ball with edges of
    # the polar ball).
    normals = P.halfspace_normals
    active = np.abs(normals @ x1 - 1.0) <= 1e-9
    endpoints = _dedup_points(normals[active])
    if len(endpoints) != 2:
        raise ValueError(
            "no polar edge exposed by the triple's vertex; "
            f"expected 2 active facet normals, found {len(endpoints)}"
        )
    w1, w2 = _canonical_order(endpoints)

    # unit-sphere segment parallel to the polar edge, on the supporting
    # line with normal opposite to x1
    u1, u2 = -s * x2, -s * x3
    du = u1 - u2
    dw = w1 - w2
    r = float(np.dot(dw, du) / np.dot(du, du))
    if abs(float(np.dot(dw - r * du, dw - r * du))) > 1e-18 * float(np.dot(dw, dw)):
        raise ValueError("polar edge is not parallel to the triple's segment")
    if r < 0:
        u1, u2, r = u2, u1, -r

    # facet normal of the ball edge [x2, x3]
    edge_active = (np.abs(normals @ x2 - 1.0) <= 1e-9) & (np.abs(normals @ x3 - 1.0) <= 1e-9)
    if not np.any(edge_active):
        raise ValueError("triple's segment does not lie on a facet of the unit ball")
    n_edge = normals[np.argmax(edge_active)]

    return NonUniqueInstance(
        x0=w1 - r * u1,
        w1=w1,
        w2=w2,
        r=r,
        a=-s * n_edge,
    )


def tv_projected_subgradient(
    g0: np.ndarray,
    cfg: SubgradientConfig,
    h_init: np.ndarray,
) -> tuple[np.ndarray, float, list[float]]:
    """Minimize tv(divergence(h - g0)) over fields with pointwise
    Euclidean magnitude at most 1, by projected subgradient descent.

    At each iterate the subgradient is grad(div(q)) with q the pixelwise
    normalization of grad(div(h - g0)) (zero where that gradient
    vanishes); the signs follow from the adjoint pair grad / -div.  The
    feasible set decouples per pixel into unit disks, so the projection
    is a radial rescale.  Returns the best iterate found, its objective
    value, and the nonincreasing best-value trace (entry 0 is the value
    at ``h_init``).
    """
    g0 = as_field(g0)
    h = as_field(h_init).copy()
    if h.shape != g0.shape:
        raise ValueError(f"field shapes differ: {h.shape} vs {g0.shape}")
    if field_sup_norm(h) > 1.0 + 1e-12:
        raise ValueError("h_init is infeasible: pointwise magnitude exceeds 1")

    def objective_parts(hcur):
        gw = gradient(divergence(hcur - g0))
        mag = np.sqrt(gw[0] * gw[0] + gw[1] * gw[1])
        return gw, mag, float(mag.sum())

    rung = max(1, cfg.max_iters // (cfg.step_halvings + 1))
    steps = cfg.step_c * 0.5 ** (np.arange(cfg.max_iters) // rung)

    h_best = h.copy()
    trace_arr = np.empty(cfg.max_iters + 1)
    if _HAVE_NUMBA:
        best, done = _subgradient_loop_jit(
            g0, h, h_best, steps, cfg.momentum, cfg.tolerance, cfg.stagnation_window, trace_arr
        )
        return h_best, best, list(trace_arr[: done + 1])

    gw, mag, best = objective_parts(h)
    trace = [best]
    window_start_best = best
    d = np.zeros_like(h)
    for k in range(1, cfg.max_iters + 1):
        # tiny floor only guards 0/0; it leaves every nonzero pixel intact
        q = gw / np.maximum(mag, 1e-300)
        s = gradient(divergence(q))
        snorm = float(np.sqrt(np.sum(s * s)))
        if snorm < 1e-15:
            break
        d *= cfg.momentum
        d += ((1.0 - cfg.momentum) / snorm) * s
        h -= steps[k - 1] * d
        m = np.sqrt(h[0] * h[0] + h[1] * h[1])
        np.maximum(m, 1.0, out=m)
        h /= m
        gw, mag, val = objective_parts(h)
        if val < best:
            best = val
            h_best[:] = h
        trace.append(best)
        if cfg.tolerance > 0.0 and k % cfg.stagnation_window == 0:
            if window_start_best - best < cfg.tolerance:
                break
            window_start_best = best
    return h_best, best, trace


def _subgradient_loop_py(g0, h, h_best, steps, beta, tolerance, window, trace):
    """Full iteration in index form; compiled by numba when available.

    Writes the best iterate into h_best and the nonincreasing best-value
    trace into trace[0:done+1]; returns (best value, done iterations).
    """
    n = g0.shape[1]
    w = np.empty((n, n))
    gw = np.empty((2, n, n))
    mag = np.empty((n, n))
    q = np.empty((2, n, n))
    dq = np.empty((n, n))
    s = np.empty((2, n, n))
    d = np.zeros((2, n, n))

    def refresh():
        # w = div(h - g0), gw = grad(w), mag/objective pointwise
        val = 0.0
        for i in range(n):
            for j in range(n):
                acc = 0.0
                if i == 0:
                    acc += h[0, 0, j] - g0[0, 0, j]
                elif i < n - 1:
                    acc += h[0, i, j] - g0[0, i, j] - (h[0, i - 1, j] - g0[0, i - 1, j])
                else:
                    acc -= h[0, n - 2, j] - g0[0, n - 2, j]
                if j == 0:
                    acc += h[1, i, 0] - g0[1, i, 0]
                elif j < n - 1:
                    acc += h[1, i, j] - g0[1, i, j] - (h[1, i, j - 1] - g0[1, i, j - 1])
                else:
                    acc -= h[1, i, n - 2] - g0[1, i, n - 2]
                w[i, j] = acc
        for i in range(n):
            for j in range(n):
                a = w[i + 1, j] - w[i, j] if i < n - 1 else 0.0
                b = w[i, j + 1] - w[i, j] if j < n - 1 else 0.0
                gw[0, i, j] = a
                gw[1, i, j] = b
                m = np.sqrt(a * a + b * b)
                mag[i, j] = m
                val += m
        return val

    best = refresh()
    trace[0] = best
    for idx in range(n):
        for jdx in range(n):
            h_best[0, idx, jdx] = h[0, idx, jdx]
            h_best[1, idx, jdx] = h[1, idx, jdx]
    window_start_best = best
    done = 0
    for k in range(1, len(steps) + 1):
        for i in range(n):
            for j in range(n):
                m = mag[i, j]
                if m < 1e-300:
                    m = 1e-300
                q[0, i, j] = gw[0, i, j] / m
                q[1, i, j] = gw[1, i, j] / m
        for i in range(n):
            for j in range(n):
                acc = 0.0
                if i == 0:
                    acc += q[0, 0, j]
                elif i < n - 1:
                    acc += q[0, i, j] - q[0, i - 1, j]
                else:
                    acc -= q[0, n - 2, j]
                if j == 0:
                    acc += q[1, i, 0]
                elif j < n - 1:
                    acc += q[1, i, j] - q[1, i, j - 1]
                else:
                    acc -= q[1, i, n - 2]
                dq[i, j] = acc
        snorm2 = 0.0
        for i in range(n):
            for j in range(n):
                a = dq[i + 1, j] - dq[i, j] if i < n - 1 else 0.0
                b = dq[i, j + 1] - dq[i, j] if j < n - 1 else 0.0
                s[0, i, j] = a
                s[1, i, j] = b
                snorm2 += a * a + b * b
        snorm = np.sqrt(snorm2)
        if snorm < 1e-15:
            break
        wmix = (1.0 - beta) / snorm
        step = steps[k - 1]
        for i in range(n):
            for j in range(n):
                d[0, i, j] = beta * d[0, i, j] + wmix * s[0, i, j]
                d[1, i, j] = beta * d[1, i, j] + wmix * s[1, i, j]
                a = h[0, i, j] - step * d[0, i, j]
                b = h[1, i, j] - step * d[1, i, j]
                m = np.sqrt(a * a + b * b)
                if m > 1.0:
                    a /= m
                    b /= m
                h[0, i, j] = a
                h[1, i, j] = b
        val = refresh()
        if val < best:
            best = val
            for i in range(n):
                for j in range(n):
                    h_best[0, i, j] = h[0, i, j]
                    h_best[1, i, j] = h[1, i, j]
        done = k
        trace[k] = best
        if tolerance > 0.0 and k % window == 0:
            if window_start_best - best < tolerance:
                break
            window_start_best = best
    return best, done


if _HAVE_NUMBA:
    _subgradient_loop_jit = njit(cache=True)(_subgradient_loop_py)


def _dedup_points(pts: np.ndarray, tol: float = VERTEX_DEDUP_TOL) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in pts:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return np.array(out)
