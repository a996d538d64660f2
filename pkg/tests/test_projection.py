import numpy as np
import pytest

from tvpolar import (
    SubgradientConfig,
    clamp_project,
    divergence,
    field_sup_norm,
    gradient,
    project_onto_polar,
    tv,
    tv_projected_subgradient,
    witness_from_triple,
)
from conftest import point_set_match, random_symmetric_polygon


# ---------------------------------------------------------------- clamp --


def test_clamp_identity_inside_box():
    f = np.array([0.3, -0.9, 0.0])
    assert np.array_equal(clamp_project(f), f)


def test_clamp_componentwise():
    assert np.array_equal(clamp_project([2.0, -0.5, 0.3]), [1.0, -0.5, 0.3])
    assert np.array_equal(clamp_project([-7.0, 7.0]), [-1.0, 1.0])


def test_clamp_l1_dominance():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = rng.uniform(-3, 3, size=3)
        c = clamp_project(f)
        u = rng.uniform(-1, 1, size=(500, 3))
        distinct = np.max(np.abs(u - c), axis=1) > 1e-9
        lhs = np.abs(f - c).sum()
        rhs = np.abs(f - u[distinct]).sum(axis=1)
        assert np.all(lhs < rhs)


# ----------------------------------------------------- exact projection --


def test_project_hexagon_paper_point(hexagon):
    face = project_onto_polar(hexagon, (2, 2))
    assert face.optimal_value == pytest.approx(2.0, abs=1e-9)
    assert not face.is_unique
    assert point_set_match(face.face_vertices, [(1, 1), (2, 0)], tol=1e-9)


def test_project_point_inside_returns_itself(hexagon, cross_polytope):
    for P in (hexagon, cross_polytope):
        x0 = np.array([0.31, -0.17])
        face = project_onto_polar(P, x0)
        assert face.optimal_value == 0.0
        assert face.is_unique
        assert np.array_equal(face.face_vertices, x0[None, :])


def test_project_l1_matches_clamp(cross_polytope):
    # the polar of the l1 ball is the sup-norm box; the minimizer is the
    # componentwise clamp
    rng = np.random.default_rng(1)
    face = project_onto_polar(cross_polytope, (3.0, 0.2))
    assert face.is_unique
    assert face.optimal_value == pytest.approx(2.0, abs=1e-9)
    assert point_set_match(face.face_vertices, [(1.0, 0.2)], tol=1e-9)
    for _ in range(50):
        x0 = rng.uniform(-3, 3, size=2)
        face = project_onto_polar(cross_polytope, x0)
        assert np.allclose(face.face_vertices[0], clamp_project(x0), atol=1e-9) or not face.is_unique


def test_face_vertices_lie_on_polar_boundary(hexagon):
    rng = np.random.default_rng(2)
    polys = [hexagon] + [random_symmetric_polygon(rng) for _ in range(5)]
    for P in polys:
        for _ in range(30):
            x0 = rng.uniform(-3, 3, size=2)
            face = project_onto_polar(P, x0)
            if face.optimal_value <= 1e-9:
                continue
            for v in face.face_vertices:
                # boundary of the polar ball and optimal value attained
                assert P.dual_norm(v) == pytest.approx(1.0, abs=1e-9)
                assert P.gauge(x0 - v) == pytest.approx(face.optimal_value, abs=1e-9)


def test_strictly_convex_like_polygons_give_singletons():
    # randomly rotated regular 2m-gons have no vertex orthogonal to an
    # edge (empty W-set), so every argmin face must be a single point
    rng = np.random.default_rng(3)
    for m in (2, 3, 5, 8):
        phi = rng.uniform(0, np.pi)
        ang = phi + np.pi * np.arange(2 * m) / m
        from tvpolar import PolytopeNorm

        P = PolytopeNorm.from_vertices(np.column_stack([np.cos(ang), np.sin(ang)]))
        assert P.w_set() == []
        for _ in range(60):
            face = project_onto_polar(P, rng.uniform(-3, 3, size=2))
            assert face.is_unique


# ----------------------------------------------------------- witnesses --


def test_witness_reproduces_paper_instance(hexagon):
    triple = next(
        t
        for t in hexagon.w_set()
        if np.allclose(t.x1, (0.5, 0.5)) and point_set_match([t.x2, t.x3], [(0, 1), (0.5, 0.5)], tol=1e-12)
    )
    w = witness_from_triple(hexagon, triple)
    assert np.allclose(w.x0, (2.0, 2.0), atol=1e-9)
    assert w.r == pytest.approx(2.0, abs=1e-12)
    assert point_set_match([w.w1, w.w2], [(1, 1), (2, 0)], tol=1e-9)
    assert np.allclose(w.a, (-1.0, -1.0), atol=1e-12)


def test_witness_distances_and_face(hexagon):
    for t in hexagon.w_set():
        w = witness_from_triple(hexagon, t)
        assert w.r > 0
        assert hexagon.gauge(w.x0 - w.w1) == pytest.approx(w.r, abs=1e-9)
        assert hexagon.gauge(w.x0 - w.w2) == pytest.approx(w.r, abs=1e-9)
        face = project_onto_polar(hexagon, w.x0)
        assert not face.is_unique
        assert len(face.face_vertices) >= 2
        assert face.optimal_value == pytest.approx(w.r, abs=1e-9)


def test_witness_central_symmetry(hexagon):
    triples = hexagon.w_set()
    for t in triples:
        s = next(
            s
            for s in triples
            if np.allclose(s.x1, -t.x1, atol=1e-12)
            and np.allclose(s.x2, -t.x2, atol=1e-12)
            and np.allclose(s.x3, -t.x3, atol=1e-12)
        )
        wt = witness_from_triple(hexagon, t)
        ws = witness_from_triple(hexagon, s)
        assert np.allclose(ws.x0, -wt.x0, atol=1e-9)


# ------------------------------------------------- projected subgradient --


def _objective(g0, h):
    return tv(divergence(h - g0))


def test_subgradient_matches_finite_differences():
    # at a generic (smooth) point the selected subgradient is the
    # gradient; check the sign convention numerically
    rng = np.random.default_rng(4)
    n = 6
    g0 = rng.normal(size=(2, n, n))
    h = 0.5 * rng.normal(size=(2, n, n))
    gw = gradient(divergence(h - g0))
    mag = np.sqrt(gw[0] ** 2 + gw[1] ** 2)
    s = gradient(divergence(gw / np.maximum(mag, 1e-300)))
    eps = 1e-7
    for _ in range(5):
        e = rng.normal(size=(2, n, n))
        fd = (_objective(g0, h + eps * e) - _objective(g0, h - eps * e)) / (2 * eps)
        assert fd == pytest.approx(float(np.sum(s * e)), rel=1e-5, abs=1e-8)


def test_solver_zero_problem():
    n = 4
    zero = np.zeros((2, n, n))
    h, value, trace = tv_projected_subgradient(zero, SubgradientConfig(max_iters=50), zero)
    assert value == 0.0
    assert trace[0] == 0.0


def test_solver_feasible_g0_warm_start():
    # a feasible g0 makes the objective 0 attainable at h = g0; starting
    # there the solver must recognize it immediately and never lose it
    rng = np.random.default_rng(5)
    n = 6
    theta = rng.uniform(0, 2 * np.pi, size=(n, n))
    r = 0.8 * np.sqrt(rng.uniform(0, 1, size=(n, n)))
    g0 = r * np.stack([np.cos(theta), np.sin(theta)])
    h, value, trace = tv_projected_subgradient(g0, SubgradientConfig(max_iters=2000), g0.copy())
    assert value <= 1e-6


def test_solver_cold_start_decreases():
    rng = np.random.default_rng(6)
    n = 6
    theta = rng.uniform(0, 2 * np.pi, size=(n, n))
    g0 = 0.9 * np.stack([np.cos(theta), np.sin(theta)])
    h0 = np.zeros((2, n, n))
    h, value, trace = tv_projected_subgradient(g0, SubgradientConfig(max_iters=5000), h0)
    assert value < 0.05 * trace[0]


def test_solver_trace_nonincreasing_and_feasible():
    rng = np.random.default_rng(7)
    n = 5
    theta = rng.uniform(0, 2 * np.pi, size=(n, n))
    g0 = 1.1 * np.stack([np.cos(theta), np.sin(theta)])
    h0 = 0.5 * np.stack([np.cos(theta), np.sin(theta)])
    h, value, trace = tv_projected_subgradient(g0, SubgradientConfig(max_iters=3000), h0)
    assert all(trace[i + 1] <= trace[i] for i in range(len(trace) - 1))
    assert field_sup_norm(h) <= 1.0 + 1e-12
    assert value == trace[-1]


def test_solver_multi_seed_agreement_n4():
    rng = np.random.default_rng(8)
    n = 4
    theta = rng.uniform(0, 2 * np.pi, size=(n, n))
    g0 = 1.1 * np.stack([np.cos(theta), np.sin(theta)])
    finals = []
    for seed in (11, 22):
        r = np.random.default_rng(seed)
        th = r.uniform(0, 2 * np.pi, size=(n, n))
        rad = np.sqrt(r.uniform(0, 1, size=(n, n)))
        h0 = rad * np.stack([np.cos(th), np.sin(th)])
        h, _, _ = tv_projected_subgradient(g0, SubgradientConfig(max_iters=8000), h0)
        finals.append(divergence(h - g0))
    assert np.linalg.norm(finals[0] - finals[1]) <= 0.05


def test_solver_bitwise_determinism():
    rng = np.random.default_rng(9)
    n = 5
    g0 = 1.1 * rng.normal(size=(2, n, n))
    g0 /= np.maximum(np.sqrt(g0[0] ** 2 + g0[1] ** 2) / 1.1, 1e-12)
    h0 = np.zeros((2, n, n))
    cfg = SubgradientConfig(max_iters=500)
    a = tv_projected_subgradient(g0, cfg, h0)
    b = tv_projected_subgradient(g0, cfg, h0)
    assert np.array_equal(a[0], b[0])
    assert a[1] == b[1]
    assert a[2] == b[2]


def test_solver_stagnation_stop():
    n = 4
    zero = np.zeros((2, n, n))
    cfg = SubgradientConfig(max_iters=50000, tolerance=1e-9, stagnation_window=100)
    _, _, trace = tv_projected_subgradient(zero, cfg, zero)
    assert len(trace) < 50001


def test_solver_input_validation():
    ok = np.zeros((2, 4, 4))
    with pytest.raises(ValueError):
        tv_projected_subgradient(ok, SubgradientConfig(), np.zeros((2, 5, 5)))
    bad = np.zeros((2, 4, 4))
    bad[0, 0, 0] = 2.0
    with pytest.raises(ValueError):
        tv_projected_subgradient(ok, SubgradientConfig(), bad)
    with pytest.raises(ValueError):
        SubgradientConfig(max_iters=0)
    with pytest.raises(ValueError):
        SubgradientConfig(step_c=-1.0)
