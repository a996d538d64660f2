"""Command-line interface.

Subcommands: decompose (image -> geometric + texture parts), project
(exact polar-ball projection with full argmin face), check-uniqueness
(W-set certificate), witness (constructive non-uniqueness instance),
experiment (multi-start diameter study, CSV report) and oracle
(brute-force references).  Exit codes: 0 success, 1 malformed input,
2 "found something" (nonempty W-set) or "nothing to report" (no witness).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from . import io as tio
from .experiments import ExperimentConfig, run_experiment, write_report
from .grid import divergence, gradient, mean_zero_split
from .oracle import GridSearchSpec, oracle_project, oracle_tv_min
from .polytopes import PolytopeNorm, W_ORTHO_TOL
from .projection import SubgradientConfig, project_onto_polar, tv_projected_subgradient, witness_from_triple
from .experiments import draw_feasible_start

__all__ = ["main"]


def _fmt_point(p) -> str:
    return "(" + ",".join(f"{0.0 if abs(x) < 1e-11 else x:.12g}" for x in p) + ")"


def _load_polytope(path) -> PolytopeNorm:
    return PolytopeNorm.from_vertices(tio.read_polygon_points(path))


def _field_potential(f0: np.ndarray) -> np.ndarray:
    """Solve div g0 = f0 for g0 via the potential -div(grad(phi)) = f0."""
    n = f0.shape[0]

    def matvec(x):
        return -divergence(gradient(x.reshape(n, n))).ravel()

    lap = LinearOperator((n * n, n * n), matvec=matvec)
    phi, info = cg(lap, f0.ravel(), rtol=1e-12, atol=0.0, maxiter=10 * n * n)
    if info != 0:
        raise RuntimeError(f"potential solve did not converge (cg info={info})")
    return -gradient(phi.reshape(n, n))


def _cmd_decompose(args) -> int:
    f = tio.read_matrix(args.matrix)
    fhat, f0 = mean_zero_split(f)
    g0 = _field_potential(f0)
    cfg = SubgradientConfig(max_iters=args.iters, seed=args.seed, tolerance=args.tol)
    h0 = draw_feasible_start(np.random.default_rng(args.seed), f.shape[0])
    h, value, _ = tv_projected_subgradient(g0, cfg, h0)
    v = divergence(h)
    u = f - v
    out_u = args.out_u or _derived(args.matrix, "u")
    out_v = args.out_v or _derived(args.matrix, "v")
    tio.write_matrix(out_u, u)
    tio.write_matrix(out_v, v)
    print(f"objective {value:.12g}; wrote {out_u} and {out_v}")
    return 0


def _derived(path: str, tag: str) -> str:
    stem, dot, ext = path.rpartition(".")
    return f"{stem}_{tag}.{ext}" if dot else f"{path}_{tag}"


def _cmd_project(args) -> int:
    P = _load_polytope(args.polygon)
    face = project_onto_polar(P, np.array([args.x, args.y]))
    pts = " ".join(_fmt_point(p) for p in face.face_vertices)
    print(f"value {face.optimal_value:.12g}; face: {pts}; unique: {str(face.is_unique).lower()}")
    return 0


def _cmd_check_uniqueness(args) -> int:
    P = _load_polytope(args.polygon)
    triples = P.w_set(tol=args.tol)
    if P.dim > 2:
        print(f"dim={P.dim}: probe only, emptiness is not a certified uniqueness claim")
    for t in triples:
        print(f"x1={_fmt_point(t.x1)} edge=[{_fmt_point(t.x2)} {_fmt_point(t.x3)}]")
    if triples:
        print(f"W-set has {len(triples)} triple(s): projections onto the polar ball are NOT all unique")
        return 2
    print("W-set empty: every point projects uniquely onto the polar ball")
    return 0


def _cmd_witness(args) -> int:
    P = _load_polytope(args.polygon)
    triples = P.w_set(tol=args.tol)
    if not triples:
        print("W-set empty: no non-uniqueness witness exists")
        return 2
    w = witness_from_triple(P, triples[0])
    print(f"x0={_fmt_point(w.x0)} r={w.r:.12g} a={_fmt_point(w.a)}")
    print(f"minimizers: w1={_fmt_point(w.w1)} w2={_fmt_point(w.w2)}")
    face = project_onto_polar(P, w.x0)
    pts = " ".join(_fmt_point(p) for p in face.face_vertices)
    print(f"argmin face at x0: value {face.optimal_value:.12g}; face: {pts}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        n=args.n,
        num_starts=args.starts,
        iters=args.iters,
        margin=args.margin,
        master_seed=args.seeds,
        experiment_count=args.experiments,
    )
    report = run_experiment(cfg)
    write_report(report, args.out)
    for row in report.rows:
        print(f"experiment {row.experiment}: diameter {row.diameter:.8g} best {row.best_value:.8g}")
    print(f"wrote {args.out} ({len(report.rows)} experiment(s), {report.wall_ms:.0f} ms)")
    if report.interrupted:
        print("interrupted: partial results flushed", file=sys.stderr)
        return 130
    return 0


def _cmd_oracle(args) -> int:
    if args.what == "project":
        P = _load_polytope(args.input)
        spec = GridSearchSpec(
            box_halfwidth=args.halfwidth,
            points_per_axis=args.points,
            refine_rounds=args.rounds,
        )
        value, samples = oracle_project(P, np.array([args.x, args.y]), spec)
    else:  # tv-min
        f = tio.read_matrix(args.input)
        _, f0 = mean_zero_split(f)
        spec = None
        if args.points or args.rounds != 3:
            spec = GridSearchSpec(points_per_axis=args.points or 9, refine_rounds=args.rounds)
        value, samples = oracle_tv_min(f0, spec)
        samples = samples.reshape(len(samples), -1)
    print(f"value {value:.12g}; {len(samples)} near-optimal sample(s)")
    for s in samples[:8]:
        print("  " + _fmt_point(s))
    if len(samples) > 8:
        print(f"  ... {len(samples) - 8} more")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tvpolar",
        description="TV image decomposition by projection onto the polar ball, "
        "polygonal gauge norms, uniqueness certificates, and multi-start experiments.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split an image into geometric + texture parts")
    p.add_argument("matrix", help="matrix file (N, then N rows of N floats)")
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=0.0, help="stagnation tolerance (0 disables)")
    p.add_argument("--out-u", default=None, help="output path for the geometric part")
    p.add_argument("--out-v", default=None, help="output path for the texture part")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("project", help="exact projection onto the polar ball")
    p.add_argument("polygon", help="polygon file (dim k, then k vertex rows)")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("check-uniqueness", help="list the W-set; exit 2 when nonempty")
    p.add_argument("polygon")
    p.add_argument("--tol", type=float, default=W_ORTHO_TOL)
    p.set_defaults(func=_cmd_check_uniqueness)

    p = sub.add_parser("witness", help="construct a non-uniqueness instance from the W-set")
    p.add_argument("polygon")
    p.add_argument("--tol", type=float, default=W_ORTHO_TOL)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("experiment", help="multi-start diameter study; writes CSV")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--starts", type=int, default=50)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--margin", type=float, default=0.1)
    p.add_argument("--seeds", type=int, default=0, help="master seed")
    p.add_argument("--experiments", type=int, default=5)
    p.add_argument("--out", default="report.csv")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("oracle", help="brute-force validation oracles")
    osub = p.add_subparsers(dest="what", required=True)
    po = osub.add_parser("project")
    po.add_argument("input", help="polygon file")
    po.add_argument("x", type=float)
    po.add_argument("y", type=float)
    po.add_argument("--points", type=int, default=101)
    po.add_argument("--rounds", type=int, default=3)
    po.add_argument("--halfwidth", type=float, default=0.0)
    po.set_defaults(func=_cmd_oracle)
    pt = osub.add_parser("tv-min")
    pt.add_argument("input", help="matrix file (n <= 3)")
    pt.add_argument("--points", type=int, default=0, help="points per axis (0: auto)")
    pt.add_argument("--rounds", type=int, default=3)
    pt.set_defaults(func=_cmd_oracle)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (tio.FormatError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
