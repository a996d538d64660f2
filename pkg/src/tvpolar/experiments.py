"""Multi-start solver experiments.

Each experiment draws an infeasible field g0 just outside the unit-disk
constraint (pixel magnitudes exactly 1 + margin), runs the projected
subgradient solver from many random feasible starts, and reports the
diameter of the set of reached solutions, measured between the divergence
images div(h - g0) in the Frobenius norm.  Small diameters are evidence
that the underlying decomposition problem has a unique minimizer.

Randomness is fully derived: g0 uses the stream (master_seed, experiment)
and start i uses (master_seed, experiment, i), so runs are reproducible
under any execution order or parallelism.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import divergence
from .projection import SubgradientConfig, tv_projected_subgradient

__all__ = ["ExperimentConfig", "ExperimentRow", "ExperimentReport", "run_experiment", "report_csv"]

CSV_HEADER = "experiment,diameter,best_value,wall_ms"


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol parameters of the multi-start study."""

    n: int = 8
    num_starts: int = 50
    iters: int = 20_000
    margin: float = 0.1
    master_seed: int = 0
    experiment_count: int = 5
    solver: SubgradientConfig = field(default_factory=SubgradientConfig)

    def __post_init__(self):
        if self.margin <= 0.0:
            raise ValueError("margin must be positive (g0 sits outside the feasible set)")
        if self.num_starts < 2:
            raise ValueError("num_starts must be >= 2")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.experiment_count < 1:
            raise ValueError("experiment_count must be >= 1")


@dataclass(frozen=True)
class ExperimentRow:
    experiment: int
    diameter: float
    best_value: float
    wall_ms: float
    start_seed_keys: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    rows: tuple[ExperimentRow, ...]
    wall_ms: float
    interrupted: bool = False


def _unit_angle_field(rng: np.random.Generator, n: int, magnitude) -> np.ndarray:
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(n, n))
    return magnitude * np.stack([np.cos(theta), np.sin(theta)])


def draw_infeasible_field(rng: np.random.Generator, n: int, margin: float) -> np.ndarray:
    """Field with uniform random pixel angles and magnitude exactly 1 + margin."""
    return _unit_angle_field(rng, n, 1.0 + margin)


def draw_feasible_start(rng: np.random.Generator, n: int) -> np.ndarray:
    """Field with pixels drawn uniformly from the unit disk."""
    r = np.sqrt(rng.uniform(0.0, 1.0, size=(n, n)))
    return _unit_angle_field(rng, n, r)


def solution_diameter(divs: list[np.ndarray]) -> float:
    """Max pairwise Frobenius distance between divergence images."""
    flat = np.array([d.ravel() for d in divs])
    diam = 0.0
    for i in range(len(flat)):
        diam = max(diam, float(np.max(np.linalg.norm(flat[i + 1 :] - flat[i], axis=1), initial=0.0)))
    return diam


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the full multi-start protocol.

    A keyboard interrupt stops cleanly after the current experiment and
    returns the partial report with ``interrupted`` set.
    """
    t_total = time.perf_counter()
    rows: list[ExperimentRow] = []
    interrupted = False
    try:
        for e in range(cfg.experiment_count):
            t_exp = time.perf_counter()
            g0 = draw_infeasible_field(
                np.random.default_rng(np.random.SeedSequence([cfg.master_seed, e])),
                cfg.n,
                cfg.margin,
            )
            solver_cfg = replace(cfg.solver, max_iters=cfg.iters)
            divs = []
            best_value = np.inf
            seed_keys = []
            for i in range(cfg.num_starts):
                key = (cfg.master_seed, e, i)
                seed_keys.append(key)
                rng = np.random.default_rng(np.random.SeedSequence(list(key)))
                h0 = draw_feasible_start(rng, cfg.n)
                h, val, _ = tv_projected_subgradient(g0, solver_cfg, h0)
                divs.append(divergence(h - g0))
                best_value = min(best_value, val)
            rows.append(
                ExperimentRow(
                    experiment=e,
                    diameter=solution_diameter(divs),
                    best_value=best_value,
                    wall_ms=1000.0 * (time.perf_counter() - t_exp),
                    start_seed_keys=tuple(seed_keys),
                )
            )
    except KeyboardInterrupt:
        interrupted = True
    return ExperimentReport(
        config=cfg,
        rows=tuple(rows),
        wall_ms=1000.0 * (time.perf_counter() - t_total),
        interrupted=interrupted,
    )


def report_csv(report: ExperimentReport) -> str:
    """Render the report as CSV text (header row, LF line endings)."""
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(
            f"{row.experiment},{row.diameter:.17g},{row.best_value:.17g},{row.wall_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_csv(report))
