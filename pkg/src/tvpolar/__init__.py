"""Total-variation image decomposition as projection onto a polar unit
ball, polygonal gauge norms with exact uniqueness certificates, and the
multi-start projected-subgradient experiment harness."""

from .grid import (
    as_field,
    as_image,
    divergence,
    field_sup_norm,
    gradient,
    mean_zero_split,
    tv,
    tv_dual_norm,
)
from .polytopes import Halfspace, PolytopeNorm, WTriple
from .projection import (
    ArgminFace,
    NonUniqueInstance,
    PolarProjector,
    SubgradientConfig,
    clamp_project,
    project_onto_polar,
    tv_projected_subgradient,
    witness_from_triple,
)
from .oracle import GridSearchSpec, oracle_project, oracle_tv_min
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    ExperimentRow,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "ArgminFace",
    "ExperimentConfig",
    "ExperimentReport",
    "ExperimentRow",
    "GridSearchSpec",
    "Halfspace",
    "NonUniqueInstance",
    "PolarProjector",
    "PolytopeNorm",
    "SubgradientConfig",
    "WTriple",
    "as_field",
    "as_image",
    "clamp_project",
    "divergence",
    "field_sup_norm",
    "gradient",
    "mean_zero_split",
    "oracle_project",
    "oracle_tv_min",
    "project_onto_polar",
    "run_experiment",
    "tv",
    "tv_dual_norm",
    "tv_projected_subgradient",
    "witness_from_triple",
]
