"""Coresets for (k, z)-clustering of points with missing coordinates.

Pipeline: restrict the data onto a family of coordinate subsets, keep a
dynamic farthest-first (k-center) coreset per restriction, peel those
coresets to get importance scores, and importance-sample the final
weighted coreset.  Includes uniform-sampling and imputation baselines,
a missing-aware Lloyd's heuristic, and an experiment harness.
"""

from .bench import (
    ExperimentConfig,
    adversarial_centers,
    empirical_error,
    gen_lower_bound,
    gen_synthetic,
    random_centers,
    run_lloyd_speedup,
    run_size_error_sweep,
)
from .core import (
    CenterSet,
    ClusteringParams,
    Dataset,
    InputError,
    MissingPoint,
    WeightedCoreset,
    cost,
    dist,
    dist_restricted,
)
from .coreset import build_coreset, imputation_coreset, impute_dataset, uniform_coreset
from .dyngonz import (
    DynGonzalezRestriction,
    DynKCenterCoreset,
    ProjectionSet,
    static_gonzalez,
)
from .family import CoordinateFamily, build_family, verify_family
from .lloyd import LloydResult, lloyd
from .ordered1d import Ordered1D
from .sensitivity import (
    SensitivityScores,
    estimate_sensitivities,
    true_sensitivity_lower_bound,
)

__version__ = "0.1.0"

__all__ = [
    "CenterSet",
    "ClusteringParams",
    "CoordinateFamily",
    "Dataset",
    "DynGonzalezRestriction",
    "DynKCenterCoreset",
    "ExperimentConfig",
    "InputError",
    "LloydResult",
    "MissingPoint",
    "Ordered1D",
    "ProjectionSet",
    "SensitivityScores",
    "WeightedCoreset",
    "adversarial_centers",
    "build_coreset",
    "build_family",
    "cost",
    "dist",
    "dist_restricted",
    "empirical_error",
    "estimate_sensitivities",
    "gen_lower_bound",
    "gen_synthetic",
    "imputation_coreset",
    "impute_dataset",
    "lloyd",
    "random_centers",
    "run_lloyd_speedup",
    "run_size_error_sweep",
    "static_gonzalez",
    "true_sensitivity_lower_bound",
    "uniform_coreset",
    "verify_family",
]
