"""riskbench: a laboratory for measuring how clustering solutions trained on
samples generalize, with exact identity checks, lower-bound instances, and
power-law rate fitting."""

from ._version import __version__
from .linalg import (OrthoBasis, Projector, decomposition_terms, orthonormalize,
                     project_residual, top_j_singular_subspace)
from .objectives import (CenterSolution, CostVector, PointSet, SubspaceSolution,
                         center_cost, power_bound_check, subspace_cost)
from .seeding import adaptive_subspace_seed, dz_seed, make_rng
from .solvers import (SolveTrace, SolverOptions, center_update_gd, em_center,
                      em_subspace, erm_oracle_small)
from .reduction import (AdaptiveReduction, adaptive_projection, net_size_bound,
                        unit_ball_net, verify_clustering_net)
from .complexity import (ComplexityEstimate, empirical_complexity,
                         paired_complexities, rank_j_pool_check)
from .hard_instance import (HardInstance, analytic_opt, build_hard_instance,
                            erm_hard, hard_scaling_experiment, sample_hard)
from .curvefit import FitResult, fit_power_law
from .ingest import fetch, load, normalize_to_unit_ball, synthetic_mixture
from .harness import (ExperimentConfig, estimate_opt_full, excess_risk_curve,
                      run_experiment)

__all__ = [
    "__version__",
    "OrthoBasis", "Projector", "decomposition_terms", "orthonormalize",
    "project_residual", "top_j_singular_subspace",
    "CenterSolution", "CostVector", "PointSet", "SubspaceSolution",
    "center_cost", "power_bound_check", "subspace_cost",
    "adaptive_subspace_seed", "dz_seed", "make_rng",
    "SolveTrace", "SolverOptions", "center_update_gd", "em_center",
    "em_subspace", "erm_oracle_small",
    "AdaptiveReduction", "adaptive_projection", "net_size_bound",
    "unit_ball_net", "verify_clustering_net",
    "ComplexityEstimate", "empirical_complexity", "paired_complexities",
    "rank_j_pool_check",
    "HardInstance", "analytic_opt", "build_hard_instance", "erm_hard",
    "hard_scaling_experiment", "sample_hard",
    "FitResult", "fit_power_law",
    "fetch", "load", "normalize_to_unit_ball", "synthetic_mixture",
    "ExperimentConfig", "estimate_opt_full", "excess_risk_curve",
    "run_experiment",
]
