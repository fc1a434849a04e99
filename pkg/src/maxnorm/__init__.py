"""Approximation algorithms for max-of-norm load balancing and multi-connection
k-center clustering, with stochastic fair variants via round-and-cut."""

from .errors import (InfeasibleError, InvalidInputError, InvalidSolutionError,
                     LpSolverError, MaxNormError, ResourceCapError,
                     SolverInternalError)
from .instances import (Assignment, ClusterInstance, ClusterSolution,
                        FairClusterInstance, FairLoadInstance,
                        KnapsackClusterInstance, LoadInstance,
                        MatroidClusterInstance, eval_cluster_objective,
                        eval_load_objective)
from .norms import Norm, eval_norm, max_ordered_norm, top_norm
from .load import solve_ordered_makespan, solve_topl_makespan
from .cluster import (solve_knapsack_center, solve_matroid_center,
                      solve_ordered_kcenter, solve_topl_kcenter)
from .fair import (SolutionDistribution, ct_count, round_and_cut, sample,
                   solve_fair)
from .oracle import (brute_force_fair, brute_force_fair_opt, brute_force_kcenter,
                     brute_force_knapsack_center, brute_force_makespan,
                     brute_force_matroid_center)

__version__ = "0.1.0"

__all__ = [
    "Assignment", "ClusterInstance", "ClusterSolution", "FairClusterInstance",
    "FairLoadInstance", "KnapsackClusterInstance", "LoadInstance",
    "MatroidClusterInstance", "Norm", "SolutionDistribution",
    "brute_force_fair", "brute_force_fair_opt", "brute_force_kcenter",
    "brute_force_knapsack_center", "brute_force_makespan",
    "brute_force_matroid_center", "ct_count", "eval_cluster_objective",
    "eval_load_objective", "eval_norm", "max_ordered_norm", "round_and_cut",
    "sample", "solve_fair", "solve_knapsack_center", "solve_matroid_center",
    "solve_ordered_kcenter", "solve_ordered_makespan", "solve_topl_kcenter",
    "solve_topl_makespan", "top_norm",
    "InfeasibleError", "InvalidInputError", "InvalidSolutionError",
    "LpSolverError", "MaxNormError", "ResourceCapError", "SolverInternalError",
]
