"""Facility budgets beyond cardinality: partition matroids and knapsacks.

The bundle pipeline swaps its budget layer: partition-capacity arcs keep the
opening independent in the matroid, while the knapsack variant drops the
per-location family (a vertex then has at most two fractional opens, both
opened in full) after pre-connecting clients to guessed heavy facilities;
total weight stays below (1 + 2 eps) of the budget.
"""

import numpy as np

from maxnorm import (KnapsackClusterInstance, MatroidClusterInstance,
                     brute_force_knapsack_center, brute_force_matroid_center,
                     solve_knapsack_center, solve_matroid_center, top_norm)
from maxnorm.generators import gen_cluster

base = gen_cluster(seed=4, clients=3, facilities=5, k=5)
norm = top_norm(2, 1.0)

minst = MatroidClusterInstance(base=base, parts=((0, 1, 2), (3, 4)),
                               capacities=(1, 2))
res = solve_matroid_center(minst, norm, eps=0.1)
opt = brute_force_matroid_center(minst, norm)
print("partition matroid: at most 1 of {0,1,2}, at most 2 of {3,4}")
print("  open:", res.solution.open_facilities,
      " achieved/optimal:", res.value, "/", opt.value)

rng = np.random.default_rng(9)
wt = rng.uniform(0.2, 1.0, size=5)
kinst = KnapsackClusterInstance(base=base, wt=wt, budget=float(wt.sum()) * 0.6)
res = solve_knapsack_center(kinst, norm, eps=0.25)
opt = brute_force_knapsack_center(kinst, norm)
print("\nknapsack: weights", np.round(wt, 2), "budget", round(kinst.budget, 2))
print("  open:", res.solution.open_facilities,
      " achieved/optimal:", res.value, "/", opt.value)
print("  weight used:", round(res.certificate["weight"], 3),
      " cap with violation:", round(res.certificate["weight_cap"], 3))
