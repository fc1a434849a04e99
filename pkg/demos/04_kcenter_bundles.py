"""Multi-connection k-center: splitting, bundles, and integral opening.

A fractional solution first gets normalized (nearest-first connections on
whole co-located copies), then grouped into bundles: full bundles hold one
unit of opening mass, the leftover fractional extent of each client forms
or reuses a partial bundle with a profit counter.  Opening one copy per
chosen bundle is an integral vertex of a two-laminar LP, solved here as a
min-cost flow.
"""

import numpy as np

from maxnorm import (ClusterInstance, brute_force_kcenter, solve_topl_kcenter,
                     top_norm)
from maxnorm.cluster import build_bundles, core_of, split_and_normalize

rng = np.random.default_rng(23)
pts = rng.uniform(0, 1, size=(7, 2))
d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
inst = ClusterInstance(n_clients=3, n_facilities=4, d=d, k=2, m=4,
                       l=[1, 1, 0], r=[2, 2, 2])

res = solve_topl_kcenter(inst, 2, 1.0, eps=0.1)
opt = brute_force_kcenter(inst, top_norm(2, 1))
print("open facilities:", res.solution.open_facilities)
print("connections:    ", res.solution.assigned)
print("achieved / optimal:", res.value, "/", opt.value)
print("certificate:", res.certificate)

# peek inside the pipeline: one client with extent 1.5 over three half-open
# facilities collects a full bundle (nearest unit of mass) and one partial
line = np.array([[0.0, 1.0, 2.0, 3.0],
                 [1.0, 0.0, 3.0, 4.0],
                 [2.0, 3.0, 0.0, 5.0],
                 [3.0, 4.0, 5.0, 0.0]])
toy = ClusterInstance(n_clients=1, n_facilities=3, d=line, k=2, m=0, l=[0], r=[2])
split = split_and_normalize(u=[1.5], y=[0.5, 0.5, 0.5], core=core_of(toy), radius=3.0)
bs = build_bundles(split)
print("\nhand-made fractional solution (u = 1.5, three half-open facilities):")
print("  copies:", split.copy_count(), " full bundles:",
      len(bs.full_indices()), " partial:", len(bs.partial_indices()))
for j, q in enumerate(bs.queues):
    kinds = ["full" if bs.is_full[b] else f"partial(reuse={bs.reuse[b]})" for b in q]
    print(f"  queue of client {j}: {kinds}")
