"""Fair variants: distributions over solutions via round-and-cut.

A fair instance caps the expected number of jobs per machine (or floors the
expected connections per client) while the norm bound must hold with
probability 1.  The driver searches the dual polytope of the distribution
LP: every candidate dual point is either certified (no distribution at this
bound) or cut off by a rounded integral solution; once the cut system is
infeasible, the exact primal over the generated solutions is the
distribution.  All dual arithmetic is exact rationals.
"""

from fractions import Fraction

from maxnorm import (FairLoadInstance, LoadInstance, brute_force_fair_opt,
                     sample, solve_fair, top_norm)
from maxnorm.fair import load_marginals

# the symmetric two-machine toy: one unit job, caps 1/2 each
toy = FairLoadInstance(base=LoadInstance(p=[[1.0], [1.0]]), e=("1/2", "1/2"))
res = solve_fair(toy, top_norm(1, 1), eps=0.1)
print("toy: bound", res.bound, "support", res.distribution.support,
      "weights", [str(w) for w in res.distribution.weights])
print("samples:", sample(res.distribution, seed=0, n=10))

# a 2x3 instance where fairness forces randomization
inst = FairLoadInstance(base=LoadInstance(p=[[4.0, 2.0, 3.0], [3.0, 5.0, 2.0]]),
                        e=(Fraction(3, 2), Fraction(3, 2)))
res = solve_fair(inst, top_norm(2, 1), eps=0.1)
dist = res.distribution
print("\n2x3 instance, caps 3/2 each:")
print("  accepted bound:", res.bound, " hard norm cap:", dist.cert_bound)
for sigma, w in zip(dist.support, dist.weights):
    print(f"  with probability {w}: assignment {sigma}")
print("  expected jobs per machine:",
      [str(v) for v in load_marginals(dist, 2)])
opt = brute_force_fair_opt(inst, top_norm(2, 1), eps=0.1)
print("  exact fair optimum bound:", opt[0])
