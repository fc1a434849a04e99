"""Weight sparsification: the factor-2 sandwich and the guessing gap.

Ordered norms carry one threshold per coordinate.  Keeping only the
power-of-two coordinates flattens the weights at a cost of at most 2, and
threshold guesses shrink to a dyadic grid.  The price of guessing shows up
as the gap certificate, which can genuinely reach Omega(log n): the family
below with weights sqrt(i) - sqrt(i-1) pins the optimum at 1 while the gap
grows linearly in t = log2(dimension).
"""

import numpy as np

from maxnorm import eval_norm, max_ordered_norm
from maxnorm.generators import tightness_family, tightness_gap
from maxnorm.sparsify import sparsify_weights

rng = np.random.default_rng(5)
w = tuple(sorted(rng.uniform(0, 1, size=6), reverse=True))
sparse, pos = sparsify_weights([w], 6)
print("weights:          ", np.round(w, 3))
print("kept coordinates: ", pos.indices)
print("sparsified:       ", np.round(sparse[0], 3))
full, flat = max_ordered_norm([w]), max_ordered_norm([tuple(sparse[0])])
for _ in range(3):
    v = rng.uniform(0, 2, size=6)
    a, b = eval_norm(flat, v), eval_norm(full, v)
    print(f"  sandwich on a random vector: {a:.3f} <= {b:.3f} <= {2 * a:.3f}")

print("\nworst-case guessing gap (optimum is 1 for every t):")
for t in range(2, 9):
    fam = tightness_family(t)
    gap = tightness_gap(t)
    print(f"  t={t:2d}  r={fam['r']:4d}  gap = {gap:7.3f}  gap/t = {gap / t:.3f}")
