"""Norms and objectives: Top-(ell,q), max-ordered, and max-of-norm costs.

Top-(ell,q) takes the L_q norm of the ell largest entries; a max-ordered
norm takes the best of several ordered (sorted inner product) norms.  An
assignment or clustering is scored by the worst norm value over machines
or clients.
"""

import numpy as np

from maxnorm import (Assignment, LoadInstance, eval_load_objective, eval_norm,
                     max_ordered_norm, top_norm)

v = [3.0, 1.0, 2.0]
print("vector:", v)
print("top(2,1) = sum of two largest:", eval_norm(top_norm(2, 1), v))
print("top(1,1) = max entry:         ", eval_norm(top_norm(1, 1), v))
print("top(3,2) = euclidean length:  ", eval_norm(top_norm(3, 2), v))

norm = max_ordered_norm([(1.0, 0.0), (0.6, 0.6)])
print("\nmax-ordered over {(1,0), (.6,.6)} on (3,1):", eval_norm(norm, [3, 1]))
print("(the first weighting wins: 3 > 2.4)")

inst = LoadInstance(p=np.array([[1.0, 2.0, 3.0], [3.0, 2.0, 1.0]]))
sigma = Assignment((0, 0, 1))
print("\ntwo machines, three jobs, p =", inst.p.tolist())
print("assignment", sigma.sigma, "-> per-machine top(2,1) max:",
      eval_load_objective(inst, top_norm(2, 1), sigma))
