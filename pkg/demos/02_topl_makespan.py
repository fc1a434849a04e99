"""Top-(ell,q) makespan: guessing triples, LP rounding, and the certificate.

The solver guesses (radius R, bound B, threshold T), checks an assignment
LP with a per-machine count cap and bounded tail mass, and rounds with the
machine-copy construction.  The accepted guess certifies every machine's
cost below (2 R^q + B^q + ell T^q)^(1/q), within 4^(1/q) + eps of optimal.
"""

import numpy as np

from maxnorm import LoadInstance, brute_force_makespan, solve_topl_makespan, top_norm

rng = np.random.default_rng(11)
inst = LoadInstance(p=rng.integers(1, 11, size=(3, 5)).astype(float))
print("processing times:\n", inst.p)

for ell, q in [(1, 1.0), (2, 1.0), (2, 2.0)]:
    res = solve_topl_makespan(inst, ell, q, eps=0.1)
    opt = brute_force_makespan(inst, top_norm(ell, q))
    cert = res.certificate
    print(f"\ntop({ell},{q:g}):")
    print("  assignment        ", res.assignment.sigma)
    print("  achieved / optimal", res.value, "/", opt.value,
          f"(ratio {res.value / opt.value:.3f}, guarantee {4 ** (1 / q) + 0.1:.3f})")
    print("  accepted guess     R=%g B=%g T=%g" %
          (cert["radius"], cert["bound"], cert["threshold"]))
    print("  certificate bound ", cert["per_machine_bound"])
