"""Exhaustive exact solvers: ground truth for every approximation test.

All oracles enumerate the full solution space under an explicit cap and
fail loudly when it is exceeded; no silent truncation.  The fair oracle
solves the distribution LP over the complete feasible family in exact
rational arithmetic, so fairness marginals are compared without
tolerances.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError, ResourceCapError
from .fair import SolutionDistribution, ct_count, fair_bound_candidates
from .instances import (Assignment, ClusterSolution, FairLoadInstance,
                        KnapsackClusterInstance, MatroidClusterInstance,
                        eval_load_objective)
from .lp import EQ, GE, LE, OPTIMAL, simplex_solve
from .norms import eval_norm

DEFAULT_CAP = 10 ** 6


@dataclass
class MakespanOptimum:
    assignment: Assignment
    value: float
    radius: float  # largest job size used by the optimum
    thresholds: tuple  # t-th largest size over machines, t = 1..jobs


def brute_force_makespan(inst, norm, cap=DEFAULT_CAP):
    m, n = inst.machines, inst.jobs
    if m ** n > cap:
        raise ResourceCapError(f"{m}**{n} assignments exceed the cap {cap}")
    allowed = [[i for i in range(m) if np.isfinite(inst.p[i, j])] for j in range(n)]
    best = None
    for combo in itertools.product(*allowed):
        a = Assignment(combo)
        val = eval_load_objective(inst, norm, a)
        if best is None or val < best[0]:
            best = (val, a)
    value, assignment = best
    per_machine = assignment.machine_jobs(m)
    radius = max((float(inst.p[i, j]) for i in range(m) for j in per_machine[i]),
                 default=0.0)
    thresholds = []
    for t in range(1, n + 1):
        tl = 0.0
        for i in range(m):
            sizes = sorted((float(inst.p[i, j]) for j in per_machine[i]), reverse=True)
            if len(sizes) >= t:
                tl = max(tl, sizes[t - 1])
        thresholds.append(tl)
    return MakespanOptimum(assignment=assignment, value=value, radius=radius,
                           thresholds=tuple(thresholds))


@dataclass
class KCenterOptimum:
    solution: ClusterSolution
    value: float
    radius: float  # largest connection distance used by the optimum
    thresholds: tuple  # t-th largest connection distance over clients


def _best_assignment_for_open(inst, norm, s):
    """Exact best max-norm over per-client nearest-prefix choices for a
    fixed open set: counts lie in [l_j, r_j], total coverage >= m."""
    nc = inst.n_clients
    prefix = []
    for j in range(nc):
        dists = sorted(float(inst.cf[j, i]) for i in s)
        row = [0.0]
        for c in range(1, min(int(inst.r[j]), len(s)) + 1):
            row.append(eval_norm(norm, dists[:c]))
        prefix.append(row)
    if any(len(prefix[j]) - 1 < int(inst.l[j]) for j in range(nc)):
        return None
    candidates = sorted({v for row in prefix for v in row})
    for v in candidates:
        cmax = [max(c for c in range(len(prefix[j])) if prefix[j][c] <= v)
                for j in range(nc)]
        if all(cmax[j] >= int(inst.l[j]) for j in range(nc)) and sum(cmax) >= inst.m:
            assigned = []
            for j in range(nc):
                order = sorted(s, key=lambda i: (float(inst.cf[j, i]), i))
                assigned.append(tuple(order[: cmax[j]]))
            return v, assigned
    return None


def _open_set_candidates(inst, variant, cap):
    nf = inst.n_facilities
    if variant is None:
        max_size = min(inst.k, nf)
    elif isinstance(variant, MatroidClusterInstance):
        max_size = min(int(sum(variant.capacities)), nf)
    else:
        max_size = nf
    if 2 ** nf * (inst.n_clients + 1) > cap:
        raise ResourceCapError(f"open-set enumeration exceeds the cap {cap}")
    for size in range(max_size + 1):
        for s in itertools.combinations(range(nf), size):
            if isinstance(variant, MatroidClusterInstance):
                ok = all(sum(1 for i in s if i in part) <= capacity
                         for part, capacity in zip(variant.parts, variant.capacities))
                if not ok:
                    continue
            elif isinstance(variant, KnapsackClusterInstance):
                if sum(float(variant.wt[i]) for i in s) > variant.budget + 1e-12:
                    continue
            yield s


def brute_force_kcenter(inst, norm, cap=DEFAULT_CAP, variant=None):
    """Exact optimum over open sets (cardinality budget by default, or the
    matroid/knapsack feasibility of the given variant instance)."""
    base = inst if variant is None else variant.base
    best = None
    for s in _open_set_candidates(base, variant, cap):
        found = _best_assignment_for_open(base, norm, s)
        if found is None:
            continue
        v, assigned = found
        if best is None or v < best[0]:
            best = (v, s, assigned)
    if best is None:
        raise InvalidInputError("instance admits no feasible solution")
    value, s, assigned = best
    solution = ClusterSolution(open_facilities=s, assigned=assigned)
    used = [d for j, fac in enumerate(assigned) for d in
            [float(base.cf[j, i]) for i in fac]]
    radius = max(used, default=0.0)
    thresholds = []
    for t in range(1, max(base.r0, 1) + 1):
        tl = 0.0
        for j, fac in enumerate(assigned):
            dists = sorted((float(base.cf[j, i]) for i in fac), reverse=True)
            if len(dists) >= t:
                tl = max(tl, dists[t - 1])
        thresholds.append(tl)
    return KCenterOptimum(solution=solution, value=value, radius=radius,
                          thresholds=tuple(thresholds))


def brute_force_matroid_center(minst, norm, cap=DEFAULT_CAP):
    return brute_force_kcenter(minst.base, norm, cap=cap, variant=minst)


def brute_force_knapsack_center(kinst, norm, cap=DEFAULT_CAP):
    return brute_force_kcenter(kinst.base, norm, cap=cap, variant=kinst)


# ---------------------------------------------------------------------------
# fair oracle


def _load_family(finst, norm, bound, cap):
    inst = finst.base
    m, n = inst.machines, inst.jobs
    if m ** n > cap:
        raise ResourceCapError(f"{m}**{n} assignments exceed the cap {cap}")
    allowed = [[i for i in range(m) if np.isfinite(inst.p[i, j])] for j in range(n)]
    out = []
    for combo in itertools.product(*allowed):
        a = Assignment(combo)
        if eval_load_objective(inst, norm, a) <= bound:
            out.append(combo)
    return out


def _center_family(finst, norm, bound, cap):
    base = finst.base
    nf = base.n_facilities
    if 2 ** nf * (base.n_clients + 1) > cap:
        raise ResourceCapError(f"2**{nf} open sets exceed the cap {cap}")
    out = []
    for size in range(min(base.k, nf) + 1):
        for s in itertools.combinations(range(nf), size):
            cts = [ct_count(norm, bound, [float(base.cf[j, i]) for i in s],
                            int(base.r[j])) for j in range(base.n_clients)]
            if all(int(base.l[j]) <= cts[j] for j in range(base.n_clients)):
                out.append((s, tuple(cts)))
    return out


def brute_force_fair(finst, norm, bound, cap=DEFAULT_CAP):
    """Exact feasibility of the fair distribution LP over the complete
    feasible family at this bound; returns the distribution or None."""
    if isinstance(finst, FairLoadInstance):
        family = _load_family(finst, norm, bound, cap)
        if not family:
            return None
        m = finst.base.machines
        rows = []
        for i in range(m):
            coeffs = {h: Fraction(sum(1 for v in sigma if v == i))
                      for h, sigma in enumerate(family)}
            rows.append(({h: c for h, c in coeffs.items() if c}, LE, finst.e[i]))
        rows.append(({h: Fraction(1) for h in range(len(family))}, EQ, Fraction(1)))
        status, lam = simplex_solve(rows, len(family))
        if status != OPTIMAL:
            return None
        keep = [(s, w) for s, w in zip(family, lam) if w > 0]
        return SolutionDistribution(kind="load", support=tuple(s for s, _ in keep),
                                    weights=tuple(w for _, w in keep),
                                    bound=float(bound), cert_bound=float(bound))
    family = _center_family(finst, norm, bound, cap)
    if not family:
        return None
    nc = finst.base.n_clients
    rows = []
    for j in range(nc):
        coeffs = {h: Fraction(cts[j]) for h, (_, cts) in enumerate(family) if cts[j]}
        rows.append((coeffs, GE, finst.e[j]))
    rows.append(({h: Fraction(1) for h in range(len(family))}, EQ, Fraction(1)))
    status, lam = simplex_solve(rows, len(family))
    if status != OPTIMAL:
        return None
    keep = [(s, w) for (s, _), w in zip(family, lam) if w > 0]
    return SolutionDistribution(kind="center", support=tuple(s for s, _ in keep),
                                weights=tuple(w for _, w in keep),
                                bound=float(bound), cert_bound=float(bound))


def brute_force_fair_opt(finst, norm, eps, cap=DEFAULT_CAP):
    """Smallest candidate bound (same grid the solver scans) at which the
    exact distribution LP is feasible; (bound, distribution) or None."""
    for bound in fair_bound_candidates(finst, norm, eps):
        dist = brute_force_fair(finst, norm, bound, cap=cap)
        if dist is not None:
            return bound, dist
    return None
