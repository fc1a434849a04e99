"""Max-norm k-center with multi-connections: LP, bundles, rounding, drivers.

Pipeline for an accepted guess (radius R, bound B, threshold(s) T):

  1. solve the relaxation (connection variables x, per-client extents u,
     opening variables y, plus count/mass rows for the norm and a facility
     budget: cardinality, partition matroid, or knapsack);
  2. re-derive x nearest-first from (u, y) and split facilities into
     co-located copies until every client uses whole copies only;
  3. group the copies into bundles: full bundles carry one unit of opening
     mass and are opened exactly once; partial bundles earn their reuse
     count when opened.  Each client's queue lists ceil(u_j) bundles whose
     distances blow up by at most a factor 3;
  4. open one copy per chosen bundle through the integral bundle LP and
     read off the client connections from the queues.

Distance guarantees: each rounded client cost is at most
(2 (3R)^q + 3^q (B^q + ell T^q))^(1/q) for Top-(ell,q), and twice the
telescoped chain 3B + 6R w1 + 3 sum (w_l - w_next) (l-1) T_l for
max-ordered norms.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .bundlelp import (solve_knapsack_basic, solve_partition_matroid_integral,
                       solve_two_laminar_integral)
from .errors import InfeasibleError, InvalidInputError, SolverInternalError
from .instances import (ClusterSolution, eval_cluster_objective,
                        validate_cluster_solution)
from .lp import EQ, GE, LE, OPTIMAL, lp_model, solve_lp
from .norms import TOP, eval_norm, max_ordered_norm, top_norm
from .sparsify import (enumerate_threshold_sequences, geometric_grid,
                       single_threshold_candidates, snap_to_grid, sparsify_weights)

_TOL = 1e-9


@dataclass
class CenterCore:
    """Client-facility view a solver works on; facility_ids map the local
    facility columns back to instance indices (residual subinstances)."""

    cf: np.ndarray
    l: np.ndarray
    r: np.ndarray
    m: int
    facility_ids: tuple

    @property
    def n_clients(self):
        return self.cf.shape[0]

    @property
    def n_facilities(self):
        return self.cf.shape[1]

    @property
    def r0(self):
        return int(self.r.max()) if len(self.r) else 0

    def distances(self):
        return sorted(set(float(v) for v in self.cf.ravel()))


def core_of(inst):
    return CenterCore(cf=np.array(inst.cf), l=np.array(inst.l), r=np.array(inst.r),
                      m=int(inst.m), facility_ids=tuple(range(inst.n_facilities)))


# ---------------------------------------------------------------------------
# LP construction

CARDINALITY, PARTITION, KNAPSACK = "cardinality", "partition", "knapsack"


def _center_lp(core, budget, normspec, radius, fixed_bound=None, coverage=True):
    """Relaxation with x(i,j) <= y_i, sum_i x(i,j) = u_j in [l_j, r_j],
    pairs beyond the radius forbidden, norm rows per normspec, and the
    facility budget row(s).  With fixed_bound None a bound surrogate s is
    minimized; returns (model, index of s or None)."""
    nc, nf = core.n_clients, core.n_facilities

    def x(i, j):
        return i * nc + j

    def u(j):
        return nf * nc + j

    def y(i):
        return nf * nc + nc + i

    num = nf * nc + nc + nf
    lower = np.zeros(num)
    upper = np.ones(num)
    for j in range(nc):
        lower[u(j)] = float(core.l[j])
        upper[u(j)] = float(core.r[j])
    for i in range(nf):
        for j in range(nc):
            if core.cf[j, i] > radius:
                upper[x(i, j)] = 0.0
    sidx = None
    obj = None
    if fixed_bound is None:
        sidx = num
        num += 1
        lower = np.append(lower, 0.0)
        upper = np.append(upper, np.inf)
        obj = np.zeros(num)
        obj[sidx] = 1.0
    model = lp_model(num, lower=lower, upper=upper, objective=obj)
    for j in range(nc):
        row = {x(i, j): 1.0 for i in range(nf)}
        row[u(j)] = -1.0
        model.add_row(row, EQ, 0.0)
    for i in range(nf):
        for j in range(nc):
            if upper[x(i, j)] > 0:
                model.add_row({x(i, j): 1.0, y(i): -1.0}, LE, 0.0)
    if coverage:
        model.add_row({u(j): 1.0 for j in range(nc)}, GE, float(core.m))

    kind = normspec[0]
    if kind == "top":
        _, ell, q, threshold = normspec
        for j in range(nc):
            counted = [i for i in range(nf) if core.cf[j, i] > threshold]
            if not counted:
                continue
            model.add_row({x(i, j): 1.0 for i in counted}, LE, float(ell))
            mass = {x(i, j): float(core.cf[j, i]) ** q for i in counted}
            if fixed_bound is None:
                mass[sidx] = -1.0
                model.add_row(mass, LE, 0.0)
            else:
                model.add_row(mass, LE, float(fixed_bound) ** q)
    else:
        _, sparse, pos, seq = normspec
        tvals = seq.as_dict()
        deltas = [{ell: w[ell - 1] - (w[pos.next_index(ell) - 1]
                                      if pos.next_index(ell) <= pos.n else 0.0)
                   for ell in pos.indices} for w in sparse]
        for j in range(nc):
            for ell in pos.indices:
                counted = [i for i in range(nf) if core.cf[j, i] > tvals[ell]]
                if counted:
                    model.add_row({x(i, j): 1.0 for i in counted}, LE, float(ell))
            for delta in deltas:
                coeffs = {}
                for ell in pos.indices:
                    d = delta[ell]
                    if d == 0.0:
                        continue
                    for i in range(nf):
                        if core.cf[j, i] > tvals[ell]:
                            key = x(i, j)
                            coeffs[key] = coeffs.get(key, 0.0) + d * float(core.cf[j, i])
                if not coeffs:
                    continue
                if fixed_bound is None:
                    coeffs[sidx] = -1.0
                    model.add_row(coeffs, LE, 0.0)
                else:
                    model.add_row(coeffs, LE, float(fixed_bound))

    if budget[0] == CARDINALITY:
        model.add_row({y(i): 1.0 for i in range(nf)}, EQ, float(budget[1]))
    elif budget[0] == PARTITION:
        _, parts, caps = budget
        local = {fid: i for i, fid in enumerate(core.facility_ids)}
        for part, cap in zip(parts, caps):
            members = [local[fid] for fid in part if fid in local]
            if members:
                model.add_row({y(i): 1.0 for i in members}, LE, float(cap))
    elif budget[0] == KNAPSACK:
        _, wt, limit = budget
        model.add_row({y(i): float(wt[core.facility_ids[i]]) for i in range(nf)},
                      LE, float(limit))
    else:
        raise InvalidInputError(f"unknown budget {budget[0]!r}")
    return model, sidx


def _lp_parts(core, xvec):
    nc, nf = core.n_clients, core.n_facilities
    x = np.asarray(xvec[: nf * nc]).reshape(nf, nc)
    u = np.asarray(xvec[nf * nc: nf * nc + nc])
    y = np.asarray(xvec[nf * nc + nc: nf * nc + nc + nf])
    return x, u, y


def center_u_index(core, j):
    """Column of the connection-extent variable u_j in the relaxation."""
    return core.n_facilities * core.n_clients + j


# ---------------------------------------------------------------------------
# facility splitting


@dataclass
class SplitSolution:
    """Fractional solution normalized so every client uses whole co-located
    copies, nearest first."""

    core: CenterCore
    radius: float
    original: list  # copy -> local facility index
    mass: list  # copy -> opening mass
    support: list  # per client: copy ids, ascending (distance, id)
    u: list

    def dist(self, j, c):
        return float(self.core.cf[j, self.original[c]])

    def copy_count(self):
        return len(self.original)


def _snap_scalar(v, lo, hi, tol=1e-7):
    v = min(max(float(v), lo), hi)
    return round(v) if abs(v - round(v)) < tol else v


def split_and_normalize(u, y, core, radius):
    """Re-derive the connection pattern nearest-first from (u, y) and split
    facilities so each client's support is a set of whole copies.

    Nearest-first reassignment can only decrease the connection mass beyond
    any distance threshold, so every count/mass row of the source LP stays
    satisfied.
    """
    nc, nf = core.n_clients, core.n_facilities
    u_eff, usage = [], [dict() for _ in range(nf)]
    for j in range(nc):
        target = _snap_scalar(u[j], float(core.l[j]), float(core.r[j]))
        order = sorted((i for i in range(nf) if core.cf[j, i] <= radius and y[i] > _TOL),
                       key=lambda i: (core.cf[j, i], i))
        rem = target
        for i in order:
            if rem <= _TOL:
                break
            take = min(float(y[i]), rem)
            usage[i][j] = take
            rem -= take
        if rem > 1e-6:
            raise SolverInternalError("openings cannot carry the required extent")
        u_eff.append(target - max(rem, 0.0))

    original, mass, prefix_of = [], [], [dict() for _ in range(nf)]
    for i in range(nf):
        cuts = []
        for a in sorted(set(usage[i].values())):
            if a >= float(y[i]) - 1e-12:
                continue
            if cuts and a - cuts[-1] < 1e-12:
                continue
            cuts.append(a)
        start = len(original)
        prev = 0.0
        for c in cuts:
            original.append(i)
            mass.append(c - prev)
            prev = c
        if float(y[i]) - prev > 1e-12:
            original.append(i)
            mass.append(float(y[i]) - prev)
        for j, a in usage[i].items():
            if a >= float(y[i]) - 1e-12:
                count = len(original) - start
            else:
                count = min(range(len(cuts)), key=lambda t: abs(cuts[t] - a)) + 1
            prefix_of[i][j] = count

    support = [[] for _ in range(nc)]
    firsts = {}
    for c, i in enumerate(original):
        if i not in firsts:
            firsts[i] = c
    for j in range(nc):
        ids = []
        for i in range(nf):
            if j in prefix_of[i]:
                base = firsts[i]
                ids.extend(range(base, base + prefix_of[i][j]))
        ids.sort(key=lambda c: (core.cf[j, original[c]], c))
        support[j] = ids

    return SplitSolution(core=core, radius=float(radius), original=original,
                         mass=mass, support=support, u=u_eff)


# ---------------------------------------------------------------------------
# bundles


@dataclass
class BundleStructure:
    split: SplitSolution  # final copy registry (splits applied)
    bundles: list  # copy-id tuples
    is_full: list
    reuse: dict  # partial bundle index -> profit counter n_U
    queues: list  # per client: bundle indices in addition order

    def full_indices(self):
        return [b for b, f in enumerate(self.is_full) if f]

    def partial_indices(self):
        return [b for b, f in enumerate(self.is_full) if not f]


def _floor_ceil(u):
    snapped = round(u) if abs(u - round(u)) < 1e-7 else u
    return int(math.floor(snapped)), int(math.ceil(snapped))


def build_bundles(split):
    """Group fractional copies into bundles (two passes: full bundles by
    nearest unit mass, then one at-most-unit bundle per client with a
    fractional extent).  Reuse of an intersecting bundle keeps bundles
    disjoint; reusing a partial bundle raises its profit counter."""
    core = split.core
    nc = core.n_clients
    original = list(split.original)
    mass = list(split.mass)
    fj = [list(s) for s in split.support]
    bundles, is_full, reuse = [], [], {}
    member = {}
    queues = [[] for _ in range(nc)]
    floors, ceils = zip(*(_floor_ceil(v) for v in split.u)) if nc else ((), ())

    def dist(j, c):
        return float(core.cf[j, original[c]])

    def resort(j):
        fj[j].sort(key=lambda c: (dist(j, c), c))

    def prefix(j, target):
        """Nearest copies of fj[j] summing to target; boundary split deferred.
        Returns (whole ids, (boundary id, needed) or None, reach, dmax)."""
        ids, acc, dmax = [], 0.0, 0.0
        for c in fj[j]:
            if acc >= target - _TOL:
                break
            room = target - acc
            if mass[c] <= room + _TOL:
                ids.append(c)
                acc += mass[c]
                dmax = dist(j, c)
            else:
                return ids, (c, room), acc + room, dist(j, c)
        return ids, None, acc, dmax

    def split_copy(c, keep):
        if c in member:
            raise SolverInternalError("attempted to split a bundled copy")
        rest = mass[c] - keep
        mass[c] = keep
        original.append(original[c])
        mass.append(rest)
        newc = len(mass) - 1
        for jj in range(nc):
            if c in fj[jj]:
                fj[jj].append(newc)
                resort(jj)
        return newc

    def materialize(j, ids, boundary):
        if boundary is not None:
            c, keep = boundary
            if keep > _TOL:
                split_copy(c, keep)
                ids = ids + [c]
        for c in ids:
            if c in member:
                raise SolverInternalError("new bundle overlaps an existing one")
        return tuple(ids)

    def first_hit(touched, want_full):
        for c in touched:
            b = member.get(c)
            if b is not None and is_full[b] == want_full:
                return b
        return None

    # pass 1: full bundles until every queue holds floor(u_j) of them
    while True:
        pick = None
        for j in range(nc):
            if len(queues[j]) >= floors[j]:
                continue
            ids, boundary, reach, dmax = prefix(j, 1.0)
            if reach < 1.0 - 1e-6:
                raise SolverInternalError("client lost unit support mass before pass 1 ended")
            if pick is None or dmax < pick[3]:
                pick = (j, ids, boundary, dmax)
        if pick is None:
            break
        j, ids, boundary, _ = pick
        touched = ids + ([boundary[0]] if boundary is not None else [])
        hit = first_hit(touched, want_full=True)
        if hit is not None:
            queues[j].append(hit)
            inside = set(bundles[hit])
            fj[j] = [c for c in fj[j] if c not in inside]
        else:
            u_new = materialize(j, ids, boundary)
            bundles.append(u_new)
            is_full.append(True)
            b = len(bundles) - 1
            for c in u_new:
                member[c] = b
            queues[j].append(b)
            inside = set(u_new)
            fj[j] = [c for c in fj[j] if c not in inside]
            resort(j)

    # pass 2: one more (at most unit) bundle per client with fractional extent
    while True:
        pick = None
        for j in range(nc):
            if len(queues[j]) >= ceils[j]:
                continue
            total = sum(mass[c] for c in fj[j])
            if total <= _TOL:
                raise SolverInternalError("client has no residual support for its last bundle")
            target = min(1.0, total)
            ids, boundary, reach, dmax = prefix(j, target)
            if pick is None or reach > pick[3] + 1e-15:
                pick = (j, ids, boundary, reach)
        if pick is None:
            break
        j, ids, boundary, reach = pick
        touched = ids + ([boundary[0]] if boundary is not None else [])
        hit = first_hit(touched, want_full=True)
        if hit is None:
            hit = first_hit(touched, want_full=False)
            if hit is not None:
                reuse[hit] += 1
        if hit is not None:
            queues[j].append(hit)
            fj[j] = []
            continue
        u_new = materialize(j, ids, boundary)
        bundles.append(u_new)
        is_full.append(False)
        b = len(bundles) - 1
        for c in u_new:
            member[c] = b
        reuse[b] = 1
        queues[j].append(b)
        fj[j] = []

    out = BundleStructure(
        split=SplitSolution(core=core, radius=split.radius, original=original,
                            mass=mass, support=split.support, u=split.u),
        bundles=bundles, is_full=is_full, reuse=reuse, queues=queues)
    check_bundle_structure(out)
    return out


def check_bundle_structure(bs):
    """Structural invariants: disjoint bundles, unit mass on full bundles,
    at most unit on partials, queue length ceil(u_j), profit counters equal
    the number of queues reusing each partial bundle."""
    seen = set()
    for b, u in enumerate(bs.bundles):
        for c in u:
            if c in seen:
                raise SolverInternalError("bundles are not disjoint")
            seen.add(c)
        total = sum(bs.split.mass[c] for c in u)
        if bs.is_full[b] and abs(total - 1.0) > 1e-6:
            raise SolverInternalError(f"full bundle carries mass {total}")
        if not bs.is_full[b] and total > 1.0 + 1e-6:
            raise SolverInternalError(f"partial bundle carries mass {total}")
    for j, q in enumerate(bs.queues):
        _, ceil_u = _floor_ceil(bs.split.u[j])
        if len(q) != ceil_u:
            raise SolverInternalError("queue length differs from ceil(u_j)")
        if len(set(q)) != len(q):
            raise SolverInternalError("queue repeats a bundle")
    for b in bs.partial_indices():
        count = sum(1 for q in bs.queues if b in q)
        if count != bs.reuse[b]:
            raise SolverInternalError("partial bundle profit counter is off")


def closest_mass_distances(split, j):
    """d_max of the t-th closest unit of support mass, t = 1..floor(u_j),
    measured on the pristine split solution."""
    out, acc, t = [], 0.0, 1
    for c in split.support[j]:
        acc += split.mass[c]
        while acc >= t - 1e-6:
            out.append(split.dist(j, c))
            t += 1
    return out


def check_bundle_distances(split_before, bs):
    """Distance inflation of the queues: bundle t of client j stays within 3x
    the t-th closest unit mass, and within 3R for the final partial step."""
    core = bs.split.core
    for j in range(core.n_clients):
        vmax = closest_mass_distances(split_before, j)
        floor_u, _ = _floor_ceil(split_before.u[j])
        for t, b in enumerate(bs.queues[j], start=1):
            dmax = max(bs.split.dist(j, c) for c in bs.bundles[b])
            if t <= floor_u:
                if dmax > 3.0 * vmax[t - 1]:
                    raise SolverInternalError(
                        f"bundle {t} of client {j}: {dmax} > 3*{vmax[t - 1]}")
            elif dmax > 3.0 * split_before.radius:
                raise SolverInternalError(f"last bundle of client {j} beyond 3R")


# ---------------------------------------------------------------------------
# assembly


def assemble_solution(z, bs, fractional_open=False):
    """Turn an integral bundle opening into (local) open facilities and
    per-client connections read off the queues.

    With fractional_open (knapsack), positive entries are opened in full,
    each queue bundle contributes at most one (nearest) connection, and the
    result is a multiset of local facility ids.
    """
    split = bs.split
    opened = {c for c, v in z.items() if (v > 1e-7 if fractional_open else v == 1)}
    open_locals = [split.original[c] for c in sorted(opened)]
    if not fractional_open and len(set(open_locals)) != len(open_locals):
        raise SolverInternalError("two copies of one facility opened")
    assigned = []
    for j, q in enumerate(bs.queues):
        mine = []
        for b in q:
            inside = [c for c in bs.bundles[b] if c in opened]
            if not fractional_open and len(inside) > 1:
                raise SolverInternalError("bundle opened twice")
            if inside:
                best = min(inside, key=lambda c: (split.dist(j, c), c))
                mine.append(split.original[best])
        assigned.append(tuple(mine))
    return open_locals, assigned


def _coverage(assigned):
    return sum(len(a) for a in assigned)


# ---------------------------------------------------------------------------
# drivers


@dataclass
class CenterSolveResult:
    solution: ClusterSolution
    value: float
    certificate: dict


def _round_accepted(core, budget, xuy, radius):
    """Split, bundle, and integrally open for an accepted guess; returns
    (bundle structure, z, exact objective = coverage of the opening)."""
    _, u, y = xuy
    split = split_and_normalize(u, y, core, radius)
    bs = build_bundles(split)
    check_bundle_distances(split, bs)
    partial = [bs.bundles[b] for b in bs.partial_indices()]
    profits = [bs.reuse[b] for b in bs.partial_indices()]
    full = [bs.bundles[b] for b in bs.full_indices()]
    fixed = sum(1 for q in bs.queues for b in q if bs.is_full[b])
    copy_to_original = {c: bs.split.original[c] for u_ in bs.bundles for c in u_}
    if budget[0] == CARDINALITY:
        z, obj = solve_two_laminar_integral(full, partial, profits, copy_to_original,
                                            budget[1], fixed_term=fixed)
    elif budget[0] == PARTITION:
        _, parts, caps = budget
        local_parts = []
        local = {fid: i for i, fid in enumerate(core.facility_ids)}
        for part in parts:
            local_parts.append([local[fid] for fid in part if fid in local])
        z, obj = solve_partition_matroid_integral(full, partial, profits, copy_to_original,
                                                  local_parts, caps, fixed_term=fixed)
    else:
        raise SolverInternalError("knapsack goes through its own rounding")
    return bs, z, obj


def _top_cert(radius, bound, ell, q, threshold):
    return (2 * (3 * radius) ** q + 3 ** q * (bound ** q + ell * threshold ** q)) ** (1.0 / q)


def solve_topl_kcenter(inst, ell, q, eps):
    """Top-(ell,q) k-center within factor 3*4^(1/q) + eps of optimal."""
    core = core_of(inst)
    budget = (CARDINALITY, inst.k)
    best = _scan_top_guesses(core, budget, ell, q, eps)
    bound, radius, threshold, xuy = best
    bs, z, obj = _round_accepted(core, budget, xuy, radius)
    if obj < core.m:
        raise SolverInternalError("integral opening lost coverage")
    open_locals, assigned = assemble_solution(z, bs)
    solution = ClusterSolution(
        open_facilities=tuple(core.facility_ids[i] for i in open_locals),
        assigned=tuple(tuple(core.facility_ids[i] for i in a) for a in assigned))
    validate_cluster_solution(inst, solution)
    value = eval_cluster_objective(inst, top_norm(ell, q), solution)
    cert_val = _top_cert(radius, bound, ell, q, threshold)
    if value > cert_val * (1 + 1e-9) + 1e-12:
        raise SolverInternalError("rounded value exceeds its certificate")
    cert = {"radius": radius, "bound": bound, "threshold": threshold,
            "per_client_bound": cert_val, "coverage": int(obj)}
    return CenterSolveResult(solution=solution, value=value, certificate=cert)


def _scan_top_guesses(core, budget, ell, q, eps, coverage=True):
    root = 1.0 / q
    grid_eps = eps / (3 * 4.0 ** root)
    radii = sorted(set(core.distances()) | {0.0})
    thresholds = single_threshold_candidates(core.distances())
    r0 = max(core.r0, 1)
    best = None
    for radius in radii:
        if best is not None and radius > best[0]:
            break
        grid = [0.0] if radius == 0.0 else geometric_grid(radius, r0 ** root * radius, grid_eps)
        for t in thresholds:
            if t > radius * (1 + 1e-12):
                break
            if best is not None and ell ** root * t > best[0]:
                break
            model, sidx = _center_lp(core, budget, ("top", ell, q, t), radius,
                                     coverage=coverage)
            sol = solve_lp(model)
            if sol.status != OPTIMAL:
                continue
            bhat = max(max(sol.x[sidx], 0.0) ** root, radius, ell ** root * t)
            bound = snap_to_grid(grid, bhat)
            if bound is None:
                continue
            cand = (bound, radius, t, _lp_parts(core, sol.x))
            if best is None or cand[:3] < best[:3]:
                best = cand
    if best is None:
        raise InfeasibleError("no guess satisfies the relaxation; instance is infeasible")
    return best


def solve_ordered_kcenter(inst, weights, eps):
    """Max-ordered k-center via sparsified weights; chain-bound certificate."""
    core = core_of(inst)
    budget = (CARDINALITY, inst.k)
    best = _scan_ordered_guesses(core, budget, weights, eps)
    bound, chain, radius, seq, sparse, pos, xuy = best
    bs, z, obj = _round_accepted(core, budget, xuy, radius)
    if obj < core.m:
        raise SolverInternalError("integral opening lost coverage")
    open_locals, assigned = assemble_solution(z, bs)
    solution = ClusterSolution(
        open_facilities=tuple(core.facility_ids[i] for i in open_locals),
        assigned=tuple(tuple(core.facility_ids[i] for i in a) for a in assigned))
    validate_cluster_solution(inst, solution)
    value = eval_cluster_objective(inst, max_ordered_norm(weights), solution)
    if value > chain * (1 + 1e-9) + 1e-12:
        raise SolverInternalError("rounded value exceeds its chain bound")
    cert = {"radius": radius, "bound": bound, "sequence": seq.values if seq else (),
            "chain_bound": chain, "coverage": int(obj)}
    return CenterSolveResult(solution=solution, value=value, certificate=cert)


def _ordered_chain(sparse, pos, seq, radius, bound):
    """Twice the telescoped rounding bound, maximized over weight vectors."""
    worst = 0.0
    tvals = seq.as_dict()
    for w in sparse:
        tail = 0.0
        for ell in pos.indices:
            nxt = pos.next_index(ell)
            w_next = w[nxt - 1] if nxt <= pos.n else 0.0
            tail += (w[ell - 1] - w_next) * (ell - 1) * tvals[ell]
        worst = max(worst, 3 * bound + 6 * radius * float(w[0]) + 3 * tail)
    return 2.0 * worst


def _scan_ordered_guesses(core, budget, weights, eps, coverage=True):
    r0 = max(core.r0, 1)
    sparse, pos = sparsify_weights(weights, r0)
    wtop = max(float(w[0]) for w in sparse)
    radii = sorted(set(core.distances()) | {0.0})
    best = None
    if wtop == 0.0:
        # zero objective: any feasible opening works; reuse the top driver at ell=1
        b = _scan_top_guesses(core, budget, 1, 1.0, eps, coverage=coverage)
        _, radius, _, xuy = b
        return (0.0, 0.0, radius, None, sparse, pos, xuy)
    for radius in radii:
        if best is not None and radius * wtop > best[0]:
            break
        if radius == 0.0:
            grid = [0.0]
            seqs = [None]
        else:
            grid = geometric_grid(radius * wtop, r0 * radius * wtop, eps)
            seqs = enumerate_threshold_sequences(radius, r0)
        for seq in seqs:
            if seq is None:
                normspec = ("top", r0, 1.0, 0.0)  # radius 0: only zero-distance links
                model, sidx = _center_lp(core, budget, normspec, radius, coverage=coverage)
            else:
                model, sidx = _center_lp(core, budget, ("ordered", sparse, pos, seq),
                                         radius, coverage=coverage)
            sol = solve_lp(model)
            if sol.status != OPTIMAL:
                continue
            bound = snap_to_grid(grid, max(max(sol.x[sidx], 0.0), radius * wtop)) \
                if seq is not None else 0.0
            if bound is None:
                continue
            chain = _ordered_chain(sparse, pos, seq, radius, bound) if seq is not None else 0.0
            cand = (bound, chain, radius, seq, sparse, pos, _lp_parts(core, sol.x))
            if best is None or cand[:2] < best[:2]:
                best = cand
    if best is None:
        raise InfeasibleError("no guess satisfies the relaxation; instance is infeasible")
    return best


def solve_matroid_center(minst, norm, eps):
    """Partition-matroid budget: same pipeline, opening stays independent."""
    core = core_of(minst.base)
    budget = (PARTITION, minst.parts, minst.capacities)
    if norm.kind == TOP:
        bound, radius, threshold, xuy = _scan_top_guesses(core, budget, norm.ell, norm.q, eps)
        chain = _top_cert(radius, bound, norm.ell, norm.q, threshold)
        seq_values = ()
    else:
        bound, chain, radius, seq, sparse, pos, xuy = \
            _scan_ordered_guesses(core, budget, norm.weights, eps)
        seq_values = seq.values if seq else ()
    bs, z, obj = _round_accepted(core, budget, xuy, radius)
    if obj < core.m:
        raise SolverInternalError("integral opening lost coverage")
    open_locals, assigned = assemble_solution(z, bs)
    solution = ClusterSolution(
        open_facilities=tuple(core.facility_ids[i] for i in open_locals),
        assigned=tuple(tuple(core.facility_ids[i] for i in a) for a in assigned))
    validate_cluster_solution(minst.base, solution, check_cardinality=False)
    opened = Counter(solution.open_facilities)
    for part, cap in zip(minst.parts, minst.capacities):
        if sum(opened[i] for i in part) > cap:
            raise SolverInternalError("opening violates a partition capacity")
    value = eval_cluster_objective(minst.base, norm, solution)
    if value > chain * (1 + 1e-9) + 1e-12:
        raise SolverInternalError("rounded value exceeds its certificate")
    cert = {"radius": radius, "bound": bound, "per_client_bound": chain,
            "sequence": seq_values, "coverage": int(obj)}
    return CenterSolveResult(solution=solution, value=value, certificate=cert)


# ---------------------------------------------------------------------------
# knapsack variant

_KNAPSACK_GRID_EPS = 0.005  # bound-grid resolution, independent of the weight-guess eps


def _prefix_norm_table(norm, dists, rcap):
    """Norm of the c nearest connections for c = 0..min(rcap, len(dists))."""
    out = [0.0]
    for c in range(1, min(rcap, len(dists)) + 1):
        out.append(eval_norm(norm, dists[:c]))
    return out


def solve_knapsack_center(kinst, norm, eps):
    """Knapsack budget with weight violation at most (1 + 2*eps): guess the
    heavy facilities of the optimum (weight >= eps*W), pre-connect clients to
    them nearest-first within the bound, and solve the light-facility residual
    whose basic vertex opens at most two fractional copies in full."""
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    base = kinst.base
    core = core_of(base)
    wt, budget_w = np.asarray(kinst.wt, float), float(kinst.budget)
    nf, nc = base.n_facilities, base.n_clients
    heavy = [i for i in range(nf) if wt[i] >= eps * budget_w and wt[i] > 0]
    light = [i for i in range(nf) if i not in set(heavy)]
    max_heavy = int(math.floor(1.0 / eps))
    s0_guesses = []
    for size in range(0, min(max_heavy, len(heavy)) + 1):
        for combo in itertools.combinations(heavy, size):
            if sum(wt[i] for i in combo) <= budget_w + 1e-9:
                s0_guesses.append(combo)

    if norm.kind == TOP:
        root = 1.0 / norm.q
        scale_lo, scale_hi = 1.0, max(core.r0, 1) ** root
    else:
        sparse_all, _ = sparsify_weights(norm.weights, max(core.r0, 1))
        wtop = max(float(w[0]) for w in sparse_all)
        if wtop == 0.0:
            scale_lo = scale_hi = 1.0
        else:
            scale_lo, scale_hi = wtop, max(core.r0, 1) * wtop

    radii = sorted(set(core.distances()) | {0.0})
    best = None  # (bound, idx, payload)
    for s0_idx, s0 in enumerate(s0_guesses):
        w_res = budget_w - float(sum(wt[i] for i in s0))
        for radius in radii:
            if best is not None and radius * scale_lo > best[0]:
                break
            grid = [0.0] if radius == 0.0 else geometric_grid(
                radius * scale_lo, scale_hi * radius, _KNAPSACK_GRID_EPS)
            neighbor_dists = [sorted(float(core.cf[j, i]) for i in s0
                                     if core.cf[j, i] <= radius) for j in range(nc)]
            tables = [_prefix_norm_table(norm, nd, int(core.r[j]))
                      for j, nd in enumerate(neighbor_dists)]
            config_cache = {}
            for bound in grid:
                if best is not None and bound >= best[0]:
                    break
                pre = tuple(max(c for c in range(len(tables[j]))
                                if tables[j][c] <= bound + 1e-12) for j in range(nc))
                if pre not in config_cache:
                    config_cache[pre] = _residual_guess(core, light, wt, w_res, pre,
                                                        neighbor_dists, radius, norm)
                found = config_cache[pre]
                if found is None:
                    continue
                bhat, payload = found
                if bound >= bhat - 1e-12:
                    cand = (bound, (s0_idx, radius), (s0, radius, pre, payload))
                    if best is None or cand[0] < best[0]:
                        best = cand
                    break
    if best is None:
        raise InfeasibleError("knapsack instance admits no guessed opening")
    bound, _, (s0, radius, pre, payload) = best
    return _finish_knapsack(kinst, norm, eps, core, light, wt, s0, radius, bound,
                            pre, payload)


def _residual_guess(core, light, wt, w_res, pre, neighbor_dists, radius, norm):
    """Cheapest attainable bound for the light-facility residual instance
    under one pre-connection pattern; returns (bound estimate, payload)."""
    nc = core.n_clients
    l_res = np.maximum(core.l - np.array(pre), 0)
    r_res = core.r - np.array(pre)
    if np.any(r_res < 0):
        return None
    m_res = max(0, core.m - int(sum(pre)))
    rcore = CenterCore(cf=core.cf[:, light], l=l_res, r=np.array(r_res),
                       m=m_res, facility_ids=tuple(core.facility_ids[i] for i in light))
    budget = (KNAPSACK, wt, w_res)
    best = None
    if norm.kind == TOP:
        root = 1.0 / norm.q
        thresholds = single_threshold_candidates(rcore.distances())
        for t in thresholds:
            if t > radius * (1 + 1e-12):
                break
            model, sidx = _center_lp(rcore, budget, ("top", norm.ell, norm.q, t), radius)
            sol = solve_lp(model)
            if sol.status != OPTIMAL:
                continue
            bhat = max(max(sol.x[sidx], 0.0) ** root, radius, norm.ell ** root * t)
            if best is None or bhat < best[0]:
                best = (bhat, (rcore, ("top", norm.ell, norm.q, t), _lp_parts(rcore, sol.x)))
    else:
        r0 = max(core.r0, 1)
        sparse, pos = sparsify_weights(norm.weights, r0)
        wtop = max(float(w[0]) for w in sparse)
        seqs = [None] if radius == 0.0 else enumerate_threshold_sequences(radius, r0)
        for seq in seqs:
            spec = ("top", r0, 1.0, 0.0) if seq is None else ("ordered", sparse, pos, seq)
            model, sidx = _center_lp(rcore, budget, spec, radius)
            sol = solve_lp(model)
            if sol.status != OPTIMAL:
                continue
            bhat = max(max(sol.x[sidx], 0.0), radius * wtop)
            if best is None or bhat < best[0]:
                best = (bhat, (rcore, spec, _lp_parts(rcore, sol.x)))
    return best


def _finish_knapsack(kinst, norm, eps, core, light, wt, s0, radius, bound, pre, payload):
    rcore, spec, xuy = payload
    base = kinst.base
    _, u, y = xuy
    split = split_and_normalize(u, y, rcore, radius)
    bs = build_bundles(split)
    check_bundle_distances(split, bs)
    partial = [bs.bundles[b] for b in bs.partial_indices()]
    profits = [bs.reuse[b] for b in bs.partial_indices()]
    full = [bs.bundles[b] for b in bs.full_indices()]
    copy_weights = {c: float(wt[rcore.facility_ids[bs.split.original[c]]])
                    for u_ in bs.bundles for c in u_}
    w_res = kinst.budget - float(sum(wt[i] for i in s0))
    z, _, fractional = solve_knapsack_basic(full, partial, profits, copy_weights, w_res)
    open_locals, assigned_res = assemble_solution(z, bs, fractional_open=True)
    open_global = [rcore.facility_ids[i] for i in open_locals]
    weight_total = float(sum(wt[i] for i in s0)) + float(sum(wt[i] for i in open_global))
    if weight_total > (1 + 2 * eps) * kinst.budget + 1e-9:
        raise SolverInternalError("knapsack violation beyond the guaranteed factor")

    assigned = []
    for j in range(base.n_clients):
        nearest_heavy = sorted((float(core.cf[j, i]), i) for i in s0
                               if core.cf[j, i] <= radius)[: pre[j]]
        mine = [i for _, i in nearest_heavy]
        mine += [rcore.facility_ids[i] for i in assigned_res[j]]
        assigned.append(tuple(mine))
    solution = ClusterSolution(open_facilities=tuple(sorted(list(s0) + open_global)),
                               assigned=tuple(assigned))
    validate_cluster_solution(base, solution, check_cardinality=False)
    value = eval_cluster_objective(base, norm, solution)
    if norm.kind == TOP:
        res_cert = _top_cert(radius, bound, norm.ell, norm.q, spec[3])
    else:
        if spec[0] == "ordered":
            res_cert = _ordered_chain(spec[1], spec[2], spec[3], radius, bound)
        else:
            res_cert = 0.0
    cert_val = bound + res_cert
    if value > cert_val * (1 + 1e-9) + 1e-12:
        raise SolverInternalError("rounded value exceeds its certificate")
    total_cover = _coverage(assigned)
    if total_cover < base.m:
        raise SolverInternalError("knapsack rounding lost coverage")
    cert = {"radius": radius, "bound": bound, "per_client_bound": cert_val,
            "weight": weight_total, "weight_cap": (1 + 2 * eps) * kinst.budget,
            "fractional_copies": len(fractional)}
    return CenterSolveResult(solution=solution, value=value, certificate=cert)
