"""LP construction/solution layer.

Two solvers live here:

  * solve_lp: floating-point solves through scipy's HiGHS dual simplex,
    used for the assignment/clustering relaxations.  Optimal solutions are
    verified against a residual tolerance TAU_LP and come back with
    at-bound flags (vertex certificate).
  * simplex_solve: a small dense two-phase simplex over Fractions with
    Bland's rule, used wherever exactness matters (dual candidate points,
    distribution LPs, exact matchings).  Problem sizes there are tiny.

cutting_plane is the constraint-generation loop shared by the fairness
drivers: it replaces the ellipsoid method of the analysis with finite cut
generation, which terminates because cuts index integral solutions drawn
from a finite set and a returned cut is always new.
"""

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import LpSolverError, ResourceCapError, SolverInternalError

TAU_LP = 1e-7

# debug flag: export MAXNORM_DUMP_LP=<dir> to write every solved model in the
# standard LP file layout for cross-checking against external solvers
_DUMP_DIR = os.environ.get("MAXNORM_DUMP_LP")
_DUMP_COUNTER = itertools.count()

LE, GE, EQ = "<=", ">=", "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpModel:
    num_vars: int
    lower: np.ndarray
    upper: np.ndarray
    objective: np.ndarray  # minimized
    rows: list
    names: list = None

    def add_row(self, coeffs, sense, rhs):
        self.rows.append((dict(coeffs), sense, float(rhs)))


def lp_model(num_vars, lower=0.0, upper=np.inf, objective=None, names=None):
    lower = np.full(num_vars, lower, dtype=float) if np.isscalar(lower) else np.asarray(lower, float)
    upper = np.full(num_vars, upper, dtype=float) if np.isscalar(upper) else np.asarray(upper, float)
    obj = np.zeros(num_vars) if objective is None else np.asarray(objective, float)
    return LpModel(num_vars=num_vars, lower=lower, upper=upper, objective=obj, rows=[], names=names)


@dataclass
class LpSolution:
    status: str
    x: np.ndarray
    objective: float
    basic: np.ndarray  # True where the variable sits strictly between its bounds
    message: str = ""


def solve_lp(model):
    """Solve min c.x subject to the model rows and bounds.

    Optimal solutions are basic (HiGHS dual simplex) and are re-checked
    against every row within TAU_LP.  Infeasible solves return the solver's
    certificate message.
    """
    if _DUMP_DIR:
        path = os.path.join(_DUMP_DIR, f"model_{next(_DUMP_COUNTER):06d}.lp")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dump_lp(model))
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, sense, rhs in model.rows:
        row = np.zeros(model.num_vars)
        for idx, c in coeffs.items():
            row[idx] += c
        if sense == LE:
            a_ub.append(row), b_ub.append(rhs)
        elif sense == GE:
            a_ub.append(-row), b_ub.append(-rhs)
        elif sense == EQ:
            a_eq.append(row), b_eq.append(rhs)
        else:
            raise LpSolverError(f"unknown sense {sense!r}")
    res = linprog(
        model.objective,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=np.column_stack([model.lower, model.upper]),
        method="highs-ds",
    )
    if res.status == 2:
        return LpSolution(INFEASIBLE, None, np.nan, None, message=res.message)
    if res.status == 3:
        return LpSolution(UNBOUNDED, None, np.nan, None, message=res.message)
    if res.status != 0:
        raise LpSolverError(f"LP solve failed: {res.message}")
    x = np.asarray(res.x, float)
    _check_residuals(model, x)
    at_bound = (x <= model.lower + TAU_LP) | (x >= model.upper - TAU_LP)
    return LpSolution(OPTIMAL, x, float(res.fun), ~at_bound, message=res.message)


def _check_residuals(model, x):
    scale = 1.0 + float(np.abs(x).max(initial=0.0))
    for coeffs, sense, rhs in model.rows:
        val = sum(c * x[idx] for idx, c in coeffs.items())
        bad = ((sense == LE and val > rhs + TAU_LP * scale)
               or (sense == GE and val < rhs - TAU_LP * scale)
               or (sense == EQ and abs(val - rhs) > TAU_LP * scale))
        if bad:
            raise LpSolverError(f"optimal point violates a row: {val} {sense} {rhs}")


def dump_lp(model):
    """Text dump in the standard LP file layout (for external cross-checks)."""

    def name(idx):
        return model.names[idx] if model.names else f"x{idx}"

    def terms(coeffs):
        parts = []
        for idx in sorted(coeffs):
            c = coeffs[idx]
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c):.12g} {name(idx)}")
        s = " ".join(parts) if parts else "0"
        return s[2:] if s.startswith("+ ") else s

    lines = ["Minimize", " obj: " + terms({i: c for i, c in enumerate(model.objective) if c}),
             "Subject To"]
    for rid, (coeffs, sense, rhs) in enumerate(model.rows):
        op = {LE: "<=", GE: ">=", EQ: "="}[sense]
        lines.append(f" c{rid}: {terms(coeffs)} {op} {rhs:.12g}")
    lines.append("Bounds")
    for i in range(model.num_vars):
        lo, up = model.lower[i], model.upper[i]
        up_s = "+inf" if np.isinf(up) else f"{up:.12g}"
        lines.append(f" {lo:.12g} <= {name(i)} <= {up_s}")
    lines.append("End")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# exact rational simplex


def simplex_solve(rows, num_vars, objective=None, nonneg=None):
    """Two-phase dense simplex over Fractions with Bland's rule.

    rows: (coeffs, sense, rhs) with coeffs a dict or sequence;
    nonneg: per-variable flags, False meaning a free variable;
    objective: minimized, defaults to 0 (pure feasibility).

    Returns (status, x) with x a tuple of Fractions on success.
    """
    nonneg = [True] * num_vars if nonneg is None else list(nonneg)
    objective = [Fraction(0)] * num_vars if objective is None else [Fraction(c) for c in objective]

    # map model variables onto nonnegative columns (free -> difference of two)
    col_of, neg_col_of, ncols = [], [], 0
    for v in range(num_vars):
        col_of.append(ncols)
        ncols += 1
        if not nonneg[v]:
            neg_col_of.append(ncols)
            ncols += 1
        else:
            neg_col_of.append(None)

    def expand(coeffs):
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        row = [Fraction(0)] * ncols
        for v, c in items:
            c = Fraction(c)
            row[col_of[v]] += c
            if neg_col_of[v] is not None:
                row[neg_col_of[v]] -= c
        return row

    norm_rows = []
    for coeffs, sense, rhs in rows:
        row, rhs = expand(coeffs), Fraction(rhs)
        if rhs < 0:
            row = [-c for c in row]
            rhs = -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        norm_rows.append((row, sense, rhs))

    m = len(norm_rows)
    nslack = sum(1 for _, s, _ in norm_rows if s in (LE, GE))
    nart = sum(1 for _, s, _ in norm_rows if s in (GE, EQ))
    total = ncols + nslack + nart
    tab = [[Fraction(0)] * (total + 1) for _ in range(m)]
    basis = [None] * m
    art_cols = []
    scol, acol = ncols, ncols + nslack
    for r, (row, sense, rhs) in enumerate(norm_rows):
        tab[r][:ncols] = row
        tab[r][total] = rhs
        if sense == LE:
            tab[r][scol] = Fraction(1)
            basis[r] = scol
            scol += 1
        elif sense == GE:
            tab[r][scol] = Fraction(-1)
            scol += 1
            tab[r][acol] = Fraction(1)
            basis[r] = acol
            art_cols.append(acol)
            acol += 1
        else:
            tab[r][acol] = Fraction(1)
            basis[r] = acol
            art_cols.append(acol)
            acol += 1
    art_set = set(art_cols)

    def pivot(r, c):
        piv = tab[r][c]
        tab[r] = [v / piv for v in tab[r]]
        for rr in range(m):
            if rr != r and tab[rr][c] != 0:
                f = tab[rr][c]
                tab[rr] = [a - f * b for a, b in zip(tab[rr], tab[r])]
        basis[r] = c

    def run_phase(cost):
        # cost over all columns; returns objective value at termination
        while True:
            # reduced costs via the basis rows
            red = list(cost)
            offset = Fraction(0)
            for r in range(m):
                cb = cost[basis[r]]
                if cb != 0:
                    offset += cb * tab[r][total]
                    for c in range(total):
                        red[c] -= cb * tab[r][c]
            enter = next((c for c in range(total) if red[c] < 0), None)
            if enter is None:
                return offset, True
            best_r, best_ratio = None, None
            for r in range(m):
                if tab[r][enter] > 0:
                    ratio = tab[r][total] / tab[r][enter]
                    if best_ratio is None or ratio < best_ratio or \
                            (ratio == best_ratio and basis[r] < basis[best_r]):
                        best_r, best_ratio = r, ratio
            if best_r is None:
                return None, False  # unbounded
            pivot(best_r, enter)

    if art_cols:
        phase1 = [Fraction(0)] * total
        for c in art_cols:
            phase1[c] = Fraction(1)
        val, ok = run_phase(phase1)
        if not ok:
            raise SolverInternalError("phase-1 simplex reported unbounded")
        if val != 0:
            return INFEASIBLE, None
        # drive leftover artificials out of the basis
        for r in range(m):
            if basis[r] in art_set:
                swap = next((c for c in range(ncols + nslack) if tab[r][c] != 0), None)
                if swap is not None:
                    pivot(r, swap)
        # freeze artificial columns at zero
        for r in range(m):
            for c in art_cols:
                tab[r][c] = Fraction(0)

    cost = [Fraction(0)] * total
    for v in range(num_vars):
        cost[col_of[v]] += objective[v]
        if neg_col_of[v] is not None:
            cost[neg_col_of[v]] -= objective[v]
    _, ok = run_phase(cost)
    if not ok:
        return UNBOUNDED, None

    vals = [Fraction(0)] * total
    for r in range(m):
        if basis[r] in art_set and tab[r][total] != 0:
            raise SolverInternalError("artificial variable stuck in the basis")
        vals[basis[r]] = tab[r][total]
    x = []
    for v in range(num_vars):
        val = vals[col_of[v]]
        if neg_col_of[v] is not None:
            val -= vals[neg_col_of[v]]
        x.append(val)
    return OPTIMAL, tuple(x)


def exact_feasible_point(rows, num_vars, nonneg=None):
    status, x = simplex_solve(rows, num_vars, objective=None, nonneg=nonneg)
    if status == INFEASIBLE:
        return None
    if status != OPTIMAL:
        raise SolverInternalError(f"feasibility solve ended {status}")
    return x


# ---------------------------------------------------------------------------
# constraint generation


@dataclass
class CutOutcome:
    verdict: str  # "empty" or "refuted"
    point: tuple = None
    history: list = None  # payloads of the generated cuts, in order


def cutting_plane(base_rows, num_vars, oracle, nonneg=None, limit=10000):
    """Generate violated constraints until the cut system is infeasible
    ("empty", with the history of cut-generating solutions) or the oracle
    certifies a candidate point ("refuted").

    oracle(point) returns ("member", None, None) or ("cut", key, (row, payload)).
    Keys identify cut-generating solutions; a repeat key is a contract
    violation because candidate points satisfy all collected cuts.
    """
    cuts, seen, history = [], set(), []
    for _ in range(limit):
        point = exact_feasible_point(base_rows + cuts, num_vars, nonneg=nonneg)
        if point is None:
            return CutOutcome(verdict="empty", history=history)
        verdict, key, cut = oracle(point)
        if verdict == "member":
            return CutOutcome(verdict="refuted", point=point)
        if key in seen:
            raise SolverInternalError("separation oracle repeated a cut")
        seen.add(key)
        row, payload = cut
        cuts.append(row)
        history.append(payload)
    raise ResourceCapError("cutting-plane iteration limit exceeded")
