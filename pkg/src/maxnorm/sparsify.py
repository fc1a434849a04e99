"""Guessing grids and weight-vector sparsification for ordered norms.

Ordered norms have one threshold per coordinate, which is too many to guess.
Sparsification keeps only the coordinates POS = {min(2^t, n)}, replaces the
weight vector in between by its value at the next kept coordinate, and pays
at most a factor 2:  sparse(v) <= full(v) <= 2 * sparse(v).  Threshold guesses
then range over a dyadic support {R/2^s >= R/n} + {R/n}, which keeps the
number of non-increasing guess sequences polynomial.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class PosSet:
    """Kept coordinates {min(2^t, n) : t >= 0}, deduplicated ascending."""

    n: int
    indices: tuple

    def next_index(self, t):
        """Smallest kept index strictly greater than t (n maps to n + 1)."""
        for v in self.indices:
            if v > t:
                return v
        return self.n + 1

    def prev_index(self, t):
        """Largest kept index strictly smaller than t (1 maps to 0)."""
        prev = 0
        for v in self.indices:
            if v < t:
                prev = v
            else:
                break
        return prev


def pos_set(n):
    if n < 1:
        raise InvalidInputError("dimension must be >= 1")
    out = []
    t = 1
    while t < n:
        out.append(t)
        t *= 2
    out.append(n)
    return PosSet(n=n, indices=tuple(out))


def sparsify_weights(weights, n):
    """Zero-extend each weight vector to length n and flatten it between kept
    coordinates: entry t keeps w_t if t is kept, else takes w_{next(t)}."""
    pos = pos_set(n)
    out = []
    for w in weights:
        w = [float(x) for x in w]
        if any(x < 0 for x in w):
            raise InvalidInputError("weight vector has a negative entry")
        if any(w[t + 1] > w[t] for t in range(len(w) - 1)):
            raise InvalidInputError("weight vector is not non-increasing")
        ext = w[:n] + [0.0] * max(0, n - len(w))

        def entry(t):  # 1-indexed, ext[n] == 0 beyond the end
            return ext[t - 1] if t <= n else 0.0

        sparse = [entry(t) if t in pos.indices else entry(pos.next_index(t))
                  for t in range(1, n + 1)]
        out.append(np.array(sparse))
    return out, pos


def geometric_grid(lo, hi, eps):
    """Powers-of-(1+eps) grid anchored at lo, covering [lo, hi*(1+eps)).

    Whenever x in [lo, hi], some grid point b satisfies x <= b < (1+eps)*x.
    """
    if lo <= 0:
        raise InvalidInputError("grid anchor must be positive")
    if hi < lo:
        raise InvalidInputError("grid must have hi >= lo")
    if eps <= 0:
        raise InvalidInputError("grid resolution must be positive")
    out = []
    t = 0
    while True:
        b = lo * (1.0 + eps) ** t
        if b >= hi * (1.0 + eps):
            break
        out.append(b)
        t += 1
    return out


def snap_to_grid(grid, value, rel_tol=1e-9):
    """Smallest grid point >= value (with a small relative slack); None if
    the grid tops out below value."""
    slack = rel_tol * max(1.0, abs(value))
    for b in grid:
        if b >= value - slack:
            return b
    return None


def single_threshold_candidates(values):
    """Sorted distinct finite data values plus 0: every exact threshold guess."""
    out = {0.0}
    for v in values:
        if np.isfinite(v):
            out.add(float(v))
    return sorted(out)


def instance_threshold_candidates(inst):
    """Threshold guesses straight from an instance: its processing times or
    client-facility distances."""
    from .instances import LoadInstance

    if isinstance(inst, LoadInstance):
        return single_threshold_candidates(inst.finite_sizes())
    return single_threshold_candidates(inst.finite_distances())


@dataclass(frozen=True)
class ThresholdSequence:
    """Non-increasing threshold guesses on the kept coordinates; the first
    kept coordinate is pinned to the anchor scale R."""

    anchor: float
    positions: tuple
    values: tuple

    def value_at(self, ell):
        return self.values[self.positions.index(ell)]

    def as_dict(self):
        return dict(zip(self.positions, self.values))


def threshold_support(anchor, n):
    """Dyadic support {R/2^s : R/2^s >= R/n} + {R/n}, descending."""
    if anchor <= 0:
        raise InvalidInputError("anchor must be positive")
    out = []
    s = 0
    while 2 ** s <= n:
        out.append(anchor / 2 ** s)
        s += 1
    floor_val = anchor / n
    if out[-1] != floor_val:
        out.append(floor_val)
    return tuple(out)


def enumerate_threshold_sequences(anchor, n):
    """All non-increasing maps POS -> support with the first value = anchor.

    Lazy: there are choose(|support| + |POS| - 2, |POS| - 1) sequences, which
    is polynomial in n, but products with outer guessing loops stay iterables.
    """
    pos = pos_set(n)
    support = threshold_support(anchor, n)
    tail = len(pos.indices) - 1
    for combo in itertools.combinations_with_replacement(range(len(support)), tail):
        values = (anchor,) + tuple(support[idx] for idx in combo)
        yield ThresholdSequence(anchor=float(anchor), positions=pos.indices, values=values)


def covering_threshold_sequence(anchor, n, true_thresholds):
    """The canonical guess that covers given true thresholds: the dyadic point
    in [T, 2T) where T >= R/n, and the floor R/n below that.

    true_thresholds maps each kept coordinate to the exact optimal value.
    """
    pos = pos_set(n)
    support = threshold_support(anchor, n)
    floor_val = support[-1]
    values = []
    for ell in pos.indices:
        t = float(true_thresholds[ell])
        if t < floor_val:
            values.append(floor_val)
            continue
        pick = None
        for b in support:
            if t <= b < 2 * t or abs(b - t) <= 1e-12 * max(1.0, t):
                pick = b
                break
        if pick is None:
            raise InvalidInputError("true threshold outside the anchor scale")
        values.append(pick)
    # guessed values inherit monotonicity from the true thresholds
    values = [min(values[: idx + 1]) for idx in range(len(values))]
    return ThresholdSequence(anchor=float(anchor), positions=pos.indices, values=tuple(values))


def sparsified_gap_bound(sparse_weights, pos, seq):
    """max over weight vectors of sum over kept ell of
    (w_ell - w_next(ell)) * ell * T_ell: the guessing cost certificate."""
    best = 0.0
    tvals = seq.as_dict()
    for w in sparse_weights:
        total = 0.0
        for ell in pos.indices:
            nxt = pos.next_index(ell)
            w_ell = w[ell - 1]
            w_next = w[nxt - 1] if nxt <= pos.n else 0.0
            total += (w_ell - w_next) * ell * tvals[ell]
        best = max(best, total)
    return best
