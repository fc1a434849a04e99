"""Shared random-instance helpers for the test suite."""

import numpy as np

from maxnorm.instances import ClusterInstance, LoadInstance


def random_load(rng, m_hi=3, j_hi=6, pmax=10, forbidden=0.0):
    m = int(rng.integers(2, m_hi + 1))
    n = int(rng.integers(2, j_hi + 1))
    p = rng.integers(1, pmax + 1, size=(m, n)).astype(float)
    if forbidden > 0:
        mask = rng.random(size=p.shape) < forbidden
        for j in range(n):
            if mask[:, j].all():
                mask[int(rng.integers(0, m)), j] = False
        p[mask] = np.inf
    return LoadInstance(p=p)


def random_cluster(rng, nc_hi=4, nf_hi=5, k_hi=3, coverage=True):
    nc = int(rng.integers(1, nc_hi + 1))
    nf = int(rng.integers(2, nf_hi + 1))
    pts = rng.uniform(0.0, 1.0, size=(nc + nf, 2))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(d, 0.0)
    k = int(rng.integers(1, min(nf, k_hi) + 1))
    r = rng.integers(1, min(nf, 3) + 1, size=nc)
    l = np.minimum(np.minimum(rng.integers(0, 2, size=nc), r), k)
    cap = int(np.minimum(r, k).sum())
    m = int(rng.integers(0, cap + 1)) if coverage else 0
    return ClusterInstance(n_clients=nc, n_facilities=nf, d=d, k=k, m=m, l=l, r=r)


def random_weight_vector(rng, n):
    return tuple(sorted((float(v) for v in rng.uniform(0.0, 1.0, size=n)), reverse=True))


def random_max_ordered_weights(rng, dim_hi=6, n_vectors_hi=3):
    count = int(rng.integers(1, n_vectors_hi + 1))
    return [random_weight_vector(rng, int(rng.integers(1, dim_hi + 1)))
            for _ in range(count)]
