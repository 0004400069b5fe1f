"""Brute-force reference implementations shared by unit and acceptance tests."""

import math

import numpy as np

from rdnsgeo.classifier import PairSet, sample
from rdnsgeo.features import N_FEATURES


def brute_haversine(a, b):
    la1, lo1, la2, lo2 = map(math.radians, (*a, *b))
    h = (math.sin((la2 - la1) / 2) ** 2
         + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2)
    return 2 * 6371.0 * math.asin(min(1.0, math.sqrt(h)))


def brute_cdf(errors, thresholds, total):
    return [(t, sum(1 for e in errors if e < t) / total) for t in thresholds]


def brute_labels(records, index, radius_km=20.0):
    """``[(location_id, label)]`` per candidate, candidates in location-id order."""
    out = []
    for sp, truth in records:
        cands = sorted(index.lookup(sp.match_terms), key=lambda c: c.location.id)
        best, best_d = None, math.inf
        for i, c in enumerate(cands):
            d = brute_haversine(truth, (c.location.latitude, c.location.longitude))
            if d <= radius_km and d < best_d:
                best, best_d = i, d
        out.extend((c.location.id, i == best) for i, c in enumerate(cands))
    return out


def synthetic_pairs(n, pos, cats, domains=None):
    """Pair set with ``pos`` leading positives; ``cats`` is an (n, 11) boolean array."""
    X = np.zeros((n, N_FEATURES))
    X[:, 0:33:3] = cats
    y = np.zeros(n, dtype=bool)
    y[:pos] = True
    dom = np.zeros(n, dtype=np.int64) if domains is None else np.asarray(domains)
    return PairSet(X, y, np.arange(n), np.arange(n), dom, [],
                   [f"d{i}" for i in range(dom.max() + 1)])


def random_pairs(seed, n=3000):
    """Skewed categories, uneven domains and a random positive rate."""
    rng = np.random.default_rng(seed)
    k = rng.integers(1, 6)
    weights = rng.dirichlet(np.ones(11) * 0.3)
    cats = np.zeros((n, 11), dtype=bool)
    for i in range(n):
        cats[i, rng.choice(11, size=rng.integers(1, k + 1), replace=False, p=weights)] = True
    domains = rng.choice(12, size=n, p=rng.dirichlet(np.ones(12) * 0.5))
    y = rng.random(n) < rng.uniform(0.02, 0.4)
    order = np.argsort(~y, kind="stable")
    return synthetic_pairs(n, int(y.sum()), cats[order], domains[order])


def sampling_violations(pairs, params):
    """Count of X, Y, Z and determinism violations in ``sample(pairs, params)``."""
    out = sample(pairs, params)
    violations = 0
    _, per_domain = np.unique(out.domain, return_counts=True)
    violations += int(np.sum(per_domain > params.x))
    pos = int(out.y.sum())
    if len(out) - pos > math.floor(params.z * pos):
        violations += 1
    cats = out.categories()
    counts = cats.sum(axis=0)
    present = counts[counts > 0]
    if len(present) and present.max() > params.y * present.min():
        # allowed only once no pair made solely of over-represented categories is left
        over = counts > params.y * present.min()
        droppable = cats.any(axis=1) & ~np.any(cats & ~over, axis=1)
        if droppable.any():
            violations += 1
    if not np.array_equal(sample(pairs, params).location_ids, out.location_ids):
        violations += 1
    return violations
