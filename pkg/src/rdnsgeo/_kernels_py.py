"""NumPy fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures and return types. Reductions that feed training use
``cumsum`` so they accumulate strictly in index order, like the C loops.
"""

import math

import numpy as np

BACKEND = "python"

EARTH_RADIUS_KM = 6371.0
_DEG = math.pi / 180.0


def haversine(lat1, lon1, lat2, lon2):
    p1 = lat1 * _DEG
    p2 = lat2 * _DEG
    sdp = math.sin((p2 - p1) * 0.5)
    sdl = math.sin((lon2 - lon1) * _DEG * 0.5)
    h = sdp * sdp + math.cos(p1) * math.cos(p2) * sdl * sdl
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(h, 1.0)))


def haversine_many(lat, lon, lats, lons):
    lats = np.asarray(lats, dtype=np.float64)
    lons = np.asarray(lons, dtype=np.float64)
    p1 = lat * _DEG
    p2 = lats * _DEG
    sdp = np.sin((p2 - p1) * 0.5)
    sdl = np.sin((lons - lon) * _DEG * 0.5)
    h = sdp * sdp + math.cos(p1) * np.cos(p2) * sdl * sdl
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.minimum(h, 1.0)))


def nearest_index(lat, lon, lats, lons):
    if len(lats) == 0:
        return -1, math.inf
    d = haversine_many(lat, lon, lats, lons)
    i = int(np.argmin(d))
    return i, float(d[i])


def densest_center(lats, lons, weights, radius_km, candidates):
    lats = np.asarray(lats, dtype=np.float64)
    lons = np.asarray(lons, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    best, best_cov, best_sum = -1, -1.0, math.inf
    for c in candidates:
        c = int(c)
        d = haversine_many(lats[c], lons[c], lats, lons)
        s = float(np.cumsum(weights * d)[-1]) if len(d) else 0.0
        cov = float(np.cumsum(np.where(d <= radius_km, weights, 0.0))[-1]) if len(d) else 0.0
        if cov > best_cov or (cov == best_cov and s < best_sum):
            best, best_cov, best_sum = c, cov, s
    return best, best_cov, best_sum


def _sigmoid(z):
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _softplus(z):
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _ordered_rowsum(a):
    if a.shape[1] == 0:
        return np.zeros(a.shape[0])
    return np.cumsum(a, axis=1)[:, -1]


def _ordered_colsum(a):
    if a.shape[0] == 0:
        return np.zeros(a.shape[1])
    return np.cumsum(a, axis=0)[-1]


def loss_and_grad(X, y, w, b, l2):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n = X.shape[0]
    z = _ordered_rowsum(X * w) + b
    loss = float(np.cumsum(_softplus(z) - y * z)[-1]) / n
    r = _sigmoid(z) - y
    grad = _ordered_colsum(X * r[:, None]) / n + l2 * w
    gb = float(np.cumsum(r)[-1]) / n
    reg = float(np.cumsum(w * w)[-1]) if len(w) else 0.0
    return loss + 0.5 * l2 * reg, grad, gb


def gradient_descent(X, y, w0, b0, lr, l2, epochs):
    w = np.array(w0, dtype=np.float64, copy=True)
    b = float(b0)
    losses = np.empty(epochs + 1, dtype=np.float64)
    for e in range(epochs):
        losses[e], g, gb = loss_and_grad(X, y, w, b, l2)
        w -= lr * g
        b -= lr * gb
    losses[epochs] = loss_and_grad(X, y, w, b, l2)[0]
    return w, b, losses
