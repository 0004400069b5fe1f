# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: great-circle distances, cluster centers, logistic GD.

Mirrors ``_kernels_py`` function for function. Sums run in index order
(samples, then features) so results are reproducible run to run.
"""

import numpy as np

from libc.math cimport asin, cos, exp, fabs, log1p, sin, sqrt, INFINITY

cdef double EARTH_RADIUS_KM = 6371.0
cdef double DEG = 0.017453292519943295

BACKEND = "cython"


cdef inline double _hav(double lat1, double lon1, double lat2, double lon2) noexcept nogil:
    cdef double p1 = lat1 * DEG
    cdef double p2 = lat2 * DEG
    cdef double sdp = sin((p2 - p1) * 0.5)
    cdef double sdl = sin((lon2 - lon1) * DEG * 0.5)
    cdef double h = sdp * sdp + cos(p1) * cos(p2) * sdl * sdl
    if h > 1.0:
        h = 1.0
    return 2.0 * EARTH_RADIUS_KM * asin(sqrt(h))


cdef inline double _sigmoid(double z) noexcept nogil:
    cdef double e
    if z >= 0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef inline double _softplus(double z) noexcept nogil:
    # log(1 + e^z) without overflow
    if z > 0:
        return z + log1p(exp(-z))
    return log1p(exp(z))


def haversine(double lat1, double lon1, double lat2, double lon2):
    return _hav(lat1, lon1, lat2, lon2)


def haversine_many(double lat, double lon, const double[::1] lats, const double[::1] lons):
    cdef Py_ssize_t n = lats.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _hav(lat, lon, lats[i], lons[i])
    return out


def nearest_index(double lat, double lon, const double[::1] lats, const double[::1] lons):
    cdef Py_ssize_t n = lats.shape[0], i, best = -1
    cdef double d, best_d = INFINITY
    with nogil:
        for i in range(n):
            d = _hav(lat, lon, lats[i], lons[i])
            if d < best_d:
                best_d = d
                best = i
    return best, best_d


def densest_center(const double[::1] lats, const double[::1] lons, const double[::1] weights,
                   double radius_km, const long[::1] candidates):
    """Among ``candidates`` (indices into the points), the one covering the most
    weight within ``radius_km``; ties go to the smaller weighted distance sum,
    then the earlier candidate."""
    cdef Py_ssize_t n = lats.shape[0], m = candidates.shape[0], a, c, j
    cdef Py_ssize_t best = -1
    cdef double best_cov = -1.0, best_sum = INFINITY, cov, s, d
    with nogil:
        for a in range(m):
            c = candidates[a]
            cov = 0.0
            s = 0.0
            for j in range(n):
                d = _hav(lats[c], lons[c], lats[j], lons[j])
                s += weights[j] * d
                if d <= radius_km:
                    cov += weights[j]
            if cov > best_cov or (cov == best_cov and s < best_sum):
                best_cov = cov
                best_sum = s
                best = c
    return best, best_cov, best_sum


cdef double _loss_grad(const double[:, ::1] X, const double[::1] y, const double[::1] w,
                       double b, double l2, double[::1] gw, double* gb) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    cdef double z, r, loss = 0.0, sb = 0.0, reg = 0.0
    for j in range(d):
        gw[j] = 0.0
    for i in range(n):
        z = 0.0
        for j in range(d):
            z += X[i, j] * w[j]
        z += b
        loss += _softplus(z) - y[i] * z
        r = _sigmoid(z) - y[i]
        for j in range(d):
            gw[j] += r * X[i, j]
        sb += r
    for j in range(d):
        gw[j] = gw[j] / n + l2 * w[j]
        reg += w[j] * w[j]
    gb[0] = sb / n
    return loss / n + 0.5 * l2 * reg


def loss_and_grad(const double[:, ::1] X, const double[::1] y, const double[::1] w, double b,
                  double l2):
    """Mean logistic loss plus ``l2/2 * |w|^2`` and its gradient."""
    grad = np.empty(X.shape[1], dtype=np.float64)
    cdef double gb = 0.0, loss
    cdef double[::1] g = grad
    with nogil:
        loss = _loss_grad(X, y, w, b, l2, g, &gb)
    return loss, grad, gb


def gradient_descent(const double[:, ::1] X, const double[::1] y, w0, double b0,
                     double lr, double l2, int epochs):
    """Full-batch gradient descent; returns (w, b, loss before each step + final)."""
    cdef Py_ssize_t d = X.shape[1], j
    cdef int e
    w_arr = np.array(w0, dtype=np.float64, copy=True)
    g_arr = np.empty(d, dtype=np.float64)
    losses_arr = np.empty(epochs + 1, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef double[::1] g = g_arr
    cdef double[::1] losses = losses_arr
    cdef double b = b0, gb = 0.0
    with nogil:
        for e in range(epochs):
            losses[e] = _loss_grad(X, y, w, b, l2, g, &gb)
            for j in range(d):
                w[j] -= lr * g[j]
            b -= lr * gb
        losses[epochs] = _loss_grad(X, y, w, b, l2, g, &gb)
    return w_arr, b, losses_arr
