import os
import subprocess
import sys

import numpy as np
import pytest

from rdnsgeo import kernels

BACKENDS = ["python"]
try:
    kernels.load_backend("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def impl(request):
    return kernels.load_backend(request.param)


@pytest.fixture
def data():
    rng = np.random.default_rng(1)
    lats = np.ascontiguousarray(rng.uniform(-60, 60, 300))
    lons = np.ascontiguousarray(rng.uniform(-180, 180, 300))
    X = np.ascontiguousarray(rng.normal(size=(200, 7)))
    y = (rng.random(200) < 0.4).astype(np.float64)
    return lats, lons, X, y


def test_backends_agree(impl, data):
    ref = kernels.load_backend("python")
    lats, lons, X, y = data
    assert impl.haversine(0, 0, 0, 180) == pytest.approx(np.pi * 6371.0, rel=1e-12)
    assert np.allclose(impl.haversine_many(10, 20, lats, lons),
                       ref.haversine_many(10, 20, lats, lons), rtol=1e-12)
    assert impl.nearest_index(10, 20, lats, lons)[0] == ref.nearest_index(10, 20, lats, lons)[0]
    w = np.ascontiguousarray(np.linspace(-1, 1, 7))
    wts = np.ones(300)
    cands = np.arange(300, dtype=np.int64)
    assert impl.densest_center(lats, lons, wts, 2000.0, cands)[0] == \
        ref.densest_center(lats, lons, wts, 2000.0, cands)[0]
    l1, g1, b1 = impl.loss_and_grad(X, y, w, 0.1, 1e-3)
    l2, g2, b2 = ref.loss_and_grad(X, y, w, 0.1, 1e-3)
    assert l1 == pytest.approx(l2, rel=1e-12)
    assert np.allclose(g1, g2, rtol=1e-12, atol=1e-15) and b1 == pytest.approx(b2, rel=1e-12)
    wa, ba, la = impl.gradient_descent(X, y, np.zeros(7), 0.0, 0.5, 1e-3, 50)
    wb, bb, lb = ref.gradient_descent(X, y, np.zeros(7), 0.0, 0.5, 1e-3, 50)
    assert np.allclose(wa, wb, rtol=1e-10) and np.allclose(la, lb, rtol=1e-10)


def test_gradient_finite_differences(impl):
    rng = np.random.default_rng(0)
    X = np.ascontiguousarray(rng.normal(size=(5, 4)))
    y = np.array([1.0, 0.0, 0.0, 1.0, 1.0])
    w, b, h = rng.normal(size=4), -0.2, 1e-6
    _, g, gb = impl.loss_and_grad(X, y, w, b, 0.01)
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        num = (impl.loss_and_grad(X, y, w + e, b, 0.01)[0]
               - impl.loss_and_grad(X, y, w - e, b, 0.01)[0]) / (2 * h)
        assert g[j] == pytest.approx(num, rel=1e-6)
    num_b = (impl.loss_and_grad(X, y, w, b + h, 0.01)[0]
             - impl.loss_and_grad(X, y, w, b - h, 0.01)[0]) / (2 * h)
    assert gb == pytest.approx(num_b, rel=1e-6)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.load_backend("fortran")


def test_pure_python_env():
    env = dict(os.environ, RDNSGEO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from rdnsgeo import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == "python"
