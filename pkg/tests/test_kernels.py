"""Backend parity: the numba loop kernels and the numpy/scipy fallbacks
must agree to float64 round-off on the same inputs."""

import numpy as np
import pytest

from hyla import kernels
from hyla._backend import backend_name

needs_numba = pytest.mark.skipif(kernels.NUMBA_IMPLS is None,
                                 reason="numba backend not available")


def _random_inputs(seed, n=7, d0=4, d1=9):
    rng = np.random.Generator(np.random.Philox(seed))
    Z = rng.uniform(-0.4, 0.4, size=(n, d0))
    omegas = rng.normal(size=(d1, d0))
    omegas /= np.linalg.norm(omegas, axis=1, keepdims=True)
    lambdas = 0.8 * rng.normal(size=d1)
    biases = rng.uniform(0, 2 * np.pi, size=d1)
    dH = rng.normal(size=(n, d1))
    return Z, omegas, lambdas, biases, dH


def test_backend_name_is_known():
    assert backend_name() in ("numba", "numpy")


def test_warmup_runs():
    kernels.warmup()


@needs_numba
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_log_poisson_parity(seed):
    Z, omegas, _, _, _ = _random_inputs(seed)
    a = kernels.NUMPY_IMPLS["log_poisson"](Z, omegas, 1e-15)
    b = kernels.NUMBA_IMPLS["log_poisson"](Z, omegas, 1e-15)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_hyla_forward_parity(seed):
    Z, omegas, lambdas, biases, _ = _random_inputs(seed)
    alpha = (Z.shape[1] - 1) / 2.0
    a = kernels.NUMPY_IMPLS["hyla_forward"](Z, omegas, lambdas, biases,
                                            alpha, 1e-15)
    b = kernels.NUMBA_IMPLS["hyla_forward"](Z, omegas, lambdas, biases,
                                            alpha, 1e-15)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


@needs_numba
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_hyla_backward_parity(seed):
    Z, omegas, lambdas, biases, dH = _random_inputs(seed)
    alpha = (Z.shape[1] - 1) / 2.0
    a = kernels.NUMPY_IMPLS["hyla_backward"](Z, omegas, lambdas, biases,
                                             alpha, 1e-15, dH)
    b = kernels.NUMBA_IMPLS["hyla_backward"](Z, omegas, lambdas, biases,
                                             alpha, 1e-15, dH)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


@needs_numba
def test_clamped_entry_parity():
    # a point essentially on top of a boundary point exercises the clamp
    # floor in both implementations
    omegas = np.array([[1.0, 0.0]])
    Z = np.array([[1.0 - 1e-12, 0.0]])
    lambdas = np.array([1.5])
    biases = np.array([0.2])
    dH = np.ones((1, 1))
    for name, args in [
        ("log_poisson", (Z, omegas, 1e-15)),
        ("hyla_forward", (Z, omegas, lambdas, biases, 0.5, 1e-15)),
        ("hyla_backward", (Z, omegas, lambdas, biases, 0.5, 1e-15, dH)),
    ]:
        a = kernels.NUMPY_IMPLS[name](*args)
        b = kernels.NUMBA_IMPLS[name](*args)
        assert np.all(np.isfinite(a))
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12), name


@needs_numba
@pytest.mark.parametrize("seed", [0, 1])
def test_rff_parity(seed):
    Z, omegas, lambdas, biases, dH = _random_inputs(seed)
    a = kernels.NUMPY_IMPLS["rff_forward"](Z, omegas, lambdas, biases)
    b = kernels.NUMBA_IMPLS["rff_forward"](Z, omegas, lambdas, biases)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    da = kernels.NUMPY_IMPLS["rff_backward"](Z, omegas, lambdas, biases, dH)
    db = kernels.NUMBA_IMPLS["rff_backward"](Z, omegas, lambdas, biases, dH)
    assert np.allclose(da, db, rtol=1e-10, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_csr_spmm_parity(seed):
    rng = np.random.Generator(np.random.Philox(seed + 100))
    n, m, c = 8, 6, 5
    dense = rng.normal(size=(n, m)) * (rng.random((n, m)) < 0.4)
    X = rng.normal(size=(m, c))
    # build CSR arrays directly
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    cols, vals = [], []
    for i in range(n):
        nz = np.nonzero(dense[i])[0]
        cols.extend(nz.tolist())
        vals.extend(dense[i, nz].tolist())
        row_offsets[i + 1] = len(cols)
    cols = np.array(cols, dtype=np.int64)
    vals = np.array(vals, dtype=np.float64)
    a = kernels.NUMPY_IMPLS["csr_spmm"](row_offsets, cols, vals, m, X)
    b = kernels.NUMBA_IMPLS["csr_spmm"](row_offsets, cols, vals, m, X)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    assert np.allclose(a, dense @ X, rtol=1e-12, atol=1e-14)
