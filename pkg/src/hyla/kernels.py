"""Hot numeric kernels with numba and numpy implementations.

Every kernel exists twice with identical semantics: a loop formulation that
numba JIT-compiles, and a vectorized numpy/scipy formulation used as
fallback. `_backend` picks the active set at import; both sets stay
importable so the parity tests and `benchmarks/bench_kernels.py` can compare
them directly.

Numerical conventions shared by both paths:
  - squared boundary distance uses the unit-norm identity
    ||z - w||^2 = ||z||^2 + 1 - 2<z, w>, treating boundary rows as exactly
    unit length (so the kernel is exactly 1 at the origin);
  - the squared distance is floored at `clamp_min` before the log, and the
    backward pass sends zero gradient through the floored branch;
  - all arithmetic in float64.
"""

import numpy as np

from ._backend import NUMBA_ENABLED, backend_name

__all__ = [
    "log_poisson",
    "hyla_forward",
    "hyla_backward",
    "rff_forward",
    "rff_backward",
    "csr_spmm",
    "backend_name",
    "warmup",
    "NUMPY_IMPLS",
    "NUMBA_IMPLS",
]


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _sq_boundary_dist_np(Z, omegas):
    zn2 = np.einsum("ij,ij->i", Z, Z)
    return zn2[:, None] + 1.0 - 2.0 * (Z @ omegas.T), zn2


def _log_poisson_np(Z, omegas, clamp_min):
    sq, zn2 = _sq_boundary_dist_np(Z, omegas)
    np.maximum(sq, clamp_min, out=sq)
    return np.log1p(-zn2)[:, None] - np.log(sq)


def _hyla_forward_np(Z, omegas, lambdas, biases, alpha, clamp_min):
    L = _log_poisson_np(Z, omegas, clamp_min)
    return np.exp(alpha * L) * np.cos(L * lambdas + biases)


def _hyla_backward_np(Z, omegas, lambdas, biases, alpha, clamp_min, dH):
    sq, zn2 = _sq_boundary_dist_np(Z, omegas)
    clamped = sq < clamp_min
    np.maximum(sq, clamp_min, out=sq)
    L = np.log1p(-zn2)[:, None] - np.log(sq)
    arg = L * lambdas + biases
    # dH/dL for H = exp(alpha L) cos(lambda L + b)
    G = dH * np.exp(alpha * L) * (alpha * np.cos(arg) - lambdas * np.sin(arg))
    C = np.where(clamped, 0.0, -2.0 * G / sq)
    # dL/dz = -2 z / (1 - ||z||^2) - 2 (z - w) / ||z - w||^2
    dZ = (-2.0 * G.sum(axis=1) / (1.0 - zn2))[:, None] * Z
    dZ += C.sum(axis=1)[:, None] * Z
    dZ -= C @ omegas
    return dZ


def _rff_forward_np(E, omegas, lambdas, biases):
    t = (E @ omegas.T) * lambdas + biases
    return np.cos(t)


def _rff_backward_np(E, omegas, lambdas, biases, dR):
    t = (E @ omegas.T) * lambdas + biases
    return -((dR * np.sin(t)) * lambdas) @ omegas


def _csr_spmm_np(row_offsets, col_indices, values, n_cols, X):
    from scipy.sparse import csr_matrix

    m = csr_matrix((values, col_indices, row_offsets),
                   shape=(row_offsets.shape[0] - 1, n_cols))
    return np.asarray(m @ X)


# ---------------------------------------------------------------------------
# loop implementations (njit targets)
# ---------------------------------------------------------------------------

def _log_poisson_loops(Z, omegas, clamp_min):
    n, d0 = Z.shape
    d1 = omegas.shape[0]
    out = np.empty((n, d1))
    for i in range(n):
        zn2 = 0.0
        for k in range(d0):
            zn2 += Z[i, k] * Z[i, k]
        log_num = np.log1p(-zn2)
        for j in range(d1):
            dot = 0.0
            for k in range(d0):
                dot += Z[i, k] * omegas[j, k]
            sq = zn2 + 1.0 - 2.0 * dot
            if sq < clamp_min:
                sq = clamp_min
            out[i, j] = log_num - np.log(sq)
    return out


def _hyla_forward_loops(Z, omegas, lambdas, biases, alpha, clamp_min):
    n, d0 = Z.shape
    d1 = omegas.shape[0]
    H = np.empty((n, d1))
    for i in range(n):
        zn2 = 0.0
        for k in range(d0):
            zn2 += Z[i, k] * Z[i, k]
        log_num = np.log1p(-zn2)
        for j in range(d1):
            dot = 0.0
            for k in range(d0):
                dot += Z[i, k] * omegas[j, k]
            sq = zn2 + 1.0 - 2.0 * dot
            if sq < clamp_min:
                sq = clamp_min
            L = log_num - np.log(sq)
            H[i, j] = np.exp(alpha * L) * np.cos(lambdas[j] * L + biases[j])
    return H


def _hyla_backward_loops(Z, omegas, lambdas, biases, alpha, clamp_min, dH):
    n, d0 = Z.shape
    d1 = omegas.shape[0]
    dZ = np.zeros((n, d0))
    for i in range(n):
        zn2 = 0.0
        for k in range(d0):
            zn2 += Z[i, k] * Z[i, k]
        log_num = np.log1p(-zn2)
        gsum = 0.0
        for j in range(d1):
            dot = 0.0
            for k in range(d0):
                dot += Z[i, k] * omegas[j, k]
            sq = zn2 + 1.0 - 2.0 * dot
            clamped = sq < clamp_min
            if clamped:
                sq = clamp_min
            L = log_num - np.log(sq)
            arg = lambdas[j] * L + biases[j]
            g = dH[i, j] * np.exp(alpha * L) * (
                alpha * np.cos(arg) - lambdas[j] * np.sin(arg))
            gsum += g
            if not clamped:
                c = -2.0 * g / sq
                for k in range(d0):
                    dZ[i, k] += c * (Z[i, k] - omegas[j, k])
        coef = -2.0 * gsum / (1.0 - zn2)
        for k in range(d0):
            dZ[i, k] += coef * Z[i, k]
    return dZ


def _rff_forward_loops(E, omegas, lambdas, biases):
    n, d0 = E.shape
    d1 = omegas.shape[0]
    R = np.empty((n, d1))
    for i in range(n):
        for j in range(d1):
            dot = 0.0
            for k in range(d0):
                dot += E[i, k] * omegas[j, k]
            R[i, j] = np.cos(lambdas[j] * dot + biases[j])
    return R


def _rff_backward_loops(E, omegas, lambdas, biases, dR):
    n, d0 = E.shape
    d1 = omegas.shape[0]
    dE = np.zeros((n, d0))
    for i in range(n):
        for j in range(d1):
            dot = 0.0
            for k in range(d0):
                dot += E[i, k] * omegas[j, k]
            c = -dR[i, j] * np.sin(lambdas[j] * dot + biases[j]) * lambdas[j]
            for k in range(d0):
                dE[i, k] += c * omegas[j, k]
    return dE


def _csr_spmm_loops(row_offsets, col_indices, values, n_cols, X):
    n = row_offsets.shape[0] - 1
    c = X.shape[1]
    out = np.zeros((n, c))
    for i in range(n):
        for p in range(row_offsets[i], row_offsets[i + 1]):
            j = col_indices[p]
            v = values[p]
            for k in range(c):
                out[i, k] += v * X[j, k]
    return out


NUMPY_IMPLS = {
    "log_poisson": _log_poisson_np,
    "hyla_forward": _hyla_forward_np,
    "hyla_backward": _hyla_backward_np,
    "rff_forward": _rff_forward_np,
    "rff_backward": _rff_backward_np,
    "csr_spmm": _csr_spmm_np,
}

if NUMBA_ENABLED:
    from numba import njit

    NUMBA_IMPLS = {
        "log_poisson": njit(cache=True)(_log_poisson_loops),
        "hyla_forward": njit(cache=True)(_hyla_forward_loops),
        "hyla_backward": njit(cache=True)(_hyla_backward_loops),
        "rff_forward": njit(cache=True)(_rff_forward_loops),
        "rff_backward": njit(cache=True)(_rff_backward_loops),
        "csr_spmm": njit(cache=True)(_csr_spmm_loops),
    }
    _ACTIVE = NUMBA_IMPLS
else:
    NUMBA_IMPLS = None
    _ACTIVE = NUMPY_IMPLS

log_poisson = _ACTIVE["log_poisson"]
hyla_forward = _ACTIVE["hyla_forward"]
hyla_backward = _ACTIVE["hyla_backward"]
rff_forward = _ACTIVE["rff_forward"]
rff_backward = _ACTIVE["rff_backward"]
csr_spmm = _ACTIVE["csr_spmm"]


def warmup():
    """Trigger JIT compilation of all active kernels on tiny inputs.

    No-op cost on the numpy backend; on numba the compiled code is disk
    cached, so this pays once per environment.
    """
    Z = np.zeros((2, 2))
    om = np.array([[1.0, 0.0], [0.0, 1.0]])
    lam = np.array([0.5, -0.5])
    b = np.array([0.1, 0.2])
    dH = np.ones((2, 2))
    log_poisson(Z, om, 1e-15)
    hyla_forward(Z, om, lam, b, 0.5, 1e-15)
    hyla_backward(Z, om, lam, b, 0.5, 1e-15, dH)
    rff_forward(Z, om, lam, b)
    rff_backward(Z, om, lam, b, dH)
    csr_spmm(np.array([0, 1, 2], dtype=np.int64),
             np.array([0, 1], dtype=np.int64),
             np.array([1.0, 1.0]), 2, np.eye(2))
