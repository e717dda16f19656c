"""Feature maps from low-dimensional embeddings.

The hyperbolic map sends a point z in the Poincare ball to

    H_j(z) = P(z, w_j)^alpha * cos(lambda_j * log P(z, w_j) + b_j),

where P(z, w) = (1 - ||z||^2) / ||z - w||^2 is the Poisson kernel against a
boundary point w, alpha = (d0 - 1) / 2, and (w_j, lambda_j, b_j) are random
constants frozen after sampling. Each H_j is an eigenfunction of the
hyperbolic Laplace-Beltrami operator with eigenvalue
-((d0-1)^2 + 4 lambda_j^2) / 4; `laplace_beltrami_fd` checks that identity
numerically and doubles as the test oracle.

The Euclidean ablation map is the random Fourier counterpart
R_j(e) = cos(lambda_j * <w_j, e> + b_j) on unconstrained embeddings.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError

CLAMP_MIN = 1e-15


@dataclass(frozen=True)
class HylaConstants:
    """Random constants of the feature map, fixed for the life of a model."""

    omegas: np.ndarray    # (d1, d0) unit-norm boundary points
    lambdas: np.ndarray   # (d1,) frequencies
    biases: np.ndarray    # (d1,) phases in [0, 2pi)
    scale_s: float
    clamp_min: float = field(default=CLAMP_MIN)

    def __post_init__(self):
        for arr in (self.omegas, self.lambdas, self.biases):
            arr.flags.writeable = False

    @property
    def d0(self) -> int:
        return self.omegas.shape[1]

    @property
    def d1(self) -> int:
        return self.omegas.shape[0]

    @property
    def alpha(self) -> float:
        return (self.d0 - 1) / 2.0


def sample_constants(d0, d1, s, seed) -> HylaConstants:
    """Draw the fixed random constants.

    Boundary points are normalized standard Gaussians (uniform on the
    sphere), frequencies are s times standard normals, phases are uniform
    on [0, 2pi). The Philox stream is consumed in that order, row-major.
    """
    if d0 < 2:
        raise ConfigError(f"feature-map dimension d0 must be >= 2, got {d0}")
    if d1 < 1:
        raise ConfigError(f"need at least one output feature, got d1={d1}")
    if s < 0:
        raise ConfigError(f"frequency scale s must be >= 0, got {s}")
    rng = np.random.Generator(np.random.Philox(seed))
    omegas = rng.normal(size=(d1, d0))
    omegas /= np.linalg.norm(omegas, axis=1, keepdims=True)
    lambdas = s * rng.normal(size=d1)
    biases = rng.uniform(0.0, 2.0 * np.pi, size=d1)
    return HylaConstants(omegas=omegas, lambdas=lambdas, biases=biases,
                         scale_s=float(s))


def _check_shapes(Z, c: HylaConstants, grad=None, d1_name="d1"):
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] != c.d0:
        raise ConfigError(
            f"embedding shape {Z.shape} does not match constants d0={c.d0}")
    if grad is not None:
        grad = np.ascontiguousarray(grad, dtype=np.float64)
        if grad.shape != (Z.shape[0], c.d1):
            raise ConfigError(
                f"gradient shape {grad.shape} does not match "
                f"({Z.shape[0]}, {c.d1})")
    return Z, grad


def log_poisson_kernel(Z, omegas, clamp_min=CLAMP_MIN):
    """Entrywise log P(z_i, w_j), with ||z - w||^2 floored at clamp_min."""
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    return kernels.log_poisson(Z, omegas, clamp_min)


def hyla_forward(Z, c: HylaConstants):
    """Feature matrix H with H[i, j] = P^alpha cos(lambda_j log P + b_j)."""
    Z, _ = _check_shapes(Z, c)
    return kernels.hyla_forward(Z, c.omegas, c.lambdas, c.biases, c.alpha,
                                c.clamp_min)


def hyla_backward(Z, c: HylaConstants, dL_dH):
    """Euclidean gradient of a scalar loss with respect to Z.

    Chain rule through the full expression: with L = log P,
    dH/dL = exp(alpha L) (alpha cos(lambda L + b) - lambda sin(lambda L + b))
    and dL/dz = -2z/(1-||z||^2) - 2(z-w)/||z-w||^2. Entries where the
    squared distance hit the clamp floor propagate no gradient through the
    distance branch.
    """
    Z, dL_dH = _check_shapes(Z, c, dL_dH)
    return kernels.hyla_backward(Z, c.omegas, c.lambdas, c.biases, c.alpha,
                                 c.clamp_min, dL_dH)


def rff_forward(E, c: HylaConstants):
    """Euclidean ablation features R[i, j] = cos(lambda_j <w_j, e_i> + b_j)."""
    E, _ = _check_shapes(E, c)
    return kernels.rff_forward(E, c.omegas, c.lambdas, c.biases)


def rff_backward(E, c: HylaConstants, dL_dR):
    """Exact gradient of the ablation map with respect to E."""
    E, dL_dR = _check_shapes(E, c, dL_dR)
    return kernels.rff_backward(E, c.omegas, c.lambdas, c.biases, dL_dR)


def laplace_beltrami_fd(field, z, h):
    """Finite-difference Laplace-Beltrami operator on the ball.

    Evaluates
        (1/4)(1-||z||^2)^2 sum_i d^2 f / dz_i^2
      + ((n-2)/2)(1-||z||^2) sum_i z_i df/dz_i
    with central differences of step h. `field` maps a 1-D point to a
    scalar. Used as an independent oracle for the eigenfunction identity.
    """
    z = np.asarray(z, dtype=np.float64)
    if not 1e-5 <= h <= 1e-3:
        raise ConfigError(f"step h must be in [1e-5, 1e-3], got {h}")
    r = float(np.linalg.norm(z))
    if r > 0.7:
        raise ValueError(f"evaluation point too close to the boundary: ||z||={r:.3f}")
    if r + h >= 1.0:
        raise ValueError("finite-difference stencil leaves the ball")
    n = z.shape[0]
    f0 = float(field(z))
    r2 = float(np.dot(z, z))
    second = 0.0
    first = 0.0
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fp = float(field(z + e))
        fm = float(field(z - e))
        second += (fp - 2.0 * f0 + fm) / h**2
        first += z[i] * (fp - fm) / (2.0 * h)
    return 0.25 * (1.0 - r2) ** 2 * second + 0.5 * (n - 2) * (1.0 - r2) * first


def hyla_eigenvalue(d0, lam):
    """Laplace-Beltrami eigenvalue of one feature: -((d0-1)^2 + 4 lam^2)/4."""
    return -((d0 - 1) ** 2 + 4.0 * lam**2) / 4.0


def write_features_tsv(path, H):
    """Export a feature matrix as TSV: node id then the feature values.

    LF line endings, 17-significant-digit decimals (round-trip exact for
    float64).
    """
    H = np.asarray(H)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for i in range(H.shape[0]):
            f.write(str(i))
            for v in H[i]:
                f.write("\t%.17g" % v)
            f.write("\n")
