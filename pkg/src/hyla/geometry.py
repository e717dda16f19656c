"""Poincare ball primitives.

Points live strictly inside the open unit ball; every mutating step ends
with a projection that keeps row norms at or below ``1 - ball_eps``. The
embedding update is Riemannian SGD with the scaled-gradient retraction:
the Euclidean gradient is rescaled by the inverse metric factor
(1 - ||z||^2)^2 / 4 and the step is pulled back into the ball.

All functions accept either a single point (1-D array) or a matrix of row
points and return arrays of the same shape.
"""

import numpy as np

from .errors import ConfigError, NumericError

BALL_EPS = 1e-5
INIT_RANGE = 1e-5


def _sqnorms(z):
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 1:
        return z, np.dot(z, z)
    return z, np.einsum("ij,ij->i", z, z)


def poincare_distance(x, y):
    """Hyperbolic distance arcosh(1 + 2||x-y||^2 / ((1-||x||^2)(1-||y||^2)))."""
    x, xn2 = _sqnorms(x)
    y, yn2 = _sqnorms(y)
    if np.any(xn2 >= 1.0) or np.any(yn2 >= 1.0):
        raise ValueError("poincare_distance: input norm must be < 1")
    diff2 = np.sum((x - y) ** 2, axis=-1)
    return np.arccosh(1.0 + 2.0 * diff2 / ((1.0 - xn2) * (1.0 - yn2)))


def project_to_ball(z, ball_eps=BALL_EPS):
    """Rescale any row with norm > 1 - ball_eps back onto that radius."""
    z, zn2 = _sqnorms(z)
    if np.any(np.isnan(z)):
        raise NumericError("project_to_ball: NaN coordinates")
    max_norm = 1.0 - ball_eps
    if z.ndim == 1:
        n = np.sqrt(zn2)
        if n <= max_norm:
            return z
        return z * (max_norm / n)
    norms = np.sqrt(zn2)
    over = norms > max_norm
    if not np.any(over):
        return z
    out = z.copy()
    out[over] *= (max_norm / norms[over])[:, None]
    return out


def riemannian_rescale(z, g_euclid):
    """Inverse-metric rescale of a Euclidean gradient: ((1-||z||^2)^2/4) g."""
    z, zn2 = _sqnorms(z)
    g = np.asarray(g_euclid, dtype=np.float64)
    factor = (1.0 - zn2) ** 2 / 4.0
    if z.ndim == 1:
        return factor * g
    return factor[:, None] * g


def rsgd_step(z, g_euclid, lr1, ball_eps=BALL_EPS):
    """One RSGD step: z <- project(z - lr1 * rescale(z, g)).

    Raises NumericError naming the first offending row if the gradient
    contains NaNs.
    """
    g = np.asarray(g_euclid, dtype=np.float64)
    if np.any(np.isnan(g)):
        if g.ndim == 1:
            raise NumericError("rsgd_step: NaN gradient")
        row = int(np.nonzero(np.isnan(g).any(axis=1))[0][0])
        raise NumericError(f"rsgd_step: NaN gradient at embedding row {row}")
    return project_to_ball(z - lr1 * riemannian_rescale(z, g), ball_eps)


def init_embeddings(n_emb, d0, seed, init_range=INIT_RANGE):
    """Seeded uniform init in [-init_range, init_range] per coordinate.

    Uses a counter-based Philox stream filled in row-major order, so the
    result is reproducible across runs and platforms.
    """
    if d0 < 2:
        raise ConfigError(f"embedding dimension must be >= 2, got {d0}")
    if n_emb <= 0:
        raise ConfigError(f"need at least one embedding row, got {n_emb}")
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.uniform(-init_range, init_range, size=(n_emb, d0))
