"""Model composition: feature construction, forward, loss, backward.

Four cases from (level, head):

    node    + sgc   logits = S^K H(Z) W          transductive only
    node    + lr    logits = H(Z) W              transductive only
    feature + sgc   logits = (S^K X) H(Z) W      S^K X precomputed once
    feature + lr    logits = (X H(Z)) W          no adjacency at inference

`feature_map` swaps H between the hyperbolic map (hyla) and the Euclidean
cosine baseline (rff); shapes and plumbing are identical. All arrays are
float64; gradients returned to the caller are Euclidean (the optimizer
applies any metric rescaling).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import features as F
from .data import Dataset
from .errors import ConfigError, DataError
from .features import HylaConstants, sample_constants
from .geometry import init_embeddings
from .sparse import SparseMatrix, normalize_adjacency, propagate_k, spmm, transpose

LEVELS = ("node", "feature")
HEADS = ("sgc", "lr")
FEATURE_MAPS = ("hyla", "rff")


@dataclass(frozen=True)
class ModelConfig:
    d0: int = 16
    d1: int = 100
    K: int = 2
    s: float = 1.0
    level: str = "node"
    head: str = "sgc"
    feature_map: str = "hyla"
    concat_original: bool = False

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ConfigError(f"level must be one of {LEVELS}, "
                              f"got {self.level!r}")
        if self.head not in HEADS:
            raise ConfigError(f"head must be one of {HEADS}, "
                              f"got {self.head!r}")
        if self.feature_map not in FEATURE_MAPS:
            raise ConfigError(f"feature_map must be one of {FEATURE_MAPS}, "
                              f"got {self.feature_map!r}")
        if self.K < 0:
            raise ConfigError(f"K must be >= 0, got {self.K}")
        if self.concat_original and self.level != "node":
            raise ConfigError(
                "concat_original is only supported at the node level")


@dataclass
class ModelState:
    W: np.ndarray                     # (d_in, C)
    Z: np.ndarray                     # (n_emb, d0), ball rows (hyla) or free (rff)
    constants: HylaConstants
    precomputed: Optional[np.ndarray] = None   # S^K X, feature+sgc only
    # non-parameter scratch reused across epochs
    cache: dict = field(default_factory=dict, repr=False)


def check_config(cfg: ModelConfig, ds: Dataset) -> None:
    if cfg.level == "node" and ds.task != "transductive":
        raise ConfigError("node-level embeddings require a transductive "
                          "dataset (one embedding per graph node)")
    if cfg.level == "feature" and ds.n_features == 0:
        raise ConfigError("feature-level embeddings require node features")
    if cfg.head == "sgc" and ds.graph is None:
        raise ConfigError("sgc head requires a graph")


def input_dim(cfg: ModelConfig, ds: Dataset) -> int:
    d_in = cfg.d1
    if cfg.concat_original:
        d_in += ds.n_features
    return d_in


def init_weight(d_in: int, n_classes: int, seed: int) -> np.ndarray:
    """Uniform symmetric fan-based init, seeded."""
    if d_in < 1 or n_classes < 1:
        raise ConfigError("weight dimensions must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    a = np.sqrt(6.0 / (d_in + n_classes))
    return rng.uniform(-a, a, size=(d_in, n_classes))


def precompute_propagated(ds: Dataset, cfg: ModelConfig,
                          graph: Optional[SparseMatrix] = None) -> np.ndarray:
    """Densified S^K X for the feature-level sgc path."""
    g = graph if graph is not None else ds.graph
    if g is None or ds.features is None:
        raise ConfigError("feature-level sgc needs both graph and features")
    S = normalize_adjacency(g)
    return propagate_k(S, ds.features.to_dense(), cfg.K)


def init_model_state(ds: Dataset, cfg: ModelConfig, seed: int) -> ModelState:
    """Build a fresh state: constants, embeddings, weights, precompute.

    Three independent sub-streams are derived from the master seed so the
    draw order of one component cannot perturb another.
    """
    check_config(cfg, ds)
    sub = np.random.SeedSequence(seed).generate_state(3)
    constants = sample_constants(cfg.d0, cfg.d1, cfg.s, int(sub[0]))
    n_emb = ds.n if cfg.level == "node" else ds.n_features
    Z = init_embeddings(n_emb, cfg.d0, int(sub[1]))
    W = init_weight(input_dim(cfg, ds), ds.n_classes, int(sub[2]))
    state = ModelState(W=W, Z=Z, constants=constants)
    if cfg.level == "feature" and cfg.head == "sgc":
        state.precomputed = precompute_propagated(ds, cfg)
    return state


def _feature_matrix(state: ModelState, cfg: ModelConfig) -> np.ndarray:
    if cfg.feature_map == "hyla":
        return F.hyla_forward(state.Z, state.constants)
    return F.rff_forward(state.Z, state.constants)


def build_features(state: ModelState, X: Optional[SparseMatrix],
                   cfg: ModelConfig) -> np.ndarray:
    """X̄: the dense matrix fed to the classifier head.

    Node level returns H(Z) directly (optionally with the raw feature
    columns appended); feature level returns X·H(Z).
    """
    H = _feature_matrix(state, cfg)
    if cfg.level == "node":
        if not cfg.concat_original:
            return H
        if X is None:
            raise ConfigError("concat_original requires node features")
        return np.hstack([H, X.to_dense()])
    if X is None:
        raise ConfigError("feature-level model requires node features")
    if X.n_cols != state.Z.shape[0]:
        raise ConfigError(
            f"feature count {X.n_cols} does not match embedding rows "
            f"{state.Z.shape[0]}")
    return spmm(X, H)


def forward(state: ModelState, ds: Dataset, cfg: ModelConfig,
            S: Optional[SparseMatrix] = None,
            keep: bool = False) -> np.ndarray:
    """Pre-softmax logits for every node.

    `S` overrides the propagation matrix (the training loop passes a
    cached one); with `keep` the intermediates needed by backward() are
    stashed on state.cache, otherwise backward recomputes them.
    """
    cache = {}
    if cfg.level == "feature" and cfg.head == "sgc":
        if state.precomputed is None:
            raise ConfigError("feature-level sgc state is missing its "
                              "precomputed propagation")
        H = _feature_matrix(state, cfg)
        prop = state.precomputed @ H
        cache["H"] = H
    else:
        xbar = build_features(state, ds.features, cfg)
        if cfg.head == "sgc":
            if S is None:
                S = normalize_adjacency(ds.graph)
            prop = propagate_k(S, xbar, cfg.K)
            cache["S"] = S
        else:
            prop = xbar
    cache["prop"] = prop
    if keep:
        state.cache = cache
    else:
        state.cache = {}
    return prop @ state.W


def backward(state: ModelState, ds: Dataset, cfg: ModelConfig,
             dlogits: np.ndarray):
    """Gradients (dW, dZ) of the scalar loss behind dlogits.

    dZ is the plain Euclidean gradient; rsgd_step applies the metric
    factor. Uses intermediates from forward(..., keep=True) when present.
    """
    cache = state.cache or {}
    if cfg.level == "feature" and cfg.head == "sgc":
        H = cache.get("H")
        if H is None:
            H = _feature_matrix(state, cfg)
        prop = cache.get("prop")
        if prop is None:
            prop = state.precomputed @ H
        dW = prop.T @ dlogits
        dH = state.precomputed.T @ (dlogits @ state.W.T)
        dZ = _feature_backward(state, cfg, dH)
        return dW, dZ

    prop = cache.get("prop")
    if prop is None:
        xbar = build_features(state, ds.features, cfg)
        if cfg.head == "sgc":
            S = normalize_adjacency(ds.graph)
            prop = propagate_k(S, xbar, cfg.K)
        else:
            prop = xbar
    dW = prop.T @ dlogits
    dxbar = dlogits @ state.W.T
    if cfg.head == "sgc":
        S = cache.get("S")
        if S is None:
            S = normalize_adjacency(ds.graph)
        dxbar = propagate_k(S, dxbar, cfg.K)   # S is symmetric
    if cfg.level == "node":
        dH = dxbar[:, :cfg.d1] if cfg.concat_original else dxbar
    else:
        dH = spmm(transpose(ds.features), dxbar)
    dZ = _feature_backward(state, cfg, dH)
    return dW, dZ


def _feature_backward(state: ModelState, cfg: ModelConfig,
                      dH: np.ndarray) -> np.ndarray:
    if cfg.feature_map == "hyla":
        return F.hyla_backward(state.Z, state.constants, dH)
    return F.rff_backward(state.Z, state.constants, dH)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray,
                          mask: np.ndarray):
    """Mean CE over the masked rows, with its logit gradient.

    Returns (loss, dlogits) where dlogits is (softmax - onehot)/|mask| on
    masked rows and zero elsewhere, so downstream code can treat it as the
    gradient of the scalar loss w.r.t. the full logits matrix.
    """
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise ConfigError("softmax_cross_entropy: empty mask")
    y = labels[mask]
    if np.any(y < 0) or np.any(y >= logits.shape[1]):
        raise DataError("masked rows must carry valid class labels")
    sub = logits[mask]
    shifted = sub - sub.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    denom = exp.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(denom)
    rows = np.arange(mask.size)
    loss = float(-log_probs[rows, y].mean())
    grad_rows = exp / denom
    grad_rows[rows, y] -= 1.0
    dlogits = np.zeros_like(logits)
    dlogits[mask] = grad_rows / mask.size
    return loss, dlogits


def evaluate(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> dict:
    """Accuracy and micro-F1 (pooled confusion counts) on masked rows."""
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise ConfigError("evaluate: empty mask")
    preds = logits[mask].argmax(axis=1)
    y = labels[mask]
    tp = int(np.sum(preds == y))
    fp = int(np.sum(preds != y))   # every miss is a false positive somewhere
    fn = fp                        # and a false negative for the true class
    accuracy = tp / mask.size
    if tp == 0:
        micro_f1 = 0.0
    else:
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        micro_f1 = 2.0 * precision * recall / (precision + recall)
    return {"accuracy": accuracy, "micro_f1": micro_f1}
