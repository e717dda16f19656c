"""Two-optimizer training loop: Adam on W, RSGD on the embeddings Z.

Per-epoch metrics are computed from the pre-update forward pass, so row e
of the history describes the parameters entering epoch e. Runs are
deterministic for a fixed schedule seed: no wall-clock values enter the
history and all updates are full-batch.
"""

import csv
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .data import Dataset, inductive_subgraph
from .errors import ConfigError, NumericError
from .geometry import rsgd_step
from .model import (ModelConfig, ModelState, backward, evaluate, forward,
                    init_model_state, precompute_propagated,
                    softmax_cross_entropy)
from .sparse import normalize_adjacency


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int
    lr2: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(shape, lr2: float) -> AdamState:
    if lr2 < 0:
        raise ConfigError(f"lr2 must be >= 0, got {lr2}")
    return AdamState(m=np.zeros(shape), v=np.zeros(shape), t=0, lr2=lr2)


def adam_step(st: AdamState, W: np.ndarray, dW: np.ndarray):
    """One bias-corrected Adam update; returns (new_state, new_W)."""
    if W.shape != st.m.shape or dW.shape != st.m.shape:
        raise ConfigError("adam_step: shape mismatch")
    if np.any(np.isnan(dW)):
        raise NumericError("NaN gradient passed to adam_step")
    t = st.t + 1
    m = st.beta1 * st.m + (1.0 - st.beta1) * dW
    v = st.beta2 * st.v + (1.0 - st.beta2) * dW * dW
    m_hat = m / (1.0 - st.beta1 ** t)
    v_hat = v / (1.0 - st.beta2 ** t)
    W_new = W - st.lr2 * m_hat / (np.sqrt(v_hat) + st.eps)
    return replace(st, m=m, v=v, t=t), W_new


@dataclass(frozen=True)
class TrainSchedule:
    max_epochs: int = 100
    lr1: float = 0.1
    lr2: float = 0.01
    early_stopping: bool = False
    patience: int = 10
    eval_every: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 0:
            raise ConfigError(f"max_epochs must be >= 0, "
                              f"got {self.max_epochs}")
        if self.lr1 < 0 or self.lr2 < 0:
            raise ConfigError("learning rates must be >= 0")
        if self.early_stopping and self.patience < 1:
            raise ConfigError("patience must be >= 1 with early stopping")
        if self.eval_every < 1:
            raise ConfigError(f"eval_every must be >= 1, "
                              f"got {self.eval_every}")


def train(ds: Dataset, cfg: ModelConfig, schedule: TrainSchedule,
          state: Optional[ModelState] = None):
    """Full-batch training; returns (state, history).

    With early stopping the returned state is the snapshot with the best
    validation accuracy; otherwise it is the state after the last update.
    History rows: {"epoch", "train_loss", "train_acc", "val_acc"} with
    val_acc None on epochs that were not evaluated.
    """
    if state is None:
        state = init_model_state(ds, cfg, schedule.seed)
    if schedule.early_stopping and ds.val_idx.size == 0:
        raise ConfigError("early stopping requires a validation set")

    # Inductive sgc training sees only edges among training nodes; the
    # full graph is used for evaluation.
    needs_graph = cfg.head == "sgc"
    split_phases = ds.task == "inductive" and needs_graph
    train_ds = inductive_subgraph(ds) if split_phases else ds

    S_train = S_eval = None
    precomp_train = precomp_eval = None
    if needs_graph and not (cfg.level == "feature"):
        S_train = normalize_adjacency(train_ds.graph)
        S_eval = S_train if not split_phases else normalize_adjacency(ds.graph)
    if cfg.level == "feature" and cfg.head == "sgc":
        # init_model_state precomputes against the full graph; training in
        # split-phase mode must propagate over the train-only subgraph
        precomp_eval = state.precomputed if state.precomputed is not None \
            else precompute_propagated(ds, cfg)
        precomp_train = precompute_propagated(train_ds, cfg) \
            if split_phases else precomp_eval

    adam = adam_init(state.W.shape, schedule.lr2)
    history = []
    best_val = -1.0
    best_snapshot = None
    evals_since_improve = 0

    for epoch in range(1, schedule.max_epochs + 1):
        state.precomputed = precomp_train
        logits = forward(state, train_ds, cfg, S=S_train, keep=True)
        loss, dlogits = softmax_cross_entropy(logits, ds.labels, ds.train_idx)
        if np.isnan(loss):
            raise NumericError(f"loss diverged to NaN at epoch {epoch}")
        train_acc = evaluate(logits, ds.labels, ds.train_idx)["accuracy"]

        val_acc = None
        if ds.val_idx.size and epoch % schedule.eval_every == 0:
            if split_phases:
                state.precomputed = precomp_eval
                val_logits = forward(state, ds, cfg, S=S_eval)
                state.precomputed = precomp_train
            else:
                val_logits = logits
            val_acc = evaluate(val_logits, ds.labels, ds.val_idx)["accuracy"]
            if schedule.early_stopping:
                if val_acc > best_val:
                    best_val = val_acc
                    best_snapshot = (state.W.copy(), state.Z.copy())
                    evals_since_improve = 0
                else:
                    evals_since_improve += 1

        history.append({"epoch": epoch, "train_loss": loss,
                        "train_acc": train_acc, "val_acc": val_acc})
        if (schedule.early_stopping
                and evals_since_improve >= schedule.patience):
            break

        dW, dZ = backward(state, train_ds, cfg, dlogits)
        adam, state.W = adam_step(adam, state.W, dW)
        if cfg.feature_map == "hyla":
            state.Z = rsgd_step(state.Z, dZ, schedule.lr1)
        else:
            # rff embeddings are unconstrained Euclidean points
            if np.any(np.isnan(dZ)):
                raise NumericError("NaN gradient at embedding update")
            state.Z = state.Z - schedule.lr1 * dZ

    if schedule.early_stopping and best_snapshot is not None:
        state.W, state.Z = best_snapshot
    state.precomputed = precomp_eval if split_phases else state.precomputed
    state.cache = {}
    return state, history


def evaluate_split(state: ModelState, ds: Dataset, cfg: ModelConfig,
                   split: str = "test") -> dict:
    """Evaluate a trained state on one split using the full graph."""
    idx = {"train": ds.train_idx, "val": ds.val_idx,
           "test": ds.test_idx}[split]
    if cfg.level == "feature" and cfg.head == "sgc" and ds.task == "inductive":
        state.precomputed = precompute_propagated(ds, cfg)
    logits = forward(state, ds, cfg)
    return evaluate(logits, ds.labels, idx)


def write_history_csv(path, history) -> None:
    """epoch,train_loss,train_acc,val_acc with full-precision floats."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "train_acc", "val_acc"])
        for row in history:
            val = "" if row["val_acc"] is None else "%.17g" % row["val_acc"]
            w.writerow([row["epoch"], "%.17g" % row["train_loss"],
                        "%.17g" % row["train_acc"], val])


def read_history_csv(path):
    rows = []
    with open(path, encoding="utf-8") as f:
        for rec in csv.DictReader(f):
            rows.append({
                "epoch": int(rec["epoch"]),
                "train_loss": float(rec["train_loss"]),
                "train_acc": float(rec["train_acc"]),
                "val_acc": float(rec["val_acc"]) if rec["val_acc"] else None,
            })
    return rows
