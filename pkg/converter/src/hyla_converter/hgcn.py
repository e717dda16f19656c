"""Readers for the hyperbolic-GCN dataset release.

Two layouts appear in that release and both convert here:

  - csv/npz triples (the disease tree):
        <name>.edges.csv    "u,v" int pairs, ids are row indices
        <name>.feats.npz    scipy sparse feature matrix
        <name>.labels.npy   int labels
  - a pickled networkx graph (airport): node attribute "feat" holds
    four geographic columns plus a population statistic in column 4,
    which is binned into four classes and dropped from the features.

The release ships no splits, so they are regenerated from a fixed seed
and recorded in the report: 30/10/60% train/val/test for the csv
layout, 524/524 val/test nodes (rest train) for the airport graph.
"""

import pickle
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .formats import (Converted, ConvertError, dedupe_edges,
                      dense_to_triplets, seeded_permutation)

POPULATION_BINS = (1.0, 8.0 / 7.0, 9.0 / 7.0)
AIRPORT_HOLDOUT = 524
TRAIN_FRAC, VAL_FRAC = 0.30, 0.10


def _split_report(train, val, test, seed):
    return {"split_seed": int(seed),
            "split_sizes": [int(train), int(val), int(test)],
            "splits": "regenerated from the seed, not shipped upstream"}


def read_hgcn_csv(in_dir, name, seed) -> Converted:
    d = Path(in_dir)
    labels_path = d / f"{name}.labels.npy"
    feats_path = d / f"{name}.feats.npz"
    edges_path = d / f"{name}.edges.csv"
    for p in (labels_path, feats_path, edges_path):
        if not p.exists():
            raise ConvertError(f"missing upstream file: {p}")
    try:
        labels = np.load(labels_path).astype(np.int64).ravel()
        feats = sp.csr_matrix(sp.load_npz(feats_path))
    except Exception as e:
        raise ConvertError(f"corrupt upstream file in {d}: {e}") from None
    n = labels.shape[0]
    if feats.shape[0] != n:
        raise ConvertError(f"{feats_path}: {feats.shape[0]} feature rows "
                           f"for {n} labels")

    pairs = []
    with open(edges_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ConvertError(
                    f"{edges_path}:{lineno}: expected 'u,v', got {line!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ConvertError(
                    f"{edges_path}:{lineno}: non-integer node id") from None
    edges = dedupe_edges(pairs, n)

    perm = seeded_permutation(n, seed)
    n_train = int(TRAIN_FRAC * n)
    n_val = int(VAL_FRAC * n)
    train_idx = np.sort(perm[:n_train])
    val_idx = np.sort(perm[n_train:n_train + n_val])
    test_idx = np.sort(perm[n_train + n_val:])

    feats.sort_indices()
    rows, cols = feats.nonzero()
    return Converted(
        name=name, task="transductive", n_nodes=n,
        n_features=feats.shape[1], n_classes=int(labels.max()) + 1,
        edges=edges,
        feat_rows=rows.astype(np.int64), feat_cols=cols.astype(np.int64),
        feat_vals=np.asarray(feats[rows, cols]).ravel().astype(np.float64),
        labels=labels,
        train_idx=train_idx, val_idx=val_idx, test_idx=test_idx,
        notes={"node_ids": "edge ids taken as label/feature row indices",
               **_split_report(n_train, n_val, n - n_train - n_val, seed)},
    )


def read_hgcn_graph(in_dir, name, seed) -> Converted:
    """Pickled networkx layout (airport-style)."""
    path = Path(in_dir) / f"{name}.p"
    if not path.exists():
        raise ConvertError(f"missing upstream file: {path}")
    try:
        with open(path, "rb") as f:
            graph = pickle.load(f)
    except Exception as e:
        raise ConvertError(f"corrupt upstream file: {path}: {e}") from None
    try:
        nodes = list(graph.nodes())
        raw = np.array([graph.nodes[u]["feat"] for u in nodes],
                       dtype=np.float64)
        index = {u: i for i, u in enumerate(nodes)}
        pairs = [(index[u], index[v]) for u, v in graph.edges()]
    except Exception as e:
        raise ConvertError(
            f"{path}: not a graph with per-node 'feat' attributes: "
            f"{e}") from None
    n = len(nodes)
    if raw.ndim != 2 or raw.shape[1] < 5:
        raise ConvertError(f"{path}: 'feat' needs >= 5 columns, got shape "
                           f"{raw.shape}")

    labels = np.digitize(raw[:, 4], POPULATION_BINS).astype(np.int64)
    feats = raw[:, :4]
    rows, cols, vals = dense_to_triplets(feats)

    holdout = AIRPORT_HOLDOUT if name == "airport" else int(0.15 * n)
    if 2 * holdout >= n:
        raise ConvertError(f"{path}: {n} nodes cannot hold out "
                           f"2 x {holdout} for val/test")
    perm = seeded_permutation(n, seed)
    n_train = n - 2 * holdout
    train_idx = np.sort(perm[:n_train])
    val_idx = np.sort(perm[n_train:n_train + holdout])
    test_idx = np.sort(perm[n_train + holdout:])

    return Converted(
        name=name, task="transductive", n_nodes=n, n_features=4,
        n_classes=len(POPULATION_BINS) + 1,
        edges=dedupe_edges(pairs, n),
        feat_rows=rows, feat_cols=cols, feat_vals=vals,
        labels=labels,
        train_idx=train_idx, val_idx=val_idx, test_idx=test_idx,
        notes={"labels": "population column binned at "
                         f"{[round(b, 6) for b in POPULATION_BINS]}",
               **_split_report(n_train, holdout, holdout, seed)},
    )
