"""Reader for the pickled citation-network releases.

Upstream distributes eight files per dataset:

    ind.<name>.x           csr matrix, features of the labeled train nodes
    ind.<name>.y           one-hot labels for x
    ind.<name>.tx / .ty    features / one-hot labels of the test nodes,
                           ordered as listed in test.index
    ind.<name>.allx / .ally  features / labels of all non-test nodes
                           (x is its prefix; unlabeled rows are all zero)
    ind.<name>.graph       dict node -> neighbor list over all nodes
    ind.<name>.test.index  graph positions of the tx rows, one per line

The standard splits are implicit: train = the first len(y) nodes,
val = the next 500, test = the ids in test.index. Some releases list
test ids with gaps; the missing positions are isolated nodes that get
zero features and stay unlabeled, outside every split.
"""

import pickle
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .formats import Converted, ConvertError, dedupe_edges, onehot_to_labels

_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")
VAL_SIZE = 500


def _load_pickle(path: Path):
    if not path.exists():
        raise ConvertError(f"missing upstream file: {path}")
    try:
        with open(path, "rb") as f:
            return pickle.load(f, encoding="latin1")
    except Exception as e:
        raise ConvertError(f"corrupt upstream file: {path}: {e}") from None


def _load_test_index(path: Path):
    if not path.exists():
        raise ConvertError(f"missing upstream file: {path}")
    ids = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                ids.append(int(line))
            except ValueError:
                raise ConvertError(
                    f"{path}:{lineno}: not a node id: {line!r}") from None
    if not ids:
        raise ConvertError(f"{path}: empty test index")
    return np.array(ids, dtype=np.int64)


def read_planetoid(in_dir, name) -> Converted:
    d = Path(in_dir)
    x, y, tx, ty, allx, ally = (
        _load_pickle(d / f"ind.{name}.{part}") for part in _PARTS[:-1])
    graph = _load_pickle(d / f"ind.{name}.graph")
    test_idx = _load_test_index(d / f"ind.{name}.test.index")

    if not isinstance(graph, dict):
        raise ConvertError(f"ind.{name}.graph: expected a dict, got "
                           f"{type(graph).__name__}")
    if sp.csr_matrix(x).shape[0] != np.asarray(y).shape[0]:
        raise ConvertError(f"ind.{name}.x and ind.{name}.y disagree on the "
                           "labeled train count")
    n = len(graph)
    allx = sp.csr_matrix(allx)
    tx = sp.csr_matrix(tx)
    n_allx, n_feat = allx.shape
    if tx.shape[0] != test_idx.shape[0]:
        raise ConvertError(
            f"ind.{name}.tx has {tx.shape[0]} rows but test.index lists "
            f"{test_idx.shape[0]} ids")
    if np.any(test_idx < 0) or np.any(test_idx >= n):
        raise ConvertError(f"ind.{name}.test.index: id out of range for "
                           f"{n} graph nodes")

    # assemble features/labels in graph order: allx rows first, tx rows
    # at the positions test.index assigns them
    feats = sp.lil_matrix((n, n_feat))
    feats[:n_allx] = allx
    feats[test_idx] = tx
    labels = np.full(n, -1, dtype=np.int64)
    labels[:n_allx] = onehot_to_labels(np.asarray(ally))
    labels[test_idx] = onehot_to_labels(np.asarray(ty))

    raw_entries = sum(len(nbrs) for nbrs in graph.values())
    edges = dedupe_edges(
        ((u, v) for u, nbrs in graph.items() for v in nbrs), n)

    y = np.asarray(y)
    n_train = y.shape[0]
    train_idx = np.arange(n_train, dtype=np.int64)
    val_idx = np.arange(n_train, min(n_train + VAL_SIZE, n_allx),
                        dtype=np.int64)

    feats = feats.tocsr()
    feats.sort_indices()
    rows, cols = feats.nonzero()
    conv = Converted(
        name=name, task="transductive", n_nodes=n, n_features=n_feat,
        n_classes=y.shape[1], edges=edges,
        feat_rows=rows.astype(np.int64), feat_cols=cols.astype(np.int64),
        feat_vals=np.asarray(feats[rows, cols]).ravel().astype(np.float64),
        labels=labels, train_idx=train_idx, val_idx=val_idx,
        test_idx=np.sort(test_idx),
        notes={
            "splits": "standard: train = first labeled block, "
                      f"val = next {VAL_SIZE}, test = test.index",
            "raw_adjacency_entries": int(raw_entries),
            "isolated_test_nodes": int(n - n_allx - test_idx.shape[0]),
        },
    )
    return conv
