"""The neutral on-disk dataset format, writer side.

A dataset directory holds:

    meta.json     {"name", "num_nodes", "num_features", "num_classes", "task"}
    edges.tsv     one "u\\tv" per undirected edge, 0-indexed, each pair once
    features.tsv  sparse triplets "node\\tfeature\\tvalue"
    labels.tsv    "node\\tclass_index"; nodes absent from the file are
                  unlabeled
    train.txt / val.txt / test.txt   one node id per line

The writer is deliberately independent of the consumer package: the
directory layout is the only coupling between the two. Output is
deterministic byte for byte (sorted keys, fixed float format, LF line
endings) so re-running a conversion reproduces identical files.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ConvertError(Exception):
    """Unusable upstream input or a statistics mismatch."""


@dataclass
class Converted:
    """In-memory form of one converted dataset."""

    name: str
    task: str                     # "transductive" | "inductive"
    n_nodes: int
    n_features: int
    n_classes: int
    edges: list                   # unique (u, v) with u < v
    feat_rows: np.ndarray
    feat_cols: np.ndarray
    feat_vals: np.ndarray
    labels: np.ndarray            # int64, -1 for unlabeled
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray
    notes: dict = field(default_factory=dict)


def dedupe_edges(pairs, n_nodes) -> list:
    """Canonicalize an edge iterable: undirected, no self loops, sorted."""
    seen = set()
    for u, v in pairs:
        u, v = int(u), int(v)
        if not (0 <= u < n_nodes and 0 <= v < n_nodes):
            raise ConvertError(f"edge ({u}, {v}) out of range for "
                               f"{n_nodes} nodes")
        if u == v:
            continue
        seen.add((u, v) if u < v else (v, u))
    return sorted(seen)


def dense_to_triplets(X):
    """Row-major (rows, cols, vals) of the nonzero entries of a 2-D array."""
    rows, cols = np.nonzero(X)
    return rows.astype(np.int64), cols.astype(np.int64), X[rows, cols]


def tfidf_triplets(docs, n_vocab):
    """TF-IDF triplets for tokenized docs with a fixed word -> index map.

    Entry = count * ln(N / df), rows L2-normalized; all-zero rows stay
    zero. `docs` holds lists of vocabulary indices.
    """
    n = len(docs)
    df = np.zeros(n_vocab, dtype=np.int64)
    for doc in docs:
        for j in set(doc):
            df[j] += 1
    rows, cols, vals = [], [], []
    for i, doc in enumerate(docs):
        counts = {}
        for j in doc:
            counts[j] = counts.get(j, 0) + 1
        entries = [(j, c * math.log(n / df[j]))
                   for j, c in sorted(counts.items()) if df[j] > 0]
        norm = math.sqrt(sum(v * v for _, v in entries))
        if norm == 0.0:
            continue
        for j, v in entries:
            if v != 0.0:
                rows.append(i)
                cols.append(j)
                vals.append(v / norm)
    return (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
            np.array(vals, dtype=np.float64))


def write_dataset_dir(conv: Converted, out_dir) -> None:
    """Write `conv` as a dataset directory, creating it if needed."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    meta = {
        "name": conv.name,
        "num_nodes": int(conv.n_nodes),
        "num_features": int(conv.n_features),
        "num_classes": int(conv.n_classes),
        "task": conv.task,
    }
    with open(d / "meta.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(d / "edges.tsv", "w", encoding="utf-8", newline="\n") as f:
        for u, v in conv.edges:
            f.write(f"{u}\t{v}\n")
    with open(d / "features.tsv", "w", encoding="utf-8", newline="\n") as f:
        for r, c, v in zip(conv.feat_rows, conv.feat_cols, conv.feat_vals):
            f.write("%d\t%d\t%.17g\n" % (r, c, v))
    with open(d / "labels.tsv", "w", encoding="utf-8", newline="\n") as f:
        for node in range(conv.n_nodes):
            if conv.labels[node] >= 0:
                f.write(f"{node}\t{conv.labels[node]}\n")
    for name, idx in (("train", conv.train_idx), ("val", conv.val_idx),
                      ("test", conv.test_idx)):
        with open(d / f"{name}.txt", "w", encoding="utf-8", newline="\n") as f:
            for i in idx:
                f.write(f"{i}\n")


def onehot_to_labels(Y) -> np.ndarray:
    """Label vector from a one-hot matrix; all-zero rows become -1."""
    Y = np.asarray(Y)
    labels = np.argmax(Y, axis=1).astype(np.int64)
    labels[Y.sum(axis=1) == 0] = -1
    return labels


def seeded_permutation(n, seed) -> np.ndarray:
    return np.random.Generator(np.random.Philox(seed)).permutation(n)
