"""Dataset container, on-disk format, synthetic tree generator, TF-IDF.

On-disk layout (UTF-8, LF, tab-separated):

    meta.json     {"name", "num_nodes", "num_features", "num_classes", "task"}
    edges.tsv     one "u\\tv" per undirected edge, 0-indexed, each pair once
    features.tsv  sparse triplets "node\\tfeature\\tvalue"   (optional)
    labels.tsv    "node\\tclass_index"
    train.txt / val.txt / test.txt   one node id per line

Unlabeled nodes carry label -1. Splits must be disjoint and every split
index labeled; both are checked on load.
"""

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError
from .sparse import SparseMatrix, csr_from_edges, from_triplets, undirected_edges

TASKS = ("transductive", "inductive")


@dataclass(frozen=True)
class Dataset:
    name: str
    graph: Optional[SparseMatrix]
    features: Optional[SparseMatrix]
    labels: np.ndarray            # int64, -1 for unlabeled
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray
    n_classes: int
    task: str

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.n_cols if self.features is not None else 0


def validate_dataset(ds: Dataset) -> None:
    if ds.task not in TASKS:
        raise DataError(f"unknown task {ds.task!r}")
    n = ds.n
    splits = {"train": ds.train_idx, "val": ds.val_idx, "test": ds.test_idx}
    seen = set()
    for name, idx in splits.items():
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise DataError(f"{name} split contains out-of-range node ids")
        s = set(idx.tolist())
        if len(s) != idx.size:
            raise DataError(f"{name} split contains duplicate node ids")
        if seen & s:
            raise DataError("splits are not disjoint")
        seen |= s
        if np.any(ds.labels[idx] < 0):
            raise DataError(f"{name} split contains unlabeled nodes")
    labeled = ds.labels[ds.labels >= 0]
    if labeled.size and labeled.max() >= ds.n_classes:
        raise DataError("label index exceeds num_classes")
    if ds.task == "transductive" and ds.graph is None:
        raise DataError("transductive dataset requires a graph")
    if ds.graph is not None and ds.graph.n_rows != n:
        raise DataError("graph size does not match number of nodes")
    if ds.features is not None and ds.features.n_rows != n:
        raise DataError("feature matrix rows do not match number of nodes")


def _read_tsv(path: Path, n_fields, cast):
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != n_fields:
                raise DataError(
                    f"{path.name}:{lineno}: expected {n_fields} fields, "
                    f"got {len(parts)}")
            try:
                rows.append(tuple(c(p) for c, p in zip(cast, parts)))
            except ValueError as e:
                raise DataError(f"{path.name}:{lineno}: {e}") from None
    return rows


def _read_ids(path: Path):
    ids = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                ids.append(int(line))
            except ValueError:
                raise DataError(f"{path.name}:{lineno}: not a node id: "
                                f"{line!r}") from None
    return np.array(ids, dtype=np.int64)


def load_dataset(dir_path) -> Dataset:
    """Load and validate a dataset directory."""
    d = Path(dir_path)
    meta_path = d / "meta.json"
    if not meta_path.exists():
        raise DataError(f"missing {meta_path}")
    with open(meta_path, encoding="utf-8") as f:
        meta = json.load(f)
    for key in ("name", "num_nodes", "num_features", "num_classes", "task"):
        if key not in meta:
            raise DataError(f"meta.json missing field {key!r}")
    n = int(meta["num_nodes"])
    n_feat = int(meta["num_features"])

    edges = _read_tsv(d / "edges.tsv", 2, (int, int))
    try:
        graph = csr_from_edges(n, edges, symmetrize=True) if edges else \
            csr_from_edges(n, [], symmetrize=True)
    except DataError as e:
        raise DataError(f"edges.tsv: {e}") from None

    features = None
    feat_path = d / "features.tsv"
    if feat_path.exists() and n_feat > 0:
        trip = _read_tsv(feat_path, 3, (int, int, float))
        rows = np.array([t[0] for t in trip], dtype=np.int64)
        cols = np.array([t[1] for t in trip], dtype=np.int64)
        vals = np.array([t[2] for t in trip], dtype=np.float64)
        if rows.size and (rows.max() >= n or rows.min() < 0):
            raise DataError("features.tsv: node id out of range")
        if cols.size and (cols.max() >= n_feat or cols.min() < 0):
            raise DataError("features.tsv: feature index out of range")
        features = from_triplets(n, n_feat, rows, cols, vals)

    labels = np.full(n, -1, dtype=np.int64)
    for node, cls in _read_tsv(d / "labels.tsv", 2, (int, int)):
        if not 0 <= node < n:
            raise DataError(f"labels.tsv: node id {node} out of range")
        labels[node] = cls

    ds = Dataset(
        name=str(meta["name"]),
        graph=graph,
        features=features,
        labels=labels,
        train_idx=_read_ids(d / "train.txt"),
        val_idx=_read_ids(d / "val.txt"),
        test_idx=_read_ids(d / "test.txt"),
        n_classes=int(meta["num_classes"]),
        task=str(meta["task"]),
    )
    validate_dataset(ds)
    return ds


def save_dataset(ds: Dataset, dir_path) -> None:
    """Write a dataset directory (inverse of load_dataset)."""
    d = Path(dir_path)
    d.mkdir(parents=True, exist_ok=True)
    meta = {
        "name": ds.name,
        "num_nodes": int(ds.n),
        "num_features": int(ds.n_features),
        "num_classes": int(ds.n_classes),
        "task": ds.task,
    }
    with open(d / "meta.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(d / "edges.tsv", "w", encoding="utf-8", newline="\n") as f:
        if ds.graph is not None:
            for u, v in undirected_edges(ds.graph):
                f.write(f"{u}\t{v}\n")
    with open(d / "features.tsv", "w", encoding="utf-8", newline="\n") as f:
        if ds.features is not None:
            rows, cols, vals = ds.features.triplets()
            for r, c, v in zip(rows, cols, vals):
                f.write("%d\t%d\t%.17g\n" % (r, c, v))
    with open(d / "labels.tsv", "w", encoding="utf-8", newline="\n") as f:
        for node in range(ds.n):
            if ds.labels[node] >= 0:
                f.write(f"{node}\t{ds.labels[node]}\n")
    for name, idx in (("train", ds.train_idx), ("val", ds.val_idx),
                      ("test", ds.test_idx)):
        with open(d / f"{name}.txt", "w", encoding="utf-8", newline="\n") as f:
            for i in idx:
                f.write(f"{i}\n")


@dataclass(frozen=True)
class SynthTreeParams:
    depth: int = 7
    branching: int = 2
    infect_prob: float = 0.8
    feature_dim: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.depth < 2:
            raise ConfigError(f"tree depth must be >= 2, got {self.depth}")
        if self.branching < 2:
            raise ConfigError(
                f"branching factor must be >= 2, got {self.branching}")
        if not 0.0 <= self.infect_prob <= 1.0:
            raise ConfigError("infect_prob must lie in [0, 1]")
        if self.feature_dim < 1:
            raise ConfigError("feature_dim must be >= 1")


def generate_synthetic_tree(p: SynthTreeParams) -> Dataset:
    """Complete b-ary infection tree with binary labels.

    The root is infected; each child of an infected parent is infected with
    probability `infect_prob` (children of healthy parents stay healthy).
    Node features are a noisy susceptibility indicator. Nodes are split
    30/10/60 percent into train/val/test at random. Deterministic per seed.
    """
    b, depth = p.branching, p.depth
    n = (b ** (depth + 1) - 1) // (b - 1)
    rng = np.random.Generator(np.random.Philox(p.seed))

    edges = []
    for v in range(n):
        first_child = v * b + 1
        for c in range(first_child, min(first_child + b, n)):
            edges.append((v, c))
    graph = csr_from_edges(n, edges, symmetrize=True)

    infected = np.zeros(n, dtype=np.int64)
    infected[0] = 1
    coin = rng.random(n)
    for v in range(1, n):
        parent = (v - 1) // b
        if infected[parent] and coin[v] < p.infect_prob:
            infected[v] = 1

    base = np.where(infected == 1, 0.8, 0.2)
    feats = base[:, None] + rng.normal(0.0, 0.3, size=(n, p.feature_dim))
    rows = np.repeat(np.arange(n, dtype=np.int64), p.feature_dim)
    cols = np.tile(np.arange(p.feature_dim, dtype=np.int64), n)
    features = from_triplets(n, p.feature_dim, rows, cols, feats.ravel())

    perm = rng.permutation(n)
    n_train = int(round(0.3 * n))
    n_val = int(round(0.1 * n))
    ds = Dataset(
        name=f"synth_tree_d{depth}_b{b}",
        graph=graph,
        features=features,
        labels=infected,
        train_idx=np.sort(perm[:n_train]),
        val_idx=np.sort(perm[n_train:n_train + n_val]),
        test_idx=np.sort(perm[n_train + n_val:]),
        n_classes=2,
        task="transductive",
    )
    validate_dataset(ds)
    return ds


def tfidf_features(docs, vocab=None):
    """TF-IDF rows for a token-list corpus.

    Value is term count times ln(N / df), L2-normalized per document.
    When `vocab` is None it is built from the corpus in first-occurrence
    order; a given vocab is reused unchanged (unknown tokens are ignored),
    which is the inductive path for unseen documents.

    Returns (SparseMatrix of shape n_docs x len(vocab), vocab).
    """
    if not docs:
        raise DataError("tfidf_features: empty corpus")
    build_vocab = vocab is None
    if build_vocab:
        vocab = {}
        for doc in docs:
            for tok in doc:
                if tok not in vocab:
                    vocab[tok] = len(vocab)
    n_docs = len(docs)
    df = np.zeros(len(vocab), dtype=np.int64)
    counts = []
    for doc in docs:
        c = {}
        for tok in doc:
            j = vocab.get(tok)
            if j is not None:
                c[j] = c.get(j, 0) + 1
        for j in c:
            df[j] += 1
        counts.append(c)
    idf = np.zeros(len(vocab))
    nz = df > 0
    idf[nz] = np.log(n_docs / df[nz])
    rows, cols, vals = [], [], []
    for i, c in enumerate(counts):
        if not c:
            warnings.warn(f"document {i} has no in-vocabulary tokens")
            continue
        js = np.fromiter(c.keys(), dtype=np.int64)
        tf = np.fromiter(c.values(), dtype=np.float64)
        v = tf * idf[js]
        norm = np.linalg.norm(v)
        if norm > 0:
            v = v / norm
        else:
            warnings.warn(f"document {i} has an all-zero TF-IDF row")
        rows.extend([i] * len(js))
        cols.extend(js.tolist())
        vals.extend(v.tolist())
    mat = from_triplets(n_docs, len(vocab), rows, cols, vals)
    return mat, vocab


def inductive_subgraph(ds: Dataset) -> Dataset:
    """Training-phase dataset keeping only edges among training nodes."""
    if ds.task != "inductive":
        raise ConfigError("inductive_subgraph requires an inductive dataset")
    if ds.graph is None:
        raise ConfigError("inductive_subgraph requires a graph")
    if ds.train_idx.size == 0:
        raise DataError("inductive dataset has an empty training set")
    in_train = np.zeros(ds.n, dtype=bool)
    in_train[ds.train_idx] = True
    rows, cols, vals = ds.graph.triplets()
    keep = in_train[rows] & in_train[cols]
    sub = from_triplets(ds.n, ds.n, rows[keep], cols[keep], vals[keep])
    return Dataset(name=ds.name, graph=sub, features=ds.features,
                   labels=ds.labels, train_idx=ds.train_idx,
                   val_idx=ds.val_idx, test_idx=ds.test_idx,
                   n_classes=ds.n_classes, task=ds.task)
