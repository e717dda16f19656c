"""Reader for the text-classification corpora.

Upstream layout, shared by the standard text-GCN releases:

    <name>.txt            one doc per line: "<id>\\t<train|test>\\t<label>"
    corpus/<name>.clean.txt   the cleaned text, one doc per line
                          (also accepted directly as <name>.clean.txt)

Documents become graph-less inductive datasets: docs are nodes,
features are TF-IDF rows over the whitespace vocabulary of the cleaned
corpus, and there are no edges (building a word-document graph is out
of scope). The upstream train flag is kept; a tenth of the train docs
is carved out as validation with a fixed, reported seed.

Preprocessing choices, also recorded in each report: whitespace
tokenization of the already-cleaned corpus, vocabulary in first
occurrence order, no extra stop-word or frequency filtering, IDF
computed over the whole corpus, classes indexed by sorted label name.
"""

from pathlib import Path

import numpy as np

from .formats import Converted, ConvertError, seeded_permutation, \
    tfidf_triplets

VAL_FRAC = 0.10

TOKENIZATION_NOTE = ("whitespace tokens of the cleaned corpus; vocabulary "
                     "in first-occurrence order; no further filtering; "
                     "IDF over all docs")


def _corpus_path(d: Path, name: str) -> Path:
    for p in (d / "corpus" / f"{name}.clean.txt", d / f"{name}.clean.txt"):
        if p.exists():
            return p
    raise ConvertError(f"missing upstream file: "
                       f"{d / 'corpus' / (name + '.clean.txt')}")


def read_text_corpus(in_dir, name, seed) -> Converted:
    d = Path(in_dir)
    meta_path = d / f"{name}.txt"
    if not meta_path.exists():
        raise ConvertError(f"missing upstream file: {meta_path}")

    flags, label_names = [], []
    with open(meta_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ConvertError(f"{meta_path}:{lineno}: expected "
                                   f"'id<TAB>split<TAB>label', got {line!r}")
            if "train" in parts[1]:
                flags.append("train")
            elif "test" in parts[1]:
                flags.append("test")
            else:
                raise ConvertError(f"{meta_path}:{lineno}: split field "
                                   f"{parts[1]!r} names neither train nor "
                                   "test")
            label_names.append(parts[2])
    n = len(flags)
    if n == 0:
        raise ConvertError(f"{meta_path}: no documents listed")

    corpus_path = _corpus_path(d, name)
    with open(corpus_path, encoding="utf-8") as f:
        texts = f.read().split("\n")
    if texts and texts[-1] == "":
        texts.pop()
    if len(texts) != n:
        raise ConvertError(f"{corpus_path}: {len(texts)} docs but "
                           f"{meta_path.name} lists {n}")

    vocab = {}
    docs = []
    for text in texts:
        doc = []
        for tok in text.split():
            if tok not in vocab:
                vocab[tok] = len(vocab)
            doc.append(vocab[tok])
        docs.append(doc)
    rows, cols, vals = tfidf_triplets(docs, len(vocab))

    classes = sorted(set(label_names))
    class_index = {c: i for i, c in enumerate(classes)}
    labels = np.array([class_index[c] for c in label_names], dtype=np.int64)

    train_all = np.array([i for i, fl in enumerate(flags) if fl == "train"],
                         dtype=np.int64)
    test_idx = np.array([i for i, fl in enumerate(flags) if fl == "test"],
                        dtype=np.int64)
    n_val = int(VAL_FRAC * train_all.shape[0])
    perm = seeded_permutation(train_all.shape[0], seed)
    val_idx = np.sort(train_all[perm[:n_val]])
    train_idx = np.sort(train_all[perm[n_val:]])

    empty_docs = int(n - np.unique(rows).shape[0]) if rows.size else n
    return Converted(
        name=name, task="inductive", n_nodes=n, n_features=len(vocab),
        n_classes=len(classes), edges=[],
        feat_rows=rows, feat_cols=cols, feat_vals=vals,
        labels=labels, train_idx=train_idx, val_idx=val_idx,
        test_idx=test_idx,
        notes={"tokenization": TOKENIZATION_NOTE,
               "class_index": {c: i for i, c in enumerate(classes)},
               "empty_docs": empty_docs,
               "split_seed": int(seed),
               "val_fraction": VAL_FRAC,
               "splits": "upstream train/test flags; val carved from "
                         "train with the seed"},
    )
