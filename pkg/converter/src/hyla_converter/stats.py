"""Published reference statistics for the supported datasets.

When a converted dataset's name appears here, its node, class and
feature counts must match exactly or the conversion fails. Edge counts
are reported but not enforced: the published figures count raw citation
entries, which include duplicates and self references that the neutral
format canonicalizes away.

For the text corpora the feature count is the vocabulary size of the
cleaned corpus under whitespace tokenization; a corpus cleaned
differently will fail validation rather than silently diverge.
"""

from .formats import ConvertError

EXPECTED = {
    "cora": {"nodes": 2708, "classes": 7, "features": 1433,
             "train": 140, "val": 500, "test": 1000},
    "citeseer": {"nodes": 3327, "classes": 6, "features": 3703,
                 "train": 120, "val": 500, "test": 1000},
    "pubmed": {"nodes": 19717, "classes": 3, "features": 500,
               "train": 60, "val": 500, "test": 1000},
    "disease_nc": {"nodes": 1044, "classes": 2, "features": 1000,
                   "train": 313, "val": 104, "test": 627},
    "airport": {"nodes": 3188, "classes": 4, "features": 4,
                "val": 524, "test": 524},
    "r8": {"nodes": 7674, "classes": 8, "features": 7688},
    "r52": {"nodes": 9100, "classes": 52, "features": 8892},
    "ohsumed": {"nodes": 7400, "classes": 23, "features": 14157},
    "mr": {"nodes": 10662, "classes": 2, "features": 18764},
}


def validate_counts(conv) -> bool:
    """Check `conv` against EXPECTED; True when its name is covered."""
    exp = EXPECTED.get(conv.name)
    if exp is None:
        return False
    got = {"nodes": conv.n_nodes, "classes": conv.n_classes,
           "features": conv.n_features,
           "train": len(conv.train_idx), "val": len(conv.val_idx),
           "test": len(conv.test_idx)}
    for key, want in exp.items():
        if got[key] != want:
            raise ConvertError(
                f"{conv.name}: expected {key} = {want}, converted input "
                f"has {got[key]}")
    return True
