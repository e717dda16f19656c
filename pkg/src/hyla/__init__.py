"""Hyperbolic Laplacian features for graph learning.

Learns Poincaré-ball embeddings, maps them to Euclidean features through
eigenfunctions of the hyperbolic Laplacian, and trains a linear graph
classifier on top (SGC or logistic regression) with RSGD on the
embeddings and Adam on the weights.

Submodules are imported lazily so the CLI can pin thread counts through
environment variables before numpy comes up.
"""

__version__ = "0.1.0"

_EXPORTS = {
    # geometry
    "poincare_distance": "geometry",
    "project_to_ball": "geometry",
    "rsgd_step": "geometry",
    "init_embeddings": "geometry",
    # features
    "HylaConstants": "features",
    "sample_constants": "features",
    "hyla_forward": "features",
    "hyla_backward": "features",
    "rff_forward": "features",
    "rff_backward": "features",
    # sparse
    "SparseMatrix": "sparse",
    "csr_from_edges": "sparse",
    "normalize_adjacency": "sparse",
    "spmm": "sparse",
    "propagate_k": "sparse",
    # data
    "Dataset": "data",
    "load_dataset": "data",
    "save_dataset": "data",
    "SynthTreeParams": "data",
    "generate_synthetic_tree": "data",
    "tfidf_features": "data",
    "inductive_subgraph": "data",
    # model
    "ModelConfig": "model",
    "ModelState": "model",
    "init_model_state": "model",
    "build_features": "model",
    "forward": "model",
    "backward": "model",
    "softmax_cross_entropy": "model",
    "evaluate": "model",
    # optim
    "AdamState": "optim",
    "adam_init": "optim",
    "adam_step": "optim",
    "TrainSchedule": "optim",
    "train": "optim",
    "evaluate_split": "optim",
    # checkpoint
    "save_checkpoint": "checkpoint",
    "load_checkpoint": "checkpoint",
    # errors
    "ConfigError": "errors",
    "DataError": "errors",
    "NumericError": "errors",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    module = _EXPORTS.get(name)
    if module is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib
    mod = importlib.import_module(f".{module}", __name__)
    value = getattr(mod, name)
    globals()[name] = value
    return value


def __dir__():
    return __all__
