"""Command-line entry point.

Subcommands: train, eval, export-features, gen-synth. Heavy imports are
deferred until after argument parsing so --threads/--deterministic can pin
BLAS/numba thread counts through environment variables before numpy loads.

Exit codes: 0 success, 1 validation error (bad flags, config, data),
2 numeric failure (divergence, NaN gradients).
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS",
                "NUMBA_NUM_THREADS")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract reserves 2 for numeric
    failures, so usage problems are remapped to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _add_common(p):
    p.add_argument("--threads", type=int, default=None, metavar="N",
                   help="bound BLAS/numba threads (default: library choice)")
    p.add_argument("--deterministic", action="store_true",
                   help="force single-threaded, fixed-order reductions")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyla", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    t = sub.add_parser("train", help="train a model on a dataset directory")
    t.add_argument("--dataset", required=True, metavar="DIR",
                   help="dataset directory (meta.json, edges.tsv, ...)")
    t.add_argument("--out", default="hyla_run", metavar="DIR",
                   help="output directory for history/checkpoint/metrics")
    t.add_argument("--d0", type=int, default=16,
                   help="embedding (ball) dimension")
    t.add_argument("--d1", type=int, default=100,
                   help="number of feature-map components")
    t.add_argument("--K", type=int, default=2,
                   help="graph propagation steps (sgc head)")
    t.add_argument("--s", type=float, default=1.0,
                   help="eigenvalue scale for the lambda draws")
    t.add_argument("--lr1", type=float, default=0.1,
                   help="embedding learning rate (RSGD)")
    t.add_argument("--lr2", type=float, default=0.01,
                   help="weight learning rate (Adam)")
    t.add_argument("--epochs", type=int, default=100,
                   help="training epochs (0 = evaluate initialization)")
    t.add_argument("--early-stopping", action="store_true",
                   help="stop after --patience evaluations without "
                        "validation improvement, keep the best state")
    t.add_argument("--patience", type=int, default=10,
                   help="early-stopping patience, in evaluations")
    t.add_argument("--eval-every", type=int, default=1, metavar="E",
                   help="evaluate the validation set every E epochs")
    t.add_argument("--level", choices=("node", "feature"), default="node",
                   help="one embedding per node, or per input feature")
    t.add_argument("--head", choices=("sgc", "lr"), default="sgc",
                   help="classifier head")
    t.add_argument("--feature-map", choices=("hyla", "rff"), default="hyla",
                   help="hyperbolic features or the Euclidean rff baseline")
    t.add_argument("--concat-original", action="store_true",
                   help="append raw features to the map (node level)")
    t.add_argument("--seed", type=int, default=0, help="master seed")
    _add_common(t)

    e = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    e.add_argument("--checkpoint", required=True, metavar="FILE")
    e.add_argument("--dataset", required=True, metavar="DIR")
    _add_common(e)

    x = sub.add_parser("export-features",
                       help="write the model's node features as TSV")
    x.add_argument("--checkpoint", required=True, metavar="FILE")
    x.add_argument("--dataset", required=True, metavar="DIR")
    x.add_argument("--out", required=True, metavar="FILE")
    _add_common(x)

    g = sub.add_parser("gen-synth",
                       help="generate a synthetic infection-tree dataset")
    g.add_argument("--depth", type=int, default=7)
    g.add_argument("--branching", type=int, default=2)
    g.add_argument("--infect-prob", type=float, default=0.8)
    g.add_argument("--feature-dim", type=int, default=16)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, metavar="DIR")
    _add_common(g)
    return parser


def _setup_threads(args) -> None:
    threads = args.threads
    if getattr(args, "deterministic", False):
        threads = 1
    if threads is not None:
        if threads < 1:
            raise SystemExit("hyla: error: --threads must be >= 1")
        for var in _THREAD_VARS:
            os.environ[var] = str(threads)


def _check_compat(state, cfg, ds):
    from .errors import ConfigError
    from .model import check_config, input_dim
    check_config(cfg, ds)
    n_emb = ds.n if cfg.level == "node" else ds.n_features
    if state.Z.shape[0] != n_emb:
        raise ConfigError(
            f"checkpoint has {state.Z.shape[0]} embeddings but the dataset "
            f"needs {n_emb}")
    if state.W.shape != (input_dim(cfg, ds), ds.n_classes):
        raise ConfigError(
            f"checkpoint weight shape {state.W.shape} does not match "
            f"dataset ({input_dim(cfg, ds)}, {ds.n_classes})")


def _split_metrics(state, ds, cfg) -> dict:
    from .optim import evaluate_split
    out = {}
    for split in ("train", "val", "test"):
        if getattr(ds, f"{split}_idx").size:
            out[split] = evaluate_split(state, ds, cfg, split)
    return out


def _cmd_train(args) -> int:
    from dataclasses import asdict

    from ._backend import backend_name
    from .checkpoint import save_checkpoint
    from .data import load_dataset
    from .model import ModelConfig
    from .optim import TrainSchedule, train, write_history_csv

    t0 = time.perf_counter()
    ds = load_dataset(args.dataset)
    cfg = ModelConfig(d0=args.d0, d1=args.d1, K=args.K, s=args.s,
                      level=args.level, head=args.head,
                      feature_map=args.feature_map,
                      concat_original=args.concat_original)
    schedule = TrainSchedule(max_epochs=args.epochs, lr1=args.lr1,
                             lr2=args.lr2,
                             early_stopping=args.early_stopping,
                             patience=args.patience,
                             eval_every=args.eval_every, seed=args.seed)
    state, history = train(ds, cfg, schedule)
    metrics = _split_metrics(state, ds, cfg)
    wall = time.perf_counter() - t0

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_history_csv(out / "history.csv", history)
    save_checkpoint(out / "checkpoint.hyla", state, cfg,
                    meta={"dataset": ds.name, "seed": args.seed})
    report = {
        "schema_version": 1,
        "dataset": ds.name,
        "config": asdict(cfg),
        "schedule": asdict(schedule),
        "epochs_run": len(history),
        "metrics": metrics,
        "backend": backend_name(),
        "wall_seconds": round(wall, 3),
    }
    with open(out / "metrics.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")

    parts = [f"{split} acc {m['accuracy']:.4f}"
             for split, m in metrics.items()]
    print(f"{ds.name}: " + " | ".join(parts)
          + f" ({len(history)} epochs, {wall:.1f}s, {backend_name()})")
    return 0


def _cmd_eval(args) -> int:
    from .checkpoint import load_checkpoint
    from .data import load_dataset

    state, cfg, meta = load_checkpoint(args.checkpoint)
    ds = load_dataset(args.dataset)
    _check_compat(state, cfg, ds)
    metrics = _split_metrics(state, ds, cfg)
    print(json.dumps({"dataset": ds.name, "metrics": metrics},
                     indent=2, sort_keys=True))
    return 0


def _cmd_export_features(args) -> int:
    from .checkpoint import load_checkpoint
    from .data import load_dataset
    from .features import write_features_tsv
    from .model import build_features

    state, cfg, meta = load_checkpoint(args.checkpoint)
    ds = load_dataset(args.dataset)
    _check_compat(state, cfg, ds)
    xbar = build_features(state, ds.features, cfg)
    write_features_tsv(args.out, xbar)
    print(f"wrote {xbar.shape[0]} x {xbar.shape[1]} features to {args.out}")
    return 0


def _cmd_gen_synth(args) -> int:
    from .data import SynthTreeParams, generate_synthetic_tree, save_dataset

    params = SynthTreeParams(depth=args.depth, branching=args.branching,
                             infect_prob=args.infect_prob,
                             feature_dim=args.feature_dim, seed=args.seed)
    ds = generate_synthetic_tree(params)
    save_dataset(ds, args.out)
    print(f"wrote {ds.name}: {ds.n} nodes, "
          f"{ds.graph.nnz // 2} edges, splits "
          f"{ds.train_idx.size}/{ds.val_idx.size}/{ds.test_idx.size} "
          f"to {args.out}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "export-features": _cmd_export_features,
    "gen-synth": _cmd_gen_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_threads(args)

    from .errors import ConfigError, DataError, NumericError
    try:
        return _COMMANDS[args.command](args)
    except NumericError as e:
        print(f"hyla: numeric failure: {e}", file=sys.stderr)
        return 2
    except (ConfigError, DataError, ValueError, OSError) as e:
        print(f"hyla: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
