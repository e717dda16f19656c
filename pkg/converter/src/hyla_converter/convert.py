"""Conversion driver: pick a reader, validate, write, report."""

import re
from dataclasses import dataclass, field
from pathlib import Path

from .formats import ConvertError, write_dataset_dir
from .hgcn import read_hgcn_csv, read_hgcn_graph
from .planetoid import read_planetoid
from .stats import validate_counts
from .text_corpus import read_text_corpus

SOURCE_KINDS = ("planetoid", "hgcn", "text_corpus")
DEFAULT_SEED = 42


@dataclass
class SourceSpec:
    source_kind: str
    input_paths: str                 # directory holding the upstream files
    output_dir: str
    name: str | None = None          # inferred from input_paths when None
    seed: int = DEFAULT_SEED         # used only for regenerated splits
    report: dict = field(default_factory=dict, init=False)

    def __post_init__(self):
        if self.source_kind not in SOURCE_KINDS:
            raise ConvertError(f"unknown source kind {self.source_kind!r}; "
                               f"expected one of {', '.join(SOURCE_KINDS)}")


def _candidates(kind: str, d: Path) -> list:
    if kind == "planetoid":
        return sorted({m.group(1) for p in d.glob("ind.*.graph")
                       if (m := re.fullmatch(r"ind\.(.+)\.graph", p.name))})
    if kind == "hgcn":
        names = {p.name[:-len(".labels.npy")]
                 for p in d.glob("*.labels.npy")}
        names |= {p.stem for p in d.glob("*.p")}
        return sorted(names)
    return sorted(p.stem for p in d.glob("*.txt")
                  if not p.name.endswith(".clean.txt")
                  and ((d / "corpus" / f"{p.stem}.clean.txt").exists()
                       or (d / f"{p.stem}.clean.txt").exists()))


def infer_name(kind: str, in_dir) -> str:
    d = Path(in_dir)
    if not d.is_dir():
        raise ConvertError(f"input directory not found: {d}")
    names = _candidates(kind, d)
    if len(names) == 1:
        return names[0]
    if not names:
        raise ConvertError(f"no {kind} dataset found under {d}")
    raise ConvertError(f"multiple {kind} datasets under {d}: "
                       f"{', '.join(names)}; pass --name")


def convert(spec: SourceSpec) -> dict:
    """Convert one upstream dataset and return the summary report.

    Writes the neutral directory to spec.output_dir. Raises
    ConvertError on missing/corrupt inputs or when the converted counts
    disagree with the known statistics for that dataset name.
    """
    name = spec.name or infer_name(spec.source_kind, spec.input_paths)
    if spec.source_kind == "planetoid":
        conv = read_planetoid(spec.input_paths, name)
    elif spec.source_kind == "hgcn":
        if (Path(spec.input_paths) / f"{name}.p").exists():
            conv = read_hgcn_graph(spec.input_paths, name, spec.seed)
        else:
            conv = read_hgcn_csv(spec.input_paths, name, spec.seed)
    else:
        conv = read_text_corpus(spec.input_paths, name, spec.seed)

    validated = validate_counts(conv)
    write_dataset_dir(conv, spec.output_dir)
    report = {
        "kind": spec.source_kind,
        "name": conv.name,
        "output_dir": str(spec.output_dir),
        "task": conv.task,
        "nodes": int(conv.n_nodes),
        "edges": len(conv.edges),
        "classes": int(conv.n_classes),
        "features": int(conv.n_features),
        "split_sizes": {"train": int(conv.train_idx.shape[0]),
                        "val": int(conv.val_idx.shape[0]),
                        "test": int(conv.test_idx.shape[0])},
        "validated": validated,
        "notes": conv.notes,
    }
    spec.report = report
    return report
