"""Self-describing checkpoint bundle.

A checkpoint is a zip archive with fixed member timestamps (so identical
runs produce byte-identical files) containing:

    format        text marker "hyla-checkpoint/<version>"
    config.json   model config, seed, and array dtype note
    W.npy         classifier weight, little-endian float64
    Z.npy         embeddings
    omegas.npy / lambdas.npy / biases.npy   frozen feature-map constants

Arrays are stored in .npy format and stay loadable with plain numpy.
The precomputed propagation is intentionally absent; it is derived from
the dataset at load time.
"""

import io
import json
import zipfile
from dataclasses import asdict

import numpy as np

from .errors import DataError
from .features import HylaConstants
from .model import ModelConfig, ModelState

FORMAT_VERSION = 1
_MAGIC = "hyla-checkpoint"
_EPOCH = (1980, 1, 1, 0, 0, 0)   # earliest zip timestamp; fixed for determinism


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr, dtype="<f8"),
                              allow_pickle=False)
    return buf.getvalue()


def _write_member(zf: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_EPOCH)
    info.external_attr = 0o644 << 16
    zf.writestr(info, data)


def save_checkpoint(path, state: ModelState, cfg: ModelConfig,
                    meta: dict = None) -> None:
    """Write state + config to `path`; overwrites an existing file."""
    config = {"model": asdict(cfg), "format_version": FORMAT_VERSION}
    if meta:
        config["meta"] = meta
    with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
        _write_member(zf, "format", f"{_MAGIC}/{FORMAT_VERSION}\n".encode())
        _write_member(zf, "config.json",
                      (json.dumps(config, indent=2, sort_keys=True) + "\n")
                      .encode())
        _write_member(zf, "W.npy", _npy_bytes(state.W))
        _write_member(zf, "Z.npy", _npy_bytes(state.Z))
        c = state.constants
        _write_member(zf, "omegas.npy", _npy_bytes(c.omegas))
        _write_member(zf, "lambdas.npy", _npy_bytes(c.lambdas))
        _write_member(zf, "biases.npy", _npy_bytes(c.biases))


def _read_array(zf: zipfile.ZipFile, name: str) -> np.ndarray:
    try:
        data = zf.read(name)
    except KeyError:
        raise DataError(f"checkpoint is missing member {name!r}") from None
    return np.lib.format.read_array(io.BytesIO(data), allow_pickle=False)


def load_checkpoint(path):
    """Read a checkpoint; returns (ModelState, ModelConfig, meta dict)."""
    try:
        zf = zipfile.ZipFile(path)
    except (zipfile.BadZipFile, FileNotFoundError, IsADirectoryError) as e:
        raise DataError(f"not a checkpoint file: {path} ({e})") from None
    with zf:
        try:
            marker = zf.read("format").decode().strip()
        except KeyError:
            raise DataError(f"{path}: missing format marker") from None
        magic, _, version = marker.partition("/")
        if magic != _MAGIC:
            raise DataError(f"{path}: unrecognized format {marker!r}")
        if int(version) > FORMAT_VERSION:
            raise DataError(
                f"{path}: format version {version} is newer than "
                f"supported version {FORMAT_VERSION}")
        config = json.loads(zf.read("config.json").decode())
        cfg = ModelConfig(**config["model"])
        constants = HylaConstants(
            omegas=_read_array(zf, "omegas.npy"),
            lambdas=_read_array(zf, "lambdas.npy"),
            biases=_read_array(zf, "biases.npy"),
            scale_s=cfg.s,
        )
        state = ModelState(W=_read_array(zf, "W.npy"),
                           Z=_read_array(zf, "Z.npy"),
                           constants=constants)
        if state.Z.shape[1] != cfg.d0 or constants.d1 != cfg.d1:
            raise DataError(f"{path}: array shapes disagree with config")
        return state, cfg, config.get("meta", {})
