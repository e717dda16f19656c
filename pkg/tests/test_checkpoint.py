import io
import zipfile

import numpy as np
import pytest

from hyla.checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from hyla.data import SynthTreeParams, generate_synthetic_tree
from hyla.errors import DataError
from hyla.model import ModelConfig, init_model_state


@pytest.fixture(scope="module")
def trained():
    ds = generate_synthetic_tree(SynthTreeParams(depth=4, seed=2))
    cfg = ModelConfig(d0=3, d1=8, K=1, s=0.4, level="node", head="sgc")
    state = init_model_state(ds, cfg, seed=0)
    return state, cfg


def test_roundtrip_bitwise(tmp_path, trained):
    state, cfg = trained
    path = tmp_path / "ck.hyla"
    save_checkpoint(path, state, cfg, meta={"dataset": "toy", "seed": 0})
    loaded, cfg2, meta = load_checkpoint(path)
    assert cfg2 == cfg
    assert meta == {"dataset": "toy", "seed": 0}
    assert np.array_equal(loaded.W, state.W)
    assert np.array_equal(loaded.Z, state.Z)
    assert np.array_equal(loaded.constants.omegas, state.constants.omegas)
    assert np.array_equal(loaded.constants.lambdas, state.constants.lambdas)
    assert np.array_equal(loaded.constants.biases, state.constants.biases)
    assert loaded.precomputed is None


def test_resave_is_byte_identical(tmp_path, trained):
    state, cfg = trained
    a = tmp_path / "a.hyla"
    b = tmp_path / "b.hyla"
    save_checkpoint(a, state, cfg)
    save_checkpoint(b, state, cfg)
    assert a.read_bytes() == b.read_bytes()


def test_members_load_with_plain_numpy(tmp_path, trained):
    state, cfg = trained
    path = tmp_path / "ck.hyla"
    save_checkpoint(path, state, cfg)
    with zipfile.ZipFile(path) as zf:
        W = np.load(io.BytesIO(zf.read("W.npy")))
        assert W.dtype == np.float64
        assert np.array_equal(W, state.W)
        marker = zf.read("format").decode()
        assert marker.strip() == f"hyla-checkpoint/{FORMAT_VERSION}"


def test_load_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_checkpoint(tmp_path / "absent.hyla")


def test_load_garbage_file(tmp_path):
    p = tmp_path / "junk.hyla"
    p.write_bytes(b"definitely not a zip")
    with pytest.raises(DataError, match="not a checkpoint"):
        load_checkpoint(p)


def test_load_missing_member(tmp_path, trained):
    state, cfg = trained
    src = tmp_path / "ok.hyla"
    save_checkpoint(src, state, cfg)
    broken = tmp_path / "broken.hyla"
    with zipfile.ZipFile(src) as zin, \
            zipfile.ZipFile(broken, "w") as zout:
        for info in zin.infolist():
            if info.filename != "W.npy":
                zout.writestr(info, zin.read(info.filename))
    with pytest.raises(DataError, match="W.npy"):
        load_checkpoint(broken)


def test_load_rejects_newer_version(tmp_path, trained):
    state, cfg = trained
    src = tmp_path / "ok.hyla"
    save_checkpoint(src, state, cfg)
    newer = tmp_path / "newer.hyla"
    with zipfile.ZipFile(src) as zin, \
            zipfile.ZipFile(newer, "w") as zout:
        for info in zin.infolist():
            data = zin.read(info.filename)
            if info.filename == "format":
                data = f"hyla-checkpoint/{FORMAT_VERSION + 1}\n".encode()
            zout.writestr(info, data)
    with pytest.raises(DataError, match="newer"):
        load_checkpoint(newer)


def test_load_rejects_shape_config_mismatch(tmp_path, trained):
    state, cfg = trained
    src = tmp_path / "ok.hyla"
    save_checkpoint(src, state, cfg)
    bad = tmp_path / "bad.hyla"
    with zipfile.ZipFile(src) as zin, \
            zipfile.ZipFile(bad, "w") as zout:
        for info in zin.infolist():
            data = zin.read(info.filename)
            if info.filename == "Z.npy":
                buf = io.BytesIO()
                np.lib.format.write_array(buf, np.zeros((4, cfg.d0 + 2)))
                data = buf.getvalue()
            zout.writestr(info, data)
    with pytest.raises(DataError, match="shapes"):
        load_checkpoint(bad)
